"""Synthetic 50-variable corpus with planted title -> question dependencies.

The default network links every question class to its same-name title class
with P(present | present) = 0.8 and P(present | absent) = 0.05, so learned
structures should rediscover the same-class edges. Title marginals cycle
through a fixed set of low rates to mimic sparse entity annotations.
"""

from __future__ import annotations

from .catalog import ENTITY_CLASSES, N_CLASSES, canonical_variables
from .core import BayesianNetwork, Cpt, Dag, Dataset, Role, forward_sample
from .errors import InputError

TITLE_MARGINAL_CYCLE = (0.25, 0.08, 0.04, 0.02, 0.01)
LINKED_RATE = 0.8  # P(child present | some parent present)
BASE_RATE = 0.05  # P(present | no parent present), also orphan question rate


def default_planted_edges() -> list[tuple[int, int]]:
    """One edge per class: T_<CLASS> -> Q_<CLASS>."""
    return [(k, N_CLASSES + k) for k in range(N_CLASSES)]


def build_synthetic_network(
    planted_edges: list[tuple[int, int]] | None = None,
) -> BayesianNetwork:
    """Ground-truth network over the canonical 50 variables.

    Roots keep their marginal rate (title rates cycle, question roots sit at
    the base rate); any variable with parents is present with probability
    0.8 when at least one parent is present and 0.05 otherwise. A cycle in
    `planted_edges` is rejected by graph validation.
    """
    variables = canonical_variables()
    if planted_edges is None:
        planted_edges = default_planted_edges()
    dag = Dag(len(variables), frozenset((int(u), int(v)) for u, v in planted_edges))
    cpts = []
    for var in variables:
        parents = dag.parents(var.id)
        if not parents:
            if var.role is Role.TITLE:
                rate = TITLE_MARGINAL_CYCLE[
                    ENTITY_CLASSES.index(var.entity_class) % len(TITLE_MARGINAL_CYCLE)
                ]
            else:
                rate = BASE_RATE
            table = [[1.0 - rate, rate]]
        else:
            table = []
            for config in range(2 ** len(parents)):
                rate = LINKED_RATE if config else BASE_RATE
                table.append([1.0 - rate, rate])
        cpts.append(Cpt(var.id, parents, table))
    return BayesianNetwork(dag, variables, tuple(cpts))


def generate_synthetic(
    n_rows: int, seed: int, planted_edges: list[tuple[int, int]] | None = None
) -> tuple[Dataset, BayesianNetwork]:
    """Forward-sample `n_rows` records from the planted network."""
    if n_rows < 1:
        raise InputError("row count must be at least 1")
    bn = build_synthetic_network(planted_edges)
    return forward_sample(bn, n_rows, seed), bn

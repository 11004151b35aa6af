"""Shared builders for test networks and datasets."""

from __future__ import annotations

import numpy as np

from entbn.core import BayesianNetwork, Cpt, Dag, Dataset, Role, Variable


def make_variables(n: int, roles: list[Role] | None = None) -> tuple[Variable, ...]:
    if roles is None:
        roles = [Role.TITLE] * n
    return tuple(Variable(i, f"X{i}", roles[i]) for i in range(n))


def network_from_p_one(
    n: int,
    edges: set[tuple[int, int]],
    p_one: dict[int, list[float]],
    roles: list[Role] | None = None,
) -> BayesianNetwork:
    """Network where p_one[v][j] = P(v=1 | parent config j)."""
    dag = Dag(n, frozenset(edges))
    cpts = []
    for v in range(n):
        ones = np.asarray(p_one[v], dtype=np.float64)
        cpts.append(Cpt(v, dag.parents(v), np.column_stack([1.0 - ones, ones])))
    return BayesianNetwork(dag, make_variables(n, roles), tuple(cpts))


def chain_network() -> BayesianNetwork:
    """X0 -> X1 with P(X0=1)=0.5, P(X1=1|X0=0)=0.2, P(X1=1|X0=1)=0.8."""
    return network_from_p_one(2, {(0, 1)}, {0: [0.5], 1: [0.2, 0.8]})


def independent_pair_network() -> BayesianNetwork:
    """Two roots with P(X0=1)=0.3 and P(X1=1)=0.6."""
    return network_from_p_one(2, set(), {0: [0.3], 1: [0.6]})


def random_network(
    rng: np.random.Generator,
    n: int,
    edge_prob: float = 0.5,
    low: float = 0.05,
    high: float = 0.95,
    max_parents: int = 3,
) -> BayesianNetwork:
    """Random DAG (edges respect id order) with CPT entries in [low, high]."""
    edges = set()
    for v in range(1, n):
        candidates = rng.permutation(v)[:max_parents]
        for u in candidates:
            if rng.random() < edge_prob:
                edges.add((int(u), v))
    dag = Dag(n, frozenset(edges))
    cpts = []
    for v in range(n):
        parents = dag.parents(v)
        ones = rng.uniform(low, high, size=2 ** len(parents))
        cpts.append(Cpt(v, parents, np.column_stack([1.0 - ones, ones])))
    return BayesianNetwork(dag, make_variables(n), tuple(cpts))


def dataset_from_columns(columns: dict[int, list[int]], n: int) -> Dataset:
    """Dataset whose column v holds columns[v]; unlisted columns are zero."""
    lengths = {len(col) for col in columns.values()}
    rows = lengths.pop()
    records = np.zeros((rows, n), dtype=np.uint8)
    for v, col in columns.items():
        records[:, v] = col
    return Dataset(make_variables(n), records)


def two_column_dataset(counts: np.ndarray) -> Dataset:
    """Two variables realizing the given 2x2 contingency counts.

    counts[a][b] is the number of rows with X0=a, X1=b.
    """
    rows = []
    for a in (0, 1):
        for b in (0, 1):
            rows.extend([[a, b]] * int(counts[a][b]))
    return Dataset(make_variables(2), np.array(rows, dtype=np.uint8))

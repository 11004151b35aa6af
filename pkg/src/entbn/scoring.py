"""Decomposable structure scores: BIC, BDeu(alpha), and K2.

Every score is a sum of per-family terms computed from the family's
sufficient statistics, which is what makes single-edge search moves cheap:
adding or deleting an edge changes only the child's family term.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import Dag, Dataset, parent_state_indices
from .errors import CapacityError, InputError

# Families with more parents than this would need bincount tables beyond
# 2**25 entries; no realistic search on binary data gets close.
_MAX_FAMILY_PARENTS = 25


class ScoreKind(enum.Enum):
    BIC = "bic"
    BDEU = "bdeu"
    K2 = "k2"


@dataclass(frozen=True)
class ScoreMetric:
    """Which score to use; `alpha` is the equivalent sample size (BDeu only)."""

    kind: ScoreKind
    alpha: float = 5.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise InputError("alpha must be positive")


@dataclass(frozen=True)
class FamilyStats:
    """Sufficient statistics of one family: counts over (parent config, child state).

    `counts[j, k]` is the number of records with the j-th parent
    configuration and child state k; `row_totals[j]` sums over k.
    """

    variable: int
    parents: tuple[int, ...]
    counts: np.ndarray

    def __post_init__(self):
        parents = tuple(int(p) for p in self.parents)
        counts = np.asarray(self.counts, dtype=np.int64)
        expected = (2 ** len(parents), 2)
        if counts.shape != expected:
            raise InputError(
                f"family counts for variable {self.variable}: shape {counts.shape}, "
                f"expected {expected}"
            )
        if np.any(counts < 0):
            raise InputError("family counts must be non-negative")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "counts", counts)

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def n_rows(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_dataset(
        cls, d: Dataset, variable: int, parents: tuple[int, ...]
    ) -> FamilyStats:
        if len(parents) > _MAX_FAMILY_PARENTS:
            raise CapacityError(
                f"family of variable {variable} has {len(parents)} parents; "
                f"the guard is {_MAX_FAMILY_PARENTS}"
            )
        parents = tuple(parents)
        cell = (parent_state_indices(d.records, parents) << 1) | d.records[
            :, variable
        ].astype(np.int64)
        flat = np.bincount(cell, minlength=2 ** (len(parents) + 1))
        return cls(variable, parents, flat.reshape(-1, 2))


def family_score(stats: FamilyStats, metric: ScoreMetric, n_rows: int) -> float:
    """Score contribution of one family.

    BIC is the family log-likelihood at the MLE minus (ln N / 2) times the
    family's free-parameter count. BDeu and K2 are log marginal likelihoods
    under Dirichlet priors: uniform-equivalent with total mass alpha for
    BDeu, all-ones for K2.
    """
    if stats.n_rows != n_rows:
        raise InputError(
            f"family counts sum to {stats.n_rows} but the dataset has {n_rows} rows"
        )
    counts = stats.counts
    row_totals = stats.row_totals
    q = counts.shape[0]
    r = counts.shape[1]

    if metric.kind is ScoreKind.BIC:
        positive = counts > 0
        safe = np.where(positive, counts, 1)
        log_ratio = np.log(safe) - np.log(np.maximum(row_totals, 1))[:, None]
        ll = float(np.sum(np.where(positive, counts * log_ratio, 0.0)))
        penalty = 0.5 * np.log(n_rows) * (r - 1) * q
        return ll - penalty

    if metric.kind is ScoreKind.BDEU:
        a_jk = metric.alpha / (q * r)
        a_j = metric.alpha / q
    else:  # K2
        a_jk = 1.0
        a_j = float(r)
    score = np.sum(gammaln(counts + a_jk)) - q * r * gammaln(a_jk)
    score += q * gammaln(a_j) - np.sum(gammaln(row_totals + a_j))
    return float(score)


def structure_score(dag: Dag, d: Dataset, metric: ScoreMetric) -> float:
    """Total score of a structure: the sum of its family scores."""
    if dag.node_count != d.n_variables:
        raise InputError("graph node count does not match dataset variables")
    if d.n_rows < 1:
        raise InputError("scoring requires at least one record")
    total = 0.0
    for v in range(dag.node_count):
        stats = FamilyStats.from_dataset(d, v, dag.parents(v))
        total += family_score(stats, metric, d.n_rows)
    return total


def num_parameters(dag: Dag) -> int:
    """Free parameters of a binary network with this structure."""
    return sum(2 ** len(dag.parents(v)) for v in range(dag.node_count))

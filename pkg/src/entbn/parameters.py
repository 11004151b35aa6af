"""Maximum-likelihood CPD estimation given a structure."""

from __future__ import annotations

import numpy as np

from .core import BayesianNetwork, Cpt, Dag, Dataset
from .errors import InputError
from .scoring import FamilyStats


def fit_mle(dag: Dag, d: Dataset, pseudocount: float = 0.0) -> BayesianNetwork:
    """Fit one CPT per variable from relative frequencies.

    With the default pseudocount of 0, an unseen parent configuration gets a
    uniform row so the resulting network stays usable for inference; a
    positive pseudocount applies Laplace-style smoothing everywhere.
    """
    if pseudocount < 0:
        raise InputError("pseudocount must be non-negative")
    if dag.node_count != d.n_variables:
        raise InputError("graph node count does not match dataset variables")
    if d.n_rows < 1:
        raise InputError("fitting requires at least one record")
    cpts = []
    for v in range(dag.node_count):
        stats = FamilyStats.from_dataset(d, v, dag.parents(v))
        counts = stats.counts.astype(np.float64) + pseudocount
        row_totals = counts.sum(axis=1)
        table = np.full_like(counts, 0.5)
        seen = row_totals > 0
        table[seen] = counts[seen] / row_totals[seen, None]
        cpts.append(Cpt(v, dag.parents(v), table))
    return BayesianNetwork(dag, d.variables, tuple(cpts))

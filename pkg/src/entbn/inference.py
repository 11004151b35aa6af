"""Conditional query answering: exact inference and three Monte-Carlo schemes.

All samplers are deterministic for a given seed. Independent queries can run
concurrently as long as each call gets its own seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Assignment,
    BayesianNetwork,
    parent_state_indices,
    topological_order,
    _forward_sample_matrix,
)
from .errors import (
    AcceptanceStarvationError,
    CapacityError,
    DegenerateEvidenceError,
    InconsistentEvidenceError,
    InitializationError,
    InputError,
)

_ENUMERATION_GUARD = 20
_INIT_ATTEMPT_CAP = 10_000
_REJECTION_CAP_FACTOR = 1000
_REJECTION_BATCH = 65_536
_GIBBS_TABLE_GUARD = 16  # precomputed conditionals up to 2**16 blanket configs


class InferenceMethod(enum.Enum):
    ENUMERATION = "enumeration"
    VARIABLE_ELIMINATION = "ve"
    GIBBS = "gibbs"
    LIKELIHOOD_WEIGHTING = "lw"
    REJECTION_SAMPLING = "rs"


@dataclass(frozen=True)
class Query:
    """A target variable and a partial evidence assignment."""

    target: int
    evidence: Assignment = field(default_factory=dict)

    def __post_init__(self):
        evidence = dict(self.evidence)
        if self.target in evidence:
            raise InputError("query target cannot also be evidence")
        for var, state in evidence.items():
            if state not in (0, 1):
                raise InputError(f"evidence state {state} for variable {var}")
        object.__setattr__(self, "evidence", evidence)


@dataclass(frozen=True)
class Posterior:
    """Distribution over the target's two states, plus how it was obtained."""

    probabilities: np.ndarray
    method: InferenceMethod
    samples_used: int = 0

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if probs.shape != (2,):
            raise InputError("posterior must cover exactly two states")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise InputError("posterior entries must be non-negative and sum to 1")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probabilities", probs)

    def p(self, state: int) -> float:
        return float(self.probabilities[state])


def _validate_query(bn: BayesianNetwork, q: Query) -> None:
    n = bn.n_variables
    if not 0 <= q.target < n:
        raise InputError(f"target {q.target} out of range")
    for var in q.evidence:
        if not 0 <= var < n:
            raise InputError(f"evidence variable {var} out of range")


# ---------------------------------------------------------------------------
# Exact inference
# ---------------------------------------------------------------------------


def _full_assignment_probabilities(bn: BayesianNetwork) -> np.ndarray:
    """Grid of all 2**n assignments (rows) and their joint probabilities."""
    n = bn.n_variables
    codes = np.arange(2**n, dtype=np.int64)
    grid = ((codes[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)
    probs = np.ones(2**n)
    for cpt in bn.cpts:
        idx = parent_state_indices(grid, cpt.parents)
        probs *= cpt.table[idx, grid[:, cpt.variable]]
    return grid, probs


def enumerate_posterior(bn: BayesianNetwork, q: Query) -> Posterior:
    """Ground-truth posterior by summing the joint over all completions.

    Only usable on small networks; refuses more than 20 variables.
    """
    _validate_query(bn, q)
    if bn.n_variables > _ENUMERATION_GUARD:
        raise CapacityError(
            f"enumeration over {bn.n_variables} variables exceeds the guard "
            f"of {_ENUMERATION_GUARD}"
        )
    grid, probs = _full_assignment_probabilities(bn)
    mask = np.ones(len(probs), dtype=bool)
    for var, state in q.evidence.items():
        mask &= grid[:, var] == state
    target_col = grid[:, q.target]
    p0 = float(probs[mask & (target_col == 0)].sum())
    p1 = float(probs[mask & (target_col == 1)].sum())
    total = p0 + p1
    if total <= 0.0:
        raise InconsistentEvidenceError("evidence has probability zero")
    return Posterior(
        np.array([p0, p1]) / total, InferenceMethod.ENUMERATION, 0
    )


# --- factor machinery for variable elimination ---


def _cpt_factor(cpt) -> tuple[tuple[int, ...], np.ndarray]:
    scope = cpt.parents + (cpt.variable,)
    table = cpt.table.reshape((2,) * len(scope))
    order = tuple(sorted(scope))
    axes = [scope.index(v) for v in order]
    return order, np.transpose(table, axes)


def _restrict(factor, evidence: Assignment):
    scope, table = factor
    if not any(v in evidence for v in scope):
        return factor
    index = tuple(evidence.get(v, slice(None)) for v in scope)
    new_scope = tuple(v for v in scope if v not in evidence)
    return new_scope, table[index]


def _multiply(f1, f2):
    scope1, t1 = f1
    scope2, t2 = f2
    scope = tuple(sorted(set(scope1) | set(scope2)))
    shape1 = tuple(2 if v in scope1 else 1 for v in scope)
    shape2 = tuple(2 if v in scope2 else 1 for v in scope)
    return scope, t1.reshape(shape1) * t2.reshape(shape2)


def _sum_out(factor, var: int):
    scope, table = factor
    axis = scope.index(var)
    return tuple(v for v in scope if v != var), table.sum(axis=axis)


def _min_degree_order(scopes, to_eliminate: set[int]) -> list[int]:
    """Elimination order by repeatedly removing the lowest-degree variable
    from the moralized interaction graph; ties broken by ascending id."""
    neighbors: dict[int, set[int]] = {}
    for scope in scopes:
        for v in scope:
            neighbors.setdefault(v, set())
        for i, v in enumerate(scope):
            for w in scope[i + 1 :]:
                neighbors[v].add(w)
                neighbors[w].add(v)
    remaining = set(to_eliminate)
    order = []
    while remaining:
        v = min(remaining, key=lambda x: (len(neighbors.get(x, ())), x))
        order.append(v)
        vs = neighbors.pop(v, set())
        for a in vs:
            neighbors[a].discard(v)
        for a in vs:
            for b in vs:
                if a != b:
                    neighbors[a].add(b)
        remaining.discard(v)
    return order


def _reduced_factors(bn: BayesianNetwork, evidence: Assignment):
    return [_restrict(_cpt_factor(cpt), evidence) for cpt in bn.cpts]


def _eliminate_to_target(factors, target: int, order: list[int]) -> np.ndarray:
    for v in order:
        related = [f for f in factors if v in f[0]]
        if not related:
            continue
        factors = [f for f in factors if v not in f[0]]
        prod = related[0]
        for f in related[1:]:
            prod = _multiply(prod, f)
        factors.append(_sum_out(prod, v))
    result = factors[0]
    for f in factors[1:]:
        result = _multiply(result, f)
    scope, table = result
    if scope != (target,):
        raise InputError(f"elimination left scope {scope}, expected ({target},)")
    return table


def variable_elimination(
    bn: BayesianNetwork, q: Query, elimination_order: list[int] | None = None
) -> Posterior:
    """Exact posterior via sum-product elimination.

    Factors are first restricted to the evidence; the non-target,
    non-evidence variables are then summed out one at a time. By default the
    order is chosen by the min-degree heuristic (ties by ascending id).
    """
    _validate_query(bn, q)
    factors = _reduced_factors(bn, q.evidence)
    to_eliminate = {
        v for v in range(bn.n_variables) if v != q.target and v not in q.evidence
    }
    if elimination_order is not None:
        if set(elimination_order) != to_eliminate or len(elimination_order) != len(
            to_eliminate
        ):
            raise InputError(
                "elimination order must cover exactly the non-target, "
                "non-evidence variables"
            )
        order = list(elimination_order)
    else:
        order = _min_degree_order([f[0] for f in factors], to_eliminate)
    table = _eliminate_to_target(factors, q.target, order)
    total = float(table.sum())
    if total <= 0.0:
        raise InconsistentEvidenceError("evidence has probability zero")
    return Posterior(table / total, InferenceMethod.VARIABLE_ELIMINATION, 0)


def prior_marginal(bn: BayesianNetwork, target: int) -> Posterior:
    """Marginal of one variable with no evidence (exact)."""
    return variable_elimination(bn, Query(target))


# ---------------------------------------------------------------------------
# Monte-Carlo inference
# ---------------------------------------------------------------------------


def _clamped_forward_state(
    bn: BayesianNetwork, evidence: Assignment, rng: np.random.Generator
) -> list[int] | None:
    """One ancestral sample with evidence clamped; None if any clamped value
    has probability zero under its sampled parents."""
    state = [0] * bn.n_variables
    for v in topological_order(bn.dag):
        cpt = bn.cpts[v]
        idx = 0
        for p in cpt.parents:
            idx = (idx << 1) | state[p]
        if v in evidence:
            state[v] = evidence[v]
            if cpt.table[idx, state[v]] <= 0.0:
                return None
        else:
            state[v] = 1 if rng.random() < cpt.table[idx, 1] else 0
    return state


def _gibbs_initial_state(
    bn: BayesianNetwork, evidence: Assignment, rng: np.random.Generator
) -> list[int]:
    for _ in range(_INIT_ATTEMPT_CAP):
        state = _clamped_forward_state(bn, evidence, rng)
        if state is not None:
            return state
    raise InitializationError(
        f"no evidence-consistent starting state in {_INIT_ATTEMPT_CAP} attempts"
    )


def _gibbs_update_tables(bn: BayesianNetwork, evidence: Assignment, free: list[int]):
    """Per-variable full conditionals P(v=1 | rest), precomputed as flat
    lookup tables over the free part of the Markov blanket.

    Entry index is the binary encoding of the free blanket states (first
    listed most significant). Evidence values are folded in as constants.
    """
    updates = []
    for v in free:
        involved = [bn.cpts[v]] + [bn.cpts[c] for c in bn.dag.children(v)]
        deps = sorted(
            {u for cpt in involved for u in cpt.parents + (cpt.variable,)}
            - {v}
            - set(evidence)
        )
        if len(deps) > _GIBBS_TABLE_GUARD:
            raise CapacityError(
                f"Markov blanket of variable {v} spans {len(deps)} free "
                f"variables; the precomputation guard is {_GIBBS_TABLE_GUARD}"
            )
        n_cfg = 2 ** len(deps)
        cfg = np.arange(n_cfg, dtype=np.int64)
        bit = {
            u: (cfg >> (len(deps) - 1 - i)) & 1 for i, u in enumerate(deps)
        }

        def column(u: int, v_state: int) -> np.ndarray:
            if u == v:
                return np.full(n_cfg, v_state, dtype=np.int64)
            if u in evidence:
                return np.full(n_cfg, evidence[u], dtype=np.int64)
            return bit[u]

        weight = {0: np.ones(n_cfg), 1: np.ones(n_cfg)}
        for cpt in involved:
            for s in (0, 1):
                idx = np.zeros(n_cfg, dtype=np.int64)
                for p in cpt.parents:
                    idx = (idx << 1) | column(p, s)
                weight[s] = weight[s] * cpt.table[idx, column(cpt.variable, s)]
        denom = weight[0] + weight[1]
        p_one = np.where(denom > 0, weight[1] / np.where(denom > 0, denom, 1.0), 0.5)
        updates.append((v, deps, p_one.tolist()))
    return updates


def _run_gibbs_chain(
    bn: BayesianNetwork,
    evidence: Assignment,
    tally_vars: list[int],
    n_samples: int,
    burn_in: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Single-chain Gibbs sweep in ascending-id order; returns, per tallied
    variable, the number of kept sweeps in which it was 1."""
    free = sorted(v for v in range(bn.n_variables) if v not in evidence)
    state = _gibbs_initial_state(bn, evidence, rng)
    updates = _gibbs_update_tables(bn, evidence, free)
    uniforms = rng.random((burn_in + n_samples, len(free)))
    ones = [0] * len(tally_vars)
    for t in range(burn_in + n_samples):
        row = uniforms[t]
        for i, (v, deps, table) in enumerate(updates):
            idx = 0
            for p in deps:
                idx = (idx << 1) | state[p]
            state[v] = 1 if row[i] < table[idx] else 0
        if t >= burn_in:
            for k, tv in enumerate(tally_vars):
                ones[k] += state[tv]
    return np.array(ones, dtype=np.int64)


def gibbs_sampling(
    bn: BayesianNetwork,
    q: Query,
    n_samples: int,
    burn_in: int = 1_000,
    seed: int = 0,
) -> Posterior:
    """Posterior frequency from one Gibbs chain after burn-in."""
    _validate_query(bn, q)
    if n_samples < 1:
        raise InputError("sample count must be at least 1")
    if burn_in < 0:
        raise InputError("burn-in cannot be negative")
    rng = np.random.default_rng(seed)
    ones = _run_gibbs_chain(bn, q.evidence, [q.target], n_samples, burn_in, rng)
    p1 = ones[0] / n_samples
    return Posterior(
        np.array([1.0 - p1, p1]), InferenceMethod.GIBBS, n_samples
    )


def _run_likelihood_weighting(
    bn: BayesianNetwork,
    evidence: Assignment,
    n_samples: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Evidence-clamped ancestral samples and their importance weights."""
    records = np.zeros((n_samples, bn.n_variables), dtype=np.uint8)
    weights = np.ones(n_samples)
    for v in topological_order(bn.dag):
        cpt = bn.cpts[v]
        idx = parent_state_indices(records, cpt.parents)
        if v in evidence:
            records[:, v] = evidence[v]
            weights *= cpt.table[idx, evidence[v]]
        else:
            records[:, v] = rng.random(n_samples) < cpt.table[idx, 1]
    return records, weights


def likelihood_weighting(
    bn: BayesianNetwork, q: Query, n_samples: int, seed: int = 0
) -> Posterior:
    """Posterior from weighted ancestral samples with evidence clamped."""
    _validate_query(bn, q)
    if n_samples < 1:
        raise InputError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    records, weights = _run_likelihood_weighting(bn, q.evidence, n_samples, rng)
    total = float(weights.sum())
    if total == 0.0:
        raise DegenerateEvidenceError("all likelihood weights are zero")
    # clip: the subset sum can exceed the total by rounding error
    p1 = min(1.0, float(weights[records[:, q.target] == 1].sum()) / total)
    return Posterior(
        np.array([1.0 - p1, p1]), InferenceMethod.LIKELIHOOD_WEIGHTING, n_samples
    )


def _run_rejection_sampling(
    bn: BayesianNetwork,
    evidence: Assignment,
    n_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Accepted records (exactly n_samples rows) or a starvation error.

    Rows are discarded the moment a sampled evidence variable mismatches,
    which only skips work that could never influence an accepted sample.
    """
    cap = _REJECTION_CAP_FACTOR * n_samples
    order = topological_order(bn.dag)
    accepted: list[np.ndarray] = []
    n_accepted = 0
    attempts = 0
    while n_accepted < n_samples and attempts < cap:
        batch = min(_REJECTION_BATCH, cap - attempts)
        attempts += batch
        rows = np.zeros((batch, bn.n_variables), dtype=np.uint8)
        for v in order:
            if not rows.shape[0]:
                break
            cpt = bn.cpts[v]
            idx = parent_state_indices(rows, cpt.parents)
            rows[:, v] = rng.random(rows.shape[0]) < cpt.table[idx, 1]
            if v in evidence:
                rows = rows[rows[:, v] == evidence[v]]
        take = min(len(rows), n_samples - n_accepted)
        if take:
            accepted.append(rows[:take])
            n_accepted += take
    if n_accepted < n_samples:
        rate = n_accepted / attempts
        raise AcceptanceStarvationError(
            f"only {n_accepted} of {n_samples} samples accepted in {attempts} "
            f"attempts (acceptance rate {rate:.3e})",
            acceptance_rate=rate,
        )
    return np.vstack(accepted)


def rejection_sampling(
    bn: BayesianNetwork, q: Query, n_samples: int, seed: int = 0
) -> Posterior:
    """Posterior from forward samples that match the evidence exactly.

    `n_samples` counts accepted samples; sampling stops with a starvation
    error if 1000 * n_samples attempts are not enough.
    """
    _validate_query(bn, q)
    if n_samples < 1:
        raise InputError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    rows = _run_rejection_sampling(bn, q.evidence, n_samples, rng)
    p1 = float(rows[:, q.target].mean())
    return Posterior(
        np.array([1.0 - p1, p1]), InferenceMethod.REJECTION_SAMPLING, n_samples
    )


# ---------------------------------------------------------------------------
# Shared entry points
# ---------------------------------------------------------------------------


def query_posterior(
    bn: BayesianNetwork,
    q: Query,
    method: InferenceMethod,
    n_samples: int = 10_000,
    burn_in: int = 1_000,
    seed: int = 0,
) -> Posterior:
    """Dispatch a single query to the chosen inference routine."""
    if method is InferenceMethod.ENUMERATION:
        return enumerate_posterior(bn, q)
    if method is InferenceMethod.VARIABLE_ELIMINATION:
        return variable_elimination(bn, q)
    if method is InferenceMethod.GIBBS:
        return gibbs_sampling(bn, q, n_samples, burn_in, seed)
    if method is InferenceMethod.LIKELIHOOD_WEIGHTING:
        return likelihood_weighting(bn, q, n_samples, seed)
    if method is InferenceMethod.REJECTION_SAMPLING:
        return rejection_sampling(bn, q, n_samples, seed)
    raise InputError(f"unknown inference method {method}")


def batch_posteriors(
    bn: BayesianNetwork,
    targets: list[int],
    evidence: Assignment,
    method: InferenceMethod,
    n_samples: int = 10_000,
    burn_in: int = 1_000,
    seed: int = 0,
) -> list[Posterior]:
    """Posteriors for several targets under one shared evidence set.

    The Monte-Carlo methods draw a single sample set (or run a single
    chain) and read every target from it, which is what makes one-vs-rest
    prediction over 25 question classes affordable.
    """
    for t in targets:
        _validate_query(bn, Query(t, evidence))
    if method in (InferenceMethod.ENUMERATION, InferenceMethod.VARIABLE_ELIMINATION):
        if method is InferenceMethod.ENUMERATION:
            return [enumerate_posterior(bn, Query(t, evidence)) for t in targets]
        factors = _reduced_factors(bn, q_evidence := dict(evidence))
        posteriors = []
        for t in targets:
            to_eliminate = {
                v for v in range(bn.n_variables) if v != t and v not in q_evidence
            }
            order = _min_degree_order([f[0] for f in factors], to_eliminate)
            table = _eliminate_to_target(list(factors), t, order)
            total = float(table.sum())
            if total <= 0.0:
                raise InconsistentEvidenceError("evidence has probability zero")
            posteriors.append(
                Posterior(table / total, InferenceMethod.VARIABLE_ELIMINATION, 0)
            )
        return posteriors
    rng = np.random.default_rng(seed)
    if method is InferenceMethod.GIBBS:
        ones = _run_gibbs_chain(bn, evidence, list(targets), n_samples, burn_in, rng)
        return [
            Posterior(
                np.array([1.0 - o / n_samples, o / n_samples]),
                InferenceMethod.GIBBS,
                n_samples,
            )
            for o in ones
        ]
    if method is InferenceMethod.LIKELIHOOD_WEIGHTING:
        records, weights = _run_likelihood_weighting(bn, evidence, n_samples, rng)
        total = float(weights.sum())
        if total == 0.0:
            raise DegenerateEvidenceError("all likelihood weights are zero")
        out = []
        for t in targets:
            p1 = min(1.0, float(weights[records[:, t] == 1].sum()) / total)
            out.append(
                Posterior(
                    np.array([1.0 - p1, p1]),
                    InferenceMethod.LIKELIHOOD_WEIGHTING,
                    n_samples,
                )
            )
        return out
    if method is InferenceMethod.REJECTION_SAMPLING:
        rows = _run_rejection_sampling(bn, evidence, n_samples, rng)
        out = []
        for t in targets:
            p1 = float(rows[:, t].mean())
            out.append(
                Posterior(
                    np.array([1.0 - p1, p1]),
                    InferenceMethod.REJECTION_SAMPLING,
                    n_samples,
                )
            )
        return out
    raise InputError(f"unknown inference method {method}")

"""Structure search: greedy hill climbing, Chow-Liu trees, chi-square pruning."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainccinv

from .core import Dag, Dataset
from .errors import InputError
from .scoring import FamilyStats, ScoreMetric, family_score


@dataclass(frozen=True)
class SearchConfig:
    """Hill-climb settings. `start=None` means the empty graph.

    Tie-breaking among equal-delta moves is fixed: lexicographic on
    (parent id, child id, move kind) with kinds ordered add < delete < reverse,
    so a search is fully determined by the dataset and this config.
    """

    metric: ScoreMetric
    max_parents: int | None = None
    max_iterations: int = 10_000
    start: Dag | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError("max_iterations must be at least 1")
        if self.max_parents is not None and self.max_parents < 1:
            raise InputError("max_parents must be at least 1 when set")


@dataclass(frozen=True)
class HillClimbResult:
    """Search outcome plus the incremental score after each accepted move."""

    dag: Dag
    score: float
    trace: tuple[float, ...]  # trace[0] is the start score


_ADD, _DELETE, _REVERSE = 0, 1, 2


def _descendant_sets(children: list[set[int]], n: int) -> list[set[int]]:
    desc: list[set[int]] = []
    for start in range(n):
        seen: set[int] = set()
        stack = list(children[start])
        while stack:
            w = stack.pop()
            if w not in seen:
                seen.add(w)
                stack.extend(children[w])
        desc.append(seen)
    return desc


def _has_other_path(children: list[set[int]], u: int, v: int) -> bool:
    """True if v is reachable from u without using the direct edge (u, v)."""
    seen = {u}
    stack = [c for c in children[u] if c != v]
    while stack:
        w = stack.pop()
        if w == v:
            return True
        if w not in seen:
            seen.add(w)
            stack.extend(children[w])
    return False


def hill_climb(d: Dataset, cfg: SearchConfig) -> Dag:
    """Greedy local search over single-edge moves, maximizing the structure score."""
    return hill_climb_detailed(d, cfg).dag


def hill_climb_detailed(d: Dataset, cfg: SearchConfig) -> HillClimbResult:
    """Hill climbing with full bookkeeping.

    Each iteration scores every legal add/delete/reverse move through
    family-score deltas (add and delete touch one family, reverse touches
    two), applies the best strictly-improving move, and stops at a local
    optimum or after `max_iterations` accepted moves. Family scores are
    cached across iterations keyed by (child, parent set).
    """
    if d.n_rows < 1:
        raise InputError("hill climbing requires a non-empty dataset")
    n_vars = d.n_variables
    start = cfg.start if cfg.start is not None else Dag(n_vars)
    if start.node_count != n_vars:
        raise InputError("start graph node count does not match dataset")
    max_parents = cfg.max_parents if cfg.max_parents is not None else n_vars - 1

    parents = [set(start.parents(v)) for v in range(n_vars)]
    children = [set(start.children(v)) for v in range(n_vars)]
    edges = set(start.edges)

    cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def fam(v: int, ps: tuple[int, ...]) -> float:
        key = (v, ps)
        val = cache.get(key)
        if val is None:
            val = family_score(FamilyStats.from_dataset(d, v, ps), cfg.metric, d.n_rows)
            cache[key] = val
        return val

    current = [fam(v, tuple(sorted(parents[v]))) for v in range(n_vars)]
    total = sum(current)
    trace = [total]

    for _ in range(cfg.max_iterations):
        desc = _descendant_sets(children, n_vars)
        best_delta = 0.0
        best_move = None
        for u in range(n_vars):
            for v in range(n_vars):
                if u == v:
                    continue
                if (u, v) not in edges:
                    if u in desc[v] or len(parents[v]) >= max_parents:
                        continue
                    ps = tuple(sorted(parents[v] | {u}))
                    delta = fam(v, ps) - current[v]
                    if delta > best_delta:
                        best_delta, best_move = delta, (_ADD, u, v)
                else:
                    ps = tuple(sorted(parents[v] - {u}))
                    delta_del = fam(v, ps) - current[v]
                    if delta_del > best_delta:
                        best_delta, best_move = delta_del, (_DELETE, u, v)
                    if len(parents[u]) < max_parents and not _has_other_path(
                        children, u, v
                    ):
                        ps_u = tuple(sorted(parents[u] | {v}))
                        delta = delta_del + fam(u, ps_u) - current[u]
                        if delta > best_delta:
                            best_delta, best_move = delta, (_REVERSE, u, v)
        if best_move is None:
            break
        kind, u, v = best_move
        if kind == _ADD:
            edges.add((u, v))
            parents[v].add(u)
            children[u].add(v)
        elif kind == _DELETE:
            edges.remove((u, v))
            parents[v].discard(u)
            children[u].discard(v)
        else:
            edges.remove((u, v))
            parents[v].discard(u)
            children[u].discard(v)
            edges.add((v, u))
            parents[u].add(v)
            children[v].add(u)
            current[u] = fam(u, tuple(sorted(parents[u])))
        current[v] = fam(v, tuple(sorted(parents[v])))
        total += best_delta
        trace.append(total)

    return HillClimbResult(Dag(n_vars, frozenset(edges)), total, tuple(trace))


def _pair_counts(records: np.ndarray, x: int, y: int) -> np.ndarray:
    """2x2 contingency table of columns x and y: counts[a, b] = #{x=a, y=b}."""
    cx = records[:, x].astype(np.int64)
    cy = records[:, y].astype(np.int64)
    flat = np.bincount((cx << 1) | cy, minlength=4)
    return flat.reshape(2, 2)


def _mi_from_joint(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = p * (np.log(p) - np.log(px * py))
    return float(np.sum(np.where(p > 0, terms, 0.0)))


def mutual_information(d: Dataset, x: int, y: int) -> float:
    """Empirical mutual information (in nats) between two columns."""
    if x == y:
        raise InputError("mutual information requires two distinct variables")
    return _mi_from_joint(_pair_counts(d.records, x, y).astype(np.float64))


def _pairwise_mi_matrix(records: np.ndarray) -> np.ndarray:
    """MI for every variable pair at once, via one co-occurrence matmul."""
    n, n_vars = records.shape
    x = records.astype(np.float64)
    ones = x.sum(axis=0)
    n11 = x.T @ x
    n10 = ones[:, None] - n11
    n01 = ones[None, :] - n11
    n00 = n - n11 - n10 - n01
    mi = np.zeros((n_vars, n_vars))
    joint = np.empty((2, 2))
    for i in range(n_vars):
        for j in range(i + 1, n_vars):
            joint[0, 0] = n00[i, j]
            joint[0, 1] = n01[i, j]
            joint[1, 0] = n10[i, j]
            joint[1, 1] = n11[i, j]
            mi[i, j] = mi[j, i] = _mi_from_joint(joint)
    return mi


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def chow_liu(d: Dataset, root: int | None = None) -> Dag:
    """Maximum-likelihood tree: max-weight spanning tree on pairwise MI,
    oriented away from the root so every non-root node has exactly one parent.

    Among equal-weight candidate edges the pair with the smaller
    (min id, max id) wins, making the tree deterministic.
    """
    n_vars = d.n_variables
    if n_vars < 2:
        raise InputError("a tree needs at least two variables")
    if root is None:
        root = 0
    if not 0 <= root < n_vars:
        raise InputError(f"root {root} out of range")

    mi = _pairwise_mi_matrix(d.records)
    candidates = sorted(
        ((i, j) for i in range(n_vars) for j in range(i + 1, n_vars)),
        key=lambda e: (-mi[e[0], e[1]], e[0], e[1]),
    )
    uf = _UnionFind(n_vars)
    adjacency: list[list[int]] = [[] for _ in range(n_vars)]
    picked = 0
    for i, j in candidates:
        if uf.union(i, j):
            adjacency[i].append(j)
            adjacency[j].append(i)
            picked += 1
            if picked == n_vars - 1:
                break

    edges = set()
    visited = {root}
    frontier = [root]
    while frontier:
        u = frontier.pop()
        for w in sorted(adjacency[u]):
            if w not in visited:
                visited.add(w)
                edges.add((u, w))
                frontier.append(w)
    return Dag(n_vars, frozenset(edges))


def chi_square_statistic(d: Dataset, x: int, y: int) -> tuple[float, int]:
    """Pearson chi-square statistic and dof for the 2x2 table of two columns.

    A degenerate table (any zero marginal) yields statistic 0.
    """
    if x == y:
        raise InputError("chi-square test requires two distinct variables")
    observed = _pair_counts(d.records, x, y).astype(np.float64)
    row = observed.sum(axis=1)
    col = observed.sum(axis=0)
    n = observed.sum()
    if np.any(row == 0) or np.any(col == 0):
        return 0.0, 1
    expected = np.outer(row, col) / n
    stat = float(np.sum((observed - expected) ** 2 / expected))
    return stat, 1


def chi_square_critical_value(significance: float, dof: int = 1) -> float:
    """Upper-tail critical value of the chi-square distribution.

    Computed by inverting the regularized incomplete gamma function, so any
    significance level in (0, 1) works.
    """
    if not 0.0 < significance < 1.0:
        raise InputError("significance must lie strictly between 0 and 1")
    return float(2.0 * gammainccinv(dof / 2.0, significance))


def prune_edges(dag: Dag, d: Dataset, significance: float) -> Dag:
    """Drop edges whose endpoints look marginally independent.

    An edge survives only if its chi-square statistic reaches the critical
    value at the given significance level; removal cannot create a cycle,
    so the result is returned directly.
    """
    if dag.node_count != d.n_variables:
        raise InputError("graph node count does not match dataset variables")
    critical = chi_square_critical_value(significance)
    kept = set()
    for u, v in dag.edges:
        stat, _ = chi_square_statistic(d, u, v)
        if stat >= critical:
            kept.add((u, v))
    return Dag(dag.node_count, frozenset(kept))

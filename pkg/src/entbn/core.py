"""Core domain types: variables, datasets, DAGs, CPTs, and whole networks.

All types are immutable after construction; operations on them are pure and
safe to call concurrently from shared references.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InputError, StructuralError

# A (possibly partial) mapping from variable id to state in {0, 1}.
Assignment = dict[int, int]


class Role(enum.Enum):
    TITLE = "title"
    QUESTION = "question"


@dataclass(frozen=True)
class Variable:
    """A binary presence/absence variable for one entity class.

    `id` is the variable's position in the owning variable set; `name` is
    unique within that set (e.g. "T_APPLICATION", "Q_ERROR_NAME").
    """

    id: int
    name: str
    role: Role = Role.TITLE
    entity_class: str = ""
    cardinality: int = 2

    def __post_init__(self):
        if not self.name:
            raise InputError("variable name must be non-empty")
        if self.cardinality != 2:
            raise InputError(
                f"variable {self.name!r}: only binary variables are supported"
            )
        if not self.entity_class:
            object.__setattr__(self, "entity_class", self.name)


def _validate_variables(variables: tuple[Variable, ...]) -> None:
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise InputError("variable names must be unique")
    for pos, v in enumerate(variables):
        if v.id != pos:
            raise InputError(
                f"variable {v.name!r} has id {v.id} but position {pos}"
            )


@dataclass(frozen=True)
class Dataset:
    """N binary records over an ordered variable set.

    `records` is an (N, V) array of {0, 1} values, one column per variable.
    The array is stored read-only; rows with values outside {0, 1} or with
    the wrong width are rejected at construction.
    """

    variables: tuple[Variable, ...]
    records: np.ndarray

    def __post_init__(self):
        variables = tuple(self.variables)
        _validate_variables(variables)
        records = np.asarray(self.records, dtype=np.uint8)
        if records.ndim != 2 or records.shape[1] != len(variables):
            raise InputError(
                f"records must be (N, {len(variables)}), got shape {records.shape}"
            )
        if records.size and records.max(initial=0) > 1:
            raise InputError("record values must be 0 or 1")
        records = records.copy()
        records.flags.writeable = False
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "records", records)

    @property
    def n_rows(self) -> int:
        return self.records.shape[0]

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @cached_property
    def name_to_id(self) -> dict[str, int]:
        return {v.name: v.id for v in self.variables}

    def concat(self, other: Dataset) -> Dataset:
        if [v.name for v in self.variables] != [v.name for v in other.variables]:
            raise InputError("cannot concatenate datasets over different variables")
        return Dataset(self.variables, np.vstack([self.records, other.records]))

    def take_rows(self, indices) -> Dataset:
        return Dataset(self.variables, self.records[np.asarray(indices, dtype=int)])


def parent_state_indices(records: np.ndarray, parents: tuple[int, ...]) -> np.ndarray:
    """Row index of each record's parent configuration.

    Binary encoding with the first listed parent most significant, so the
    index ranges over [0, 2**len(parents)).
    """
    n = records.shape[0]
    if not parents:
        return np.zeros(n, dtype=np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for p in parents:
        idx = (idx << 1) | records[:, p].astype(np.int64)
    return idx


def assignment_config_index(a: Assignment, parents: tuple[int, ...]) -> int:
    """Parent-configuration row index for a single assignment."""
    idx = 0
    for p in parents:
        idx = (idx << 1) | a[p]
    return idx


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over `node_count` variable ids.

    Acyclicity is validated at construction, and every mutation helper
    (`with_edge`, `without_edge`, `with_reversed_edge`) returns a freshly
    validated graph, so a cyclic instance cannot be observed.
    """

    node_count: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if u == v:
                raise StructuralError(f"self-loop on node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise StructuralError(f"edge ({u}, {v}) references unknown node")
        object.__setattr__(self, "edges", edges)
        topological_order(self)  # raises StructuralError on a cycle

    @cached_property
    def parent_map(self) -> tuple[tuple[int, ...], ...]:
        parents: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            parents[v].append(u)
        return tuple(tuple(sorted(ps)) for ps in parents)

    @cached_property
    def child_map(self) -> tuple[tuple[int, ...], ...]:
        children: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            children[u].append(v)
        return tuple(tuple(sorted(cs)) for cs in children)

    def parents(self, v: int) -> tuple[int, ...]:
        return self.parent_map[v]

    def children(self, v: int) -> tuple[int, ...]:
        return self.child_map[v]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def with_edge(self, u: int, v: int) -> Dag:
        if (u, v) in self.edges:
            raise InputError(f"edge ({u}, {v}) already present")
        return Dag(self.node_count, self.edges | {(u, v)})

    def without_edge(self, u: int, v: int) -> Dag:
        if (u, v) not in self.edges:
            raise InputError(f"edge ({u}, {v}) not present")
        return Dag(self.node_count, self.edges - {(u, v)})

    def with_reversed_edge(self, u: int, v: int) -> Dag:
        if (u, v) not in self.edges:
            raise InputError(f"edge ({u}, {v}) not present")
        return Dag(self.node_count, (self.edges - {(u, v)}) | {(v, u)})


def topological_order(dag: Dag) -> list[int]:
    """Topological order of `dag`, ties broken by ascending node id."""
    indegree = [0] * dag.node_count
    children: list[list[int]] = [[] for _ in range(dag.node_count)]
    for u, v in dag.edges:
        indegree[v] += 1
        children[u].append(v)
    ready = [v for v in range(dag.node_count) if indegree[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in children[v]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != dag.node_count:
        raise StructuralError("graph contains a cycle")
    return order


_ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table P(X | parents) for one binary variable.

    Row j holds the distribution of X for the j-th parent configuration,
    where j is the binary encoding of the parent states in listed order
    (first parent most significant). Rows must sum to 1 within 1e-9.
    """

    variable: int
    parents: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        parents = tuple(int(p) for p in self.parents)
        table = np.asarray(self.table, dtype=np.float64)
        expected = (2 ** len(parents), 2)
        if table.shape != expected:
            raise InputError(
                f"CPT for variable {self.variable}: table shape {table.shape}, "
                f"expected {expected}"
            )
        if np.any(table < -0.0) or np.any(table > 1.0):
            raise InputError(
                f"CPT for variable {self.variable}: entries must lie in [0, 1]"
            )
        if np.any(np.abs(table.sum(axis=1) - 1.0) > _ROW_SUM_TOL):
            raise InputError(
                f"CPT for variable {self.variable}: rows must sum to 1"
            )
        table = table.copy()
        table.flags.writeable = False
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "table", table)

    def row(self, parent_states: Assignment) -> np.ndarray:
        return self.table[assignment_config_index(parent_states, self.parents)]


@dataclass(frozen=True)
class BayesianNetwork:
    """A structure plus one CPT per variable."""

    dag: Dag
    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]

    def __post_init__(self):
        variables = tuple(self.variables)
        cpts = tuple(self.cpts)
        _validate_variables(variables)
        if len(variables) != self.dag.node_count:
            raise InputError("variable count does not match graph node count")
        if len(cpts) != self.dag.node_count:
            raise InputError("expected exactly one CPT per variable")
        for i, cpt in enumerate(cpts):
            if cpt.variable != i:
                raise InputError(f"CPT at position {i} is for variable {cpt.variable}")
            if cpt.parents != self.dag.parents(i):
                raise InputError(
                    f"CPT for variable {i} lists parents {cpt.parents}, "
                    f"graph has {self.dag.parents(i)}"
                )
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "cpts", cpts)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @cached_property
    def name_to_id(self) -> dict[str, int]:
        return {v.name: v.id for v in self.variables}


def _check_variable_match(bn: BayesianNetwork, d: Dataset) -> None:
    if [v.name for v in bn.variables] != [v.name for v in d.variables]:
        raise InputError("dataset variables do not match network variables")


def joint_probability(bn: BayesianNetwork, a: Assignment) -> float:
    """Probability of a full assignment: the product of one CPT entry per variable."""
    prob = 1.0
    for cpt in bn.cpts:
        if cpt.variable not in a:
            raise InputError(f"assignment missing variable {cpt.variable}")
        state = a[cpt.variable]
        if state not in (0, 1):
            raise InputError(f"variable {cpt.variable}: state {state} out of range")
        prob *= cpt.table[assignment_config_index(a, cpt.parents), state]
    return float(prob)


def log_likelihood(bn: BayesianNetwork, d: Dataset) -> float:
    """Natural-log likelihood of the dataset under the network.

    Records that the model assigns probability zero contribute -inf.
    """
    _check_variable_match(bn, d)
    total = 0.0
    records = d.records
    with np.errstate(divide="ignore"):
        for cpt in bn.cpts:
            idx = parent_state_indices(records, cpt.parents)
            probs = cpt.table[idx, records[:, cpt.variable]]
            total += float(np.sum(np.log(probs)))
    return total


def forward_sample(bn: BayesianNetwork, n: int, seed: int) -> Dataset:
    """Draw `n` records by ancestral sampling in topological order.

    The same seed always yields the same dataset.
    """
    if n < 1:
        raise InputError("sample count must be at least 1")
    rng = np.random.default_rng(seed)
    records = _forward_sample_matrix(bn, n, rng)
    return Dataset(bn.variables, records)


def _forward_sample_matrix(
    bn: BayesianNetwork, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Sampling core shared with the Monte-Carlo inference routines."""
    records = np.zeros((n, bn.n_variables), dtype=np.uint8)
    for v in topological_order(bn.dag):
        cpt = bn.cpts[v]
        idx = parent_state_indices(records, cpt.parents)
        p_one = cpt.table[idx, 1]
        records[:, v] = rng.random(n) < p_one
    return records

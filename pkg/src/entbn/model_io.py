"""Model persistence: a self-describing JSON document.

The document stores variables (name, role, entity class), the edge set, and
every CPT row as decimal probability arrays. Probabilities are written with
the shortest representation that round-trips the exact binary value, so
save -> load -> save is byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import BayesianNetwork, Cpt, Dag, Role, Variable
from .errors import InputError

FORMAT_NAME = "entity-bayesian-network"
FORMAT_VERSION = 1


def model_document(bn: BayesianNetwork) -> dict:
    """Plain-data form of a network, field order fixed for determinism."""
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "variables": [
            {
                "name": v.name,
                "role": v.role.value,
                "entity_class": v.entity_class,
            }
            for v in bn.variables
        ],
        "edges": [list(e) for e in bn.dag.sorted_edges()],
        "cpts": [
            {
                "variable": cpt.variable,
                "parents": list(cpt.parents),
                "table": [[float(p) for p in row] for row in cpt.table],
            }
            for cpt in bn.cpts
        ],
    }


def model_to_json(bn: BayesianNetwork) -> str:
    return json.dumps(model_document(bn), indent=2) + "\n"


def save_model(bn: BayesianNetwork, path) -> None:
    Path(path).write_text(model_to_json(bn), encoding="utf-8")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InputError(f"model document: {message}")


def model_from_document(doc) -> BayesianNetwork:
    _require(isinstance(doc, dict), "top level must be an object")
    _require(doc.get("format") == FORMAT_NAME, f"format must be {FORMAT_NAME!r}")
    _require(doc.get("version") == FORMAT_VERSION, f"version must be {FORMAT_VERSION}")
    raw_vars = doc.get("variables")
    _require(isinstance(raw_vars, list) and raw_vars, "variables must be a non-empty list")
    variables = []
    for i, entry in enumerate(raw_vars):
        _require(isinstance(entry, dict), f"variable {i} must be an object")
        try:
            role = Role(entry.get("role"))
        except ValueError:
            raise InputError(
                f"model document: variable {i} has unknown role {entry.get('role')!r}"
            ) from None
        name = entry.get("name")
        _require(isinstance(name, str), f"variable {i} needs a string name")
        variables.append(Variable(i, name, role, entry.get("entity_class", "")))
    n = len(variables)
    raw_edges = doc.get("edges")
    _require(isinstance(raw_edges, list), "edges must be a list")
    edges = set()
    for e in raw_edges:
        _require(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e),
            f"edge {e!r} must be a pair of variable indices",
        )
        _require(0 <= e[0] < n and 0 <= e[1] < n, f"edge {e!r} out of range")
        edges.add((e[0], e[1]))
    dag = Dag(n, frozenset(edges))
    raw_cpts = doc.get("cpts")
    _require(isinstance(raw_cpts, list) and len(raw_cpts) == n, f"expected {n} cpts")
    cpts = []
    for i, entry in enumerate(raw_cpts):
        _require(isinstance(entry, dict), f"cpt {i} must be an object")
        _require(entry.get("variable") == i, f"cpt {i} must describe variable {i}")
        parents = entry.get("parents")
        _require(
            isinstance(parents, list) and all(isinstance(p, int) for p in parents),
            f"cpt {i} parents must be a list of indices",
        )
        table = entry.get("table")
        _require(isinstance(table, list), f"cpt {i} table must be a list of rows")
        cpts.append(Cpt(i, tuple(parents), table))
    return BayesianNetwork(dag, tuple(variables), tuple(cpts))


def model_from_json(text: str) -> BayesianNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model document is not valid JSON: {exc}") from None
    return model_from_document(doc)


def load_model(path) -> BayesianNetwork:
    return model_from_json(Path(path).read_text(encoding="utf-8"))

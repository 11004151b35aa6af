"""Deterministic DOT rendering of learned structures.

Nodes appear in id order and edges in ascending (parent, child) order, so
exporting the same graph twice yields byte-identical files.
"""

from __future__ import annotations

import re
from pathlib import Path

from .core import BayesianNetwork, Dag, Role, Variable

_BARE_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TITLE_ATTRS = "[shape=box, style=filled, fillcolor=lightsteelblue]"
_QUESTION_ATTRS = "[shape=ellipse, style=filled, fillcolor=lightgoldenrod]"


def _dot_id(name: str) -> str:
    return name if _BARE_ID.match(name) else '"' + name.replace('"', '\\"') + '"'


def dot_text(
    dag: Dag,
    variables: tuple[Variable, ...] | None = None,
    highlight_roles: bool = True,
) -> str:
    names = (
        [v.name for v in variables]
        if variables is not None
        else [f"X{i}" for i in range(dag.node_count)]
    )
    lines = ["digraph entity_network {", "  rankdir=LR;"]
    for i, name in enumerate(names):
        attrs = ""
        if highlight_roles and variables is not None:
            attrs = " " + (
                _TITLE_ATTRS if variables[i].role is Role.TITLE else _QUESTION_ATTRS
            )
        lines.append(f"  {_dot_id(name)}{attrs};")
    for u, v in dag.sorted_edges():
        lines.append(f"  {_dot_id(names[u])} -> {_dot_id(names[v])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, path, highlight_roles: bool = True) -> None:
    """Write a DOT file for a graph or a whole network."""
    if isinstance(obj, BayesianNetwork):
        text = dot_text(obj.dag, obj.variables, highlight_roles)
    else:
        text = dot_text(obj, None, highlight_roles)
    Path(path).write_text(text, encoding="utf-8")

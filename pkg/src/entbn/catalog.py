"""The canonical 25 entity classes and the 50-column variable layout."""

from __future__ import annotations

from .core import Role, Variable

ENTITY_CLASSES = (
    "ALGORITHM",
    "APPLICATION",
    "CLASS",
    "CODE_BLOCK",
    "DATA_STRUCTURE",
    "DATA_TYPE",
    "DEVICE",
    "ERROR_NAME",
    "FILE_NAME",
    "FILE_TYPE",
    "FUNCTION",
    "HTML_XML_TAG",
    "KEYBOARD_IP",
    "LANGUAGE",
    "LIBRARY",
    "LICENSE",
    "OPERATING_SYSTEM",
    "ORGANIZATION",
    "OUTPUT_BLOCK",
    "USER_INTERFACE_ELEMENT",
    "USER_NAME",
    "VALUE",
    "VARIABLE",
    "VERSION",
    "WEBSITE",
)

N_CLASSES = len(ENTITY_CLASSES)

TITLE_PREFIX = "T_"
QUESTION_PREFIX = "Q_"


def canonical_variables() -> tuple[Variable, ...]:
    """The 50 canonical variables: the title block followed by the question block."""
    variables = []
    for cls in ENTITY_CLASSES:
        variables.append(
            Variable(len(variables), TITLE_PREFIX + cls, Role.TITLE, cls)
        )
    for cls in ENTITY_CLASSES:
        variables.append(
            Variable(len(variables), QUESTION_PREFIX + cls, Role.QUESTION, cls)
        )
    return tuple(variables)


def canonical_column_names() -> list[str]:
    return [TITLE_PREFIX + c for c in ENTITY_CLASSES] + [
        QUESTION_PREFIX + c for c in ENTITY_CLASSES
    ]


def title_ids(variables) -> list[int]:
    return [v.id for v in variables if v.role is Role.TITLE]


def question_ids(variables) -> list[int]:
    return [v.id for v in variables if v.role is Role.QUESTION]

"""Parsing and exact normal ordering of expressions in ``e`` and ``e+``."""

from .expr import (
    AntiCommutator,
    Commutator,
    Generator,
    One,
    OpExpr,
    ParseError,
    Power,
    Product,
    ScalarMul,
    Sum,
    parse,
    to_text,
)
from .normal import (
    NormalForm,
    WordAction,
    evaluate_matrix,
    expand,
    normal_form_to_matrix,
    normal_order,
    verify_identity,
    word_action,
)

__all__ = [
    "AntiCommutator",
    "Commutator",
    "Generator",
    "One",
    "OpExpr",
    "ParseError",
    "Power",
    "Product",
    "ScalarMul",
    "Sum",
    "parse",
    "to_text",
    "NormalForm",
    "WordAction",
    "evaluate_matrix",
    "expand",
    "normal_form_to_matrix",
    "normal_order",
    "verify_identity",
    "word_action",
]

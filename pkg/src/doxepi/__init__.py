"""Constructive Kripke semantics for belief and knowledge from visibility/bias pairs."""

from .checker import extension, iff_condition_checks, law_suite, valid_in_model
from .formulas import parse, render
from .funcpair import (
    FunctionPair,
    InvalidPair,
    StateFunction,
    doxastic,
    epistemic,
    is_unbiased,
    validate_pair,
)
from .group import Community, GroupKind, group_relation
from .relalg import (
    PropertyReport,
    Relation,
    StateSpace,
    classify,
    closure,
    compose,
    converse,
    image,
    kernel,
    smallest_equivalence,
)
from .signature import Model, ModelError, dump_model, load_model, read_model
from .synthesis import SynthesisError, from_equivalence, from_kd45, roundtrip_check

__version__ = "0.1.0"

__all__ = [
    "Community", "FunctionPair", "GroupKind", "InvalidPair", "Model", "ModelError",
    "PropertyReport", "Relation", "StateFunction", "StateSpace", "SynthesisError",
    "classify", "closure", "compose", "converse", "doxastic", "dump_model", "epistemic",
    "extension", "from_equivalence", "from_kd45", "group_relation", "iff_condition_checks",
    "image", "is_unbiased", "kernel", "law_suite", "load_model", "parse", "read_model",
    "render", "roundtrip_check", "smallest_equivalence", "valid_in_model", "validate_pair",
]

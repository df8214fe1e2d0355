"""Polynomial Horn rewriting of markable description logic ontologies."""

from .backtranslate import (
    back_translate,
    classify_rule,
    normalize_ontology,
    psi_backtranslate,
    rewrite_bound,
    rewrite_ontology,
)
from .marking import (
    dependency_graph,
    enumerate_markings,
    find_marking,
    is_marking,
    minimize_marking,
)
from .ontology import (
    Dataset,
    Ontology,
    parse_dataset,
    parse_ontology,
    profile_of,
    serialize_ontology,
)
from .program import (
    Program,
    is_horn_program,
    parse_program,
    pi_translate,
    serialize_program,
    standard_translate,
)
from .proofcheck import validate_trace
from .reasoner import check_equisat, check_sat_disjunctive, ground_program, saturate_horn
from .successor import successor_translate, xi_translate
from .transpose import transpose

__all__ = [
    "Dataset",
    "Ontology",
    "Program",
    "back_translate",
    "check_equisat",
    "check_sat_disjunctive",
    "classify_rule",
    "dependency_graph",
    "enumerate_markings",
    "find_marking",
    "ground_program",
    "is_horn_program",
    "is_marking",
    "minimize_marking",
    "normalize_ontology",
    "parse_dataset",
    "parse_ontology",
    "parse_program",
    "pi_translate",
    "profile_of",
    "psi_backtranslate",
    "rewrite_bound",
    "rewrite_ontology",
    "saturate_horn",
    "serialize_ontology",
    "serialize_program",
    "standard_translate",
    "successor_translate",
    "transpose",
    "validate_trace",
    "xi_translate",
]

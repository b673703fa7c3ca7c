"""Jet prolongations of polynomial morphisms, exact point counts over
Z/p^kZ, F_p and F_p[t]/(t^e), and empirical FRS / E-smooth / jet-flatness
diagnostics."""

from ._core import (
    BudgetError,
    Constructible,
    Morphism,
    MotivicSummand,
    ParseError,
    Poly,
    Scheme,
    Table,
    ValidationError,
    affine_space,
    classify_nonneg,
    count_fiber,
    count_points,
    esmooth_diagnostic,
    estimate_components,
    estimate_dimension,
    eval_constructible,
    eval_motivic,
    frs_diagnostic,
    g_value,
    h_value,
    is_singular_point,
    jet_morphism,
    jet_prolong,
    jet_variables,
    jetflat_diagnostic,
    langweil_check,
    parse_constructible,
    parse_definition_file,
    parse_poly,
    scan_gh,
    singular_reduction_set,
    sup_over_domain,
    validate_morphism,
)

__all__ = [
    "BudgetError",
    "Constructible",
    "Morphism",
    "MotivicSummand",
    "ParseError",
    "Poly",
    "Scheme",
    "Table",
    "ValidationError",
    "affine_space",
    "classify_nonneg",
    "count_fiber",
    "count_points",
    "esmooth_diagnostic",
    "estimate_components",
    "estimate_dimension",
    "eval_constructible",
    "eval_motivic",
    "frs_diagnostic",
    "g_value",
    "h_value",
    "is_singular_point",
    "jet_morphism",
    "jet_prolong",
    "jet_variables",
    "jetflat_diagnostic",
    "langweil_check",
    "parse_constructible",
    "parse_definition_file",
    "parse_poly",
    "scan_gh",
    "singular_reduction_set",
    "sup_over_domain",
    "validate_morphism",
]

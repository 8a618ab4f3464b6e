"""Exact Serre-weight bookkeeping for tame characters of p-adic fields.

The package computes, over exact integer and rational arithmetic: the jump
filtration dimensions of the first cohomology of a tame character, the
window index sets and basis labels, the shift profile (t, s, I, xi) of a
weight, the distinguished label subset by two combinatorial routes, and an
independent re-derivation of that subset through residue pairings of
truncated Artin-Hasse series.
"""

from .cohomology import (
    JumpProfile,
    graded_dimension,
    h1_dimension,
    jump_profile,
    window_cardinality,
)
from .errors import (
    ChiMismatch,
    IntegralityViolation,
    InternalInvariantViolation,
    InvalidEM,
    InvalidInput,
    InvariantError,
    MinimalityAmbiguous,
    NoMatchingIndex,
    NonUnitConstantTerm,
    NoValidShift,
    RouteMismatch,
    SchemaError,
    SerreWeightsError,
    TruncationInsufficient,
)
from .io_cli import Problem, parse_problem, run_command
from .serre_basis import (
    BasisLabel,
    LVResult,
    basis_labels,
    i_m_index,
    j_v_ah,
    j_v_ah_bruteforce,
    l_v_ah,
    validate_e_m,
    w_prime,
)
from .series_oracle import (
    artin_hasse_mod_p,
    artin_hasse_rational,
    default_truncation,
    rederive_jvah,
    required_degree,
)
from .tame_chars import (
    CharacterData,
    FieldParams,
    TameSignature,
    UnramifiedPart,
    canonical_signature,
    char_quotient,
    character,
    cyclotomic_inertia_signature,
    exponent_class,
    is_unramified,
    n_values,
    niveau,
    signature_class,
    validate_character,
    validate_signature,
)
from .weight_lattice import (
    SerreWeight,
    WeightProfile,
    candidate_set,
    minimal_shift_set,
    reduced_exponents,
    shift_vector,
    ts_profile,
    twist_normalize,
    validate_weight,
    weight_from_r,
)

__version__ = "0.1.0"

__all__ = [
    "BasisLabel",
    "CharacterData",
    "ChiMismatch",
    "FieldParams",
    "IntegralityViolation",
    "InternalInvariantViolation",
    "InvalidEM",
    "InvalidInput",
    "InvariantError",
    "JumpProfile",
    "LVResult",
    "MinimalityAmbiguous",
    "NoMatchingIndex",
    "NonUnitConstantTerm",
    "NoValidShift",
    "Problem",
    "RouteMismatch",
    "SchemaError",
    "SerreWeight",
    "SerreWeightsError",
    "TameSignature",
    "TruncationInsufficient",
    "UnramifiedPart",
    "WeightProfile",
    "artin_hasse_mod_p",
    "artin_hasse_rational",
    "basis_labels",
    "candidate_set",
    "canonical_signature",
    "char_quotient",
    "character",
    "cyclotomic_inertia_signature",
    "default_truncation",
    "exponent_class",
    "graded_dimension",
    "h1_dimension",
    "i_m_index",
    "is_unramified",
    "j_v_ah",
    "j_v_ah_bruteforce",
    "jump_profile",
    "l_v_ah",
    "minimal_shift_set",
    "n_values",
    "niveau",
    "parse_problem",
    "rederive_jvah",
    "reduced_exponents",
    "required_degree",
    "run_command",
    "shift_vector",
    "signature_class",
    "ts_profile",
    "twist_normalize",
    "validate_character",
    "validate_e_m",
    "validate_signature",
    "validate_weight",
    "w_prime",
    "weight_from_r",
    "window_cardinality",
]

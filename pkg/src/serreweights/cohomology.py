"""Dimensions of the filtration jumps of first Galois cohomology.

For a tame character chi of a p-adic field with parameters (p, e, f), the
first cohomology of its one-dimensional mod-p coefficient module carries a
decreasing ramification filtration.  The graded piece at level s is nonzero
only at s = 0 (trivial character), at the top boundary s = 1 + ep/(p-1)
(cyclotomic character), and at the rational levels s = 1 + m/(p^f - 1) with
0 < m < ep(p^f - 1)/(p - 1), p not dividing m, and m congruent to one of
the twisted digit sums n_i modulo p^f - 1.  At such interior levels the
dimension equals the number of matching indices i, which is 0 or f/f'.

All level arithmetic is exact via ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

from .errors import InternalInvariantViolation, InvalidInput, InvariantError
from .tame_chars import (
    CharacterData,
    FieldParams,
    n_values,
    niveau,
    validate_character,
)

Level = Union[int, Fraction]


@dataclass(frozen=True)
class JumpProfile:
    """All filtration levels with nonzero graded dimension, sorted by level."""

    entries: Tuple[Tuple[Fraction, int], ...]
    total: int

    def __post_init__(self) -> None:
        levels = [s for s, _ in self.entries]
        if levels != sorted(levels):
            raise InvariantError("jump entries must be sorted by level")
        if any(d <= 0 for _, d in self.entries):
            raise InvariantError("jump entries must have positive dimension")
        if self.total != sum(d for _, d in self.entries):
            raise InvariantError("total must equal the sum of jump dimensions")


def h1_dimension(params: FieldParams, chi: CharacterData) -> int:
    """Total dimension: ef plus one for each of the two degenerate cases."""
    validate_character(params, chi)
    extra = int(chi.declared_trivial) + int(chi.declared_cyclotomic)
    return params.e * params.f + extra


def _interior_m_bound(params: FieldParams) -> int:
    """Exclusive upper bound ep(p^f - 1)/(p - 1) for interior jump numerators."""
    return params.e * params.p * params.repunit


def _matching_indices(params: FieldParams, chi: CharacterData, m: int) -> int:
    n = n_values(params, chi.signature)
    return sum(1 for ni in n if (m - ni) % params.tame_order == 0)


def graded_dimension(params: FieldParams, chi: CharacterData, s: Level) -> int:
    """Dimension of the graded piece at filtration level ``s``."""
    validate_character(params, chi)
    s = Fraction(s)
    if s < 0:
        raise InvalidInput(f"filtration level must be >= 0, got {s}")
    if s == 0:
        return int(chi.declared_trivial)
    top = 1 + Fraction(params.e * params.p, params.p - 1)
    if s == top:
        return int(chi.declared_cyclotomic)
    if not 1 < s < top:
        return 0
    m = (s - 1) * params.tame_order
    if m.denominator != 1 or m.numerator % params.p == 0:
        return 0
    return _matching_indices(params, chi, m.numerator)


def jump_profile(params: FieldParams, chi: CharacterData) -> JumpProfile:
    """Enumerate every jump and check the total against ``h1_dimension``."""
    validate_character(params, chi)
    entries = []
    if chi.declared_trivial:
        entries.append((Fraction(0), 1))
    for m in range(1, _interior_m_bound(params)):
        if m % params.p == 0:
            continue
        d = _matching_indices(params, chi, m)
        if d:
            entries.append((1 + Fraction(m, params.tame_order), d))
    if chi.declared_cyclotomic:
        entries.append((1 + Fraction(params.e * params.p, params.p - 1), 1))
    profile = JumpProfile(tuple(entries), sum(d for _, d in entries))
    expected = h1_dimension(params, chi)
    if profile.total != expected:
        raise InternalInvariantViolation(
            f"jump dimensions sum to {profile.total}, expected {expected}"
        )
    top = 1 + Fraction(params.e * params.p, params.p - 1)
    _, f_dprime = niveau(params, chi.signature)
    for s, d in profile.entries:
        if 0 < s < top and d != f_dprime:
            raise InternalInvariantViolation(
                f"interior jump at {s} has dimension {d}, expected {f_dprime}"
            )
    return profile


def window_cardinality(params: FieldParams, chi: CharacterData, j: int) -> int:
    """Count pairs (m, i) with jp/(p-1) < m/(p^f - 1) < (j+1)p/(p-1),
    p not dividing m, and m congruent to n_i; always equals f."""
    validate_character(params, chi)
    if not 0 <= j < params.e:
        raise InvalidInput(f"window index must lie in [0, e), got {j}")
    lo = j * params.p * params.repunit
    hi = (j + 1) * params.p * params.repunit
    return sum(
        _matching_indices(params, chi, m)
        for m in range(lo + 1, hi)
        if m % params.p
    )

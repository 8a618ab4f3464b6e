"""Weights, twist normalization, and the shift profile (t, s, I, xi).

A weight is a pair of integer tuples (eta, theta) indexed by the embeddings,
with theta and eta - theta entrywise in [0, p-1] and theta < p-1 somewhere.
Twisting reduces everything to theta = 0, where the relevant data is the
tuple r = eta + 1 with entries in [1, p].

Given r and the inertial exponents m of the second diagonal character, the
profile is found by shifting m along the vectors v_i (subtract 1 in slot i,
add p in slot i+1; these do not change the inertial class) by the unique
containment-least subset J for which the shifted tuple lands entrywise in
[0, e-1] union [r_i, r_i + e-1].  That shifted tuple is t, its reflection
s_i = r_i + e - 1 - t_i gives the companion exponents, and each index
carries an interval I_i of admissible depths together with the integer

    xi_i = (p^f - 1) s_i + sum_j (s_{i+1+j} - t_{i+1+j}) p^{f-1-j},

which is congruent to the twisted digit sum n_i of chi = chi1/chi2 whenever
the characters are consistent with the profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Tuple

from .errors import (
    ChiMismatch,
    InternalInvariantViolation,
    InvalidInput,
    InvariantError,
    MinimalityAmbiguous,
    NoValidShift,
)
from .tame_chars import (
    CharacterData,
    FieldParams,
    canonical_signature,
    char_quotient,
    character,
    exponent_class,
    n_values,
    signature_class,
    validate_character,
)

# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SerreWeight:
    """Highest-weight data (eta, theta) indexed by the f embeddings."""

    eta: Tuple[int, ...]
    theta: Tuple[int, ...]


def validate_weight(params: FieldParams, weight: SerreWeight) -> None:
    p, f = params.p, params.f
    if len(weight.eta) != f or len(weight.theta) != f:
        raise InvariantError(f"weight tuples must have length f = {f}")
    for eta_i, theta_i in zip(weight.eta, weight.theta):
        if not 0 <= theta_i <= p - 1:
            raise InvariantError(f"theta entries must lie in [0, p-1]: {weight.theta}")
        if not 0 <= eta_i - theta_i <= p - 1:
            raise InvariantError(
                f"eta - theta entries must lie in [0, p-1]: {weight.eta}"
            )
    if all(theta_i == p - 1 for theta_i in weight.theta):
        raise InvariantError("theta must be < p-1 in at least one slot")


def weight_from_r(params: FieldParams, r: Tuple[int, ...]) -> SerreWeight:
    """The normalized weight with eta = r - 1 and theta = 0."""
    _validate_r(params, r)
    return SerreWeight(tuple(ri - 1 for ri in r), (0,) * params.f)


def _validate_r(params: FieldParams, r: Tuple[int, ...]) -> None:
    if len(r) != params.f:
        raise InvalidInput(f"r must have length f = {params.f}")
    if any(not 1 <= ri <= params.p for ri in r):
        raise InvalidInput(f"r entries must lie in [1, p]: {r}")


def twist_normalize(
    params: FieldParams,
    weight: SerreWeight,
    chi1: CharacterData,
    chi2: CharacterData,
) -> Tuple[SerreWeight, CharacterData, CharacterData]:
    """Replace (V, chi1, chi2) by the theta = 0 twist with the same subspace.

    Both characters are multiplied by the inverse theta-twist; the quotient
    chi1/chi2 is unchanged.  Unramified parts are untouched because the
    twist is inertial.  A character's cyclotomic declaration survives only
    when the twist has trivial inertial class (then nothing moved).
    """
    validate_weight(params, weight)
    validate_character(params, chi1)
    validate_character(params, chi2)
    normalized = SerreWeight(
        tuple(eta_i - theta_i for eta_i, theta_i in zip(weight.eta, weight.theta)),
        (0,) * params.f,
    )
    validate_weight(params, normalized)
    twist_class = exponent_class(params, weight.theta)

    def twist(chi: CharacterData) -> CharacterData:
        cls = signature_class(params, chi.signature) - twist_class
        keep_cyc = chi.declared_cyclotomic and twist_class == 0
        return character(
            params,
            (cls,) + (0,) * (params.f - 1),
            unram=chi.unram,
            cyclotomic=True if keep_cyc else None,
        )

    return normalized, twist(chi1), twist(chi2)


# ---------------------------------------------------------------------------
# Reduced exponents and shift vectors
# ---------------------------------------------------------------------------


def reduced_exponents(params: FieldParams, chi2: CharacterData) -> Tuple[int, ...]:
    """Inertial exponents of chi2 reduced to [0, p-1]^f, not all p-1.

    This is the unique such tuple in the class of chi2's signature; it is
    the m-tuple that the shift machinery starts from.
    """
    validate_character(params, chi2)
    p, f = params.p, params.f
    rem = signature_class(params, chi2.signature)  # in [0, p^f - 2]
    m = [0] * f
    for j in range(f):
        rem, d = divmod(rem, p)
        m[(f - j) % f] = d
    return tuple(m)


def shift_vector(params: FieldParams, i: int) -> Tuple[int, ...]:
    """v_i: subtract 1 in slot i, add p in slot i+1 (indices mod f).

    Adding v_i does not change the inertial class of an exponent tuple.
    """
    f = params.f
    if not 0 <= i < f:
        raise InvalidInput(f"shift index must lie in [0, f), got {i}")
    v = [0] * f
    v[i] -= 1
    v[(i + 1) % f] += params.p
    return tuple(v)


def _allowed_entries(params: FieldParams, ri: int) -> FrozenSet[int]:
    e = params.e
    return frozenset(range(e)) | frozenset(range(ri, ri + e))


def candidate_set(
    params: FieldParams, weight_r: Tuple[int, ...], chi2_exps: Tuple[int, ...]
) -> Tuple[Tuple[int, ...], ...]:
    """All tuples entrywise in [0, e-1] union [r_i, r_i+e-1] in chi2's class."""
    _validate_r(params, weight_r)
    _validate_reduced(params, chi2_exps)
    target = exponent_class(params, chi2_exps)
    pools = [sorted(_allowed_entries(params, ri)) for ri in weight_r]
    return tuple(
        cand
        for cand in product(*pools)
        if exponent_class(params, cand) == target
    )


def _validate_reduced(params: FieldParams, exps: Tuple[int, ...]) -> None:
    if len(exps) != params.f:
        raise InvalidInput(f"exponent tuple must have length f = {params.f}")
    if any(not 0 <= c <= params.p - 1 for c in exps):
        raise InvalidInput(f"reduced exponents must lie in [0, p-1]: {exps}")
    if all(c == params.p - 1 for c in exps):
        raise InvalidInput("the all-(p-1) reduced tuple is excluded")


def minimal_shift_set(
    params: FieldParams, weight_r: Tuple[int, ...], chi2_exps: Tuple[int, ...]
) -> FrozenSet[int]:
    """The containment-least subset J with m + sum_{i in J} v_i admissible.

    Raises NoValidShift when no subset works and MinimalityAmbiguous when no
    single valid subset is contained in all others.
    """
    cands = set(candidate_set(params, weight_r, chi2_exps))
    f = params.f
    vectors = [shift_vector(params, i) for i in range(f)]
    valid = []
    for mask in range(1 << f):
        shifted = list(chi2_exps)
        for i in range(f):
            if mask >> i & 1:
                for j in range(f):
                    shifted[j] += vectors[i][j]
        if tuple(shifted) in cands:
            valid.append(frozenset(i for i in range(f) if mask >> i & 1))
    if not valid:
        raise NoValidShift(
            f"no shift subset reaches the admissible set for r={weight_r}"
        )
    least = min(valid, key=lambda J: (len(J), sorted(J)))
    if any(not least <= J for J in valid):
        raise MinimalityAmbiguous(
            f"valid shift subsets {sorted(map(sorted, valid))} have no least element"
        )
    return least


# ---------------------------------------------------------------------------
# The full profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightProfile:
    """Shift data attached to a normalized weight and character pair."""

    r: Tuple[int, ...]
    t: Tuple[int, ...]
    s: Tuple[int, ...]
    intervals: Tuple[Tuple[int, ...], ...]
    xi: Tuple[int, ...]
    j_min: FrozenSet[int]

    def interval_total(self) -> int:
        return sum(len(I) for I in self.intervals)


def ts_profile(
    params: FieldParams,
    weight_r: Tuple[int, ...],
    chi1: CharacterData,
    chi2: CharacterData,
) -> WeightProfile:
    """Compute (t, s, I, xi) for the normalized weight r and the given pair."""
    _validate_r(params, weight_r)
    p, e, f = params.p, params.e, params.f
    m = reduced_exponents(params, chi2)
    j_min = minimal_shift_set(params, weight_r, m)
    t = list(m)
    for i in j_min:
        v = shift_vector(params, i)
        t = [ti + vi for ti, vi in zip(t, v)]
    t = tuple(t)
    s = tuple(ri + e - 1 - ti for ri, ti in zip(weight_r, t))
    for i, (ri, ti, si) in enumerate(zip(weight_r, t, s)):
        allowed = _allowed_entries(params, ri)
        if ti not in allowed or si not in allowed:
            raise InternalInvariantViolation(
                f"t_{i}={ti}, s_{i}={si} escape [0,e-1] union [r,r+e-1] for r={ri}"
            )
    intervals = []
    for ri, ti, si in zip(weight_r, t, s):
        if ti >= ri:
            intervals.append(tuple(range(si)))
        else:
            intervals.append((ti,) + tuple(range(ri, si)))
    q1 = params.tame_order
    xi = tuple(
        q1 * s[i]
        + sum((s[(i + 1 + j) % f] - t[(i + 1 + j) % f]) * p ** (f - 1 - j) for j in range(f))
        for i in range(f)
    )
    chi = char_quotient(params, chi1, chi2)
    if canonical_signature(params, tuple(si - ti for si, ti in zip(s, t))) != chi.signature:
        raise ChiMismatch(
            "chi1/chi2 is not the character cut out by the shift profile"
        )
    n = n_values(params, chi.signature)
    for i in range(f):
        if (xi[i] - n[i]) % q1:
            raise InternalInvariantViolation(
                f"xi_{i} = {xi[i]} is not congruent to n_{i} = {n[i]} mod {q1}"
            )
    return WeightProfile(tuple(weight_r), t, s, tuple(intervals), xi, j_min)

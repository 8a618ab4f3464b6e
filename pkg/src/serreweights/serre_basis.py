"""Basis labels for H^1, the label subset J of a profile, and the subspace.

The cohomology group H^1(G_K, F_p-bar(chi)) has an explicit basis indexed by
W = W' x {0, ..., f''-1} together with an unramified class when chi is
trivial and a tres-ramifiee class when chi is cyclotomic.  Here W' is the
set of integers m in the union of the e open windows (j*pR, (j+1)*pR) with
p not dividing m and m congruent to one of the twisted digit sums n_i.

For a shift profile the distinguished label subset is computed two ways:

* constructively, one candidate per (i, d in I_i): strip the p-part of
  xi_i - d*(p^f - 1) and keep the quotient when it lands in a window;
* by brute force, literally searching for witnesses (i, d, j) of the two
  defining equations p^j m' = xi'_i - d*e_M and i_m + k f' = i - j mod f.

Both must agree, and their common cardinality must be sum_i |I_i|.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

from .errors import (
    InternalInvariantViolation,
    InvalidEM,
    InvalidInput,
    NoMatchingIndex,
)
from .tame_chars import (
    CharacterData,
    FieldParams,
    canonical_signature,
    char_quotient,
    is_unramified,
    n_values,
    niveau,
    validate_character,
)
from .weight_lattice import SerreWeight, WeightProfile, ts_profile, twist_normalize

# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

_ALPHA = "alpha"
_UNRAMIFIED = "unramified"
_TRES_RAMIFIEE = "tres_ramifiee"


@dataclass(frozen=True)
class BasisLabel:
    """One basis class: either alpha = (m, k), or one of two special lines."""

    kind: str
    m: Optional[int] = None
    k: Optional[int] = None

    @staticmethod
    def alpha(m: int, k: int) -> "BasisLabel":
        return BasisLabel(_ALPHA, m, k)

    @staticmethod
    def unramified() -> "BasisLabel":
        return BasisLabel(_UNRAMIFIED)

    @staticmethod
    def tres_ramifiee() -> "BasisLabel":
        return BasisLabel(_TRES_RAMIFIEE)

    @property
    def is_alpha(self) -> bool:
        return self.kind == _ALPHA

    def sort_key(self) -> Tuple[int, int, int]:
        if self.kind == _ALPHA:
            return (0, self.m, self.k)
        return (1 if self.kind == _UNRAMIFIED else 2, 0, 0)

    def __str__(self) -> str:
        if self.kind == _ALPHA:
            return f"alpha({self.m},{self.k})"
        return self.kind


# ---------------------------------------------------------------------------
# The index sets W' and W
# ---------------------------------------------------------------------------


def w_prime(params: FieldParams, chi: CharacterData) -> Tuple[int, ...]:
    """All window integers congruent to some n_i, ascending; |W'| = e*f'."""
    validate_character(params, chi)
    q1 = params.tame_order
    residues = {ni % q1 for ni in n_values(params, chi.signature)}
    top = params.e * params.p * params.repunit
    return tuple(
        m for m in range(1, top) if m % params.p and m % q1 in residues
    )


def basis_labels(params: FieldParams, chi: CharacterData) -> Tuple[BasisLabel, ...]:
    """The full ordered basis of H^1: alphas, then the special classes."""
    _, f_dprime = niveau(params, chi.signature)
    labels = [
        BasisLabel.alpha(m, k) for m in w_prime(params, chi) for k in range(f_dprime)
    ]
    labels.sort(key=BasisLabel.sort_key)
    if chi.declared_trivial:
        labels.append(BasisLabel.unramified())
    if chi.declared_cyclotomic:
        labels.append(BasisLabel.tres_ramifiee())
    return tuple(labels)


def i_m_index(params: FieldParams, chi: CharacterData, m: int) -> int:
    """The unique i in [0, f') with m congruent to n_i modulo p^f - 1."""
    q1 = params.tame_order
    n = n_values(params, chi.signature)
    f_prime, _ = niveau(params, chi.signature)
    matches = [i for i in range(f_prime) if (m - n[i]) % q1 == 0]
    if not matches:
        raise NoMatchingIndex(f"m = {m} matches no n_i of {chi.signature.a}")
    if len(matches) > 1:
        raise InternalInvariantViolation(
            f"n_0..n_{f_prime - 1} are not distinct mod {q1}"
        )
    return matches[0]


# ---------------------------------------------------------------------------
# The label subset of a profile
# ---------------------------------------------------------------------------


def validate_e_m(params: FieldParams, chi: CharacterData, e_m: int) -> None:
    """e_M must divide p^f - 1 with (p^f - 1)/e_M dividing every n_i."""
    q1 = params.tame_order
    if e_m < 1 or q1 % e_m:
        raise InvalidEM(f"e_M = {e_m} does not divide p^f - 1 = {q1}")
    cofactor = q1 // e_m
    for ni in n_values(params, chi.signature):
        if ni % cofactor:
            raise InvalidEM(
                f"(p^f - 1)/e_M = {cofactor} does not divide n_i = {ni}"
            )


def _check_profile_chi(
    params: FieldParams, profile: WeightProfile, chi: CharacterData
) -> None:
    diff = tuple(si - ti for si, ti in zip(profile.s, profile.t))
    if canonical_signature(params, diff) != chi.signature:
        raise InvalidInput("profile and character disagree on the quotient class")


def _p_valuation(p: int, x: int) -> int:
    j = 0
    while x % p == 0:
        x //= p
        j += 1
    return j


def j_v_ah(
    params: FieldParams,
    profile: WeightProfile,
    chi: CharacterData,
    e_m: Optional[int] = None,
) -> FrozenSet[BasisLabel]:
    """Constructive label subset: one candidate per (i, d in I_i).

    The defining equations scale exactly by e_M/(p^f - 1), so after the
    divisibility checks the computation proceeds at full scale; the answer
    is the same for every valid e_M.
    """
    if e_m is None:
        e_m = params.tame_order
    validate_e_m(params, chi, e_m)
    _check_profile_chi(params, profile, chi)
    p, f = params.p, params.f
    q1 = params.tame_order
    window_top = params.e * params.p * params.repunit
    f_prime, f_dprime = niveau(params, chi.signature)
    found: Dict[BasisLabel, Tuple[int, int]] = {}
    for i in range(f):
        for d in profile.intervals[i]:
            x = profile.xi[i] - d * q1
            if x <= 0:
                # x = 0 is the trivial-chi extra degree; it never labels.
                continue
            j = _p_valuation(p, x)
            a = x // p**j
            if not 0 < a < window_top:
                continue
            try:
                im = i_m_index(params, chi, a)
            except NoMatchingIndex:
                raise InternalInvariantViolation(
                    f"a = {a} passed the window test but matches no n_i"
                )
            delta = (i - j - im) % f
            if delta % f_prime:
                raise InternalInvariantViolation(
                    f"no k solves i_m + k f' = i - j mod f for (i,d) = ({i},{d})"
                )
            label = BasisLabel.alpha(a, (delta // f_prime) % f_dprime)
            if label in found:
                raise InternalInvariantViolation(
                    f"(i,d) pairs {found[label]} and {(i, d)} collide on {label}"
                )
            found[label] = (i, d)
    return frozenset(found)


def j_v_ah_bruteforce(
    params: FieldParams,
    profile: WeightProfile,
    chi: CharacterData,
    e_m: Optional[int] = None,
) -> FrozenSet[BasisLabel]:
    """Literal witness search over all of W and all (i, d, j) in range.

    p^j m' = xi'_i - d e_M forces p^j m' <= xi'_i with m' >= 1, so j never
    exceeds floor(log_p max(1, xi_i)); everything else is tried verbatim.
    """
    if e_m is None:
        e_m = params.tame_order
    validate_e_m(params, chi, e_m)
    _check_profile_chi(params, profile, chi)
    p, f = params.p, params.f
    q1 = params.tame_order
    scale = q1 // e_m
    f_prime, f_dprime = niveau(params, chi.signature)
    xi_scaled = tuple(xi * e_m // q1 for xi in profile.xi)
    j_bounds = []
    for xi in profile.xi:
        b = 0
        while p ** (b + 1) <= max(1, xi):
            b += 1
        j_bounds.append(b)
    labels = set()
    for m in w_prime(params, chi):
        m_scaled = m // scale
        im = i_m_index(params, chi, m)
        for k in range(f_dprime):
            if any(
                p**j * m_scaled == xi_scaled[i] - d * e_m
                and (im + k * f_prime - (i - j)) % f == 0
                for i in range(f)
                for d in profile.intervals[i]
                for j in range(j_bounds[i] + 1)
            ):
                labels.add(BasisLabel.alpha(m, k))
    return frozenset(labels)


# ---------------------------------------------------------------------------
# The distinguished subspace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LVResult:
    """Ordered label set for the distinguished subspace, with bookkeeping.

    When chi is trivial the spanning set contains one extra degree choice
    d_{i_0} = xi_{i_0}/(p^f - 1) at the index i_0 = 0; it contributes the
    unramified class rather than an alpha label and is recorded here for
    the oracle's benefit.
    """

    labels: Tuple[BasisLabel, ...]
    exceptional: bool
    dimension: int
    e_m: int
    extra_degree_index: Optional[int] = None
    extra_degree: Optional[int] = None


def l_v_ah(
    params: FieldParams,
    weight: SerreWeight,
    chi1: CharacterData,
    chi2: CharacterData,
    e_m: Optional[int] = None,
    chi_cyclotomic: Optional[bool] = None,
) -> LVResult:
    """Labels spanning the distinguished subspace for (weight, chi1, chi2).

    ``chi_cyclotomic`` declares whether chi1/chi2 is the cyclotomic
    character (its unramified part depends on data not carried here); it is
    validated against the quotient's inertial signature.  The exceptional
    case (cyclotomic quotient, chi2 unramified, every r_i = p) returns the
    whole basis; otherwise the labels come from the profile's subset, plus
    the unramified class when the quotient is trivial.
    """
    normalized, c1, c2 = twist_normalize(params, weight, chi1, chi2)
    r = tuple(eta_i + 1 for eta_i in normalized.eta)
    chi = char_quotient(params, c1, c2, declare_cyclotomic=chi_cyclotomic)
    if e_m is not None:
        validate_e_m(params, chi, e_m)
    e_m_used = params.tame_order if e_m is None else e_m
    exceptional = (
        chi.declared_cyclotomic
        and is_unramified(params, c2)
        and all(ri == params.p for ri in r)
    )
    if exceptional:
        labels = basis_labels(params, chi)
        return LVResult(labels, True, len(labels), e_m_used)
    profile = ts_profile(params, r, c1, c2)
    labels = sorted(j_v_ah(params, profile, chi, e_m_used), key=BasisLabel.sort_key)
    extra_index: Optional[int] = None
    extra_degree: Optional[int] = None
    if chi.declared_trivial:
        labels.append(BasisLabel.unramified())
        extra_index = 0
        extra_degree = profile.xi[0] // params.tame_order
    return LVResult(
        tuple(labels), False, len(labels), e_m_used, extra_index, extra_degree
    )

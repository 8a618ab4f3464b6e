"""Residue-pairing re-derivation of the label subset, over truncated series.

This module rebuilds the label subset of a profile by a route that shares
nothing with the digit combinatorics: units are built from the Artin-Hasse
exponential with coefficients in the tensor ring (residue field of the
auxiliary extension) tensor F_q, their logarithmic derivatives are computed
by honest series division, and a label is kept exactly when some spanning
class has nonzero residue-trace pairing against it.

The tensor ring is realized componentwise: an element is a tuple of F_q
values indexed by the embeddings of the auxiliary residue field, so ring
operations (including the p-th power that the series arithmetic performs)
are componentwise.  The Frobenius operator induced by the p-th power map of
the residue field is, in these coordinates, a pure index shift; the two
agree precisely on tuples coming from the residue field itself.  For that
reason a unit is never exponentiated from an arbitrary tuple: the tuple is
first decomposed over a basis of residue-field ("coherent") tuples by
linear algebra, one honest Artin-Hasse factor is built per basis vector,
and the unit's dlog is the scalar combination of the factors' dlogs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from ._gf import Element, FiniteField, field
from .errors import (
    IntegralityViolation,
    InternalInvariantViolation,
    InvalidInput,
    NonUnitConstantTerm,
    RouteMismatch,
    TruncationInsufficient,
)
from .serre_basis import (
    BasisLabel,
    _check_profile_chi,
    i_m_index,
    validate_e_m,
    w_prime,
)
from .tame_chars import CharacterData, FieldParams, niveau
from .weight_lattice import WeightProfile

# The finite coefficient field doubles as the oracle configuration: it
# carries p, the extension degree r, and the pinned modulus.
FqConfig = FiniteField

# ---------------------------------------------------------------------------
# Artin-Hasse coefficients
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def artin_hasse_rational(p: int, trunc: int) -> Tuple[Fraction, ...]:
    """Exact coefficients c_0..c_D of exp(sum_n x^{p^n}/p^n).

    Solved from E' = S'E where S is the inner sum: S' has coefficient 1 at
    every degree p^n - 1 and 0 elsewhere, so (k+1) c_{k+1} is the sum of
    c_{k+1-p^n} over p^n <= k+1.  Every denominator must be prime to p.
    """
    if trunc < 0:
        raise InvalidInput(f"truncation degree must be >= 0, got {trunc}")
    jumps = []
    power = 1
    while power <= trunc:
        jumps.append(power)
        power *= p
    coeffs: List[Fraction] = [Fraction(1)]
    for k in range(1, trunc + 1):
        total = sum((coeffs[k - j] for j in jumps if j <= k), Fraction(0))
        coeffs.append(total / k)
    for k, c in enumerate(coeffs):
        if c.denominator % p == 0:
            raise IntegralityViolation(
                f"coefficient {k} has denominator {c.denominator} divisible by {p}"
            )
    return tuple(coeffs)


def _moebius(n: int) -> int:
    mu = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            mu = -mu
        d += 1
    if n > 1:
        mu = -mu
    return mu


def _padic_binomial_mod_p(p: int, exponent: int, k: int, precision: int) -> int:
    """binomial(e, k) mod p for a p-adic integer e given mod p^precision."""
    if k == 0:
        return 1
    numerator = 1
    modulus = p**precision
    for i in range(k):
        numerator = numerator * (exponent - i) % modulus
    v = 0
    unit = 1
    for i in range(1, k + 1):
        m = i
        while m % p == 0:
            m //= p
            v += 1
        unit = unit * m % modulus
    if numerator % p**v:
        raise IntegralityViolation(f"binomial({exponent}, {k}) is not p-integral")
    return (numerator // p**v) * pow(unit, -1, p) % p


def _artin_hasse_moebius(p: int, trunc: int) -> Tuple[int, ...]:
    """Mod-p coefficients via prod_{(n,p)=1} (1 - x^n)^{-mu(n)/n}."""
    precision = trunc + 2  # covers v_p(k!) + 1 for every k <= trunc
    modulus = p**precision
    result = [0] * (trunc + 1)
    result[0] = 1
    for n in range(1, trunc + 1):
        if n % p == 0:
            continue
        mu = _moebius(n)
        if mu == 0:
            continue
        exponent = -mu * pow(n, -1, modulus) % modulus
        factor = [0] * (trunc + 1)
        for k in range(trunc // n + 1):
            c = _padic_binomial_mod_p(p, exponent, k, precision)
            factor[n * k] = c * (-1) ** k % p
        merged = [0] * (trunc + 1)
        for i, a in enumerate(result):
            if a:
                for j in range(0, trunc + 1 - i, n):
                    if factor[j]:
                        merged[i + j] = (merged[i + j] + a * factor[j]) % p
        result = merged
    return tuple(result)


@lru_cache(maxsize=None)
def artin_hasse_mod_p(p: int, trunc: int) -> Tuple[int, ...]:
    """Mod-p Artin-Hasse coefficients, computed twice and cross-checked."""
    rational = artin_hasse_rational(p, trunc)
    reduced = tuple(
        c.numerator % p * pow(c.denominator, -1, p) % p for c in rational
    )
    moebius = _artin_hasse_moebius(p, trunc)
    if reduced != moebius:
        raise RouteMismatch(
            f"exponential and Moebius-product routes disagree at p={p}, D={trunc}"
        )
    return reduced


def _ah_prefix(p: int, trunc: int) -> Tuple[int, ...]:
    """Mod-p coefficients 0..trunc, served from power-of-two cache buckets."""
    bucket = max(64, 1 << trunc.bit_length())
    return artin_hasse_mod_p(p, bucket)[: trunc + 1]


# ---------------------------------------------------------------------------
# The tensor ring and its series
# ---------------------------------------------------------------------------

TensorScalar = Tuple[Element, ...]


class TensorAlgebra:
    """Componentwise F_q^n with the index-shift Frobenius and the sum trace."""

    def __init__(self, fq: FiniteField, n: int):
        if n < 1:
            raise InvalidInput(f"component count must be >= 1, got {n}")
        self.fq = fq
        self.n = n
        self.zero: TensorScalar = (fq.zero,) * n
        self.one: TensorScalar = (fq.one,) * n

    def scalar(self, c: Element) -> TensorScalar:
        return (c,) * self.n

    def add(self, a: TensorScalar, b: TensorScalar) -> TensorScalar:
        return tuple(self.fq.add(x, y) for x, y in zip(a, b))

    def sub(self, a: TensorScalar, b: TensorScalar) -> TensorScalar:
        return tuple(self.fq.sub(x, y) for x, y in zip(a, b))

    def neg(self, a: TensorScalar) -> TensorScalar:
        return tuple(self.fq.neg(x) for x in a)

    def mul(self, a: TensorScalar, b: TensorScalar) -> TensorScalar:
        return tuple(self.fq.mul(x, y) for x, y in zip(a, b))

    def scale(self, c: Element, a: TensorScalar) -> TensorScalar:
        return tuple(self.fq.mul(c, x) for x in a)

    def is_zero(self, a: TensorScalar) -> bool:
        return all(x == self.fq.zero for x in a)

    def invert(self, a: TensorScalar) -> TensorScalar:
        if any(x == self.fq.zero for x in a):
            raise NonUnitConstantTerm("tensor scalar has a zero component")
        return tuple(self.fq.inv(x) for x in a)

    def frobenius(self, a: TensorScalar, times: int = 1) -> TensorScalar:
        """The operator induced by the residue-field p-th power: index shift."""
        shift = times % self.n
        return a[-shift:] + a[:-shift] if shift else a

    def trace(self, a: TensorScalar) -> Element:
        total = self.fq.zero
        for x in a:
            total = self.fq.add(total, x)
        return total


@dataclass
class LaurentElement:
    """Finitely many known coefficients; degrees above ``trunc`` are unknown.

    ``trunc`` = None means the element is exact (a Laurent polynomial).
    Stored coefficients are nonzero; absent degrees at or below the
    truncation bound are genuinely zero.
    """

    coeffs: Dict[int, TensorScalar] = dataclass_field(default_factory=dict)
    trunc: Optional[int] = None


def monomial(alg: TensorAlgebra, degree: int, coeff: TensorScalar) -> LaurentElement:
    if alg.is_zero(coeff):
        return LaurentElement({}, None)
    return LaurentElement({degree: coeff}, None)


def _min_degree(series: LaurentElement) -> int:
    return min(series.coeffs) if series.coeffs else 0


def _known_up_to(a: LaurentElement, b: LaurentElement) -> Optional[int]:
    bounds = []
    if a.trunc is not None:
        bounds.append(a.trunc + _min_degree(b))
    if b.trunc is not None:
        bounds.append(b.trunc + _min_degree(a))
    return min(bounds) if bounds else None


def series_add(alg: TensorAlgebra, a: LaurentElement, b: LaurentElement) -> LaurentElement:
    trunc = None
    for t in (a.trunc, b.trunc):
        if t is not None:
            trunc = t if trunc is None else min(trunc, t)
    out: Dict[int, TensorScalar] = {}
    for d in set(a.coeffs) | set(b.coeffs):
        if trunc is not None and d > trunc:
            continue
        c = alg.add(a.coeffs.get(d, alg.zero), b.coeffs.get(d, alg.zero))
        if not alg.is_zero(c):
            out[d] = c
    return LaurentElement(out, trunc)


def series_scale(alg: TensorAlgebra, c: TensorScalar, a: LaurentElement) -> LaurentElement:
    out = {}
    for d, x in a.coeffs.items():
        y = alg.mul(c, x)
        if not alg.is_zero(y):
            out[d] = y
    return LaurentElement(out, a.trunc)


def series_mul(alg: TensorAlgebra, a: LaurentElement, b: LaurentElement) -> LaurentElement:
    trunc = _known_up_to(a, b)
    out: Dict[int, TensorScalar] = {}
    for da, ca in a.coeffs.items():
        for db, cb in b.coeffs.items():
            d = da + db
            if trunc is not None and d > trunc:
                continue
            c = alg.mul(ca, cb)
            prev = out.get(d)
            c = alg.add(prev, c) if prev is not None else c
            if alg.is_zero(c):
                out.pop(d, None)
            else:
                out[d] = c
    return LaurentElement(out, trunc)


def dlog_truncated(
    alg: TensorAlgebra, series: LaurentElement, trunc: Optional[int] = None
) -> LaurentElement:
    """u (d series/du) / series, coefficients known up to the truncation.

    The input must be a power series (no negative degrees) with invertible
    constant term; the quotient is computed by plain series division.
    """
    bound = series.trunc if series.trunc is not None else trunc
    if bound is None:
        raise InvalidInput("dlog of an exact series needs an explicit truncation")
    if any(d < 0 for d in series.coeffs):
        raise InvalidInput("dlog is only taken of power series units")
    constant = series.coeffs.get(0, alg.zero)
    inverse = alg.invert(constant)  # raises NonUnitConstantTerm
    p = alg.fq.p
    denom = [series.coeffs.get(d, alg.zero) for d in range(bound + 1)]
    support = [k for k in range(1, bound + 1) if not alg.is_zero(denom[k])]
    numer = [
        alg.scale(alg.fq.scalar(d % p), series.coeffs.get(d, alg.zero))
        for d in range(bound + 1)
    ]
    quotient: List[TensorScalar] = []
    zero = alg.zero
    for d in range(bound + 1):
        acc = numer[d]
        for k in support:
            if k > d:
                break
            q = quotient[d - k]
            if q != zero:
                acc = alg.sub(acc, alg.mul(denom[k], q))
        quotient.append(alg.mul(inverse, acc))
    out = {d: c for d, c in enumerate(quotient) if not alg.is_zero(c)}
    return LaurentElement(out, bound)


# ---------------------------------------------------------------------------
# Units built from the Artin-Hasse series
# ---------------------------------------------------------------------------


def epsilon_series(
    alg: TensorAlgebra, lam: TensorScalar, m_prime: int, trunc: int
) -> LaurentElement:
    """The honest series sum_k c_k lam^k u^{k m'} (componentwise powers).

    This is a legitimate unit of the series ring for any tuple, but it only
    represents the Artin-Hasse image of a residue-field element when lam is
    coherent; incoherent tuples must go through ``epsilon_unit``.
    """
    if m_prime < 1:
        raise InvalidInput(f"the u-exponent must be >= 1, got {m_prime}")
    ah = _ah_prefix(alg.fq.p, trunc // m_prime)
    out: Dict[int, TensorScalar] = {}
    power = alg.one
    for k, ck in enumerate(ah):
        if k:
            power = alg.mul(power, lam)
        if ck:
            c = alg.scale(alg.fq.scalar(ck), power)
            if not alg.is_zero(c):
                out[k * m_prime] = c
    return LaurentElement(out, trunc)


@lru_cache(maxsize=None)
def _coherent_data(
    p: int, r: int, n: int
) -> Tuple[Tuple[TensorScalar, ...], Tuple[Tuple[Element, ...], ...]]:
    """Basis tuples of the embedded degree-n residue field, and the inverse
    of their component matrix (for decomposing arbitrary tuples)."""
    fq = field(p, r)
    gen = fq.subfield_generator(n)
    basis = []
    g_power = fq.one
    for _ in range(n):
        basis.append(tuple(fq.frobenius(g_power, (n - i) % n) for i in range(n)))
        g_power = fq.mul(g_power, gen)
    matrix = [[basis[t][i] for t in range(n)] for i in range(n)]
    inverse = _matrix_inverse(fq, matrix)
    return tuple(basis), inverse


def _matrix_inverse(fq: FiniteField, matrix) -> Tuple[Tuple[Element, ...], ...]:
    n = len(matrix)
    work = [list(row) + [fq.one if i == j else fq.zero for j in range(n)]
            for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next(
            (row for row in range(col, n) if work[row][col] != fq.zero), None
        )
        if pivot is None:
            raise InternalInvariantViolation("coherent basis matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv = fq.inv(work[col][col])
        work[col] = [fq.mul(inv, x) for x in work[col]]
        for row in range(n):
            if row != col and work[row][col] != fq.zero:
                factor = work[row][col]
                work[row] = [
                    fq.sub(x, fq.mul(factor, y))
                    for x, y in zip(work[row], work[col])
                ]
    return tuple(tuple(row[n:]) for row in work)


def decompose_coherent(alg: TensorAlgebra, lam: TensorScalar) -> Tuple[Element, ...]:
    """Coefficients of lam over the coherent basis, by the cached inverse."""
    _, inverse = _coherent_data(alg.fq.p, alg.fq.r, alg.n)
    fq = alg.fq
    out = []
    for t in range(alg.n):
        total = fq.zero
        for i in range(alg.n):
            total = fq.add(total, fq.mul(inverse[t][i], lam[i]))
        out.append(total)
    return tuple(out)


_DLOG_BASIS_CACHE: Dict[Tuple[int, int, int, int], Tuple[int, Tuple[LaurentElement, ...]]] = {}


def _dlog_basis(alg: TensorAlgebra, m_prime: int, trunc: int) -> Tuple[LaurentElement, ...]:
    """dlog of the Artin-Hasse factor of each coherent basis tuple.

    Computed in the compressed variable v = u^{m'} (the factor is supported
    on multiples of m'), then re-expanded; cached per (field, n, m') and
    grown when a larger truncation is requested.
    """
    key = (alg.fq.p, alg.fq.r, alg.n, m_prime)
    cached = _DLOG_BASIS_CACHE.get(key)
    if cached is not None and cached[0] >= trunc:
        return cached[1]
    basis, _ = _coherent_data(alg.fq.p, alg.fq.r, alg.n)
    v_trunc = trunc // m_prime
    scale = alg.fq.scalar(m_prime % alg.fq.p)
    u_trunc = (v_trunc + 1) * m_prime - 1
    dlogs = []
    for tuple_t in basis:
        compressed = epsilon_series(alg, tuple_t, 1, v_trunc)
        g = dlog_truncated(alg, compressed)
        expanded = {
            d * m_prime: alg.scale(scale, c) for d, c in g.coeffs.items()
        }
        dlogs.append(LaurentElement(expanded, u_trunc))
    result = tuple(dlogs)
    _DLOG_BASIS_CACHE[key] = (trunc, result)
    return result


@dataclass
class ArtinHasseUnit:
    """A unit given as a coherent-factor product; only its dlog is material."""

    lam: TensorScalar
    m_prime: int
    dlog: LaurentElement


def epsilon_unit(
    alg: TensorAlgebra, lam: TensorScalar, m_prime: int, trunc: int
) -> ArtinHasseUnit:
    """The Artin-Hasse unit of an arbitrary tuple at exponent m'.

    The tuple is decomposed over the coherent basis; each basis vector
    contributes one honestly dlog-ed factor, combined linearly by the
    exterior scalars of the decomposition.
    """
    if m_prime < 1:
        raise InvalidInput(f"the u-exponent must be >= 1, got {m_prime}")
    betas = decompose_coherent(alg, lam)
    parts = _dlog_basis(alg, m_prime, trunc)
    u_trunc = (trunc // m_prime + 1) * m_prime - 1
    total = LaurentElement({}, u_trunc)
    for beta, part in zip(betas, parts):
        if beta == alg.fq.zero:
            continue
        total = series_add(alg, total, series_scale(alg, alg.scalar(beta), part))
    return ArtinHasseUnit(lam, m_prime, total)


# ---------------------------------------------------------------------------
# Eigenvector tuples and the pairing
# ---------------------------------------------------------------------------


def lambda_tuple(
    alg: TensorAlgebra, f_count: int, t: int, a_val: Element, inverse: bool = False
) -> TensorScalar:
    """The eigenvector tuple supported on embeddings over residue index t.

    Component t + c*f carries a^{-c} (a^{+c} for the inverse variant); the
    index-shift Frobenius to the f-th power then scales it by a (by a^{-1}).
    """
    if alg.n % f_count:
        raise InvalidInput("component count must be a multiple of f")
    if not 0 <= t < f_count:
        raise InvalidInput(f"residue index {t} out of [0, {f_count})")
    fq = alg.fq
    components = [fq.zero] * alg.n
    value = fq.one
    step = fq.pow(a_val, 1 if inverse else -1)
    for c in range(alg.n // f_count):
        components[t + c * f_count] = value
        value = fq.mul(value, step)
    return tuple(components)


@dataclass(frozen=True)
class Uniformizer:
    """Marker for the distinguished element u, whose dlog is exactly 1."""


UNIFORMIZER = Uniformizer()


def residue_trace_pairing(
    alg: TensorAlgebra,
    a: LaurentElement,
    b: Union[LaurentElement, ArtinHasseUnit, Uniformizer],
) -> Element:
    """Tr of the u^{-1} coefficient of a db/b, as an F_q element.

    Every stored coefficient of one factor needs the matching coefficient
    of the other to be known; otherwise the residue is not determined at
    the available truncation.
    """
    if isinstance(b, Uniformizer):
        g = LaurentElement({0: alg.one}, None)
    elif isinstance(b, ArtinHasseUnit):
        g = b.dlog
    else:
        g = dlog_truncated(alg, b)
    for d in a.coeffs:
        if g.trunc is not None and -d > g.trunc:
            raise TruncationInsufficient(
                f"dlog needed at degree {-d}, known only up to {g.trunc}"
            )
    for d in g.coeffs:
        if a.trunc is not None and -d > a.trunc:
            raise TruncationInsufficient(
                f"left factor needed at degree {-d}, known only up to {a.trunc}"
            )
    total = alg.zero
    for d, c in a.coeffs.items():
        other = g.coeffs.get(-d)
        if other is not None:
            total = alg.add(total, alg.mul(c, other))
    return alg.trace(total)


# ---------------------------------------------------------------------------
# The full re-derivation
# ---------------------------------------------------------------------------


def mu_order(params: FieldParams, chi: CharacterData) -> int:
    """Multiplicative order of the unramified part's value on Frobenius."""
    modulus = params.p**chi.unram.order_field_degree - 1
    d = chi.unram.dlog % modulus if modulus > 1 else 0
    return modulus // gcd(modulus, d) if d else 1


def required_degree(params: FieldParams, chi: CharacterData) -> int:
    """Least coefficient-field degree: the eigenvector components and the
    unramified value must both embed."""
    return lcm(params.f * mu_order(params, chi), chi.unram.order_field_degree)


def default_truncation(params: FieldParams, profile: WeightProfile, e_m: int) -> int:
    q1 = params.tame_order
    xi_top = max(xi * e_m // q1 for xi in profile.xi)
    m_top = -(-params.e * params.p * e_m // (params.p - 1))
    return 2 * max(xi_top, m_top, 1)


def rederive_jvah(
    params: FieldParams,
    profile: WeightProfile,
    chi: CharacterData,
    e_m: Optional[int] = None,
    fq_degree: Optional[int] = None,
    trunc: Optional[int] = None,
) -> FrozenSet[BasisLabel]:
    """Label subset by explicit residue pairings; must match j_v_ah.

    For each basis label a unit is built at exponent m'; for each (i, d) a
    spanning monomial at degree d e_M - xi'_i; the label survives iff some
    pairing is nonzero.  Everything happens in honest truncated series over
    the componentwise tensor ring.
    """
    if e_m is None:
        e_m = params.tame_order
    validate_e_m(params, chi, e_m)
    _check_profile_chi(params, profile, chi)
    p, f = params.p, params.f
    q1 = params.tame_order
    scale = q1 // e_m
    order = mu_order(params, chi)
    degree_needed = required_degree(params, chi)
    if fq_degree is None:
        fq_degree = degree_needed
    elif fq_degree % degree_needed:
        raise InvalidInput(
            f"coefficient field degree {fq_degree} is not a multiple of {degree_needed}"
        )
    fq = field(p, fq_degree)
    r_mu = chi.unram.order_field_degree
    a_val = fq.pow(fq.gen, (fq.order - 1) // (p**r_mu - 1) * chi.unram.dlog)
    if fq.element_order(a_val) != order:
        raise InternalInvariantViolation("embedded unramified value has wrong order")
    n_components = f * order
    alg = TensorAlgebra(fq, n_components)
    if trunc is None:
        trunc = default_truncation(params, profile, e_m)
    xi_scaled = tuple(xi * e_m // q1 for xi in profile.xi)
    f_prime, f_dprime = niveau(params, chi.signature)
    spanning = []
    for i in range(f):
        lam_inv = lambda_tuple(alg, f, i, a_val, inverse=True)
        for d in profile.intervals[i]:
            spanning.append(monomial(alg, d * e_m - xi_scaled[i], lam_inv))
    if chi.declared_trivial:
        if xi_scaled[0] % e_m:
            raise InternalInvariantViolation(
                "trivial quotient but xi'_0 is not a multiple of e_M"
            )
        spanning.append(monomial(alg, 0, lambda_tuple(alg, f, 0, a_val, inverse=True)))
    labels = set()
    for m in w_prime(params, chi):
        m_prime = m // scale
        im = i_m_index(params, chi, m)
        for k in range(f_dprime):
            t_alpha = (im + k * f_prime) % f
            unit = epsilon_unit(
                alg, lambda_tuple(alg, f, t_alpha, a_val), m_prime, trunc
            )
            if any(
                residue_trace_pairing(alg, a, unit) != fq.zero for a in spanning
            ):
                labels.add(BasisLabel.alpha(m, k))
    return frozenset(labels)

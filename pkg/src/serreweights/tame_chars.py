"""Tame characters of a local Galois group in terms of digit signatures.

Setting: a p-adic base field with residue degree f and ramification index e.
Embeddings of the residue field into an algebraic closure are labelled so
that the (i+1)-st embedding raised to the p-th power is the i-th; the
fundamental tame characters follow the same labelling.  A character's
restriction to inertia is then a product of fundamental characters, and the
exponent tuple is only well defined modulo the relation that shifting one
exponent down by p trades against the next one up by 1.

The canonical representative used everywhere here is the "digit signature":
the unique exponent tuple with every entry in [1, p], excluding the all-p
tuple.  Equivalently, the class n modulo p^f - 1 is represented in the
half-open window [R, p*R) with R = (p^f - 1)/(p - 1), and the base-p digits
of that representative (with digit set [1, p]) are read off into the tuple.

Unramified parts are recorded as a discrete log with respect to a fixed
generator convention: the multiplicative group of the field with p^r
elements is generated by the residue class of the variable modulo the
lexicographically least primitive polynomial of degree r (see the finite
field module).  Characters of different unramified degrees are compared by
scaling discrete logs to a common degree, mapping the degree-r generator to
the power (p^L - 1)/(p^r - 1) of the degree-L generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Optional, Tuple

from .errors import InvalidInput, InvariantError

# ---------------------------------------------------------------------------
# Field parameters
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldParams:
    """Residue characteristic p, ramification index e, residue degree f."""

    p: int
    e: int
    f: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise InvalidInput(f"p = {self.p} is not prime")
        if self.e < 1 or self.f < 1:
            raise InvalidInput(f"need e >= 1 and f >= 1, got e={self.e}, f={self.f}")

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def tame_order(self) -> int:
        """Order of the tame inertia quotient acting on the residue field."""
        return self.p**self.f - 1

    @property
    def repunit(self) -> int:
        """(p^f - 1)/(p - 1): the all-ones digit value, lower window edge."""
        return (self.p**self.f - 1) // (self.p - 1)


# ---------------------------------------------------------------------------
# Digit signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TameSignature:
    """Canonical inertial exponent tuple: every entry in [1, p], not all p."""

    a: Tuple[int, ...]

    def rotate(self, steps: int = 1) -> "TameSignature":
        """Frobenius action: (a_0, ..., a_{f-1}) -> (a_1, ..., a_{f-1}, a_0)."""
        f = len(self.a)
        steps %= f
        return TameSignature(self.a[steps:] + self.a[:steps])


def validate_signature(params: FieldParams, sig: TameSignature) -> None:
    a = sig.a
    if len(a) != params.f:
        raise InvariantError(f"signature length {len(a)} != f = {params.f}")
    if any(not (1 <= ai <= params.p) for ai in a):
        raise InvariantError(f"signature entries must lie in [1, p]: {a}")
    if all(ai == params.p for ai in a):
        raise InvariantError("the all-p signature is excluded")


def exponent_class(params: FieldParams, exps: Tuple[int, ...]) -> int:
    """Class modulo p^f - 1 of the character with the given exponent tuple.

    The i-th fundamental character equals the 0-th raised to p^((f-i) mod f),
    so the tuple (c_0, ..., c_{f-1}) contributes sum_i c_i * p^((f-i) mod f).
    """
    p, f = params.p, params.f
    if len(exps) != f:
        raise InvalidInput(f"exponent tuple length {len(exps)} != f = {f}")
    total = sum(c * pow(p, (f - i) % f, params.tame_order) for i, c in enumerate(exps))
    return total % params.tame_order


def signature_class(params: FieldParams, sig: TameSignature) -> int:
    """Class modulo p^f - 1 of a digit signature (its 0-th twisted sum)."""
    validate_signature(params, sig)
    return n_values(params, sig)[0] % params.tame_order


def _signature_from_class(params: FieldParams, n_class: int) -> TameSignature:
    """Greedy digit extraction: window representative, digits in [1, p]."""
    p, f = params.p, params.f
    rep = params.repunit
    n = rep + (n_class - rep) % params.tame_order
    rem = n - rep  # in [0, p^f - 2]; base-p digits are the signature minus 1
    digits = []
    for _ in range(f):
        rem, d = divmod(rem, p)
        digits.append(d + 1)
    if rem:
        raise AssertionError("window representative outside digit range")
    a = [0] * f
    for j, d in enumerate(digits):
        a[(f - j) % f] = d
    return TameSignature(tuple(a))


def canonical_signature(params: FieldParams, exps: Tuple[int, ...]) -> TameSignature:
    """Digit signature of the character with inertial exponent tuple ``exps``.

    Entries of ``exps`` may be arbitrary integers; only their class modulo
    p^f - 1 matters.
    """
    sig = _signature_from_class(params, exponent_class(params, tuple(exps)))
    validate_signature(params, sig)
    return sig


def n_values(params: FieldParams, sig: TameSignature) -> Tuple[int, ...]:
    """Twisted digit sums n_i = sum_{j=1..f} a_{i+j} p^{f-j}, indices mod f.

    These lie in the window [R, p*R) with R the repunit, and p * n_i is
    congruent to n_{i+1} modulo p^f - 1.
    """
    p, f = params.p, params.f
    a = sig.a
    return tuple(
        sum(a[(i + j) % f] * p ** (f - j) for j in range(1, f + 1)) for i in range(f)
    )


def niveau(params: FieldParams, sig: TameSignature) -> Tuple[int, int]:
    """Rotation period f' of the signature and the quotient f'' = f/f'."""
    validate_signature(params, sig)
    f = params.f
    for d in range(1, f + 1):
        if f % d == 0 and sig.rotate(d) == sig:
            return d, f // d
    raise AssertionError("rotation by f always fixes the signature")


# ---------------------------------------------------------------------------
# Unramified parts and full character data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnramifiedPart:
    """Value on Frobenius as a discrete log in the degree-r generator."""

    order_field_degree: int = 1
    dlog: int = 0

    def order(self, p: int) -> int:
        """Multiplicative order of the recorded Frobenius value."""
        n = p**self.order_field_degree - 1
        return n // gcd(n, self.dlog % n) if self.dlog % n else 1

    def is_trivial(self, p: int) -> bool:
        return self.dlog % (p**self.order_field_degree - 1) == 0


def _validate_unram(params: FieldParams, unram: UnramifiedPart) -> None:
    r, d = unram.order_field_degree, unram.dlog
    if r < 1:
        raise InvariantError(f"unramified-part field degree must be >= 1, got {r}")
    if not 0 <= d < max(params.p**r - 1, 1):
        raise InvariantError(f"dlog must lie in [0, p^r - 2], got {d} for degree {r}")


def _scaled_dlog(p: int, unram: UnramifiedPart, degree: int) -> int:
    """Discrete log of the same value with respect to the degree-L generator."""
    r = unram.order_field_degree
    if degree % r:
        raise InvalidInput(f"degree {degree} is not a multiple of {r}")
    return (unram.dlog * ((p**degree - 1) // (p**r - 1))) % (p**degree - 1)


def _normalize_unram(p: int, degree: int, dlog: int) -> UnramifiedPart:
    """Shrink a degree-L discrete log to the least field containing the value."""
    big = p**degree - 1
    dlog %= big
    if dlog == 0:
        return UnramifiedPart(1, 0)
    order = big // gcd(big, dlog)
    r = 1
    while (p**r - 1) % order:
        r += 1
    return UnramifiedPart(r, dlog // (big // (p**r - 1)))


@dataclass(frozen=True)
class CharacterData:
    """A tame character: digit signature, unramified part, and declarations.

    ``declared_trivial`` is fully determined by the data and is recomputed.
    ``declared_cyclotomic`` cannot be inferred, because the unramified part
    of the mod-p cyclotomic character depends on the base field; it is
    caller-supplied and only validated against the inertial signature.  For
    p = 2 the cyclotomic character is the trivial character, so there both
    flags are forced to agree.
    """

    signature: TameSignature
    unram: UnramifiedPart = UnramifiedPart()
    declared_trivial: bool = False
    declared_cyclotomic: bool = False


def character(
    params: FieldParams,
    exps: Tuple[int, ...],
    unram: UnramifiedPart = UnramifiedPart(),
    cyclotomic: Optional[bool] = None,
) -> CharacterData:
    """Build validated character data from an inertial exponent tuple."""
    sig = canonical_signature(params, exps)
    return _finish_character(params, sig, unram, cyclotomic)


def _finish_character(
    params: FieldParams,
    sig: TameSignature,
    unram: UnramifiedPart,
    cyclotomic: Optional[bool],
) -> CharacterData:
    _validate_unram(params, unram)
    trivial = _is_trivial_signature(params, sig) and unram.is_trivial(params.p)
    if cyclotomic is None:
        cyclotomic = params.p == 2 and trivial
    if cyclotomic and sig != cyclotomic_inertia_signature(params):
        raise InvariantError(
            f"cyclotomic declaration inconsistent with signature {sig.a}"
        )
    if params.p == 2:
        # Mod 2 there is exactly one character with cyclotomic signature and
        # trivial unramified part, namely the trivial character itself.
        if cyclotomic and not unram.is_trivial(2):
            raise InvariantError("mod-2 cyclotomic declarations need trivial unram")
        cyclotomic = cyclotomic or trivial
    chi = CharacterData(sig, unram, trivial, cyclotomic)
    validate_character(params, chi)
    return chi


def _is_trivial_signature(params: FieldParams, sig: TameSignature) -> bool:
    return all(ai == params.p - 1 for ai in sig.a)


def validate_character(params: FieldParams, chi: CharacterData) -> None:
    validate_signature(params, chi.signature)
    _validate_unram(params, chi.unram)
    trivial = _is_trivial_signature(params, chi.signature) and chi.unram.is_trivial(
        params.p
    )
    if chi.declared_trivial != trivial:
        raise InvariantError("trivial flag inconsistent with character data")
    if chi.declared_cyclotomic:
        if chi.signature != cyclotomic_inertia_signature(params):
            raise InvariantError("cyclotomic flag inconsistent with signature")
        if params.p == 2 and not chi.declared_trivial:
            raise InvariantError("mod-2 cyclotomic characters are trivial")
    if params.p == 2 and chi.declared_trivial and not chi.declared_cyclotomic:
        raise InvariantError("mod-2 trivial characters are cyclotomic")


def is_unramified(params: FieldParams, chi: CharacterData) -> bool:
    """Whether the character restricts trivially to inertia."""
    return signature_class(params, chi.signature) == 0


def cyclotomic_inertia_signature(params: FieldParams) -> TameSignature:
    """Digit signature of the mod-p cyclotomic character: class of (e, ..., e)."""
    return canonical_signature(params, (params.e,) * params.f)


def char_quotient(
    params: FieldParams,
    chi1: CharacterData,
    chi2: CharacterData,
    declare_cyclotomic: Optional[bool] = None,
) -> CharacterData:
    """The character chi1 * chi2^{-1} with recomputed flags.

    The trivial flag of the quotient is derived from its data.  Whether the
    quotient equals the cyclotomic character cannot be inferred, so it is
    taken from ``declare_cyclotomic`` and validated against the signature.
    """
    validate_character(params, chi1)
    validate_character(params, chi2)
    n1 = signature_class(params, chi1.signature)
    n2 = signature_class(params, chi2.signature)
    sig = _signature_from_class(params, n1 - n2)
    degree = lcm(chi1.unram.order_field_degree, chi2.unram.order_field_degree)
    dlog = _scaled_dlog(params.p, chi1.unram, degree) - _scaled_dlog(
        params.p, chi2.unram, degree
    )
    unram = _normalize_unram(params.p, degree, dlog)
    return _finish_character(params, sig, unram, declare_cyclotomic)

"""Artin-Hasse series, truncated Laurent arithmetic, and the re-derivation."""

from fractions import Fraction

import pytest

from serreweights import (
    FieldParams,
    InvalidInput,
    NonUnitConstantTerm,
    TruncationInsufficient,
    UnramifiedPart,
    artin_hasse_mod_p,
    artin_hasse_rational,
    char_quotient,
    character,
    j_v_ah,
    rederive_jvah,
    required_degree,
    ts_profile,
)
from serreweights._gf import field
from serreweights.series_oracle import (
    LaurentElement,
    TensorAlgebra,
    UNIFORMIZER,
    default_truncation,
    dlog_truncated,
    epsilon_series,
    epsilon_unit,
    lambda_tuple,
    mu_order,
    residue_trace_pairing,
    series_mul,
)


def test_artin_hasse_rational_examples():
    assert artin_hasse_rational(3, 4) == (
        Fraction(1), Fraction(1), Fraction(1, 2), Fraction(1, 2), Fraction(3, 8),
    )
    assert artin_hasse_rational(2, 2) == (Fraction(1),) * 3
    assert artin_hasse_rational(3, 0) == (Fraction(1),)


def test_artin_hasse_mod_p_examples():
    assert artin_hasse_mod_p(3, 4) == (1, 1, 2, 2, 0)
    # 3 c_3 = c_2 + c_1 gives c_3 = 2/3, which is 0 mod 2
    assert artin_hasse_mod_p(2, 3) == (1, 1, 1, 0)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_artin_hasse_p_integrality_and_route_agreement(p):
    # artin_hasse_mod_p cross-checks the exponential recurrence against the
    # Moebius product internally, so a plain call exercises both routes
    coeffs = artin_hasse_rational(p, 60)
    assert len(coeffs) == 61
    for c in coeffs:
        assert c.denominator % p != 0
    reduced = artin_hasse_mod_p(p, 60)
    assert len(reduced) == 61
    assert all(0 <= c < p for c in reduced)
    for c, r in zip(coeffs, reduced):
        num = c.numerator * pow(c.denominator, -1, p)
        assert num % p == r


@pytest.mark.parametrize("p", [2, 3, 5])
def test_artin_hasse_dlog_identity(p):
    # u E'(u)/E(u) = sum over n >= 0 of u^{p^n}, mod (p, u^{61})
    bound = 60
    fq = field(p, 1)
    alg = TensorAlgebra(fq, 1)
    series = LaurentElement(
        {
            d: (fq.scalar(c),)
            for d, c in enumerate(artin_hasse_mod_p(p, bound))
            if c
        },
        trunc=bound,
    )
    logd = dlog_truncated(alg, series)
    expect = {}
    n = 1
    while n <= bound:
        expect[n] = (fq.one,)
        n *= p
    assert logd.coeffs == expect
    assert logd.trunc == bound


def test_dlog_examples():
    fq = field(3, 1)
    alg = TensorAlgebra(fq, 1)
    one_plus_u = LaurentElement({0: alg.one, 1: alg.one})
    logd = dlog_truncated(alg, one_plus_u, trunc=3)
    assert logd.coeffs == {1: (fq.scalar(1),), 2: (fq.scalar(2),), 3: (fq.scalar(1),)}
    assert dlog_truncated(alg, LaurentElement({0: alg.one}), trunc=3).coeffs == {}


def test_dlog_rejects_non_units_and_unbounded_input():
    fq = field(3, 1)
    alg = TensorAlgebra(fq, 1)
    with pytest.raises(NonUnitConstantTerm):
        dlog_truncated(alg, LaurentElement({1: alg.one}), trunc=3)
    with pytest.raises(InvalidInput):
        dlog_truncated(alg, LaurentElement({0: alg.one}))


def test_epsilon_series_dlog_is_componentwise_frobenius_sum():
    # holds for any tuple, coherent or not, because everything is
    # componentwise: dlog E(lam u^m) = sum_j m lam^{p^j} u^{m p^j}
    fq = field(3, 2)
    alg = TensorAlgebra(fq, 2)
    g = fq.subfield_generator(2)
    lam = (g, fq.mul(g, g))
    m, bound = 2, 30
    logd = dlog_truncated(alg, epsilon_series(alg, lam, m, trunc=bound))
    expect = {}
    deg, j = m, 0
    while deg <= bound:
        coeff = alg.scale(fq.scalar(m % 3), tuple(fq.pow(x, 3**j) for x in lam))
        if not alg.is_zero(coeff):
            expect[deg] = coeff
        j += 1
        deg = m * 3**j
    assert logd.coeffs == expect


def test_pairing_examples():
    fq = field(3, 2)
    alg = TensorAlgebra(fq, 2)
    g = fq.subfield_generator(2)
    # <1, u> counts the tensor components; <u, u> has no degree-0 overlap
    assert residue_trace_pairing(alg, LaurentElement({0: alg.one}), UNIFORMIZER) == fq.scalar(2)
    assert residue_trace_pairing(alg, LaurentElement({1: alg.one}), UNIFORMIZER) == fq.zero
    # <lam u^-m, E(lam' u^m)> = m * trace(lam lam')
    lam = (g, fq.frobenius(g, 1))
    lam_p = (fq.frobenius(g, 1), g)
    m = 2
    eps = epsilon_series(alg, lam_p, m, trunc=12)
    got = residue_trace_pairing(alg, LaurentElement({-m: lam}), eps)
    want = fq.mul(fq.scalar(m % 3), alg.trace(alg.mul(lam, lam_p)))
    assert got == want


def test_pairing_is_multiplicative_in_the_unit():
    fq = field(3, 2)
    alg = TensorAlgebra(fq, 2)
    g = fq.subfield_generator(2)
    l1 = (g, fq.pow(g, 3))
    l2 = (fq.pow(g, 5), fq.one)
    m, bound = 2, 30
    e1 = epsilon_series(alg, l1, m, trunc=bound)
    e2 = epsilon_series(alg, l2, m, trunc=bound)
    combined = epsilon_series(alg, alg.add(l1, l2), m, trunc=bound)
    probe = LaurentElement({-m: (fq.pow(g, 2), fq.pow(g, 6))})
    assert residue_trace_pairing(alg, probe, series_mul(alg, e1, e2)) == (
        residue_trace_pairing(alg, probe, combined)
    )


def test_epsilon_unit_agrees_with_series_on_coherent_tuples():
    fq = field(3, 2)
    alg = TensorAlgebra(fq, 2)
    g = fq.subfield_generator(2)
    x = fq.pow(g, 3)
    coherent = tuple(fq.frobenius(x, (2 - i) % 2) for i in range(2))
    m, bound = 2, 30
    series = epsilon_series(alg, coherent, m, trunc=bound)
    unit = epsilon_unit(alg, coherent, m, bound)
    for deg in (-m, -2 * m, -6):
        probe = LaurentElement({deg: (g, fq.pow(g, 7))})
        assert residue_trace_pairing(alg, probe, series) == (
            residue_trace_pairing(alg, probe, unit)
        )


def test_pairing_truncation_insufficient():
    fq = field(3, 2)
    alg = TensorAlgebra(fq, 2)
    g = fq.subfield_generator(2)
    eps = epsilon_series(alg, (g, g), 2, trunc=12)
    with pytest.raises(TruncationInsufficient):
        residue_trace_pairing(alg, LaurentElement({-40: (g, g)}), eps)


def test_lambda_tuple_layout():
    fq = field(3, 2)
    alg = TensorAlgebra(fq, 4)
    g = fq.subfield_generator(2)
    a_val = fq.pow(g, 2)
    # component t + c*f carries a^{-c} by default (the mu^{-1} eigenvector)
    lam = lambda_tuple(alg, 2, 1, a_val)
    assert lam[1] == fq.one and lam[3] == fq.inv(a_val)
    assert lam[0] == fq.zero and lam[2] == fq.zero
    inv = lambda_tuple(alg, 2, 1, a_val, inverse=True)
    assert inv[3] == a_val
    with pytest.raises(InvalidInput):
        lambda_tuple(alg, 3, 0, a_val)


FP_F1 = FieldParams(3, 2, 1)
FP_F2 = FieldParams(3, 1, 2)
FP_F3 = FieldParams(3, 1, 1)


def _fixture_f1():
    chi1, chi2 = character(FP_F1, (2,)), character(FP_F1, (1,))
    return ts_profile(FP_F1, (2,), chi1, chi2), char_quotient(FP_F1, chi1, chi2)


def test_mu_order_and_degrees():
    chi = character(FP_F3, (1,), unram=UnramifiedPart(2, 2))
    assert mu_order(FP_F3, chi) == 4
    assert required_degree(FP_F3, chi) == 4
    triv = character(FP_F3, (1,))
    assert mu_order(FP_F3, triv) == 1
    assert required_degree(FP_F3, triv) == 1
    prof, quot = _fixture_f1()
    assert default_truncation(FP_F1, prof, 2) == 12


def test_rederive_fixture_f1():
    prof, quot = _fixture_f1()
    want = j_v_ah(FP_F1, prof, quot, 2)
    assert rederive_jvah(FP_F1, prof, quot, e_m=2) == want
    assert rederive_jvah(FP_F1, prof, quot) == want
    assert sorted(str(l) for l in want) == ["alpha(1,0)"]


def test_rederive_fixture_f2():
    chi1, chi2 = character(FP_F2, (5, 0)), character(FP_F2, (0, 0))
    prof = ts_profile(FP_F2, (2, 1), chi1, chi2)
    quot = char_quotient(FP_F2, chi1, chi2)
    got = rederive_jvah(FP_F2, prof, quot, e_m=8)
    assert got == j_v_ah(FP_F2, prof, quot, 8)
    assert sorted(str(l) for l in got) == ["alpha(5,0)", "alpha(7,0)"]


def test_rederive_fixture_f3_empty():
    chi1, chi2 = character(FP_F3, (2,)), character(FP_F3, (1,))
    prof = ts_profile(FP_F3, (3,), chi1, chi2)
    quot = char_quotient(FP_F3, chi1, chi2)
    assert rederive_jvah(FP_F3, prof, quot) == frozenset()


def test_rederive_with_nontrivial_unramified_part():
    chi1 = character(FP_F1, (2,), unram=UnramifiedPart(2, 2))
    chi2 = character(FP_F1, (1,))
    prof = ts_profile(FP_F1, (2,), chi1, chi2)
    quot = char_quotient(FP_F1, chi1, chi2)
    assert mu_order(FP_F1, quot) == 4
    want = j_v_ah(FP_F1, prof, quot, 2)
    assert rederive_jvah(FP_F1, prof, quot, e_m=2) == want
    # enlarging the coefficient field or the truncation changes nothing
    assert rederive_jvah(FP_F1, prof, quot, e_m=2, fq_degree=8) == want
    assert rederive_jvah(FP_F1, prof, quot, e_m=2, trunc=40) == want
    with pytest.raises(InvalidInput):
        rederive_jvah(FP_F1, prof, quot, e_m=2, fq_degree=6)


def test_rederive_trivial_quotient_keeps_unramified_direction_separate():
    # the extra degree-0 monomial for trivial chi pairs against u itself,
    # never against the unit directions, so labels stay unpolluted
    params = FieldParams(3, 1, 1)
    chi = character(params, (0,))
    prof = ts_profile(params, (2,), chi, chi)
    quot = char_quotient(params, chi, chi)
    got = rederive_jvah(params, prof, quot)
    assert got == j_v_ah(params, prof, quot, params.tame_order)
    assert sorted(str(l) for l in got) == ["alpha(2,0)"]

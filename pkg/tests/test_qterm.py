from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from properties import random_term, shift_commutation
from qwz.algebra import LaurentPoly, RationalFunction, rf_equal
from qwz.identity import Family, family_instantiate
from qwz.qterm import (
    ClassicalRatio,
    NotProper,
    PochFactor,
    QProperTerm,
    QuadForm,
    UnbalancedLimit,
    classical_limit_ratio,
    shift_quotient_k,
    shift_quotient_n,
    term_eval,
    term_exact,
    term_from_dict,
    term_to_dict,
)
from qwz.special import PrecisionContext

ONE = LaurentPoly.const(1)


def mono(c, i=0, j=0, m=0):
    return LaurentPoly.monomial(c, (i, j, m))


def test_pure_power_quotients():
    F = QProperTerm(qpower=QuadForm(alpha=1))
    assert shift_quotient_n(F) == RationalFunction(mono(1, 1, 2))
    G = QProperTerm(sign_n=1, qpower=QuadForm(alpha=Fraction(-1, 2), delta=Fraction(1, 2)))
    assert shift_quotient_n(G) == RationalFunction(mono(-1, 0, -1))
    H = QProperTerm(qpower=QuadForm(eps=1))
    assert shift_quotient_k(H) == RationalFunction(mono(1, 1))
    assert shift_quotient_k(QProperTerm()) == RationalFunction(ONE)
    assert shift_quotient_n(QProperTerm()) == RationalFunction(ONE)


def test_rate_quarter_family_quotients():
    F = family_instantiate(Family.QUARTER, Fraction(1, 2), Fraction(1, 2), 2, 2)
    assert F.L == 2
    # k-direction: q (1 - q^(1/2+k))^2 / (1 - q^(n+k+2))^2, with q = t^2
    want_k = RationalFunction(mono(1, 2) * (ONE - mono(1, 1, 0, 1)) ** 2,
                              (ONE - mono(1, 4, 1, 1)) ** 2)
    assert rf_equal(shift_quotient_k(F), want_k)
    # n-direction: ((1 - q^(n+2)) / (1 - q^(n+k+2)))^2
    want_n = RationalFunction((ONE - mono(1, 4, 1)) ** 2, (ONE - mono(1, 4, 1, 1)) ** 2)
    assert rf_equal(shift_quotient_n(F), want_n)


def test_generic_k_quotient_matches_closed_form():
    a, b, c, d = Fraction(1, 2), Fraction(3, 2), Fraction(5, 2), Fraction(7, 2)
    F = family_instantiate(Family.QUARTER, a, b, c, d)
    L = F.L
    al, be, ga, de = (mono(1, int(x * L)) for x in (a, b, c, d))
    K, X = mono(1, 0, 0, 1), mono(1, 0, 1, 0)
    want = RationalFunction(mono(1, L) * (ONE - al * K) * (ONE - be * K),
                            (ONE - ga * X * K) * (ONE - de * X * K))
    assert rf_equal(shift_quotient_k(F), want)


def test_not_proper():
    # argument step q^1 against base q^2: the n-shift does not telescope
    F = QProperTerm(1, 0, 0, QuadForm(), ((PochFactor(1, 1, 0, Fraction(1, 1), 2, 0, 1, 0), 1),))
    with pytest.raises(NotProper):
        shift_quotient_n(F)


def test_term_eval_trivial():
    ctx = PrecisionContext(30)
    assert term_eval(QProperTerm(), 3, 4, Fraction(2), ctx) == 1
    for fam in Family:
        F = family_instantiate(fam, Fraction(1, 2), Fraction(1, 3), 2, Fraction(5, 2))
        assert term_eval(F, 0, 0, Fraction(2), ctx) == 1


def test_term_eval_brute_force():
    ctx = PrecisionContext(40)
    F = family_instantiate(Family.QUARTER, Fraction(1, 2), Fraction(1, 2), 2, 2)
    with mpmath.workdps(60):
        q = mpf(2)
        n, k = 1, 2
        num = den = mpf(1)
        for j in range(k):
            num *= (1 - q ** (mpf(1) / 2 + j)) ** 2
            den *= (1 - q ** (n + 2 + j)) ** 2
        brute = q ** k * num / den
    got = term_eval(F, 1, 2, Fraction(2), ctx)
    assert abs(got - brute) < mpf(10) ** -35 * abs(brute)


def test_term_eval_large_negative_power():
    ctx = PrecisionContext(30)
    F = QProperTerm(qpower=QuadForm(alpha=-1, delta=-1))
    v = term_eval(F, 40, 0, Fraction(2), ctx)
    with mpmath.workdps(40):
        assert abs(v - mpf(2) ** (-1640)) < mpf(10) ** -30 * mpf(2) ** (-1640)


def test_classical_limit_pochhammer_quotient():
    a, c = Fraction(1, 3), Fraction(5, 4)
    F = QProperTerm(12, 0, 0, QuadForm(), ((PochFactor(1, 0, 0, a), 1), (PochFactor(1, 0, 0, c), -1)))
    _, rk = classical_limit_ratio(F)
    for k in range(6):
        assert rk(0, k) == (a + k) / (c + k)


def test_classical_limit_rate_quarter_family():
    F = family_instantiate(Family.QUARTER, Fraction(1, 2), Fraction(1, 2), 2, 2)
    rn, rk = classical_limit_ratio(F)
    for n in range(4):
        for k in range(4):
            assert rk(n, k) == (Fraction(1, 2) + k) ** 2 / (n + 2 + k) ** 2
            assert rn(n, k) == Fraction(n + 2, n + 2 + k) ** 2


def test_classical_limit_unbalanced():
    F = QProperTerm(1, 0, 0, QuadForm(), ((PochFactor(1, 0, 0, 1), -1),))
    with pytest.raises(UnbalancedLimit):
        classical_limit_ratio(F)


def test_classical_ratio_equality():
    r1 = ClassicalRatio({(1, 0): Fraction(2), (0, 0): Fraction(1)}, {(0, 0): Fraction(3)})
    r2 = ClassicalRatio({(1, 0): Fraction(4), (0, 0): Fraction(2)}, {(0, 0): Fraction(6)})
    assert r1.equals(r2)
    with pytest.raises(UnbalancedLimit):
        r1.limit_n()
    assert r1(2) == Fraction(5, 3)


# -- randomized terms -----------------------------------------------------------


def test_shift_commutation_property():
    count, bad = shift_commutation(120)
    assert count >= 100 and not bad


def _eval_rf(r: RationalFunction, t, n, k, L):
    return r.evaluate(t, t ** (L * n), t ** (L * k))


def test_numeric_symbolic_consistency():
    rng = random.Random(9)
    ctx = PrecisionContext(40)
    for _ in range(20):
        F = random_term(rng)
        n, k = rng.randint(0, 5), rng.randint(0, 5)
        q = rng.choice([Fraction(2), Fraction(3, 2), Fraction(5, 4), Fraction(3)])
        with ctx.workdps():
            t = mpmath.root(mpf(q.numerator) / q.denominator, F.L)
            a = term_eval(F, n, k, q, ctx)
            b = term_eval(F, n + 1, k, q, ctx)
            r = _eval_rf(shift_quotient_n(F), t, n, k, F.L)
            assert abs(b - a * r) <= mpf(10) ** -35 * max(abs(b), abs(a * r), 1)


def test_iterated_quotients_reproduce_term():
    rng = random.Random(13)
    ctx = PrecisionContext(40)
    for _ in range(20):
        F = random_term(rng)
        F = QProperTerm(F.L, F.sign_n, F.sign_k, F.qpower, F.factors, 1)
        F0 = term_eval(F, 0, 0, Fraction(2), ctx)
        n, k = rng.randint(0, 4), rng.randint(0, 4)
        with ctx.workdps():
            t = mpmath.root(mpf(2), F.L)
            v = F0
            for i in range(n):
                v *= _eval_rf(shift_quotient_n(F), t, i, 0, F.L)
            for j in range(k):
                v *= _eval_rf(shift_quotient_k(F), t, n, j, F.L)
            w = term_eval(F, n, k, Fraction(2), ctx)
            assert abs(v - w) <= mpf(10) ** -35 * max(abs(w), 1)


def test_exact_matches_numeric():
    rng = random.Random(17)
    ctx = PrecisionContext(30)
    for _ in range(20):
        F = random_term(rng)
        n, k = rng.randint(0, 3), rng.randint(0, 3)
        ex = term_exact(F, n, k)
        with ctx.workdps():
            t = mpmath.root(mpf(3), F.L)
            a = ex.evaluate(t, 1, 1)
            b = term_eval(F, n, k, Fraction(3), ctx)
            assert abs(a - b) <= mpf(10) ** -25 * max(abs(b), 1)


def test_term_dict_roundtrip():
    rng = random.Random(21)
    for _ in range(30):
        F = random_term(rng)
        assert term_from_dict(term_to_dict(F)) == F

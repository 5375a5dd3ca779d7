from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from properties import jackson_sides, phi_tail_honesty, pochhammer_splitting, thomae_sides
from qwz.constants import CATALOG, cexpr, parse_constant_expr
from qwz.special import (
    ClassicalSeries,
    Divergent,
    DomainError,
    PhiSeriesSpec,
    PrecisionContext,
    hyper_eval,
    hyper_spec,
    phi_eval,
    qbinomial,
    qbracket,
    qfactorial,
    qgamma,
    qpoch,
    qpoch_infinite,
)


def agree(x, y, digits):
    return abs(x - y) <= mpf(10) ** (-digits) * max(1, abs(y))


# -- constants ---------------------------------------------------------------


def test_constants_audit_two_algorithms():
    rows = CATALOG.audit(100)
    assert {r.name for r in rows} == set(CATALOG.names)
    for r in rows:
        assert r.ok, r
        assert r.agree_a >= 100 and r.agree_b >= 100


def test_constants_literals_long_enough():
    for name in CATALOG.names:
        digits = sum(ch.isdigit() for ch in CATALOG.literal(name))
        assert digits >= 120, name


def test_constant_expr_text_roundtrip():
    e = cexpr(Fraction(3, 2), pow2=Fraction(4, 3), g3=3, pi=-2)
    assert parse_constant_expr(str(e)) == e
    with mpmath.workdps(50):
        want = mpf(3) / 2 * mpmath.cbrt(16) * mpmath.gamma(mpf(1) / 3) ** 3 / mpmath.pi ** 2
        assert agree(e.value(), want, 45)


# -- finite products -----------------------------------------------------------


def test_qpoch_examples():
    assert qpoch(Fraction(3), Fraction(1, 2), 0) == 1
    assert qpoch(Fraction(1, 2), Fraction(1, 2), 3) == Fraction(21, 64)


def test_pochhammer_splitting_property():
    count, bad = pochhammer_splitting(150)
    assert count >= 100 and not bad


def test_qpoch_concatenation_at_q():
    rng = random.Random(11)
    for _ in range(20):
        q = Fraction(rng.randint(2, 9), rng.randint(1, 9))
        n, m = rng.randint(0, 6), rng.randint(0, 6)
        assert qpoch(q, q, n) * qpoch(q ** (n + 1), q, m) == qpoch(q, q, n + m)


def test_qpoch_infinite():
    ctx = PrecisionContext(40)
    assert qpoch_infinite(0, Fraction(1, 3), ctx) == 1
    with mpmath.workdps(60):
        brute = mpf(1)
        a, q = mpf(1) / 2, mpf(1) / 3
        for k in range(10000):
            brute *= 1 - a * q ** k
    assert agree(qpoch_infinite(Fraction(1, 2), Fraction(1, 3), ctx), brute, 35)
    with pytest.raises(DomainError):
        qpoch_infinite(Fraction(1, 2), Fraction(3, 2), ctx)


def test_qgamma():
    ctx = PrecisionContext(40)
    assert agree(qgamma(1, mpf("0.3"), ctx), mpf(1), 35)
    assert agree(qgamma(3, Fraction(1, 2), ctx), mpf(3) / 2, 35)
    with mpmath.workdps(60):
        drift = qgamma(Fraction(1, 2), mpf("0.999"), PrecisionContext(60))
        assert abs(drift - mpmath.sqrt(mpmath.pi)) < mpf("0.01")
    with pytest.raises(DomainError):
        qgamma(-2, Fraction(1, 2), ctx)
    with pytest.raises(DomainError):
        qgamma(Fraction(1, 2), 2, ctx)


def test_qbracket_qbinomial():
    assert qbracket(3, 2) == 7
    assert qbinomial(4, 2) == (1, 1, 2, 1, 1)
    assert qfactorial(3) == (1, 2, 2, 1)
    with pytest.raises(IndexError):
        qbinomial(3, 4)
    for n in range(9):
        for k in range(n + 1):
            cs = qbinomial(n, k)
            assert all(c >= 0 for c in cs)
            assert cs == qbinomial(n, n - k)
            assert qbinomial(n, k, 1) == mpmath.binomial(n, k)


def test_qbracket_limit():
    with mpmath.workdps(30):
        for n in range(1, 21):
            errs = [abs(qbracket(n, 1 - mpf(10) ** -d) - n) for d in range(1, 7)]
            assert all(b <= a for a, b in zip(errs, errs[1:]))
            assert errs[-1] < mpf(10) ** -3


# -- basic hypergeometric series ------------------------------------------------


def test_jackson_fixture():
    ctx = PrecisionContext(40)
    with ctx.workdps():
        lhs, rhs = jackson_sides(mpf(1) / 4, mpf(1) / 3, mpf(1) / 5, 4, mpf(1) / 2, ctx)
        assert lhs.method == "terminating" or lhs.terms <= 5
        assert agree(lhs.value, rhs, 30)


def test_thomae_fixture():
    ctx = PrecisionContext(40)
    left, right = thomae_sides(Fraction(1, 7), Fraction(2, 7), Fraction(3, 7), Fraction(2), Fraction(3),
                               mpf(1) / 2, ctx)
    with ctx.workdps():
        assert left.converged
        assert agree(left.value, right, 30)


def test_phi_unit_numerator_argument():
    ctx = PrecisionContext(30)
    res = phi_eval(PhiSeriesSpec((Fraction(1), Fraction(1, 3), Fraction(2, 5)), (Fraction(1, 7), Fraction(3, 7)),
                                 Fraction(1, 2), Fraction(1, 2)), 100, ctx)
    assert res.value == 1


def test_phi_divergent():
    ctx = PrecisionContext(20)
    spec = PhiSeriesSpec((mpf(1) / 3,), (), mpf(1) / 2, mpf(3))
    with pytest.raises(Divergent):
        phi_eval(spec, 300, ctx)


def test_phi_tail_honesty_property():
    count, bad = phi_tail_honesty(100)
    assert count >= 100 and not bad


def test_hyper_zero_argument():
    assert hyper_eval(hyper_spec((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 5),), 0)).value == 1


def test_hyper_ramanujan_four_over_pi():
    ctx = PrecisionContext(60)
    h = Fraction(1, 2)
    s = ClassicalSeries(Fraction(1, 4), (h, h, h), (1, 1, 1), (1, 6))
    res = hyper_eval(s, 120, ctx)
    with ctx.workdps():
        assert agree(res.value, 4 / +mpmath.pi, 50)


def test_hyper_rate64_pi_squared():
    ctx = PrecisionContext(60)
    s = ClassicalSeries(Fraction(1, 64), (1, 1, 1), (Fraction(3, 2),) * 3, (13, 21))
    res = hyper_eval(s, 80, ctx)
    with ctx.workdps():
        assert agree(res.value, 4 * mpmath.pi ** 2 / 3, 50)

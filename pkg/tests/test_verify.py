from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from qwz.catalog import lookup
from qwz.identity import Family, build_identity
from qwz.special import PrecisionContext
from qwz.verify import (
    ConditionViolated,
    classical_limit_check,
    convergence_report,
    display_check,
    lhs_side,
    parse_q,
    rhs_side,
    telescoping_check,
    verify_identity,
)

H = Fraction(1, 2)


@pytest.fixture(scope="module")
def ramanujan():
    return lookup("ramanujan4").identity()


def _qp(x, n, q):
    out = mpf(1)
    for i in range(n):
        out *= 1 - x * q ** i
    return out


def direct_sides(a, b, c, d, q, digits=80):
    """Independent sums of the rate-1/4 identity: the 3phi2 from its
    definition and the closed-form accelerated summand, both summed until
    terms fall below the budget."""
    with mpmath.workdps(digits):
        q = mpf(Fraction(q).numerator) / Fraction(q).denominator
        P = lambda e: q ** e  # noqa: E731
        a, b, c, d = (mpf(Fraction(x).numerator) / Fraction(x).denominator for x in (a, b, c, d))
        eps = mpf(10) ** -(digits - 5)
        lhs, term, k = mpf(0), mpf(1), 0
        while abs(term) > eps:
            lhs += term
            term *= (1 - P(a + k)) * (1 - P(b + k)) * q / ((1 - P(c + k)) * (1 - P(d + k)))
            k += 1
        lhs *= (P(a + b) - P(c + d)) * (P(a + b + 1) - P(c + d))
        rhs, n = mpf(0), 0
        while True:
            num = _qp(P(c - a), n, q) * _qp(P(c - b), n, q) * _qp(P(d - a), n, q) * _qp(P(d - b), n, q)
            den = (_qp(P(c), n, q) * _qp(P(d), n, q) * _qp(P(1 - a - b + c + d), n, q ** 2)
                   * _qp(P(2 - a - b + c + d), n, q ** 2))
            p = (P(a + b + c + 1) - P(a + b + c + d + n) + P(a + b + d + 1) - P(a + c + d + 1 + n)
                 - P(b + c + d + 1 + n) + P(2 * c + 2 * d + 3 * n))
            term = q ** n * num / den * p
            rhs += term
            if abs(term) < eps and n > 5:
                break
            n += 1
        return lhs, rhs


def test_parse_q():
    assert parse_q("5/4") == Fraction(5, 4)
    assert parse_q("1.25") == Fraction(5, 4)
    assert parse_q(2) == 2
    with pytest.raises(ValueError):
        parse_q("two")


def test_verify_at_two_against_direct_oracle(ramanujan):
    rep = verify_identity(ramanujan, "2", PrecisionContext(60))
    assert rep.passed
    assert mpf(rep.difference) < mpf(10) ** -50
    assert rep.lhs_terms <= 1000 and rep.rhs_terms <= 1000
    lhs, rhs = direct_sides(H, H, 2, 2, 2)
    with mpmath.workdps(80):
        assert abs(lhs - rhs) < mpf(10) ** -70
        assert abs(mpf(rep.lhs) - lhs) < mpf(10) ** -50 * abs(lhs)
        assert abs(mpf(rep.rhs) - rhs) < mpf(10) ** -50 * abs(rhs)


def test_verify_near_boundary(ramanujan):
    rep = verify_identity(ramanujan, "5/4", PrecisionContext(60))
    fast = verify_identity(ramanujan, "2", PrecisionContext(60))
    assert rep.passed
    assert rep.lhs_terms > fast.lhs_terms
    lhs, _ = direct_sides(H, H, 2, 2, Fraction(5, 4))
    with mpmath.workdps(80):
        assert abs(mpf(rep.lhs) - lhs) < mpf(10) ** -50 * abs(lhs)


def test_condition_violated(ramanujan):
    with pytest.raises(ConditionViolated):
        verify_identity(ramanujan, "1/2")
    with pytest.raises(ConditionViolated):
        verify_identity(ramanujan, 1)


def test_report_fields(ramanujan):
    rep = verify_identity(ramanujan, "3", PrecisionContext(30))
    d = rep.to_dict()
    for key in ("tag", "q", "digits", "lhs", "rhs", "difference", "lhs_terms", "rhs_terms",
                "lhs_tail", "rhs_tail", "passed", "seconds"):
        assert key in d
    assert rep.verdict == "pass"
    assert d["tag"] == "ramanujan4"


def test_eventual_ratio_after_burn_in(ramanujan):
    ctx = PrecisionContext(40)
    for q in (Fraction(2), Fraction(5, 4)):
        collected: list = []
        rhs = rhs_side(ramanujan, q, ctx, collect=collected)
        with ctx.workdps():
            for i in range(rhs.burn_in, len(collected) - 1):
                assert abs(collected[i + 1]) < abs(collected[i])


def test_apery_limit_within_two_hundred_terms():
    rep = classical_limit_check(lookup("apery"), PrecisionContext(55), terms=200)
    assert rep.passed and rep.ratio_match
    assert rep.terms <= 200
    assert mpf(rep.difference) < mpf(10) ** -50


def test_rate64_limit_within_eighty_terms():
    rep = classical_limit_check(lookup("zeilberger64"), PrecisionContext(55), terms=80)
    assert rep.passed
    assert rep.terms <= 80
    assert mpf(rep.difference) < mpf(10) ** -50


def test_catalan_limit():
    rep = classical_limit_check(lookup("catalan6"), PrecisionContext(40))
    assert rep.passed
    assert mpf(rep.difference) < mpf(10) ** -40 * 6


def test_bbp_limit_and_display():
    e = lookup("bbp")
    rep = classical_limit_check(e, PrecisionContext(40))
    assert rep.passed
    with mpmath.workdps(45):
        assert abs(mpf(rep.series_value) - mpmath.pi) < mpf(10) ** -39
    assert display_check(e, 2, PrecisionContext(40)).passed


def test_rearranged_display(ramanujan):
    assert display_check(lookup("ramanujan4"), Fraction(3, 2), PrecisionContext(40)).passed


def test_convergence_table_monotone(ramanujan):
    rows = convergence_report(ramanujan, "5/4", (10, 20, 30, 40))
    lhs = [r.lhs_terms for r in rows]
    rhs = [r.rhs_terms for r in rows]
    assert all(x is not None for x in lhs + rhs)
    assert lhs == sorted(lhs) and rhs == sorted(rhs)
    # the accelerated side needs fewer terms at this q
    assert rhs[-1] < lhs[-1]


def test_telescoping_small(ramanujan):
    res = telescoping_check(ramanujan, 3, 3, 2, PrecisionContext(40))
    with mpmath.workdps(40):
        assert res.difference <= mpf(10) ** -38 * max(1, abs(res.lhs))


def test_tail_bounds_honest_on_sides():
    idt = build_identity(Family.NEG_QUARTER, 1, 1, 2, 2)
    small = PrecisionContext(20)
    big = PrecisionContext(60)
    for q in (Fraction(2), Fraction(5, 4)):
        for side in (lhs_side, rhs_side):
            a = side(idt, q, small)
            b = side(idt, q, big)
            with big.workdps():
                rounding = mpf(10) ** -small.working_digits * a.magnitude * a.terms
                assert abs(a.value - b.value) <= a.tail_bound + rounding

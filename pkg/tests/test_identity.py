from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import pytest

from qwz.algebra import LaurentPoly, RationalFunction, RootScale
from qwz.catalog import catalog, lookup
from qwz.constants import cexpr
from qwz.identity import (
    ConditionUnsatisfiable,
    Family,
    PrintedTerm,
    SchemaError,
    build_identity,
    certify_identity,
    condition_holds,
    dumps_identity,
    family_instantiate,
    latex_identity,
    loads_identity,
    printed_theorem_term,
    theorem_form_check,
)
from qwz.telescoper import DegenerateParameters
from qwz.verify import ratios_agree

H = Fraction(1, 2)


@pytest.fixture(scope="module")
def ramanujan():
    return build_identity(Family.QUARTER, H, H, 2, 2, tag="ramanujan4")


def test_family_parse():
    assert Family.parse("neg-quarter") is Family.NEG_QUARTER
    assert Family.parse("RATE64") is Family.RATE64
    with pytest.raises(ValueError):
        Family.parse("eighth")


def test_instantiate_quarter():
    F = family_instantiate(Family.QUARTER, H, H, 2, 2)
    assert F.L == 2
    assert F.qpower.eps == 1
    assert [e for _, e in F.factors] == [1, 1, -1, -1]


@pytest.mark.parametrize("params", [
    (0, 1, 2, 2),        # (1; q)_k kills every term past k = 0
    (1, -2, 3, 3),
    (H, H, 0, 2),        # lower pole
    (H, H, -1, 3),
    (1, 1, 1, 1),        # q^(a+b) = q^(c+d): prefactor vanishes
    (1, 1, 2, 1),        # q^(a+b+1) = q^(c+d)
])
def test_degenerate_parameters(params):
    for fam in (Family.QUARTER, Family.NEG_QUARTER):
        with pytest.raises(DegenerateParameters):
            family_instantiate(fam, *params)


def test_neg_quarter_zero_d_rejected():
    with pytest.raises(DegenerateParameters):
        build_identity(Family.NEG_QUARTER, 1, 1, 2, 0)


def test_condition_unsatisfiable():
    with pytest.raises(ConditionUnsatisfiable):
        build_identity(Family.QUARTER, 2, 2, 1, 1)


def test_condition_text_and_predicate(ramanujan):
    assert ramanujan.condition == "|q^(2)/q^(4)| < 1 < |q|"
    assert condition_holds(ramanujan.params, Fraction(2))
    assert not condition_holds(ramanujan.params, Fraction(1, 2))


def test_quarter_prefactor(ramanujan):
    rs = RootScale(2)
    want = (rs.qpow(1) - rs.qpow(4)) * (rs.qpow(2) - rs.qpow(4))
    assert ramanujan.prefactor == want
    assert ramanujan.phi.upper == (rs.qpow(H), rs.qpow(H), rs.qpow(1))
    assert ramanujan.phi.lower == (rs.qpow(2), rs.qpow(2))


def test_theorem_form_examples(ramanujan):
    assert theorem_form_check(ramanujan)
    catalan = build_identity(Family.QUARTER, H, 1, Fraction(3, 2), Fraction(3, 2))
    assert theorem_form_check(catalan)
    neg = build_identity(Family.NEG_QUARTER, 1, 1, 2, 2)
    assert theorem_form_check(neg)


def test_theorem_form_tampered(ramanujan):
    printed = printed_theorem_term(Family.QUARTER, H, H, 2, 2)
    bumped = PrintedTerm(printed.base, printed.poly + RationalFunction.const(1))
    assert not theorem_form_check(ramanujan, bumped)
    L = ramanujan.L
    tweak = LaurentPoly.monomial(1, (L, 1, 0))  # one extra q^(n+1)
    assert not theorem_form_check(ramanujan, PrintedTerm(printed.base, printed.poly + RationalFunction(tweak)))


def test_theorem_form_not_applicable():
    idt = build_identity(Family.RATE64, 1, 1, 2, 2)
    with pytest.raises(ValueError):
        theorem_form_check(idt)


def test_json_roundtrip_byte_identical(ramanujan):
    text = dumps_identity(ramanujan)
    again = loads_identity(text)
    assert dumps_identity(again) == text
    assert certify_identity(again).is_zero()
    d = json.loads(text)
    assert d["provenance"]["tag"] == "ramanujan4"
    assert d["params"] == ["1/2", "1/2", "2", "2"]
    assert list(d) == sorted(d)


def test_derivation_is_deterministic():
    a = dumps_identity(build_identity(Family.NEG27, 1, 1, 2, 2))
    b = dumps_identity(build_identity(Family.NEG27, 1, 1, 2, 2))
    assert a == b


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("certificate"),
    lambda d: d.__setitem__("params", ["1/2", "1/2"]),
    lambda d: d.__setitem__("family", "octic"),
    lambda d: d["certificate"].__setitem__("R", "1*t^"),
    lambda d: d.__setitem__("condition", "|q| > 1"),
])
def test_schema_errors(ramanujan, mutate):
    d = json.loads(dumps_identity(ramanujan))
    mutate(d)
    with pytest.raises(SchemaError):
        loads_identity(json.dumps(d))


def test_schema_error_on_garbage():
    with pytest.raises(SchemaError):
        loads_identity("[1, 2")
    with pytest.raises(SchemaError):
        loads_identity("[1, 2]")


def test_tampered_file_fails_certification(ramanujan):
    d = json.loads(dumps_identity(ramanujan))
    d["certificate"]["Rbar"] = "(1*t^0*X^1*K^0)/(1*t^0*X^0*K^0)"
    idt = loads_identity(json.dumps(d))
    assert not certify_identity(idt).is_zero()


def test_latex_apery():
    tex = latex_identity(lookup("apery").identity())
    assert "{}_{3}\\phi_{2}" in tex
    assert "\\begin{matrix} q, q, q \\\\ q^{2}, q^{2} \\end{matrix}" in tex
    assert "\\sum_{n=0}^{\\infty}" in tex


def test_catalog_contents():
    entries = catalog()
    assert len(entries) >= 30
    assert len({e.tag for e in entries}) == len(entries)
    ap = lookup("apery")
    assert ap.family is Family.QUARTER and ap.params == (1, 1, 2, 2)
    assert ap.target == cexpr(Fraction(1, 9), pi=2)
    z = lookup("zeilberger64")
    assert z.family is Family.RATE64 and z.params == (1, 1, 2, 2)
    assert z.target == cexpr(Fraction(4, 3), pi=2)
    with pytest.raises(KeyError):
        lookup("no-such-entry")


def test_catalog_conditions_hold_at_two():
    for e in catalog():
        assert condition_holds(e.params, 2), e.tag


def test_neg27_classical_limit_is_pi_squared_half():
    e = lookup("pi2-half")
    assert e.family is Family.NEG27 and e.params == (1, 1, 2, 2)
    assert e.target == cexpr(H, pi=2)
    assert ratios_agree(e)


def test_rate64_gamma_series_weight():
    e = lookup("gamma13-j")
    assert e.family is Family.RATE64 and e.params == (H, Fraction(1, 6), 1, 1)
    assert e.series.weight_num == (85, 126)
    assert ratios_agree(e)


def test_ratio_mismatch_detected():
    e = lookup("apery")
    wrong = replace(e, series=replace(e.series, weight_num=(2, 1)))
    assert not ratios_agree(wrong)

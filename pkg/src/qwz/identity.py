"""Input families, identity assembly, printed theorem forms and the identity
file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .algebra import (
    ONE,
    LaurentPoly,
    RationalFunction,
    RootScale,
    parse_poly,
    parse_rf,
    rf_equal,
)
from .constants import ConstantExpr, parse_constant_expr
from .qterm import (
    PochFactor,
    QProperTerm,
    QuadForm,
    ShiftClosure,
    shift_quotient_n,
    term_exact,
    term_from_dict,
    term_to_dict,
)
from .special import PhiSeriesSpec
from .telescoper import (
    CertificationFailed,
    DegenerateParameters,
    QWZPair,
    Recurrence,
    certify_wz,
    ekhad_normalize,
    shift_K,
    shift_X,
    zeilberger_first_order,
)

FORMAT_VERSION = 1


class ConditionUnsatisfiable(ValueError):
    pass


class SchemaError(ValueError):
    pass


class Family(Enum):
    QUARTER = "quarter"
    NEG_QUARTER = "neg-quarter"
    QUARTER2 = "quarter2"
    RATE64 = "rate64"
    NEG27 = "neg27"

    @classmethod
    def parse(cls, text: str) -> "Family":
        key = text.strip().lower().replace("_", "-")
        for f in cls:
            if f.value == key or f.name.lower().replace("_", "-") == key:
                return f
        raise ValueError(f"unknown family {text!r}")


# n-coefficients of (upper a, upper b, lower c, lower d) in
# F(n,k) = q^k (q^(a + ..), q^(b + ..); q)_k / (q^(c + ..), q^(d + ..); q)_k
FAMILY_SHAPES = {
    Family.QUARTER: (0, 0, 1, 1),
    Family.NEG_QUARTER: (0, 1, 1, 2),
    Family.QUARTER2: (1, 1, 1, 2),
    Family.RATE64: (1, 1, 2, 2),
    Family.NEG27: (0, 1, 2, 2),
}

# rate of the classical accelerated series each family produces
FAMILY_RATES = {
    Family.QUARTER: Fraction(1, 4),
    Family.NEG_QUARTER: Fraction(-1, 4),
    Family.QUARTER2: Fraction(1, 4),
    Family.RATE64: Fraction(1, 64),
    Family.NEG27: Fraction(-1, 27),
}


def _params(a, b, c, d) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in (a, b, c, d))


def _is_nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def family_instantiate(family: Family, a, b, c, d) -> QProperTerm:
    a, b, c, d = _params(a, b, c, d)
    for name, x in (("a", a), ("b", b)):
        if _is_nonpositive_integer(x):
            raise DegenerateParameters(
                f"upper parameter {name} = {x} makes the series terminate")
    for name, x in (("c", c), ("d", d)):
        if _is_nonpositive_integer(x):
            raise DegenerateParameters(f"lower parameter {name} = {x} produces a pole")
    if a + b == c + d or a + b + 1 == c + d:
        raise DegenerateParameters("q^(a+b) or q^(a+b+1) equals q^(c+d)")
    L = RootScale.for_exponents((a, b, c, d)).L
    ua, ub, uc, ud = FAMILY_SHAPES[family]
    factors = (
        (PochFactor(1, ua, 0, a, 1, 0, 1, 0), 1),
        (PochFactor(1, ub, 0, b, 1, 0, 1, 0), 1),
        (PochFactor(1, uc, 0, c, 1, 0, 1, 0), -1),
        (PochFactor(1, ud, 0, d, 1, 0, 1, 0), -1),
    )
    return QProperTerm(L, 0, 0, QuadForm(eps=1), factors)


def condition_exponent(a, b, c, d) -> Fraction:
    a, b, c, d = _params(a, b, c, d)
    return a + b + 1 - c - d


def condition_holds(params, q) -> bool:
    """|q^(a+b+1-c-d)| < 1 < |q| for real q > 0."""
    from .special import to_mpf
    import mpmath

    e = condition_exponent(*params)
    qv = to_mpf(q)
    if not qv > 1:
        return False
    return bool(mpmath.power(qv, to_mpf(e)) < 1)


def condition_text(params) -> str:
    a, b, c, d = _params(*params)
    return f"|q^({a + b + 1})/q^({c + d})| < 1 < |q|"


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


@dataclass
class Identity:
    family: Family
    params: tuple
    L: int
    prefactor: LaurentPoly
    phi: PhiSeriesSpec
    pair: QWZPair
    input_term: QProperTerm
    multiplier: RationalFunction
    tag: str = ""
    classical_target: ConstantExpr | None = None

    @property
    def fbar(self):
        return self.pair.fbar

    @property
    def condition(self) -> str:
        return condition_text(self.params)

    def rhs_term_exact(self, n: int) -> RationalFunction:
        """n-th RHS term as an exact rational function of t."""
        x = self.multiplier.substitute_monomials({1: (1, (self.L * n, 0, 0))})
        return term_exact(self.fbar, n, 0) * x

    def rhs_shift_quotient(self) -> RationalFunction:
        base = shift_quotient_n(self.fbar).substitute_monomials({2: (1, (0, 0, 0))})
        m = self.multiplier
        return base * shift_X(m, self.L, 1) / m


def _default_prefactor(family: Family, params, L: int, rbar: RationalFunction) -> LaurentPoly:
    a, b, c, d = params
    rs = RootScale(L)
    if family is Family.QUARTER:
        return (rs.qpow(a + b) - rs.qpow(c + d)) * (rs.qpow(a + b + 1) - rs.qpow(c + d))
    if family is Family.NEG_QUARTER:
        return (ONE - rs.qpow(d)) * (rs.qpow(c + d) - rs.qpow(a + b)) * \
            (rs.qpow(c + d) - rs.qpow(a + b + 1))
    # no printed theorem: clear the denominator of Rbar at n = k = 0
    r0 = rbar.substitute_monomials({1: (1, (0, 0, 0)), 2: (1, (0, 0, 0))})
    p = r0.den.primitive()
    if p.leading()[1] < 0:
        p = -p
    return p


def _phi_spec(params, L: int) -> PhiSeriesSpec:
    a, b, c, d = params
    rs = RootScale(L)
    return PhiSeriesSpec(
        upper=(rs.qpow(a), rs.qpow(b), rs.qpow(1)),
        lower=(rs.qpow(c), rs.qpow(d)),
        base=rs.qpow(1),
        argument=rs.qpow(1),
    )


def build_identity(family: Family, a, b, c, d, tag: str = "",
                   classical_target: ConstantExpr | None = None) -> Identity:
    params = _params(a, b, c, d)
    F = family_instantiate(family, *params)
    if condition_exponent(*params) >= 0:
        raise ConditionUnsatisfiable(
            "q^(a+b+1-c-d) must have modulus below 1 for some |q| > 1")
    rec = zeilberger_first_order(F)
    pair = ekhad_normalize(F, rec)
    L = F.L
    pre = _default_prefactor(family, params, L, pair.rbar)
    if pre.is_zero():
        raise DegenerateParameters("theorem prefactor vanishes")
    mult = RationalFunction(pre) * pair.rbar.substitute_monomials({2: (1, (0, 0, 0))})
    return Identity(family, params, L, pre, _phi_spec(params, L), pair, F, mult,
                    tag, classical_target)


# ---------------------------------------------------------------------------
# printed theorem forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrintedTerm:
    """base(n) * poly(q^n): a Pochhammer product times a polynomial in X."""

    base: QProperTerm
    poly: RationalFunction

    def exact(self, n: int) -> RationalFunction:
        L = self.base.L
        return term_exact(self.base, n, 0) * self.poly.substitute_monomials(
            {1: (1, (L * n, 0, 0))})

    def shift_quotient(self) -> RationalFunction:
        L = self.base.L
        base = shift_quotient_n(self.base).substitute_monomials({2: (1, (0, 0, 0))})
        return base * shift_X(self.poly, L, 1) / self.poly


def _poch_n(coef, w, s, exponent=1):
    return (PochFactor(coef, 0, 0, w, s, 1, 0, 0), exponent)


def _qx(L: int, q_exp, x_exp: int = 0, coef=1) -> LaurentPoly:
    return LaurentPoly.monomial(coef, (RootScale(L).t_exponent(q_exp), x_exp, 0))


def printed_theorem_term(family: Family, a, b, c, d) -> PrintedTerm:
    """The summand printed in the closed-form theorems for the two families
    that have one."""
    a, b, c, d = _params(a, b, c, d)
    L = RootScale.for_exponents((a, b, c, d)).L
    if family is Family.QUARTER:
        base = QProperTerm(L, 0, 0, QuadForm(delta=1), (
            _poch_n(1, c - a, 1), _poch_n(1, c - b, 1), _poch_n(1, d - a, 1), _poch_n(1, d - b, 1),
            _poch_n(1, c, 1, -1), _poch_n(1, d, 1, -1),
            _poch_n(1, 1 - a - b + c + d, 2, -1), _poch_n(1, 2 - a - b + c + d, 2, -1),
        ))
        p = (_qx(L, a + b + c + 1) - _qx(L, a + b + c + d, 1) + _qx(L, a + b + d + 1)
             - _qx(L, a + c + d + 1, 1) - _qx(L, b + c + d + 1, 1) + _qx(L, 2 * c + 2 * d, 3))
        return PrintedTerm(base, RationalFunction(p))
    if family is Family.NEG_QUARTER:
        # (-1)^n q^(-binom(n,2)) q^(n(a-b-1)) [...]_n
        qp = QuadForm(alpha=Fraction(-1, 2), delta=Fraction(1, 2) + (a - b - 1))
        base = QProperTerm(L, 1, 0, qp, (
            _poch_n(1, d - a, 2), _poch_n(1, d - a + 1, 2),
            _poch_n(1, d + 1, 2, -1), _poch_n(1, d + 2, 2, -1),
            _poch_n(1, c + d - a - b + 1, 2, -1), _poch_n(1, c + d - a - b + 2, 2, -1),
            _poch_n(1, b, 1), _poch_n(1, c - a, 1), _poch_n(1, d - b, 1),
            _poch_n(1, c, 1, -1),
        ))
        terms = [
            (-1, a + b + c + d, 3), (-1, a + b + c + d + 1, 3), (1, a + b + c + 2 * d, 5),
            (-1, a + b + 2 * d + 1, 4), (1, 2 * a + b + 1, 0), (1, a + c + 2 * d + 1, 4),
            (-1, 2 * a + d + 1, 1), (1, a + 2 * d + 1, 3), (1, b + c + 2 * d + 1, 5),
            (-1, c + 2 * d + 1, 4), (1, 2 * c + 2 * d, 5), (-1, 2 * c + 3 * d, 7),
        ]
        p = LaurentPoly()
        for sgn, e, xe in terms:
            p = p + _qx(L, e, xe, sgn)
        return PrintedTerm(base, RationalFunction(p))
    raise ValueError(f"no printed theorem for family {family.value}")


def theorem_form_check(identity: Identity, printed: PrintedTerm | None = None,
                       n_terms: int = 16) -> bool:
    """Engine RHS summand equals the printed theorem summand, symbolically via
    shift quotients and exactly term by term for n < n_terms."""
    if identity.family not in (Family.QUARTER, Family.NEG_QUARTER):
        raise ValueError("theorem_form_check applies to QUARTER and NEG_QUARTER only")
    if printed is None:
        printed = printed_theorem_term(identity.family, *identity.params)
    if printed.base.L != identity.L:
        return False
    if not rf_equal(printed.shift_quotient(), identity.rhs_shift_quotient()):
        return False
    for n in range(n_terms):
        if not rf_equal(printed.exact(n), identity.rhs_term_exact(n)):
            return False
    return True


# ---------------------------------------------------------------------------
# identity file format
# ---------------------------------------------------------------------------


def _fs(x: Fraction) -> str:
    x = Fraction(x)
    return str(x)


def identity_to_dict(idt: Identity) -> dict:
    rec = idt.pair.origin
    return {
        "format": FORMAT_VERSION,
        "family": idt.family.value,
        "params": [_fs(p) for p in idt.params],
        "L": idt.L,
        "lhs": {
            "prefactor": str(idt.prefactor),
            "phi": {
                "upper": [str(x) for x in idt.phi.upper],
                "lower": [str(x) for x in idt.phi.lower],
                "base": str(idt.phi.base),
                "argument": str(idt.phi.argument),
            },
        },
        "rhs": {
            "term": term_to_dict(idt.fbar),
            "multiplier": str(idt.multiplier),
        },
        "input": term_to_dict(idt.input_term),
        "certificate": {
            "p1": str(rec.p1),
            "p2": str(rec.p2),
            "R": str(rec.R),
            "Rbar": str(idt.pair.rbar),
            "j": idt.pair.j,
        },
        "condition": idt.condition,
        "provenance": {
            "tag": idt.tag,
            "classical_target": str(idt.classical_target) if idt.classical_target else "",
        },
    }


def dumps_identity(idt: Identity) -> str:
    return json.dumps(identity_to_dict(idt), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def identity_from_dict(d: dict) -> Identity:
    try:
        family = Family.parse(d["family"])
        params = tuple(Fraction(p) for p in d["params"])
        if len(params) != 4:
            raise SchemaError("params must have four entries")
        L = int(d["L"])
        lhs = d["lhs"]
        phi = lhs["phi"]
        spec = PhiSeriesSpec(
            tuple(parse_poly(x) for x in phi["upper"]),
            tuple(parse_poly(x) for x in phi["lower"]),
            parse_poly(phi["base"]),
            parse_poly(phi["argument"]),
        )
        cert = d["certificate"]
        rec = Recurrence(parse_poly(cert["p1"]), parse_poly(cert["p2"]), parse_rf(cert["R"]))
        fbar = term_from_dict(d["rhs"]["term"])
        pair = QWZPair(fbar, parse_rf(cert["Rbar"]), rec, int(cert.get("j", 0)))
        prov = d.get("provenance", {})
        target = prov.get("classical_target") or None
        idt = Identity(
            family, params, L, parse_poly(lhs["prefactor"]), spec, pair,
            term_from_dict(d["input"]), parse_rf(d["rhs"]["multiplier"]),
            prov.get("tag", ""), parse_constant_expr(target) if target else None,
        )
        if d.get("condition") != idt.condition:
            raise SchemaError("stored condition does not match the parameters")
        return idt
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"malformed identity document: {exc}") from exc


def loads_identity(text: str) -> Identity:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise SchemaError("identity document must be a JSON object")
    return identity_from_dict(d)


def certify_identity(idt: Identity) -> RationalFunction:
    """Residual of the stored pair; also rechecks the stored recurrence against
    the stored input term and the multiplier against Rbar."""
    res = certify_wz(idt.pair)
    if not res.is_zero():
        return res
    F = idt.input_term
    L = idt.L
    rec = idt.pair.origin
    from .qterm import shift_quotient_k

    lhs = RationalFunction(rec.p1) * shift_quotient_n(F) - RationalFunction(rec.p2)
    rhs = shift_K(rec.R, L, 1) * shift_quotient_k(F) - rec.R
    r2 = lhs - rhs
    if not r2.is_zero():
        return r2
    m = RationalFunction(idt.prefactor) * idt.pair.rbar.substitute_monomials({2: (1, (0, 0, 0))})
    return m - idt.multiplier


# ---------------------------------------------------------------------------
# LaTeX
# ---------------------------------------------------------------------------


def _latex_qpow(L: int, t_exp: int) -> str:
    e = Fraction(t_exp, L)
    if e == 0:
        return "1"
    if e == 1:
        return "q"
    return f"q^{{{e}}}"


def _latex_poly(p: LaurentPoly, L: int, var: str = "n") -> str:
    if p.is_zero():
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        te, xe, _ = e
        expo = Fraction(te, L)
        parts = []
        if expo:
            parts.append(str(expo))
        if xe:
            parts.append(f"{xe if xe != 1 else ''}{var}" if xe > 0 else f"-{abs(xe) if xe != -1 else ''}{var}")
        exp_text = " + ".join(parts).replace("+ -", "- ")
        mono = f"q^{{{exp_text}}}" if parts else ""
        cabs = abs(c)
        coef = "" if (cabs == 1 and mono) else (str(cabs) if cabs.denominator == 1 else f"\\tfrac{{{cabs.numerator}}}{{{cabs.denominator}}}")
        sign = "-" if c < 0 else ("+" if i else "")
        out.append(f"{sign} {coef}{mono}".strip() if i else f"{sign}{coef}{mono}")
    return " ".join(out)


def _latex_bracket(uppers, lowers, base) -> str:
    up = ", ".join(uppers) or "-"
    lo = ", ".join(lowers) or "-"
    return f"\\left[ \\begin{{matrix}} {up} \\\\ {lo} \\end{{matrix}} \\, \\Bigg| \\, {base} \\right]_{{n}}"


def _latex_arg(f: PochFactor) -> str:
    e = f.w
    head = "" if f.coef == 1 else ("-" if f.coef == -1 else f"{f.coef}")
    if e == 0:
        return head + "1" if head in ("", "-") else head
    body = "q" if e == 1 else f"q^{{{e}}}"
    return head + body


def latex_identity(idt: Identity) -> str:
    L = idt.L
    spec = idt.phi
    ups = [_latex_qpow(L, x.leading()[0][0]) for x in spec.upper]
    los = [_latex_qpow(L, x.leading()[0][0]) for x in spec.lower]
    lhs = (f"\\left({_latex_poly(idt.prefactor, L)}\\right) {{}}_{{3}}\\phi_{{2}}\\!\\left[ "
           f"\\begin{{matrix}} {', '.join(ups)} \\\\ {', '.join(los)} \\end{{matrix}} "
           f"\\ \\Bigg| \\ q; q \\right]")
    fbar = idt.fbar
    pieces = []
    if isinstance(fbar, QProperTerm):
        if fbar.sign_n:
            pieces.append("(-1)^{n}")
        if fbar.scale_n != 1:
            pieces.append(f"\\left({fbar.scale_n}\\right)^{{n}}")
        qp = fbar.qpower
        expo = []
        if qp.alpha:
            expo.append(f"{qp.alpha} n^2")
        if qp.delta:
            expo.append(f"{qp.delta} n")
        if expo:
            pieces.append("q^{" + " + ".join(expo).replace("+ -", "- ") + "}")
        groups: dict = {}
        for f, e in fbar.factors:
            if f.mu != 1 or f.nu != 0 or f.u or f.v:
                continue
            key = f.s
            ups, los = groups.setdefault(key, ([], []))
            (ups if e > 0 else los).extend([_latex_arg(f)] * abs(e))
        for s, (ups, los) in sorted(groups.items()):
            base = "1" if s == 0 else ("q" if s == 1 else f"q^{{{s}}}")
            pieces.append(_latex_bracket(ups, los, base))
    else:
        pieces.append("\\overline{F}(n, 0)")
    m = idt.multiplier
    num = _latex_poly(m.num, L)
    den = _latex_poly(m.den, L)
    pieces.append(f"\\frac{{{num}}}{{{den}}}" if not m.den.is_constant() else f"\\left({num}\\right)")
    rhs = "\\sum_{n=0}^{\\infty} " + " ".join(pieces)
    return (f"% {idt.family.value} {', '.join(_fs(p) for p in idt.params)}; "
            f"valid for {idt.condition}\n"
            f"\\begin{{multline*}}\n{lhs} \\\\\n= {rhs}\n\\end{{multline*}}\n")

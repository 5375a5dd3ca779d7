"""High-precision numeric checks of identities and their classical limits."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction

import mpmath
from mpmath import mpf

from .algebra import LaurentPoly, RationalFunction
from .identity import Identity, condition_holds
from .qterm import QProperTerm, _t_of, rf_classical_limit, term_eval
from .special import ClassicalSeries, Divergent, PhiSeriesSpec, PrecisionContext, hyper_eval, phi_eval

DEFAULT_TERMS = 1000


class ConditionViolated(ValueError):
    pass


def parse_q(q) -> Fraction:
    """Exact value of q from an int, Fraction, "p/q" or decimal string."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    if isinstance(q, str):
        s = q.strip()
        try:
            return Fraction(s) if "/" in s else Fraction(Decimal(s))
        except (ArithmeticError, ValueError) as exc:
            raise ValueError(f"cannot interpret {q!r} as a value of q") from exc
    if isinstance(q, float):
        return Fraction(Decimal(repr(q)))
    raise TypeError(f"cannot interpret {q!r} as a value of q")


def _nstr(x, digits: int) -> str:
    return mpmath.nstr(x, digits, min_fixed=-5, max_fixed=5) if x is not None else ""


def _mp(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def _burn_in(ratios) -> int:
    """First index after which every observed |ratio| stays below 1."""
    idx = 0
    for i, r in enumerate(ratios):
        if abs(r) >= 1:
            idx = i + 1
    return idx


# ---------------------------------------------------------------------------
# the two sides
# ---------------------------------------------------------------------------


@dataclass
class SideResult:
    value: mpf
    tail_bound: mpf
    terms: int
    converged: bool
    method: str
    burn_in: int
    magnitude: mpf


def numeric_phi_spec(spec: PhiSeriesSpec, t) -> PhiSeriesSpec:
    def ev(x):
        return x.evaluate(t, 1, 1) if isinstance(x, LaurentPoly) else x
    return PhiSeriesSpec(tuple(ev(a) for a in spec.upper), tuple(ev(b) for b in spec.lower),
                         ev(spec.base), ev(spec.argument))


ROUNDOFF_GUARD = 10


def lhs_side(idt: Identity, q: Fraction, ctx: PrecisionContext, terms: int = DEFAULT_TERMS) -> SideResult:
    with ctx.workdps():
        t = _t_of(q, idt.L)
        res = phi_eval(numeric_phi_spec(idt.phi, t), terms, ctx)
        pre = _mp(idt.prefactor.evaluate(t, 1, 1))
        return SideResult(pre * res.value, abs(pre) * res.tail_bound, res.terms, res.converged,
                          res.method, _burn_in(res.ratios), max(abs(pre), abs(pre * res.value)))


def _x_coefficients(p: LaurentPoly, t) -> dict[int, mpf]:
    out: dict[int, mpf] = {}
    for (i, j, m), c in p.terms().items():
        if m:
            raise ValueError("ratio depends on K")
        out[j] = out.get(j, 0) + mpf(c.numerator) / c.denominator * t ** i
    return {j: v for j, v in out.items() if v != 0}


class _RatioBound:
    """Uniform bounds on |r(X)| for the RHS term ratio r, valid for all
    |X| >= |X_n| once the lower-order parts are dominated by the top terms."""

    def __init__(self, ratio: RationalFunction, t):
        self.num = _x_coefficients(ratio.num, t)
        self.den = _x_coefficients(ratio.den, t)
        self.dn = max(self.num)
        self.dd = max(self.den)
        if self.dn > self.dd:
            raise Divergent("RHS term ratio grows without bound")
        self.rho = self.num[self.dn] / self.den[self.dd] if self.dn == self.dd else mpf(0)

    @staticmethod
    def _rel(coeffs, top, absx):
        lead = abs(coeffs[top])
        return sum(abs(c) / lead * absx ** (j - top) for j, c in coeffs.items() if j != top)

    def tail(self, nxt, absx):
        """(estimate, bound) for the sum of all terms from nxt on, given |X|
        at the index of nxt; None while the bounds are not yet usable."""
        sn = self._rel(self.num, self.dn, absx)
        sd = self._rel(self.den, self.dd, absx)
        if sd >= mpf(1) / 2:
            return None
        if self.dn == self.dd:
            eps = (1 + sn) / (1 - sd) - 1
            r = abs(self.rho)
            if r * (1 + eps) >= 1:
                return None
            est = nxt / (1 - self.rho)
            bound = abs(nxt) * (1 / (1 - r * (1 + eps)) - 1 / (1 - r))
            return est, bound
        R = abs(self.num[self.dn]) * absx ** (self.dn - self.dd) * (1 + sn) / (
            abs(self.den[self.dd]) * (1 - sd))
        if R >= 1:
            return None
        return mpf(0), abs(nxt) / (1 - R)


def _fbar_terms_k0(F, q: Fraction, ctx: PrecisionContext):
    """Generator of F(n, 0), n = 0, 1, ..., with Pochhammer products grown
    incrementally when the argument does not move with n."""
    if not isinstance(F, QProperTerm):
        n = 0
        while True:
            yield term_eval(F, n, 0, q, ctx)
            n += 1
    t = _t_of(q, F.L)
    L = F.L
    state = []
    for f, e in F.factors:
        a = mpf(f.coef.numerator) / f.coef.denominator * t ** int(f.w * L)
        b = t ** int(f.s * L)
        state.append([f, e, a, b, mpf(1), 0, a])  # factor, exp, a, b, product, length, next arg
    scale = mpf(F.scale_n.numerator) / F.scale_n.denominator
    coef = mpf(F.coef.numerator) / F.coef.denominator
    n = 0
    while True:
        te = F.qpower.value(n, 0) * L
        val = coef * scale ** n * t ** int(te)
        if (F.sign_n * n) % 2:
            val = -val
        for st in state:
            f, e = st[0], st[1]
            m = f.length(n, 0)
            if m < 0:
                raise ValueError("negative Pochhammer length on the evaluation domain")
            if f.u == 0 and m >= st[5]:
                while st[5] < m:
                    st[4] *= 1 - st[6]
                    st[6] *= st[3]
                    st[5] += 1
                prod = st[4]
            else:
                a = mpf(f.coef.numerator) / f.coef.denominator * t ** int((f.u * n + f.w) * L)
                prod = mpf(1)
                for i in range(m):
                    prod *= 1 - a
                    a *= st[3]
            if e == 1:
                val *= prod
            else:
                val *= prod ** e
        yield val
        n += 1


def rhs_side(idt: Identity, q: Fraction, ctx: PrecisionContext, terms: int = DEFAULT_TERMS,
             collect: list | None = None) -> SideResult:
    """sum_n Fbar(n, 0) M(q^n) with a tail bound from the limiting term ratio."""
    # terms carry t^E with E quadratic in n, which multiplies the rounding
    # error of t; the extra digits keep that below the guard
    with ctx.workdps(), mpmath.extradps(ROUNDOFF_GUARD):
        L = idt.L
        t = _t_of(q, L)
        qq = t ** L
        bounder = _RatioBound(idt.rhs_shift_quotient(), t)
        num, den = idt.multiplier.num, idt.multiplier.den
        gen = _fbar_terms_k0(idt.fbar, q, ctx)
        eps = ctx.eps
        total = mpf(0)
        mag = mpf(0)
        X = mpf(1)
        prev = None
        ratios = []
        cur = next(gen) * _mp(num.evaluate(t, X, 1)) / _mp(den.evaluate(t, X, 1))
        n = 0
        while True:
            total += cur
            mag = max(mag, abs(cur))
            if collect is not None:
                collect.append(cur)
            n += 1
            X *= qq
            nxt = next(gen) * _mp(num.evaluate(t, X, 1)) / _mp(den.evaluate(t, X, 1))
            if cur != 0:
                ratios.append(nxt / cur)
            tb = bounder.tail(nxt, abs(X))
            if tb is not None:
                est, bound = tb
                if bound < eps * max(abs(total), 1):
                    return SideResult(total + est, bound, n, True, "ratio-tail", _burn_in(ratios),
                                      max(mag, abs(total)))
            if n >= terms:
                return SideResult(total, abs(nxt), n, False, "truncation", _burn_in(ratios),
                                  max(mag, abs(total)))
            prev, cur = cur, nxt


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    tag: str
    q: str
    digits: int
    lhs: str
    rhs: str
    difference: str
    lhs_terms: int
    rhs_terms: int
    lhs_tail: str
    rhs_tail: str
    lhs_burn_in: int
    rhs_burn_in: int
    passed: bool
    seconds: float

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def verify_identity(idt: Identity, q, ctx: PrecisionContext | None = None,
                    terms: int = DEFAULT_TERMS) -> VerificationReport:
    ctx = ctx or PrecisionContext()
    qf = parse_q(q)
    if not condition_holds(idt.params, qf):
        raise ConditionViolated(f"q = {qf} is outside the region {idt.condition}")
    start = time.perf_counter()
    work = ctx
    threshold = mpf(10) ** (-(ctx.digits - 5))
    for _ in range(3):
        lhs = lhs_side(idt, qf, work, terms)
        rhs = rhs_side(idt, qf, work, terms)
        mag = max(lhs.magnitude, rhs.magnitude, mpf(1))
        # rounding in the summation scales with the largest quantity seen
        needed = ctx.tail_guard + int(mpmath.ceil(mpmath.log10(mag))) + 2
        if needed <= work.tail_guard:
            break
        work = PrecisionContext(ctx.digits, needed)
    with work.workdps():
        diff = abs(lhs.value - rhs.value)
        ok = (lhs.converged and rhs.converged and diff < threshold
              and lhs.tail_bound < threshold and rhs.tail_bound < threshold)
        d = ctx.digits
        return VerificationReport(
            idt.tag, str(qf), d, _nstr(lhs.value, d), _nstr(rhs.value, d), _nstr(diff, 5),
            lhs.terms, rhs.terms, _nstr(lhs.tail_bound, 5), _nstr(rhs.tail_bound, 5),
            lhs.burn_in, rhs.burn_in, bool(ok), round(time.perf_counter() - start, 3))


@dataclass
class LimitReport:
    tag: str
    series_value: str
    target: str
    target_value: str
    difference: str
    terms: int
    ratio_match: bool
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def _degree(d: dict) -> int:
    return max(i for i, _ in d) if d else 0


def engine_classical_ratio(idt: Identity):
    return rf_classical_limit(idt.rhs_shift_quotient(), idt.L)


def ratios_agree(entry, r_engine=None) -> bool:
    """Exact check that the engine's q -> 1 term ratio at n equals the printed
    classical ratio at n + shift, as rational functions of n.  Both sides are
    rational of bounded degree, so agreement at enough regular points is an
    identity."""
    from .catalog import classical_ratio

    r = r_engine or engine_classical_ratio(entry.identity())
    s = entry.series
    deg_e = _degree(r.num) + _degree(r.den)
    deg_p = 2 * (len(s.upper) + len(s.lower) + 2 * (len(s.weight_num) + len(s.weight_den)))
    need = deg_e + deg_p + 1
    good = 0
    n = 0
    while good < need and n < 20 * need + 50:
        try:
            a = r(Fraction(n))
            b = classical_ratio(s, Fraction(n + entry.index_shift))
        except ZeroDivisionError:
            n += 1
            continue
        if a != b:
            return False
        good += 1
        n += 1
    return good >= need


def classical_limit_check(entry, ctx: PrecisionContext | None = None, terms: int = 4000) -> LimitReport:
    from .catalog import classical_term

    ctx = ctx or PrecisionContext(40)
    idt = entry.identity()
    r = engine_classical_ratio(idt)
    match = ratios_agree(entry, r)
    with ctx.workdps():
        head = sum((classical_term(entry.series, i) for i in range(entry.index_shift)), Fraction(0))
        first = classical_term(entry.series, entry.index_shift)
        tail = hyper_eval(ClassicalSeries(Fraction(0), (), (), scale=first, ratio=lambda m: r(m)),
                          terms, ctx)
        value = mpf(head.numerator) / head.denominator + tail.value
        target = entry.target.value()
        diff = abs(value - target)
        ok = match and tail.converged and diff < mpf(10) ** (-ctx.digits) * max(1, abs(target))
        d = ctx.digits
        return LimitReport(entry.tag, _nstr(value, d), str(entry.target), _nstr(target, d),
                           _nstr(diff, 5), tail.terms + entry.index_shift, bool(match), bool(ok))


# ---------------------------------------------------------------------------
# convergence measurements
# ---------------------------------------------------------------------------


def _terms_needed(partials, ref, digits: int) -> int | None:
    """Smallest N such that every partial sum from the N-th on is within
    10^-digits (relative) of the reference."""
    tol = mpf(10) ** (-digits) * max(1, abs(ref))
    need = None
    for i in range(len(partials) - 1, -1, -1):
        if abs(partials[i] - ref) < tol:
            need = i + 1
        else:
            break
    return need


@dataclass
class ConvergenceRow:
    digits: int
    lhs_terms: int | None
    rhs_terms: int | None


def convergence_report(idt: Identity, q, target_digits=(10, 20, 30, 40, 50),
                       terms: int = 4000) -> list[ConvergenceRow]:
    qf = parse_q(q)
    if not condition_holds(idt.params, qf):
        raise ConditionViolated(f"q = {qf} is outside the region {idt.condition}")
    top = max(target_digits)
    ctx = PrecisionContext(top + 20)
    with ctx.workdps():
        t = _t_of(qf, idt.L)
        pre = _mp(idt.prefactor.evaluate(t, 1, 1))
        lhs = lhs_side(idt, qf, ctx, terms)
        rhs_terms: list = []
        rhs = rhs_side(idt, qf, ctx, terms, collect=rhs_terms)
        # LHS partial sums from the series terms directly
        spec = numeric_phi_spec(idt.phi, t)
        lhs_partials = []
        s = mpf(0)
        for i, term in enumerate(_phi_terms(spec, lhs.terms + 1)):
            s += pre * term
            lhs_partials.append(s)
        rhs_partials = []
        s = mpf(0)
        for term in rhs_terms:
            s += term
            rhs_partials.append(s)
        rows = []
        for d in sorted(target_digits):
            rows.append(ConvergenceRow(d, _terms_needed(lhs_partials, lhs.value, d),
                                       _terms_needed(rhs_partials, rhs.value, d)))
        return rows


def _phi_terms(spec: PhiSeriesSpec, count: int):
    q = mpf(spec.base)
    z = mpf(spec.argument)
    up = [mpf(a) for a in spec.upper]
    lo = [mpf(b) for b in spec.lower]
    term = mpf(1)
    qn = mpf(1)
    for _ in range(count):
        yield term
        num = z
        for a in up:
            num *= 1 - a * qn
        den = 1 - qn * q
        for b in lo:
            den *= 1 - b * qn
        term = term * num / den
        qn *= q


def classical_rate(entry, low: int = 40, high: int = 80, reference: int = 100) -> float:
    """Measured digits per term of the engine's classical series between two
    accuracy levels, against a reference sum at higher precision."""
    from .catalog import classical_term

    idt = entry.identity()
    r = engine_classical_ratio(idt)
    ctx = PrecisionContext(reference)
    with ctx.workdps():
        first = classical_term(entry.series, entry.index_shift)
        ref = hyper_eval(ClassicalSeries(Fraction(0), (), (), scale=first, ratio=lambda m: r(m)),
                         20000, ctx).value
        partials = []
        s = mpf(0)
        term = mpf(first.numerator) / first.denominator
        n = 0
        while True:
            s += term
            partials.append(s)
            if abs(s - ref) < mpf(10) ** (-(high + 5)) * abs(ref) and n > 10:
                break
            v = r(n)
            term *= mpf(v.numerator) / v.denominator
            n += 1
        n_low = _terms_needed(partials, ref, low)
        n_high = _terms_needed(partials, ref, high)
        return (high - low) / (n_high - n_low)


# ---------------------------------------------------------------------------
# finite telescoping and printed displays
# ---------------------------------------------------------------------------


@dataclass
class TelescopeResult:
    N: int
    kbar: int
    lhs: mpf
    rhs: mpf
    difference: mpf


def telescoping_check(idt: Identity, N: int, kbar: int, q, ctx: PrecisionContext | None = None) -> TelescopeResult:
    """sum_{k<kbar} (F(N,k) - F(0,k)) against sum_{n<N} (G(n,kbar) - G(n,0))."""
    ctx = ctx or PrecisionContext(40)
    qf = parse_q(q)
    pair = idt.pair
    with ctx.workdps():
        lhs = mpf(0)
        for k in range(kbar):
            lhs += pair.fbar_eval(N, k, qf, ctx) - pair.fbar_eval(0, k, qf, ctx)
        rhs = mpf(0)
        for n in range(N):
            rhs += pair.gbar_eval(n, kbar, qf, ctx) - pair.gbar_eval(n, 0, qf, ctx)
        return TelescopeResult(N, kbar, lhs, rhs, abs(lhs - rhs))


@dataclass
class DisplayResult:
    display_lhs: mpf
    display_rhs: mpf
    from_engine_lhs: mpf
    from_engine_rhs: mpf
    passed: bool


def display_check(entry, q, ctx: PrecisionContext | None = None) -> DisplayResult:
    """Evaluate a printed, rearranged display at the identity base q and tie
    both of its sides to the engine's 3phi2 and RHS series."""
    if entry.display is None:
        raise ValueError(f"entry {entry.tag} has no printed display")
    ctx = ctx or PrecisionContext(40)
    idt = entry.identity()
    qf = parse_q(q)
    with ctx.workdps():
        t = _t_of(qf, idt.L)
        tol = ctx.eps
        dl = entry.display.lhs(t, tol)
        dr = entry.display.rhs(t, tol)
        phi = phi_eval(numeric_phi_spec(idt.phi, t), DEFAULT_TERMS, ctx).value
        rhs = rhs_side(idt, qf, ctx).value
        pre = _mp(idt.prefactor.evaluate(t, 1, 1))
        alpha, beta, gamma = entry.display.link(pre, t)
        el = alpha + beta * phi
        er = alpha + gamma * rhs
        thr = mpf(10) ** (-(ctx.digits - 5)) * max(1, abs(dl))
        ok = abs(dl - dr) < thr and abs(dl - el) < thr and abs(dr - er) < thr
        return DisplayResult(dl, dr, el, er, bool(ok))

"""First-order q-Zeilberger recurrences, normalization to q-WZ pairs, and
exact certification.

Conventions: X = q^n, K = q^k, q = t^L.  A recurrence (p1, p2, R) for F
means

    p1(X) F(n+1, k) - p2(X) F(n, k) = G(n, k+1) - G(n, k),  G = R F,

and a q-WZ pair (Fbar, Rbar) satisfies Fbar(n+1,k) - Fbar(n,k) = Gbar(n,k+1)
- Gbar(n,k) with Gbar = Rbar Fbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    ONE,
    ZERO,
    LaurentPoly,
    RationalFunction,
    factor_q_linear,
    rf_equal,
)
from .qterm import (
    PochFactor,
    QProperTerm,
    QuadForm,
    ShiftClosure,
    shift_quotient_k,
    shift_quotient_n,
    term_eval,
)
from .special import PrecisionContext, to_mpf

DEFAULT_DEGREE_CAP = 24
DEFAULT_SPAN_CAP = 64


class NotSummable(ValueError):
    pass


class InvalidTerm(ValueError):
    pass


class NoFirstOrder(ValueError):
    pass


class CertificationFailed(AssertionError):
    pass


class DegenerateParameters(ValueError):
    pass


# ---------------------------------------------------------------------------
# substitutions
# ---------------------------------------------------------------------------


def shift_K(p, L: int, h: int):
    """p(t, X, q^h K)."""
    return p.substitute_monomials({2: (1, (L * h, 0, 1))})


def shift_X(p, L: int, h: int):
    return p.substitute_monomials({1: (1, (L * h, 1, 0))})


def _q_monomial_exponent(ratio: RationalFunction, L: int) -> int | None:
    """j with ratio == q^j exactly, else None."""
    if not ratio.is_polynomial() or not ratio.num.is_monomial():
        return None
    (e, c), = ratio.num.terms().items()
    if c / ratio.den.constant_value() != 1 or e[1] or e[2] or e[0] % L:
        return None
    return e[0] // L


# ---------------------------------------------------------------------------
# linear algebra over Q(t, X)
# ---------------------------------------------------------------------------


def _content_of(polys) -> Fraction:
    num, den = 0, 1
    for x in polys:
        if x.is_zero():
            continue
        c = x.content()
        num = math.gcd(num, c.numerator)
        den = den * c.denominator // math.gcd(den, c.denominator)
    return Fraction(num, den)


def _reduce_row(row: list[LaurentPoly]) -> list[LaurentPoly]:
    # divide out the gcd of the entries, monomials and rational content included
    nz = [x for x in row if not x.is_zero()]
    if not nz:
        return row
    g = nz[0].poly_part()
    for x in nz[1:]:
        g = g.gcd(x)
        if g.is_constant():
            break
    shift = tuple(min(x.shift()[i] for x in nz) for i in range(3))
    unit = LaurentPoly.monomial(1, shift)
    if not g.is_constant():
        unit = unit * g
    out = [x if x.is_zero() else x.exact_div(unit) for x in row]
    c = _content_of(out)
    if c and c != 1:
        out = [x.scale(1 / c) for x in out]
    return out


def nullspace(rows: list[list[LaurentPoly]], ncols: int) -> list[list[RationalFunction]]:
    """Basis of the right nullspace of a matrix with entries in Q[t, X]
    (Laurent), by fraction-free Gauss-Jordan elimination."""
    rows = [list(r) for r in rows if any(not x.is_zero() for x in r)]
    rows = [_reduce_row(r) for r in rows]
    pivots: list[int] = []
    ri = 0
    for col in range(ncols):
        cand = [i for i in range(ri, len(rows)) if not rows[i][col].is_zero()]
        if not cand:
            continue
        p = min(cand, key=lambda i: (len(rows[i][col]), sum(len(x) for x in rows[i])))
        rows[ri], rows[p] = rows[p], rows[ri]
        piv = rows[ri][col]
        for i in range(len(rows)):
            if i == ri or rows[i][col].is_zero():
                continue
            a = rows[i][col]
            g = piv.gcd(a)
            m1 = piv.exact_div(g)
            m2 = a.exact_div(g)
            rows[i] = _reduce_row([m1 * x - m2 * y for x, y in zip(rows[i], rows[ri])])
        pivots.append(col)
        ri += 1
        if ri == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [RationalFunction.const(0) for _ in range(ncols)]
        vec[f] = RationalFunction.const(1)
        for i, pc in enumerate(pivots):
            if not rows[i][f].is_zero():
                vec[pc] = -RationalFunction(rows[i][f], ONE) / RationalFunction(rows[i][pc])
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# q-Gosper
# ---------------------------------------------------------------------------


def _k_factors(p: LaurentPoly) -> list[LaurentPoly]:
    if p.is_constant() or not p.uses(2):
        return []
    _, fs = p.factor()
    return [f for f, _ in fs if f.uses(2)]


def _shift_equivalence(f: LaurentPoly, g: LaurentPoly, L: int) -> int | None:
    """h with f(K) proportional to g(q^h K), over Q(t, X)."""
    fc = f.coefficients_in(2)
    gc = g.coefficients_in(2)
    if set(fc) != set(gc) or len(fc) < 2:
        return None
    d = max(fc)
    i = min(fc)
    ratio = RationalFunction(fc[i] * gc[d]) / RationalFunction(fc[d] * gc[i])
    e = _q_monomial_exponent(ratio, L)
    if e is None or (e % (i - d)):
        return None
    h = e // (i - d)
    gh = shift_K(g, L, h)
    ghc = gh.coefficients_in(2)
    if f * ghc[d] != gh * fc[d]:
        return None
    return h


def _k_content_free(g: LaurentPoly) -> LaurentPoly:
    cs = list(g.coefficients_in(2).values())
    c = cs[0].poly_part()
    for x in cs[1:]:
        c = c.gcd(x)
    if not c.is_constant():
        g = g.exact_div(c)
    return g.poly_part()


def dispersion_set(A: LaurentPoly, B: LaurentPoly, L: int) -> list[int]:
    hs = set()
    fa = _k_factors(A)
    fb = _k_factors(B)
    for f in fa:
        for g in fb:
            h = _shift_equivalence(f, g, L)
            if h is not None and h >= 0:
                hs.add(h)
    return sorted(hs)


def gosper_form(r: RationalFunction, L: int) -> tuple[LaurentPoly, LaurentPoly, LaurentPoly]:
    """A, B, C with r = A/B * C(qK)/C(K) and gcd(A(K), B(q^h K)) = 1 for h >= 0."""
    A, B, C = r.num, r.den, ONE
    for _ in range(200):
        hs = dispersion_set(A, B, L)
        if not hs:
            return A, B, C
        h = hs[0]
        g = A.gcd(shift_K(B, L, h))
        g = _k_content_free(g)
        if g.is_constant():
            raise RuntimeError("dispersion reported but gcd is trivial")
        A = A.exact_div(g)
        B = B.exact_div(shift_K(g, L, -h))
        for i in range(1, h + 1):
            C = C * shift_K(g, L, -i)
    raise RuntimeError("Gosper form did not stabilise")


def _k_degree_bounds(A, Bp, dC: int, lowC: int, L: int) -> tuple[int, int]:
    dA, dB = A.degree(2), Bp.degree(2)
    lA, lB = A.low_degree(2), Bp.low_degree(2)
    if dA != dB:
        hi = dC - max(dA, dB)
    else:
        hi = dC - dA
        a = A.coefficients_in(2)[dA]
        b = Bp.coefficients_in(2)[dB]
        j = _q_monomial_exponent(RationalFunction(b) / RationalFunction(a), L)
        if j is not None:
            hi = max(hi, j)
    if lA != lB:
        lo = lowC - min(lA, lB)
    else:
        lo = lowC - lA
        a = A.coefficients_in(2)[lA]
        b = Bp.coefficients_in(2)[lB]
        j = _q_monomial_exponent(RationalFunction(b) / RationalFunction(a), L)
        if j is not None:
            lo = min(lo, j)
    return lo, hi


def _collect_system(columns: list[LaurentPoly]) -> list[list[LaurentPoly]]:
    """Rows = coefficients of each power of K across the given columns."""
    split = [c.coefficients_in(2) for c in columns]
    powers = sorted(set().union(*[s.keys() for s in split]))
    return [[s.get(p, ZERO) for s in split] for p in powers]


def _y_columns(A, Bp, L, lo, hi) -> list[LaurentPoly]:
    cols = []
    for j in range(lo, hi + 1):
        Kj = LaurentPoly.monomial(1, (0, 0, j))
        cols.append(A * LaurentPoly.monomial(1, (L * j, 0, j)) - Bp * Kj)
    return cols


def _assemble_y(vec, lo: int) -> RationalFunction:
    Y = RationalFunction.const(0)
    for j, c in enumerate(vec):
        if not c.is_zero():
            Y = Y + c * RationalFunction(LaurentPoly.monomial(1, (0, 0, lo + j)))
    return Y


def q_gosper(r: RationalFunction, L: int = 1, span_cap: int = DEFAULT_SPAN_CAP) -> RationalFunction:
    """Certificate S(K) with S(qK) r(K) - S(K) = 1, i.e. G(k) = S(q^k) a(k)
    is an antidifference of the term a with shift quotient r."""
    if not isinstance(r, RationalFunction):
        raise InvalidTerm("shift quotient must be a rational function")
    if r.is_zero():
        raise InvalidTerm("zero shift quotient")
    A, B, C = gosper_form(r, L)
    Bp = shift_K(B, L, -1)
    lo, hi = _k_degree_bounds(A, Bp, C.degree(2), C.low_degree(2), L)
    if hi < lo or hi - lo + 1 > span_cap:
        raise NotSummable("degree bounds leave no room for a polynomial solution")
    cols = _y_columns(A, Bp, L, lo, hi) + [-C]
    basis = nullspace(_collect_system(cols), len(cols))
    for vec in basis:
        w = vec[-1]
        if w.is_zero():
            continue
        Y = _assemble_y([c / w for c in vec[:-1]], lo)
        S = RationalFunction(Bp) * Y / RationalFunction(C)
        if not (shift_K(S, L, 1) * r - S - 1).is_zero():
            raise CertificationFailed("Gosper certificate fails its own check")
        return S
    raise NotSummable("no polynomial solution of the Gosper equation")


# ---------------------------------------------------------------------------
# first-order q-Zeilberger
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Recurrence:
    p1: LaurentPoly
    p2: LaurentPoly
    R: RationalFunction

    def to_dict(self) -> dict:
        return {"p1": str(self.p1), "p2": str(self.p2), "R": str(self.R)}


def _lcm_den(vec: list[RationalFunction]) -> LaurentPoly:
    d = ONE
    for c in vec:
        if c.is_zero():
            continue
        g = d.gcd(c.den)
        d = d * c.den.exact_div(g) if not g.is_constant() else d * c.den
    return d


def _normalize_pair(p1: LaurentPoly, p2: LaurentPoly, R: RationalFunction):
    nz = [p for p in (p1, p2) if not p.is_zero()]
    g = nz[0].poly_part()
    for p in nz[1:]:
        g = g.gcd(p)
    shift = tuple(min(p.shift()[i] for p in nz) for i in range(3))
    unit = LaurentPoly.monomial(1, shift) * (g if not g.is_constant() else ONE)
    p1 = p1.exact_div(unit) if not p1.is_zero() else p1
    p2 = p2.exact_div(unit) if not p2.is_zero() else p2
    R = R / RationalFunction(unit)
    c = _content_of((p1, p2))
    lead = p2 if not p2.is_zero() else p1
    if lead.scale(1 / c).leading()[1] < 0:
        c = -c
    return p1.scale(1 / c), p2.scale(1 / c), R / RationalFunction.const(c)


def zeilberger_first_order(F, degree_cap: int = DEFAULT_DEGREE_CAP,
                           span_cap: int = DEFAULT_SPAN_CAP) -> Recurrence:
    """First-order recurrence in n with a rational certificate."""
    L = F.L
    sqn = shift_quotient_n(F)
    sqk = shift_quotient_k(F)
    Nn, Dn = sqn.num, sqn.den
    # b(k) = F(n,k)/Dn(K); its k-ratio
    rb = sqk * RationalFunction(Dn) / RationalFunction(shift_K(Dn, L, 1))
    A, B, C0 = gosper_form(rb, L)
    Bp = shift_K(B, L, -1)
    dP = max(Nn.degree(2), Dn.degree(2))
    lP = min(Nn.low_degree(2), Dn.low_degree(2))
    lo, hi = _k_degree_bounds(A, Bp, C0.degree(2) + dP, C0.low_degree(2) + lP, L)
    if hi < lo:
        lo = hi = 0
    if hi - lo + 1 > span_cap:
        raise NoFirstOrder("certificate ansatz exceeds the span cap")
    cols = _y_columns(A, Bp, L, lo, hi) + [-(C0 * Nn), C0 * Dn]
    basis = nullspace(_collect_system(cols), len(cols))
    best = None
    # pairwise sums cover the case where every basis vector has p1 = 0 or p2 = 0
    candidates = list(basis)
    if len(basis) > 1:
        candidates += [[x + y for x, y in zip(u, v)]
                       for i, u in enumerate(basis) for v in basis[i + 1:]]
    for vec in candidates:
        if vec[-1].is_zero() and vec[-2].is_zero():
            continue
        d = _lcm_den(vec)
        dr = RationalFunction(d)
        poly = [(c * dr) for c in vec]
        p1 = poly[-2].num
        p2 = poly[-1].num
        Y = _assemble_y(poly[:-2], lo)
        R = RationalFunction(Bp) * Y / (RationalFunction(C0) * RationalFunction(Dn))
        p1, p2, R = _normalize_pair(p1, p2, R)
        span = max(p.degree(1) - p.low_degree(1) if not p.is_zero() else 0 for p in (p1, p2))
        # a vanishing p1 or p2 cannot be normalized; prefer anything else
        key = (span, p1.is_zero() or p2.is_zero())
        if best is None or key < best[0]:
            best = (key, Recurrence(p1, p2, R))
    if best is None:
        raise NoFirstOrder("no first-order recurrence within the ansatz")
    rec = best[1]
    if best[0][0] > degree_cap:
        raise NoFirstOrder(f"recurrence X-degree {best[0][0]} exceeds the cap {degree_cap}")
    lhs = RationalFunction(rec.p1) * sqn - RationalFunction(rec.p2)
    rhs = shift_K(rec.R, L, 1) * sqk - rec.R
    if not (lhs - rhs).is_zero():
        raise CertificationFailed("recurrence does not satisfy its defining identity")
    return rec


# ---------------------------------------------------------------------------
# normalization to a q-WZ pair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QWZPair:
    fbar: object
    rbar: RationalFunction
    origin: Recurrence
    j: int = 0

    @property
    def L(self) -> int:
        return self.fbar.L

    def gbar_eval(self, n: int, k: int, q, ctx: PrecisionContext | None = None):
        ctx = ctx or PrecisionContext()
        with ctx.workdps():
            from .qterm import _t_of
            t = _t_of(q, self.L)
            qq = t ** self.L
            f = term_eval(self.fbar, n, k, q, ctx)
            return f * self.rbar.evaluate(t, qq ** n, qq ** k)

    def fbar_eval(self, n: int, k: int, q, ctx: PrecisionContext | None = None):
        return term_eval(self.fbar, n, k, q, ctx)


def normalization_start(p2: LaurentPoly, L: int) -> int:
    """Smallest j >= 0 with p2(q^i) != 0 for all i >= j."""
    if p2.is_zero():
        raise DegenerateParameters("p2 vanishes identically")
    fq = factor_q_linear(p2)
    j = 0
    for f in fq.factors:
        c, (a, xj, kj) = f.coefficient, f.exponents
        if f.multiplicity <= 0 or kj or xj == 0 or c != 1:
            continue
        # 1 - t^a X^xj vanishes at X = q^i when a + L xj i = 0
        if (-a) % (L * xj) == 0:
            i = -a // (L * xj)
            if i >= 0:
                j = max(j, i + 1)
    return j


def _closed_form(F: QProperTerm, p1: LaurentPoly, p2: LaurentPoly):
    """F(n,k) prod_{i<n} p1(q^i)/p2(q^i) as a QProperTerm, or None."""
    L = F.L
    sign_n = F.sign_n
    scale = F.scale_n
    qp = F.qpower
    factors = list(F.factors)
    for p, sgn in ((p1, 1), (p2, -1)):
        fq = factor_q_linear(p)
        if not fq.complete:
            return None
        u = fq.unit
        if u < 0:
            sign_n ^= 1
            u = -u
        scale = scale * u ** sgn
        a, xj, kj = fq.monomial
        if kj:
            return None
        # prod_{i<n} q^(a/L + xj i) = q^((a/L) n + xj binom(n, 2))
        qp = qp + QuadForm(alpha=Fraction(sgn * xj, 2),
                           delta=sgn * (Fraction(a, L) - Fraction(xj, 2)))
        for f in fq.factors:
            c, (fa, fx, fk) = f.coefficient, f.exponents
            if fk or fx < 0:
                return None
            factors.append((PochFactor(coef=c, u=0, v=0, w=Fraction(fa, L), s=fx,
                                       mu=1, nu=0, lam=0), sgn * f.multiplicity))
    return QProperTerm(L, sign_n, F.sign_k, qp, tuple(_merge_factors(factors)), F.coef, scale)


def _merge_factors(factors):
    merged: dict = {}
    order = []
    for f, e in factors:
        if f not in merged:
            order.append(f)
            merged[f] = 0
        merged[f] += e
    return [(f, merged[f]) for f in order if merged[f]]


def ekhad_normalize(F, rec: Recurrence, rederive: bool = True) -> QWZPair:
    """Rescale F so that the recurrence becomes a q-WZ difference equation."""
    L = F.L
    j = normalization_start(rec.p2, L)
    if j != 0:
        raise DegenerateParameters(
            f"p2 vanishes at X = q^{j - 1}; the normalization product would need to start at j = {j}")
    if rec.p1.is_zero():
        raise DegenerateParameters("p1 vanishes identically")
    m = RationalFunction(rec.p1) / RationalFunction(rec.p2)
    fbar = _closed_form(F, rec.p1, rec.p2) if isinstance(F, QProperTerm) else None
    if fbar is None:
        fbar = ShiftClosure(F, m)
    expected = shift_quotient_n(F) * m
    if not rf_equal(shift_quotient_n(fbar), expected):
        raise CertificationFailed("normalized term has the wrong n-shift quotient")
    rbar = rec.R / RationalFunction(rec.p2)
    if rederive:
        rec2 = zeilberger_first_order(fbar)
        if rec2.p1 != rec2.p2:
            raise CertificationFailed("normalized term does not satisfy a q-WZ equation")
        rbar2 = rec2.R / RationalFunction(rec2.p2)
        if not rf_equal(rbar, rbar2):
            raise CertificationFailed("re-derived certificate differs from the rescaled one")
        rbar = rbar2
    pair = QWZPair(fbar, rbar, rec, j)
    res = certify_wz(pair)
    if not res.is_zero():
        raise CertificationFailed(f"nonzero residual {res}")
    return pair


def certify_wz(pair: QWZPair) -> RationalFunction:
    """sq_n - 1 - Rbar(X, qK) sq_k + Rbar(X, K), normalized (zero iff valid)."""
    L = pair.L
    sqn = shift_quotient_n(pair.fbar)
    sqk = shift_quotient_k(pair.fbar)
    return sqn - 1 - shift_K(pair.rbar, L, 1) * sqk + pair.rbar

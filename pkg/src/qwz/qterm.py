"""q-proper hypergeometric terms F(n, k) and their shift quotients."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import flint
import mpmath
from mpmath import mpf

from .algebra import (
    ONE,
    LaurentPoly,
    RationalFunction,
    RootScale,
    to_fraction,
)
from .special import PrecisionContext, to_mpf


class NotProper(ValueError):
    """A shift of the term does not reduce to a rational correction."""


class UnbalancedLimit(ArithmeticError):
    """The q -> 1 limit of a term ratio is 0 or infinite."""


def _frac(x) -> Fraction:
    return to_fraction(x)


def _int_or_raise(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NotProper(f"{what} is not integral ({x})")
    return int(x)


@dataclass(frozen=True)
class QuadForm:
    """alpha n^2 + beta n k + gamma k^2 + delta n + eps k + zeta (exponent of q)."""

    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    gamma: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)
    eps: Fraction = Fraction(0)
    zeta: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "eps", "zeta"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    def value(self, n, k) -> Fraction:
        return (self.alpha * n * n + self.beta * n * k + self.gamma * k * k
                + self.delta * n + self.eps * k + self.zeta)

    def __add__(self, o: "QuadForm") -> "QuadForm":
        return QuadForm(self.alpha + o.alpha, self.beta + o.beta, self.gamma + o.gamma,
                        self.delta + o.delta, self.eps + o.eps, self.zeta + o.zeta)

    def coefficients(self) -> tuple[Fraction, ...]:
        return (self.alpha, self.beta, self.gamma, self.delta, self.eps, self.zeta)

    def is_zero(self) -> bool:
        return not any(self.coefficients())


@dataclass(frozen=True)
class PochFactor:
    """(c q^(u n + v k + w); q^s)_(mu n + nu k + lam).

    s = 0 is allowed and means the base 1, i.e. (1 - argument)^length.
    """

    coef: Fraction = Fraction(1)
    u: Fraction = Fraction(0)
    v: Fraction = Fraction(0)
    w: Fraction = Fraction(0)
    s: Fraction = Fraction(1)
    mu: int = 0
    nu: int = 1
    lam: int = 0

    def __post_init__(self):
        for name in ("coef", "u", "v", "w", "s"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.s < 0:
            raise ValueError("Pochhammer base exponent must be nonnegative")
        if self.coef == 0:
            raise ValueError("Pochhammer argument coefficient must be nonzero")

    def length(self, n: int, k: int) -> int:
        return self.mu * n + self.nu * k + self.lam

    # exact monomial c q^(u n + v k + w + s j) as a polynomial in t, X, K
    def _mono(self, L: int, j: Fraction, extra_n: Fraction = Fraction(0),
              extra_k: Fraction = Fraction(0)) -> LaurentPoly:
        te = _int_or_raise((self.w + self.s * j) * L, "t-exponent")
        xe = _int_or_raise(self.u + extra_n, "X-exponent")
        ke = _int_or_raise(self.v + extra_k, "K-exponent")
        return LaurentPoly.monomial(self.coef, (te, xe, ke))

    def _range(self, L: int, start_len: bool, lo: int, hi: int) -> RationalFunction:
        """prod_{j=lo}^{hi-1} (1 - A B^(len + j)) if start_len else (1 - A B^j).

        For hi < lo the product is inverted (generalized Pochhammer).
        """
        if hi == lo:
            return RationalFunction.const(1)
        if hi < lo:
            return self._range(L, start_len, hi, lo).inverse()
        out = ONE
        for j in range(lo, hi):
            if start_len:
                mono = self._mono(L, Fraction(self.lam + j), self.s * self.mu, self.s * self.nu)
            else:
                mono = self._mono(L, Fraction(j))
            out = out * (ONE - mono)
        return RationalFunction(out)

    def shift_quotient(self, L: int, direction: int) -> RationalFunction:
        """Ratio of the factor at (n+1, k) (direction 0) or (n, k+1) (direction 1)."""
        inc = self.u if direction == 0 else self.v
        step = self.mu if direction == 0 else self.nu
        if self.s == 0:
            if inc != 0:
                raise NotProper("base-1 factor with a shifting argument")
            r = 0
        else:
            rr = inc / self.s
            if rr.denominator != 1:
                raise NotProper(f"base q^{self.s} does not divide the increment {inc}")
            r = int(rr)
        if self.s * self.mu != int(self.s * self.mu) or self.s * self.nu != int(self.s * self.nu):
            raise NotProper("length form times base exponent is not integral")
        top = self._range(L, True, 0, step + r)
        bottom = self._range(L, False, 0, r)
        return top / bottom

    def text(self) -> str:
        arg = _qmono_text(self.coef, self.u, self.v, self.w)
        return f"({arg}; q^{self.s})_{{{_lin_text(self.mu, self.nu, self.lam)}}}"


def _lin_text(a, b, c) -> str:
    parts = []
    for coef, var in ((a, "n"), (b, "k")):
        if coef:
            parts.append(var if coef == 1 else f"{coef}{var}")
    if c or not parts:
        parts.append(str(c))
    return "+".join(parts).replace("+-", "-")


def _qmono_text(c, u, v, w) -> str:
    expo = _lin_text(u, v, w)
    head = "" if c == 1 else ("-" if c == -1 else f"{c}*")
    return f"{head}q^({expo})"


@dataclass(frozen=True)
class QProperTerm:
    """(-1)^(sign_n n + sign_k k) * coef * scale_n^n * q^Q(n,k) * prod Poch^e.

    factors holds (PochFactor, exponent) pairs; a negative exponent places
    the factor in the denominator.
    """

    L: int = 1
    sign_n: int = 0
    sign_k: int = 0
    qpower: QuadForm = field(default_factory=QuadForm)
    factors: tuple = ()
    coef: Fraction = Fraction(1)
    scale_n: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "coef", _frac(self.coef))
        object.__setattr__(self, "scale_n", _frac(self.scale_n))
        object.__setattr__(self, "sign_n", self.sign_n % 2)
        object.__setattr__(self, "sign_k", self.sign_k % 2)
        if self.scale_n <= 0:
            raise ValueError("scale_n must be positive; signs go to sign_n")
        for c in self.qpower.coefficients():
            if (c * self.L * self.L * 2).denominator != 1:
                raise NotProper("q-power coefficients are not compatible with L")

    @property
    def root_scale(self) -> RootScale:
        return RootScale(self.L)

    def with_L(self, L: int) -> "QProperTerm":
        if L % self.L:
            raise ValueError("new L must be a multiple of the old one")
        return replace(self, L=L)

    def shift_quotient_n(self) -> RationalFunction:
        return shift_quotient_n(self)

    def shift_quotient_k(self) -> RationalFunction:
        return shift_quotient_k(self)

    def evaluate(self, n, k, q, ctx=None):
        return term_eval(self, n, k, q, ctx)

    def text(self) -> str:
        parts = []
        if self.coef != 1:
            parts.append(str(self.coef))
        if self.sign_n or self.sign_k:
            parts.append(f"(-1)^({_lin_text(self.sign_n, self.sign_k, 0)})")
        if self.scale_n != 1:
            parts.append(f"({self.scale_n})^n")
        qp = self.qpower
        if not qp.is_zero():
            parts.append(f"q^({qp.alpha}n^2+{qp.beta}nk+{qp.gamma}k^2+{qp.delta}n+{qp.eps}k+{qp.zeta})")
        for f, e in self.factors:
            parts.append(f.text() + (f"^{e}" if e != 1 else ""))
        return " * ".join(parts) or "1"


def _quad_shift(qp: QuadForm, L: int, direction: int) -> LaurentPoly:
    # q^(Q(n+1,k) - Q(n,k)) or q^(Q(n,k+1) - Q(n,k)) as a monomial
    if direction == 0:
        xe, ke, const = 2 * qp.alpha, qp.beta, qp.alpha + qp.delta
    else:
        xe, ke, const = qp.beta, 2 * qp.gamma, qp.gamma + qp.eps
    return LaurentPoly.monomial(1, (_int_or_raise(const * L, "t-exponent"),
                                    _int_or_raise(xe, "X-exponent"),
                                    _int_or_raise(ke, "K-exponent")))


def _shift_quotient(F: QProperTerm, direction: int) -> RationalFunction:
    out = RationalFunction(_quad_shift(F.qpower, F.L, direction))
    sign = F.sign_n if direction == 0 else F.sign_k
    if sign:
        out = -out
    if direction == 0 and F.scale_n != 1:
        out = out * RationalFunction.const(F.scale_n)
    for f, e in F.factors:
        out = out * f.shift_quotient(F.L, direction) ** e
    return out


def shift_quotient_n(F) -> RationalFunction:
    """F(n+1, k)/F(n, k) as a rational function of (t, X, K)."""
    if not isinstance(F, QProperTerm):
        return F.shift_quotient_n()
    return _shift_quotient(F, 0)


def shift_quotient_k(F) -> RationalFunction:
    if not isinstance(F, QProperTerm):
        return F.shift_quotient_k()
    return _shift_quotient(F, 1)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _t_of(q, L: int):
    if isinstance(q, Fraction) or isinstance(q, int):
        q = to_mpf(q)
    return q if L == 1 else mpmath.root(q, L)


def term_eval(F, n: int, k: int, q, ctx: PrecisionContext | None = None):
    """Numeric F(n, k) at base q.

    The power of t is accumulated as an exact integer and applied once, so
    huge positive or negative q-exponents never pass through intermediate
    floating values.
    """
    if not isinstance(F, QProperTerm):
        return F.evaluate(n, k, q, ctx)
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        t = _t_of(q, F.L)
        L = F.L
        te = F.qpower.value(n, k) * L
        if te.denominator != 1:
            raise NotProper("q-power exponent is not integral in t at this point")
        val = mpf(1)
        if (F.sign_n * n + F.sign_k * k) % 2:
            val = -val
        val *= to_mpf(F.coef)
        if F.scale_n != 1:
            val *= to_mpf(F.scale_n) ** n
        for f, e in F.factors:
            m = f.length(n, k)
            if m < 0:
                raise ValueError("negative Pochhammer length on the evaluation domain")
            if m == 0:
                continue
            a_exp = (f.u * n + f.v * k + f.w) * L
            s_exp = f.s * L
            a = to_mpf(f.coef) * t ** int(a_exp)
            b = t ** int(s_exp)
            prod = mpf(1)
            x = a
            for _ in range(m):
                prod *= 1 - x
                x *= b
            val *= prod ** e
        return val * t ** int(te)


def term_exact(F, n: int, k: int) -> RationalFunction:
    """F(n, k) as an exact rational function of t."""
    if not isinstance(F, QProperTerm):
        return F.exact(n, k)
    L = F.L
    te = F.qpower.value(n, k) * L
    out = RationalFunction(LaurentPoly.monomial(F.coef * F.scale_n ** n, (int(te), 0, 0)))
    if (F.sign_n * n + F.sign_k * k) % 2:
        out = -out
    for f, e in F.factors:
        m = f.length(n, k)
        if m < 0:
            raise ValueError("negative Pochhammer length on the evaluation domain")
        prod = ONE
        for j in range(m):
            ex = (f.u * n + f.v * k + f.w + f.s * j) * L
            prod = prod * (ONE - LaurentPoly.monomial(f.coef, (int(ex), 0, 0)))
        out = out * RationalFunction(prod) ** e
    return out


@dataclass(frozen=True)
class ShiftClosure:
    """F(n, k) * prod_{i=0}^{n-1} m(q^i) for a rational multiplier m(t, X).

    Used when a normalization product does not split into q-Pochhammers.
    """

    base: QProperTerm
    multiplier: RationalFunction

    @property
    def L(self) -> int:
        return self.base.L

    def shift_quotient_n(self) -> RationalFunction:
        return shift_quotient_n(self.base) * self.multiplier

    def shift_quotient_k(self) -> RationalFunction:
        return shift_quotient_k(self.base)

    def evaluate(self, n, k, q, ctx=None):
        ctx = ctx or PrecisionContext()
        with ctx.workdps():
            t = _t_of(q, self.L)
            val = term_eval(self.base, n, k, q, ctx)
            qq = t ** self.L
            x = mpf(1)
            for _ in range(n):
                val *= self.multiplier.evaluate(t, x, None)
                x *= qq
            return val

    def exact(self, n, k) -> RationalFunction:
        out = term_exact(self.base, n, k)
        for i in range(n):
            out = out * _eval_multiplier(self.multiplier, self.L * i)
        return out

    def text(self) -> str:
        return f"{self.base.text()} * prod_(i<n) [{self.multiplier}](X=q^i)"


def _eval_multiplier(m: RationalFunction, t_exp: int) -> RationalFunction:
    img = {1: (1, (t_exp, 0, 0))}
    return m.substitute_monomials(img)


# ---------------------------------------------------------------------------
# classical limit
# ---------------------------------------------------------------------------

_NK = flint.fmpq_mpoly_ctx.get(("n", "k"), "deglex")


@dataclass(frozen=True)
class ClassicalRatio:
    """Rational function num(n, k)/den(n, k) with rational coefficients."""

    num: dict
    den: dict

    def __call__(self, n, k=0):
        def ev(d):
            total = 0
            for (i, j), c in d.items():
                total += c * (n ** i) * (k ** j)
            return total
        return ev(self.num) / ev(self.den)

    def limit_n(self) -> Fraction:
        """Value as n -> infinity at fixed k (leading n-degree coefficients)."""
        dn = max(i for i, _ in self.num)
        dd = max(i for i, _ in self.den)
        if dn != dd:
            raise UnbalancedLimit("ratio does not tend to a finite nonzero constant")
        a = sum(c for (i, j), c in self.num.items() if i == dn and j == 0)
        b = sum(c for (i, j), c in self.den.items() if i == dd and j == 0)
        return Fraction(a) / Fraction(b)

    def equals(self, other: "ClassicalRatio") -> bool:
        a = _NK.from_dict({e: flint.fmpq(c.numerator, c.denominator) for e, c in self.num.items()})
        b = _NK.from_dict({e: flint.fmpq(c.numerator, c.denominator) for e, c in self.den.items()})
        c = _NK.from_dict({e: flint.fmpq(v.numerator, v.denominator) for e, v in other.num.items()})
        d = _NK.from_dict({e: flint.fmpq(v.numerator, v.denominator) for e, v in other.den.items()})
        return a * d == b * c


def _u_expansion_leading(p: LaurentPoly, L: int):
    """Leading term of p(e^u, e^(L n u), e^(L k u)) in powers of u.

    Returns (order r, coefficient polynomial in n, k as an fmpq_mpoly).
    """
    if p.is_zero():
        raise UnbalancedLimit("zero polynomial in limit computation")
    terms = p.terms()
    n_, k_ = _NK.gens()
    lin = []
    for (i, j, m), c in terms.items():
        lin.append((flint.fmpq(c.numerator, c.denominator), i + L * j * n_ + L * m * k_))
    r = 0
    power = [_NK.from_dict({(0, 0): 1}) for _ in lin]
    fact = 1
    while r < 200:
        total = _NK.from_dict({})
        for (c, ell), pw in zip(lin, power):
            total += c * pw
        if not total.is_zero():
            return r, total / fact
        r += 1
        fact *= r
        power = [pw * ell for (c, ell), pw in zip(lin, power)]
    raise UnbalancedLimit("no nonvanishing order found in the u-expansion")


def rf_classical_limit(f: RationalFunction, L: int) -> ClassicalRatio:
    """lim_{q -> 1} of a rational function of (q^(1/L), q^n, q^k)."""
    rn, cn = _u_expansion_leading(f.num, L)
    rd, cd = _u_expansion_leading(f.den, L)
    if rn != rd:
        raise UnbalancedLimit(
            f"(1-q)-power mismatch: numerator order {rn}, denominator order {rd}")
    g = cn.gcd(cd)
    cn, cd = cn / g, cd / g
    num = {tuple(int(x) for x in e): _to_frac(c) for e, c in cn.to_dict().items()}
    den = {tuple(int(x) for x in e): _to_frac(c) for e, c in cd.to_dict().items()}
    return ClassicalRatio(num, den)


def _to_frac(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def classical_limit_ratio(F) -> tuple[ClassicalRatio, ClassicalRatio]:
    """q -> 1 limits of the n- and k-shift quotients of F."""
    return (rf_classical_limit(shift_quotient_n(F), F.L),
            rf_classical_limit(shift_quotient_k(F), F.L))


# ---------------------------------------------------------------------------
# serialization of term ASTs
# ---------------------------------------------------------------------------


def _fs(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def term_to_dict(F) -> dict:
    if isinstance(F, ShiftClosure):
        return {"kind": "closure", "base": term_to_dict(F.base), "multiplier": str(F.multiplier)}
    qp = F.qpower
    return {
        "kind": "proper",
        "L": F.L,
        "sign": [F.sign_n, F.sign_k],
        "coef": _fs(F.coef),
        "scale_n": _fs(F.scale_n),
        "qpower": [_fs(c) for c in qp.coefficients()],
        "factors": [
            {
                "arg": [_fs(f.coef), _fs(f.u), _fs(f.v), _fs(f.w)],
                "base": _fs(f.s),
                "length": [f.mu, f.nu, f.lam],
                "exponent": e,
            }
            for f, e in F.factors
        ],
    }


def term_from_dict(d: dict):
    from .algebra import parse_rf

    if d.get("kind") == "closure":
        return ShiftClosure(term_from_dict(d["base"]), parse_rf(d["multiplier"]))
    qp = QuadForm(*[Fraction(x) for x in d["qpower"]])
    factors = tuple(
        (PochFactor(Fraction(f["arg"][0]), Fraction(f["arg"][1]), Fraction(f["arg"][2]),
                    Fraction(f["arg"][3]), Fraction(f["base"]), *[int(v) for v in f["length"]]),
         int(f["exponent"]))
        for f in d["factors"]
    )
    return QProperTerm(int(d["L"]), int(d["sign"][0]), int(d["sign"][1]), qp, factors,
                       Fraction(d["coef"]), Fraction(d["scale_n"]))

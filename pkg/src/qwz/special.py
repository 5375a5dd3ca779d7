"""q-special functions and series evaluators.

Exact inputs (int, Fraction, LaurentPoly) give exact outputs; mpmath inputs
are evaluated at the precision set by a PrecisionContext.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import flint
import mpmath
from mpmath import mpf


class DomainError(ValueError):
    pass


class Divergent(ArithmeticError):
    pass


@dataclass(frozen=True)
class PrecisionContext:
    digits: int = 60
    tail_guard: int = 10

    def __post_init__(self):
        if self.digits < 10:
            raise ValueError("digits must be at least 10")
        if self.tail_guard < 1:
            raise ValueError("tail_guard must be positive")

    @property
    def working_digits(self) -> int:
        return self.digits + self.tail_guard

    def workdps(self):
        return mpmath.workdps(self.working_digits)

    @property
    def eps(self) -> mpf:
        return mpf(10) ** (-self.working_digits)


def to_mpf(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        if "/" in x:
            return to_mpf(Fraction(x))
        return mpf(x)
    return mpf(x)


# ---------------------------------------------------------------------------
# finite products
# ---------------------------------------------------------------------------


def qpoch(a, q, n: int):
    """(a; q)_n = (1 - a)(1 - aq)...(1 - aq^(n-1))."""
    if n < 0:
        raise ValueError("qpoch length must be nonnegative")
    out = 1
    power = a
    for _ in range(n):
        out = out * (1 - power)
        power = power * q
    return out


def qpoch_infinite(a, q, ctx: PrecisionContext | None = None) -> mpf:
    """(a; q)_inf truncated once the remaining factors are below the budget."""
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        a = to_mpf(a)
        q = to_mpf(q)
        if abs(q) >= 1:
            raise DomainError("infinite q-Pochhammer needs |q| < 1")
        if a == 0:
            return mpf(1)
        eps = ctx.eps
        out = mpf(1)
        power = a
        # tail: |log prod_{k>=N}(1 - a q^k)| <= 2|a q^N|/(1 - |q|) once |a q^N| <= 1/2
        while not (abs(power) <= mpf(1) / 2 and 2 * abs(power) / (1 - abs(q)) < eps):
            out *= 1 - power
            power *= q
        return +out


def qgamma(x, q, ctx: PrecisionContext | None = None) -> mpf:
    """Gamma_q(x) = (1-q)^(1-x) (q;q)_inf / (q^x;q)_inf for 0 < q < 1."""
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        x = to_mpf(x)
        q = to_mpf(q)
        if abs(q) >= 1:
            raise DomainError("q-Gamma needs |q| < 1")
        if x <= 0 and x == int(x):
            raise DomainError("q-Gamma has a pole at nonpositive integers")
        return (1 - q) ** (1 - x) * qpoch_infinite(q, q, ctx) / qpoch_infinite(q ** x, q, ctx)


def _qbracket_poly(n: int) -> flint.fmpz_poly:
    return flint.fmpz_poly([1] * n) if n > 0 else flint.fmpz_poly([0])


def _coeffs(p: flint.fmpz_poly) -> tuple[int, ...]:
    return tuple(int(c) for c in p.coeffs()) or (0,)


def _eval_coeffs(cs: Sequence[int], q):
    out = 0
    for c in reversed(cs):
        out = out * q + c
    return out


def qbracket(n: int, q=None):
    """[n]_q = (1 - q^n)/(1 - q); coefficient tuple (low to high) when q is None."""
    if n < 0:
        raise ValueError("qbracket needs n >= 0")
    cs = _coeffs(_qbracket_poly(n))
    return cs if q is None else _eval_coeffs(cs, q)


def qfactorial(n: int, q=None):
    if n < 0:
        raise ValueError("qfactorial needs n >= 0")
    p = flint.fmpz_poly([1])
    for i in range(1, n + 1):
        p *= _qbracket_poly(i)
    cs = _coeffs(p)
    return cs if q is None else _eval_coeffs(cs, q)


def qbinomial(n: int, k: int, q=None):
    """Gaussian binomial coefficient."""
    if k < 0 or k > n:
        raise IndexError(f"qbinomial({n}, {k}) needs 0 <= k <= n")
    num = flint.fmpz_poly([1])
    den = flint.fmpz_poly([1])
    for i in range(k):
        num *= _qbracket_poly(n - i)
        den *= _qbracket_poly(i + 1)
    quo, rem = divmod(num, den)
    assert rem == 0
    cs = _coeffs(quo)
    return cs if q is None else _eval_coeffs(cs, q)


def poch(a, n: int):
    """Rising factorial (a)_n."""
    out = 1
    for i in range(n):
        out = out * (a + i)
    return out


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesResult:
    value: mpf
    tail_bound: mpf
    terms: int
    converged: bool
    method: str = "truncation"
    ratios: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class PhiSeriesSpec:
    """j phi k series: upper/lower arguments, base q and argument z."""

    upper: tuple
    lower: tuple
    base: object
    argument: object

    @property
    def j(self) -> int:
        return len(self.upper)

    @property
    def k(self) -> int:
        return len(self.lower)

    @property
    def correction_power(self) -> int:
        # exponent of (-1)^n q^binom(n,2) in the definition
        return 1 + self.k - self.j


def _terminating_length(args, q) -> int | None:
    """Length after which terms vanish: an upper argument q^(-m) exactly."""
    best = None
    if not isinstance(q, (int, Fraction)) or q in (0, 1, -1):
        return None
    q = Fraction(q)
    for a in args:
        if not isinstance(a, (int, Fraction)) or a == 0:
            continue
        a = Fraction(a)
        m, p = 0, Fraction(1)
        # find m >= 0 with a * q^m = 1 (bounded search)
        while m <= 2000:
            if a * p == 1:
                best = m + 1 if best is None else min(best, m + 1)
                break
            p *= q
            m += 1
            if abs(a * p) > 10 ** 6 * max(1, abs(a)) and abs(q) > 1:
                break
            if abs(a * p) < Fraction(1, 10 ** 6) * min(1, abs(a)) and abs(q) < 1:
                break
    return best


def phi_eval(spec: PhiSeriesSpec, terms: int = 1000, ctx: PrecisionContext | None = None) -> SeriesResult:
    """Partial sum of a basic hypergeometric series with a rigorous tail bound.

    For |q| > 1 the term ratio tends to rho = z prod(a) / (q prod(b)) when
    j = k + 1; the tail is then estimated by the geometric series through the
    next term and the reported bound covers the deviation of later ratios
    from rho.  For |q| < 1 the ratio is bounded uniformly from the current
    index on and the tail is bounded by a dominating geometric series.
    """
    ctx = ctx or PrecisionContext()
    stop = _terminating_length(spec.upper, spec.base)
    with ctx.workdps():
        q = to_mpf(spec.base)
        z = to_mpf(spec.argument)
        up = [to_mpf(a) for a in spec.upper]
        lo = [to_mpf(b) for b in spec.lower]
        e = spec.correction_power
        eps = ctx.eps
        if abs(q) == 1 or q == 0:
            raise DomainError("base must satisfy q != 0 and |q| != 1")
        big_q = abs(q) > 1
        if big_q and e != 0:
            raise DomainError("only balanced-length series (j = k + 1) are supported for |q| > 1")
        total = mpf(0)
        term = mpf(1)
        qn = mpf(1)
        ratios = []
        rho = None
        if big_q:
            rho = z
            for a in up:
                rho *= a
            for b in lo:
                rho /= b
            rho /= q
            inv = [1 / a for a in up if a != 0] + [1 / q] + [1 / b for b in lo]
            csum = sum(abs(c) for c in inv)
        n = 0
        while True:
            if stop is not None and n >= stop:
                return SeriesResult(+total, mpf(0), n, True, "terminating", tuple(ratios))
            total += term
            # ratio t_{n+1}/t_n
            num = z
            for a in up:
                num *= 1 - a * qn
            den = 1 - qn * q
            for b in lo:
                den *= 1 - b * qn
            if den == 0:
                raise DomainError(f"lower argument hits a pole at index {n}")
            r = num / den
            if e:
                r *= (-qn) ** e
            ratios.append(r)
            nxt = term * r
            qn *= q
            n += 1
            scale = max(abs(total), mpf(1))
            if nxt == 0 and stop is None:
                return SeriesResult(+total, mpf(0), n, True, "terminating", tuple(ratios))
            if big_q:
                theta_n = abs(1 / qn)
                s = 2 * theta_n * csum
                if s < mpf(1) / 2 and abs(rho) < 1:
                    epsr = mpmath.expm1(s)
                    if abs(rho) * (1 + epsr) < 1:
                        est = nxt / (1 - rho)
                        bound = abs(nxt) * (1 / (1 - abs(rho) * (1 + epsr)) - 1 / (1 - abs(rho)))
                        if bound < eps * scale:
                            return SeriesResult(+(total + est), bound, n, True, "geometric-tail", tuple(ratios))
            else:
                R = _ratio_bound_small_q(up, lo, z, q, e, n)
                if R < 1:
                    bound = abs(nxt) / (1 - R)
                    if bound < eps * scale:
                        return SeriesResult(+total, bound, n, True, "truncation", tuple(ratios))
            term = nxt
            if n >= terms:
                window = [abs(x) for x in ratios[-10:]]
                if window and min(window) >= 1:
                    raise Divergent("term ratio modulus stays >= 1 over the probe window")
                return SeriesResult(+total, abs(term), n, False, "truncation", tuple(ratios))


def _ratio_bound_small_q(up, lo, z, q, e, n) -> mpf:
    # sup over m >= n of |t_{m+1}/t_m| for |q| < 1
    x = abs(q) ** n
    num = abs(z)
    for a in up:
        num *= 1 + abs(a) * x
    den = 1 - x * abs(q)
    for b in lo:
        den *= 1 - abs(b) * x
    if den <= 0:
        return mpf(2)
    r = num / den
    if e > 0:
        r *= x ** e
    elif e < 0:
        return mpf(2)
    return r


@dataclass(frozen=True)
class ClassicalSeries:
    """sum_n z^n prod (a_i)_n / prod (b_i)_n * w(n), with w = P(n)/Q(n).

    No implicit n!: include 1 among the lower parameters for the usual
    hypergeometric normalization.  Weights are integer/rational coefficient
    lists, lowest degree first.
    """

    argument: Fraction
    upper: tuple
    lower: tuple
    weight_num: tuple = (1,)
    weight_den: tuple = (1,)
    scale: object = 1
    ratio: Callable | None = field(default=None, compare=False)

    def weight(self, n):
        return _eval_coeffs(self.weight_num, n) / _eval_coeffs(self.weight_den, n)


def hyper_spec(upper, lower, argument) -> ClassicalSeries:
    """Plain rFs: the n! of the definition becomes an extra lower 1."""
    return ClassicalSeries(Fraction(argument), tuple(upper), tuple(lower) + (1,))


def hyper_eval(series: ClassicalSeries, terms: int = 2000, ctx: PrecisionContext | None = None) -> SeriesResult:
    """Partial sum of a classical hypergeometric-type series.

    Stops when the observed ratio over a probe window (and its limit |z|)
    stays below 1 and |next term| r/(1 - r) drops under the budget.
    """
    ctx = ctx or PrecisionContext()
    with ctx.workdps():
        z = to_mpf(series.argument)
        up = [to_mpf(a) for a in series.upper]
        lo = [to_mpf(b) for b in series.lower]
        eps = ctx.eps
        total = mpf(0)
        base = to_mpf(series.scale) if not isinstance(series.scale, mpf) else series.scale
        n = 0
        ratios: list = []
        if series.ratio is not None:
            term = base
        else:
            term = base * to_mpf(series.weight(Fraction(0)))
        while True:
            total += term
            if series.ratio is not None:
                r = to_mpf(series.ratio(n))
            else:
                r = z
                for a in up:
                    r *= a + n
                for b in lo:
                    if b + n == 0:
                        raise DomainError("lower parameter hits a nonpositive integer")
                    r /= b + n
                w0 = to_mpf(series.weight(Fraction(n)))
                w1 = to_mpf(series.weight(Fraction(n + 1)))
                if w0 == 0:
                    # restart from the weight directly
                    r = None
            if r is None:
                raise DomainError("weight vanishes; cannot form a term ratio")
            nxt = term * r if series.ratio is not None else term / w0 * w1 * r
            ratios.append(abs(nxt / term) if term != 0 else mpf(0))
            n += 1
            if nxt == 0:
                return SeriesResult(+total, mpf(0), n, True, "terminating")
            window = ratios[-8:]
            rmax = max(max(window), abs(z))
            if rmax < 1:
                bound = abs(nxt) / (1 - rmax)
                if bound < eps * max(abs(total), mpf(1)):
                    return SeriesResult(+total, bound, n, True, "truncation")
            term = nxt
            if n >= terms:
                if min(window) >= 1:
                    raise Divergent("classical term ratio stays >= 1")
                return SeriesResult(+total, abs(term), n, False, "truncation")

"""High-precision constants used as classical-limit targets.

Every constant is stored as a decimal literal of more than 120 significant
digits.  On first use the catalog audits each literal against two
independent computations (an in-repo algorithm and mpmath's own routine)
and refuses to hand out values that disagree at 100 digits.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mpf

AUDIT_DIGITS = 100

_LITERALS = {
    "pi": "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058",
    "catalan": "0.915965594177219015054603514932384110774149374281672134266498119621763019776254769479356512926115106248574422619196199579035898803325859",
    "log2": "0.693147180559945309417232121458176568075500134360255254120680009493393621969694715605863326996418687542001481020570685733685520235758131",
    "sqrt2": "1.41421356237309504880168872420969807856967187537694807317667973799073247846210703885038753432764157273501384623091229702492483605585074",
    "sqrt3": "1.73205080756887729352744634150587236694280525381038062805580697945193301690880003708114618675724857567562614141540670302996994509499895",
    "cbrt2": "1.25992104989487316476721060727822835057025146470150798008197511215529967651395948372939656243625509415431025603561566525939902404061374",
    "root4_2": "1.18920711500272106671749997056047591529297209246381741301900222471946666822691715987078134453813767371603739477476921318606372636178985",
    "gamma_1_3": "2.67893853470774763365569294097467764412868937795730110095042832759041761016774381954098288904118878941915904920007226333571908456950447",
    "gamma_1_4": "3.62560990822190831193068515586767200299516768288006546743337799956991924353872912161836013672338430036147175139242071996589152409402256",
    "gamma_1_6": "5.56631600178023520425009689520772611139879911487285346161674462632290750281780230550338965362102175465981963333846883477765769287980635",
}


class ConstantMismatch(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# independent algorithms (all evaluated at the caller's mpmath precision)
# ---------------------------------------------------------------------------


def _arctan_inv(x: int, scale: int) -> int:
    # arctan(1/x) * scale with integer arithmetic
    total = term = scale // x
    x2 = x * x
    n, sign = 1, -1
    while term:
        term //= x2
        total += sign * (term // (2 * n + 1))
        sign = -sign
        n += 1
    return total


def pi_machin(dps: int) -> mpf:
    guard = 20
    scale = 10 ** (dps + guard)
    v = 4 * (4 * _arctan_inv(5, scale) - _arctan_inv(239, scale))
    return mpf(v) / scale


def pi_agm(dps: int) -> mpf:
    # Gauss-Legendre iteration
    with mpmath.workdps(dps + 10):
        a, b, t, p = mpf(1), 1 / mpmath.sqrt(2), mpf(1) / 4, mpf(1)
        for _ in range(int(math.log2(dps)) + 4):
            an = (a + b) / 2
            b = mpmath.sqrt(a * b)
            t -= p * (a - an) ** 2
            a = an
            p *= 2
        return (a + b) ** 2 / (4 * t)


def log2_series(dps: int) -> mpf:
    # log 2 = sum 1/(k 2^k), integer fixed point
    scale = 10 ** (dps + 20)
    total, k, pow2 = 0, 1, 2
    while True:
        term = scale // (k * pow2)
        if not term:
            break
        total += term
        k += 1
        pow2 *= 2
    return mpf(total) / scale


def catalan_series(dps: int) -> mpf:
    # G = (pi/8) log(2 + sqrt 3) + (3/8) sum 1/((2n+1)^2 binom(2n, n))
    with mpmath.workdps(dps + 10):
        s = mpf(0)
        n = 0
        binom = 1
        eps = mpf(10) ** (-(dps + 8))
        while True:
            term = mpf(1) / ((2 * n + 1) ** 2 * binom)
            s += term
            if term < eps:
                break
            n += 1
            binom = binom * 2 * (2 * n - 1) // n
        return pi_machin(dps + 10) / 8 * mpmath.log(2 + mpmath.sqrt(3)) + 3 * s / 8


def integer_root(base: int, degree: int, dps: int) -> mpf:
    # floor(base^(1/degree) * 10^(dps+20)) by integer Newton iteration
    shift = dps + 20
    n = base * 10 ** (degree * shift)
    x = 1 << ((n.bit_length() + degree - 1) // degree)
    while True:
        y = ((degree - 1) * x + n // x ** (degree - 1)) // degree
        if y >= x:
            break
        x = y
    return mpf(x) / mpf(10) ** shift


def gamma_quarter_agm(dps: int) -> mpf:
    # Gamma(1/4)^2 = (2 pi)^(3/2) / AGM(1, sqrt 2)
    with mpmath.workdps(dps + 10):
        p = pi_agm(dps + 10)
        return mpmath.sqrt((2 * p) ** mpf(1.5) / mpmath.agm(1, mpmath.sqrt(2)))


def gamma_third_agm(dps: int) -> mpf:
    # Gamma(1/3)^3 = 2^(7/3) pi K(k) / 3^(1/4), k = sin 15 degrees,
    # with K(k) = pi / (2 AGM(1, cos 15 degrees))
    with mpmath.workdps(dps + 10):
        p = pi_agm(dps + 10)
        kp = (mpmath.sqrt(6) + mpmath.sqrt(2)) / 4
        kk = p / (2 * mpmath.agm(1, kp))
        return mpmath.cbrt(mpmath.cbrt(2) ** 7 * p * kk / mpmath.root(3, 4))


def gamma_sixth_relation(dps: int) -> mpf:
    # Gamma(1/6) = 2^(-1/3) sqrt(3/pi) Gamma(1/3)^2
    with mpmath.workdps(dps + 10):
        p = pi_agm(dps + 10)
        g3 = gamma_third_agm(dps + 10)
        return mpmath.sqrt(3 / p) * g3 ** 2 / mpmath.cbrt(2)


_ALGORITHMS: dict[str, tuple[str, Callable[[int], mpf], Callable[[int], mpf]]] = {
    "pi": ("Machin arctan series; Gauss-Legendre AGM", pi_machin, pi_agm),
    "catalan": ("central-binomial series with log(2+sqrt 3); mpmath.catalan",
                catalan_series, lambda d: _mp(d, lambda: +mpmath.catalan)),
    "log2": ("sum 1/(k 2^k); mpmath.log", log2_series, lambda d: _mp(d, lambda: mpmath.log(2))),
    "sqrt2": ("integer Newton root; mpmath.sqrt", lambda d: integer_root(2, 2, d),
              lambda d: _mp(d, lambda: mpmath.sqrt(2))),
    "sqrt3": ("integer Newton root; mpmath.sqrt", lambda d: integer_root(3, 2, d),
              lambda d: _mp(d, lambda: mpmath.sqrt(3))),
    "cbrt2": ("integer Newton root; mpmath.cbrt", lambda d: integer_root(2, 3, d),
              lambda d: _mp(d, lambda: mpmath.cbrt(2))),
    "root4_2": ("integer Newton root; mpmath.root", lambda d: integer_root(2, 4, d),
                lambda d: _mp(d, lambda: mpmath.root(2, 4))),
    "gamma_1_3": ("elliptic-integral AGM relation; mpmath.gamma", gamma_third_agm,
                  lambda d: _mp(d, lambda: mpmath.gamma(mpf(1) / 3))),
    "gamma_1_4": ("lemniscatic AGM relation; mpmath.gamma", gamma_quarter_agm,
                  lambda d: _mp(d, lambda: mpmath.gamma(mpf(1) / 4))),
    "gamma_1_6": ("duplication relation through Gamma(1/3); mpmath.gamma", gamma_sixth_relation,
                  lambda d: _mp(d, lambda: mpmath.gamma(mpf(1) / 6))),
}


def _mp(dps: int, fn):
    with mpmath.workdps(dps + 10):
        return fn()


@dataclass(frozen=True)
class AuditRow:
    name: str
    provenance: str
    agree_a: float
    agree_b: float
    ok: bool


def _agreement(x: mpf, y: mpf) -> float:
    d = abs(x - y)
    if d == 0:
        return float("inf")
    return float(-mpmath.log10(d / abs(x)))


@dataclass
class ConstantsCatalog:
    """Named constants backed by audited literals."""

    _audited: bool = field(default=False, init=False)
    _rows: list = field(default_factory=list, init=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    names = tuple(_LITERALS)

    def literal(self, name: str) -> str:
        return _LITERALS[name]

    def audit(self, digits: int = AUDIT_DIGITS) -> list[AuditRow]:
        with self._lock:
            if self._audited and digits <= AUDIT_DIGITS:
                return list(self._rows)
            rows = []
            with mpmath.workdps(digits + 15):
                for name, (prov, alg_a, alg_b) in _ALGORITHMS.items():
                    lit = mpf(_LITERALS[name])
                    a = alg_a(digits + 5)
                    b = alg_b(digits + 5)
                    ga, gb = _agreement(lit, a), _agreement(lit, b)
                    rows.append(AuditRow(name, prov, ga, gb, ga >= digits and gb >= digits))
            if digits <= AUDIT_DIGITS:
                self._rows = rows
                self._audited = True
            return rows

    def get(self, name: str) -> mpf:
        """Value at the current mpmath precision (at most the literal's length)."""
        if not self._audited:
            bad = [r.name for r in self.audit() if not r.ok]
            if bad:
                raise ConstantMismatch(f"constants failed audit: {bad}")
        return mpf(_LITERALS[name])


CATALOG = ConstantsCatalog()


# ---------------------------------------------------------------------------
# symbolic products of constants (classical-limit targets)
# ---------------------------------------------------------------------------

_SYMBOLS = {
    "pi": "\\pi",
    "G": "G",
    "log2": "\\log 2",
    "Gamma(1/3)": "\\Gamma(1/3)",
    "Gamma(1/4)": "\\Gamma(1/4)",
    "Gamma(1/6)": "\\Gamma(1/6)",
}
_CATALOG_NAME = {
    "pi": "pi",
    "G": "catalan",
    "log2": "log2",
    "Gamma(1/3)": "gamma_1_3",
    "Gamma(1/4)": "gamma_1_4",
    "Gamma(1/6)": "gamma_1_6",
}


@dataclass(frozen=True)
class ConstantExpr:
    """coefficient * 2^e2 * 3^e3 * prod(symbol^exponent)."""

    coefficient: Fraction
    pow2: Fraction = Fraction(0)
    pow3: Fraction = Fraction(0)
    factors: tuple[tuple[str, Fraction], ...] = ()

    def value(self) -> mpf:
        v = mpf(self.coefficient.numerator) / self.coefficient.denominator
        if self.pow2:
            v *= _rational_power(2, self.pow2)
        if self.pow3:
            v *= _rational_power(3, self.pow3)
        for sym, e in self.factors:
            base = CATALOG.get(_CATALOG_NAME[sym])
            v *= base ** (mpf(e.numerator) / e.denominator) if e.denominator != 1 else base ** e.numerator
        return v

    def __str__(self):
        parts = [str(self.coefficient)]
        if self.pow2:
            parts.append(f"2^({self.pow2})")
        if self.pow3:
            parts.append(f"3^({self.pow3})")
        for sym, e in self.factors:
            parts.append(sym if e == 1 else f"{sym}^({e})")
        return " * ".join(parts)

    def latex(self) -> str:
        num, den = [], []
        c = self.coefficient
        if c.numerator != 1 or (not self.factors and not self.pow2 and not self.pow3):
            num.append(str(abs(c.numerator)))
        if c.denominator != 1:
            den.append(str(c.denominator))
        for base, e in (("2", self.pow2), ("3", self.pow3)):
            if e:
                (num if e > 0 else den).append(_latex_power(base, abs(e)))
        for sym, e in self.factors:
            (num if e > 0 else den).append(_latex_power(_SYMBOLS[sym], abs(e)))
        top = " ".join(num) or "1"
        sign = "-" if c < 0 else ""
        return f"{sign}\\frac{{{top}}}{{{' '.join(den)}}}" if den else sign + top


def _latex_power(base: str, e: Fraction) -> str:
    if e == 1:
        return base
    return f"{base}^{{{e}}}"


def _rational_power(base: int, e: Fraction) -> mpf:
    if e.denominator == 1:
        return mpf(base) ** e.numerator
    return mpmath.root(base, e.denominator) ** e.numerator


def parse_constant_expr(text: str) -> ConstantExpr:
    """Inverse of str(ConstantExpr)."""
    parts = [p.strip() for p in text.split("*")]
    coef = Fraction(parts[0])
    pow2 = pow3 = Fraction(0)
    factors = []
    for p in parts[1:]:
        if "^(" in p:
            base, exp = p.split("^(", 1)
            exp = Fraction(exp.rstrip(")"))
        else:
            base, exp = p, Fraction(1)
        if base == "2":
            pow2 = exp
        elif base == "3":
            pow3 = exp
        elif base in _SYMBOLS:
            factors.append((base, exp))
        else:
            raise ValueError(f"unknown constant {base!r}")
    return ConstantExpr(coef, pow2, pow3, tuple(factors))


def cexpr(coef, pow2=0, pow3=0, **factors) -> ConstantExpr:
    """Shorthand: cexpr(8, pow3=Fraction(1, 2), pi=-1)."""
    names = {"pi": "pi", "G": "G", "log2": "log2", "g3": "Gamma(1/3)",
             "g4": "Gamma(1/4)", "g6": "Gamma(1/6)"}
    fs = tuple((names[k], Fraction(v)) for k, v in factors.items() if v)
    return ConstantExpr(Fraction(coef), Fraction(pow2), Fraction(pow3), fs)

"""Known accelerated q-series identities and the classical formulas they
reduce to as q -> 1."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction as Fr
from typing import Callable

import mpmath
from mpmath import mpf

from .constants import ConstantExpr, cexpr
from .identity import Family, Identity, build_identity
from .special import ClassicalSeries

h = Fr(1, 2)


@dataclass(frozen=True)
class DisplayFixture:
    """A two-sided q-series display stated in a rearranged form.

    ``lhs(t)`` and ``rhs(t)`` evaluate both printed sides at q = t (the
    display's own base, which is q^(1/L) of the identity).  ``link`` returns
    (alpha, beta, gamma) with display lhs = alpha + beta * phi and display
    rhs = alpha + gamma * engine rhs, tying the display to the engine identity.
    """

    lhs: Callable
    rhs: Callable
    link: Callable


@dataclass
class CatalogEntry:
    tag: str
    family: Family
    params: tuple
    description: str
    series: ClassicalSeries
    target: ConstantExpr
    # engine RHS term n corresponds to the printed classical term n + index_shift
    index_shift: int = 0
    display: DisplayFixture | None = None
    _identity: Identity | None = field(default=None, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def identity(self) -> Identity:
        with self._lock:
            if self._identity is None:
                self._identity = build_identity(self.family, *self.params, tag=self.tag,
                                                classical_target=self.target)
            return self._identity


def _series(z, upper, lower, wnum, wden=(1,)) -> ClassicalSeries:
    return ClassicalSeries(Fr(z), tuple(Fr(x) for x in upper), tuple(Fr(x) for x in lower),
                           tuple(Fr(c) for c in wnum), tuple(Fr(c) for c in wden))


# -- printed displays -------------------------------------------------------


def _poch(a, b, n):
    r = mpf(1)
    x = a
    for _ in range(n):
        r *= 1 - x
        x *= b
    return r


def _sum(term, tol):
    """Sum a series whose terms eventually decay at least geometrically."""
    total = mpf(0)
    small = 0
    n = 0
    while True:
        v = term(n)
        total += v
        small = small + 1 if abs(v) < tol * max(abs(total), 1) else 0
        if small >= 5:
            return total
        n += 1
        if n > 5000:
            raise ArithmeticError("display series failed to converge")


def _ram4_lhs(t, tol):
    phi = _sum(lambda n: t ** (2 * n) * _poch(t, t ** 2, n) ** 2 / _poch(t ** 4, t ** 2, n) ** 2, tol)
    return t - 1 + (t - 1) / (t + 1) ** 2 * phi


def _ram4_rhs(t, tol):
    def term(n):
        b = _poch(t, t ** 2, n) ** 3 * _poch(t ** 3, t ** 2, n) / _poch(t ** 2, t ** 2, n) ** 2
        return (t ** (2 * n) * b * (t ** (4 * n + 1) + t ** (2 * n) - 2)
                / (_poch(t ** 4, t ** 4, n) * _poch(t ** 6, t ** 4, n)))
    return _sum(term, tol)


def _ram4_link(pre, t):
    beta = (t - 1) / (t + 1) ** 2
    return t - 1, beta, beta / pre


def _bbp_lhs(t, tol):
    s = _sum(lambda n: t ** (2 * n) * _poch(t, t ** 2, n) / _poch(t ** 2, t ** 2, n)
             / (1 - t ** (2 * n + 1)), tol)
    return t * (1 - t ** 2) * s


def _bbp_rhs(t, tol):
    def term(n):
        p = (1 - t ** (6 * n + 4) - t ** (8 * n + 3) - t ** (8 * n + 4)
             + t ** (10 * n + 5) + t ** (12 * n + 6))
        return ((-1) ** n * t ** (-n * n - n) * _poch(t, t ** 2, n) * _poch(t ** 2, t ** 2, n)
                / (_poch(t ** 4, t ** 4, n) * _poch(t ** 6, t ** 4, n))
                * p / ((1 - t ** (4 * n + 1)) * (1 - t ** (4 * n + 3))))
    return _sum(term, tol)


def _bbp_link(pre, t):
    # the summand here is the 3phi2 summand divided by (1 - t)
    beta = t * (1 + t)
    return mpf(0), beta, beta / pre


RAM4_DISPLAY = DisplayFixture(_ram4_lhs, _ram4_rhs, _ram4_link)
BBP_DISPLAY = DisplayFixture(_bbp_lhs, _bbp_rhs, _bbp_link)


Q, NQ, Q2, R64, N27 = (Family.QUARTER, Family.NEG_QUARTER, Family.QUARTER2,
                       Family.RATE64, Family.NEG27)
r4, nr4, r64, nr27 = Fr(1, 4), Fr(-1, 4), Fr(1, 64), Fr(-1, 27)
t3 = Fr(1, 3)
s6 = Fr(1, 6)


def _entries() -> list[CatalogEntry]:
    E = CatalogEntry
    return [
        # rate 1/4 from the first input family
        E("ramanujan4", Q, (h, h, 2, 2), "Ramanujan's rate 1/4 series for 4/pi",
          _series(r4, (h, h, h), (1, 1, 1), (1, 6)), cexpr(4, pi=-1), 1, RAM4_DISPLAY),
        E("fabry-guillera", Q, (h, h, Fr(3, 2), Fr(3, 2)), "Fabry-Guillera series for pi^2/4",
          _series(r4, (1, 1, 1), (Fr(3, 2),) * 3, (2, 3)), cexpr(r4, pi=2)),
        E("apery", Q, (1, 1, 2, 2), "Apery-type series for pi^2/9",
          _series(r4, (1,), (Fr(3, 2),), (1,), (1, 1)), cexpr(Fr(1, 9), pi=2)),
        E("catalan6", Q, (h, 1, Fr(3, 2), Fr(3, 2)), "Chu-Zhang series for 6G",
          _series(r4, (1, 1), (Fr(5, 4), Fr(7, 4)), (5, 6), (1, 2)), cexpr(6, G=1)),
        E("sqrt3-eight-thirds", Q, (-h, s6, t3, 1), "rate 1/4 series for 8 sqrt(3)/3",
          _series(r4, (s6, Fr(5, 6), Fr(3, 2)), (t3, 1, Fr(4, 3)), (1, 18)),
          cexpr(Fr(8, 3), pow3=h)),
        E("gamma13-a", Q, (t3, t3, 1, 1), "rate 1/4 Gamma(1/3)^3 series, weight 9n+2",
          _series(r4, (Fr(2, 3),) * 3, (1, 1, Fr(7, 6)), (2, 9)), cexpr(Fr(3, 2), g3=3, pi=-2)),
        E("gamma13-b", Q, (s6, s6, 1, 1), "rate 1/4 Gamma(1/3)^3 series, weight 18n+5",
          _series(r4, (Fr(5, 6),) * 3, (1, 1, Fr(4, 3)), (5, 18)),
          cexpr(1, Fr(4, 3), h, g3=3, pi=-2)),
        E("gamma16", Q, (t3, -h, 1, s6), "rate 1/4 Gamma(1/6)^3 series, weight 18n-1",
          _series(r4, (-s6, Fr(2, 3), Fr(3, 2)), (s6, 1, Fr(7, 6)), (-1, 18)),
          cexpr(-t3, Fr(-2, 3), g6=3, pi=Fr(-3, 2))),
        # rate -1/4
        E("bbp", NQ, (h, h, Fr(3, 2), 1), "BBP-type alternating series for pi",
          _series(nr4, (), (), (10, 42, 40), (3, 22, 48, 32)), cexpr(1, pi=1), 0, BBP_DISPLAY),
        E("catalan18", NQ, (h, 1, Fr(3, 2), Fr(3, 2)), "rate -1/4 series for 18G",
          _series(nr4, (h, 1, 1, 1), (Fr(5, 4), Fr(5, 4), Fr(7, 4), Fr(7, 4)), (19, 56, 40)),
          cexpr(18, G=1)),
        E("pi2-two-thirds", NQ, (1, 1, 2, 2), "rate -1/4 series for 2 pi^2/3",
          _series(nr4, (1,), (Fr(3, 2),), (7, 10), (1, 3, 2)), cexpr(Fr(2, 3), pi=2)),
        E("pi2-three-eighths", NQ, (1, 1, Fr(3, 2), 2), "rate -1/4 series for 3 pi^2/8",
          _series(nr4, (1, 1), (Fr(5, 4), Fr(7, 4)), (4, 5), (1, 2)), cexpr(Fr(3, 8), pi=2)),
        E("pi2-three-eighths-b", NQ, (h, h, Fr(3, 2), Fr(3, 2)),
          "second q-analogue of the rate -1/4 series for 3 pi^2/8",
          _series(nr4, (1, 1), (Fr(5, 4), Fr(7, 4)), (4, 5), (1, 2)), cexpr(Fr(3, 8), pi=2)),
        E("sqrt3-sixtyfour-thirds", NQ, (s6, s6, Fr(2, 3), 1), "rate -1/4 series for 64 sqrt(3)/3",
          _series(nr4, (Fr(5, 12), Fr(5, 6), Fr(11, 12)), (Fr(2, 3), 1, Fr(5, 3)), (43, 60)),
          cexpr(Fr(64, 3), pow3=h)),
        E("cbrt2-twenty-thirds", NQ, (t3, s6, 1, Fr(5, 6)), "rate -1/4 series for 20 2^(1/3)/3",
          _series(nr4, (r4, Fr(2, 3), Fr(3, 4)), (Fr(11, 12), 1, Fr(17, 12)), (9, 20)),
          cexpr(Fr(20, 3), t3)),
        E("log2-sixteen", NQ, (h, 1, Fr(3, 2), 2), "rate -1/4 series for 16 log 2",
          _series(nr4, (Fr(3, 4), 1, Fr(5, 4)), (Fr(3, 2),) * 3, (13, 20)), cexpr(16, log2=1)),
        E("sqrt2-sixteen", NQ, (Fr(3, 4), r4, Fr(3, 2), 1), "rate -1/4 series for 16 sqrt(2)",
          _series(nr4, (Fr(1, 8), Fr(5, 8), Fr(3, 4)), (1, Fr(3, 2), Fr(3, 2)), (23, 40)),
          cexpr(16, h)),
        E("gamma14-a", NQ, (Fr(3, 4), 1, Fr(3, 2), Fr(3, 2)), "rate -1/4 Gamma(1/4)^4 series",
          _series(nr4, (Fr(3, 8), Fr(7, 8), 1), (Fr(9, 8), Fr(5, 4), Fr(13, 8)), (19, 40)),
          cexpr(Fr(5, 16), g4=4, pi=-1)),
        E("gamma14-b", NQ, (r4, r4, 1, 1), "rate -1/4 Gamma(1/4)^2 series, weight 40n+21",
          _series(nr4, (Fr(3, 8), Fr(3, 4), Fr(7, 8)), (1, 1, Fr(3, 2)), (21, 40)),
          cexpr(8, g4=2, pi=Fr(-3, 2))),
        E("gamma13-c", NQ, (h, Fr(5, 6), 1, 2), "rate -1/4 reciprocal Gamma(1/3)^3 series",
          _series(nr4, (Fr(3, 4), Fr(7, 6), Fr(5, 4)), (1, Fr(4, 3), 2), (21, 20)),
          cexpr(t3, Fr(25, 3), pi=1, g3=-3)),
        E("gamma14-c", NQ, (Fr(3, 4), h, 1, Fr(3, 2)), "rate -1/4 Gamma(1/4)^2 series, weight 5n+3",
          _series(nr4, (Fr(3, 8), h, Fr(15, 8)), (Fr(9, 8), Fr(13, 8), Fr(7, 4)), (3, 5)),
          cexpr(Fr(15, 28), -h, g4=2, pi=-h)),
        E("gamma13-d", NQ, (Fr(3, 2), s6, 2, 1), "rate -1/4 Gamma(1/3)^3 series, weight 20n+17",
          _series(nr4, (-r4, r4, Fr(5, 6)), (1, Fr(5, 3), 2), (17, 20)),
          cexpr(Fr(1, 5), Fr(14, 3), h, g3=3, pi=-2)),
        E("gamma14-d", NQ, (-h, r4, 1, h), "rate -1/4 reciprocal Gamma(1/4)^2 series",
          _series(nr4, (h, Fr(5, 4), Fr(3, 2)), (Fr(3, 4), Fr(11, 8), Fr(15, 8)), (4, 5)),
          cexpr(Fr(21, 2), -h, pi=Fr(3, 2), g4=-2)),
        E("gamma13-e", NQ, (h, s6, 1, 1), "rate -1/4 Gamma(1/3)^3 series, weight 4n+3",
          _series(nr4, (r4, Fr(3, 4), Fr(5, 6)), (1, 1, Fr(5, 3)), (3, 4)),
          cexpr(Fr(1, 5), Fr(11, 3), -h, g3=3, pi=-2)),
        # rate 1/4 from the second input family
        E("fabry-guillera-b", Q2, (1, 1, Fr(3, 2), 2), "second q-analogue of the Fabry-Guillera series",
          _series(r4, (1, 1, 1), (Fr(3, 2),) * 3, (2, 3)), cexpr(r4, pi=2)),
        E("sqrt2-three-quarters", Q2, (r4, r4, 1, Fr(3, 4)), "rate 1/4 series for 3 sqrt(2)/4",
          _series(r4, (r4, h, h), (Fr(7, 8), 1, Fr(11, 8)), (1, 3)), cexpr(Fr(3, 4), h)),
        E("sqrt3-eight-thirds-b", Q2, (-h, s6, 1, t3), "second rate 1/4 series for 8 sqrt(3)/3",
          _series(r4, (-h, s6, Fr(5, 6)), (Fr(2, 3), 1, Fr(5, 3)), (5, 18)),
          cexpr(Fr(8, 3), pow3=h)),
        E("sqrt3-five-halves", Q2, (s6, h, 1, Fr(5, 6)), "rate 1/4 series for 5 sqrt(3)/2",
          _series(r4, (t3, h, Fr(2, 3)), (Fr(11, 12), 1, Fr(17, 12)), (4, 9)),
          cexpr(Fr(5, 2), pow3=h)),
        E("cbrt2-twentyseven-quarters", Q2, (t3, Fr(5, 6), 1, Fr(3, 2)),
          "rate 1/4 series for 27 2^(1/3)/4",
          _series(r4, (Fr(2, 3), Fr(5, 6), Fr(7, 6)), (1, Fr(5, 4), Fr(7, 4)), (7, 9)),
          cexpr(Fr(27, 4), t3)),
        E("cbrt2-nine", Q2, (t3, Fr(5, 6), Fr(3, 2), 1), "rate 1/4 series for 9 2^(1/3)",
          _series(r4, (s6, Fr(2, 3), Fr(5, 6)), (1, Fr(3, 2), Fr(3, 2)), (11, 18)), cexpr(9, t3)),
        E("cbrt2-five-sixths", Q2, (s6, t3, 1, Fr(5, 6)), "rate 1/4 series for 5 2^(1/3)/6",
          _series(r4, (s6, h, Fr(2, 3)), (Fr(11, 12), 1, Fr(17, 12)), (1, 3)),
          cexpr(Fr(5, 6), t3)),
        E("gamma14-e", Q2, (h, -h, Fr(3, 4), 1), "rate 1/4 reciprocal Gamma(1/4)^4 series",
          _series(r4, (-h, h, Fr(3, 2)), (Fr(3, 4), 1, Fr(7, 4)), (1, 3)),
          cexpr(12, pi=2, g4=-4)),
        E("gamma13-f", Q2, (h, -h, Fr(5, 6), 1), "rate 1/4 reciprocal Gamma(1/3)^6 series",
          _series(r4, (-h, h, Fr(3, 2)), (Fr(5, 6), 1, Fr(11, 6)), (7, 18)),
          cexpr(5, Fr(11, 3), pi=3, g3=-6)),
        E("gamma13-g", Q2, (h, Fr(5, 6), 2, 1), "rate 1/4 reciprocal Gamma(1/3)^3 series",
          _series(r4, (s6, h, Fr(5, 6)), (1, Fr(5, 3), 2), (13, 18)),
          cexpr(1, Fr(19, 3), pi=1, g3=-3)),
        E("gamma13-h", Q2, (-h, h, t3, 1), "rate 1/4 Gamma(1/3)^6 series, weight 18n+1",
          _series(r4, (-h, h, Fr(3, 2)), (t3, 1, Fr(4, 3)), (1, 18)),
          cexpr(-1, Fr(-5, 3), g3=6, pi=-3)),
        E("gamma13-i", Q2, (-h, t3, 1, s6), "rate 1/4 Gamma(1/3)^6 series, weight 9n-1",
          _series(r4, (-h, -s6, Fr(2, 3)), (Fr(7, 12), 1, Fr(13, 12)), (-1, 9)),
          cexpr(-1, Fr(-14, 3), h, g3=6, pi=-3)),
        # rate 1/64
        E("zeilberger64", R64, (1, 1, 2, 2), "Zeilberger's rate 1/64 series for 4 pi^2/3",
          _series(r64, (1, 1, 1), (Fr(3, 2),) * 3, (13, 21)), cexpr(Fr(4, 3), pi=2)),
        E("pi-nine-quarters", R64, (h, h, 1, Fr(3, 2)), "rate 1/64 series for 9 pi/4",
          _series(r64, (1, h, h, h), (Fr(5, 4), Fr(5, 4), Fr(7, 4), Fr(7, 4)), (7, 42, 75, 42)),
          cexpr(Fr(9, 4), pi=1)),
        E("gamma13-j", R64, (h, s6, 1, 1), "rate 1/64 Gamma(1/3)^3 series, weight 126n+85",
          _series(r64, (h, Fr(5, 6), Fr(5, 6)), (1, 1, Fr(5, 3)), (85, 126)),
          cexpr(1, Fr(14, 3), h, g3=3, pi=-2)),
        # rate -1/27
        E("pi-fifteen-eighths", N27, (h, h, Fr(3, 2), 1), "rate -1/27 series for 15 pi/8",
          _series(nr27, (1, h), (Fr(7, 6), Fr(11, 6)), (6, 7)), cexpr(Fr(15, 8), pi=1)),
        E("pi2-half", N27, (1, 1, 2, 2), "rate -1/27 series for pi^2/2",
          _series(nr27, (1, 1), (Fr(4, 3), Fr(5, 3)), (5, 7), (1, 2)), cexpr(h, pi=2)),
        E("catalan30", N27, (1, h, Fr(3, 2), Fr(3, 2)), "rate -1/27 series for 30G",
          _series(nr27, (1, 1), (Fr(7, 6), Fr(11, 6)), (83, 192, 112), (3, 16, 16)),
          cexpr(30, G=1)),
    ]


_CATALOG: list[CatalogEntry] | None = None
_CATALOG_LOCK = threading.Lock()


def catalog() -> list[CatalogEntry]:
    global _CATALOG
    with _CATALOG_LOCK:
        if _CATALOG is None:
            _CATALOG = _entries()
        return list(_CATALOG)


def lookup(tag: str) -> CatalogEntry:
    for e in catalog():
        if e.tag == tag:
            return e
    raise KeyError(f"no catalog entry tagged {tag!r}")


def classical_term(series: ClassicalSeries, n: int) -> Fr:
    """Exact n-th term of a classical series with rational data."""
    v = Fr(series.argument) ** n
    for a in series.upper:
        for i in range(n):
            v *= a + i
    for b in series.lower:
        for i in range(n):
            v /= b + i
    return v * _poly(series.weight_num, n) / _poly(series.weight_den, n)


def classical_ratio(series: ClassicalSeries, n) -> Fr:
    r = Fr(series.argument)
    for a in series.upper:
        r *= a + n
    for b in series.lower:
        r /= b + n
    return r * _poly(series.weight_num, n + 1) * _poly(series.weight_den, n) / (
        _poly(series.weight_num, n) * _poly(series.weight_den, n + 1))


def _poly(cs, n) -> Fr:
    v = Fr(0)
    for c in reversed(cs):
        v = v * n + c
    return v

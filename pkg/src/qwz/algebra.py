"""Exact arithmetic over Q in the variables t, X and K.

Throughout the package q = t^L for a fixed positive integer L, X stands for
q^n and K for q^k.  Polynomials are Laurent in every variable; the backing
store is a flint multivariate polynomial plus an exponent shift, so that the
stored polynomial is never divisible by a variable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import flint

VARS = ("t", "X", "K")
_CTX = flint.fmpq_mpoly_ctx.get(VARS, "deglex")
_ZERO3 = (0, 0, 0)


class ZeroDenominator(ZeroDivisionError):
    """Raised when a rational function is built over the zero polynomial."""


class ParseError(ValueError):
    pass


def to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    if isinstance(c, flint.fmpz):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c.strip())
    return Fraction(c)


def _fmpq(c) -> flint.fmpq:
    c = to_fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _mono_key(e: tuple[int, int, int]) -> tuple:
    # graded lex on (t, X, K); larger keys come first in canonical order
    return (e[0] + e[1] + e[2], e[0], e[1], e[2])


def _add3(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _sub3(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _raw_monomial(e) -> flint.fmpq_mpoly:
    return _CTX.from_dict({tuple(e): 1})


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Immutable Laurent polynomial in t, X, K with rational coefficients."""

    __slots__ = ("_p", "_s", "_str")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        if not terms:
            self._set(_CTX.from_dict({}), _ZERO3)
            return
        clean = {}
        for e, c in terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != 3:
                raise ValueError("exponent tuples must have three entries")
            c = to_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        clean = {e: c for e, c in clean.items() if c}
        if not clean:
            self._set(_CTX.from_dict({}), _ZERO3)
            return
        low = tuple(min(e[i] for e in clean) for i in range(3))
        poly = _CTX.from_dict({_sub3(e, low): _fmpq(c) for e, c in clean.items()})
        self._set(poly, low)

    def _set(self, poly, shift):
        self._p = poly
        self._s = tuple(shift)
        self._str = None

    @classmethod
    def _raw(cls, poly, shift=_ZERO3) -> "LaurentPoly":
        """Wrap a flint polynomial, pulling any monomial factor into the shift."""
        obj = cls.__new__(cls)
        if poly.is_zero():
            obj._set(poly, _ZERO3)
            return obj
        monos = list(poly.monoms())
        low = tuple(int(min(m[i] for m in monos)) for i in range(3))
        if low != _ZERO3:
            poly = poly / _raw_monomial(low)
            shift = _add3(shift, low)
        obj._set(poly, shift)
        return obj

    # construction helpers
    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({_ZERO3: c})

    @classmethod
    def monomial(cls, c, exps) -> "LaurentPoly":
        return cls({tuple(exps): c})

    # basic queries
    def terms(self) -> dict[tuple[int, int, int], Fraction]:
        s = self._s
        return {
            (int(e[0]) + s[0], int(e[1]) + s[1], int(e[2]) + s[2]): to_fraction(c)
            for e, c in self._p.to_dict().items()
        }

    def sorted_terms(self) -> list[tuple[tuple[int, int, int], Fraction]]:
        return sorted(self.terms().items(), key=lambda ec: _mono_key(ec[0]), reverse=True)

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_monomial(self) -> bool:
        return len(self._p) == 1

    def is_constant(self) -> bool:
        return self.is_zero() or (self.is_monomial() and self._s == _ZERO3 and
                                  self._p.degrees() == (0, 0, 0))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms().get(_ZERO3, Fraction(0))

    def __len__(self) -> int:
        return len(self._p)

    def leading(self) -> tuple[tuple[int, int, int], Fraction]:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def degree(self, var: int) -> int:
        return max(e[var] for e in self.terms())

    def low_degree(self, var: int) -> int:
        return min(e[var] for e in self.terms())

    def uses(self, var: int) -> bool:
        return any(e[var] for e in self.terms())

    def coefficients_in(self, var: int) -> dict[int, "LaurentPoly"]:
        """Split into coefficient polynomials with respect to one variable."""
        out: dict[int, dict] = {}
        for e, c in self.terms().items():
            rest = list(e)
            rest[var] = 0
            out.setdefault(e[var], {})[tuple(rest)] = c
        return {k: LaurentPoly(v) for k, v in out.items()}

    # arithmetic
    def _aligned(self, other: "LaurentPoly"):
        s = tuple(min(self._s[i], other._s[i]) for i in range(3))
        a = self._p * _raw_monomial(_sub3(self._s, s))
        b = other._p * _raw_monomial(_sub3(other._s, s))
        return a, b, s

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b, s = self._aligned(other)
        return LaurentPoly._raw(a + b, s)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(-self._p, self._s)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return LaurentPoly()
        obj = LaurentPoly.__new__(LaurentPoly)
        obj._set(self._p * other._p, _add3(self._s, other._s))
        return obj

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n >= 0:
            obj = LaurentPoly.__new__(LaurentPoly)
            obj._set(self._p ** n, tuple(n * v for v in self._s))
            return obj
        if not self.is_monomial():
            raise ValueError("negative power of a non-monomial Laurent polynomial")
        (e, c), = self.terms().items()
        return LaurentPoly({tuple(n * v for v in e): c ** n})

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Division that must leave no remainder (Laurent monomials are units)."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        q = self._p / other._p
        return LaurentPoly._raw(q, _sub3(self._s, other._s))

    def scale(self, c) -> "LaurentPoly":
        return self * LaurentPoly.const(c)

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._s == other._s and self._p == other._p

    def __hash__(self):
        return hash(str(self))

    # structure
    def poly_part(self) -> "LaurentPoly":
        """The same polynomial with its monomial factor removed."""
        obj = LaurentPoly.__new__(LaurentPoly)
        obj._set(self._p, _ZERO3)
        return obj

    def shift(self) -> tuple[int, int, int]:
        return self._s

    def gcd(self, other: "LaurentPoly") -> "LaurentPoly":
        """Monic gcd in the Laurent ring (monomial factors are units)."""
        if self.is_zero():
            return other.poly_part().monic()
        if other.is_zero():
            return self.poly_part().monic()
        return LaurentPoly._raw(self._p.gcd(other._p)).monic()

    def monic(self) -> "LaurentPoly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading()[1])

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators over lcm of denominators)."""
        cs = list(self.terms().values())
        if not cs:
            return Fraction(0)
        num = 0
        den = 1
        for c in cs:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "LaurentPoly":
        if self.is_zero():
            return self
        return self.scale(1 / self.content())

    def factor(self) -> tuple[Fraction, list[tuple["LaurentPoly", int]]]:
        """Irreducible factorization of the polynomial part; monomial factor is
        left out (callers recover it from shift())."""
        c, fs = self._p.factor()
        return to_fraction(c), [(LaurentPoly._raw(f), int(e)) for f, e in fs]

    def substitute_monomials(self, images: Mapping[int, tuple]) -> "LaurentPoly":
        """Replace variable i by coef * t^a X^b K^c, images[i] = (coef, (a, b, c))."""
        out: dict[tuple, Fraction] = {}
        for e, c in self.terms().items():
            new_e = [0, 0, 0]
            coef = c
            for i in range(3):
                if e[i] == 0:
                    new_e[i] += 0
                    continue
                if i in images:
                    ic, ie = images[i]
                    ic = to_fraction(ic)
                    coef *= ic ** e[i]
                    for j in range(3):
                        new_e[j] += ie[j] * e[i]
                else:
                    new_e[i] += e[i]
            key = tuple(new_e)
            out[key] = out.get(key, Fraction(0)) + coef
        return LaurentPoly(out)

    def evaluate(self, t=None, X=None, K=None):
        """Evaluate at given values; variables left as None must not occur."""
        vals = (t, X, K)
        total = None
        cache: dict[tuple[int, int], object] = {}
        for e, c in self.terms().items():
            term = c
            for i, ex in enumerate(e):
                if ex == 0:
                    continue
                if vals[i] is None:
                    raise ValueError(f"variable {VARS[i]} occurs but no value given")
                key = (i, ex)
                if key not in cache:
                    cache[key] = vals[i] ** ex
                term = term * cache[key]
            total = term if total is None else total + term
        if total is None:
            return Fraction(0)
        return total

    def evaluate_partial(self, t=None, X=None, K=None) -> "LaurentPoly":
        """Substitute exact rational values for some variables."""
        vals = (t, X, K)
        out: dict[tuple, Fraction] = {}
        for e, c in self.terms().items():
            coef = c
            new_e = list(e)
            for i in range(3):
                if vals[i] is not None:
                    coef *= to_fraction(vals[i]) ** e[i]
                    new_e[i] = 0
            key = tuple(new_e)
            out[key] = out.get(key, Fraction(0)) + coef
        return LaurentPoly(out)

    # text form
    def __str__(self):
        if self._str is None:
            self._str = format_poly(self)
        return self._str

    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x)
    return NotImplemented


T = LaurentPoly.monomial(1, (1, 0, 0))
X = LaurentPoly.monomial(1, (0, 1, 0))
K = LaurentPoly.monomial(1, (0, 0, 1))
ONE = LaurentPoly.const(1)
ZERO = LaurentPoly()


def format_coefficient(c: Fraction) -> str:
    c = abs(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        mono = f"t^{e[0]}*X^{e[1]}*K^{e[2]}"
        body = f"{format_coefficient(c)}*{mono}"
        if i == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


_TERM_RE = re.compile(
    r"\s*([+-])?\s*(\d+)(?:/(\d+))?\*t\^(-?\d+)\*X\^(-?\d+)\*K\^(-?\d+)\s*"
)


def parse_poly(text: str) -> LaurentPoly:
    text = text.strip()
    if text == "0":
        return LaurentPoly()
    pos = 0
    terms: dict[tuple, Fraction] = {}
    first = True
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse polynomial at offset {pos}: {text[pos:pos + 30]!r}")
        sign, num, den, i, j, k = m.groups()
        if sign is None and not first:
            raise ParseError("missing operator between terms")
        c = Fraction(int(num), int(den) if den else 1)
        if sign == "-":
            c = -c
        e = (int(i), int(j), int(k))
        terms[e] = terms.get(e, Fraction(0)) + c
        pos = m.end()
        first = False
    if first:
        raise ParseError("empty polynomial text")
    return LaurentPoly(terms)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Canonical quotient num/den of Laurent polynomials.

    The denominator is a genuine polynomial (no variable divides it, no
    negative exponents), gcd-free with the numerator and monic in its
    graded-lex leading term.  All monomial content lives in the numerator.
    """

    __slots__ = ("num", "den", "_str")

    def __init__(self, num, den=None, *, _canonical=False):
        num = _as_poly(num) if not isinstance(num, LaurentPoly) else num
        if den is None:
            den = ONE
        den = _as_poly(den) if not isinstance(den, LaurentPoly) else den
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("rational function parts must be polynomials or rationals")
        self._str = None
        if _canonical:
            self.num, self.den = num, den
            return
        if den.is_zero():
            raise ZeroDenominator("denominator polynomial is identically zero")
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        shift = _sub3(num.shift(), den.shift())
        a = num.poly_part()
        b = den.poly_part()
        if not b.is_constant():
            g = a.gcd(b)
            if not g.is_constant():
                a = a.exact_div(g)
                b = b.exact_div(g)
        lc = b.leading()[1]
        a = a.scale(1 / lc)
        b = b.scale(1 / lc)
        self.num = a * LaurentPoly.monomial(1, shift)
        self.den = b

    @classmethod
    def const(cls, c) -> "RationalFunction":
        return cls(LaurentPoly.const(c), _canonical=True)

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RationalFunction":
        return cls(p, ONE, _canonical=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def __add__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RationalFunction(ZERO)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n, _canonical=True) \
            if n > 0 else RationalFunction.const(1)

    def __eq__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(str(self))

    def substitute_monomials(self, images) -> "RationalFunction":
        return RationalFunction(self.num.substitute_monomials(images),
                                self.den.substitute_monomials(images))

    def evaluate(self, t=None, X=None, K=None):
        d = self.den.evaluate(t, X, K)
        if d == 0:
            raise ZeroDivisionError("rational function evaluated at a pole")
        return self.num.evaluate(t, X, K) / d

    def evaluate_partial(self, t=None, X=None, K=None) -> "RationalFunction":
        d = self.den.evaluate_partial(t, X, K)
        if d.is_zero():
            raise ZeroDivisionError("partial evaluation hits a pole")
        return RationalFunction(self.num.evaluate_partial(t, X, K), d)

    def __str__(self):
        if self._str is None:
            self._str = f"({format_poly(self.num)})/({format_poly(self.den)})"
        return self._str

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFunction(x)
    if isinstance(x, (int, Fraction)):
        return RationalFunction.const(x)
    return NotImplemented


def rf_normalize(f: RationalFunction) -> RationalFunction:
    """Canonical representative; construction already normalizes, so this
    simply rebuilds from the parts."""
    return RationalFunction(f.num, f.den)


def rf_equal(f: RationalFunction, g: RationalFunction) -> bool:
    return (_as_rf(f) - _as_rf(g)).is_zero()


def parse_rf(text: str) -> RationalFunction:
    text = text.strip()
    m = re.fullmatch(r"\((.*)\)/\((.*)\)", text, flags=re.S)
    if m:
        return RationalFunction(parse_poly(m.group(1)), parse_poly(m.group(2)))
    return RationalFunction(parse_poly(text))


# ---------------------------------------------------------------------------
# Root scale
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootScale:
    """q = t^L with L the lcm of the denominators of all q-exponents in use."""

    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be a positive integer")

    @classmethod
    def for_exponents(cls, exps: Iterable) -> "RootScale":
        L = 1
        for e in exps:
            d = to_fraction(e).denominator
            L = L * d // math.gcd(L, d)
        return cls(L)

    def t_exponent(self, q_exp) -> int:
        v = to_fraction(q_exp) * self.L
        if v.denominator != 1:
            raise ValueError(f"q^{q_exp} is not a power of t under L = {self.L}")
        return int(v)

    def qpow(self, q_exp, coef=1) -> LaurentPoly:
        """c * q^e as a polynomial in t."""
        return LaurentPoly.monomial(coef, (self.t_exponent(q_exp), 0, 0))


# ---------------------------------------------------------------------------
# Factorization into q-linear factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QLinearFactor:
    """(1 - coefficient * t^i X^j K^m) raised to multiplicity."""

    coefficient: Fraction
    exponents: tuple[int, int, int]
    multiplicity: int = 1

    def poly(self) -> LaurentPoly:
        return ONE - LaurentPoly.monomial(self.coefficient, self.exponents)


@dataclass(frozen=True)
class QLinearFactorization:
    unit: Fraction
    monomial: tuple[int, int, int]
    factors: tuple[QLinearFactor, ...]
    remainder: LaurentPoly

    def expand(self) -> RationalFunction:
        out = RationalFunction(LaurentPoly.monomial(self.unit, self.monomial))
        for f in self.factors:
            out = out * RationalFunction(f.poly()) ** f.multiplicity
        return out * RationalFunction(self.remainder)

    @property
    def complete(self) -> bool:
        return self.remainder.is_constant()


def _orient_positive(v: tuple[int, int, int]) -> bool:
    # priority K, then X, then t
    for i in (2, 1, 0):
        if v[i]:
            return v[i] > 0
    return True


def _integer_root(n: int, d: int):
    if n < 0:
        if d % 2 == 0:
            return None
        r = _integer_root(-n, d)
        return None if r is None else -r
    r = round(n ** (1.0 / d)) if n < 2 ** 1000 else None
    if r is None:
        lo, hi = 0, 1
        while hi ** d <= n:
            hi *= 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid ** d <= n:
                lo = mid
            else:
                hi = mid - 1
        r = lo
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** d == n:
            return cand
    return None


def _rational_root(c: Fraction, d: int):
    a = _integer_root(c.numerator, d)
    b = _integer_root(c.denominator, d)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


def _euler_phi(n: int) -> int:
    res, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            res -= res // p
        p += 1
    if m > 1:
        res -= res // m
    return res


def _as_q_linear(f: LaurentPoly, mult: int) -> list[QLinearFactor] | None:
    """Recognise an irreducible factor as a product of (1 - c*monomial)^(+-1).

    Binomials are direct; longer factors are tried as Phi_d(lambda*y) for a
    monomial y, which expands through Moebius inversion.
    """
    terms = f.terms()
    if len(terms) == 2:
        (e1, c1), (e2, c2) = terms.items()
        v = _sub3(e2, e1)
        if not _orient_positive(v):
            e1, c1, e2, c2 = e2, c2, e1, c1
            v = _sub3(e2, e1)
        return [QLinearFactor(-c2 / c1, v, mult)]
    if len(terms) < 3:
        return None
    items = list(terms.items())
    # base point: the term that is minimal along the common direction
    e0 = items[0][0]
    diffs = [_sub3(e, e0) for e, _ in items[1:]]
    g = 0
    for dvec in diffs:
        for x in dvec:
            g = math.gcd(g, abs(x))
    ref = next(dvec for dvec in diffs if any(dvec))
    rg = math.gcd(math.gcd(abs(ref[0]), abs(ref[1])), abs(ref[2]))
    v = tuple(x // rg for x in ref)
    if not _orient_positive(v):
        v = tuple(-x for x in v)
    steps = {}
    for e, c in items:
        dvec = _sub3(e, e0)
        s = None
        for i in range(3):
            if v[i]:
                if dvec[i] % v[i]:
                    return None
                s = dvec[i] // v[i]
                break
        if tuple(s * x for x in v) != dvec:
            return None
        steps[s] = c
    smin = min(steps)
    coeffs = {s - smin: c for s, c in steps.items()}
    D = max(coeffs)
    c0 = coeffs.get(0)
    if not c0:
        return None
    coeffs = {s: c / c0 for s, c in coeffs.items()}
    lam = None
    for sign in (1, -1):
        r = _rational_root(abs(coeffs[D]), D)
        if r is None:
            return None
        cand = sign * r
        if cand ** D == coeffs[D]:
            lam = cand
            # try this lambda against cyclotomic polynomials of degree D
            for d in range(2, 2 * D * D + 3):
                if _euler_phi(d) != D:
                    continue
                cyc = [int(x) for x in flint.fmpz_poly.cyclotomic(d).coeffs()]
                if all(coeffs.get(i, Fraction(0)) == cyc[i] * lam ** i for i in range(D + 1)):
                    out = []
                    for e in range(1, d + 1):
                        if d % e:
                            continue
                        mu = _mobius(d // e)
                        if mu:
                            out.append(QLinearFactor(lam ** e, tuple(e * x for x in v), mu * mult))
                    return out
    return None


def factor_q_linear(p: LaurentPoly) -> QLinearFactorization:
    """Split p into unit * monomial * prod (1 - c t^i X^j K^m)^e * remainder."""
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    unit, fs = p.factor()
    mono = p.shift()
    factors: list[QLinearFactor] = []
    remainder = ONE
    for f, e in fs:
        # normalise so the constant-side term is 1 when recognised
        got = _as_q_linear(f, e)
        if got is None:
            remainder = remainder * f ** e
            continue
        expanded = ONE
        for qf in got:
            if qf.multiplicity > 0:
                expanded = expanded * qf.poly() ** qf.multiplicity
        den = ONE
        for qf in got:
            if qf.multiplicity < 0:
                den = den * qf.poly() ** (-qf.multiplicity)
        # expanded/den equals f^e up to a unit times a monomial
        ratio = RationalFunction(f ** e * den, expanded)
        if not ratio.is_polynomial() or not ratio.num.is_monomial():
            remainder = remainder * f ** e
            continue
        (me, mc), = ratio.num.terms().items()
        unit *= mc / ratio.den.constant_value()
        mono = _add3(mono, me)
        factors.extend(got)
    merged: dict[tuple, int] = {}
    for qf in factors:
        key = (qf.coefficient, qf.exponents)
        merged[key] = merged.get(key, 0) + qf.multiplicity
    out = tuple(
        QLinearFactor(c, e, m)
        for (c, e), m in sorted(merged.items(), key=lambda kv: (_mono_key(kv[0][1]), kv[0][0]))
        if m
    )
    if not remainder.is_constant():
        lc = remainder.leading()[1]
        unit *= lc
        remainder = remainder.scale(1 / lc)
    else:
        unit *= remainder.constant_value()
        remainder = ONE
    return QLinearFactorization(unit, tuple(mono), out, remainder)

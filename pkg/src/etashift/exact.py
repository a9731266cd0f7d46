"""Exact scalar arithmetic: big rationals, the periodic Bernoulli functions,
and cyclotomic numbers (exact roots of unity and their rational combinations).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath

# All rational quantities in the package are stdlib Fractions: always in
# lowest terms with positive denominator, arithmetic never rounds.
Rational = Fraction

__all__ = [
    "Rational",
    "ConductorError",
    "frac_part",
    "p1",
    "p2",
    "euler_phi",
    "cyclotomic_polynomial",
    "CyclotomicNumber",
    "root_of_unity",
    "inverse_one_minus_root",
    "to_complex",
    "xgcd",
]


class ConductorError(ValueError):
    """A phase does not fit the requested cyclotomic conductor."""


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b), g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def frac_part(x: Fraction) -> Fraction:
    """Fractional part {x} = x - floor(x), in [0, 1)."""
    x = Fraction(x)
    return x - math.floor(x)


def p1(x: Fraction) -> Fraction:
    """First periodic Bernoulli function: {x} - 1/2 for non-integral x, else 0."""
    x = Fraction(x)
    if x.denominator == 1:
        return Fraction(0)
    return frac_part(x) - Fraction(1, 2)


def p2(x: Fraction) -> Fraction:
    """Second periodic Bernoulli function: {x}^2 - {x} + 1/6."""
    f = frac_part(x)
    return f * f - f + Fraction(1, 6)


def _factorize(n: int) -> dict[int, int]:
    fac: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    return fac


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    out = n
    for p in _factorize(n):
        out -= out // p
    return out


def _radical(n: int) -> int:
    out = 1
    for p in _factorize(n):
        out *= p
    return out


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # Long division of integer polynomials, which must be exact here.
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        out[i - dd] = q
        for j, dc in enumerate(den):
            num[i - dd + j] -= q * dc
    if any(num[:dd]):
        raise ArithmeticError("nonzero remainder in cyclotomic division")
    return out


@lru_cache(maxsize=None)
def _cyclotomic_dense(n: int) -> tuple[int, ...]:
    # Divide x^n - 1 by the cyclotomic polynomials of all proper divisors.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_div_exact(poly, _cyclotomic_dense(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[tuple[int, int], ...]:
    """The n-th cyclotomic polynomial as ((degree, coeff), ...) sparse pairs.

    Computed by iterated exact division for the radical of n, then inflated
    via Phi_n(x) = Phi_rad(n)(x^(n/rad(n))); the inflation keeps the
    polynomial sparse for smooth conductors.
    """
    r = _radical(n) if n > 1 else 1
    m = n // r
    dense = _cyclotomic_dense(r)
    return tuple((i * m, c) for i, c in enumerate(dense) if c)


def _phi_tail(n: int) -> tuple[int, tuple[tuple[int, int], ...]]:
    # Phi_n = x^d + tail; returns (d, tail) with d = phi(n).
    pairs = cyclotomic_polynomial(n)
    d = pairs[-1][0]
    assert pairs[-1][1] == 1 and d == euler_phi(n)
    return d, pairs[:-1]


def _reduce_mod_phi(n: int, work: dict[int, Fraction]) -> dict[int, Fraction]:
    """Reduce {exponent: coeff} with exponents in [0, n) to the power basis."""
    d, tail = _phi_tail(n)
    while True:
        top = -1
        for e, c in work.items():
            if e >= d and c and e > top:
                top = e
        if top < 0:
            break
        c = work.pop(top)
        for j, a in tail:
            e2 = top - d + j
            work[e2] = work.get(e2, Fraction(0)) - c * a
    return {e: c for e, c in work.items() if c}


class CyclotomicNumber:
    """Exact element of the cyclotomic field of conductor N.

    The value is a rational combination of N-th roots of unity.  Terms are
    stored sparsely as {exponent mod N: coefficient}; the canonical form on
    the power basis 1, z, ..., z^(phi(N)-1) (z = e(1/N)) is computed lazily
    and drives equality, zero tests and serialization.  Conductors are
    lifted to the lcm whenever two values meet.  Instances are immutable.
    """

    __slots__ = ("conductor", "terms", "_canon")

    def __init__(self, conductor: int, terms, _trusted: bool = False):
        if conductor < 1:
            raise ConductorError(f"conductor must be positive, got {conductor}")
        self.conductor = conductor
        if _trusted:
            self.terms = terms
        else:
            clean: dict[int, Fraction] = {}
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                c = Fraction(c)
                if not c:
                    continue
                e = int(e) % conductor
                c0 = clean.get(e)
                clean[e] = c if c0 is None else c0 + c
            self.terms = {e: c for e, c in clean.items() if c}
        self._canon = None

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, x, conductor: int = 1) -> "CyclotomicNumber":
        x = Fraction(x)
        return cls(conductor, {0: x} if x else {}, _trusted=True)

    @classmethod
    def zero(cls, conductor: int = 1) -> "CyclotomicNumber":
        return cls(conductor, {}, _trusted=True)

    @classmethod
    def one(cls, conductor: int = 1) -> "CyclotomicNumber":
        return cls.from_rational(1, conductor)

    # -- canonical form ------------------------------------------------

    def _canonical(self) -> dict[int, Fraction]:
        if self._canon is None:
            self._canon = _reduce_mod_phi(self.conductor, dict(self.terms))
        return self._canon

    @property
    def coefficients(self) -> list[Fraction]:
        """Dense power-basis coordinates, length phi(conductor)."""
        canon = self._canonical()
        out = [Fraction(0)] * euler_phi(self.conductor)
        for e, c in canon.items():
            out[e] = c
        return out

    def lift(self, conductor: int) -> "CyclotomicNumber":
        """Embed into the field of a larger conductor (value preserved)."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ConductorError(
                f"cannot lift conductor {self.conductor} into {conductor}")
        k = conductor // self.conductor
        return CyclotomicNumber(conductor, {e * k: c for e, c in self.terms.items()},
                                _trusted=True)

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self._canonical()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        canon = self._canonical()
        return not canon or set(canon) == {0}

    def rational_value(self) -> Fraction:
        canon = self._canonical()
        if not canon:
            return Fraction(0)
        if set(canon) != {0}:
            raise ValueError(f"{self!r} is not rational")
        return canon[0]

    def monomial(self) -> tuple[Fraction, int] | None:
        """Return (coeff, exponent) if the stored value is a single term."""
        if len(self.terms) == 1:
            ((e, c),) = self.terms.items()
            return c, e
        return None

    # -- arithmetic ----------------------------------------------------

    def _pair(self, other) -> tuple["CyclotomicNumber", "CyclotomicNumber"] | None:
        if isinstance(other, CyclotomicNumber):
            n = math.lcm(self.conductor, other.conductor)
            return self.lift(n), other.lift(n)
        if isinstance(other, (int, Fraction)):
            return self, CyclotomicNumber.from_rational(other, self.conductor)
        return None

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        terms = dict(a.terms)
        for e, c in b.terms.items():
            c0 = terms.get(e)
            c = c if c0 is None else c0 + c
            if c:
                terms[e] = c
            elif c0 is not None:
                del terms[e]
        return CyclotomicNumber(a.conductor, terms, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.conductor,
                                {e: -c for e, c in self.terms.items()},
                                _trusted=True)

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return CyclotomicNumber.zero(self.conductor)
            return CyclotomicNumber(self.conductor,
                                    {e: c * other for e, c in self.terms.items()},
                                    _trusted=True)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        a, b = self._pair(other)
        n = a.conductor
        terms: dict[int, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = e1 + e2
                if e >= n:
                    e -= n
                c = c1 * c2
                c0 = terms.get(e)
                c = c if c0 is None else c0 + c
                if c:
                    terms[e] = c
                elif c0 is not None:
                    del terms[e]
        return CyclotomicNumber(n, terms, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return self * (1 / other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        mono = other.monomial()
        if mono is None:
            canon = _reduce_mod_phi(other.conductor, dict(other.terms))
            if len(canon) == 1:
                ((e, c),) = canon.items()
                mono = (c, e)
        if mono is None:
            raise NotImplementedError(
                "division is only supported by monomial cyclotomic values; "
                "invert binomials with inverse_one_minus_root")
        c, e = mono
        if not c:
            raise ZeroDivisionError("division by zero cyclotomic number")
        inv = CyclotomicNumber(other.conductor, {(-e) % other.conductor: 1 / c},
                               _trusted=True)
        return self * inv

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return CyclotomicNumber.one(self.conductor) / self ** (-k)
        out = CyclotomicNumber.one(self.conductor)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicNumber.from_rational(other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        a, b = self._pair(other)
        return a._canonical() == b._canonical()

    __hash__ = None  # values are compared through canonical forms only

    def conjugate(self) -> "CyclotomicNumber":
        """Complex conjugate (negates every root-of-unity exponent)."""
        n = self.conductor
        return CyclotomicNumber(n, [((-e) % n, c) for e, c in self.terms.items()])

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "conductor": self.conductor,
            "coefficients": [str(c) for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CyclotomicNumber":
        n = int(data["conductor"])
        coeffs = [Fraction(s) for s in data["coefficients"]]
        if len(coeffs) != euler_phi(n):
            raise ValueError("coefficient list does not match the conductor")
        return cls(n, dict(enumerate(coeffs)))

    def __repr__(self):
        if not self.terms:
            return f"CyclotomicNumber({self.conductor}, 0)"
        parts = " + ".join(f"({c})*z^{e}" for e, c in sorted(self.terms.items()))
        return f"CyclotomicNumber({self.conductor}, {parts})"


def root_of_unity(x, conductor: int | None = None) -> CyclotomicNumber:
    """e(x) = exp(2*pi*i*x) as an exact cyclotomic number.

    The denominator of x must divide the conductor; phases compose
    multiplicatively, e(x) * e(y) == e(x + y).
    """
    x = frac_part(Fraction(x))
    if conductor is None:
        conductor = x.denominator
    if conductor % x.denominator:
        raise ConductorError(
            f"denominator of {x} does not divide conductor {conductor}")
    e = int(x * conductor) % conductor
    return CyclotomicNumber(conductor, {e: Fraction(1)}, _trusted=True)


def inverse_one_minus_root(m: int, k: int) -> CyclotomicNumber:
    """Exact inverse of (1 - e(k/m)).

    Uses (1 - z) * sum_{j<n} (j+1) z^j = -n for a primitive n-th root z,
    so the inverse is -(1/n) * sum_{j<n} (j+1) z^(j) with n the order of
    e(k/m).  Raises ZeroDivisionError when e(k/m) == 1.
    """
    g = math.gcd(k % m, m)
    n, kk = m // g, (k % m) // g
    if n == 1:
        raise ZeroDivisionError("1 - e(k/m) vanishes")
    terms: dict[int, Fraction] = {}
    for j in range(n):
        e = (kk * j) % n
        terms[e] = terms.get(e, Fraction(0)) + Fraction(-(j + 1), n)
    return CyclotomicNumber(n, terms)


def to_complex(z: CyclotomicNumber, digits: int = 15):
    """Floating approximation of a cyclotomic number, good to 10^-digits."""
    with mpmath.workdps(digits + 15):
        n = z.conductor
        total = mpmath.mpc(0)
        for e, c in z.terms.items():
            total += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(
                mpmath.mpf(2 * e) / n)
        return total

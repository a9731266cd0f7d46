"""Truncated Laurent series in q on a fractional exponent lattice.

A series lives on the lattice (1/L)Z: exponents are stored as integer
numerators over a fixed lattice denominator L.  Coefficients are exact
(int, Fraction or CyclotomicNumber) and every operation tracks the
precision through which the result is trustworthy.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exact import CyclotomicNumber

__all__ = [
    "QSeries",
    "LatticeError",
    "PrecisionError",
    "series_arith",
    "sparse_factor_product",
    "dedekind_eta_expansion",
    "sieve",
]


class LatticeError(ValueError):
    """Operation requires a different exponent lattice."""


class PrecisionError(ValueError):
    """A coefficient beyond the stored precision was requested."""


def _ceil_num(x: Fraction, lattice: int) -> int:
    return math.ceil(Fraction(x) * lattice)


class QSeries:
    """Exact truncated series sum c_n q^(n/L), offset <= n < precision.

    `offset` is the numerator of the lowest stored exponent and is kept
    normalized: the coefficient there is nonzero unless the series is
    identically zero through its precision (then offset == precision and
    no coefficients are stored).
    """

    __slots__ = ("lattice", "offset", "coeffs", "precision")

    def __init__(self, lattice: int, offset: int, coeffs, precision: int):
        if lattice < 1:
            raise LatticeError(f"lattice denominator must be >= 1, got {lattice}")
        coeffs = list(coeffs)
        if offset + len(coeffs) > precision:
            raise PrecisionError("coefficients extend beyond the stated precision")
        while coeffs and not coeffs[0]:
            coeffs.pop(0)
            offset += 1
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        if not coeffs:
            offset = precision
        self.lattice = lattice
        self.offset = offset
        self.coeffs = coeffs
        self.precision = precision

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, precision, lattice: int = 1) -> "QSeries":
        p = _ceil_num(precision, lattice)
        return cls(lattice, p, [], p)

    @classmethod
    def constant(cls, value, precision, lattice: int = 1) -> "QSeries":
        p = _ceil_num(precision, lattice)
        return cls(lattice, 0, [value], p)

    @classmethod
    def one(cls, precision, lattice: int = 1) -> "QSeries":
        return cls.constant(1, precision, lattice)

    @classmethod
    def from_terms(cls, terms, precision, lattice: int | None = None) -> "QSeries":
        """Build from (exponent, coefficient) pairs with Fraction exponents."""
        terms = [(Fraction(e), c) for e, c in terms]
        if lattice is None:
            lattice = 1
            for e, _ in terms:
                lattice = math.lcm(lattice, e.denominator)
        p = _ceil_num(precision, lattice)
        data: dict[int, object] = {}
        for e, c in terms:
            num = e * lattice
            if num.denominator != 1:
                raise LatticeError(f"exponent {e} is off the 1/{lattice} lattice")
            n = int(num)
            if n >= p:
                continue
            data[n] = data.get(n, 0) + c
        if not data:
            return cls(lattice, p, [], p)
        lo = min(data)
        coeffs = [data.get(i, 0) for i in range(lo, max(data) + 1)]
        return cls(lattice, lo, coeffs, p)

    # -- inspection -------------------------------------------------------

    @property
    def precision_exponent(self) -> Fraction:
        return Fraction(self.precision, self.lattice)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, exponent) -> object:
        """Coefficient of q^exponent; PrecisionError beyond the truncation."""
        e = Fraction(exponent)
        num = e * self.lattice
        if num.denominator != 1:
            n = None
        else:
            n = int(num)
        if n is None or n < self.precision:
            if n is None or n < self.offset or n >= self.offset + len(self.coeffs):
                return 0
            return self.coeffs[n - self.offset]
        raise PrecisionError(
            f"coefficient of q^{e} lies beyond precision q^{self.precision_exponent}")

    def nonzero_terms(self) -> list[tuple[Fraction, object]]:
        return [(Fraction(self.offset + i, self.lattice), c)
                for i, c in enumerate(self.coeffs) if c]

    def leading(self) -> tuple[Fraction, object] | None:
        if not self.coeffs:
            return None
        return Fraction(self.offset, self.lattice), self.coeffs[0]

    def __repr__(self):
        head = ", ".join(f"q^{e}: {c!r}" for e, c in self.nonzero_terms()[:4])
        more = "..." if len([c for c in self.coeffs if c]) > 4 else ""
        return (f"QSeries(L={self.lattice}, prec={self.precision_exponent}, "
                f"[{head}{more}])")

    # -- lattice handling ---------------------------------------------------

    def lift_lattice(self, lattice: int) -> "QSeries":
        if lattice == self.lattice:
            return self
        if lattice % self.lattice:
            raise LatticeError(f"cannot lift lattice 1/{self.lattice} to 1/{lattice}")
        k = lattice // self.lattice
        coeffs = [0] * (len(self.coeffs) * k)
        coeffs[::k] = self.coeffs
        if coeffs:
            coeffs = coeffs[: len(coeffs) - (k - 1)]
        return QSeries(lattice, self.offset * k, coeffs, self.precision * k)

    def reduce_lattice(self) -> "QSeries":
        """Shrink L to the coarsest lattice carrying all nonzero exponents."""
        if not self.coeffs:
            g = math.gcd(self.lattice, self.precision)
        else:
            g = 0
            for i, c in enumerate(self.coeffs):
                if c:
                    g = math.gcd(g, self.offset + i)
            g = math.gcd(g, self.lattice)
        if g <= 1:
            return self
        lat = self.lattice // g
        prec = -((-self.precision) // g)
        if not self.coeffs:
            return QSeries(lat, prec, [], prec)
        # the offset carries a nonzero coefficient, so g divides it
        off = self.offset // g
        coeffs = [self.coeffs[j] for j in range(0, len(self.coeffs), g)]
        return QSeries(lat, off, coeffs, prec)

    def shift(self, exponent) -> "QSeries":
        """Multiply by q^exponent."""
        e = Fraction(exponent)
        lat = math.lcm(self.lattice, e.denominator)
        s = self.lift_lattice(lat)
        d = int(e * lat)
        return QSeries(lat, s.offset + d, s.coeffs, s.precision + d)

    def truncate(self, precision) -> "QSeries":
        p = _ceil_num(precision, self.lattice)
        if p > self.precision:
            raise PrecisionError("cannot extend precision by truncation")
        return QSeries(self.lattice, min(self.offset, p),
                       self.coeffs[: max(0, p - self.offset)], p)

    def scale_coeffs(self, scalar) -> "QSeries":
        if not scalar:
            return QSeries.zero(self.precision_exponent, self.lattice)
        return QSeries(self.lattice, self.offset,
                       [c * scalar if c else 0 for c in self.coeffs],
                       self.precision)

    # -- arithmetic ---------------------------------------------------------

    def _aligned(self, other: "QSeries") -> tuple["QSeries", "QSeries"]:
        lat = math.lcm(self.lattice, other.lattice)
        return self.lift_lattice(lat), other.lift_lattice(lat)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicNumber)):
            other = QSeries.constant(other, self.precision_exponent, 1)
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._aligned(other)
        prec = min(a.precision, b.precision)
        if a.is_zero() and b.is_zero():
            return QSeries(a.lattice, prec, [], prec)
        lo = min(x.offset for x in (a, b) if not x.is_zero())
        lo = min(lo, prec)
        out = [0] * (prec - lo)
        for s in (a, b):
            base = s.offset - lo
            for i, c in enumerate(s.coeffs):
                if c and s.offset + i < prec:
                    out[base + i] = out[base + i] + c
        return QSeries(a.lattice, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.lattice, self.offset, [-c if c else 0 for c in self.coeffs],
                       self.precision)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicNumber)):
            other = QSeries.constant(other, self.precision_exponent, 1)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicNumber)):
            return self.scale_coeffs(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self._aligned(other)
        # product precision: the shorter reach of the two truncations
        prec = min(a.precision + b.offset, b.precision + a.offset)
        if a.is_zero() or b.is_zero():
            return QSeries(a.lattice, prec, [], prec)
        nz_a = [(a.offset + i, c) for i, c in enumerate(a.coeffs) if c]
        nz_b = [(b.offset + i, c) for i, c in enumerate(b.coeffs) if c]
        if len(nz_a) > len(nz_b):
            nz_a, nz_b = nz_b, nz_a
        lo = nz_a[0][0] + nz_b[0][0]
        out = [0] * (prec - lo)
        for ea, ca in nz_a:
            lim = prec - ea
            for eb, cb in nz_b:
                if eb >= lim:
                    break
                k = ea + eb - lo
                out[k] = out[k] + ca * cb
        return QSeries(a.lattice, lo, out, prec)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a = self.reduce_lattice()
        b = other.reduce_lattice()
        lat = math.lcm(a.lattice, b.lattice)
        a, b = a.lift_lattice(lat), b.lift_lattice(lat)
        return (a.offset == b.offset and a.precision == b.precision
                and len(a.coeffs) == len(b.coeffs)
                and all(x == y for x, y in zip(a.coeffs, b.coeffs)))

    __hash__ = None

    def agrees_with(self, other: "QSeries", through=None) -> bool:
        """Coefficientwise agreement below `through` (or the common precision)."""
        a, b = self._aligned(other)
        lim = min(a.precision, b.precision)
        if through is not None:
            lim = min(lim, _ceil_num(Fraction(through), a.lattice))
        lo = min(a.offset, b.offset, lim)
        for n in range(lo, lim):
            ca = a.coeffs[n - a.offset] if a.offset <= n < a.offset + len(a.coeffs) else 0
            cb = b.coeffs[n - b.offset] if b.offset <= n < b.offset + len(b.coeffs) else 0
            if not (ca == cb):
                return False
        return True

    # -- serialization --------------------------------------------------------

    def serialize(self) -> str:
        """Line format: header `L= offset= precision=`, then nonzero terms."""
        lines = [f"L={self.lattice} offset={self.offset} precision={self.precision}"]
        for i, c in enumerate(self.coeffs):
            if c:
                lines.append(f"{self.offset + i} {_format_coeff(c)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "QSeries":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = dict(part.split("=", 1) for part in lines[0].split())
        lat, off, prec = (int(head[k]) for k in ("L", "offset", "precision"))
        data: dict[int, object] = {}
        for ln in lines[1:]:
            n_str, c_str = ln.split(None, 1)
            data[int(n_str)] = _parse_coeff(c_str)
        if not data:
            return cls(lat, prec, [], prec)
        lo = min(min(data), off)
        coeffs = [data.get(i, 0) for i in range(lo, max(data) + 1)]
        return cls(lat, lo, coeffs, prec)


def _format_coeff(c) -> str:
    if isinstance(c, CyclotomicNumber):
        d = c.to_dict()
        inner = ",".join(d["coefficients"])
        return "{%d:[%s]}" % (d["conductor"], inner)
    return str(c)


def _parse_coeff(s: str):
    s = s.strip()
    if s.startswith("{"):
        body = s[1:-1]
        cond, rest = body.split(":", 1)
        coeffs = rest.strip("[]").split(",") if rest.strip("[]") else []
        return CyclotomicNumber.from_dict(
            {"conductor": int(cond), "coefficients": coeffs})
    if "/" in s:
        return Fraction(s)
    return int(s)


def series_arith(a: QSeries, b: QSeries, kind: str) -> QSeries:
    """Exact truncated arithmetic; kind is one of add|sub|mul."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def sparse_factor_product(factors, precision) -> QSeries:
    """Product of binomials (1 + sign*coeff*q^exponent), truncated at `precision`.

    Factors are (coefficient, exponent, sign) with positive Fraction
    exponents and sign +1/-1.  The product is built one factor at a time by
    shifted addition, costing O(len(factors) * terms); the exact result is
    independent of the order of the factors.
    """
    factors = [(c, Fraction(e), s) for c, e, s in factors]
    lattice = 1
    for _, e, _ in factors:
        if e <= 0:
            raise ValueError(f"factor exponent must be positive, got {e}")
        lattice = math.lcm(lattice, e.denominator)
    prec = _ceil_num(Fraction(precision), lattice)
    if prec <= 0:
        return QSeries.zero(precision, lattice)
    acc = [0] * prec
    acc[0] = 1
    for coeff, e, sign in factors:
        k = int(e * lattice)
        if k >= prec:
            continue
        c = coeff if sign > 0 else -coeff
        if c == 1:
            acc[k:] = [x + y for x, y in zip(acc[k:], acc)]
        elif c == -1:
            acc[k:] = [x - y for x, y in zip(acc[k:], acc)]
        else:
            acc[k:] = [x + y * c if y else x for x, y in zip(acc[k:], acc)]
    return QSeries(lattice, 0, acc, prec)


def _euler_factor_table(m: int) -> list[int]:
    # prod_{n>=1} (1 - x^n) through x^m (pentagonal-number support)
    out = [0] * (m + 1)
    out[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= m:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e <= m:
                out[e] += (-1) ** k
        k += 1
    return out

def _cube_factor_table(m: int) -> list[int]:
    # prod_{n>=1} (1 - x^n)^3 through x^m (triangular-number support)
    out = [0] * (m + 1)
    k = 0
    while k * (k + 1) // 2 <= m:
        out[k * (k + 1) // 2] += (-1) ** k * (2 * k + 1)
        k += 1
    return out


def _mul_table(dense: list[int], sparse: list[int], m: int) -> list[int]:
    nz = [(i, c) for i, c in enumerate(sparse) if c]
    out = [0] * (m + 1)
    for i, c in enumerate(dense):
        if not c:
            continue
        for j, d in nz:
            if i + j > m:
                break
            out[i + j] += c * d
    return out


def dedekind_eta_expansion(scale: int, power: int, precision) -> QSeries:
    """The eta power q^(scale*power/24) * prod_n (1 - q^(scale*n))^power.

    A single factor comes from the pentagonal-number expansion of
    prod (1 - x^n); higher powers are assembled exactly from that series
    and the cube prod (1 - x^n)^3, both of which have sparse support.
    """
    if scale < 1 or power < 1:
        raise ValueError("scale and power must be positive integers")
    lead = Fraction(scale * power, 24)
    lattice = lead.denominator
    prec = _ceil_num(Fraction(precision), lattice)
    lead_num = int(lead * lattice)
    step = scale * lattice
    m = (prec - 1 - lead_num) // step
    if m < 0:
        return QSeries.zero(precision, lattice)
    cubes, rest = divmod(power, 3)
    tab = [1]
    if cubes:
        base3 = _cube_factor_table(m)
        for _ in range(cubes):
            tab = _mul_table(tab, base3, m)
    if rest:
        base1 = _euler_factor_table(m)
        for _ in range(rest):
            tab = _mul_table(tab, base1, m)
    coeffs = [0] * (m * step + 1)
    coeffs[::step] = tab
    return QSeries(lattice, lead_num, coeffs, prec)


def sieve(f: QSeries, T: int, r: int) -> QSeries:
    """Keep the coefficients of q^n with n ≡ r (mod T), zero all others.

    Defined for integer-exponent series only (lattice 1), matching the
    root-of-unity averaging (1/T) sum_t e(-tr/T) f(tau + t/T).
    """
    if f.lattice != 1:
        raise LatticeError("sieving requires an integer exponent lattice (L=1)")
    if T < 1:
        raise ValueError("sieve modulus must be positive")
    coeffs = [c if (f.offset + i) % T == r % T else 0
              for i, c in enumerate(f.coeffs)]
    return QSeries(1, f.offset, coeffs, f.precision)

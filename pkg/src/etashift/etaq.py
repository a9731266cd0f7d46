"""Generalized eta-functions, eta-quotients, and expansions at arbitrary cusps.

The central objects are the two-parameter eta-like products

    eta[delta,g](tau) = e(delta*P2(g/delta)*tau/2) *
                        prod_{l>0, l = +-g mod delta} (1 - q^l)

together with their root-of-unity-twisted companions eta_gs(g, h), and the
quotient F_S = prod_{g in S} eta[2delta,2g]/eta[delta,g], whose q-expansion
generates congruence-restricted distinct-part partition counts.  This module
carries the complete change-of-cusp apparatus: a canonical completion of a
cusp a/c to a matrix, the derived data (D, b0, d0, epsilon), the primed
indices, the transformation phase mu, exact leading coefficients, and the
assembled expansion of F_S(tau + t/delta) at any cusp with c > 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import (CyclotomicNumber, inverse_one_minus_root, p1, p2,
                    root_of_unity)
from .qseries import QSeries, sparse_factor_product

__all__ = [
    "PartitionSpec",
    "EtaQuotient",
    "CuspContext",
    "DegenerateBranchWarning",
    "cusp_context",
    "alpha",
    "eta_generalized_expansion",
    "eta_delta_g_expansion",
    "robins_level_check",
    "f_s_expansion",
    "f_s_eta_quotient",
    "ord_s",
    "f_level",
    "sieved_level",
    "gh_primed",
    "gh_primed_scaled",
    "dedekind_sum",
    "mu",
    "ord_t_at_cusp",
    "z_leading",
    "c_phase",
    "expansion_at_cusp",
    "special_part_families",
    "is_branch_degenerate",
]


class IntegralityError(ValueError):
    """A quantity required to be an integer is not."""


class DegenerateBranchWarning(UserWarning):
    """The two sign families of a cusp-expansion factor coincide as residue
    classes; values are still exact (the families are kept separate)."""


@dataclass(frozen=True)
class PartitionSpec:
    """A modulus delta and residues S with 0 < g < delta/2 for every g in S.

    Defines the partition counter p_S(n): partitions of n into distinct
    parts congruent to +-g (mod delta) for some g in S.
    """

    delta: int
    parts: tuple[int, ...]

    def __init__(self, delta: int, parts):
        parts = tuple(sorted(set(int(g) for g in parts)))
        if delta < 1:
            raise ValueError("modulus must be positive")
        for g in parts:
            if not 0 < 2 * g < delta:
                raise ValueError(
                    f"residue {g} is not strictly between 0 and {delta}/2")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return len(self.parts)

    def residues(self) -> tuple[int, ...]:
        """The allowed part residues +-g mod delta, sorted."""
        out = set()
        for g in self.parts:
            out.add(g % self.delta)
            out.add((-g) % self.delta)
        return tuple(sorted(out))

    def part_values(self, bound: int) -> list[int]:
        """All allowed parts l <= bound, ascending."""
        res = set(self.residues())
        return [l for l in range(1, bound + 1) if l % self.delta in res]

    def scaled(self, v: int) -> "PartitionSpec":
        """The spec v*S at modulus v*delta (same part set, rescaled by v)."""
        return PartitionSpec(self.delta * v, tuple(g * v for g in self.parts))

    def serialize(self) -> str:
        return f"delta={self.delta} parts={','.join(map(str, self.parts))}"

    @classmethod
    def deserialize(cls, text: str) -> "PartitionSpec":
        fields = dict(tok.split("=", 1) for tok in text.split())
        return cls(int(fields["delta"]),
                   tuple(int(p) for p in fields["parts"].split(",") if p))


@dataclass(frozen=True)
class EtaQuotient:
    """A finite product of generalized eta-functions eta[delta,g]^r."""

    atoms: tuple[tuple[int, int, int], ...]  # (delta, g, exponent)

    def __init__(self, atoms):
        merged: dict[tuple[int, int], int] = {}
        for delta, g, r in atoms:
            if delta < 1 or not 0 <= g < delta:
                raise ValueError(f"bad eta index ({delta}, {g})")
            key = (int(delta), int(g))
            merged[key] = merged.get(key, 0) + int(r)
        clean = tuple((d, g, r) for (d, g), r in sorted(merged.items()) if r)
        object.__setattr__(self, "atoms", clean)


# ---------------------------------------------------------------------------
# orders, levels, modularity criteria
# ---------------------------------------------------------------------------


def ord_s(spec: PartitionSpec) -> Fraction:
    """Order at infinity of F_S: (1/2) * sum_g delta * P2(g/delta)."""
    delta = spec.delta
    return sum((Fraction(delta) * p2(Fraction(g, delta)) for g in spec.parts),
               Fraction(0)) / 2


def f_level(spec: PartitionSpec) -> int:
    """Level N with F_S(v*tau) modular on Gamma1(N), v = Den(ord_S):
    N = 24*delta*v / gcd(|S|, 12)."""
    v = ord_s(spec).denominator
    return 24 * spec.delta * v // math.gcd(spec.size, 12)


def sieved_level(spec: PartitionSpec, residues=()) -> int:
    """Level of the residue-sieved generating function (needs ord_S integral):
    lcm(delta^2, 24*delta/gcd(|S|, 12)).  The residue set does not move it."""
    o = ord_s(spec)
    if o.denominator != 1:
        raise IntegralityError(f"ord_S = {o} is not an integer")
    return math.lcm(spec.delta ** 2, 24 * spec.delta // math.gcd(spec.size, 12))


def robins_level_check(quotient: EtaQuotient, N: int) -> bool:
    """Sufficient parity criteria for modularity of an eta-quotient on
    Gamma1(N):  sum delta*P2(g/delta)*r  and  sum N/(6 delta)*r  both even.
    """
    c1 = Fraction(0)
    c2 = Fraction(0)
    for delta, g, r in quotient.atoms:
        if N % delta:
            raise ValueError(f"eta index {delta} does not divide the level {N}")
        c1 += Fraction(delta) * p2(Fraction(g, delta)) * r
        c2 += Fraction(N, 6 * delta) * r
    def even(x: Fraction) -> bool:
        return x.denominator == 1 and x.numerator % 2 == 0
    return even(c1) and even(c2)


def f_s_eta_quotient(spec: PartitionSpec, scale: int = 1) -> EtaQuotient:
    """F_S(scale*tau) as an eta-quotient (uses eta[d,g](v t) = eta[dv,gv](t))."""
    atoms = []
    for g in spec.parts:
        atoms.append((2 * spec.delta * scale, 2 * g * scale, 1))
        atoms.append((spec.delta * scale, g * scale, -1))
    return EtaQuotient(tuple(atoms))


# ---------------------------------------------------------------------------
# expansions at infinity
# ---------------------------------------------------------------------------


def alpha(delta: int, g: int, h: int) -> CyclotomicNumber:
    """Prefactor of the twisted eta-product: (1 - e(-h/delta)) * e(P1(h/delta)/2)
    when g = 0 and h != 0 (mod delta), and 1 otherwise."""
    g %= delta
    h %= delta
    if g != 0 or h == 0:
        return CyclotomicNumber.one()
    return ((CyclotomicNumber.one() - root_of_unity(Fraction(-h, delta)))
            * root_of_unity(p1(Fraction(h, delta)) / 2))


def _alpha_inverse(delta: int, g: int, h: int) -> CyclotomicNumber:
    g %= delta
    h %= delta
    if g != 0 or h == 0:
        return CyclotomicNumber.one()
    return (inverse_one_minus_root(delta, -h)
            * root_of_unity(-p1(Fraction(h, delta)) / 2))


def eta_generalized_expansion(delta: int, g: int, h: int, precision) -> QSeries:
    """Expansion of the twisted product eta_gs(g, h) on the q^(1/delta) lattice:

        alpha(delta,g,h) * q^(P2(g/delta)/2)
        * prod_{m>0, m=g mod delta} (1 - e(h/delta) q^(m/delta))
        * prod_{m>0, m=-g mod delta} (1 - e(-h/delta) q^(m/delta))
    """
    g %= delta
    h %= delta
    lead = p2(Fraction(g, delta)) / 2
    precision = Fraction(precision)
    bound = precision - lead  # product exponents run below this
    factors = []
    for res, tw in ((g, h), ((-g) % delta, (-h) % delta)):
        twist = root_of_unity(Fraction(tw, delta)) if tw else 1
        m = res if res else delta
        while Fraction(m, delta) < bound:
            factors.append((twist, Fraction(m, delta), -1))
            m += delta
    prod = sparse_factor_product(factors, bound)
    out = prod.shift(lead)
    a = alpha(delta, g, h)
    if not (a == 1):
        out = out.scale_coeffs(a)
    return out


def eta_delta_g_expansion(delta: int, g: int, precision) -> QSeries:
    """Expansion of eta[delta,g]: leading exponent delta*P2(g/delta)/2, then
    the two products of (1 - q^l) over l = +-g (mod delta).  Integer
    coefficients; coincides with eta(delta*tau)^2 when g = 0."""
    g %= delta
    lead = Fraction(delta) * p2(Fraction(g, delta)) / 2
    precision = Fraction(precision)
    bound = precision - lead
    factors = []
    for res in (g, (-g) % delta):
        l = res if res else delta
        while l < bound:
            factors.append((1, Fraction(l), -1))
            l += delta
    prod = sparse_factor_product(factors, bound)
    return prod.shift(lead)


def f_s_expansion(spec: PartitionSpec, scale: int, precision) -> QSeries:
    """F_S(scale*tau) = q^(scale*ord_S) * sum_n p_S(n) q^(scale*n), assembled
    from the factors (1 + q^(scale*l)) over the allowed parts l."""
    precision = Fraction(precision)
    lead = ord_s(spec) * scale
    bound = precision - lead
    if bound <= 0:
        return QSeries.zero(precision, lead.denominator)
    top = math.ceil(bound / scale)
    factors = [(1, Fraction(scale * l), 1) for l in spec.part_values(top)]
    prod = sparse_factor_product(factors, bound)
    return prod.shift(lead)


# ---------------------------------------------------------------------------
# cusp contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CuspContext:
    """A cusp a/c completed to a unimodular matrix, with the derived data.

    The matrix A = [[a, b], [c, d]] has det 1.  D = gcd(c, delta); b0, d0
    solve D*d = delta*a*d0 - c*b0; epsilon = gcd(c, 2*delta)/gcd(c, delta).
    A0 is the auxiliary integer matrix satisfying the exact identity
    delta*A(tau) = A0((D*tau - b0)/(delta/D)).  For the doubled modulus
    (2*delta, 2*g) the derived data is (eps*D, eps*b0, (eps/2)*d0); d0 is
    chosen even when eps = 1 so that the scaled d0 stays integral.  The cusp
    at infinity is stored as (a, c) = (1, 0) with D = delta, eps = 2,
    b0 = 0, d0 = 1.  Instances are immutable and safe to share.
    """

    a: int
    c: int
    b: int
    d: int
    delta: int
    D: int
    b0: int
    d0: int
    epsilon: int
    A0: tuple[tuple[int, int], tuple[int, int]]

    @property
    def is_infinity(self) -> bool:
        return self.c == 0

    def scaled(self) -> tuple[int, int, int]:
        """(D, b0, d0) for the doubled modulus 2*delta at the same cusp."""
        eps = self.epsilon
        assert eps == 2 or self.d0 % 2 == 0
        return eps * self.D, eps * self.b0, (eps * self.d0) // 2

    def data_for(self, delta: int) -> tuple[int, int, int, int]:
        """(delta, D, b0, d0) for the base or the doubled modulus."""
        if delta == self.delta:
            return self.delta, self.D, self.b0, self.d0
        if delta == 2 * self.delta:
            D2, b02, d02 = self.scaled()
            return 2 * self.delta, D2, b02, d02
        raise ValueError(
            f"context is for modulus {self.delta} (or {2*self.delta}), not {delta}")

    def serialize(self) -> dict:
        return {"a": self.a, "c": self.c, "b": self.b, "d": self.d,
                "D": self.D, "b0": self.b0, "d0": self.d0,
                "epsilon": self.epsilon}


def _mobius_identity_holds(delta, a, b, c, d, D, b0, d0, A0) -> bool:
    # delta*A and A0 composed with tau -> (D*tau - b0)/(delta/D) must agree
    # as integer matrices:  [[delta*a, delta*b], [c, d]] == A0 * [[D, -b0], [0, delta/D]] / (delta/D) ...
    # Cross-multiplied exact form: A0 . [[D, -b0],[0, delta//D]] == [[delta*a*?, ...]]
    (p, q), (r, s) = A0
    m00 = p * D
    m01 = -p * b0 + q * (delta // D)
    m10 = r * D
    m11 = -r * b0 + s * (delta // D)
    return (m00, m01, m10, m11) == (delta * a, delta * b, c, d)


def cusp_context(a: int, c: int, delta: int, variant: int = 0) -> CuspContext:
    """Canonical completion of the cusp a/c for the modulus delta.

    gcd(a, c) must be 1.  The canonical matrix takes the least d >= 0
    with a*d = 1 (mod c); the canonical d0 is the least non-negative
    solution, bumped to the least even one when epsilon = 1 (the doubled
    modulus needs d0/2 integral, and c/D is odd exactly when epsilon = 1).
    `variant` picks a different valid completion (for choice-stability
    experiments); variant 0 is the canonical one.
    """
    if delta < 1:
        raise ValueError("modulus must be positive")
    if c < 0:
        a, c = -a, -c
    if math.gcd(a, c) != 1 or (a, c) == (0, 0):
        raise ValueError(f"cusp numerator/denominator ({a}, {c}) are not coprime")
    if c == 0:
        a = 1
        b, d = 0, 1
        D, eps = delta, 2
        b0, d0 = 0, 1
        A0 = ((1, 0), (0, 1))
        return CuspContext(a, c, b, d, delta, D, b0, d0, eps, A0)

    # complete a/c to [[a, b], [c, d]] with det 1
    _, x, _ = _xgcd_cached(a, c)
    d = x % c
    d += variant * c
    b = (a * d - 1) // c

    D = math.gcd(c, delta)
    eps = math.gcd(c, 2 * delta) // D

    # solve D*d = delta*a*d0 - c*b0 for (d0, b0); d0 is free mod c/D
    step = c // D
    g, inv, _ = _xgcd_cached((delta * a) // D, step)
    assert g == 1
    d0 = (inv * d) % step
    if eps == 1 and d0 % 2:
        d0 += step  # step is odd here, so this fixes the parity
    d0 += 2 * variant * step
    b0 = (delta * a * d0 - D * d) // c

    A0 = ((delta * a // D, a * b0 + b * D), (c // D, d0 * a))
    assert A0[0][0] * A0[1][1] - A0[0][1] * A0[1][0] == 1
    assert _mobius_identity_holds(delta, a, b, c, d, D, b0, d0, A0)
    if eps == 1:
        assert d0 % 2 == 0
    ctx = CuspContext(a, c, b, d, delta, D, b0, d0, eps, A0)
    ctx.scaled()  # validates integrality of the doubled-modulus data
    return ctx


@lru_cache(maxsize=4096)
def _xgcd_cached(a: int, b: int):
    from .exact import xgcd
    return xgcd(a, b)


# ---------------------------------------------------------------------------
# transformation data at a cusp
# ---------------------------------------------------------------------------


def gh_primed(ctx: CuspContext, g: int, t: int) -> tuple[int, int]:
    """The transformed indices g' = g(delta*a + t*c)/D and
    h' = g(a*b0 + b*D + t*d0*a) of the base modulus."""
    return _gh_primed_data(ctx, ctx.delta, g, t)


def _gh_primed_data(ctx: CuspContext, delta: int, g: int, t: int) -> tuple[int, int]:
    delta, D, b0, d0 = ctx.data_for(delta)
    gp = g * (delta * ctx.a + t * ctx.c) // D
    hp = g * (ctx.a * b0 + ctx.b * D + t * d0 * ctx.a)
    return gp, hp


def gh_primed_scaled(ctx: CuspContext, g: int, t: int) -> tuple[int, int]:
    """The doubled-modulus indices of (2*delta, 2*g) at shift 2*t; these equal
    ((4/eps)*g', 2*eps*h')."""
    return _gh_primed_data(ctx, 2 * ctx.delta, 2 * g, 2 * t)


@lru_cache(maxsize=65536)
def dedekind_sum(h: int, k: int) -> Fraction:
    """Classical Dedekind sum s(h, k) = sum_{v mod k} ((v/k)) ((hv/k))."""
    if k < 1:
        raise ValueError("k must be positive")
    h %= k
    total = 0
    r = 0
    for v in range(1, k):
        r += h
        if r >= k:
            r -= k
        if r:
            total += (2 * v - k) * (2 * r - k)
    return Fraction(total, 4 * k * k)


def _siegel_norm_phase(delta: int, g: int, h: int) -> Fraction:
    # The twisted eta-product with reduced indices equals e(phase) times the
    # normalized two-variable Siegel-type product; (g, h) = (0, 0) never occurs.
    g %= delta
    h %= delta
    if g:
        return Fraction(1, 2) + Fraction(h, delta) * (1 - Fraction(g, delta)) / 2
    if h == 0:
        raise ValueError("index (0, 0) has no transformation normalization")
    return Fraction(-1, 4)


def _translation_phase(delta: int, gbar: int, hbar: int, b1: int, b2: int) -> Fraction:
    # index-translation cocycle of the degree-one lattice form underlying the
    # product: moving the index by the integer vector (b1, b2) multiplies the
    # value by (-1)^(b1*b2 + b1 + b2) * e((b2*gbar - b1*hbar)/(2*delta))
    return (Fraction(b1 * b2 + b1 + b2, 2)
            + (Fraction(b2 * gbar, delta) - Fraction(b1 * hbar, delta)) / 2)


def _a0_matrix(ctx: CuspContext, delta: int) -> tuple[int, int, int, int]:
    delta, D, b0, d0 = ctx.data_for(delta)
    return (delta * ctx.a // D, ctx.a * b0 + ctx.b * D, ctx.c // D, d0 * ctx.a)


def mu(ctx: CuspContext, delta: int, g: int, t: int) -> Fraction:
    """Exact transformation phase exponent: the twisted eta-product of index
    (g, t*g) transforms across the cusp with the multiplier e(mu/2).

    Computed by factoring the product into its exactly-equivariant weight -1
    part and the square of the classical eta-function: the phase is the sum
    of the eta-square multiplier of the auxiliary matrix (a Dedekind-sum
    term), the index-translation cocycle that renormalizes the transformed
    index into [0, delta)^2, and the two product-normalization phases.  The
    number of Dedekind-sum terms is c/D.  `delta` selects the base or the
    doubled modulus of the context (the doubled call expects the doubled g
    and shift).  The cusp must be finite.
    """
    if ctx.is_infinity:
        raise ValueError("mu is undefined at the cusp at infinity (c = 0)")
    delta, D, b0, d0 = ctx.data_for(delta)
    p, q, r, s = _a0_matrix(ctx, delta)
    g %= delta
    h = (t * g) % delta
    g0 = g * p + h * r
    h0 = g * q + h * s
    gbar, hbar = g0 % delta, h0 % delta
    b1, b2 = (g0 - gbar) // delta, (h0 - hbar) // delta
    eta2_phase = Fraction(p + s, 12 * r) - dedekind_sum(s, r) - Fraction(1, 4)
    phase = (_siegel_norm_phase(delta, g, h) + eta2_phase
             + _translation_phase(delta, gbar, hbar, b1, b2)
             - _siegel_norm_phase(delta, gbar, hbar))
    phase = 2 * phase
    return phase - 2 * math.floor(phase / 2)


def ord_t_at_cusp(spec: PartitionSpec, ctx: CuspContext, t: int) -> Fraction:
    """Order at the cusp of the shifted generating function F_S(tau + t/delta):

        (D^2/2delta) sum_g [ (eps^2/2) P2(2g(delta a + t c)/(eps delta D))
                              - P2(g(delta a + t c)/(delta D)) ].
    """
    delta, D, eps = ctx.delta, ctx.D, ctx.epsilon
    if spec.delta != delta:
        raise ValueError("context modulus does not match the spec")
    total = Fraction(0)
    for g in spec.parts:
        w = g * (delta * ctx.a + t * ctx.c)
        total += (Fraction(eps ** 2, 2) * p2(Fraction(2 * w, eps * delta * D))
                  - p2(Fraction(w, delta * D)))
    return Fraction(D * D, 2 * delta) * total


def c_phase(ctx: CuspContext, delta: int, g: int, t: int, ell, branch: int) -> Fraction:
    """Per-factor phase exponent at the cusp: branch*h'/delta - D*b0*ell/delta^2.

    `branch` (+1 or -1) selects the residue family the factor index belongs
    to; the caller supplies it explicitly.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    delta, D, b0, d0 = ctx.data_for(delta)
    hp = g * (ctx.a * b0 + ctx.b * D + t * d0 * ctx.a)
    return branch * Fraction(hp, delta) - Fraction(D * b0, delta ** 2) * Fraction(ell)


def is_branch_degenerate(ctx: CuspContext, g: int, t: int) -> bool:
    """True when the two sign families of the factor residues coincide,
    i.e. 2*g' = 0 (mod delta)."""
    gp, _ = gh_primed(ctx, g, t)
    return (2 * gp) % ctx.delta == 0


def special_part_families(spec: PartitionSpec, ctx: CuspContext, t: int):
    """The residue families of the cusp-expansion factors.

    Returns a list of (g, sign, residue, modulus) with modulus
    4*delta/eps^2: admissible part values for (g, sign) are the positive
    integers congruent to sign*(4g'/eps^2) + (3 - eps)*delta.  When the two
    families of some g coincide a DegenerateBranchWarning is emitted (values
    stay exact; the families are simply kept separate).
    """
    delta, eps = ctx.delta, ctx.epsilon
    if spec.delta != delta:
        raise ValueError("context modulus does not match the spec")
    modulus = 4 * delta // eps ** 2
    fams = []
    for g in spec.parts:
        gp, _ = gh_primed(ctx, g, t)
        base = (4 * gp) // eps ** 2 + (3 - eps) * delta
        plus = base % modulus
        minus = (-base) % modulus
        if plus == minus:
            warnings.warn(
                f"coinciding sign families at cusp {ctx.a}/{ctx.c} "
                f"(g={g}, t={t}): both classes are {plus} mod {modulus}",
                DegenerateBranchWarning, stacklevel=2)
        fams.append((g, 1, plus, modulus))
        fams.append((g, -1, minus, modulus))
    return fams


def _z_value(spec: PartitionSpec, ctx: CuspContext, t: int) -> CyclotomicNumber:
    # Leading coefficient, defined for every cusp (at infinity it is the
    # bare shift twist e(t*ord_S/delta); mu vanishes there).
    delta = ctx.delta
    if spec.delta != delta:
        raise ValueError("context modulus does not match the spec")
    phase = Fraction(0)
    extra = CyclotomicNumber.one()
    for g in spec.parts:
        phase += Fraction(t) * p2(Fraction(g, delta)) / 2
        if not ctx.is_infinity:
            phase += (mu(ctx, 2 * delta, 2 * g, 2 * t) - mu(ctx, delta, g, t)) / 2
            gp, hp = gh_primed(ctx, g, t)
            g2p, h2p = gh_primed_scaled(ctx, g, t)
            num = alpha(2 * delta, g2p, h2p)
            if not (num == 1):
                extra = extra * num
            den_inv = _alpha_inverse(delta, gp, hp)
            if not (den_inv == 1):
                extra = extra * den_inv
    if not ctx.is_infinity:
        phase -= Fraction(ctx.b0) * ord_t_at_cusp(spec, ctx, t) / ctx.D
    return root_of_unity(phase - math.floor(phase)) * extra


def z_leading(spec: PartitionSpec, ctx: CuspContext, t: int) -> CyclotomicNumber:
    """First coefficient of the expansion of F_S(tau + t/delta) at the cusp:

        e( (1/2) sum_g (t P2(g/delta) + mu[2delta,2g,2t] - mu[delta,g,t])
           - b0*ord/D ) * prod_g alpha(2delta, (4/eps)g', 2 eps h') / alpha(delta, g', h').

    Rejects the cusp at infinity, where the leading coefficient of the
    defining series is 1 by construction.
    """
    if ctx.is_infinity:
        raise ValueError("z_leading is undefined at the cusp at infinity")
    return _z_value(spec, ctx, t)


def expansion_at_cusp(spec: PartitionSpec, ctx: CuspContext, t: int,
                      terms: int) -> QSeries:
    """Exact expansion of F_S(tau + t/delta) at a finite cusp:

        Z * q^ord * prod_{(g, sign)} prod_{parts l} (1 + e(C + eps/2) q^(grade*l)),

    with grade = eps^2 D^2 / (4 delta^2) and C the per-factor phase; the
    coefficient of q^(ord + grade*n) is Z times the twisted special-partition
    number of n.  `terms` counts the retained powers of q^grade.
    """
    if ctx.is_infinity:
        raise ValueError("use f_s_expansion for the expansion at infinity")
    if terms < 1:
        raise ValueError("need at least one term")
    delta, D, eps = ctx.delta, ctx.D, ctx.epsilon
    grade = Fraction(eps * eps * D * D, 4 * delta * delta)
    o = ord_t_at_cusp(spec, ctx, t)
    half = Fraction(eps, 2)
    factors = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBranchWarning)
        fams = special_part_families(spec, ctx, t)
    for g, sign, residue, modulus in fams:
        l = residue if residue else modulus
        while l < terms:
            ph = c_phase(ctx, delta, g, t, Fraction(eps * eps * l, 4), sign) + half
            factors.append((root_of_unity(ph - math.floor(ph)), Fraction(l), 1))
            l += modulus
    prod = sparse_factor_product(factors, Fraction(terms))
    z = _z_value(spec, ctx, t)
    lattice = math.lcm(o.denominator, grade.denominator)
    step = int(grade * lattice)
    lead = int(o * lattice)
    coeffs: list = [0] * ((len(prod.coeffs) - 1) * step + 1) if prod.coeffs else []
    for i, cf in enumerate(prod.coeffs):
        if cf:
            coeffs[i * step] = cf * z if not (cf == 1) else z
    # prod has offset 0 (constant term 1), precision `terms` in the grade variable
    return QSeries(lattice, lead, coeffs, lead + terms * step)

"""Congruence-restricted distinct-part partition counting and the ladder of
twisted coefficients that describes generating-function expansions at cusps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import CyclotomicNumber, root_of_unity
from .etaq import (CuspContext, PartitionSpec, c_phase, ord_s, ord_t_at_cusp,
                   special_part_families, _z_value)

__all__ = [
    "SpecialPartition",
    "LimitExceededError",
    "IntegralityError",
    "count_ps",
    "count_ps_table",
    "count_distinct_parts_table",
    "enumerate_special",
    "w_twisted",
    "y_coeff",
    "x_combined",
]


class LimitExceededError(RuntimeError):
    """A special-partition enumeration would exceed the caller's limit."""


from .etaq import IntegralityError  # noqa: E402  (shared error type)


def count_ps_table(spec: PartitionSpec, n_max: int) -> list[int]:
    """p_S(0..n_max) by 0/1-knapsack over the admissible parts.

    Counters are Python big integers; memory is O(n_max).
    """
    return count_distinct_parts_table(spec.part_values(n_max), n_max)


def count_distinct_parts_table(parts, n_max: int) -> list[int]:
    """Partitions of 0..n_max into distinct parts drawn from `parts`."""
    table = [0] * (n_max + 1)
    table[0] = 1
    for l in parts:
        if l > n_max:
            continue
        # descending knapsack update, vectorized by slice copies
        table[l:] = [x + y for x, y in zip(table[l:], table)]
    return table


def count_ps(spec: PartitionSpec, n: int) -> int:
    """p_S(n): partitions of n into distinct parts = +-g (mod delta), g in S."""
    if n < 0:
        return 0
    return count_ps_table(spec, n)[n]


@dataclass(frozen=True)
class SpecialPartition:
    """A collection of per-family sets of distinct positive integers.

    Families are indexed by (g, sign): the parts of family (g, sign) lie in
    one arithmetic progression mod 4*delta/eps^2 determined by the cusp
    data.  The two families of one g usually live in different residue
    classes; when the classes coincide the families are still kept separate
    (a part value may then appear once in each).
    """

    parts: tuple[tuple[int, int, tuple[int, ...]], ...]  # (g, sign, values)

    @property
    def total(self) -> int:
        return sum(sum(v) for _, _, v in self.parts)

    def all_parts(self) -> list[int]:
        out = []
        for _, _, vals in self.parts:
            out.extend(vals)
        return sorted(out)


def _family_parts(residue: int, modulus: int, n: int) -> list[int]:
    first = residue if residue else modulus
    return list(range(first, n + 1, modulus))


def enumerate_special(spec: PartitionSpec, ctx: CuspContext, t: int, n: int,
                      limit: int = 10 ** 6) -> list[SpecialPartition]:
    """All special partitions of n for the residue data of (ctx, t).

    Output order is deterministic: families ordered by (g, sign descending),
    partitions lexicographic in their part tuples.  Raises
    LimitExceededError when more than `limit` partitions would be produced.
    """
    if n < 0:
        return []
    fams = special_part_families(spec, ctx, t)
    fam_parts = [(g, s, _family_parts(res, mod, n)) for g, s, res, mod in fams]
    results: list[SpecialPartition] = []

    def descend(idx: int, remaining: int, chosen):
        if idx == len(fam_parts):
            if remaining == 0:
                if len(results) >= limit:
                    raise LimitExceededError(
                        f"more than {limit} special partitions of {n}")
                results.append(SpecialPartition(tuple(chosen)))
            return
        g, s, values = fam_parts[idx]
        # subsets of `values` summing to <= remaining, smallest-first
        def pick(start: int, rem: int, acc):
            descend(idx + 1, rem, chosen + [(g, s, tuple(acc))])
            total_left = 0
            for j in range(start, len(values)):
                if values[j] > rem:
                    break
                acc.append(values[j])
                pick(j + 1, rem - values[j], acc)
                acc.pop()
        pick(0, remaining, [])

    descend(0, n, [])
    results.sort(key=lambda sp: sp.parts)
    return results


def w_twisted(spec: PartitionSpec, ctx: CuspContext, t: int, n: int,
              limit: int = 10 ** 6) -> CyclotomicNumber:
    """Twisted special-partition number: the sum over special partitions of n
    of e( sum over parts of (C(eps^2*part/4) + eps/2) ).

    Phases are accumulated during the search (partitions are not
    materialized); these numbers are the cusp-expansion coefficients of the
    shifted generating function, up to the leading factor.
    """
    if n < 0:
        return CyclotomicNumber.zero()
    delta, eps = ctx.delta, ctx.epsilon
    fams = special_part_families(spec, ctx, t)
    half = Fraction(eps, 2)
    fam_data = []
    for g, s, res, mod in fams:
        values = _family_parts(res, mod, n)
        phases = [c_phase(ctx, delta, g, t, Fraction(eps * eps * v, 4), s) + half
                  for v in values]
        fam_data.append((values, phases))

    counts: dict[Fraction, int] = {}
    seen = 0

    def descend(idx: int, remaining: int, phase: Fraction):
        nonlocal seen
        if idx == len(fam_data):
            if remaining == 0:
                seen += 1
                if seen > limit:
                    raise LimitExceededError(
                        f"more than {limit} special partitions of {n}")
                key = phase - math.floor(phase)
                counts[key] = counts.get(key, 0) + 1
            return
        values, phases = fam_data[idx]

        def pick(start: int, rem: int, acc: Fraction):
            descend(idx + 1, rem, acc)
            for j in range(start, len(values)):
                if values[j] > rem:
                    break
                pick(j + 1, rem - values[j], acc + phases[j])
        pick(0, remaining, phase)

    descend(0, n, Fraction(0))
    if not counts:
        return CyclotomicNumber.zero()
    conductor = math.lcm(*(ph.denominator for ph in counts))
    terms: dict[int, Fraction] = {}
    for ph, k in counts.items():
        e = int(ph * conductor) % conductor
        terms[e] = terms.get(e, Fraction(0)) + k
    return CyclotomicNumber(conductor, terms)


def y_coeff(spec: PartitionSpec, ctx: CuspContext, t: int, m) -> CyclotomicNumber:
    """Coefficient of q^m in the expansion of F_S(tau + t/delta) at the cusp:
    Z * W((4 delta^2/eps^2 D^2)(m - ord)), and 0 off the exponent grid."""
    m = Fraction(m)
    delta, D, eps = ctx.delta, ctx.D, ctx.epsilon
    o = ord_t_at_cusp(spec, ctx, t)
    narg = (m - o) * Fraction(4 * delta * delta, eps * eps * D * D)
    if narg.denominator != 1 or narg < 0:
        return CyclotomicNumber.zero()
    w = w_twisted(spec, ctx, t, int(narg))
    if not w:
        return w
    return _z_value(spec, ctx, t) * w


def x_combined(spec: PartitionSpec, residues, ctx: CuspContext, m) -> CyclotomicNumber:
    """Aggregated coefficient of the residue-sieved generating function at a
    cusp: (1/delta) * sum_t (sum_{r in R} e((delta - t r)/delta)) * Y_t(m).

    Requires ord_S to be an integer (the sieve needs integer exponents at
    infinity)."""
    o = ord_s(spec)
    if o.denominator != 1:
        raise IntegralityError(f"ord_S = {o} is not an integer")
    delta = ctx.delta
    residues = sorted(set(r % delta for r in residues))
    total = CyclotomicNumber.zero(1)
    for t in range(delta):
        weight = CyclotomicNumber.zero(1)
        for r in residues:
            weight = weight + root_of_unity(Fraction((delta - t * r) % delta, delta))
        if not weight:
            continue
        y = y_coeff(spec, ctx, t, m)
        if not y:
            continue
        total = total + weight * y
    return total * Fraction(1, delta)

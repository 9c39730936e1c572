"""Monic ensembles: enumeration and sampling of M_n, short intervals I(A;h),
and the reversal map theta_n carrying short intervals onto arithmetic
progressions mod a power of x.

Monic degree-n polynomials are indexed little-endian: index(f) = sum c_j q^j
over j < n, so the constant coefficient varies fastest and every short
interval class is a contiguous index block of length q^{h+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetExceeded, DegreeExceedsN, DegreeMismatch, DegreeOutOfRange
from .field import FieldCtx
from .polyring import Poly


def monic_index(f: Poly) -> int:
    """Little-endian index of a monic polynomial within M_n."""
    if not f.is_monic():
        raise ValueError("monic polynomial required")
    q = f.ctx.p
    idx = 0
    for c in reversed(f.coeffs[:-1]):
        idx = idx * q + c
    return idx


def index_to_monic(ctx: FieldCtx, n: int, idx: int) -> Poly:
    """Inverse of monic_index on [0, q^n)."""
    q = ctx.p
    coeffs = []
    for _ in range(n):
        idx, c = divmod(idx, q)
        coeffs.append(c)
    if idx:
        raise ValueError("index out of range")
    coeffs.append(1)
    return Poly(ctx, coeffs)


@dataclass(frozen=True)
class IntervalSpec:
    """The short interval I(A;h) = {f in M_n : deg(f - A) <= h} of size
    H = q^{h+1}."""

    A: Poly
    h: int

    def __post_init__(self):
        if not self.A.is_monic():
            raise ValueError("interval center must be monic")
        if not 0 <= self.h < self.A.degree:
            raise DegreeOutOfRange("need 0 <= h < n")

    @property
    def n(self) -> int:
        return self.A.degree

    @property
    def size(self) -> int:
        return self.A.ctx.p ** (self.h + 1)

    def class_index(self) -> int:
        """Index of the interval among the q^{n-h-1} classes partitioning M_n."""
        return monic_index(self.A) // self.size

    def contains(self, f: Poly) -> bool:
        if not f.is_monic() or f.degree != self.n:
            return False
        return (f - self.A).degree <= self.h


def enumerate_monic(ctx: FieldCtx, n: int, start: int = 0,
                    stop: int | None = None,
                    budget: int | None = None) -> Iterator[Poly]:
    """All monic degree-n polynomials in index order, restartable from any
    index for sharding."""
    if n < 0:
        raise DegreeOutOfRange("n >= 0 required")
    total = ctx.p**n
    if stop is None or stop > total:
        stop = total
    if budget is not None and stop - start > budget:
        raise BudgetExceeded(f"{stop - start} polynomials exceed budget {budget}")
    for idx in range(start, stop):
        yield index_to_monic(ctx, n, idx)


def interval_members(spec: IntervalSpec) -> Iterator[Poly]:
    """The q^{h+1} members of I(A;h), in index order."""
    ctx = spec.A.ctx
    n = spec.n
    base = spec.class_index() * spec.size
    for off in range(spec.size):
        yield index_to_monic(ctx, n, base + off)


def interval_representatives(ctx: FieldCtx, n: int, h: int) -> Iterator[IntervalSpec]:
    """One IntervalSpec per class, centers with zero coefficients in degrees
    0..h; the q^{n-h-1} intervals partition M_n."""
    if not 0 <= h < n:
        raise DegreeOutOfRange("need 0 <= h < n")
    H = ctx.p ** (h + 1)
    for c in range(ctx.p ** (n - h - 1)):
        yield IntervalSpec(A=index_to_monic(ctx, n, c * H), h=h)


def reversal(f: Poly, n: int) -> Poly:
    """theta_n(f) = x^n f(1/x): coefficient j of the result is coefficient
    n - j of f."""
    if f.degree > n:
        raise DegreeExceedsN(f"deg f = {f.degree} > n = {n}")
    return Poly(f.ctx, [f[n - j] for j in range(n + 1)])


@dataclass(frozen=True)
class ResidueClass:
    """The arithmetic progression {g : g = residue mod modulus, deg g <= bound}."""

    residue: Poly
    modulus: Poly
    degree_bound: int

    def members(self) -> Iterator[Poly]:
        ctx = self.residue.ctx
        m = self.modulus.degree
        k = self.degree_bound - m
        for t in range(ctx.p ** (k + 1)):
            coeffs = []
            for _ in range(k + 1):
                t, c = divmod(t, ctx.p)
                coeffs.append(c)
            yield self.residue + self.modulus * Poly(ctx, coeffs)


def interval_to_ap(B: Poly, n: int, h: int) -> tuple[IntervalSpec, ResidueClass]:
    """The two sides of the bijection theta_n: I(x^{h+1} B; h) <->
    {g in P_{<=n} : g = theta_{n-h-1}(B) mod x^{n-h}}."""
    if not (0 <= h <= n - 2):
        raise DegreeOutOfRange("need 0 <= h <= n-2")
    m = n - h - 1
    if B.degree != m or not B.is_monic():
        raise DegreeMismatch(f"B must be monic of degree {m}")
    ctx = B.ctx
    center = Poly.monomial(ctx, h + 1) * B
    interval = IntervalSpec(A=center, h=h)
    ap = ResidueClass(residue=reversal(B, m),
                      modulus=Poly.monomial(ctx, n - h),
                      degree_bound=n)
    return interval, ap


def verify_interval_ap_bijection(B: Poly, n: int, h: int) -> bool:
    """Elementwise image check: theta_n of the interval equals the progression."""
    interval, ap = interval_to_ap(B, n, h)
    image = {reversal(f, n) for f in interval_members(interval)}
    target = set(ap.members())
    return image == target


def sample_monic(ctx: FieldCtx, n: int, rng) -> Poly:
    """Uniform monic polynomial of degree n >= 1 from a numpy Generator (or
    anything with .integers)."""
    if n < 1:
        raise DegreeOutOfRange("n >= 1 required")
    if hasattr(rng, "integers"):
        coeffs = [int(c) for c in rng.integers(0, ctx.p, size=n)]
    else:
        coeffs = [rng.randrange(ctx.p) for _ in range(n)]
    coeffs.append(1)
    return Poly(ctx, coeffs)

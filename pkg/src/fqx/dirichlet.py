"""Dirichlet characters on F_q[x]/(Q), their L-functions, and the
unitarized Frobenius eigenangles.

Supported modulus shapes: Q = x^m and squarefree Q (the shapes the
short-interval and arithmetic-progression theorems use).  The unit group is
represented by a computed basis of generators with orders d_i and a discrete
log table, so characters are exponent tuples and every flag (even,
primitive) is an exact integer test.

The basis construction is candidate-then-verify: for x^m the candidate
1-unit generators are 1 + x^j (p not dividing j) with orders p^ceil(log_p(m/j)),
for squarefree Q the CRT factors are cyclic with seeded generator search;
the discrete-log enumeration then proves the candidate is a basis (any
collision or undercount raises).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import batch as _batch
from . import rmt as _rmt
from .errors import (
    BudgetExceeded,
    NotEvenPrimitive,
    PreconditionError,
    RootFindingDidNotConverge,
    TrivialCharacter,
    UnsupportedModulusShape,
)
from .field import FieldCtx, make_field
from .polyring import Poly, factor, powmod

ROOT_TOL = 1e-6
COEFF_TOL = 1e-9


def _trial_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    primes = list(_trial_factor(p - 1))
    for c in range(2, p):
        if all(pow(c, (p - 1) // ell, p) != 1 for ell in primes):
            return c
    raise RuntimeError("unreachable for prime p")


def _mul_block_fixed(C: np.ndarray, g: np.ndarray, q_low: np.ndarray, p: int) -> np.ndarray:
    """Rows of residues (deg < m) times a fixed residue g, mod monic
    Q = x^m + q_low."""
    rows, m = C.shape
    acc = np.zeros((rows, 2 * m - 1), dtype=np.int64)
    for j in range(m):
        if g[j]:
            acc[:, j : j + m] += C * int(g[j])
    for k in range(2 * m - 2, m - 1, -1):
        t = acc[:, k] % p
        acc[:, k - m : k] -= t[:, None] * q_low
    return acc[:, :m] % p


def _index_rows(idx: np.ndarray, m: int, p: int) -> np.ndarray:
    idx = idx.copy()
    out = np.empty((idx.size, m), dtype=np.int64)
    for j in range(m):
        idx, out[:, j] = np.divmod(idx, p)
    return out


def _rows_index(rows: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1] - 1, -1, -1):
        out = out * p + rows[:, j]
    return out


class DirichletGroup:
    """Unit group of F_q[x]/(Q) with a verified generator basis and a
    discrete-log table.

    Attributes
    ----------
    Q : monic Poly modulus
    shape : "x_power" or "squarefree"
    orders : tuple of basis orders d_i, product = phi
    pos : int64 array over residue indices; enumeration position of each
        unit in mixed-radix order (basis 0 fastest), -1 for non-units
    digits : int32 array (q^m, r) of exponent tuples (rows of non-units
        are zero and must be masked via pos)
    """

    def __init__(self, Q: Poly, shape: str, gens: list[Poly], orders: list[int],
                 scalar_root: int):
        ctx = Q.ctx
        p = ctx.p
        m = Q.degree
        self.Q = Q
        self.ctx = ctx
        self.shape = shape
        self.generators = tuple(gens)
        self.orders = tuple(orders)
        self.phi = math.prod(orders) if orders else 1
        self.L = math.lcm(*orders) if orders else 1
        self.scalar_root = scalar_root
        self.q_low = np.array(Q.coeffs[:m], dtype=np.int64)

        # enumerate the subgroup generated by the candidate basis
        indices = np.array([1], dtype=np.int64)  # residue index of 1
        for G, d in zip(gens, orders):
            gc = np.zeros(m, dtype=np.int64)
            for j, c in enumerate(G.coeffs):
                gc[j] = c
            blocks = [indices]
            cur = _index_rows(indices, m, p)
            for _ in range(d - 1):
                cur = _mul_block_fixed(cur, gc, self.q_low, p)
                blocks.append(_rows_index(cur, p))
            indices = np.concatenate(blocks)
        if indices.size != self.phi or np.unique(indices).size != self.phi:
            raise UnsupportedModulusShape(
                "candidate basis failed verification (collision or undercount)")
        pos = np.full(p**m, -1, dtype=np.int64)
        pos[indices] = np.arange(self.phi, dtype=np.int64)
        self.pos = pos

        r = len(orders)
        digits = np.zeros((p**m, max(r, 1)), dtype=np.int32)
        val = np.where(pos >= 0, pos, 0)
        for i, d in enumerate(orders):
            val, digits[:, i] = np.divmod(val, d)
        self.digits = digits[:, :r] if r else digits[:, :0]

        self.exp_table = np.exp(2j * np.pi * np.arange(self.L) / self.L)
        self.scalar_digits = tuple(int(v) for v in self.digits[scalar_root]) if r else ()
        self._dft = None
        self._kernel_digits = None

    def __repr__(self):
        return (f"DirichletGroup(Q={self.Q!r}, shape={self.shape}, "
                f"orders={self.orders}, phi={self.phi})")

    def unit_index(self, f: Poly) -> int:
        r = f % self.Q
        idx = 0
        for c in reversed(r.coeffs):
            idx = idx * self.ctx.p + c
        return idx

    def weight_vector(self, exps) -> np.ndarray:
        return np.array([c * (self.L // d) for c, d in zip(exps, self.orders)],
                        dtype=np.int64)

    def kernel_digits(self) -> np.ndarray:
        """Digit rows of the nontrivial kernel of reduction mod Q/P, per
        prime P | Q; for x^m these are the units 1 + a x^{m-1}."""
        if self._kernel_digits is None:
            p = self.ctx.p
            m = self.Q.degree
            if self.shape == "x_power" and m >= 2:
                ker = np.array([1 + a * p ** (m - 1) for a in range(1, p)],
                               dtype=np.int64)
                self._kernel_digits = self.digits[ker].astype(np.int64)
            else:
                self._kernel_digits = None
        return self._kernel_digits

    def dft_tables(self):
        """Coefficient lattices: tables[n][c] = conj(c_n(chi_c)) for all
        characters at once, n = 0..deg Q - 1."""
        if self._dft is None:
            self._dft = [self.character_transform(n, None) for n in range(self.Q.degree)]
        return self._dft

    def character_transform(self, n: int, weights) -> np.ndarray:
        """fftn of the (optionally weighted) indicator of monic degree-n
        residues over the exponent lattice, for n < deg Q (such f are their
        own residues).  Entry [c] is conj(sum_f w(f) chi_c(f)) over f
        coprime to Q."""
        p = self.ctx.p
        if n >= self.Q.degree:
            raise PreconditionError("character_transform needs n < deg Q")
        res = np.arange(p**n, 2 * p**n, dtype=np.int64)
        posn = self.pos[res]
        mask = posn >= 0
        digs = self.digits[res[mask]]
        W = np.zeros(self.orders if self.orders else (1,), dtype=complex)
        w = weights[mask] if weights is not None else np.ones(mask.sum())
        np.add.at(W, tuple(digs.T) if self.orders else (np.zeros(digs.shape[0], int),), w)
        return np.fft.fftn(W.reshape(self.orders if self.orders else (1,)))


def build_unit_group(Q: Poly, seed: int = 0, budget: int = 10**8) -> DirichletGroup:
    """Unit group mod Q for Q = x^m or squarefree Q.

    The residue table has q^deg Q entries; budget bounds that size.
    """
    if Q.degree < 1:
        raise PreconditionError("deg Q >= 1 required")
    Q = Q.monic()
    ctx = Q.ctx
    p = ctx.p
    m = Q.degree
    if p**m > budget:
        raise BudgetExceeded(f"residue table of size {p**m} exceeds budget {budget}")
    x_power = all(c == 0 for c in Q.coeffs[:m])

    gens: list[Poly] = []
    orders: list[int] = []
    if x_power:
        if p > 2:
            c = _primitive_root(p)
            gens.append(Poly.constant(ctx, c))
            orders.append(p - 1)
            scalar_root = c
        else:
            scalar_root = 1
        for j in range(1, m):
            if j % p == 0:
                continue
            t = 1
            while j * p**t < m:
                t += 1
            gens.append(Poly(ctx, [1] + [0] * (j - 1) + [1]))
            orders.append(p**t)
        return DirichletGroup(Q, "x_power", gens, orders, scalar_root)

    fac = factor(Q, seed=seed)
    if any(e > 1 for _, e in fac.factors):
        raise UnsupportedModulusShape(
            "supported moduli are x^m and squarefree Q")
    rng = random.Random(seed)
    primes = [P for P, _ in fac.factors]
    for P in primes:
        d = P.degree
        order = p**d - 1
        ell_list = list(_trial_factor(order)) if order > 1 else []
        g = None
        if order == 1:
            g = Poly.one(ctx)
        while g is None:
            cand = Poly(ctx, [rng.randrange(p) for _ in range(d)])
            if cand.is_zero():
                continue
            if all(powmod(cand, order // ell, P) != Poly.one(ctx) for ell in ell_list):
                g = cand
        # CRT lift: congruent to g mod P, to 1 mod Q/P
        R = Q // P
        e = (R * _poly_inverse_mod(R, P)) % Q
        lift = (Poly.one(ctx) + (g - Poly.one(ctx)) * e) % Q
        gens.append(lift)
        orders.append(order)
    scalar_root = _primitive_root(p)
    return DirichletGroup(Q, "squarefree", gens, orders, scalar_root)


def _poly_inverse_mod(f: Poly, g: Poly) -> Poly:
    """f^{-1} mod g by the extended Euclidean algorithm."""
    ctx = f.ctx
    r0, r1 = g, f % g
    s0, s1 = Poly.zero(ctx), Poly.one(ctx)
    while not r1.is_zero():
        qt, rr = divmod(r0, r1)
        r0, r1 = r1, rr
        s0, s1 = s1, s0 - qt * s1
    if r0.degree != 0:
        raise PreconditionError("not invertible")
    return s0 * ctx.inv(r0.coeffs[0])


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(g_i) = exp(2 pi i c_i / d_i) on the group basis."""

    group: DirichletGroup
    exps: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.exps)

    def phase_int(self, residue_index: int):
        """Exponent t with chi = exp(2 pi i t / L) at the residue, or None
        on non-units.  Exact integer arithmetic."""
        g = self.group
        if g.pos[residue_index] < 0:
            return None
        t = 0
        for c, d, e in zip(self.exps, g.orders, g.digits[residue_index]):
            t += c * (g.L // d) * int(e)
        return t % g.L

    @property
    def is_even(self) -> bool:
        return self.phase_int(self.group.scalar_root) == 0

    @property
    def is_primitive(self) -> bool:
        g = self.group
        if g.shape == "x_power":
            if g.Q.degree == 1:
                return not self.is_trivial
            ker = g.kernel_digits()
            w = self.group.weight_vector(self.exps)
            t = (ker @ w) % g.L
            return bool((t != 0).any())
        return all(c != 0 for c in self.exps)

    def label(self) -> str:
        return ":".join(str(c) for c in self.exps) if self.exps else "0"


def trivial_character(group: DirichletGroup) -> DirichletCharacter:
    return DirichletCharacter(group, (0,) * len(group.orders))


def list_characters(group: DirichletGroup, filter: str = "all"):
    """All characters, optionally filtered: all | even | primitive |
    even_primitive."""
    if filter not in ("all", "even", "primitive", "even_primitive"):
        raise ValueError(f"unknown filter {filter!r}")
    for exps in np.ndindex(*group.orders):
        chi = DirichletCharacter(group, tuple(int(c) for c in exps))
        if filter in ("even", "even_primitive") and not chi.is_even:
            continue
        if filter in ("primitive", "even_primitive") and not chi.is_primitive:
            continue
        yield chi


def char_eval(chi: DirichletCharacter, f: Poly) -> complex:
    """chi(f): zero on non-units, else the exact root of unity."""
    t = chi.phase_int(chi.group.unit_index(f))
    if t is None:
        return 0j
    return complex(chi.group.exp_table[t])


# L-functions -------------------------------------------------------------------


@dataclass(frozen=True)
class LPolynomial:
    """L(u, chi) = sum c_j u^j with c_0 = 1 and deg <= deg Q - 1.

    inverse_roots are the gamma_j with L(u) = prod (1 - gamma_j u); angles
    are the unitarized Frobenius eigenphases (primitive chi only, None
    otherwise), with the trivial zero at u = 1 removed first for even chi.
    """

    character: DirichletCharacter
    coeffs: np.ndarray
    inverse_roots: np.ndarray
    angles: np.ndarray | None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def value(self, u: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1], u))


def _dk_roots(coeff_rows: np.ndarray, iters: int = 400, tol: float = 1e-13) -> np.ndarray:
    """Durand-Kerner roots of monic-normalized rows [1, a_1, .., a_D]
    (descending powers); deterministic spiral start."""
    rows, w = coeff_rows.shape
    D = w - 1
    c = coeff_rows / coeff_rows[:, :1]
    z = (0.4 + 0.9j) ** np.arange(1, D + 1)
    z = np.broadcast_to(z, (rows, D)).copy()
    eye = np.eye(D, dtype=bool)
    for _ in range(iters):
        pz = np.broadcast_to(c[:, :1], (rows, D)).astype(complex)
        for j in range(1, D + 1):
            pz = pz * z + c[:, j : j + 1]
        diff = z[:, :, None] - z[:, None, :]
        diff[:, eye] = 1.0
        denom = diff.prod(axis=2)
        step = pz / denom
        z -= step
        if np.max(np.abs(step)) < tol:
            break
    return z


def _match_roots(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff-style max nearest-neighbor distance between root multisets."""
    if a.size == 0:
        return 0.0
    d1 = np.abs(a[:, None] - b[None, :]).min(axis=1).max()
    d2 = np.abs(b[:, None] - a[None, :]).min(axis=1).max()
    return float(max(d1, d2))


def _inverse_roots(coeffs: np.ndarray) -> np.ndarray:
    """Inverse roots of L(u) = sum c_j u^j: roots of the reversed polynomial,
    found by companion-matrix eigenvalues and checked against Durand-Kerner."""
    D = len(coeffs) - 1
    if D == 0:
        return np.zeros(0, dtype=complex)
    primary = np.roots(coeffs)  # c_0 z^D + c_1 z^{D-1} + ... + c_D
    check = _dk_roots(coeffs[None, :])[0]
    if _match_roots(primary, check) > ROOT_TOL:
        raise RootFindingDidNotConverge(
            "companion-matrix and Durand-Kerner roots disagree")
    return primary


def l_polynomial(chi: DirichletCharacter, mode: str = "naive") -> LPolynomial:
    """The L-polynomial of a nontrivial character.

    mode "naive": per-character sums c_n = sum over monic f of degree
    n < deg Q coprime to Q of chi(f) (such f are their own residues).
    mode "dft": read the same coefficients out of the group-wide Fourier
    transform (computed once per group and cached).
    """
    if chi.is_trivial:
        raise TrivialCharacter("L is formed for nontrivial characters")
    g = chi.group
    p = g.ctx.p
    m = g.Q.degree
    c = np.zeros(m, dtype=complex)
    if mode == "naive":
        w = g.weight_vector(chi.exps)
        for n in range(m):
            lo, hi = p**n, 2 * p**n
            posn = g.pos[lo:hi]
            mask = posn >= 0
            if not mask.any():
                continue
            t = (g.digits[lo:hi][mask] @ w) % g.L
            c[n] = g.exp_table[t].sum()
    elif mode == "dft":
        tabs = g.dft_tables()
        for n in range(m):
            c[n] = np.conj(tabs[n][chi.exps])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    D = m - 1
    while D > 0 and abs(c[D]) < COEFF_TOL:
        D -= 1
    coeffs = c[: D + 1]
    roots = _inverse_roots(coeffs)
    angles = None
    if chi.is_primitive:
        rr = roots
        if chi.is_even and D > 0:
            k = int(np.argmin(np.abs(rr - 1.0)))
            rr = np.delete(rr, k)
        angles = np.sort(np.angle(rr / math.sqrt(p)) % (2 * math.pi))
    return LPolynomial(character=chi, coeffs=coeffs, inverse_roots=roots,
                       angles=angles)


# weighted character sums ---------------------------------------------------------

_WEIGHT_CACHE: dict = {}
_RESIDUE_CACHE: dict = {}


def _weights_over_monic(ctx: FieldCtx, n: int, weight: str, k: int) -> np.ndarray | None:
    """Weight array over M_n in index order; None means all-ones."""
    if weight == "unit":
        return None
    key = (ctx.p, n, weight, k)
    if key in _WEIGHT_CACHE:
        return _WEIGHT_CACHE[key]
    if weight == "mobius":
        if n == 0:
            w = np.ones(1, dtype=np.int64)
        elif ctx.odd:
            w = _batch.batch_mobius(_batch.monic_block(ctx, n, 0, ctx.p**n), ctx)
        else:
            from .polyring import mobius
            from .ensembles import enumerate_monic
            w = np.array([mobius(f) for f in enumerate_monic(ctx, n)], dtype=np.int64)
    elif weight == "von_mangoldt":
        if n == 0:
            w = np.zeros(1, dtype=np.int64)
        else:
            w = _batch.batch_von_mangoldt(_batch.monic_block(ctx, n, 0, ctx.p**n), ctx, 0)
    elif weight == "divisor_k":
        from .polyring import divisor_k
        from .ensembles import enumerate_monic
        w = np.array([divisor_k(f, k) for f in enumerate_monic(ctx, n)], dtype=np.int64)
    else:
        raise ValueError(f"unknown weight {weight!r}")
    if len(_WEIGHT_CACHE) > 64:
        _WEIGHT_CACHE.clear()
    _WEIGHT_CACHE[key] = w
    return w


def _monic_residue_indices(group: DirichletGroup, n: int) -> np.ndarray:
    """Residue indices of all of M_n mod Q, in monic index order."""
    p = group.ctx.p
    m = group.Q.degree
    if n < m:
        return np.arange(p**n, 2 * p**n, dtype=np.int64)
    key = (p, group.Q.coeffs, n)
    if key in _RESIDUE_CACHE:
        return _RESIDUE_CACHE[key]
    block = _batch.monic_block(group.ctx, n, 0, p**n)
    res = _batch.reduce_mod(block, group.q_low, p)
    idx = _rows_index(res, p)
    if len(_RESIDUE_CACHE) > 16:
        _RESIDUE_CACHE.clear()
    _RESIDUE_CACHE[key] = idx
    return idx


def m_sum(n: int, chi: DirichletCharacter, weight: str = "unit", k: int = 2,
          budget: int | None = 10**8) -> complex:
    """M(n; w chi) = sum over monic f of degree n of w(f) chi(f).

    weight: unit | mobius | von_mangoldt | divisor_k (with k).
    """
    g = chi.group
    p = g.ctx.p
    if budget is not None and p**n > budget:
        raise BudgetExceeded(f"q^n = {p**n} exceeds budget {budget}")
    res = _monic_residue_indices(g, n)
    posn = g.pos[res]
    mask = posn >= 0
    w = g.weight_vector(chi.exps)
    t = (g.digits[res[mask]] @ w) % g.L
    vals = g.exp_table[t]
    wt = _weights_over_monic(g.ctx, n, weight, k)
    if wt is not None:
        vals = vals * wt[mask]
    return complex(vals.sum())


def weighted_character_sums(group: DirichletGroup, n: int, weight: str = "unit",
                            k: int = 2, budget: int | None = 10**8) -> np.ndarray:
    """M(n; w chi) for every character at once: lattice indexed by exponent
    tuples, computed by one weighted Fourier transform over the unit group."""
    p = group.ctx.p
    if budget is not None and p**n > budget:
        raise BudgetExceeded(f"q^n = {p**n} exceeds budget {budget}")
    res = _monic_residue_indices(group, n)
    posn = group.pos[res]
    mask = posn >= 0
    digs = group.digits[res[mask]]
    wt = _weights_over_monic(group.ctx, n, weight, k)
    w = wt[mask].astype(complex) if wt is not None else np.ones(int(mask.sum()), dtype=complex)
    shape = group.orders if group.orders else (1,)
    W = np.zeros(shape, dtype=complex)
    np.add.at(W, tuple(digs.T) if group.orders else (np.zeros(digs.shape[0], int),), w)
    return np.conj(np.fft.fftn(W))


def explicit_formula_check(n: int, chi: DirichletCharacter,
                           lpoly: LPolynomial | None = None):
    """Both sides of M(n; mu chi) = sum_{k=0}^n q^{k/2} tr Sym^k Theta_chi
    for even primitive chi, computed independently; returns
    (lhs, rhs, abs error)."""
    if not (chi.is_even and chi.is_primitive) or chi.is_trivial:
        raise NotEvenPrimitive("explicit formula needs an even primitive character")
    q = chi.group.ctx.p
    lhs = m_sum(n, chi, weight="mobius")
    if lpoly is None:
        lpoly = l_polynomial(chi)
    ang = lpoly.angles
    if n == 0:
        rhs = 1 + 0j
    elif ang.size == 0:
        rhs = 1 + 0j
    else:
        ps = _rmt.power_sums(ang, n)
        h = _rmt.homogeneous_from_power(ps, n)
        rhs = complex(sum(q ** (kk / 2) * h[kk] for kk in range(n + 1)))
    return lhs, rhs, abs(lhs - rhs)


def generating_identity_error(chi: DirichletCharacter,
                              lpoly: LPolynomial | None = None) -> float:
    """Max coefficient deviation of (sum_n M(n; mu chi) u^n) L(u, chi) = 1
    through degree deg Q + 2."""
    if chi.is_trivial:
        raise TrivialCharacter("identity stated for nontrivial characters")
    if lpoly is None:
        lpoly = l_polynomial(chi)
    m = chi.group.Q.degree
    top = m + 2
    M = [m_sum(n, chi, weight="mobius") for n in range(top + 1)]
    c = lpoly.coeffs
    worst = 0.0
    for n in range(top + 1):
        acc = sum(c[j] * M[n - j] for j in range(0, min(n, len(c) - 1) + 1))
        worst = max(worst, abs(acc - (1.0 if n == 0 else 0.0)))
    return worst


# Katz equidistribution ------------------------------------------------------------


def _lattice_flags(group: DirichletGroup):
    """(even, primitive) boolean lattices over all exponent tuples."""
    orders = group.orders
    L = group.L
    idx = np.indices(orders, dtype=np.int64)
    wbase = np.array([L // d for d in orders], dtype=np.int64)

    def phase(digrow):
        t = np.zeros(orders, dtype=np.int64)
        for i in range(len(orders)):
            t += idx[i] * (wbase[i] * int(digrow[i]))
        return t % L

    even = phase(np.array(group.scalar_digits, dtype=np.int64)) == 0
    if group.shape == "x_power":
        if group.Q.degree == 1:
            prim = np.ones(orders, dtype=bool)
            prim[(0,) * len(orders)] = False
        else:
            prim = np.zeros(orders, dtype=bool)
            for row in group.kernel_digits():
                prim |= phase(row) != 0
    else:
        prim = np.ones(orders, dtype=bool)
        for i in range(len(orders)):
            sl = [slice(None)] * len(orders)
            sl[i] = 0
            prim[tuple(sl)] = False
    return even, prim


def frobenius_angles_even_primitive(group: DirichletGroup) -> np.ndarray:
    """(count, deg Q - 2) unitarized eigenangle rows for every even primitive
    character, via the group-wide transform and batched dual root-finding."""
    m = group.Q.degree
    q = group.ctx.p
    if m < 3:
        raise PreconditionError("need deg Q >= 3 for a nonempty spectrum")
    even, prim = _lattice_flags(group)
    sel = even & prim
    tabs = group.dft_tables()
    C = int(sel.sum())
    coeffs = np.empty((C, m), dtype=complex)
    for n in range(m):
        coeffs[:, n] = np.conj(tabs[n][sel])
    # remove the trivial zero: L = (1-u) Ltilde, Ltilde_j = sum_{i<=j} c_i
    full = np.cumsum(coeffs, axis=1)
    if np.abs(full[:, m - 1]).max() > 1e-6:
        raise RootFindingDidNotConverge("trivial zero removal residual too large")
    tilde = full[:, : m - 1]
    tilde = tilde / tilde[:, :1]
    D = m - 2
    comp = np.zeros((C, D, D), dtype=complex)
    comp[:, 0, :] = -tilde[:, 1:]
    comp[:, np.arange(1, D), np.arange(0, D - 1)] = 1.0
    primary = np.linalg.eigvals(comp)
    check = _dk_roots(tilde)
    worst = 0.0
    for i in range(C):
        worst = max(worst, _match_roots(primary[i], check[i]))
        if worst > ROOT_TOL:
            raise RootFindingDidNotConverge(
                "companion-matrix and Durand-Kerner roots disagree")
    return np.sort(np.angle(primary / math.sqrt(q)) % (2 * math.pi), axis=1)


def katz_average(N: int, q: int, statistic, samples: int = 100_000,
                 seed: int = 0):
    """Average of a center-invariant class statistic over the Frobenius
    conjugacy classes of all even primitive characters mod x^{N+2}, with the
    Haar Monte Carlo reference over U(N).

    The statistic must be invariant under scalar rotation (caller contract;
    see StatisticNotCenterInvariant).
    """
    if N < 2:
        raise PreconditionError("N >= 2 required")
    ctx = make_field(q)
    Q = Poly.monomial(ctx, N + 2)
    group = build_unit_group(Q)
    ang = frobenius_angles_even_primitive(group)
    if hasattr(statistic, "batch"):
        vals = np.asarray(statistic.batch(ang), dtype=float)
    else:
        vals = np.array([float(statistic(row)) for row in ang])
    empirical = float(vals.mean())
    reference = _rmt.mc_integral(statistic, N, samples, seed)[0]
    return empirical, reference

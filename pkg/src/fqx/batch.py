"""Vectorized engines for bulk polynomial arithmetic over F_p.

Internal module: everything here is cross-checked against the scalar
reference implementations in polyring.  Monic degree-n polynomials are
handled as int64 arrays of shape (rows, n) holding the coefficients of
degrees 0..n-1 (the leading 1 is implicit), in the little-endian index
order of ensembles.monic_index.

Numeric discipline: coefficients stay reduced mod p except inside short
delayed-reduction windows whose bounds fit comfortably in int64
(p <= 2^16 style moduli; the experiments use p <= a few hundred).
"""

from __future__ import annotations

import numpy as np

from .field import FieldCtx


def monic_block(ctx: FieldCtx, n: int, start: int, stop: int) -> np.ndarray:
    """Coefficient rows for monic index range [start, stop)."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, n), dtype=np.int64)
    for j in range(n):
        idx, out[:, j] = np.divmod(idx, ctx.p)
    return out


def block_index(block: np.ndarray, p: int) -> np.ndarray:
    """Inverse of monic_block: little-endian index of each row."""
    idx = np.zeros(block.shape[0], dtype=np.int64)
    for j in range(block.shape[1] - 1, -1, -1):
        idx = idx * p + block[:, j]
    return idx


def modinv_vec(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise a^(p-2) mod p; caller guarantees a != 0 mod p."""
    e = p - 2
    result = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


# modular arithmetic on coefficient rows -------------------------------------


def mul_by_x_mod(g: np.ndarray, f_low: np.ndarray, p: int) -> np.ndarray:
    """x*g mod f for rows of deg<n polynomials g, monic moduli f = x^n + f_low."""
    t = g[:, -1]
    out = np.empty_like(g)
    out[:, 1:] = g[:, :-1]
    out[:, 0] = 0
    out -= t[:, None] * f_low
    return out % p


def block_mulmod(a: np.ndarray, b: np.ndarray, f_low: np.ndarray, p: int) -> np.ndarray:
    """a*b mod f rowwise; a, b of shape (rows, n), moduli x^n + f_low."""
    rows, n = a.shape
    acc = np.zeros((rows, 2 * n - 1), dtype=np.int64)
    for j in range(n):
        acc[:, j : j + n] += a[:, j : j + 1] * b
    # fold x^k = -x^{k-n} f_low for k = 2n-2 .. n
    for k in range(2 * n - 2, n - 1, -1):
        t = acc[:, k] % p
        acc[:, k - n : k] -= t[:, None] * f_low
    return acc[:, :n] % p


def compose_mod(outer: np.ndarray, inner: np.ndarray, f_low: np.ndarray, p: int) -> np.ndarray:
    """outer(inner) mod f rowwise by Horner; all shapes (rows, n)."""
    rows, n = outer.shape
    acc = np.zeros((rows, n), dtype=np.int64)
    acc[:, 0] = outer[:, n - 1]
    for j in range(n - 2, -1, -1):
        acc = block_mulmod(acc, inner, f_low, p)
        acc[:, 0] = (acc[:, 0] + outer[:, j]) % p
    return acc


def x_power_q_mod(f_low: np.ndarray, p: int) -> np.ndarray:
    """x^p mod f rowwise, by square and multiply on the exponent p."""
    rows, n = f_low.shape
    if p < n:
        out = np.zeros((rows, n), dtype=np.int64)
        out[:, p] = 1
        return out
    # start from x^n = -f_low and absorb remaining exponent bits
    bits = bin(p)[2:]
    # find prefix of bits giving value < n... simpler: repeated doubling from x
    g = np.zeros((rows, n), dtype=np.int64)
    if n == 1:
        g[:, 0] = pow_mod_scalar_roots(f_low, p)
        return g
    g[:, 1] = 1  # g = x
    for bit in bits[1:]:
        g = block_mulmod(g, g, f_low, p)
        if bit == "1":
            g = mul_by_x_mod(g, f_low, p)
    return g


def pow_mod_scalar_roots(f_low: np.ndarray, p: int) -> np.ndarray:
    # n = 1: f = x + c, x = -c mod f; x^p = (-c)^p = -c in F_p
    return (-f_low[:, 0]) % p


def frobenius_mod(f_low: np.ndarray, p: int, dmax: int) -> list[np.ndarray]:
    """[x^{p^d} mod f for d = 1..dmax], via composition with x^p mod f."""
    g1 = x_power_q_mod(f_low, p)
    out = [g1]
    for _ in range(dmax - 1):
        out.append(compose_mod(g1, out[-1], f_low, p))
    return out


# evaluation ------------------------------------------------------------------


def _power_table(p: int, n: int) -> np.ndarray:
    """(p, n+1) table of a^j mod p."""
    tab = np.empty((p, n + 1), dtype=np.int64)
    tab[:, 0] = 1
    a = np.arange(p, dtype=np.int64)
    for j in range(1, n + 1):
        tab[:, j] = tab[:, j - 1] * a % p
    return tab


def eval_at_all_points(block: np.ndarray, p: int) -> np.ndarray:
    """(rows, p) values f(a) at every a in F_p, for monic f = x^n + low."""
    n = block.shape[1]
    tab = _power_table(p, n)
    vals = block @ tab[:, :n].T + tab[:, n]
    return vals % p


def count_roots(block: np.ndarray, p: int) -> np.ndarray:
    """Number of distinct roots in F_p of each monic row."""
    return (eval_at_all_points(block, p) == 0).sum(axis=1)


# determinants, resultants, discriminants -------------------------------------


def batch_det(M: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack (rows, n, n) by Gaussian elimination.

    Zero pivots are repaired by adding a lower row (det preserving); rows
    where the whole column vanishes are singular.  M is consumed.
    """
    rows, n, _ = M.shape
    M %= p
    det = np.ones(rows, dtype=np.int64)
    dead = np.zeros(rows, dtype=bool)
    for k in range(n):
        piv = M[:, k, k]
        for j in range(k + 1, n):
            need = (piv == 0) & ~dead & (M[:, j, k] != 0)
            if need.any():
                M[need, k, :] = (M[need, k, :] + M[need, j, :]) % p
                piv = M[:, k, k]
        dead |= piv == 0
        det = det * piv % p
        if k == n - 1:
            break
        inv = modinv_vec(np.where(piv == 0, 1, piv), p)
        factor = M[:, k + 1 :, k] * inv[:, None] % p
        M[:, k + 1 :, k:] = (M[:, k + 1 :, k:] - factor[:, :, None] * M[:, None, k, k:]) % p
    det[dead] = 0
    return det


def mult_matrix(g: np.ndarray, f_low: np.ndarray, p: int) -> np.ndarray:
    """Matrix of multiplication by g on F_p[x]/(f), columns x^j g mod f."""
    rows, n = g.shape
    M = np.empty((rows, n, n), dtype=np.int64)
    col = g % p
    M[:, :, 0] = col
    for j in range(1, n):
        col = mul_by_x_mod(col, f_low, p)
        M[:, :, j] = col
    return M


def batch_resultant(f_low: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    """Res(f, g) for monic f = x^n + f_low and deg g < n, as det of the
    multiplication-by-g map (the norm of g)."""
    return batch_det(mult_matrix(g, f_low, p), p)


def derivative_rows(block: np.ndarray, p: int) -> np.ndarray:
    """f' as width-n rows for monic f = x^n + low (deg f' <= n-1)."""
    rows, n = block.shape
    d = np.empty((rows, n), dtype=np.int64)
    for j in range(n - 1):
        d[:, j] = (j + 1) * block[:, j + 1] % p
    d[:, n - 1] = n % p
    return d


def batch_disc(block: np.ndarray, p: int) -> np.ndarray:
    """Discriminants of monic rows: (-1)^{n(n-1)/2} Res(f, f')."""
    n = block.shape[1]
    res = batch_resultant(block, derivative_rows(block, p), p)
    if (n * (n - 1) // 2) % 2:
        res = (-res) % p
    return res


def batch_mobius(block: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """mu of monic rows via (-1)^n chi_2(disc); odd p only (Pellet)."""
    if not ctx.odd:
        raise ValueError("batch mobius needs odd characteristic")
    p = ctx.p
    n = block.shape[1]
    chi = np.zeros(p, dtype=np.int64)
    sq = np.arange(1, p, dtype=np.int64)
    chi[sq * sq % p] = 1
    chi[(chi == 0)] = -1
    chi[0] = 0
    mu = chi[batch_disc(block, p)]
    return -mu if n % 2 else mu


# gcd degrees ------------------------------------------------------------------


def batch_gcd_degree(A: np.ndarray, dA: np.ndarray, B: np.ndarray, dB: np.ndarray,
                     p: int) -> np.ndarray:
    """Degrees of gcd for row pairs, by a masked Euclidean elimination.

    A, B: (rows, W) reduced coefficient arrays; dA, dB their degrees
    (-1 marks the zero polynomial).  gcd(0, 0) never occurs in our calls.
    All four inputs are consumed.
    """
    rows, W = A.shape
    cols = np.arange(W, dtype=np.int64)
    while True:
        act = dB >= 0
        if not act.any():
            return dA
        swap = act & (dA < dB)
        if swap.any():
            tmp = A[swap].copy()
            A[swap] = B[swap]
            B[swap] = tmp
            t = dA[swap].copy()
            dA[swap] = dB[swap]
            dB[swap] = t
        ai = np.flatnonzero(act)
        lcA = A[ai, dA[ai]]
        lcB = B[ai, dB[ai]]
        c = lcA * modinv_vec(lcB, p) % p
        shift = (dA[ai] - dB[ai])[:, None]
        src = cols[None, :] - shift
        shifted = np.where(src >= 0, B[ai[:, None], np.maximum(src, 0)], 0)
        A[ai] = (A[ai] - c[:, None] * shifted) % p
        nz = A[ai] != 0
        has = nz.any(axis=1)
        dA[ai] = np.where(has, W - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
        # a row whose A just became zero is finished: gcd = B
        zeroA = np.zeros(rows, dtype=bool)
        zeroA[ai] = dA[ai] < 0
        if zeroA.any():
            dA[zeroA] = dB[zeroA]
            dB[zeroA] = -1


def reduce_mod(block: np.ndarray, q_low: np.ndarray, p: int) -> np.ndarray:
    """Monic rows x^n + block reduced mod the single monic modulus
    Q = x^m + q_low; returns (rows, m) residues."""
    rows, n = block.shape
    m = q_low.shape[0]
    if n < m:
        out = np.zeros((rows, m), dtype=np.int64)
        out[:, :n] = block
        out[:, n] += 1
        return out % p
    work = np.empty((rows, n + 1), dtype=np.int64)
    work[:, :n] = block
    work[:, n] = 1
    for k in range(n, m - 1, -1):
        t = work[:, k] % p
        work[:, k - m : k] -= t[:, None] * q_low
        work[:, k] = 0
        if k > m:
            work[:, k - m : k] %= p
    return work[:, :m] % p


# irreducibility and factorization statistics ----------------------------------


def batch_is_irreducible(block: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Boolean mask of irreducible monic rows.

    Staged sieve: kill rows with a root, then for d = 2..n//2 kill rows
    where gcd(f, x^{q^d} - x) is nontrivial, detected by Res(f, x^{q^d}-x)
    = 0.  Survivor sets shrink fast so rows are compacted between stages.
    """
    p = ctx.p
    rows, n = block.shape
    out = np.zeros(rows, dtype=bool)
    if n == 0:
        return out
    if n == 1:
        out[:] = True
        return out
    alive = np.flatnonzero(count_roots(block, p) == 0)
    if alive.size == 0:
        return out
    if n <= 3:
        # rootless quadratics and cubics are irreducible
        out[alive] = True
        return out
    F = block[alive]
    g1 = x_power_q_mod(F, p)
    g = g1
    for d in range(2, n // 2 + 1):
        g = compose_mod(g1, g, F, p)
        gx = g.copy()
        gx[:, 1] = (gx[:, 1] - 1) % p
        keep = batch_det(mult_matrix(gx, F, p), p) != 0
        # rows with x^{q^d} = x mod f have a degree-d factor too (gx = 0)
        alive = alive[keep]
        if alive.size == 0:
            return out
        if d < n // 2:
            F = F[keep]
            g1 = g1[keep]
            g = g[keep]
    out[alive] = True
    return out


def proper_prime_power_indices(ctx: FieldCtx, n: int):
    """Indices and Lambda values of monic P^k with k >= 2, deg P^k = n."""
    from .ensembles import monic_index
    from .polyring import Poly, is_irreducible

    idx = []
    val = []
    for d in range(1, n // 2 + 1):
        if n % d:
            continue
        k = n // d
        q = ctx.p
        for t in range(q**d):
            coeffs = []
            u = t
            for _ in range(d):
                u, c = divmod(u, q)
                coeffs.append(c)
            coeffs.append(1)
            P = Poly(ctx, coeffs)
            if is_irreducible(P):
                idx.append(monic_index(P**k))
                val.append(d)
    return np.array(idx, dtype=np.int64), np.array(val, dtype=np.int64)


def batch_von_mangoldt(block: np.ndarray, ctx: FieldCtx, start_index: int,
                       prime_powers=None) -> np.ndarray:
    """Lambda of the monic rows of an index-contiguous block starting at
    start_index.  prime_powers: optional precomputed
    proper_prime_power_indices(ctx, n)."""
    n = block.shape[1]
    lam = np.where(batch_is_irreducible(block, ctx), n, 0).astype(np.int64)
    if prime_powers is None:
        prime_powers = proper_prime_power_indices(ctx, n)
    ppi, ppv = prime_powers
    stop_index = start_index + block.shape[0]
    sel = (ppi >= start_index) & (ppi < stop_index)
    lam[ppi[sel] - start_index] += ppv[sel]
    return lam


def batch_cycle_types(block: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Cycle types (rows, n) of monic rows, degrees n <= 5.

    Squarefree rows: lambda_1 = #roots, lambda_2 from deg gcd(f, x^{q^2}-x),
    the residual degree is then a single forced part.  Rows with disc = 0
    (density ~1/q) fall back to scalar factorization.
    """
    from .polyring import Poly, cycle_type

    p = ctx.p
    rows, n = block.shape
    if n > 5:
        raise ValueError("batch cycle types implemented for n <= 5")
    lam = np.zeros((rows, n), dtype=np.int64)
    if n == 1:
        lam[:, 0] = 1
        return lam
    sq = batch_disc(block, p) != 0
    r1 = count_roots(block, p)
    need_gcd = sq & (n - r1 >= 4)
    lam[sq, 0] = r1[sq]
    if need_gcd.any():
        gi = np.flatnonzero(need_gcd)
        F = block[gi]
        g2 = frobenius_mod(F, p, 2)[1]
        g2[:, 1] = (g2[:, 1] - 1) % p
        W = n + 1
        A = np.zeros((gi.size, W), dtype=np.int64)
        A[:, :n] = F
        A[:, n] = 1
        B = np.zeros((gi.size, W), dtype=np.int64)
        B[:, :n] = g2
        nz = B != 0
        has = nz.any(axis=1)
        dB = np.where(has, W - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
        dA = np.full(gi.size, n, dtype=np.int64)
        d = batch_gcd_degree(A, dA, B, dB, p)
        lam2 = (d - r1[gi]) // 2
        lam[gi, 1] = lam2
    # forced residual part for all squarefree rows
    parts = n - lam[:, 0] - 2 * lam[:, 1]
    si = np.flatnonzero(sq)
    res = parts[si]
    two = res == 2  # rootless residual of degree 2 is an irreducible quadratic
    lam[si[two], 1] += 1
    for m in range(3, n + 1):
        hit = si[res == m]
        lam[hit, m - 1] += 1
    # non-squarefree rows: scalar fallback
    for i in np.flatnonzero(~sq):
        f = Poly(ctx, list(block[i]) + [1])
        lam[i] = cycle_type(f).lam
    return lam


def _gcd_degree_with(block: np.ndarray, other: np.ndarray, p: int) -> np.ndarray:
    """deg gcd(f, g) for monic f = x^n + block rows and width-(n+1) rows g."""
    rows, n = block.shape
    A = np.concatenate([block, np.ones((rows, 1), dtype=np.int64)], axis=1)
    dA = np.full(rows, n, dtype=np.int64)
    nz = other != 0
    has = nz.any(axis=1)
    dB = np.where(has, other.shape[1] - 1 - np.argmax(nz[:, ::-1], axis=1), -1)
    return batch_gcd_degree(A, dA, other, dB, p)


def _prime_degree_profile(block: np.ndarray, ctx: FieldCtx, dmax: int) -> np.ndarray:
    """nu[:, d] = number of distinct primes of degree d dividing each row,
    for d = 1..dmax, from deg gcd(f, x^{q^d} - x)."""
    rows, n = block.shape
    p = ctx.p
    frob = frobenius_mod(block, p, dmax)
    S = np.zeros((rows, dmax + 1), dtype=np.int64)
    for d in range(1, dmax + 1):
        B = np.zeros((rows, n + 1), dtype=np.int64)
        B[:, :n] = frob[d - 1]
        B[:, 1] = (B[:, 1] - 1) % p
        S[:, d] = _gcd_degree_with(block, B, p)
    nu = np.zeros((rows, dmax + 1), dtype=np.int64)
    for d in range(1, dmax + 1):
        acc = S[:, d].copy()
        for e in range(1, d):
            if d % e == 0:
                acc -= e * nu[:, e]
        nu[:, d] = acc // d
    return nu


def _lambda2_from_counts(n: int, R: np.ndarray, sum_d: np.ndarray,
                         sum_d2: np.ndarray) -> np.ndarray:
    """Lambda_2 given the number of distinct primes and the first two power
    sums of their degrees; exponents are forced for R = 1 and drop out for
    R = 2 (Lambda_2(P^a Q^b) = 2 deg P deg Q)."""
    out = np.zeros(R.shape[0], dtype=np.int64)
    one = R == 1
    if one.any():
        ds = sum_d[one]
        out[one] = (2 * (n // ds) - 1) * ds * ds
    two = R == 2
    out[two] = sum_d[two] ** 2 - sum_d2[two]
    return out


def batch_lambda2(block: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Lambda_2 = Lambda*Lambda + deg*Lambda of monic rows.

    Supported on polynomials with at most two distinct primes: P^a gives
    (2a-1) deg(P)^2 and P^a Q^b gives 2 deg(P) deg(Q), independent of the
    exponents.  For p > n the profile of primes of degree <= n/2 plus one
    radical-degree pass (valid since no exponent can reach p) settles every
    row; otherwise fall back to the full degree profile.
    """
    rows, n = block.shape
    p = ctx.p
    if n == 0:
        return np.zeros(rows, dtype=np.int64)
    if n == 1:
        return np.ones(rows, dtype=np.int64)
    dvec_full = np.arange(n + 1, dtype=np.int64)
    if p <= n:
        nu = _prime_degree_profile(block, ctx, n)
        R = nu[:, 1:].sum(axis=1)
        return _lambda2_from_counts(n, R, nu @ dvec_full,
                                    nu @ (dvec_full * dvec_full))
    half = n // 2
    nu = _prime_degree_profile(block, ctx, half)
    dvec = np.arange(half + 1, dtype=np.int64)
    R_s = nu[:, 1:].sum(axis=1)
    T = nu @ dvec
    T2 = nu @ (dvec * dvec)
    out = np.zeros(rows, dtype=np.int64)
    # no prime of degree <= n/2 forces f irreducible
    out[R_s == 0] = n * n
    sel = (R_s == 1) | (R_s == 2)
    if sel.any():
        sub = np.ascontiguousarray(block[sel])
        fp = np.zeros((sub.shape[0], n + 1), dtype=np.int64)
        fp[:, :n] = derivative_rows(sub, p)
        rad = sub.shape[1] - _gcd_degree_with(sub, fp, p)  # sum of distinct prime degrees
        Ts, T2s, Rs = T[sel], T2[sel], R_s[sel]
        large = rad > Ts  # one more prime, of degree rad - Ts > n/2
        R_tot = Rs + large
        sum_d = np.where(large, rad, Ts)
        sum_d2 = T2s + large * (rad - Ts) ** 2
        out[sel] = _lambda2_from_counts(n, R_tot, sum_d, sum_d2)
    return out


def batch_divisor_r_small(block: np.ndarray, ctx: FieldCtx, r: int) -> np.ndarray:
    """d_r of monic rows for n <= 3: the factorization shape is determined
    by the discriminant and the number of distinct roots."""
    rows, n = block.shape
    p = ctx.p
    if n > 3:
        raise ValueError("shape route only covers n <= 3")
    if n == 0:
        return np.ones(rows, dtype=np.int64)
    if n == 1:
        return np.full(rows, r, dtype=np.int64)
    sf = batch_disc(block.copy(), p) != 0
    roots = count_roots(block, p)
    out = np.empty(rows, dtype=np.int64)
    if n == 2:
        out[sf & (roots == 2)] = r * r
        out[sf & (roots == 0)] = r
        out[~sf] = r * (r + 1) // 2
    else:
        out[sf & (roots == 3)] = r**3
        out[sf & (roots == 1)] = r * r
        out[sf & (roots == 0)] = r
        out[~sf & (roots == 2)] = r * r * (r + 1) // 2
        out[~sf & (roots == 1)] = r * (r + 1) * (r + 2) // 6
    return out


def batch_exponent_counts(block: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Factorization exponent profile of monic rows, by trial division.

    out[i, e] is the number of distinct irreducible factors dividing row i
    exactly e times.  Primes of degree <= n/2 are found by divisibility
    against P, P^2, ... (one fixed-modulus reduction each, restricted to
    the rows still divisible); whatever remains after removing them is 1
    or a single irreducible of degree > n/2 and lands in the e = 1 slot.
    Cost scales with pi_q(n/2) reductions of the whole block.
    """
    rows, n = block.shape
    p = ctx.p
    counts = np.zeros((rows, n + 1), dtype=np.int64)
    residual = np.full(rows, n, dtype=np.int64)
    expo = np.zeros(rows, dtype=np.int64)
    for d in range(1, n // 2 + 1):
        cand = monic_block(ctx, d, 0, p**d)
        primes = cand if d == 1 else cand[batch_is_irreducible(cand, ctx)]
        for low in primes:
            full = np.concatenate([low, np.ones(1, dtype=np.int64)])
            mod = full
            alive = np.flatnonzero(
                (reduce_mod(block, mod[:-1], p) == 0).all(axis=1))
            if alive.size == 0:
                continue
            expo[:] = 0
            expo[alive] = 1
            t = 1
            while (t + 1) * d <= n and alive.size:
                mod = np.convolve(mod, full) % p
                sub = (reduce_mod(block[alive], mod[:-1], p) == 0).all(axis=1)
                alive = alive[sub]
                expo[alive] += 1
                t += 1
            nz = np.flatnonzero(expo)
            counts[nz, expo[nz]] += 1
            residual[nz] -= d * expo[nz]
    counts[residual > 0, 1] += 1
    return counts


def batch_divisor_k(block: np.ndarray, ctx: FieldCtx, k: int) -> np.ndarray:
    """d_k of monic rows for any degree, via the trial-division exponent
    profile: d_k = prod over factors of binom(e + k-1, k-1)."""
    rows, n = block.shape
    if k < 1:
        raise ValueError("need k >= 1")
    if k == 1 or n == 0:
        return np.ones(rows, dtype=np.int64)
    return divisor_k_from_counts(batch_exponent_counts(block, ctx), k)


def divisor_k_from_counts(counts: np.ndarray, k: int) -> np.ndarray:
    """d_k from a batch_exponent_counts profile; lets one profile serve
    several k values."""
    n = counts.shape[1] - 1
    dk = np.ones(counts.shape[0], dtype=np.int64)
    b = 1
    for e in range(1, n + 1):
        b = b * (e + k - 1) // e
        ce = counts[:, e]
        hot = np.flatnonzero(ce)
        if hot.size:
            dk[hot] *= np.int64(b) ** ce[hot]
    return dk

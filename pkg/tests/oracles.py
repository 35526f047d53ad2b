"""Independent reference implementations used only by the tests.

Each oracle takes a different route from the package code: explicit loops
instead of FFTs, determinant enumeration instead of factorized forms, SVD
instead of eigenvalues, fixed-grid quadrature instead of adaptive.
"""

from __future__ import annotations

import itertools
import math

import mpmath
import numpy as np

# --------------------------------------------------------------------------
# Full configuration interaction over Slater determinants


def _spin_orbital_integrals(h1, h2):
    n = h1.shape[0]
    ns = 2 * n
    h = np.zeros((ns, ns))
    g = np.zeros((ns, ns, ns, ns))  # <pq|rs>
    for p in range(ns):
        for q in range(ns):
            if p % 2 == q % 2:
                h[p, q] = h1[p // 2, q // 2]
    for p, q, r, s in itertools.product(range(ns), repeat=4):
        if p % 2 == r % 2 and q % 2 == s % 2:
            g[p, q, r, s] = h2[p // 2, r // 2, q // 2, s // 2]
    return h, g - g.transpose(0, 1, 3, 2)


def _apply(det, ops):
    """Apply (kind, index) operators right to left; returns (sign, det) or None."""
    sign = 1
    for kind, i in reversed(ops):
        occupied = (det >> i) & 1
        if kind == "a" and not occupied or kind == "c" and occupied:
            return None
        if bin(det & ((1 << i) - 1)).count("1") % 2:
            sign = -sign
        det ^= 1 << i
    return sign, det


def fci_ground_energy(h1, h2, core, n_electrons):
    """Lowest eigenvalue in the S_z = 0 sector by Slater-Condon rules."""
    n = h1.shape[0]
    ns = 2 * n
    h, g = _spin_orbital_integrals(np.asarray(h1), np.asarray(h2))
    n_a = n_b = n_electrons // 2
    alpha = [sum(1 << (2 * i) for i in c) for c in itertools.combinations(range(n), n_a)]
    beta = [sum(1 << (2 * i + 1) for i in c) for c in itertools.combinations(range(n), n_b)]
    dets = [a | b for a in alpha for b in beta]
    index = {d: k for k, d in enumerate(dets)}
    H = np.zeros((len(dets), len(dets)))
    for k, d in enumerate(dets):
        occ = [i for i in range(ns) if (d >> i) & 1]
        vir = [a for a in range(ns) if not (d >> a) & 1]
        H[k, k] = sum(h[i, i] for i in occ) + 0.5 * sum(g[i, j, i, j] for i in occ for j in occ)
        for i in occ:
            for a in vir:
                res = _apply(d, [("c", a), ("a", i)])
                if res is None or res[1] not in index:
                    continue
                val = h[a, i] + sum(g[a, j, i, j] for j in occ if j != i)
                H[index[res[1]], k] += res[0] * val
        for i, j in itertools.combinations(occ, 2):
            for a, b in itertools.combinations(vir, 2):
                res = _apply(d, [("c", a), ("c", b), ("a", j), ("a", i)])
                if res is None or res[1] not in index:
                    continue
                H[index[res[1]], k] += res[0] * g[a, b, i, j]
    return float(np.linalg.eigvalsh(H)[0]) + core


# --------------------------------------------------------------------------
# Double-factorization normalization by SVD


def df_lambda_oracle(h1, h2, eigenvalues, eigenvectors):
    """One-body matrix by explicit loops, norms as sums of singular values."""
    n = h1.shape[0]
    t = np.array(h1, dtype=float)
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += -0.5 * h2[i, k, k, j] + h2[i, j, k, k]
            t[i, j] += acc
    lam1 = float(np.linalg.svd(t, compute_uv=False).sum())
    lam2 = 0.0
    for w, v in zip(eigenvalues, eigenvectors):
        lam2 += 0.25 * float(np.linalg.svd(math.sqrt(w) * v, compute_uv=False).sum()) ** 2
    return lam1, lam2


# --------------------------------------------------------------------------
# Dual plane-wave tables by explicit momentum sums


def nu_vectors(m):
    axis = range(-(m // 2), m - m // 2)
    return list(itertools.product(axis, repeat=3))


def dpw_tables_bruteforce(m, edge_bohr, atoms_bohr, charges, halved=False):
    """T, V by displacement and U by grid point, each as a dict keyed by index triple."""
    n = m**3
    omega = edge_bohr**3
    a0 = edge_bohr / m
    ks = [tuple(2 * math.pi * c / edge_bohr for c in nu) for nu in nu_vectors(m)]
    T, V, U = {}, {}, {}
    for d in itertools.product(range(m), repeat=3):
        r = tuple(a0 * c for c in d)
        t_acc = v_acc = 0.0
        for k in ks:
            k2 = k[0] ** 2 + k[1] ** 2 + k[2] ** 2
            phase = k[0] * r[0] + k[1] * r[1] + k[2] * r[2]
            t_acc += k2 * math.cos(phase)
            if k2 > 0:
                v_acc += math.cos(phase) / k2
        T[d] = t_acc / ((2 * n) if halved else n)
        V[d] = 2 * math.pi / omega * v_acc
    for p in itertools.product(range(m), repeat=3):
        r = tuple(a0 * c for c in p)
        u_acc = 0.0
        for zeta, R in zip(charges, atoms_bohr):
            for k in ks:
                k2 = k[0] ** 2 + k[1] ** 2 + k[2] ** 2
                if k2 == 0:
                    continue
                phase = sum(k[c] * (R[c] - r[c]) for c in range(3))
                u_acc += zeta * math.cos(phase) / k2
        U[p] = -4 * math.pi / omega * u_acc
    return T, U, V


def dpw_lambda_bruteforce(m, T, U, V):
    """Absolute sums over every ordered spin-orbital index pair."""
    pts = list(itertools.product(range(m), repeat=3))

    def disp(p, q):
        return tuple((a - b) % m for a, b in zip(p, q))

    lam_t = lam_u = lam_v = 0.0
    for sigma in range(2):
        for p in pts:
            lam_u += abs(U[p])
            for q in pts:
                lam_t += abs(T[disp(p, q)])
    for (p, a), (q, b) in itertools.product(itertools.product(pts, range(2)), repeat=2):
        if (p, a) != (q, b):
            lam_v += abs(V[disp(p, q)])
    return lam_t, lam_u, lam_v


# --------------------------------------------------------------------------
# Eckart tunneling by fixed-grid quadrature of the textbook formula


def eckart_p_naive(e, v_f, v_r, hbar_omega):
    """Transmission from the direct cosh form, no log-space tricks."""
    delta = v_f - v_r
    if e <= 0 or e - delta <= 0:
        return 0.0
    denom = hbar_omega * (1 / math.sqrt(v_f) + 1 / math.sqrt(v_r))
    a = 4 * math.pi * math.sqrt(e) / denom
    b = 4 * math.pi * math.sqrt(e - delta) / denom
    d2 = 4 * v_f * v_r / hbar_omega**2 - 0.25
    try:
        cd = math.cosh(2 * math.pi * math.sqrt(d2)) if d2 >= 0 else math.cos(2 * math.pi * math.sqrt(-d2))
        return (math.cosh(a + b) - math.cosh(a - b)) / (math.cosh(a + b) + cd)
    except OverflowError:
        a, b, d2 = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(d2)
        cd = mpmath.cosh(2 * mpmath.pi * mpmath.sqrt(d2)) if d2 >= 0 else mpmath.cos(2 * mpmath.pi * mpmath.sqrt(-d2))
        return float((mpmath.cosh(a + b) - mpmath.cosh(a - b)) / (mpmath.cosh(a + b) + cd))


def eckart_kappa_grid(v_f, v_r, hbar_omega, kt, points=400001, upper_kt=60.0):
    """Composite Simpson rule on a uniform energy grid."""
    e0 = max(0.0, v_f - v_r)
    e = np.linspace(e0, v_f + upper_kt * kt, points)
    f = np.array([eckart_p_naive(x, v_f, v_r, hbar_omega) for x in e]) * np.exp(-(e - v_f) / kt)
    h = e[1] - e[0]
    integral = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    return integral / kt

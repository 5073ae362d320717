#!/usr/bin/env python3
"""Full water/STO-3G RHF with p-integrals built by arbitrary-precision
derivative lifting (mpmath) of the closed-form s-type integrals. Entirely
independent of any Hermite-recurrence code path. Slow (minutes) but exact
to far beyond f64."""

import itertools
import math

import mpmath as mp
import numpy as np
from scipy.linalg import eigh

mp.mp.dps = 25


def boys0(z):
    if z == 0:
        return mp.mpf(1)
    return mp.sqrt(mp.pi / z) / 2 * mp.erf(mp.sqrt(z))


def s_overlap(a, A, b, B):
    p = a + b
    ab2 = sum((x - y) ** 2 for x, y in zip(A, B))
    return (mp.pi / p) ** mp.mpf("1.5") * mp.exp(-a * b / p * ab2)


def s_kinetic(a, A, b, B):
    p = a + b
    ab2 = sum((x - y) ** 2 for x, y in zip(A, B))
    return a * b / p * (3 - 2 * a * b / p * ab2) * s_overlap(a, A, b, B)


def s_nuclear(a, A, b, B, C):
    p = a + b
    ab2 = sum((x - y) ** 2 for x, y in zip(A, B))
    P = [(a * x + b * y) / p for x, y in zip(A, B)]
    pc2 = sum((x - y) ** 2 for x, y in zip(P, C))
    return 2 * mp.pi / p * mp.exp(-a * b / p * ab2) * boys0(p * pc2)


def s_eri(a, A, b, B, c, C, d, D):
    p = a + b
    q = c + d
    P = [(a * x + b * y) / p for x, y in zip(A, B)]
    Q = [(c * x + d * y) / q for x, y in zip(C, D)]
    ab2 = sum((x - y) ** 2 for x, y in zip(A, B))
    cd2 = sum((x - y) ** 2 for x, y in zip(C, D))
    pq2 = sum((x - y) ** 2 for x, y in zip(P, Q))
    pref = 2 * mp.pi ** mp.mpf("2.5") / (p * q * mp.sqrt(p + q))
    kk = mp.exp(-a * b / p * ab2 - c * d / q * cd2)
    return pref * kk * boys0(p * q / (p + q) * pq2)


def lift(f, centers, dirs, exps):
    """Differentiate f once along each (center, axis) in dirs, times
    prod 1/(2 a_center). f takes the list of (shifted) centers."""
    if not dirs:
        return f(centers)

    def g(*dxs):
        cs = [list(c) for c in centers]
        for (ci, k), dx in zip(dirs, dxs):
            cs[ci][k] += dx
        return f(cs)

    n = len(dirs)
    val = mp.diff(g, tuple([mp.mpf(0)] * n), tuple([1] * n))
    for ci, _ in dirs:
        val /= 2 * exps[ci]
    return val


class Func:
    def __init__(self, center, lmn, prims):
        self.center = [mp.mpf(repr(x)) for x in center]
        self.lmn = lmn
        self.prims = [(mp.mpf(repr(a)), mp.mpf(repr(c)) * prim_norm_mp(mp.mpf(repr(a)), lmn)) for a, c in prims]


def prim_norm_mp(a, lmn):
    l = sum(lmn)
    df = mp.mpf(1)
    for n in lmn:
        k = 2 * n - 1
        while k > 1:
            df *= k
            k -= 2
    return (2 * a / mp.pi) ** mp.mpf("0.75") * mp.sqrt((4 * a) ** l / df)


def dirs_of(func, slot):
    out = []
    for k, n in enumerate(func.lmn):
        for _ in range(n):
            out.append((slot, k))
    return out


def main():
    O = [0.000000000000, -0.143225816552, 0.000000000000]
    H1 = [1.638036840407, 1.136548822547, 0.000000000000]
    H2 = [-1.638036840407, 1.136548822547, 0.000000000000]
    atoms = [(8, O), (1, H1), (1, H2)]

    o_s = [(130.7093200, 0.15432897), (23.8088610, 0.53532814), (6.4436083, 0.44463454)]
    o_sp_s = [(5.0331513, -0.09996723), (1.1695961, 0.39951283), (0.3803890, 0.70115470)]
    o_sp_p = [(5.0331513, 0.15591627), (1.1695961, 0.60768372), (0.3803890, 0.39195739)]
    h_s = [(3.42525091, 0.15432897), (0.62391373, 0.53532814), (0.16885540, 0.44463454)]

    funcs = [
        Func(O, (0, 0, 0), o_s),
        Func(O, (0, 0, 0), o_sp_s),
        Func(O, (1, 0, 0), o_sp_p),
        Func(O, (0, 1, 0), o_sp_p),
        Func(O, (0, 0, 1), o_sp_p),
        Func(H1, (0, 0, 0), h_s),
        Func(H2, (0, 0, 0), h_s),
    ]
    n = len(funcs)

    def contract2(fi, fj, kernel):
        dirs = dirs_of(fi, 0) + dirs_of(fj, 1)
        tot = mp.mpf(0)
        for (a, ca), (b, cb) in itertools.product(fi.prims, fj.prims):
            tot += ca * cb * lift(
                lambda cs: kernel(a, cs[0], b, cs[1]),
                [fi.center, fj.center],
                dirs,
                [a, b],
            )
        return tot

    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            fi, fj = funcs[i], funcs[j]
            S[i, j] = S[j, i] = float(contract2(fi, fj, s_overlap))
            T[i, j] = T[j, i] = float(contract2(fi, fj, s_kinetic))
            vsum = mp.mpf(0)
            for Z, Cpos in atoms:
                Cmp = [mp.mpf(repr(x)) for x in Cpos]
                vsum -= Z * contract2(fi, fj, lambda a, A, b, B: s_nuclear(a, A, b, B, Cmp))
            V[i, j] = V[j, i] = float(vsum)
    print("one-electron matrices done")

    eri = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for pi_, (i, j) in enumerate(pairs):
        for (k, l) in pairs[: pi_ + 1]:
            fi, fj, fk, fl = funcs[i], funcs[j], funcs[k], funcs[l]
            dirs = dirs_of(fi, 0) + dirs_of(fj, 1) + dirs_of(fk, 2) + dirs_of(fl, 3)
            tot = mp.mpf(0)
            for (a, ca), (b, cb), (c, cc), (d, cd) in itertools.product(
                fi.prims, fj.prims, fk.prims, fl.prims
            ):
                tot += ca * cb * cc * cd * lift(
                    lambda cs: s_eri(a, cs[0], b, cs[1], c, cs[2], d, cs[3]),
                    [fi.center, fj.center, fk.center, fl.center],
                    dirs,
                    [a, b, c, d],
                )
            val = float(tot)
            for (p, q, r, s) in {
                (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
            }:
                eri[p, q, r, s] = val
        print(f"eri pair row {pi_ + 1}/{len(pairs)} done")

    norms = 1.0 / np.sqrt(np.diag(S))
    for M in (S, T, V):
        M *= np.outer(norms, norms)
    eri *= np.einsum("i,j,k,l->ijkl", norms, norms, norms, norms)

    h = T + V
    e_nuc = 0.0
    for (Zi, Ci), (Zj, Cj) in itertools.combinations(atoms, 2):
        e_nuc += Zi * Zj / np.linalg.norm(np.array(Ci) - np.array(Cj))

    D = np.zeros((n, n))
    E_old = 0.0
    for it in range(200):
        J = np.einsum("ijkl,kl->ij", eri, D)
        K = np.einsum("ikjl,kl->ij", eri, D)
        F = h + J - 0.5 * K
        lam, C = eigh(F, S)
        Cocc = C[:, :5]
        D = 2.0 * Cocc @ Cocc.T
        E = 0.5 * np.einsum("ij,ij->", D, h + F) + e_nuc
        if abs(E - E_old) < 1e-13:
            break
        E_old = E
    print(f"E_hf(water, STO-3G, mp-lifted integrals) = {E:.12f}  ({it} iterations)")
    print("orbital energies:", " ".join(f"{x:.8f}" for x in lam))

    # MP2 from the same integrals
    eri_mo = np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, eri, optimize=True)
    nso = 2 * n
    eps = np.zeros(nso)
    for p in range(n):
        eps[2 * p] = lam[p]
        eps[2 * p + 1] = lam[p]
    asym = np.zeros((nso, nso, nso, nso))
    for p, q, r, s in itertools.product(range(nso), repeat=4):
        coul = eri_mo[p // 2, r // 2, q // 2, s // 2] if (p % 2 == r % 2 and q % 2 == s % 2) else 0.0
        exch = eri_mo[p // 2, s // 2, q // 2, r // 2] if (p % 2 == s % 2 and q % 2 == r % 2) else 0.0
        asym[p, q, r, s] = coul - exch
    e_mp2 = 0.0
    for i, j in itertools.product(range(10), repeat=2):
        for a, b in itertools.product(range(10, nso), repeat=2):
            den = eps[i] + eps[j] - eps[a] - eps[b]
            e_mp2 += 0.25 * asym[i, j, a, b] ** 2 / den
    print(f"E_mp2_corr(water) = {e_mp2:.12e}")


if __name__ == "__main__":
    main()

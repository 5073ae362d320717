#!/usr/bin/env python3
"""Independent reference oracle for s-type Gaussian systems.

Generates fixture values (integrals, RHF, MP2, FCI) for the Rust test
suite using closed-form s-orbital integral formulas and scipy linear
algebra. Deliberately avoids the Hermite-expansion code path used by the
Rust crate so the two implementations share no algorithmic structure.

Run:  python3 tools/gen_fixtures.py
"""

import itertools
import math

import numpy as np
from scipy.linalg import eigh
from scipy.special import erf

np.set_printoptions(precision=16)


def boys0(z):
    if z < 1e-14:
        return 1.0
    return 0.5 * math.sqrt(math.pi / z) * erf(math.sqrt(z))


def prim_s_norm(a):
    return (2.0 * a / math.pi) ** 0.75


def s_overlap(a, A, b, B):
    p = a + b
    ab2 = np.dot(A - B, A - B)
    return (math.pi / p) ** 1.5 * math.exp(-a * b / p * ab2)


def s_kinetic(a, A, b, B):
    p = a + b
    ab2 = np.dot(A - B, A - B)
    return a * b / p * (3.0 - 2.0 * a * b / p * ab2) * s_overlap(a, A, b, B)


def s_nuclear(a, A, b, B, C):
    p = a + b
    ab2 = np.dot(A - B, A - B)
    P = (a * A + b * B) / p
    pc2 = np.dot(P - C, P - C)
    return -2.0 * math.pi / p * math.exp(-a * b / p * ab2) * boys0(p * pc2)


def s_eri(a, A, b, B, c, C, d, D):
    p = a + b
    q = c + d
    P = (a * A + b * B) / p
    Q = (c * C + d * D) / q
    ab2 = np.dot(A - B, A - B)
    cd2 = np.dot(C - D, C - D)
    pref = 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    kk = math.exp(-a * b / p * ab2 - c * d / q * cd2)
    z = p * q / (p + q) * np.dot(P - Q, P - Q)
    return pref * kk * boys0(z)


class SBasis:
    """Contracted s function: center + list of (exponent, coefficient)."""

    def __init__(self, center, prims):
        self.center = np.asarray(center, dtype=float)
        # primitive normalization
        self.prims = [(a, c * prim_s_norm(a)) for a, c in prims]
        # contracted normalization
        s = 0.0
        for (a, ca), (b, cb) in itertools.product(self.prims, repeat=2):
            s += ca * cb * s_overlap(a, self.center, b, self.center)
        scale = 1.0 / math.sqrt(s)
        self.prims = [(a, c * scale) for a, c in self.prims]


def integrals(funcs, atoms):
    n = len(funcs)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i, fi in enumerate(funcs):
        for j, fj in enumerate(funcs):
            for (a, ca), (b, cb) in itertools.product(fi.prims, fj.prims):
                S[i, j] += ca * cb * s_overlap(a, fi.center, b, fj.center)
                T[i, j] += ca * cb * s_kinetic(a, fi.center, b, fj.center)
                for Z, C in atoms:
                    V[i, j] += Z * ca * cb * s_nuclear(a, fi.center, b, fj.center, np.asarray(C))
    eri = np.zeros((n, n, n, n))
    for i, j, k, l in itertools.product(range(n), repeat=4):
        v = 0.0
        fi, fj, fk, fl = funcs[i], funcs[j], funcs[k], funcs[l]
        for (a, ca), (b, cb), (c, cc), (d, cd) in itertools.product(
            fi.prims, fj.prims, fk.prims, fl.prims
        ):
            v += ca * cb * cc * cd * s_eri(
                a, fi.center, b, fj.center, c, fk.center, d, fl.center
            )
        eri[i, j, k, l] = v
    e_nuc = 0.0
    for (Zi, Ci), (Zj, Cj) in itertools.combinations(atoms, 2):
        e_nuc += Zi * Zj / np.linalg.norm(np.asarray(Ci) - np.asarray(Cj))
    return S, T + V, eri, e_nuc


def rhf(S, h, eri, e_nuc, n_elec, iters=200):
    n = S.shape[0]
    nocc = n_elec // 2
    D = np.zeros((n, n))
    E_old = 0.0
    for _ in range(iters):
        J = np.einsum("ijkl,kl->ij", eri, D)
        K = np.einsum("ikjl,kl->ij", eri, D)
        F = h + J - 0.5 * K
        lam, C = eigh(F, S)
        Cocc = C[:, :nocc]
        D = 2.0 * Cocc @ Cocc.T
        E = 0.5 * np.einsum("ij,ij->", D, h + F) + e_nuc
        if abs(E - E_old) < 1e-14:
            break
        E_old = E
    return E, lam, C


def mo_eri_chem(eri, C):
    return np.einsum("pi,qj,rk,sl,pqrs->ijkl", C, C, C, C, eri, optimize=True)


def spin_block(C, lam, eri_mo_chem):
    """Interleaved spin orbitals: spatial p -> 2p (alpha), 2p+1 (beta)."""
    n = len(lam)
    nso = 2 * n
    eps = np.zeros(nso)
    for p in range(n):
        eps[2 * p] = lam[p]
        eps[2 * p + 1] = lam[p]
    # <pq||rs> = (pr|qs) d(sp,sr) d(sq,ss) - (ps|qr) d(sp,ss) d(sq,sr)
    asym = np.zeros((nso, nso, nso, nso))
    for p, q, r, s in itertools.product(range(nso), repeat=4):
        sp, sq, sr, ss = p % 2, q % 2, r % 2, s % 2
        P, Q, R, Ssp = p // 2, q // 2, r // 2, s // 2
        coul = eri_mo_chem[P, R, Q, Ssp] if (sp == sr and sq == ss) else 0.0
        exch = eri_mo_chem[P, Ssp, Q, R] if (sp == ss and sq == sr) else 0.0
        asym[p, q, r, s] = coul - exch
    return eps, asym


def mp2(eps, asym, n_elec):
    occ = range(n_elec)
    virt = range(n_elec, len(eps))
    e = 0.0
    for i, j in itertools.product(occ, repeat=2):
        for a, b in itertools.product(virt, repeat=2):
            e += 0.25 * asym[i, j, a, b] ** 2 / (eps[i] + eps[j] - eps[a] - eps[b])
    return e


def apply_ops(m, annihilate, create):
    """Apply a_p for p in `annihilate` (in order), then a^dag_r for r in
    `create` (in order), to determinant bitmask m. Returns (mask, sign) or
    None if the result vanishes."""
    sign = 1
    for p in annihilate:
        if not (m >> p) & 1:
            return None
        sign *= (-1) ** bin(m & ((1 << p) - 1)).count("1")
        m &= ~(1 << p)
    for r in create:
        if (m >> r) & 1:
            return None
        sign *= (-1) ** bin(m & ((1 << r) - 1)).count("1")
        m |= 1 << r
    return m, sign


def fci(h_mo, eri_mo_chem, n_elec, e_nuc):
    """Full CI over spin-orbital Slater determinants (bitmask encoding).

    Builds H by brute-force application of the second-quantized operator
    H = sum h_pq a+_p a_q + 1/4 sum <pq||rs> a+_p a+_q a_s a_r
    to every basis determinant (no Slater-Condon case analysis)."""
    n = h_mo.shape[0]
    nso = 2 * n
    h_so = np.zeros((nso, nso))
    for p, q in itertools.product(range(nso), repeat=2):
        if p % 2 == q % 2:
            h_so[p, q] = h_mo[p // 2, q // 2]
    _, asym = spin_block(np.eye(n), np.zeros(n), eri_mo_chem)

    dets = [m for m in range(1 << nso) if bin(m).count("1") == n_elec]
    idx = {m: i for i, m in enumerate(dets)}
    dim = len(dets)

    H = np.zeros((dim, dim))
    for I, mI in enumerate(dets):
        for p, q in itertools.product(range(nso), repeat=2):
            if abs(h_so[p, q]) < 1e-300:
                continue
            out = apply_ops(mI, [q], [p])
            if out is not None:
                H[idx[out[0]], I] += out[1] * h_so[p, q]
        for p, q, r, s in itertools.product(range(nso), repeat=4):
            v = asym[p, q, r, s]
            if abs(v) < 1e-300:
                continue
            # a+_p a+_q a_s a_r applied right to left
            out = apply_ops(mI, [r, s], [q, p])
            if out is not None:
                H[idx[out[0]], I] += 0.25 * out[1] * v
    w, v = np.linalg.eigh(H)
    return w[0] + e_nuc, w, v[:, 0]


STO3G_H = [(3.42525091, 0.15432897), (0.62391373, 0.53532814), (0.16885540, 0.44463454)]
STO3G_HE = [(6.36242139, 0.15432897), (1.15892300, 0.53532814), (0.31364979, 0.44463454)]
G631_H_INNER = [(18.7311370, 0.03349460), (2.8253937, 0.23472695), (0.6401217, 0.81375733)]
G631_H_OUTER = [(0.1612778, 1.0)]


def dump_mat(name, M):
    print(f"{name} =")
    for row in np.atleast_2d(M):
        print("  " + "  ".join(f"{x: .16e}" for x in row))


def h2_sto3g():
    print("=" * 70)
    print("H2 / STO-3G, R = 1.4 bohr")
    A = np.array([0.0, 0.0, 0.0])
    B = np.array([0.0, 0.0, 1.4])
    funcs = [SBasis(A, STO3G_H), SBasis(B, STO3G_H)]
    atoms = [(1.0, A), (1.0, B)]
    S, h, eri, e_nuc = integrals(funcs, atoms)
    dump_mat("S", S)
    dump_mat("h_core", h)
    uniq = [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 1), (1, 1, 1, 1)]
    for q in uniq:
        print(f"eri{q} = {eri[q]:.16e}")
    print(f"e_nuc = {e_nuc:.16e}")
    E, lam, C = rhf(S, h, eri, e_nuc, 2)
    print(f"E_hf = {E:.16e}")
    print(f"lambdas = {lam[0]:.16e} {lam[1]:.16e}")
    eri_mo = mo_eri_chem(eri, C)
    h_mo = C.T @ h @ C
    eps, asym = spin_block(C, lam, eri_mo)
    print(f"mo_asym <01||01> spatial (00|00)... sample:")
    print(f"  asym[0,1,0,1] = {asym[0,1,0,1]:.16e}")
    print(f"  asym[0,1,2,3] = {asym[0,1,2,3]:.16e}")
    print(f"  asym[0,2,1,3] = {asym[0,2,1,3]:.16e}")
    e_mp2 = mp2(eps, asym, 2)
    print(f"E_mp2_corr = {e_mp2:.16e}")
    e_fci, w, v0 = fci(h_mo, eri_mo, 2, e_nuc)
    print(f"E_fci_total = {e_fci:.16e}")
    print(f"E_ccsd_corr(=fci-hf) = {e_fci - E:.16e}")


def he_sto3g():
    print("=" * 70)
    print("He / STO-3G")
    A = np.array([0.0, 0.0, 0.0])
    funcs = [SBasis(A, STO3G_HE)]
    atoms = [(2.0, A)]
    S, h, eri, e_nuc = integrals(funcs, atoms)
    E, lam, C = rhf(S, h, eri, e_nuc, 2)
    print(f"S = {S[0,0]:.16e}, h = {h[0,0]:.16e}, eri = {eri[0,0,0,0]:.16e}")
    print(f"E_hf = {E:.16e}")
    print(f"lambda_0 = {lam[0]:.16e}")


def h2_631g():
    print("=" * 70)
    print("H2 / 6-31G, R = 1.4 bohr")
    A = np.array([0.0, 0.0, 0.0])
    B = np.array([0.0, 0.0, 1.4])
    funcs = [
        SBasis(A, G631_H_INNER),
        SBasis(A, G631_H_OUTER),
        SBasis(B, G631_H_INNER),
        SBasis(B, G631_H_OUTER),
    ]
    atoms = [(1.0, A), (1.0, B)]
    S, h, eri, e_nuc = integrals(funcs, atoms)
    E, lam, C = rhf(S, h, eri, e_nuc, 2)
    print(f"E_hf = {E:.16e}")
    print("lambdas = " + " ".join(f"{x:.16e}" for x in lam))
    eri_mo = mo_eri_chem(eri, C)
    h_mo = C.T @ h @ C
    eps, asym = spin_block(C, lam, eri_mo)
    e_mp2 = mp2(eps, asym, 2)
    print(f"E_mp2_corr = {e_mp2:.16e}")
    e_fci, w, v0 = fci(h_mo, eri_mo, 2, e_nuc)
    print(f"E_fci_total = {e_fci:.16e}")
    print(f"E_ccsd_corr(=fci-hf) = {e_fci - E:.16e}")


def boys_reference():
    print("=" * 70)
    print("Boys function reference values (adaptive quadrature)")
    from scipy.integrate import quad

    for m, z in [(0, 1.0), (0, 0.5), (1, 1.0), (2, 3.7), (4, 11.3), (6, 0.01),
                 (8, 24.9), (8, 25.1), (10, 300.0), (3, 1e-7), (0, 1e-3)]:
        val, err = quad(lambda u: u ** (2 * m) * math.exp(-z * u * u), 0.0, 1.0,
                        epsabs=1e-15, epsrel=1e-14)
        print(f"F_{m}({z}) = {val:.16e}  (quad err {err:.1e})")


if __name__ == "__main__":
    h2_sto3g()
    he_sto3g()
    h2_631g()
    boys_reference()

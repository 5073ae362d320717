#!/usr/bin/env python3
"""High-precision oracle for p-function primitive integrals.

Builds p-type Gaussian integrals by differentiating the closed-form s-type
integrals with respect to center coordinates (Hermite lifting), using mpmath
arbitrary-precision numerical differentiation. Verifies specific primitive
values printed by the Rust debug example.

p_x centered at A with exponent a:  (x - A_x) e^{-a|x-A|^2} = (1/2a) d/dA_x s
"""

import mpmath as mp

mp.mp.dps = 40


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
    """attraction to unit charge at C, positive convention (no -Z)."""
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


def lift(f, centers, orders, exps):
    """Differentiate f with respect to center coordinates.

    centers: list of [x,y,z] (mutable baseline); orders: list of per-center
    (nx,ny,nz) derivative orders; exps: list of exponents. Applies the
    (1/2a)^n d^n/dA^n lifting per coordinate.
    """
    flat_params = []
    for ci, (nx, ny, nz) in enumerate(orders):
        for k, nk in enumerate((nx, ny, nz)):
            for _ in range(nk):
                flat_params.append((ci, k))

    def g(*dxs):
        cs = [list(c) for c in centers]
        for (ci, k), dx in zip(flat_params, dxs):
            cs[ci][k] += dx
        return f(cs)

    n = len(flat_params)
    if n == 0:
        return g()
    val = mp.diff(g, tuple([mp.mpf(0)] * n), tuple([1] * n))
    scale = mp.mpf(1)
    for ci, _ in flat_params:
        scale /= 2 * exps[ci]
    return val * scale


def main():
    a, b, c, d = map(mp.mpf, ("1.3", "0.71", "0.9", "0.41"))
    A = [mp.mpf("0.1"), mp.mpf("-0.2"), mp.mpf("0.3")]
    B = [mp.mpf("0.9"), mp.mpf("0.4"), mp.mpf("-0.1")]
    C = [mp.mpf("-0.3"), mp.mpf("0.8"), mp.mpf("0.2")]
    D = [mp.mpf("0.4"), mp.mpf("-0.6"), mp.mpf("0.7")]
    Znuc = [mp.mpf("0.0"), mp.mpf("0.1"), mp.mpf("-0.4")]

    # overlap <p_x(A) | p_y(B)>
    v = lift(lambda cs: s_overlap(a, cs[0], b, cs[1]), [A, B], [(1, 0, 0), (0, 1, 0)], [a, b])
    print(f"overlap px,py = {mp.nstr(v, 20)}")

    # kinetic <p_z(A) | T | p_z(B)>
    v = lift(lambda cs: s_kinetic(a, cs[0], b, cs[1]), [A, B], [(0, 0, 1), (0, 0, 1)], [a, b])
    print(f"kinetic pz,pz = {mp.nstr(v, 20)}")

    # nuclear <p_x(A) | 1/|r-Z| | p_x(B)>
    v = lift(
        lambda cs: s_nuclear(a, cs[0], b, cs[1], Znuc),
        [A, B],
        [(1, 0, 0), (1, 0, 0)],
        [a, b],
    )
    print(f"nuclear px,px = {mp.nstr(v, 20)}")

    # nuclear <d_xy(A) | 1/|r-Z| | s(B)>
    v = lift(
        lambda cs: s_nuclear(a, cs[0], b, cs[1], Znuc),
        [A, B],
        [(1, 1, 0), (0, 0, 0)],
        [a, b],
    )
    print(f"nuclear dxy,s = {mp.nstr(v, 20)}")

    # eri (p_x(A) s(B) | s(C) s(D))
    v = lift(
        lambda cs: s_eri(a, cs[0], b, cs[1], c, cs[2], d, cs[3]),
        [A, B, C, D],
        [(1, 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0)],
        [a, b, c, d],
    )
    print(f"eri px,s|s,s = {mp.nstr(v, 20)}")

    # eri (s s | p_y(C) s(D))  -- exercises the ket-side sign
    v = lift(
        lambda cs: s_eri(a, cs[0], b, cs[1], c, cs[2], d, cs[3]),
        [A, B, C, D],
        [(0, 0, 0), (0, 0, 0), (0, 1, 0), (0, 0, 0)],
        [a, b, c, d],
    )
    print(f"eri s,s|py,s = {mp.nstr(v, 20)}")

    # eri (p_x(A) p_y(B) | p_z(C) p_x(D))  -- full quartic derivative
    v = lift(
        lambda cs: s_eri(a, cs[0], b, cs[1], c, cs[2], d, cs[3]),
        [A, B, C, D],
        [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0)],
        [a, b, c, d],
    )
    print(f"eri px,py|pz,px = {mp.nstr(v, 20)}")

    # eri (d_xx(A) s(B) | s s): second same-coordinate derivative needs the
    # polynomial correction (x-Ax)^2 e = [(1/2a) d/dAx]^2 s + (1/2a) s
    second = lift(
        lambda cs: s_eri(a, cs[0], b, cs[1], c, cs[2], d, cs[3]),
        [A, B, C, D],
        [(2, 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0)],
        [a, b, c, d],
    )
    base = s_eri(a, A, b, B, c, C, d, D)
    v = second + base / (2 * a)
    print(f"eri dxx,s|s,s = {mp.nstr(v, 20)}")


if __name__ == "__main__":
    main()

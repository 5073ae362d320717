//! One- and two-electron Gaussian integrals via McMurchie-Davidson Hermite
//! expansions, for Cartesian shells up to d.
//!
//! The same Hermite machinery serves overlap, kinetic, nuclear-attraction
//! and electron-repulsion integrals, anchored by the closed-form s-orbital
//! Coulomb integral and the Boys function.

use ndarray::{Array2, Array4};
use thiserror::Error;

use crate::basis::{BasisSet, CartFunction};
use crate::boys::boys_array;
use crate::geometry::Geometry;
use crate::linalg::sym_eigh;

/// Primitive pairs whose Gaussian prefactor falls below this are skipped.
const PRIMITIVE_CUTOFF: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum IntegralError {
    #[error("basis is linearly dependent: smallest overlap eigenvalue {eigenvalue:.3e} < 1e-10")]
    LinearDependence { eigenvalue: f64 },
}

/// All geometry-dependent matrix elements for one nuclear configuration:
/// overlap, core Hamiltonian (kinetic + nuclear attraction), the full
/// two-electron tensor in chemists' index order `eri[[i, j, k, l]] = (ij|kl)`,
/// and the nuclear repulsion energy.
#[derive(Debug, Clone)]
pub struct IntegralBundle {
    pub s: Array2<f64>,
    pub h_core: Array2<f64>,
    pub eri: Array4<f64>,
    pub e_nuc: f64,
}

/// Gaussian product rule: combined exponent, product center and prefactor.
pub fn gaussian_product(a: f64, ca: [f64; 3], b: f64, cb: [f64; 3]) -> (f64, [f64; 3], f64) {
    let p = a + b;
    let mut center = [0.0; 3];
    let mut ab2 = 0.0;
    for k in 0..3 {
        center[k] = (a * ca[k] + b * cb[k]) / p;
        let d = ca[k] - cb[k];
        ab2 += d * d;
    }
    (p, center, (-a * b / p * ab2).exp())
}

/// Closed-form Coulomb integral of two s primitives against a point charge
/// at `c`: (2 pi K_ab / p) F_0(p |P - c|^2). This is the l = 0 anchor for
/// the general Hermite recurrence path.
pub fn coulomb_s_integral(a: f64, ca: [f64; 3], b: f64, cb: [f64; 3], c: [f64; 3]) -> f64 {
    let (p, center, k_ab) = gaussian_product(a, ca, b, cb);
    let mut pc2 = 0.0;
    for k in 0..3 {
        let d = center[k] - c[k];
        pc2 += d * d;
    }
    2.0 * std::f64::consts::PI / p * k_ab * boys_array(0, p * pc2)[0]
}

/// Hermite expansion coefficient E_t^{ij} for the 1-D product of two
/// Cartesian Gaussian factors separated by `qx = A_x - B_x`.
fn hermite_e(i: i32, j: i32, t: i32, qx: f64, a: f64, b: f64) -> f64 {
    let p = a + b;
    let q = a * b / p;
    if t < 0 || t > i + j {
        0.0
    } else if i == 0 && j == 0 && t == 0 {
        (-q * qx * qx).exp()
    } else if j == 0 {
        (1.0 / (2.0 * p)) * hermite_e(i - 1, j, t - 1, qx, a, b)
            - (q * qx / a) * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) as f64 * hermite_e(i - 1, j, t + 1, qx, a, b)
    } else {
        (1.0 / (2.0 * p)) * hermite_e(i, j - 1, t - 1, qx, a, b)
            + (q * qx / b) * hermite_e(i, j - 1, t, qx, a, b)
            + (t + 1) as f64 * hermite_e(i, j - 1, t + 1, qx, a, b)
    }
}

/// E_t^{ij} for all t = 0..=i+j.
fn e_table(i: usize, j: usize, qx: f64, a: f64, b: f64) -> Vec<f64> {
    (0..=(i + j) as i32)
        .map(|t| hermite_e(i as i32, j as i32, t, qx, a, b))
        .collect()
}

/// Table of Hermite Coulomb integrals R^0_{tuv} for t <= t_max, u <= u_max,
/// v <= v_max, from the downward auxiliary recurrence seeded by Boys values.
fn hermite_coulomb_table(
    t_max: usize,
    u_max: usize,
    v_max: usize,
    p: f64,
    pc: [f64; 3],
) -> Vec<f64> {
    let n_max = t_max + u_max + v_max;
    let pc2 = pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2];
    let f = boys_array(n_max, p * pc2);

    let st = (t_max + 1, u_max + 1, v_max + 1);
    let idx = |t: usize, u: usize, v: usize| (t * st.1 + u) * st.2 + v;
    let size = st.0 * st.1 * st.2;
    let mut cur = vec![0.0; size];
    let mut next = vec![0.0; size];

    for n in (0..=n_max).rev() {
        std::mem::swap(&mut cur, &mut next);
        for slot in cur.iter_mut() {
            *slot = 0.0;
        }
        cur[idx(0, 0, 0)] = (-2.0 * p).powi(n as i32) * f[n];
        for t in 0..=t_max {
            for u in 0..=u_max {
                for v in 0..=v_max {
                    if t + u + v == 0 {
                        continue;
                    }
                    // decrement the first nonzero index
                    let val = if t > 0 {
                        let mut r = pc[0] * next[idx(t - 1, u, v)];
                        if t > 1 {
                            r += (t - 1) as f64 * next[idx(t - 2, u, v)];
                        }
                        r
                    } else if u > 0 {
                        let mut r = pc[1] * next[idx(t, u - 1, v)];
                        if u > 1 {
                            r += (u - 1) as f64 * next[idx(t, u - 2, v)];
                        }
                        r
                    } else {
                        let mut r = pc[2] * next[idx(t, u, v - 1)];
                        if v > 1 {
                            r += (v - 1) as f64 * next[idx(t, u, v - 2)];
                        }
                        r
                    };
                    cur[idx(t, u, v)] = val;
                }
            }
        }
    }
    cur
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// 1-D overlap factor of two primitives: sum over Hermite coefficients is
/// just E_0^{ij} sqrt(pi/p); the full 3-D primitive overlap multiplies the
/// three dimensions.
fn primitive_overlap(a: f64, lmn1: [usize; 3], ca: [f64; 3], b: f64, lmn2: [usize; 3], cb: [f64; 3]) -> f64 {
    let p = a + b;
    let mut out = 1.0;
    for d in 0..3 {
        out *= hermite_e(lmn1[d] as i32, lmn2[d] as i32, 0, ca[d] - cb[d], a, b);
    }
    out * (std::f64::consts::PI / p).powf(1.5)
}

fn primitive_kinetic(a: f64, lmn1: [usize; 3], ca: [f64; 3], b: f64, lmn2: [usize; 3], cb: [f64; 3]) -> f64 {
    let [l2, m2, n2] = lmn2;
    let shift = |d: usize, delta: i32| -> [usize; 3] {
        let mut out = lmn2;
        let v = out[d] as i32 + delta;
        if v < 0 {
            // flagged by caller via the multiplying factor being zero
            out[d] = 0;
        } else {
            out[d] = v as usize;
        }
        out
    };
    let s0 = primitive_overlap(a, lmn1, ca, b, lmn2, cb);
    let term0 = b * (2.0 * (l2 + m2 + n2) as f64 + 3.0) * s0;
    let mut term1 = 0.0;
    for d in 0..3 {
        term1 += primitive_overlap(a, lmn1, ca, b, shift(d, 2), cb);
    }
    term1 *= -2.0 * b * b;
    let mut term2 = 0.0;
    for d in 0..3 {
        let l = lmn2[d] as f64;
        if lmn2[d] >= 2 {
            term2 += l * (l - 1.0) * primitive_overlap(a, lmn1, ca, b, shift(d, -2), cb);
        }
    }
    term2 *= -0.5;
    term0 + term1 + term2
}

/// Attraction of a primitive pair to a unit positive charge at `c`
/// (without the -Z factor).
fn primitive_nuclear(
    a: f64,
    lmn1: [usize; 3],
    ca: [f64; 3],
    b: f64,
    lmn2: [usize; 3],
    cb: [f64; 3],
    c: [f64; 3],
) -> f64 {
    let (p, center, _) = gaussian_product(a, ca, b, cb);
    let e0 = e_table(lmn1[0], lmn2[0], ca[0] - cb[0], a, b);
    let e1 = e_table(lmn1[1], lmn2[1], ca[1] - cb[1], a, b);
    let e2 = e_table(lmn1[2], lmn2[2], ca[2] - cb[2], a, b);
    let r = hermite_coulomb_table(e0.len() - 1, e1.len() - 1, e2.len() - 1, p, sub(center, c));
    let (su, sv) = (e1.len(), e2.len());
    let idx = |t: usize, u: usize, v: usize| (t * su + u) * sv + v;
    let mut val = 0.0;
    for (t, et) in e0.iter().enumerate() {
        for (u, eu) in e1.iter().enumerate() {
            for (v, ev) in e2.iter().enumerate() {
                val += et * eu * ev * r[idx(t, u, v)];
            }
        }
    }
    val * 2.0 * std::f64::consts::PI / p
}

/// Primitive (ab|cd) in chemists' notation.
#[allow(clippy::too_many_arguments)]
fn primitive_eri(
    a: f64,
    lmn1: [usize; 3],
    ca: [f64; 3],
    b: f64,
    lmn2: [usize; 3],
    cb: [f64; 3],
    c: f64,
    lmn3: [usize; 3],
    cc: [f64; 3],
    d: f64,
    lmn4: [usize; 3],
    cd: [f64; 3],
) -> f64 {
    let p = a + b;
    let q = c + d;
    let alpha = p * q / (p + q);
    let (_, cp, _) = gaussian_product(a, ca, b, cb);
    let (_, cq, _) = gaussian_product(c, cc, d, cd);

    let e_bra = [
        e_table(lmn1[0], lmn2[0], ca[0] - cb[0], a, b),
        e_table(lmn1[1], lmn2[1], ca[1] - cb[1], a, b),
        e_table(lmn1[2], lmn2[2], ca[2] - cb[2], a, b),
    ];
    let e_ket = [
        e_table(lmn3[0], lmn4[0], cc[0] - cd[0], c, d),
        e_table(lmn3[1], lmn4[1], cc[1] - cd[1], c, d),
        e_table(lmn3[2], lmn4[2], cc[2] - cd[2], c, d),
    ];
    let (tb, ub, vb) = (e_bra[0].len(), e_bra[1].len(), e_bra[2].len());
    let (tk, uk, vk) = (e_ket[0].len(), e_ket[1].len(), e_ket[2].len());
    let r = hermite_coulomb_table(tb + tk - 2, ub + uk - 2, vb + vk - 2, alpha, sub(cp, cq));
    let (su, sv) = (ub + uk - 1, vb + vk - 1);
    let idx = |t: usize, u: usize, v: usize| (t * su + u) * sv + v;

    let mut val = 0.0;
    for t in 0..tb {
        for u in 0..ub {
            for v in 0..vb {
                let ebra = e_bra[0][t] * e_bra[1][u] * e_bra[2][v];
                if ebra == 0.0 {
                    continue;
                }
                for tau in 0..tk {
                    for nu in 0..uk {
                        for phi in 0..vk {
                            let eket = e_ket[0][tau] * e_ket[1][nu] * e_ket[2][phi];
                            if eket == 0.0 {
                                continue;
                            }
                            let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
                            val += ebra * eket * sign * r[idx(t + tau, u + nu, v + phi)];
                        }
                    }
                }
            }
        }
    }
    let two_pi_25 = 2.0 * std::f64::consts::PI.powf(2.5);
    val * two_pi_25 / (p * q * (p + q).sqrt())
}

struct Placed<'a> {
    f: &'a CartFunction,
    pos: [f64; 3],
}

fn place<'a>(basis: &'a BasisSet, geom: &Geometry) -> Vec<Placed<'a>> {
    basis
        .functions()
        .iter()
        .map(|f| Placed {
            f,
            pos: geom.atoms[f.atom].pos,
        })
        .collect()
}

fn pair_negligible(a: f64, ca: [f64; 3], b: f64, cb: [f64; 3], coef: f64) -> bool {
    let (_, _, k) = gaussian_product(a, ca, b, cb);
    (coef * k).abs() < PRIMITIVE_CUTOFF
}

/// Contracted overlap between two placed functions.
fn overlap(fi: &Placed, fj: &Placed) -> f64 {
    let mut s = 0.0;
    for &(a, ca) in &fi.f.prims {
        for &(b, cb) in &fj.f.prims {
            if pair_negligible(a, fi.pos, b, fj.pos, ca * cb) {
                continue;
            }
            s += ca * cb * primitive_overlap(a, fi.f.lmn, fi.pos, b, fj.f.lmn, fj.pos);
        }
    }
    s
}

fn kinetic(fi: &Placed, fj: &Placed) -> f64 {
    let mut s = 0.0;
    for &(a, ca) in &fi.f.prims {
        for &(b, cb) in &fj.f.prims {
            if pair_negligible(a, fi.pos, b, fj.pos, ca * cb) {
                continue;
            }
            s += ca * cb * primitive_kinetic(a, fi.f.lmn, fi.pos, b, fj.f.lmn, fj.pos);
        }
    }
    s
}

fn nuclear(fi: &Placed, fj: &Placed, geom: &Geometry) -> f64 {
    let mut s = 0.0;
    for &(a, ca) in &fi.f.prims {
        for &(b, cb) in &fj.f.prims {
            if pair_negligible(a, fi.pos, b, fj.pos, ca * cb) {
                continue;
            }
            for atom in &geom.atoms {
                s -= atom.z as f64
                    * ca
                    * cb
                    * primitive_nuclear(a, fi.f.lmn, fi.pos, b, fj.f.lmn, fj.pos, atom.pos);
            }
        }
    }
    s
}

fn eri_contracted(fi: &Placed, fj: &Placed, fk: &Placed, fl: &Placed) -> f64 {
    let mut s = 0.0;
    for &(a, ca) in &fi.f.prims {
        for &(b, cb) in &fj.f.prims {
            if pair_negligible(a, fi.pos, b, fj.pos, ca * cb) {
                continue;
            }
            for &(c, cc) in &fk.f.prims {
                for &(d, cd) in &fl.f.prims {
                    if pair_negligible(c, fk.pos, d, fl.pos, cc * cd) {
                        continue;
                    }
                    s += ca
                        * cb
                        * cc
                        * cd
                        * primitive_eri(
                            a, fi.f.lmn, fi.pos, b, fj.f.lmn, fj.pos, c, fk.f.lmn, fk.pos, d,
                            fl.f.lmn, fl.pos,
                        );
                }
            }
        }
    }
    s
}

/// Nuclear repulsion energy of a geometry.
pub fn nuclear_repulsion(geom: &Geometry) -> f64 {
    let mut e = 0.0;
    for i in 0..geom.atoms.len() {
        for j in i + 1..geom.atoms.len() {
            let d = sub(geom.atoms[i].pos, geom.atoms[j].pos);
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            e += geom.atoms[i].z as f64 * geom.atoms[j].z as f64 / r;
        }
    }
    e
}

/// Compute overlap, core Hamiltonian and the full (ij|kl) tensor for the
/// given geometry/basis pair, exploiting the 8-fold permutational symmetry
/// of real two-electron integrals.
pub fn compute_integrals(geom: &Geometry, basis: &BasisSet) -> Result<IntegralBundle, IntegralError> {
    let funcs = place(basis, geom);
    let n = funcs.len();

    let mut s = Array2::<f64>::zeros((n, n));
    let mut h = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let sv = overlap(&funcs[i], &funcs[j]);
            let hv = kinetic(&funcs[i], &funcs[j]) + nuclear(&funcs[i], &funcs[j], geom);
            s[[i, j]] = sv;
            s[[j, i]] = sv;
            h[[i, j]] = hv;
            h[[j, i]] = hv;
        }
    }

    let (eigs, _) = sym_eigh(&s);
    if eigs[0] < 1e-10 {
        return Err(IntegralError::LinearDependence { eigenvalue: eigs[0] });
    }

    let mut eri = Array4::<f64>::zeros((n, n, n, n));
    for i in 0..n {
        for j in 0..=i {
            let ij = i * (i + 1) / 2 + j;
            for k in 0..n {
                for l in 0..=k {
                    let kl = k * (k + 1) / 2 + l;
                    if ij < kl {
                        continue;
                    }
                    let v = eri_contracted(&funcs[i], &funcs[j], &funcs[k], &funcs[l]);
                    for [p, q, r, t] in [
                        [i, j, k, l],
                        [j, i, k, l],
                        [i, j, l, k],
                        [j, i, l, k],
                        [k, l, i, j],
                        [l, k, i, j],
                        [k, l, j, i],
                        [l, k, j, i],
                    ] {
                        eri[[p, q, r, t]] = v;
                    }
                }
            }
        }
    }

    Ok(IntegralBundle {
        s,
        h_core: h,
        eri,
        e_nuc: nuclear_repulsion(geom),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisLibrary;
    use crate::geometry::Atom;
    use approx::assert_abs_diff_eq;

    fn single_s(exponent: f64) -> (Geometry, BasisSet) {
        let geom = Geometry::new(vec![Atom { z: 1, pos: [0.0; 3] }]).unwrap();
        let lib = BasisLibrary::parse("t", &format!("H S\n {exponent} 1.0\n")).unwrap();
        let set = lib.build(&geom).unwrap();
        (geom, set)
    }

    #[test]
    fn normalized_s_shell_unit_overlap() {
        let (geom, set) = single_s(0.9);
        let b = compute_integrals(&geom, &set).unwrap();
        assert_abs_diff_eq!(b.s[[0, 0]], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identical_shells_same_center_fully_overlap() {
        let geom = Geometry::new(vec![Atom { z: 1, pos: [0.0; 3] }]).unwrap();
        let lib = BasisLibrary::parse("t", "H S\n 1.1 1.0\nH S\n 1.1 1.0\n").unwrap();
        let set = lib.build(&geom).unwrap();
        // duplicated shells are linearly dependent by construction
        match compute_integrals(&geom, &set) {
            Err(IntegralError::LinearDependence { eigenvalue }) => {
                assert!(eigenvalue.abs() < 1e-12);
            }
            other => panic!("expected linear dependence, got {other:?}"),
        }
        // check the off-diagonal overlap directly
        let funcs = place(&set, &geom);
        assert_abs_diff_eq!(overlap(&funcs[0], &funcs[1]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_product_rule() {
        // same center: K = 1, P = A
        let (p, center, k) = gaussian_product(1.3, [0.5, -0.2, 1.0], 0.7, [0.5, -0.2, 1.0]);
        assert_abs_diff_eq!(p, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k, 1.0, epsilon = 1e-15);
        assert_eq!(center, [0.5, -0.2, 1.0]);
        // unit separation, equal exponents
        let (p, _, k) = gaussian_product(1.0, [0.0; 3], 1.0, [0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(p, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k, (-0.5f64).exp(), epsilon = 1e-15);
        // a -> 0 limit: P -> B
        let (_, center, _) = gaussian_product(1e-12, [1.0, 0.0, 0.0], 1.0, [0.0, 0.0, 2.0]);
        assert_abs_diff_eq!(center[2], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn coulomb_s_anchor_values() {
        // C = P: F(0) = 1
        let a = 1.0;
        let b = 1.0;
        let ca = [0.0; 3];
        let v = coulomb_s_integral(a, ca, b, ca, ca);
        assert_abs_diff_eq!(v, std::f64::consts::PI, epsilon = 1e-14);
        // C = P for displaced centers
        let cb = [0.0, 0.0, 1.0];
        let (p, center, k) = gaussian_product(a, ca, b, cb);
        let v = coulomb_s_integral(a, ca, b, cb, center);
        assert_abs_diff_eq!(v, 2.0 * std::f64::consts::PI * k / p, epsilon = 1e-14);
    }

    #[test]
    fn nuclear_matches_s_anchor() {
        // the general Hermite path must reproduce the closed form for l = 0
        for (a, b, ca, cb, c) in [
            (1.0, 1.0, [0.0; 3], [0.0, 0.0, 1.0], [0.3, 0.2, 0.4]),
            (0.5, 2.3, [0.1, -0.4, 0.0], [0.0, 0.7, 1.3], [-0.9, 0.2, 0.1]),
            (4.0, 0.2, [0.0; 3], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0]),
        ] {
            let anchor = coulomb_s_integral(a, ca, b, cb, c);
            let general = primitive_nuclear(a, [0; 3], ca, b, [0; 3], cb, c);
            assert_abs_diff_eq!(general, anchor, epsilon = 1e-13);
        }
    }

    #[test]
    fn translation_invariance() {
        let lib = BasisLibrary::parse(
            "t",
            "H S\n 1.2 0.7\n 0.3 0.5\nO SP\n 1.9 0.4 0.6\n 0.6 0.7 0.5\nO D\n 0.8 1.0\n",
        )
        .unwrap();
        let geom = |shift: [f64; 3]| {
            Geometry::new(vec![
                Atom { z: 1, pos: [0.0 + shift[0], 0.1 + shift[1], 0.0 + shift[2]] },
                Atom { z: 8, pos: [0.3 + shift[0], -0.2 + shift[1], 1.5 + shift[2]] },
            ])
            .unwrap()
        };
        let g0 = geom([0.0; 3]);
        let g1 = geom([1.7, -2.3, 0.9]);
        let b0 = compute_integrals(&g0, &lib.build(&g0).unwrap()).unwrap();
        let b1 = compute_integrals(&g1, &lib.build(&g1).unwrap()).unwrap();
        let n = b0.s.nrows();
        for i in 0..n {
            for j in 0..n {
                assert_abs_diff_eq!(b0.s[[i, j]], b1.s[[i, j]], epsilon = 1e-12);
                assert_abs_diff_eq!(b0.h_core[[i, j]], b1.h_core[[i, j]], epsilon = 1e-12);
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        assert_abs_diff_eq!(
                            b0.eri[[i, j, k, l]],
                            b1.eri[[i, j, k, l]],
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
        assert_abs_diff_eq!(b0.e_nuc, b1.e_nuc, epsilon = 1e-12);
    }

    #[test]
    fn eri_eightfold_symmetry() {
        let lib = BasisLibrary::parse("t", "H S\n 1.0 1.0\nH P\n 0.6 1.0\n").unwrap();
        let geom = Geometry::new(vec![
            Atom { z: 1, pos: [0.0; 3] },
            Atom { z: 1, pos: [0.2, 0.9, 1.1] },
        ])
        .unwrap();
        let set = lib.build(&geom).unwrap();
        let funcs = place(&set, &geom);
        let n = funcs.len();
        // spot-check the full symmetry group on independently computed values
        for (i, j, k, l) in [(0, 1, 2, 3), (4, 2, 7, 1), (5, 5, 3, 0), (6, 1, 6, 2)] {
            let base = eri_contracted(&funcs[i], &funcs[j], &funcs[k], &funcs[l]);
            for (p, q, r, t) in [
                (j, i, k, l),
                (i, j, l, k),
                (j, i, l, k),
                (k, l, i, j),
                (l, k, i, j),
                (k, l, j, i),
                (l, k, j, i),
            ] {
                assert!(p < n && q < n && r < n && t < n);
                let v = eri_contracted(&funcs[p], &funcs[q], &funcs[r], &funcs[t]);
                assert_abs_diff_eq!(v, base, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eri_s_matches_closed_form() {
        // s-only ERI has the textbook closed form; compare against the
        // Hermite path on a generic quartet of primitives
        let prim = |a: f64, c: [f64; 3]| (a, c);
        let quartets = [
            (prim(1.0, [0.0; 3]), prim(0.8, [0.0, 0.0, 1.4]), prim(1.3, [0.2, 0.1, 0.0]), prim(0.4, [0.5, -0.3, 0.9])),
            (prim(2.2, [0.3, 0.3, 0.3]), prim(2.2, [0.3, 0.3, 0.3]), prim(0.9, [-1.0, 0.0, 0.2]), prim(1.1, [0.0, 1.0, 0.0])),
        ];
        for ((a, ca), (b, cb), (c, cc), (d, cd)) in quartets {
            let closed = {
                let p = a + b;
                let q = c + d;
                let (_, cp, kab) = gaussian_product(a, ca, b, cb);
                let (_, cq, kcd) = gaussian_product(c, cc, d, cd);
                let mut pq2 = 0.0;
                for m in 0..3 {
                    let d = cp[m] - cq[m];
                    pq2 += d * d;
                }
                2.0 * std::f64::consts::PI.powf(2.5) / (p * q * (p + q).sqrt())
                    * kab
                    * kcd
                    * boys_array(0, p * q / (p + q) * pq2)[0]
            };
            let hermite = primitive_eri(a, [0; 3], ca, b, [0; 3], cb, c, [0; 3], cc, d, [0; 3], cd);
            assert_abs_diff_eq!(hermite, closed, epsilon = 1e-13);
        }
    }

    #[test]
    fn nuclear_repulsion_h2() {
        let geom = Geometry::new(vec![
            Atom { z: 1, pos: [0.0; 3] },
            Atom { z: 1, pos: [0.0, 0.0, 1.4] },
        ])
        .unwrap();
        assert_abs_diff_eq!(nuclear_repulsion(&geom), 1.0 / 1.4, epsilon = 1e-15);
    }
}

/// Prints a fixed set of primitive integral values; exercised by the
/// high-precision external oracle during development.
#[doc(hidden)]
pub fn debug_primitives() {
    let (a, b, c, d) = (1.3, 0.71, 0.9, 0.41);
    let ca = [0.1, -0.2, 0.3];
    let cb = [0.9, 0.4, -0.1];
    let cc = [-0.3, 0.8, 0.2];
    let cd = [0.4, -0.6, 0.7];
    let znuc = [0.0, 0.1, -0.4];

    println!(
        "overlap px,py = {:.16e}",
        primitive_overlap(a, [1, 0, 0], ca, b, [0, 1, 0], cb)
    );
    println!(
        "kinetic pz,pz = {:.16e}",
        primitive_kinetic(a, [0, 0, 1], ca, b, [0, 0, 1], cb)
    );
    println!(
        "nuclear px,px = {:.16e}",
        primitive_nuclear(a, [1, 0, 0], ca, b, [1, 0, 0], cb, znuc)
    );
    println!(
        "nuclear dxy,s = {:.16e}",
        primitive_nuclear(a, [1, 1, 0], ca, b, [0, 0, 0], cb, znuc)
    );
    println!(
        "eri px,s|s,s = {:.16e}",
        primitive_eri(a, [1, 0, 0], ca, b, [0; 3], cb, c, [0; 3], cc, d, [0; 3], cd)
    );
    println!(
        "eri s,s|py,s = {:.16e}",
        primitive_eri(a, [0; 3], ca, b, [0; 3], cb, c, [0, 1, 0], cc, d, [0; 3], cd)
    );
    println!(
        "eri px,py|pz,px = {:.16e}",
        primitive_eri(a, [1, 0, 0], ca, b, [0, 1, 0], cb, c, [0, 0, 1], cc, d, [1, 0, 0], cd)
    );
    println!(
        "eri dxx,s|s,s = {:.16e}",
        primitive_eri(a, [2, 0, 0], ca, b, [0; 3], cb, c, [0; 3], cc, d, [0; 3], cd)
    );
}

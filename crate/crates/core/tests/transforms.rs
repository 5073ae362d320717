//! Randomized property tests for the excitation-tensor transforms: the
//! left-inverse identity, gauge invariance under block permutations with a
//! global sign (with consistently relabeled amplitudes), the factored
//! cross-geometry transform, and linearity.

use approx::assert_abs_diff_eq;
use ccinterp_core::linalg::fro_norm;
use ccinterp_core::tensor::{
    ao_to_mo, cross_transform, mo_to_ao, n_mode_product, Basis, ExcTensor, TransformPair,
};
use ndarray::{Array2, ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random well-conditioned SPD matrix with eigenvalues near 1.
fn random_overlap(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = 0.25 * (rng.gen::<f64>() - 0.5) / n as f64;
        }
    }
    let mut s = Array2::<f64>::eye(n);
    for i in 0..n {
        for j in 0..n {
            s[[i, j]] += a[[i, j]] + a[[j, i]];
        }
    }
    s
}

/// Random S-orthonormal coefficient matrix by metric Gram-Schmidt.
fn random_coefficients(rng: &mut ChaCha8Rng, s: &Array2<f64>) -> Array2<f64> {
    let n = s.nrows();
    let mut c = Array2::<f64>::zeros((n, n));
    for col in 0..n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        for prev in 0..col {
            // overlap-metric projection
            let mut dot = 0.0;
            for i in 0..n {
                for j in 0..n {
                    dot += c[[i, prev]] * s[[i, j]] * v[j];
                }
            }
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= dot * c[[i, prev]];
            }
        }
        let mut norm2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                norm2 += v[i] * s[[i, j]] * v[j];
            }
        }
        let inv = 1.0 / norm2.sqrt();
        for (i, vi) in v.iter().enumerate() {
            c[[i, col]] = vi * inv;
        }
    }
    c
}

fn random_mo_tensor(rng: &mut ChaCha8Rng, rank: usize, nv: usize, no: usize) -> ExcTensor {
    let shape: Vec<usize> = match rank {
        1 => vec![nv, no],
        2 => vec![nv, nv, no, no],
        _ => unreachable!(),
    };
    let n: usize = shape.iter().product();
    let mut data =
        ArrayD::from_shape_vec(IxDyn(&shape), (0..n).map(|_| rng.gen::<f64>() - 0.5).collect())
            .unwrap();
    if rank == 2 {
        // antisymmetrize in (a,b) and (i,j)
        let src = data.clone();
        for a in 0..nv {
            for b in 0..nv {
                for i in 0..no {
                    for j in 0..no {
                        data[IxDyn(&[a, b, i, j])] = 0.25
                            * (src[IxDyn(&[a, b, i, j])] - src[IxDyn(&[b, a, i, j])]
                                - src[IxDyn(&[a, b, j, i])]
                                + src[IxDyn(&[b, a, j, i])]);
                    }
                }
            }
        }
    }
    ExcTensor::new(rank, data, Basis::Mo).unwrap()
}

fn tensor_diff(a: &ExcTensor, b: &ExcTensor) -> f64 {
    a.data
        .iter()
        .zip(b.data.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Spin-orbital permutation matrix induced by a spatial permutation.
fn spin_permutation(perm: &[usize]) -> Array2<f64> {
    let n = perm.len();
    let mut p = Array2::<f64>::zeros((2 * n, 2 * n));
    for (to, &from) in perm.iter().enumerate() {
        p[[2 * from, 2 * to]] = 1.0;
        p[[2 * from + 1, 2 * to + 1]] = 1.0;
    }
    p
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

struct RandomSnapshot {
    tp: TransformPair,
    c: Array2<f64>,
    s: Array2<f64>,
    n_occ: usize,
    t1: ExcTensor,
    t2: ExcTensor,
}

fn random_snapshot(rng: &mut ChaCha8Rng) -> RandomSnapshot {
    // spatial dims up to 5 occupied / 7 virtual (10 / 14 spin orbitals)
    let n_occ = rng.gen_range(1..=5);
    let n_virt = rng.gen_range(1..=7);
    let n = n_occ + n_virt;
    let s = random_overlap(rng, n);
    let c = random_coefficients(rng, &s);
    let tp = TransformPair::from_spatial(&c, &s, n_occ);
    let t1 = random_mo_tensor(rng, 1, 2 * n_virt, 2 * n_occ);
    let t2 = random_mo_tensor(rng, 2, 2 * n_virt, 2 * n_occ);
    RandomSnapshot {
        tp,
        c,
        s,
        n_occ,
        t1,
        t2,
    }
}

#[test]
fn transform_pair_blocks_are_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let snap = random_snapshot(&mut rng);
        let tp = &snap.tp;
        let io = tp.c_occ.t().dot(&tp.s).dot(&tp.c_occ);
        let iv = tp.c_virt.t().dot(&tp.s).dot(&tp.c_virt);
        let cross = tp.c_occ.t().dot(&tp.s).dot(&tp.c_virt);
        for i in 0..io.nrows() {
            for j in 0..io.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(io[[i, j]], expect, epsilon = 1e-10);
            }
        }
        for i in 0..iv.nrows() {
            for j in 0..iv.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(iv[[i, j]], expect, epsilon = 1e-10);
            }
        }
        for v in cross.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-10);
        }
    }
}

#[test]
fn left_inverse_identity_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..120 {
        let snap = random_snapshot(&mut rng);
        for t in [&snap.t1, &snap.t2] {
            let ao = mo_to_ao(t, &snap.tp).unwrap();
            let back = ao_to_mo(&ao, &snap.tp).unwrap();
            let rel = tensor_diff(&back, t) / t.frobenius_norm().max(1e-300);
            assert!(rel <= 1e-12, "left-inverse relative error {rel}");
        }
    }
}

#[test]
fn gauge_invariance_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..120 {
        let snap = random_snapshot(&mut rng);
        let n = snap.c.nrows();
        let n_occ = snap.n_occ;
        let n_virt = n - n_occ;

        let perm_occ = random_permutation(&mut rng, n_occ);
        let perm_virt = random_permutation(&mut rng, n_virt);
        // block signs (-1)^{g_occ}, (-1)^{g_virt}; sampling them equal
        // covers the plain global-sign case
        let sign_occ: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let sign_virt: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };

        // C'_occ = sign_occ C_occ P_occ, C'_virt = sign_virt C_virt P_virt
        let mut c_prime = Array2::<f64>::zeros((n, n));
        for (to, &from) in perm_occ.iter().enumerate() {
            for r in 0..n {
                c_prime[[r, to]] = sign_occ * snap.c[[r, from]];
            }
        }
        for (to, &from) in perm_virt.iter().enumerate() {
            for r in 0..n {
                c_prime[[r, n_occ + to]] = sign_virt * snap.c[[r, n_occ + from]];
            }
        }
        let tp_prime = TransformPair::from_spatial(&c_prime, &snap.s, n_occ);

        let p_occ_so = spin_permutation(&perm_occ);
        let p_virt_so = spin_permutation(&perm_virt);

        for (t, rank) in [(&snap.t1, 1usize), (&snap.t2, 2usize)] {
            // T' = (-1)^{kg} (P_virt^T)^{(x)k} (x) (P_occ^T)^{(x)k} T with
            // (-1)^g = sign_occ * sign_virt
            let mut relabeled = t.clone();
            for mode in 0..rank {
                relabeled =
                    n_mode_product(&relabeled, &p_virt_so.t().to_owned(), mode).unwrap();
            }
            for mode in rank..2 * rank {
                relabeled =
                    n_mode_product(&relabeled, &p_occ_so.t().to_owned(), mode).unwrap();
            }
            let scale = (sign_occ * sign_virt).powi(rank as i32);
            relabeled.data.mapv_inplace(|x| scale * x);

            let ao = mo_to_ao(t, &snap.tp).unwrap();
            let ao_prime = mo_to_ao(&relabeled, &tp_prime).unwrap();
            let rel = tensor_diff(&ao, &ao_prime) / ao.frobenius_norm().max(1e-300);
            assert!(rel <= 1e-12, "gauge invariance broke: relative error {rel}");
        }
    }
}

#[test]
fn cross_transform_unfolds_to_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..40 {
        // two gauges over basis sets of equal size
        let source = random_snapshot(&mut rng);
        let n = source.c.nrows();
        let n_occ = source.n_occ;
        let s_b = random_overlap(&mut rng, n);
        let c_b = random_coefficients(&mut rng, &s_b);
        let target = TransformPair::from_spatial(&c_b, &s_b, n_occ);

        for t in [&source.t1, &source.t2] {
            let direct = cross_transform(t, &target, &source.tp).unwrap();
            let via_ao = ao_to_mo(&mo_to_ao(t, &source.tp).unwrap(), &target).unwrap();
            let rel = tensor_diff(&direct, &via_ao) / direct.frobenius_norm().max(1e-300);
            assert!(rel <= 1e-12, "composition mismatch {rel}");
        }
    }
}

#[test]
fn cross_transform_same_pair_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let snap = random_snapshot(&mut rng);
    for t in [&snap.t1, &snap.t2] {
        let out = cross_transform(t, &snap.tp, &snap.tp).unwrap();
        let rel = tensor_diff(&out, t) / t.frobenius_norm().max(1e-300);
        assert!(rel <= 1e-12);
    }
}

#[test]
fn transforms_are_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let snap = random_snapshot(&mut rng);
    let nv = snap.tp.n_virt_so();
    let no = snap.tp.n_occ_so();
    let u = random_mo_tensor(&mut rng, 2, nv, no);
    let (alpha, beta) = (1.7, -0.4);

    let mut combo = snap.t2.clone();
    for (c, (a, b)) in combo
        .data
        .iter_mut()
        .zip(snap.t2.data.iter().zip(u.data.iter()))
    {
        *c = alpha * a + beta * b;
    }
    let lhs = mo_to_ao(&combo, &snap.tp).unwrap();
    let ta = mo_to_ao(&snap.t2, &snap.tp).unwrap();
    let tb = mo_to_ao(&u, &snap.tp).unwrap();
    let mut rhs = ta.clone();
    for (c, (a, b)) in rhs.data.iter_mut().zip(ta.data.iter().zip(tb.data.iter())) {
        *c = alpha * a + beta * b;
    }
    let rel = tensor_diff(&lhs, &rhs) / fro_norm(&Array2::from_elem((1, 1), lhs.frobenius_norm()));
    assert!(rel <= 1e-13);
}

/// Empirical complexity guard: doubling both extents of a rank-2 tensor
/// multiplies the cross-transform work by 2^5, within a factor-two band.
#[test]
fn cross_transform_scaling_guard() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let time_at = |rng: &mut ChaCha8Rng, nv_so: usize, no_so: usize| -> f64 {
        let n_sp = (nv_so + no_so) / 2;
        let s = random_overlap(rng, n_sp);
        let ca = random_coefficients(rng, &s);
        let cb = random_coefficients(rng, &s);
        let tp_a = TransformPair::from_spatial(&ca, &s, no_so / 2);
        let tp_b = TransformPair::from_spatial(&cb, &s, no_so / 2);
        let t = random_mo_tensor(rng, 2, nv_so, no_so);
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = std::time::Instant::now();
            let out = cross_transform(&t, &tp_b, &tp_a).unwrap();
            let dt = start.elapsed().as_secs_f64();
            assert!(out.frobenius_norm().is_finite());
            best = best.min(dt);
        }
        best
    };
    let t_small = time_at(&mut rng, 32, 16);
    let t_big = time_at(&mut rng, 64, 32);
    let ratio = t_big / t_small;
    // flops scale exactly by 32; allow the stated x2 band
    assert!(
        (16.0..=64.0).contains(&ratio),
        "scaling ratio {ratio:.1} outside [16, 64] (t_small={t_small:.4}s t_big={t_big:.4}s)"
    );
}

//! Offline/online interpolation pipeline: node reproduction, determinism,
//! degree exactness on synthetic snapshot families, the raw-MO control with
//! an induced occupied-orbital crossing, and warm starting.

use approx::assert_abs_diff_eq;
use ccinterp_core::basis::BasisLibrary;
use ccinterp_core::ccsd::{mp2_guess, solve_ccsd, AmplitudeSet};
use ccinterp_core::geometry::{Atom, Geometry, Trajectory};
use ccinterp_core::interp::{
    amplitude_error, chebyshev_nodes, error_bound_check, full_point, lagrange_basis, mle,
    offline_build, online_eval, online_eval_at, test_grid, Interpolant, SolverConfig,
};
use ccinterp_core::snapshot::{snapshot_to_bytes, Snapshot, SCHEMA_VERSION};
use ccinterp_core::tensor::TransformPair;
use ndarray::{Array1, Array2, Array4};

fn fixture(path: &str) -> String {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/");
    std::fs::read_to_string(format!("{root}{path}")).unwrap()
}

fn sto3g() -> BasisLibrary {
    BasisLibrary::parse("sto-3g", &fixture("basis/sto-3g.basis")).unwrap()
}

fn h2_stretch() -> Trajectory {
    Trajectory::parse(&fixture("traj/h2_stretch.traj")).unwrap()
}

fn h4_breathing() -> Trajectory {
    Trajectory::parse(&fixture("traj/h4_breathing.traj")).unwrap()
}

#[test]
fn h2_offline_monotone_and_deterministic() {
    let traj = h2_stretch();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 4, &cfg).unwrap();
    assert_eq!(itp.snapshots.len(), 4);
    // the stretch is monotone away from equilibrium, so E_hf rises with mu
    for w in itp.snapshots.windows(2) {
        assert!(w[1].e_hf > w[0].e_hf);
    }
    // rerun: bit-identical snapshot payloads
    let again = offline_build(&traj, &lib, 4, &cfg).unwrap();
    for (a, b) in itp.snapshots.iter().zip(&again.snapshots) {
        assert_eq!(snapshot_to_bytes(a), snapshot_to_bytes(b));
    }
}

#[test]
fn node_reproduction() {
    let traj = h2_stretch();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 5, &cfg).unwrap();
    for (j, &mu) in itp.node_set.nodes.iter().enumerate() {
        let approx = online_eval(&itp, mu, &cfg.scf).unwrap();
        let stored = AmplitudeSet {
            t1: itp.snapshots[j].t1.clone(),
            t2: itp.snapshots[j].t2.clone(),
        };
        let err = amplitude_error(&approx, &stored).unwrap();
        assert!(err <= 1e-12, "node {j} reproduction error {err}");
    }
}

#[test]
fn single_node_interpolant_is_cross_transformed_constant() {
    let traj = h2_stretch();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 1, &cfg).unwrap();
    let mu = 0.8;
    let geom = traj.eval(mu).unwrap();
    let point = ccinterp_core::interp::scf_point(geom, &lib, 2, &cfg.scf).unwrap();
    let tp = point.transform_pair();
    let approx = online_eval_at(&itp, mu, &tp);

    let snap = &itp.snapshots[0];
    let tp_j = TransformPair::from_spatial(&snap.c, &snap.s, 1);
    let t2 = ccinterp_core::tensor::ExcTensor::from_t2(&snap.t2);
    let mut expect = ccinterp_core::tensor::cross_transform(&t2, &tp, &tp_j)
        .unwrap()
        .data
        .into_dimensionality::<ndarray::Ix4>()
        .unwrap();
    // online evaluation antisymmetrizes after summation
    let mut expect_amps = AmplitudeSet {
        t1: Array2::zeros((2, 2)),
        t2: expect.clone(),
    };
    expect_amps.antisymmetrize();
    expect = expect_amps.t2;
    for (a, b) in approx.t2.iter().zip(expect.iter()) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
}

#[test]
fn linearity_in_stored_amplitudes() {
    let traj = h2_stretch();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let mut itp = offline_build(&traj, &lib, 3, &cfg).unwrap();
    let mu = 0.42;
    let geom = traj.eval(mu).unwrap();
    let point = ccinterp_core::interp::scf_point(geom, &lib, 2, &cfg.scf).unwrap();
    let tp = point.transform_pair();
    let base = online_eval_at(&itp, mu, &tp);
    for snap in itp.snapshots.iter_mut() {
        snap.t1.mapv_inplace(|x| 2.0 * x);
        snap.t2.mapv_inplace(|x| 2.0 * x);
    }
    let doubled = online_eval_at(&itp, mu, &tp);
    for (a, b) in base.t2.iter().zip(doubled.t2.iter()) {
        assert_abs_diff_eq!(2.0 * a, *b, epsilon = 1e-13);
    }
    for (a, b) in base.t1.iter().zip(doubled.t1.iter()) {
        assert_abs_diff_eq!(2.0 * a, *b, epsilon = 1e-13);
    }
}

/// Synthetic snapshot family sharing one (S, C): a fixed 3-spatial-orbital
/// frame with polynomial amplitude entries of degree < d.
fn synthetic_family(
    mus: &[f64],
    c_matrix: &Array2<f64>,
    s: &Array2<f64>,
    amps_at: impl Fn(f64) -> (Array2<f64>, Array4<f64>),
) -> Vec<Snapshot> {
    mus.iter()
        .map(|&mu| {
            let (t1, t2) = amps_at(mu);
            let n_electrons = t1.ncols();
            Snapshot {
                schema_version: SCHEMA_VERSION,
                mu,
                geometry: Geometry::new(vec![
                    Atom { z: 1, pos: [0.0; 3] },
                    Atom { z: 1, pos: [0.0, 0.0, 1.4] },
                ])
                .unwrap(),
                basis_name: "synthetic".into(),
                basis_checksum: "synthetic".into(),
                n_electrons,
                s: s.clone(),
                c: c_matrix.clone(),
                lambdas: Array1::from_vec(vec![-0.5, 0.3, 0.9]),
                e_hf: -1.0,
                gap: 0.8,
                t1,
                t2,
                e_corr: -0.01,
                scf_iterations: 1,
                cc_iterations: 1,
                config_echo: "synthetic".into(),
            }
        })
        .collect()
}

/// S-orthonormal frame used by the synthetic tests (S = I keeps it simple).
fn synthetic_frame() -> (Array2<f64>, Array2<f64>) {
    let s = Array2::<f64>::eye(3);
    // a fixed orthogonal matrix: rotation mixing all three axes
    let (a, b) = (0.3f64, 0.7f64);
    let rz = ndarray::array![
        [a.cos(), -a.sin(), 0.0],
        [a.sin(), a.cos(), 0.0],
        [0.0, 0.0, 1.0]
    ];
    let rx = ndarray::array![
        [1.0, 0.0, 0.0],
        [0.0, b.cos(), -b.sin()],
        [0.0, b.sin(), b.cos()]
    ];
    (rz.dot(&rx), s)
}

#[test]
fn degree_exactness_on_shared_frame() {
    let d = 5;
    let ns = chebyshev_nodes(d);
    let (c, s) = synthetic_frame();
    let n_occ = 1; // 2 occupied / 4 virtual spin orbitals

    let amps_at = |mu: f64| {
        // polynomial entries of degree 4 = d - 1
        let poly = |k: f64| 0.1 + 0.3 * mu - 0.2 * mu * mu + k * mu * mu * mu * mu;
        let mut t1 = Array2::<f64>::zeros((4, 2));
        for (idx, v) in t1.iter_mut().enumerate() {
            *v = poly(0.05 * idx as f64);
        }
        let mut t2 = Array4::<f64>::zeros((4, 4, 2, 2));
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..2 {
                    for j in 0..2 {
                        if a == b || i == j {
                            continue;
                        }
                        let base = poly(0.02 * (a.min(b) * 4 + i.min(j)) as f64);
                        let sign = if (a < b) ^ (i < j) { -1.0 } else { 1.0 };
                        t2[[a, b, i, j]] = sign * base;
                    }
                }
            }
        }
        (t1, t2)
    };

    let snapshots = synthetic_family(&ns.nodes, &c, &s, amps_at);
    let lib = BasisLibrary::parse("synthetic", "H S\n 1.0 1.0\n").unwrap();
    let mut snapshots = snapshots;
    for sn in snapshots.iter_mut() {
        sn.basis_checksum = lib.checksum().to_string();
    }
    let traj = Trajectory::new(
        Geometry::new(vec![
            Atom { z: 1, pos: [0.0; 3] },
            Atom { z: 1, pos: [0.0, 0.0, 1.4] },
        ])
        .unwrap(),
        vec![],
    )
    .unwrap();
    let itp = Interpolant::from_parts(ns, snapshots, traj, lib).unwrap();

    let tp = TransformPair::from_spatial(&c, &s, n_occ);
    for &mu in &[0.13, 0.5, 0.77, 0.98] {
        let approx = online_eval_at(&itp, mu, &tp);
        let (t1, t2) = amps_at(mu);
        let exact = AmplitudeSet { t1, t2 };
        let err = amplitude_error(&approx, &exact).unwrap();
        assert!(err <= 1e-11, "degree exactness failed at mu = {mu}: {err}");
    }
}

/// The raw-MO control: with an induced occupied-orbital index crossing the
/// plain entrywise interpolation plateaus, while the transformed path keeps
/// converging.
#[test]
fn raw_mo_control_with_induced_crossing() {
    let (c_base, s) = synthetic_frame();
    let n_occ_sp = 2; // 2 occupied + 1 virtual spatial orbitals
    let crossing = 0.55;

    // smooth amplitudes in the smooth gauge
    let smooth_amps = |mu: f64| {
        let f = (1.3 * mu).sin();
        let mut t1 = Array2::<f64>::zeros((2, 4));
        for (idx, v) in t1.iter_mut().enumerate() {
            *v = 0.05 * f + 0.02 * mu * idx as f64;
        }
        let mut t2 = Array4::<f64>::zeros((2, 2, 4, 4));
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..4 {
                    for j in 0..4 {
                        if a == b || i == j {
                            continue;
                        }
                        let base = 0.03 * f + 0.01 * (mu * (1 + a.min(b) + i.min(j)) as f64).cos();
                        let sign = if (a < b) ^ (i < j) { -1.0 } else { 1.0 };
                        t2[[a, b, i, j]] = sign * base;
                    }
                }
            }
        }
        (t1, t2)
    };

    // aufbau-corrupted family: occupied columns 0 and 1 swap past the
    // crossing, with consistently relabeled amplitudes
    let corrupted = |mu: f64| -> (Array2<f64>, (Array2<f64>, Array4<f64>)) {
        let (t1s, t2s) = smooth_amps(mu);
        if mu <= crossing {
            return (c_base.clone(), (t1s, t2s));
        }
        let mut c = c_base.clone();
        for r in 0..3 {
            let tmp = c[[r, 0]];
            c[[r, 0]] = c[[r, 1]];
            c[[r, 1]] = tmp;
        }
        // swap occupied spin orbitals (0,1) <-> (2,3) in the amplitudes
        let perm = [2usize, 3, 0, 1];
        let mut t1 = t1s.clone();
        let mut t2 = t2s.clone();
        for a in 0..2 {
            for i in 0..4 {
                t1[[a, i]] = t1s[[a, perm[i]]];
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..4 {
                    for j in 0..4 {
                        t2[[a, b, i, j]] = t2s[[a, b, perm[i], perm[j]]];
                    }
                }
            }
        }
        (c, (t1, t2))
    };

    let lib = BasisLibrary::parse("synthetic", "H S\n 1.0 1.0\n").unwrap();
    let traj = Trajectory::new(
        Geometry::new(vec![
            Atom { z: 1, pos: [0.0; 3] },
            Atom { z: 1, pos: [0.0, 0.0, 1.4] },
        ])
        .unwrap(),
        vec![],
    )
    .unwrap();

    let grid = test_grid(30);
    let mut prev_transformed = f64::INFINITY;
    for d in [2usize, 4, 6, 8] {
        let ns = chebyshev_nodes(d);
        let mut snapshots = Vec::new();
        for &mu in &ns.nodes {
            let (c_mu, (t1, t2)) = corrupted(mu);
            let mut snap = synthetic_family(&[mu], &c_mu, &s, |_| (t1.clone(), t2.clone()))
                .pop()
                .unwrap();
            snap.basis_checksum = lib.checksum().to_string();
            snapshots.push(snap);
        }
        let itp =
            Interpolant::from_parts(ns.clone(), snapshots, traj.clone(), lib.clone()).unwrap();

        let mut err_raw = Vec::new();
        let mut err_transformed = Vec::new();
        for &mu in &grid {
            let (c_mu, (t1, t2)) = corrupted(mu);
            let exact = AmplitudeSet { t1, t2 };
            let tp = TransformPair::from_spatial(&c_mu, &s, n_occ_sp);
            let approx = online_eval_at(&itp, mu, &tp);
            err_transformed.push(amplitude_error(&approx, &exact).unwrap());

            let lag = lagrange_basis(&itp.node_set, mu);
            let mut raw = AmplitudeSet::zeros(2, 4);
            for (snap, &lj) in itp.snapshots.iter().zip(&lag) {
                raw.t1.scaled_add(lj, &snap.t1);
                raw.t2.scaled_add(lj, &snap.t2);
            }
            err_raw.push(amplitude_error(&raw, &exact).unwrap());
        }
        let mle_raw = mle(&err_raw).unwrap();
        let mle_transformed = mle(&err_transformed).unwrap();
        // the raw path plateaus above -2 while the transformed one descends
        assert!(
            mle_raw > -2.0,
            "raw MLE unexpectedly converged: {mle_raw} at d = {d}"
        );
        assert!(
            mle_transformed < prev_transformed,
            "transformed path must keep improving"
        );
        prev_transformed = mle_transformed;
    }
    assert!(prev_transformed < -6.0);
}

#[test]
fn warm_start_beats_mp2_near_node() {
    let traj = h4_breathing();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 6, &cfg).unwrap();
    let mu = 0.31;
    let geom = traj.eval(mu).unwrap();
    let (point, mo, _) = full_point(geom, &lib, 4, &cfg).unwrap();
    let warm_guess = online_eval_at(&itp, mu, &point.transform_pair());
    let warm = solve_ccsd(&warm_guess, &mo, &cfg.cc).unwrap();
    let cold = solve_ccsd(&mp2_guess(&mo).unwrap(), &mo, &cfg.cc).unwrap();
    assert!(
        warm.iterations < cold.iterations,
        "warm {} vs mp2 {}",
        warm.iterations,
        cold.iterations
    );
    assert_abs_diff_eq!(warm.e_corr, cold.e_corr, epsilon = 1e-9);
}

#[test]
fn error_bound_near_zero_at_nodes() {
    let traj = h2_stretch();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 4, &cfg).unwrap();
    let mu = itp.node_set.nodes[2];
    let geom = traj.eval(mu).unwrap();
    let (point, _mo, cc) = full_point(geom, &lib, 2, &cfg).unwrap();
    let tp = point.transform_pair();
    for rep in error_bound_check(&itp, mu, &cc.amplitudes, &tp) {
        assert!(rep.holds);
        assert!(rep.lhs <= 1e-10, "rank {} lhs {}", rep.rank, rep.lhs);
        assert!(rep.rhs <= 1e-9, "rank {} rhs {}", rep.rank, rep.rhs);
    }
}

#[test]
fn bound_holds_off_nodes_h4() {
    let traj = h4_breathing();
    let lib = sto3g();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 6, &cfg).unwrap();
    for &mu in &[0.1, 0.33, 0.62, 0.9] {
        let geom = traj.eval(mu).unwrap();
        let (point, _mo, cc) = full_point(geom, &lib, 4, &cfg).unwrap();
        let tp = point.transform_pair();
        for rep in error_bound_check(&itp, mu, &cc.amplitudes, &tp) {
            assert!(
                rep.holds,
                "bound violated at mu = {mu}, rank {}: lhs {} rhs {}",
                rep.rank, rep.lhs, rep.rhs
            );
        }
    }
}

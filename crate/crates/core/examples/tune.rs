//! Scratch tuning runs for the trajectory fixtures.
use ccinterp_core::basis::BasisLibrary;
use ccinterp_core::ccsd::{mp2_guess, solve_ccsd, CcConfig};
use ccinterp_core::geometry::{Atom, Geometry, Mode, Trajectory};
use ccinterp_core::interp::{
    amplitude_error, chebyshev_nodes, error_bound_check, full_point, mle, offline_build,
    online_eval_at, scf_point, test_grid, SolverConfig,
};
use ccinterp_core::mo::mo_transform;

fn fixture(path: &str) -> String {
    std::fs::read_to_string(format!("fixtures/{path}")).unwrap()
}

fn h4_breathing_freq(c: f64, freq: f64) -> Trajectory {
    let gamma0 = Geometry::new(
        (0..4)
            .map(|k| Atom { z: 1, pos: [0.0, 0.0, k as f64 * 1.8] })
            .collect(),
    )
    .unwrap();
    let mode = Mode {
        coeff: c,
        freq,
        displacement: vec![
            0.0, 0.0, -1.5, 0.0, 0.0, -0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 1.5,
        ],
    };
    Trajectory::new(gamma0, vec![mode]).unwrap()
}

fn decay_scan(c: f64, freq: f64) {
    let lib = BasisLibrary::parse("sto-3g", &fixture("basis/sto-3g.basis")).unwrap();
    let traj = h4_breathing_freq(c, freq);
    let cfg = SolverConfig::default();
    let grid = test_grid(20);

    // exact runs per grid point (reused across d)
    let mut exact = Vec::new();
    let mut min_gap = f64::INFINITY;
    for &mu in &grid {
        let geom = traj.eval(mu).unwrap();
        let (point, mo, cc) = full_point(geom, &lib, 4, &cfg).unwrap();
        min_gap = min_gap.min(point.scf.gap);
        exact.push((point, mo, cc));
    }
    println!("c = {c} freq = {freq}: min gap over grid = {min_gap:.4}");

    for d in [2usize, 4, 6, 8, 10, 12] {
        let itp = offline_build(&traj, &lib, d, &cfg).unwrap();
        let mut errors = Vec::new();
        let mut bound_ok = true;
        for (k, &mu) in grid.iter().enumerate() {
            let (point, _mo, cc) = &exact[k];
            let tp = point.transform_pair();
            let approx = online_eval_at(&itp, mu, &tp);
            errors.push(amplitude_error(&approx, &cc.amplitudes).unwrap());
            for rep in error_bound_check(&itp, mu, &cc.amplitudes, &tp) {
                if !rep.holds {
                    bound_ok = false;
                }
            }
        }
        let m = mle(&errors).unwrap();
        let max_e = errors.iter().cloned().fold(0.0f64, f64::max);
        println!("  d = {d:2}: E_MLE = {m:8.3}  max E = {max_e:.3e}  bound_ok = {bound_ok}");
    }
}

fn water_crossing_scan_basis(cx: f64, cy: f64, basis: &str, c: f64) {
    // bend-like displacement of the hydrogens
    let gamma0 = Geometry::new(vec![
        Atom { z: 8, pos: [0.000000000000, -0.143225816552, 0.0] },
        Atom { z: 1, pos: [1.638036840407, 1.136548822547, 0.0] },
        Atom { z: 1, pos: [-1.638036840407, 1.136548822547, 0.0] },
    ])
    .unwrap();
    let mode = Mode {
        coeff: c,
        freq: 0.25,
        displacement: vec![0.0, 0.0, 0.0, cx, -cy, 0.0, -cx, -cy, 0.0],
    };
    let traj = Trajectory::new(gamma0, vec![mode]).unwrap();
    let lib = BasisLibrary::parse(basis, &fixture(&format!("basis/{basis}.basis"))).unwrap();
    let cfg = SolverConfig::default();
    println!("water scan cx={cx} cy={cy} basis={basis} c={c}");
    let grid = test_grid(25);
    let mut prev: Option<ccinterp_core::interp::ScfPoint> = None;
    for &mu in &grid {
        let geom = traj.eval(mu).unwrap();
        match scf_point(geom, &lib, 10, &cfg.scf) {
            Ok(point) => {
                let l = &point.scf.lambdas;
                let n_b = l.len();
                // track order changes vs previous grid point via overlap
                let mut swap = String::new();
                if let Some(p) = &prev {
                    let m = p.scf.c.t().dot(&p.bundle.s).dot(&point.scf.c);
                    for block in [(0usize, 5usize), (5, n_b)] {
                        for col in block.0..block.1 {
                            let mut best = block.0;
                            for row in block.0..block.1 {
                                if m[[row, col]].abs() > m[[best, col]].abs() {
                                    best = row;
                                }
                            }
                            if best != col {
                                swap += &format!(" SWAP{}{best}->{col}", if col >= 5 { "v" } else { "o" });
                            }
                        }
                    }
                }
                let nv_show = (n_b - 5).min(4);
                let virts: Vec<String> = (5..5 + nv_show).map(|k| format!("{:8.4}", l[k])).collect();
                println!(
                    "  mu={mu:5.3} gap={:6.3} occ4={:8.4} virt={}{swap}",
                    point.scf.gap,
                    l[4],
                    virts.join(" ")
                );
                prev = Some(point);
            }
            Err(e) => println!("  mu={mu:5.3} FAILED: {e}"),
        }
    }
}

fn h2_stretch_check() {
    let traj = Trajectory::parse(&fixture("traj/h2_stretch.traj")).unwrap();
    let lib = BasisLibrary::parse("sto-3g", &fixture("basis/sto-3g.basis")).unwrap();
    let cfg = SolverConfig::default();
    let itp = offline_build(&traj, &lib, 4, &cfg).unwrap();
    print!("h2 stretch E_hf at nodes:");
    for s in &itp.snapshots {
        print!(" {:.6}", s.e_hf);
    }
    println!();
    // warm start at a non-node point
    let mu = 0.37;
    let geom = traj.eval(mu).unwrap();
    let (point, mo, _cc) = full_point(geom, &lib, 2, &cfg).unwrap();
    let tp = point.transform_pair();
    let warm = online_eval_at(&itp, mu, &tp);
    let from_warm = solve_ccsd(&warm, &mo, &cfg.cc).unwrap();
    let from_mp2 = solve_ccsd(&mp2_guess(&mo).unwrap(), &mo, &cfg.cc).unwrap();
    println!(
        "warm iterations {} vs mp2 iterations {}",
        from_warm.iterations, from_mp2.iterations
    );
    let _ = chebyshev_nodes(4);
    let _ = mo_transform;
}

fn chain_scan(n: usize, spacing: f64, zeta: Vec<f64>, c: f64, freq: f64) {
    let gamma0 = Geometry::new(
        (0..n)
            .map(|k| Atom { z: 1, pos: [0.0, 0.0, k as f64 * spacing] })
            .collect(),
    )
    .unwrap();
    let mode = Mode { coeff: c, freq, displacement: zeta };
    let traj = Trajectory::new(gamma0, vec![mode]).unwrap();
    let lib = BasisLibrary::parse("sto-3g", &fixture("basis/sto-3g.basis")).unwrap();
    let cfg = SolverConfig::default();
    println!("H{n} chain scan c={c}");
    let grid = test_grid(25);
    let mut prev: Option<ccinterp_core::interp::ScfPoint> = None;
    let n_occ = n / 2;
    for &mu in &grid {
        let geom = match traj.eval(mu) {
            Ok(g) => g,
            Err(e) => {
                println!("  mu={mu:5.3} GEOM FAILED: {e}");
                continue;
            }
        };
        match scf_point(geom, &lib, n, &cfg.scf) {
            Ok(point) => {
                let l = &point.scf.lambdas;
                let mut swap = String::new();
                if let Some(p) = &prev {
                    let m = p.scf.c.t().dot(&p.bundle.s).dot(&point.scf.c);
                    for block in [(0usize, n_occ), (n_occ, n)] {
                        for col in block.0..block.1 {
                            let mut best = block.0;
                            for row in block.0..block.1 {
                                if m[[row, col]].abs() > m[[best, col]].abs() {
                                    best = row;
                                }
                            }
                            if best != col {
                                swap += &format!(" SWAP{}{}->{}", if col >= n_occ { "v" } else { "o" }, best, col);
                            }
                        }
                    }
                }
                let levels: Vec<String> = (0..n).map(|k| format!("{:7.3}", l[k])).collect();
                println!("  mu={mu:5.3} gap={:6.3} [{}]{swap}", point.scf.gap, levels.join(" "));
                prev = Some(point);
            }
            Err(e) => println!("  mu={mu:5.3} FAILED: {e}"),
        }
    }
}

fn cross_demo_measure() {
    let gamma0 = Geometry::new(vec![
        Atom { z: 8, pos: [0.000000000000, -0.143225816552, 0.0] },
        Atom { z: 1, pos: [1.638036840407, 1.136548822547, 0.0] },
        Atom { z: 1, pos: [-1.638036840407, 1.136548822547, 0.0] },
    ])
    .unwrap();
    let mode = Mode {
        coeff: 1.0,
        freq: 0.25,
        displacement: vec![0.0, 0.0, 0.0, 0.75, -0.6, 0.0, -0.75, -0.6, 0.0],
    };
    let traj = Trajectory::new(gamma0, vec![mode]).unwrap();
    let lib = BasisLibrary::parse("6-31g", &fixture("basis/6-31g.basis")).unwrap();
    let cfg = SolverConfig::default();
    let grid = test_grid(25);

    let t0 = std::time::Instant::now();
    let mut exact = Vec::new();
    for &mu in &grid {
        let geom = traj.eval(mu).unwrap();
        let (point, _mo, cc) = full_point(geom, &lib, 10, &cfg).unwrap();
        exact.push((point, cc));
    }
    println!("exact grid solves: {:.1}s", t0.elapsed().as_secs_f64());

    for d in [4usize, 8, 12] {
        let t1 = std::time::Instant::now();
        let itp = offline_build(&traj, &lib, d, &cfg).unwrap();
        let mut err_t = Vec::new();
        let mut err_raw = Vec::new();
        let lagset: Vec<Vec<f64>> = grid
            .iter()
            .map(|&mu| ccinterp_core::interp::lagrange_basis(&itp.node_set, mu))
            .collect();
        for (k, &mu) in grid.iter().enumerate() {
            let (point, cc) = &exact[k];
            let tp = point.transform_pair();
            let approx = online_eval_at(&itp, mu, &tp);
            err_t.push(amplitude_error(&approx, &cc.amplitudes).unwrap());
            // raw entrywise interpolation, no transform
            let mut raw = ccinterp_core::ccsd::AmplitudeSet::zeros(
                cc.amplitudes.n_virt(),
                cc.amplitudes.n_occ(),
            );
            for (snap, &lj) in itp.snapshots.iter().zip(&lagset[k]) {
                raw.t1.scaled_add(lj, &snap.t1);
                raw.t2.scaled_add(lj, &snap.t2);
            }
            err_raw.push(amplitude_error(&raw, &cc.amplitudes).unwrap());
        }
        println!(
            "d = {d:2}: transformed E_MLE = {:7.3} raw E_MLE = {:7.3} (offline+eval {:.1}s)",
            mle(&err_t).unwrap(),
            mle(&err_raw).unwrap(),
            t1.elapsed().as_secs_f64()
        );
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    match args.get(1).map(|s| s.as_str()) {
        Some("h4") => {
            for (c, freq) in [(0.1, 0.5), (0.15, 0.5), (0.2, 0.5), (0.25, 0.5), (0.3, 0.25)] {
                decay_scan(c, freq);
            }
        }
        Some("chains") => {
            // H4 dimerization: pairs compress, middle expands
            chain_scan(4, 1.8, vec![0.0, 0.0, 0.5, 0.0, 0.0, -0.5, 0.0, 0.0, 0.5, 0.0, 0.0, -0.5], 0.6, 0.25);
            // H6 asymmetric breathing
            chain_scan(6, 1.8, vec![0.0, 0.0, -1.0, 0.0, 0.0, 0.3, 0.0, 0.0, -0.4, 0.0, 0.0, 0.4, 0.0, 0.0, -0.3, 0.0, 0.0, 1.0], 0.5, 0.25);
        }
        Some("water") => {
            water_crossing_scan_basis(0.75, 0.6, "6-31g", 1.0);
            water_crossing_scan_basis(0.75, 0.6, "6-31g", 1.4);
        }
        Some("h2") => h2_stretch_check(),
        Some("crossdemo") => cross_demo_measure(),
        _ => println!("usage: tune [h4|water|h2]"),
    }
}

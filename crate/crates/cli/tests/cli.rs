//! Binary-level tests: exit codes, printed reports, snapshot determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ccinterp"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn ccsd_single_point_matches_fci() {
    let out = bin()
        .args([
            "ccsd",
            "--geometry",
        ])
        .arg({
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("h2.geom");
            write(&p, "bohr\nH 0 0 0\nH 0 0 1.4\n");
            std::mem::forget(dir);
            p
        })
        .arg("--basis")
        .arg(fixtures().join("basis/sto-3g.basis"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let grab = |key: &str| -> f64 {
        stdout
            .lines()
            .find(|l| l.starts_with(key))
            .unwrap_or_else(|| panic!("missing '{key}' in output:\n{stdout}"))
            .split_whitespace()
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    let e_hf = grab("E_hf");
    let e_total = grab("E_total");
    assert!(stdout.contains("HOMO-LUMO gap"));
    assert!(stdout.contains("ccsd iterations"));

    // FCI oracle via the library: CCSD is exact for two electrons
    let text = std::fs::read_to_string(fixtures().join("basis/sto-3g.basis")).unwrap();
    let lib = ccinterp_core::basis::BasisLibrary::parse("sto-3g", &text).unwrap();
    let geom = ccinterp_core::geometry::Geometry::parse("bohr\nH 0 0 0\nH 0 0 1.4\n").unwrap();
    let bundle =
        ccinterp_core::integrals::compute_integrals(&geom, &lib.build(&geom).unwrap()).unwrap();
    let scf =
        ccinterp_core::scf::scf_iterate(&bundle, 2, &ccinterp_core::scf::ScfConfig::default())
            .unwrap();
    let mo = ccinterp_core::mo::mo_transform(&bundle, &scf);
    let (e_fci, _) = ccinterp_core::fci::fci_energy(&mo, 2).unwrap();
    assert!((e_hf - scf.e_hf).abs() < 1e-9);
    assert!((e_total - e_fci).abs() < 1e-9, "{e_total} vs {e_fci}");
}

#[test]
fn unreadable_basis_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let geom = dir.path().join("h2.geom");
    write(&geom, "bohr\nH 0 0 0\nH 0 0 1.4\n");
    let bad = dir.path().join("broken.basis");
    write(&bad, "H S\n not-a-number 1.0\n");
    let out = bin()
        .args(["scf", "--geometry"])
        .arg(&geom)
        .arg("--basis")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parse"), "stderr: {err}");

    // missing file entirely
    let out = bin()
        .args(["scf", "--geometry"])
        .arg(&geom)
        .arg("--basis")
        .arg(dir.path().join("missing.basis"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn odd_electron_count_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let geom = dir.path().join("h3.geom");
    write(&geom, "bohr\nH 0 0 0\nH 0 0 1.5\nH 0 0 3.0\n");
    let out = bin()
        .args(["ccsd", "--geometry"])
        .arg(&geom)
        .arg("--basis")
        .arg(fixtures().join("basis/sto-3g.basis"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("closed shell required"), "stderr: {err}");
}

#[test]
fn offline_writes_snapshots_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let st = bin()
            .args(["offline", "--trajectory"])
            .arg(fixtures().join("traj/h2_stretch.traj"))
            .arg("--basis")
            .arg(fixtures().join("basis/sto-3g.basis"))
            .args(["--nodes", "4", "--out"])
            .arg(out)
            .env("CCINTERP_THREADS", "1")
            .status()
            .unwrap();
        assert!(st.success());
    }
    // 4 snapshot files + manifest
    let files: Vec<_> = std::fs::read_dir(out_a.join("d04"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(files.iter().filter(|f| f.ends_with(".snap")).count(), 4);
    assert!(files.iter().any(|f| f == "manifest.txt"));
    // reruns produce identical bytes
    for name in files {
        let a = std::fs::read(out_a.join("d04").join(&name)).unwrap();
        let b = std::fs::read(out_b.join("d04").join(&name)).unwrap();
        assert_eq!(a, b, "file {name} differs between reruns");
    }
}

#[test]
fn gap_collapse_is_tagged_with_the_node() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.cfg");
    // demand an impossible gap so the first node collapses
    write(&cfg, "[scf]\ngap_min = 5.0\n");
    let out = bin()
        .args(["offline", "--trajectory"])
        .arg(fixtures().join("traj/h2_stretch.traj"))
        .arg("--basis")
        .arg(fixtures().join("basis/sto-3g.basis"))
        .args(["--nodes", "3", "--out"])
        .arg(dir.path().join("out"))
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("node 0"), "stderr: {err}");
    assert!(err.contains("gap"), "stderr: {err}");
}

#[test]
fn decay_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .args(["decay", "--trajectory"])
        .arg(fixtures().join("traj/h2_stretch.traj"))
        .arg("--basis")
        .arg(fixtures().join("basis/sto-3g.basis"))
        .args(["--nodes", "2,3", "--grid", "8", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    let csv = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config_sha256="));
    assert_eq!(lines[1], "d,E_MLE,min_E_mu,max_E_mu,bound_violations");
    // one row per requested node count
    assert_eq!(lines.len(), 2 + 2);
    assert!(dir.path().join("decay.svg").exists());
}

#[test]
fn bad_nodes_flag_is_usage_error() {
    let out = bin()
        .args(["decay", "--trajectory"])
        .arg(fixtures().join("traj/h2_stretch.traj"))
        .arg("--basis")
        .arg(fixtures().join("basis/sto-3g.basis"))
        .args(["--nodes", "6,4", "--grid", "8", "--out", "/tmp/x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

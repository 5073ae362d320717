//! Portable persistence of per-geometry solution bundles.
//!
//! A snapshot file is a self-describing container: a UTF-8 text header of
//! `key value` lines terminated by `END_HEADER`, followed by the declared
//! arrays as little-endian IEEE-754 binary64, concatenated in declaration
//! order. Header floats use the shortest round-trip decimal form, so writes
//! are byte-deterministic and reads recover exact values.
//!
//! Every load re-validates the physical invariants (S-orthonormality of the
//! coefficient columns, t2 antisymmetry, positive gap) so externally
//! produced files are accepted only when they are actually usable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, Array4};
use thiserror::Error;

use crate::basis::sha256_hex;
use crate::geometry::{Atom, Geometry};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("io failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt container: {msg}")]
    Corrupt { msg: String },
    #[error("unknown schema version {found} (supported: {SCHEMA_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("invariant violation: {name} (residual {residual:.3e}, tolerance {tol:.0e})")]
    InvariantViolation {
        name: String,
        residual: f64,
        tol: f64,
    },
    #[error("inconsistent snapshot set: {msg}")]
    InconsistentSet { msg: String },
}

/// Everything needed to reuse one geometry's solution: SCF data, spin-orbital
/// amplitudes, energies and solver provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub schema_version: u32,
    pub mu: f64,
    pub geometry: Geometry,
    pub basis_name: String,
    pub basis_checksum: String,
    pub n_electrons: usize,
    /// Spatial-orbital overlap matrix (n_b x n_b).
    pub s: Array2<f64>,
    /// Spatial-orbital coefficient matrix, occupied columns first.
    pub c: Array2<f64>,
    pub lambdas: Array1<f64>,
    pub e_hf: f64,
    pub gap: f64,
    /// Spin-orbital amplitudes; t2 layout [a, b, i, j] row-major.
    pub t1: Array2<f64>,
    pub t2: Array4<f64>,
    pub e_corr: f64,
    pub scf_iterations: usize,
    pub cc_iterations: usize,
    /// Canonical echo of the solver configuration that produced this file.
    pub config_echo: String,
}

const ORTHO_TOL: f64 = 1e-8;
const ANTISYM_TOL: f64 = 1e-8;

impl Snapshot {
    /// Validate the load-time invariants: C^T S C = I, t2 antisymmetry, and
    /// a positive HOMO-LUMO gap.
    pub fn validate(&self) -> Result<(), SnapshotError> {
        let ident = self.c.t().dot(&self.s).dot(&self.c);
        let n = ident.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ident[[i, j]] - expect).abs());
            }
        }
        if worst > ORTHO_TOL {
            return Err(SnapshotError::InvariantViolation {
                name: "coefficient orthonormality C^T S C = I".into(),
                residual: worst,
                tol: ORTHO_TOL,
            });
        }
        let amps = crate::ccsd::AmplitudeSet {
            t1: self.t1.clone(),
            t2: self.t2.clone(),
        };
        let viol = amps.antisymmetry_violation();
        if viol > ANTISYM_TOL {
            return Err(SnapshotError::InvariantViolation {
                name: "t2 antisymmetry".into(),
                residual: viol,
                tol: ANTISYM_TOL,
            });
        }
        if self.gap <= 0.0 {
            return Err(SnapshotError::InvariantViolation {
                name: "positive HOMO-LUMO gap".into(),
                residual: self.gap,
                tol: 0.0,
            });
        }
        Ok(())
    }

    pub fn n_b(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_occ_so(&self) -> usize {
        self.t1.ncols()
    }

    pub fn n_virt_so(&self) -> usize {
        self.t1.nrows()
    }
}

fn push_array(out: &mut Vec<u8>, vals: impl Iterator<Item = f64>) {
    for v in vals {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Serialize a snapshot into container bytes.
pub fn snapshot_to_bytes(s: &Snapshot) -> Vec<u8> {
    let mut h = String::new();
    let _ = writeln!(h, "CCSNAP");
    let _ = writeln!(h, "# text header, then little-endian binary64 arrays in declared order");
    let _ = writeln!(h, "# t2 layout: [a, b, i, j] row-major, virtual-major, spin orbitals");
    let _ = writeln!(h, "# spin convention: spatial orbital p -> spin orbitals 2p (alpha), 2p+1 (beta)");
    let _ = writeln!(h, "schema_version {}", s.schema_version);
    let _ = writeln!(h, "mu {}", s.mu);
    let _ = writeln!(h, "n_electrons {}", s.n_electrons);
    let _ = writeln!(h, "basis_name {}", s.basis_name);
    let _ = writeln!(h, "basis_checksum {}", s.basis_checksum);
    let _ = writeln!(h, "e_hf {}", s.e_hf);
    let _ = writeln!(h, "gap {}", s.gap);
    let _ = writeln!(h, "e_corr {}", s.e_corr);
    let _ = writeln!(h, "scf_iterations {}", s.scf_iterations);
    let _ = writeln!(h, "cc_iterations {}", s.cc_iterations);
    let _ = writeln!(h, "config {}", s.config_echo.replace('\n', ";"));
    let _ = writeln!(h, "n_atoms {}", s.geometry.n_atoms());
    for a in &s.geometry.atoms {
        let _ = writeln!(h, "atom {} {} {} {}", a.z, a.pos[0], a.pos[1], a.pos[2]);
    }
    let n_b = s.n_b();
    let (nv, _, no, _) = s.t2.dim();
    let _ = writeln!(h, "n_b {n_b}");
    let _ = writeln!(h, "n_occ_so {no}");
    let _ = writeln!(h, "n_virt_so {nv}");
    let _ = writeln!(h, "array s {}", n_b * n_b);
    let _ = writeln!(h, "array c {}", n_b * n_b);
    let _ = writeln!(h, "array lambdas {n_b}");
    let _ = writeln!(h, "array t1 {}", nv * no);
    let _ = writeln!(h, "array t2 {}", nv * nv * no * no);
    let _ = writeln!(h, "END_HEADER");

    let mut bytes = h.into_bytes();
    push_array(&mut bytes, s.s.iter().copied());
    push_array(&mut bytes, s.c.iter().copied());
    push_array(&mut bytes, s.lambdas.iter().copied());
    push_array(&mut bytes, s.t1.iter().copied());
    push_array(&mut bytes, s.t2.iter().copied());
    bytes
}

/// Write a validated snapshot container; byte output is deterministic for
/// identical inputs.
pub fn write_snapshot(s: &Snapshot, path: &Path) -> Result<(), SnapshotError> {
    s.validate()?;
    std::fs::write(path, snapshot_to_bytes(s)).map_err(|source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct HeaderView {
    keys: Vec<(String, String)>,
    atoms: Vec<Atom>,
    arrays: Vec<(String, usize)>,
}

fn parse_header(text: &str) -> Result<HeaderView, SnapshotError> {
    let mut lines = text.lines();
    match lines.next() {
        Some("CCSNAP") => {}
        other => {
            return Err(SnapshotError::Corrupt {
                msg: format!("bad magic line {other:?}"),
            })
        }
    }
    let mut keys = Vec::new();
    let mut atoms = Vec::new();
    let mut arrays = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "atom" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(SnapshotError::Corrupt {
                        msg: format!("bad atom line '{line}'"),
                    });
                }
                let z: u32 = toks[0].parse().map_err(|_| SnapshotError::Corrupt {
                    msg: format!("bad atomic number '{}'", toks[0]),
                })?;
                let mut pos = [0.0; 3];
                for (slot, t) in pos.iter_mut().zip(&toks[1..]) {
                    *slot = t.parse().map_err(|_| SnapshotError::Corrupt {
                        msg: format!("bad coordinate '{t}'"),
                    })?;
                }
                atoms.push(Atom { z, pos });
            }
            "array" => {
                let (name, len) = rest.split_once(' ').ok_or_else(|| SnapshotError::Corrupt {
                    msg: format!("bad array line '{line}'"),
                })?;
                let len: usize = len.parse().map_err(|_| SnapshotError::Corrupt {
                    msg: format!("bad array length '{len}'"),
                })?;
                arrays.push((name.to_string(), len));
            }
            _ => keys.push((key.to_string(), rest.to_string())),
        }
    }
    Ok(HeaderView {
        keys,
        atoms,
        arrays,
    })
}

impl HeaderView {
    fn get(&self, key: &str) -> Result<&str, SnapshotError> {
        self.keys
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| SnapshotError::Corrupt {
                msg: format!("missing header key '{key}'"),
            })
    }

    fn get_f64(&self, key: &str) -> Result<f64, SnapshotError> {
        self.get(key)?.parse().map_err(|_| SnapshotError::Corrupt {
            msg: format!("bad float for '{key}'"),
        })
    }

    fn get_usize(&self, key: &str) -> Result<usize, SnapshotError> {
        self.get(key)?.parse().map_err(|_| SnapshotError::Corrupt {
            msg: format!("bad integer for '{key}'"),
        })
    }
}

/// Parse container bytes into a validated snapshot.
pub fn snapshot_from_bytes(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    const MARKER: &[u8] = b"END_HEADER\n";
    let pos = bytes
        .windows(MARKER.len())
        .position(|w| w == MARKER)
        .ok_or_else(|| SnapshotError::Corrupt {
            msg: "missing END_HEADER marker".into(),
        })?;
    let header_text =
        std::str::from_utf8(&bytes[..pos + MARKER.len()]).map_err(|_| SnapshotError::Corrupt {
            msg: "header is not UTF-8".into(),
        })?;
    let header = parse_header(header_text)?;

    let version: u32 = header
        .get("schema_version")?
        .parse()
        .map_err(|_| SnapshotError::Corrupt {
            msg: "bad schema_version".into(),
        })?;
    if version != SCHEMA_VERSION {
        return Err(SnapshotError::VersionMismatch { found: version });
    }

    let mut payload = &bytes[pos + MARKER.len()..];
    let mut read_array = |want_name: &str, decl: &(String, usize)| -> Result<Vec<f64>, SnapshotError> {
        let (name, len) = decl;
        if name != want_name {
            return Err(SnapshotError::Corrupt {
                msg: format!("expected array '{want_name}', found '{name}'"),
            });
        }
        if payload.len() < len * 8 {
            return Err(SnapshotError::Corrupt {
                msg: format!(
                    "truncated payload for array '{name}': need {} bytes, have {}",
                    len * 8,
                    payload.len()
                ),
            });
        }
        let vals: Vec<f64> = payload[..len * 8]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        payload = &payload[len * 8..];
        Ok(vals)
    };

    if header.arrays.len() != 5 {
        return Err(SnapshotError::Corrupt {
            msg: format!("expected 5 array declarations, found {}", header.arrays.len()),
        });
    }
    let n_b = header.get_usize("n_b")?;
    let no = header.get_usize("n_occ_so")?;
    let nv = header.get_usize("n_virt_so")?;
    let s_flat = read_array("s", &header.arrays[0])?;
    let c_flat = read_array("c", &header.arrays[1])?;
    let l_flat = read_array("lambdas", &header.arrays[2])?;
    let t1_flat = read_array("t1", &header.arrays[3])?;
    let t2_flat = read_array("t2", &header.arrays[4])?;

    let shape_err = |what: &str| SnapshotError::Corrupt {
        msg: format!("array '{what}' length does not match declared dimensions"),
    };
    let s = Array2::from_shape_vec((n_b, n_b), s_flat).map_err(|_| shape_err("s"))?;
    let c = Array2::from_shape_vec((n_b, n_b), c_flat).map_err(|_| shape_err("c"))?;
    let lambdas = Array1::from_vec(l_flat);
    if lambdas.len() != n_b {
        return Err(shape_err("lambdas"));
    }
    let t1 = Array2::from_shape_vec((nv, no), t1_flat).map_err(|_| shape_err("t1"))?;
    let t2 = Array4::from_shape_vec((nv, nv, no, no), t2_flat).map_err(|_| shape_err("t2"))?;

    let geometry = Geometry::new(header.atoms.clone()).map_err(|e| SnapshotError::Corrupt {
        msg: format!("bad geometry: {e}"),
    })?;

    let snap = Snapshot {
        schema_version: version,
        mu: header.get_f64("mu")?,
        geometry,
        basis_name: header.get("basis_name")?.to_string(),
        basis_checksum: header.get("basis_checksum")?.to_string(),
        n_electrons: header.get_usize("n_electrons")?,
        s,
        c,
        lambdas,
        e_hf: header.get_f64("e_hf")?,
        gap: header.get_f64("gap")?,
        t1,
        t2,
        e_corr: header.get_f64("e_corr")?,
        scf_iterations: header.get_usize("scf_iterations")?,
        cc_iterations: header.get_usize("cc_iterations")?,
        config_echo: header.get("config")?.to_string(),
    };
    snap.validate()?;
    Ok(snap)
}

/// Read and validate a snapshot container from disk.
pub fn read_snapshot(path: &Path) -> Result<Snapshot, SnapshotError> {
    let bytes = std::fs::read(path).map_err(|source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    snapshot_from_bytes(&bytes)
}

/// Ordered description of a snapshot set: node parameters and file names,
/// with shared identity checksums.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotManifest {
    pub trajectory_checksum: String,
    pub basis_checksum: String,
    pub n_electrons: usize,
    /// (mu, file name) pairs, ascending in mu.
    pub entries: Vec<(f64, String)>,
}

impl SnapshotManifest {
    pub fn to_text(&self) -> String {
        let mut s = String::from("CCMANIFEST\n");
        let _ = writeln!(s, "trajectory_checksum {}", self.trajectory_checksum);
        let _ = writeln!(s, "basis_checksum {}", self.basis_checksum);
        let _ = writeln!(s, "n_electrons {}", self.n_electrons);
        let _ = writeln!(s, "nodes {}", self.entries.len());
        for (mu, file) in &self.entries {
            let _ = writeln!(s, "node {mu} {file}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, SnapshotError> {
        let mut lines = text.lines();
        if lines.next() != Some("CCMANIFEST") {
            return Err(SnapshotError::Corrupt {
                msg: "bad manifest magic".into(),
            });
        }
        let mut trajectory_checksum = String::new();
        let mut basis_checksum = String::new();
        let mut n_electrons = 0usize;
        let mut entries = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "trajectory_checksum" => trajectory_checksum = rest.to_string(),
                "basis_checksum" => basis_checksum = rest.to_string(),
                "n_electrons" => {
                    n_electrons = rest.parse().map_err(|_| SnapshotError::Corrupt {
                        msg: "bad n_electrons".into(),
                    })?
                }
                "nodes" => {}
                "node" => {
                    let (mu, file) = rest.split_once(' ').ok_or_else(|| SnapshotError::Corrupt {
                        msg: format!("bad node line '{line}'"),
                    })?;
                    let mu: f64 = mu.parse().map_err(|_| SnapshotError::Corrupt {
                        msg: format!("bad node mu '{mu}'"),
                    })?;
                    entries.push((mu, file.to_string()));
                }
                other => {
                    return Err(SnapshotError::Corrupt {
                        msg: format!("unknown manifest key '{other}'"),
                    })
                }
            }
        }
        Ok(SnapshotManifest {
            trajectory_checksum,
            basis_checksum,
            n_electrons,
            entries,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), SnapshotError> {
        std::fs::write(path, self.to_text()).map_err(|source| SnapshotError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self, SnapshotError> {
        let text = std::fs::read_to_string(path).map_err(|source| SnapshotError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Scan a directory of `.snap` files, validate cross-snapshot consistency
/// (shared basis checksum and electron count, strictly ascending unique mu)
/// and emit a manifest. The trajectory checksum is taken from `trajectory`,
/// or recorded as "external" for ingested third-party sets.
pub fn ingest_external(
    dir: &Path,
    trajectory_checksum: Option<&str>,
) -> Result<(SnapshotManifest, Vec<Snapshot>), SnapshotError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| SnapshotError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "snap").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(SnapshotError::InconsistentSet {
            msg: format!("no .snap files in {}", dir.display()),
        });
    }
    let mut snaps: Vec<(Snapshot, String)> = Vec::new();
    for f in &files {
        let s = read_snapshot(f)?;
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        snaps.push((s, name));
    }
    snaps.sort_by(|a, b| a.0.mu.partial_cmp(&b.0.mu).unwrap());

    let (first, first_name) = &snaps[0];
    for (s, name) in &snaps[1..] {
        if s.basis_checksum != first.basis_checksum {
            return Err(SnapshotError::InconsistentSet {
                msg: format!(
                    "basis checksum mismatch between {first_name} and {name}"
                ),
            });
        }
        if s.n_electrons != first.n_electrons {
            return Err(SnapshotError::InconsistentSet {
                msg: format!(
                    "electron count mismatch between {first_name} ({}) and {name} ({})",
                    first.n_electrons, s.n_electrons
                ),
            });
        }
    }
    for w in snaps.windows(2) {
        if w[0].0.mu == w[1].0.mu {
            return Err(SnapshotError::InconsistentSet {
                msg: format!(
                    "duplicate mu = {} in {} and {}",
                    w[0].0.mu, w[0].1, w[1].1
                ),
            });
        }
    }
    let manifest = SnapshotManifest {
        trajectory_checksum: trajectory_checksum.unwrap_or("external").to_string(),
        basis_checksum: first.basis_checksum.clone(),
        n_electrons: first.n_electrons,
        entries: snaps.iter().map(|(s, n)| (s.mu, n.clone())).collect(),
    };
    let snapshots = snaps.into_iter().map(|(s, _)| s).collect();
    Ok((manifest, snapshots))
}

/// sha256 of a trajectory descriptor, recorded in manifests.
pub fn trajectory_checksum(descriptor: &str) -> String {
    sha256_hex(descriptor.as_bytes())
}

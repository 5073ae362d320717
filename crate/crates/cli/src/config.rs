//! Config-file parsing ([scf] / [ccsd] sections of key = value lines) and
//! the experiment configuration shared by the study commands.

use anyhow::{bail, Context, Result};
use ccinterp_core::ccsd::GuessKind;
use ccinterp_core::interp::SolverConfig;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Parse an INI-style solver config:
///
/// ```text
/// [scf]
/// tol_grad = 1e-10
/// tol_e = 1e-12
/// max_iter = 200
/// diis_dim = 8
/// gap_min = 1e-6
/// [ccsd]
/// tol_r = 1e-9
/// tol_e = 1e-10
/// max_iter = 100
/// diis_dim = 8
/// guess = mp2
/// ```
pub fn parse_solver_config(text: &str) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    let mut section = String::new();
    for (ln0, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.to_ascii_lowercase();
            if section != "scf" && section != "ccsd" {
                bail!("line {}: unknown section [{section}]", ln0 + 1);
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key = value", ln0 + 1))?;
        let key = key.trim();
        let value = value.trim();
        let f = || -> Result<f64> {
            value
                .parse()
                .with_context(|| format!("line {}: bad number '{value}'", ln0 + 1))
        };
        let u = || -> Result<usize> {
            value
                .parse()
                .with_context(|| format!("line {}: bad integer '{value}'", ln0 + 1))
        };
        match (section.as_str(), key) {
            ("scf", "tol_grad") => cfg.scf.tol_grad = f()?,
            ("scf", "tol_e") => cfg.scf.tol_e = f()?,
            ("scf", "max_iter") => cfg.scf.max_iter = u()?,
            ("scf", "diis_dim") => cfg.scf.diis_dim = u()?,
            ("scf", "gap_min") => cfg.scf.gap_min = f()?,
            ("ccsd", "tol_r") => cfg.cc.tol_r = f()?,
            ("ccsd", "tol_e") => cfg.cc.tol_e = f()?,
            ("ccsd", "max_iter") => cfg.cc.max_iter = u()?,
            ("ccsd", "diis_dim") => cfg.cc.diis_dim = u()?,
            ("ccsd", "guess") => {
                cfg.cc.guess = match value.to_ascii_lowercase().as_str() {
                    "mp2" => GuessKind::Mp2,
                    "supplied" => GuessKind::Supplied,
                    other => bail!("line {}: unknown guess '{other}'", ln0 + 1),
                }
            }
            (sec, k) => bail!("line {}: unknown key '{k}' in section [{sec}]", ln0 + 1),
        }
    }
    Ok(cfg)
}

pub fn load_solver_config(path: Option<&Path>) -> Result<SolverConfig> {
    match path {
        None => Ok(SolverConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            parse_solver_config(&text)
        }
    }
}

/// Shared experiment parameters.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub trajectory_path: PathBuf,
    pub basis_path: PathBuf,
    pub node_counts: Vec<usize>,
    pub grid_size: usize,
    pub solver: SolverConfig,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_counts.is_empty() {
            bail!("--nodes must list at least one node count");
        }
        for w in self.node_counts.windows(2) {
            if w[1] <= w[0] {
                bail!("--nodes must be positive and strictly ascending");
            }
        }
        if self.node_counts[0] == 0 {
            bail!("--nodes entries must be positive");
        }
        if self.grid_size < 2 {
            bail!("--grid must be at least 2");
        }
        Ok(())
    }

    /// Checksum over the effective configuration, stamped into every CSV.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.solver.echo().as_bytes());
        h.update(format!("nodes={:?} grid={}", self.node_counts, self.grid_size).as_bytes());
        let out = h.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse "2,4,6" or "2..12:2" style node-count lists.
pub fn parse_node_counts(s: &str) -> Result<Vec<usize>> {
    if let Some((range, step)) = s.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .context("range form is lo..hi:step")?;
        let lo: usize = lo.trim().parse().context("bad range start")?;
        let hi: usize = hi.trim().parse().context("bad range end")?;
        let step: usize = step.trim().parse().context("bad range step")?;
        if step == 0 {
            bail!("step must be positive");
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad node count '{t}'"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_keys() {
        let cfg = parse_solver_config(
            "[scf]\ntol_grad = 1e-9\nmax_iter = 50\n[ccsd]\ntol_r = 1e-8\nguess = supplied\n",
        )
        .unwrap();
        assert_eq!(cfg.scf.tol_grad, 1e-9);
        assert_eq!(cfg.scf.max_iter, 50);
        assert_eq!(cfg.cc.tol_r, 1e-8);
        assert_eq!(cfg.cc.guess, GuessKind::Supplied);
        // untouched keys keep defaults
        assert_eq!(cfg.cc.max_iter, 100);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse_solver_config("[scf]\nbogus = 1\n").is_err());
        assert!(parse_solver_config("[other]\n").is_err());
    }

    #[test]
    fn node_count_forms() {
        assert_eq!(parse_node_counts("2,4,6").unwrap(), vec![2, 4, 6]);
        assert_eq!(parse_node_counts("2..8:2").unwrap(), vec![2, 4, 6, 8]);
        assert!(parse_node_counts("x").is_err());
    }
}

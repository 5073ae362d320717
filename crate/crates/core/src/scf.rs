//! Restricted Hartree-Fock: Löwdin orthogonalization, Fock builds, the
//! Roothaan eigenproblem with aufbau ordering, and the SCF fixed point
//! accelerated by Pulay commutator-DIIS.
//!
//! Convergence is measured by the Frobenius norm of the Riemannian gradient
//! [D, [D, F]] in the Löwdin-orthonormalized basis, where D is the idempotent
//! rank-N_occ projector; for a projector this norm coincides with the norm of
//! the commutator [F, D].

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::diis::Diis;
use crate::integrals::IntegralBundle;
use crate::linalg::{fro_norm, sym_eigh};

#[derive(Debug, Error)]
pub enum ScfError {
    #[error("overlap matrix is numerically singular: smallest eigenvalue {eigenvalue:.3e} < 1e-10")]
    LinearDependence { eigenvalue: f64 },
    #[error("SCF did not converge in {max_iter} iterations (last gradient norm {grad_norm:.3e})")]
    NotConverged { max_iter: usize, grad_norm: f64 },
    #[error("HOMO-LUMO gap collapsed: gap {gap:.3e} < {gap_min:.3e} hartree")]
    GapCollapse { gap: f64, gap_min: f64 },
    #[error("odd or impossible electron count {n_electrons} for {n_b} basis functions (closed shell required)")]
    BadElectronCount { n_electrons: usize, n_b: usize },
}

/// SCF solver knobs. Defaults match the documented file/flag keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ScfConfig {
    pub tol_grad: f64,
    pub tol_e: f64,
    pub max_iter: usize,
    pub diis_dim: usize,
    pub gap_min: f64,
}

impl Default for ScfConfig {
    fn default() -> Self {
        ScfConfig {
            tol_grad: 1e-10,
            tol_e: 1e-12,
            max_iter: 200,
            diis_dim: 8,
            gap_min: 1e-6,
        }
    }
}

/// Converged restricted Hartree-Fock state for one geometry.
#[derive(Debug, Clone)]
pub struct ScfSolution {
    /// Coefficient matrix, S-orthonormal columns, occupied block first.
    pub c: Array2<f64>,
    /// Orbital energies, ascending.
    pub lambdas: Array1<f64>,
    /// Closed-shell density 2 C_occ C_occ^T.
    pub d: Array2<f64>,
    /// Converged Fock matrix in the AO basis.
    pub f: Array2<f64>,
    /// Total energy including nuclear repulsion (hartree).
    pub e_hf: f64,
    /// HOMO-LUMO gap (hartree).
    pub gap: f64,
    /// Riemannian gradient norm at convergence.
    pub grad_norm: f64,
    pub n_occ: usize,
    pub iterations: usize,
}

impl ScfSolution {
    /// The idempotent rank-N_occ density in the orthonormalized basis,
    /// S^{1/2} C_occ C_occ^T S^{1/2}; satisfies D^2 = D, Tr D = N_occ.
    pub fn idempotent_density(&self, s_half: &Array2<f64>) -> Array2<f64> {
        let c_occ = self.c.slice(ndarray::s![.., ..self.n_occ]).to_owned();
        let proj = c_occ.dot(&c_occ.t());
        s_half.dot(&proj).dot(s_half)
    }
}

/// Symmetric square root and inverse square root of an SPD matrix.
pub fn lowdin(s: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>), ScfError> {
    let (vals, vecs) = sym_eigh(s);
    if vals[0] < 1e-10 {
        return Err(ScfError::LinearDependence { eigenvalue: vals[0] });
    }
    let n = s.nrows();
    let mut half = Array2::<f64>::zeros((n, n));
    let mut neg_half = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut p = 0.0;
            let mut m = 0.0;
            for k in 0..n {
                let w = vecs[[i, k]] * vecs[[j, k]];
                p += w * vals[k].sqrt();
                m += w / vals[k].sqrt();
            }
            half[[i, j]] = p;
            neg_half[[i, j]] = m;
        }
    }
    Ok((half, neg_half))
}

/// Closed-shell Fock matrix F = h + J(D) - K(D)/2 for D = 2 C_occ C_occ^T.
pub fn fock_build(h_core: &Array2<f64>, eri: &ndarray::Array4<f64>, d: &Array2<f64>) -> Array2<f64> {
    let n = h_core.nrows();
    let mut f = h_core.clone();
    for i in 0..n {
        for j in 0..n {
            let mut j_sum = 0.0;
            let mut k_sum = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let dkl = d[[k, l]];
                    if dkl == 0.0 {
                        continue;
                    }
                    j_sum += eri[[i, j, k, l]] * dkl;
                    k_sum += eri[[i, k, j, l]] * dkl;
                }
            }
            f[[i, j]] += j_sum - 0.5 * k_sum;
        }
    }
    f
}

/// Solve the Roothaan eigenproblem: symmetric eigensolve of
/// S^{-1/2} F S^{-1/2}, eigenpairs ascending (aufbau), coefficients mapped
/// back by S^{-1/2}, and a deterministic per-column sign gauge (the
/// largest-magnitude component of each column is made positive).
pub fn solve_roothaan(f: &Array2<f64>, s_neg_half: &Array2<f64>) -> (Array2<f64>, Array1<f64>) {
    let f_ortho = s_neg_half.dot(f).dot(s_neg_half);
    let (vals, vecs) = sym_eigh(&f_ortho);
    let mut c = s_neg_half.dot(&vecs);
    fix_column_signs(&mut c);
    (c, vals)
}

/// Largest-magnitude component of each column made positive; ties broken by
/// the first maximal entry.
pub fn fix_column_signs(c: &mut Array2<f64>) {
    let (n, m) = c.dim();
    for col in 0..m {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for row in 0..n {
            let a = c[[row, col]].abs();
            if a > best_abs {
                best_abs = a;
                best = row;
            }
        }
        if c[[best, col]] < 0.0 {
            for row in 0..n {
                c[[row, col]] = -c[[row, col]];
            }
        }
    }
}

/// Closed-shell electronic energy 1/2 Tr(D (h + F)).
fn electronic_energy(d: &Array2<f64>, h: &Array2<f64>, f: &Array2<f64>) -> f64 {
    let mut e = 0.0;
    for ((i, j), dv) in d.indexed_iter() {
        e += dv * (h[[i, j]] + f[[i, j]]);
    }
    0.5 * e
}

/// SCF fixed-point iteration with DIIS (started at iteration 2) and a damped
/// fallback step whenever the DIIS system is unusable.
pub fn scf_iterate(
    bundle: &IntegralBundle,
    n_electrons: usize,
    config: &ScfConfig,
) -> Result<ScfSolution, ScfError> {
    let n = bundle.s.nrows();
    if n_electrons == 0 || n_electrons % 2 != 0 || n_electrons > 2 * n {
        return Err(ScfError::BadElectronCount {
            n_electrons,
            n_b: n,
        });
    }
    let n_occ = n_electrons / 2;
    let (s_half, s_neg_half) = lowdin(&bundle.s)?;

    let mut f = bundle.h_core.clone();
    let mut e_old = f64::INFINITY;
    let mut last_grad = f64::INFINITY;
    let mut diis = Diis::new(config.diis_dim);
    let mut f_prev_ortho: Option<Array2<f64>> = None;

    for iter in 1..=config.max_iter {
        // orthonormal-basis Fock, possibly DIIS-extrapolated below
        let mut f_ortho = s_neg_half.dot(&f).dot(&s_neg_half);
        let (vals, vecs) = sym_eigh(&f_ortho);
        let mut c = s_neg_half.dot(&vecs);
        fix_column_signs(&mut c);
        let c_occ = c.slice(ndarray::s![.., ..n_occ]).to_owned();
        let d = 2.0 * c_occ.dot(&c_occ.t());

        f = fock_build(&bundle.h_core, &bundle.eri, &d);
        let e = electronic_energy(&d, &bundle.h_core, &f) + bundle.e_nuc;

        // Riemannian gradient in the orthonormalized basis
        f_ortho = s_neg_half.dot(&f).dot(&s_neg_half);
        let d_tilde = {
            let co = s_half.dot(&c_occ);
            co.dot(&co.t())
        };
        let comm = f_ortho.dot(&d_tilde) - d_tilde.dot(&f_ortho);
        let grad = {
            let inner = d_tilde.dot(&f_ortho).dot(&d_tilde);
            let mut g = d_tilde.dot(&f_ortho) + f_ortho.dot(&d_tilde);
            g.scaled_add(-2.0, &inner);
            g
        };
        let grad_norm = fro_norm(&grad);
        last_grad = grad_norm;

        if grad_norm < config.tol_grad && (e - e_old).abs() < config.tol_e {
            // with every orbital occupied there is no virtual space and the
            // gap cannot collapse
            let gap = if n_occ == n {
                f64::INFINITY
            } else {
                vals[n_occ] - vals[n_occ - 1]
            };
            if gap < config.gap_min {
                return Err(ScfError::GapCollapse {
                    gap,
                    gap_min: config.gap_min,
                });
            }
            return Ok(ScfSolution {
                c,
                lambdas: vals,
                d,
                f,
                e_hf: e,
                gap,
                grad_norm,
                n_occ,
                iterations: iter,
            });
        }
        e_old = e;

        if iter >= 2 {
            let extrapolated = diis.extrapolate(
                f_ortho.iter().copied().collect(),
                comm.iter().copied().collect(),
            );
            match extrapolated {
                Some(flat) => {
                    let f_new = Array2::from_shape_vec((n, n), flat).unwrap();
                    f = s_half.dot(&f_new).dot(&s_half);
                    f_prev_ortho = Some(f_new);
                }
                None => {
                    // damped fallback mixing with the previous orthonormal Fock
                    if let Some(prev) = &f_prev_ortho {
                        let mixed = 0.5 * (&f_ortho + prev);
                        f = s_half.dot(&mixed).dot(&s_half);
                        f_prev_ortho = Some(mixed);
                    } else {
                        f_prev_ortho = Some(f_ortho);
                    }
                }
            }
        } else {
            f_prev_ortho = Some(f_ortho);
        }
    }

    Err(ScfError::NotConverged {
        max_iter: config.max_iter,
        grad_norm: last_grad,
    })
}

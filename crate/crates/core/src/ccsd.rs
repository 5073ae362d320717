//! Spin-orbital CCSD: MP2 starting guess, the coupled cluster residual
//! (projections of the similarity-transformed Hamiltonian), correlation
//! energy, and a preconditioned quasi-Newton solver with amplitude DIIS.
//!
//! The residual is assembled through the standard one- and two-body
//! intermediates, keeping the full Fock matrix (no diagonal masking), so
//! `cc_residual` returns the exact projection values
//! Q_nu(t) = <Psi_nu, e^{-T} H e^{T} Psi_0> for all singles and doubles.

use ndarray::{Array2, Array4};
use thiserror::Error;

use crate::diis::Diis;
use crate::mo::MoIntegrals;

#[derive(Debug, Error)]
pub enum CcError {
    #[error("CCSD did not converge in {max_iter} iterations (last residual norm {residual:.3e})")]
    NotConverged { max_iter: usize, residual: f64 },
    #[error("degenerate MP2 denominator {value:.3e} for excitation ({a},{b},{i},{j}) (vanishing gap)")]
    DegenerateDenominator {
        a: usize,
        b: usize,
        i: usize,
        j: usize,
        value: f64,
    },
    #[error("FCI space too large: {n_so} spin orbitals exceeds the dense bound of 16")]
    TooLarge { n_so: usize },
}

/// Initial-guess selector, mirroring the `guess` config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuessKind {
    #[default]
    Mp2,
    Supplied,
}

/// CCSD solver knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct CcConfig {
    pub tol_r: f64,
    pub tol_e: f64,
    pub max_iter: usize,
    pub diis_dim: usize,
    pub guess: GuessKind,
}

impl Default for CcConfig {
    fn default() -> Self {
        CcConfig {
            tol_r: 1e-9,
            tol_e: 1e-10,
            max_iter: 100,
            diis_dim: 8,
            guess: GuessKind::Mp2,
        }
    }
}

/// T1 and T2 excitation amplitudes over spin orbitals. `t1[[a, i]]` and
/// `t2[[a, b, i, j]]` use virtual indices a,b (offset by n_occ_so in the
/// absolute spin-orbital numbering) and occupied indices i,j.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSet {
    pub t1: Array2<f64>,
    pub t2: Array4<f64>,
}

impl AmplitudeSet {
    pub fn zeros(n_virt_so: usize, n_occ_so: usize) -> Self {
        AmplitudeSet {
            t1: Array2::zeros((n_virt_so, n_occ_so)),
            t2: Array4::zeros((n_virt_so, n_virt_so, n_occ_so, n_occ_so)),
        }
    }

    pub fn n_virt(&self) -> usize {
        self.t1.nrows()
    }

    pub fn n_occ(&self) -> usize {
        self.t1.ncols()
    }

    /// Largest violation of the t2 antisymmetry pattern.
    pub fn antisymmetry_violation(&self) -> f64 {
        let (nv, _, no, _) = self.t2.dim();
        let mut worst = 0.0f64;
        for a in 0..nv {
            for b in 0..nv {
                for i in 0..no {
                    for j in 0..no {
                        let t = self.t2[[a, b, i, j]];
                        worst = worst.max((t + self.t2[[b, a, i, j]]).abs());
                        worst = worst.max((t + self.t2[[a, b, j, i]]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Project t2 onto the antisymmetric subspace (in both index pairs).
    pub fn antisymmetrize(&mut self) {
        let (nv, _, no, _) = self.t2.dim();
        let src = self.t2.clone();
        for a in 0..nv {
            for b in 0..nv {
                for i in 0..no {
                    for j in 0..no {
                        self.t2[[a, b, i, j]] = 0.25
                            * (src[[a, b, i, j]] - src[[b, a, i, j]] - src[[a, b, j, i]]
                                + src[[b, a, j, i]]);
                    }
                }
            }
        }
    }

    /// Euclidean norm of the concatenated (t1, t2) vector.
    pub fn norm(&self) -> f64 {
        let s1: f64 = self.t1.iter().map(|x| x * x).sum();
        let s2: f64 = self.t2.iter().map(|x| x * x).sum();
        (s1 + s2).sqrt()
    }

    fn to_flat(&self) -> Vec<f64> {
        self.t1.iter().chain(self.t2.iter()).copied().collect()
    }

    fn from_flat(flat: &[f64], nv: usize, no: usize) -> Self {
        let n1 = nv * no;
        let t1 = Array2::from_shape_vec((nv, no), flat[..n1].to_vec()).unwrap();
        let t2 = Array4::from_shape_vec((nv, nv, no, no), flat[n1..].to_vec()).unwrap();
        AmplitudeSet { t1, t2 }
    }
}

/// Converged CCSD result.
#[derive(Debug, Clone)]
pub struct CcSolution {
    pub amplitudes: AmplitudeSet,
    pub e_corr: f64,
    pub iterations: usize,
    pub final_residual_norm: f64,
}

/// MP2 starting guess: t1 = 0, t2 = <ij||ab> / (l_i + l_j - l_a - l_b).
pub fn mp2_guess(mo: &MoIntegrals) -> Result<AmplitudeSet, CcError> {
    let no = mo.n_occ_so;
    let nv = mo.n_virt_so;
    let mut amps = AmplitudeSet::zeros(nv, no);
    for a in 0..nv {
        for b in 0..nv {
            for i in 0..no {
                for j in 0..no {
                    let den = mo.f[[i, i]] + mo.f[[j, j]]
                        - mo.f[[no + a, no + a]]
                        - mo.f[[no + b, no + b]];
                    if den.abs() < 1e-8 {
                        return Err(CcError::DegenerateDenominator {
                            a,
                            b,
                            i,
                            j,
                            value: den,
                        });
                    }
                    amps.t2[[a, b, i, j]] = mo.eri_as[[i, j, no + a, no + b]] / den;
                }
            }
        }
    }
    Ok(amps)
}

/// Effective doubles including disconnected singles:
/// tau = t2 + t1 t1 - (swap), tau~ = t2 + (t1 t1 - swap)/2.
fn tau_tensors(t: &AmplitudeSet) -> (Array4<f64>, Array4<f64>) {
    let nv = t.n_virt();
    let no = t.n_occ();
    let mut tau = t.t2.clone();
    let mut tau_tilde = t.t2.clone();
    for a in 0..nv {
        for b in 0..nv {
            for i in 0..no {
                for j in 0..no {
                    let d = t.t1[[a, i]] * t.t1[[b, j]] - t.t1[[b, i]] * t.t1[[a, j]];
                    tau[[a, b, i, j]] += d;
                    tau_tilde[[a, b, i, j]] += 0.5 * d;
                }
            }
        }
    }
    (tau, tau_tilde)
}

/// The coupled cluster function Q(t): projections of e^{-T} H e^{T} Psi_0
/// onto all single and double excitations, returned in amplitude shape.
pub fn cc_residual(amps: &AmplitudeSet, mo: &MoIntegrals) -> AmplitudeSet {
    let no = mo.n_occ_so;
    let nv = mo.n_virt_so;
    let t1 = &amps.t1;
    let t2 = &amps.t2;
    let f = &mo.f;
    let v = &mo.eri_as;
    let (tau, tau_tilde) = tau_tensors(amps);

    // absolute index of virtual orbital a
    let va = |a: usize| no + a;

    // one-body intermediates (full Fock, no diagonal exclusion)
    let mut f_ae = Array2::<f64>::zeros((nv, nv));
    for a in 0..nv {
        for e in 0..nv {
            let mut x = f[[va(a), va(e)]];
            for m in 0..no {
                x -= 0.5 * f[[m, va(e)]] * t1[[a, m]];
                for ff in 0..nv {
                    x += t1[[ff, m]] * v[[m, va(a), va(ff), va(e)]];
                    for n in 0..no {
                        x -= 0.5 * tau_tilde[[a, ff, m, n]] * v[[m, n, va(e), va(ff)]];
                    }
                }
            }
            f_ae[[a, e]] = x;
        }
    }

    let mut f_mi = Array2::<f64>::zeros((no, no));
    for m in 0..no {
        for i in 0..no {
            let mut x = f[[m, i]];
            for e in 0..nv {
                x += 0.5 * t1[[e, i]] * f[[m, va(e)]];
                for n in 0..no {
                    x += t1[[e, n]] * v[[m, n, i, va(e)]];
                    for ff in 0..nv {
                        x += 0.5 * tau_tilde[[e, ff, i, n]] * v[[m, n, va(e), va(ff)]];
                    }
                }
            }
            f_mi[[m, i]] = x;
        }
    }

    let mut f_me = Array2::<f64>::zeros((no, nv));
    for m in 0..no {
        for e in 0..nv {
            let mut x = f[[m, va(e)]];
            for n in 0..no {
                for ff in 0..nv {
                    x += t1[[ff, n]] * v[[m, n, va(e), va(ff)]];
                }
            }
            f_me[[m, e]] = x;
        }
    }

    // two-body intermediates
    let mut w_mnij = Array4::<f64>::zeros((no, no, no, no));
    for m in 0..no {
        for n in 0..no {
            for i in 0..no {
                for j in 0..no {
                    let mut x = v[[m, n, i, j]];
                    for e in 0..nv {
                        x += t1[[e, j]] * v[[m, n, i, va(e)]] - t1[[e, i]] * v[[m, n, j, va(e)]];
                        for ff in 0..nv {
                            x += 0.25 * tau[[e, ff, i, j]] * v[[m, n, va(e), va(ff)]];
                        }
                    }
                    w_mnij[[m, n, i, j]] = x;
                }
            }
        }
    }

    let mut w_abef = Array4::<f64>::zeros((nv, nv, nv, nv));
    for a in 0..nv {
        for b in 0..nv {
            for e in 0..nv {
                for ff in 0..nv {
                    let mut x = v[[va(a), va(b), va(e), va(ff)]];
                    for m in 0..no {
                        x += -t1[[b, m]] * v[[va(a), m, va(e), va(ff)]]
                            + t1[[a, m]] * v[[va(b), m, va(e), va(ff)]];
                        for n in 0..no {
                            x += 0.25 * tau[[a, b, m, n]] * v[[m, n, va(e), va(ff)]];
                        }
                    }
                    w_abef[[a, b, e, ff]] = x;
                }
            }
        }
    }

    let mut w_mbej = Array4::<f64>::zeros((no, nv, nv, no));
    for m in 0..no {
        for b in 0..nv {
            for e in 0..nv {
                for j in 0..no {
                    let mut x = v[[m, va(b), va(e), j]];
                    for ff in 0..nv {
                        x += t1[[ff, j]] * v[[m, va(b), va(e), va(ff)]];
                    }
                    for n in 0..no {
                        x -= t1[[b, n]] * v[[m, n, va(e), j]];
                        for ff in 0..nv {
                            x -= (0.5 * t2[[ff, b, j, n]] + t1[[ff, j]] * t1[[b, n]])
                                * v[[m, n, va(e), va(ff)]];
                        }
                    }
                    w_mbej[[m, b, e, j]] = x;
                }
            }
        }
    }

    // singles residual
    let mut r1 = Array2::<f64>::zeros((nv, no));
    for a in 0..nv {
        for i in 0..no {
            let mut x = f[[va(a), i]];
            for e in 0..nv {
                x += t1[[e, i]] * f_ae[[a, e]];
            }
            for m in 0..no {
                x -= t1[[a, m]] * f_mi[[m, i]];
                for e in 0..nv {
                    x += t2[[a, e, i, m]] * f_me[[m, e]];
                    for ff in 0..nv {
                        x -= 0.5 * t2[[e, ff, i, m]] * v[[m, va(a), va(e), va(ff)]];
                    }
                    for n in 0..no {
                        x -= 0.5 * t2[[a, e, m, n]] * v[[n, m, va(e), i]];
                    }
                }
            }
            for n in 0..no {
                for ff in 0..nv {
                    x -= t1[[ff, n]] * v[[n, va(a), i, va(ff)]];
                }
            }
            r1[[a, i]] = x;
        }
    }

    // doubles residual
    let mut r2 = Array4::<f64>::zeros((nv, nv, no, no));
    for a in 0..nv {
        for b in 0..nv {
            for i in 0..no {
                for j in 0..no {
                    let mut x = v[[va(a), va(b), i, j]];
                    // P(ab) t2[ae,ij] (F_be - 1/2 sum_m t1[b,m] F_me)
                    for e in 0..nv {
                        let mut gb = f_ae[[b, e]];
                        let mut ga = f_ae[[a, e]];
                        for m in 0..no {
                            gb -= 0.5 * t1[[b, m]] * f_me[[m, e]];
                            ga -= 0.5 * t1[[a, m]] * f_me[[m, e]];
                        }
                        x += t2[[a, e, i, j]] * gb - t2[[b, e, i, j]] * ga;
                    }
                    // -P(ij) t2[ab,im] (F_mj + 1/2 sum_e t1[e,j] F_me)
                    for m in 0..no {
                        let mut gj = f_mi[[m, j]];
                        let mut gi = f_mi[[m, i]];
                        for e in 0..nv {
                            gj += 0.5 * t1[[e, j]] * f_me[[m, e]];
                            gi += 0.5 * t1[[e, i]] * f_me[[m, e]];
                        }
                        x += -t2[[a, b, i, m]] * gj + t2[[a, b, j, m]] * gi;
                    }
                    // 1/2 tau W_mnij and 1/2 tau W_abef
                    for m in 0..no {
                        for n in 0..no {
                            x += 0.5 * tau[[a, b, m, n]] * w_mnij[[m, n, i, j]];
                        }
                    }
                    for e in 0..nv {
                        for ff in 0..nv {
                            x += 0.5 * tau[[e, ff, i, j]] * w_abef[[a, b, e, ff]];
                        }
                    }
                    // P(ij)P(ab) (t2[ae,im] W_mbej - t1[e,i] t1[a,m] <mb||ej>)
                    for m in 0..no {
                        for e in 0..nv {
                            x += t2[[a, e, i, m]] * w_mbej[[m, b, e, j]]
                                - t1[[e, i]] * t1[[a, m]] * v[[m, va(b), va(e), j]];
                            x -= t2[[b, e, i, m]] * w_mbej[[m, a, e, j]]
                                - t1[[e, i]] * t1[[b, m]] * v[[m, va(a), va(e), j]];
                            x -= t2[[a, e, j, m]] * w_mbej[[m, b, e, i]]
                                - t1[[e, j]] * t1[[a, m]] * v[[m, va(b), va(e), i]];
                            x += t2[[b, e, j, m]] * w_mbej[[m, a, e, i]]
                                - t1[[e, j]] * t1[[b, m]] * v[[m, va(a), va(e), i]];
                        }
                    }
                    // P(ij) t1[e,i] <ab||ej>
                    for e in 0..nv {
                        x += t1[[e, i]] * v[[va(a), va(b), va(e), j]]
                            - t1[[e, j]] * v[[va(a), va(b), va(e), i]];
                    }
                    // -P(ab) t1[a,m] <mb||ij>
                    for m in 0..no {
                        x += -t1[[a, m]] * v[[m, va(b), i, j]] + t1[[b, m]] * v[[m, va(a), i, j]];
                    }
                    r2[[a, b, i, j]] = x;
                }
            }
        }
    }

    AmplitudeSet { t1: r1, t2: r2 }
}

/// Correlation energy from the standard projection formula:
/// sum f_ia t1 + 1/4 sum <ij||ab> t2 + 1/2 sum <ij||ab> t1 t1.
pub fn cc_energy(amps: &AmplitudeSet, mo: &MoIntegrals) -> f64 {
    let no = mo.n_occ_so;
    let nv = mo.n_virt_so;
    let mut e = 0.0;
    for i in 0..no {
        for a in 0..nv {
            e += mo.f[[i, no + a]] * amps.t1[[a, i]];
        }
    }
    for i in 0..no {
        for j in 0..no {
            for a in 0..nv {
                for b in 0..nv {
                    let vint = mo.eri_as[[i, j, no + a, no + b]];
                    e += 0.25 * vint * amps.t2[[a, b, i, j]];
                    e += 0.5 * vint * amps.t1[[a, i]] * amps.t1[[b, j]];
                }
            }
        }
    }
    e
}

/// Quasi-Newton iteration t <- t - D^{-1} Q(t) with the orbital-energy
/// difference preconditioner D, accelerated by amplitude DIIS. `use_diis`
/// exists so iteration-count studies can compare both solver variants.
pub fn solve_ccsd_with(
    guess: &AmplitudeSet,
    mo: &MoIntegrals,
    config: &CcConfig,
    use_diis: bool,
) -> Result<CcSolution, CcError> {
    let no = mo.n_occ_so;
    let nv = mo.n_virt_so;
    let mut t = guess.clone();
    if t.antisymmetry_violation() > 1e-10 {
        t.antisymmetrize();
    }

    let mut diis = Diis::new(config.diis_dim);
    let mut e_old = f64::INFINITY;
    let mut iterations = 0usize;

    loop {
        let q = cc_residual(&t, mo);
        let rnorm = q.norm();
        let e = cc_energy(&t, mo);
        if rnorm < config.tol_r && (e - e_old).abs() < config.tol_e {
            return Ok(CcSolution {
                amplitudes: t,
                e_corr: e,
                iterations,
                final_residual_norm: rnorm,
            });
        }
        if iterations >= config.max_iter {
            return Err(CcError::NotConverged {
                max_iter: config.max_iter,
                residual: rnorm,
            });
        }
        e_old = e;
        iterations += 1;

        // preconditioned step
        let mut step = AmplitudeSet::zeros(nv, no);
        for a in 0..nv {
            for i in 0..no {
                let den = mo.f[[no + a, no + a]] - mo.f[[i, i]];
                step.t1[[a, i]] = -q.t1[[a, i]] / den;
            }
        }
        for a in 0..nv {
            for b in 0..nv {
                for i in 0..no {
                    for j in 0..no {
                        let den = mo.f[[no + a, no + a]] + mo.f[[no + b, no + b]]
                            - mo.f[[i, i]]
                            - mo.f[[j, j]];
                        step.t2[[a, b, i, j]] = -q.t2[[a, b, i, j]] / den;
                    }
                }
            }
        }
        let mut t_new_flat: Vec<f64> = t
            .to_flat()
            .iter()
            .zip(step.to_flat())
            .map(|(a, b)| a + b)
            .collect();
        if use_diis {
            if let Some(extrap) = diis.extrapolate(t_new_flat.clone(), step.to_flat()) {
                t_new_flat = extrap;
            }
        }
        t = AmplitudeSet::from_flat(&t_new_flat, nv, no);
    }
}

/// Solve with the configured defaults (DIIS on).
pub fn solve_ccsd(
    guess: &AmplitudeSet,
    mo: &MoIntegrals,
    config: &CcConfig,
) -> Result<CcSolution, CcError> {
    solve_ccsd_with(guess, mo, config, true)
}

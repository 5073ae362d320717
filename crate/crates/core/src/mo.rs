//! Transformation of AO integrals into the molecular spin-orbital basis.
//!
//! Spin orbitals interleave spin over spatial orbitals: spatial p maps to
//! spin orbitals 2p (alpha) and 2p+1 (beta), so for a closed-shell reference
//! the occupied spin orbitals are exactly 0..n_electrons.

use ndarray::{Array2, Array4};

use crate::integrals::IntegralBundle;
use crate::scf::ScfSolution;

/// Spin-orbital Fock matrix and antisymmetrized two-electron integrals
/// <pq||rs> in physicists' notation, plus occupancy bookkeeping.
#[derive(Debug, Clone)]
pub struct MoIntegrals {
    pub f: Array2<f64>,
    pub eri_as: Array4<f64>,
    pub n_occ_so: usize,
    pub n_virt_so: usize,
    pub e_nuc: f64,
}

impl MoIntegrals {
    pub fn n_so(&self) -> usize {
        self.n_occ_so + self.n_virt_so
    }

    /// One-body core Hamiltonian recovered from the Fock matrix:
    /// h_pq = f_pq - sum_i <pi||qi> over occupied spin orbitals.
    pub fn core_hamiltonian(&self) -> Array2<f64> {
        let n = self.n_so();
        let mut h = self.f.clone();
        for p in 0..n {
            for q in 0..n {
                let mut v = 0.0;
                for i in 0..self.n_occ_so {
                    v += self.eri_as[[p, i, q, i]];
                }
                h[[p, q]] -= v;
            }
        }
        h
    }

    /// Reference (Hartree-Fock) total energy from the spin-orbital data:
    /// sum_i h_ii + 1/2 sum_ij <ij||ij> + e_nuc.
    pub fn reference_energy(&self) -> f64 {
        let h = self.core_hamiltonian();
        let mut e = 0.0;
        for i in 0..self.n_occ_so {
            e += h[[i, i]];
            for j in 0..self.n_occ_so {
                e += 0.5 * self.eri_as[[i, j, i, j]];
            }
        }
        e + self.e_nuc
    }
}

/// Four staged quarter-transforms of the AO (ij|kl) tensor into the MO
/// basis, then spin blocking and antisymmetrization.
pub fn mo_transform(bundle: &IntegralBundle, scf: &ScfSolution) -> MoIntegrals {
    let n = bundle.s.nrows();
    let c = &scf.c;

    // (pq|rs)_mo via four O(n^5) quarter transforms
    let mut cur = bundle.eri.clone();
    for _round in 0..4 {
        let mut next = Array4::<f64>::zeros((n, n, n, n));
        for p in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let mut acc = 0.0;
                        for mu in 0..n {
                            acc += c[[mu, p]] * cur[[mu, b, cc, d]];
                        }
                        next[[b, cc, d, p]] = acc;
                    }
                }
            }
        }
        cur = next;
    }
    let eri_mo = cur; // chemists' (pq|rs)

    let f_mo = c.t().dot(&scf.f).dot(c);

    let n_so = 2 * n;
    let mut f_so = Array2::<f64>::zeros((n_so, n_so));
    for p in 0..n_so {
        for q in 0..n_so {
            if p % 2 == q % 2 {
                f_so[[p, q]] = f_mo[[p / 2, q / 2]];
            }
        }
    }

    // <pq||rs> = (pr|qs)*d(sp,sr)d(sq,ss) - (ps|qr)*d(sp,ss)d(sq,sr)
    let mut eri_as = Array4::<f64>::zeros((n_so, n_so, n_so, n_so));
    for p in 0..n_so {
        for q in 0..n_so {
            for r in 0..n_so {
                for s in 0..n_so {
                    let coul = if p % 2 == r % 2 && q % 2 == s % 2 {
                        eri_mo[[p / 2, r / 2, q / 2, s / 2]]
                    } else {
                        0.0
                    };
                    let exch = if p % 2 == s % 2 && q % 2 == r % 2 {
                        eri_mo[[p / 2, s / 2, q / 2, r / 2]]
                    } else {
                        0.0
                    };
                    eri_as[[p, q, r, s]] = coul - exch;
                }
            }
        }
    }

    MoIntegrals {
        f: f_so,
        eri_as,
        n_occ_so: 2 * scf.n_occ,
        n_virt_so: n_so - 2 * scf.n_occ,
        e_nuc: bundle.e_nuc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array1;

    /// mo_transform with an identity coefficient matrix must reproduce the
    /// AO tensor inside the spin-mapped antisymmetrized combination.
    #[test]
    fn identity_transform_keeps_ao_integrals() {
        let n = 2;
        let mut eri = Array4::<f64>::zeros((n, n, n, n));
        // symmetric toy tensor
        eri[[0, 0, 0, 0]] = 1.0;
        eri[[1, 1, 1, 1]] = 0.7;
        eri[[0, 0, 1, 1]] = 0.3;
        eri[[1, 1, 0, 0]] = 0.3;
        let bundle = IntegralBundle {
            s: Array2::eye(n),
            h_core: Array2::zeros((n, n)),
            eri,
            e_nuc: 0.0,
        };
        let scf = ScfSolution {
            c: Array2::eye(n),
            lambdas: Array1::zeros(n),
            d: Array2::zeros((n, n)),
            f: Array2::zeros((n, n)),
            e_hf: 0.0,
            gap: 1.0,
            grad_norm: 0.0,
            n_occ: 1,
            iterations: 0,
        };
        let mo = mo_transform(&bundle, &scf);
        // <0a 1a || 0a 1a> = (00|11) - (01|10) = 0.3 - 0.0
        assert_abs_diff_eq!(mo.eri_as[[0, 2, 0, 2]], 0.3, epsilon = 1e-14);
        // <0a 0b || 0a 0b> = (00|00) = 1.0
        assert_abs_diff_eq!(mo.eri_as[[0, 1, 0, 1]], 1.0, epsilon = 1e-14);
        // same-spin pair on one spatial orbital vanishes by antisymmetry
        assert_abs_diff_eq!(mo.eri_as[[0, 0, 0, 0]], 0.0, epsilon = 1e-14);
    }
}

//! Dense full configuration interaction over bitstring-encoded Slater
//! determinants, used as an exact test oracle for small systems.

use std::collections::HashMap;

use ndarray::Array2;

use crate::ccsd::CcError;
use crate::linalg::sym_eigh;
use crate::mo::MoIntegrals;

/// Apply annihilation operators (in order) then creation operators (in
/// order) to a determinant bitmask. Returns the resulting mask and fermionic
/// sign, or `None` if the string annihilates the state.
pub fn apply_ops(mask: u64, annihilate: &[usize], create: &[usize]) -> Option<(u64, f64)> {
    let mut m = mask;
    let mut sign = 1.0;
    for &p in annihilate {
        if m >> p & 1 == 0 {
            return None;
        }
        if (m & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        m &= !(1u64 << p);
    }
    for &r in create {
        if m >> r & 1 == 1 {
            return None;
        }
        if (m & ((1u64 << r) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        m |= 1u64 << r;
    }
    Some((m, sign))
}

/// All determinants of `n_elec` electrons in `n_so` spin orbitals,
/// ascending by bitmask value.
pub fn enumerate_determinants(n_so: usize, n_elec: usize) -> Vec<u64> {
    let mut dets = Vec::new();
    for m in 0u64..(1u64 << n_so) {
        if m.count_ones() as usize == n_elec {
            dets.push(m);
        }
    }
    dets
}

/// Ground-state energy (including nuclear repulsion) and eigenvector of the
/// Hamiltonian in the full Slater-determinant basis, by dense symmetric
/// diagonalization with Slater-Condon matrix elements.
///
/// The determinant ordering of the returned eigenvector follows
/// [`enumerate_determinants`]. The reference determinant (lowest
/// `n_electrons` spin orbitals occupied) is the first entry.
pub fn fci_energy(mo: &MoIntegrals, n_electrons: usize) -> Result<(f64, Vec<f64>), CcError> {
    let n_so = mo.n_so();
    if n_so > 16 {
        return Err(CcError::TooLarge { n_so });
    }
    let h = mo.core_hamiltonian();
    let v = &mo.eri_as;
    let dets = enumerate_determinants(n_so, n_electrons);
    let index: HashMap<u64, usize> = dets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let dim = dets.len();
    let mut ham = Array2::<f64>::zeros((dim, dim));

    for (col, &mask) in dets.iter().enumerate() {
        let occ: Vec<usize> = (0..n_so).filter(|&p| mask >> p & 1 == 1).collect();
        // diagonal
        let mut diag = 0.0;
        for &p in &occ {
            diag += h[[p, p]];
            for &q in &occ {
                diag += 0.5 * v[[p, q, p, q]];
            }
        }
        ham[[col, col]] = diag;

        // single excitations p -> r
        for &p in &occ {
            for r in 0..n_so {
                if mask >> r & 1 == 1 {
                    continue;
                }
                let (new_mask, sign) = apply_ops(mask, &[p], &[r]).unwrap();
                let mut val = h[[r, p]];
                for &t in &occ {
                    if t != p {
                        val += v[[r, t, p, t]];
                    }
                }
                ham[[index[&new_mask], col]] += sign * val;
            }
        }

        // double excitations (p < q) -> (r < s)
        for (pi, &p) in occ.iter().enumerate() {
            for &q in &occ[pi + 1..] {
                for r in 0..n_so {
                    if mask >> r & 1 == 1 {
                        continue;
                    }
                    for s in r + 1..n_so {
                        if mask >> s & 1 == 1 {
                            continue;
                        }
                        // matrix element of a+_r a+_s a_q a_p
                        let (new_mask, sign) = apply_ops(mask, &[p, q], &[s, r]).unwrap();
                        ham[[index[&new_mask], col]] += sign * v[[r, s, p, q]];
                    }
                }
            }
        }
    }

    let (vals, vecs) = sym_eigh(&ham);
    let ground: Vec<f64> = (0..dim).map(|i| vecs[[i, 0]]).collect();
    Ok((vals[0] + mo.e_nuc, ground))
}

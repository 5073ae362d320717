//! Pulay DIIS extrapolation over flattened iterate/error vector pairs,
//! shared by the SCF and CCSD solvers.

use std::collections::VecDeque;

use ndarray::Array2;

use crate::linalg::{solve_dense, sym_condition};

pub(crate) struct Diis {
    dim: usize,
    errs: VecDeque<Vec<f64>>,
    vecs: VecDeque<Vec<f64>>,
}

impl Diis {
    pub(crate) fn new(dim: usize) -> Self {
        Diis {
            dim,
            errs: VecDeque::new(),
            vecs: VecDeque::new(),
        }
    }

    /// Store an (iterate, error) pair and return the extrapolated iterate.
    /// Returns `None` with fewer than two stored pairs, or when the DIIS
    /// system is singular (condition number above 1e12); callers fall back
    /// to a plain damped step in that case.
    pub(crate) fn extrapolate(&mut self, vec: Vec<f64>, err: Vec<f64>) -> Option<Vec<f64>> {
        if self.errs.len() == self.dim {
            self.errs.pop_front();
            self.vecs.pop_front();
        }
        self.errs.push_back(err);
        self.vecs.push_back(vec);
        let m = self.errs.len();
        if m < 2 {
            return None;
        }
        let mut b = Array2::<f64>::zeros((m + 1, m + 1));
        for i in 0..m {
            for j in 0..m {
                b[[i, j]] = self.errs[i]
                    .iter()
                    .zip(&self.errs[j])
                    .map(|(x, y)| x * y)
                    .sum();
            }
            b[[i, m]] = -1.0;
            b[[m, i]] = -1.0;
        }
        if sym_condition(&b) > 1e12 {
            return None;
        }
        let mut rhs = vec![0.0; m + 1];
        rhs[m] = -1.0;
        let coef = solve_dense(&b, &rhs)?;
        let len = self.vecs[0].len();
        let mut out = vec![0.0; len];
        for (ci, vec) in coef[..m].iter().zip(&self.vecs) {
            for (o, v) in out.iter_mut().zip(vec) {
                *o += ci * v;
            }
        }
        Some(out)
    }
}

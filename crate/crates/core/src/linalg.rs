//! Dense symmetric linear algebra on `ndarray` matrices.
//!
//! Everything here is sized for desk-scale electronic structure problems
//! (matrices up to a few hundred rows), where a cyclic Jacobi eigensolver is
//! both fast enough and bit-deterministic across runs.

use ndarray::{Array1, Array2};

/// Frobenius norm.
pub fn fro_norm(m: &Array2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest absolute eigenvalue of a symmetric matrix (its spectral norm).
pub fn spectral_norm_sym(m: &Array2<f64>) -> f64 {
    let (vals, _) = sym_eigh(m);
    vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Eigendecomposition of a real symmetric matrix by the cyclic Jacobi method.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues sorted ascending
/// and eigenvectors as the corresponding columns. The input is symmetrized
/// as `(M + M^T)/2` before sweeping, so tiny asymmetries from upstream
/// floating-point noise are harmless.
pub fn sym_eigh(m: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "sym_eigh: matrix must be square");
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[[i, j]] = 0.5 * (m[[i, j]] + m[[j, i]]);
        }
    }
    let mut v = Array2::<f64>::eye(n);
    if n <= 1 {
        let vals = Array1::from_iter((0..n).map(|i| a[[i, i]]));
        return (vals, v);
    }

    let off = |a: &Array2<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[[i, j]] * a[[i, j]];
                }
            }
        }
        s.sqrt()
    };
    let scale = fro_norm(&a).max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[q, q]];
                // rotation angle via the stable tau formulation
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    // sort ascending, reordering eigenvector columns to match
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let vals = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut vecs = Array2::<f64>::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[[k, new]] = v[[k, old]];
        }
    }
    (vals, vecs)
}

/// Solve a small dense symmetric linear system `A x = b` by Gaussian
/// elimination with partial pivoting. Returns `None` if a pivot collapses.
pub fn solve_dense(a: &Array2<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[[r, col]].abs() > m[[piv, col]].abs() {
                piv = r;
            }
        }
        if m[[piv, col]].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap([col, k], [piv, k]);
            }
            x.swap(col, piv);
        }
        let d = m[[col, col]];
        for r in col + 1..n {
            let f = m[[r, col]] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[[r, k]] -= f * m[[col, k]];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[[col, k]] * x[k];
        }
        x[col] = s / m[[col, col]];
    }
    Some(x)
}

/// Condition number estimate of a symmetric matrix: |eig|_max / |eig|_min.
pub fn sym_condition(a: &Array2<f64>) -> f64 {
    let (vals, _) = sym_eigh(a);
    let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

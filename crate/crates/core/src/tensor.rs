//! Excitation-tensor algebra: n-mode products, the MO->AO transform, its
//! left inverse, and the factored cross-geometry transform that maps stored
//! amplitudes from one geometry's molecular orbitals to another's without
//! ever materializing the AO-basis tensor.
//!
//! All tensors are dense row-major over spin orbitals; rank k amplitudes
//! live on V^k x O^k (MO) or B^k x B^k (AO).

use ndarray::{Array2, ArrayD, IxDyn};
use thiserror::Error;

use crate::ccsd::AmplitudeSet;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("shape mismatch: {msg}")]
    ShapeMismatch { msg: String },
}

/// Which orbital basis the tensor components refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Mo,
    Ao,
}

/// A rank-1 or rank-2 excitation tensor: the first `rank` modes are virtual
/// (or AO) indices, the last `rank` modes occupied (or AO) indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcTensor {
    pub rank: usize,
    pub data: ArrayD<f64>,
    pub basis: Basis,
}

impl ExcTensor {
    pub fn new(rank: usize, data: ArrayD<f64>, basis: Basis) -> Result<Self, TensorError> {
        if rank != 1 && rank != 2 {
            return Err(TensorError::ShapeMismatch {
                msg: format!("rank must be 1 or 2, got {rank}"),
            });
        }
        if data.ndim() != 2 * rank {
            return Err(TensorError::ShapeMismatch {
                msg: format!(
                    "rank {rank} tensor must have {} modes, got {}",
                    2 * rank,
                    data.ndim()
                ),
            });
        }
        Ok(ExcTensor { rank, data, basis })
    }

    pub fn from_t1(t1: &Array2<f64>) -> Self {
        ExcTensor {
            rank: 1,
            data: t1.clone().into_dyn(),
            basis: Basis::Mo,
        }
    }

    pub fn from_t2(t2: &ndarray::Array4<f64>) -> Self {
        ExcTensor {
            rank: 2,
            data: t2.clone().into_dyn(),
            basis: Basis::Mo,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Rebuild an amplitude set from rank-1 and rank-2 MO tensors.
pub fn amplitudes_from_tensors(t1: &ExcTensor, t2: &ExcTensor) -> Result<AmplitudeSet, TensorError> {
    if t1.basis != Basis::Mo || t2.basis != Basis::Mo || t1.rank != 1 || t2.rank != 2 {
        return Err(TensorError::ShapeMismatch {
            msg: "amplitude reconstruction needs MO tensors of rank 1 and 2".into(),
        });
    }
    let t1m = t1
        .data
        .clone()
        .into_dimensionality::<ndarray::Ix2>()
        .map_err(|e| TensorError::ShapeMismatch { msg: e.to_string() })?;
    let t2m = t2
        .data
        .clone()
        .into_dimensionality::<ndarray::Ix4>()
        .map_err(|e| TensorError::ShapeMismatch { msg: e.to_string() })?;
    Ok(AmplitudeSet { t1: t1m, t2: t2m })
}

/// Spin-blocked occupied/virtual coefficient blocks and overlap for one
/// geometry; the inputs are spatial-orbital quantities from SCF.
#[derive(Debug, Clone)]
pub struct TransformPair {
    pub c_occ: Array2<f64>,
    pub c_virt: Array2<f64>,
    pub s: Array2<f64>,
}

impl TransformPair {
    /// Expand spatial C (S-orthonormal, occupied columns first) and S to the
    /// interleaved spin-orbital convention (spatial p -> 2p, 2p+1).
    pub fn from_spatial(c: &Array2<f64>, s: &Array2<f64>, n_occ: usize) -> Self {
        let n = c.nrows();
        let expand = |m: &Array2<f64>| {
            let (r, q) = m.dim();
            let mut out = Array2::<f64>::zeros((2 * r, 2 * q));
            for i in 0..r {
                for j in 0..q {
                    out[[2 * i, 2 * j]] = m[[i, j]];
                    out[[2 * i + 1, 2 * j + 1]] = m[[i, j]];
                }
            }
            out
        };
        let c_occ_sp = c.slice(ndarray::s![.., ..n_occ]).to_owned();
        let c_virt_sp = c.slice(ndarray::s![.., n_occ..]).to_owned();
        debug_assert_eq!(n, s.nrows());
        TransformPair {
            c_occ: expand(&c_occ_sp),
            c_virt: expand(&c_virt_sp),
            s: expand(s),
        }
    }

    pub fn n_b_so(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_occ_so(&self) -> usize {
        self.c_occ.ncols()
    }

    pub fn n_virt_so(&self) -> usize {
        self.c_virt.ncols()
    }
}

/// n-mode product: contract `m` (rows x cols) against the chosen mode of the
/// tensor; the mode extent must equal the column count, and is replaced by
/// the row count in the output.
pub fn n_mode_product(t: &ExcTensor, m: &Array2<f64>, mode: usize) -> Result<ExcTensor, TensorError> {
    let shape = t.data.shape().to_vec();
    if mode >= shape.len() {
        return Err(TensorError::ShapeMismatch {
            msg: format!("mode {mode} out of range for {} modes", shape.len()),
        });
    }
    let (rows, cols) = m.dim();
    if cols != shape[mode] {
        return Err(TensorError::ShapeMismatch {
            msg: format!(
                "matrix has {cols} columns but mode {mode} has extent {}",
                shape[mode]
            ),
        });
    }
    let pre: usize = shape[..mode].iter().product();
    let post: usize = shape[mode + 1..].iter().product();
    let k = shape[mode];

    let data = t
        .data
        .as_standard_layout()
        .to_owned();
    let src = data.as_slice().expect("standard layout");
    let mut out = vec![0.0; pre * rows * post];
    for p in 0..pre {
        let block_in = &src[p * k * post..(p + 1) * k * post];
        let block_out = &mut out[p * rows * post..(p + 1) * rows * post];
        for s in 0..rows {
            let row_out = &mut block_out[s * post..(s + 1) * post];
            for kk in 0..k {
                let w = m[[s, kk]];
                if w == 0.0 {
                    continue;
                }
                let row_in = &block_in[kk * post..(kk + 1) * post];
                for (o, v) in row_out.iter_mut().zip(row_in) {
                    *o += w * v;
                }
            }
        }
    }
    let mut new_shape = shape;
    new_shape[mode] = rows;
    let data = ArrayD::from_shape_vec(IxDyn(&new_shape), out).unwrap();
    Ok(ExcTensor {
        rank: t.rank,
        data,
        basis: t.basis,
    })
}

/// MO -> AO transform A_k: C_virt on each virtual mode, C_occ on each
/// occupied mode.
pub fn mo_to_ao(t: &ExcTensor, tp: &TransformPair) -> Result<ExcTensor, TensorError> {
    if t.basis != Basis::Mo {
        return Err(TensorError::ShapeMismatch {
            msg: "mo_to_ao expects an MO-basis tensor".into(),
        });
    }
    let k = t.rank;
    let mut cur = t.clone();
    for mode in 0..k {
        cur = n_mode_product(&cur, &tp.c_virt, mode)?;
    }
    for mode in k..2 * k {
        cur = n_mode_product(&cur, &tp.c_occ, mode)?;
    }
    cur.basis = Basis::Ao;
    Ok(cur)
}

/// Left inverse A_k^{-1}: (C_virt^T S) on the first k modes, (C_occ^T S) on
/// the last k; recovers the MO tensor exactly by S-orthonormality of C.
pub fn ao_to_mo(t: &ExcTensor, tp: &TransformPair) -> Result<ExcTensor, TensorError> {
    if t.basis != Basis::Ao {
        return Err(TensorError::ShapeMismatch {
            msg: "ao_to_mo expects an AO-basis tensor".into(),
        });
    }
    let k = t.rank;
    let proj_virt = tp.c_virt.t().dot(&tp.s);
    let proj_occ = tp.c_occ.t().dot(&tp.s);
    let mut cur = t.clone();
    for mode in 0..k {
        cur = n_mode_product(&cur, &proj_virt, mode)?;
    }
    for mode in k..2 * k {
        cur = n_mode_product(&cur, &proj_occ, mode)?;
    }
    cur.basis = Basis::Mo;
    Ok(cur)
}

/// Factored cross-geometry transform L_k(target, source) =
/// A_k^{-1}(target) A_k(source): builds the small occupied and virtual
/// bridge matrices C(target)^T S(target) C(source) and applies them by
/// n-mode products, so the AO tensor is never materialized.
pub fn cross_transform(
    t_source: &ExcTensor,
    tp_target: &TransformPair,
    tp_source: &TransformPair,
) -> Result<ExcTensor, TensorError> {
    if t_source.basis != Basis::Mo {
        return Err(TensorError::ShapeMismatch {
            msg: "cross_transform expects an MO-basis tensor".into(),
        });
    }
    if tp_target.n_b_so() != tp_source.n_b_so() {
        return Err(TensorError::ShapeMismatch {
            msg: format!(
                "transform pairs have different AO dimensions {} vs {}",
                tp_target.n_b_so(),
                tp_source.n_b_so()
            ),
        });
    }
    let l_virt = tp_target.c_virt.t().dot(&tp_target.s).dot(&tp_source.c_virt);
    let l_occ = tp_target.c_occ.t().dot(&tp_target.s).dot(&tp_source.c_occ);
    let k = t_source.rank;
    let mut cur = t_source.clone();
    for mode in 0..k {
        cur = n_mode_product(&cur, &l_virt, mode)?;
    }
    for mode in k..2 * k {
        cur = n_mode_product(&cur, &l_occ, mode)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn identity_matrix_is_noop() {
        let data = ArrayD::from_shape_vec(IxDyn(&[2, 3]), (0..6).map(|x| x as f64).collect())
            .unwrap();
        let t = ExcTensor::new(1, data.clone(), Basis::Mo).unwrap();
        let out = n_mode_product(&t, &Array2::eye(2), 0).unwrap();
        assert_eq!(out.data, data);
        let out = n_mode_product(&t, &Array2::eye(3), 1).unwrap();
        assert_eq!(out.data, data);
    }

    #[test]
    fn permutation_swaps_rows() {
        let data = ArrayD::from_shape_vec(IxDyn(&[2, 2]), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let t = ExcTensor::new(1, data, Basis::Mo).unwrap();
        let swap = array![[0.0, 1.0], [1.0, 0.0]];
        let out = n_mode_product(&t, &swap, 0).unwrap();
        assert_eq!(
            out.data,
            ArrayD::from_shape_vec(IxDyn(&[2, 2]), vec![3.0, 4.0, 1.0, 2.0]).unwrap()
        );
    }

    #[test]
    fn matches_naive_loop_oracle() {
        // fixed pseudo-random 3x2x3x2 tensor against brute-force contraction
        let shape = [3, 2, 3, 2];
        let mut seed = 0.41f64;
        let mut rand = || {
            seed = (seed * 883.0 + 0.137).fract();
            seed - 0.5
        };
        let n: usize = shape.iter().product();
        let data =
            ArrayD::from_shape_vec(IxDyn(&shape), (0..n).map(|_| rand()).collect()).unwrap();
        let t = ExcTensor::new(2, data.clone(), Basis::Mo).unwrap();
        for mode in 0..4 {
            let rows = 4;
            let cols = shape[mode];
            let mut m = Array2::<f64>::zeros((rows, cols));
            for i in 0..rows {
                for j in 0..cols {
                    m[[i, j]] = rand();
                }
            }
            let fast = n_mode_product(&t, &m, mode).unwrap();
            // naive summation oracle
            let mut expect_shape = shape.to_vec();
            expect_shape[mode] = rows;
            let mut expect = ArrayD::<f64>::zeros(IxDyn(&expect_shape));
            for (idx, val) in expect.indexed_iter_mut() {
                let mut acc = 0.0;
                for kk in 0..cols {
                    let mut src_idx = [idx[0], idx[1], idx[2], idx[3]];
                    let s = src_idx[mode];
                    src_idx[mode] = kk;
                    acc += m[[s, kk]] * data[IxDyn(&src_idx)];
                }
                *val = acc;
            }
            for (idx, val) in expect.indexed_iter() {
                assert_abs_diff_eq!(fast.data[&idx], *val, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let data = ArrayD::from_shape_vec(IxDyn(&[2, 2]), vec![0.0; 4]).unwrap();
        let t = ExcTensor::new(1, data, Basis::Mo).unwrap();
        let m = Array2::<f64>::zeros((2, 3));
        assert!(matches!(
            n_mode_product(&t, &m, 0),
            Err(TensorError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            n_mode_product(&t, &Array2::zeros((2, 2)), 5),
            Err(TensorError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn rank1_factored_transform() {
        // t (x) u maps to (C_virt t) (x) (C_occ u)
        let tvec = array![1.0, -2.0];
        let uvec = array![0.5, 0.25, 1.0];
        let mut data = ArrayD::<f64>::zeros(IxDyn(&[2, 3]));
        for a in 0..2 {
            for i in 0..3 {
                data[IxDyn(&[a, i])] = tvec[a] * uvec[i];
            }
        }
        let t = ExcTensor::new(1, data, Basis::Mo).unwrap();
        // square identity-ish blocks with S = I
        let c_virt = array![[0.0, 1.0], [1.0, 0.0]];
        let c_occ = array![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
        let tp = TransformPair {
            c_occ: c_occ.clone(),
            c_virt: c_virt.clone(),
            s: Array2::eye(3),
        };
        // dims differ between modes here (2 vs 3), so apply manually
        let step = n_mode_product(&t, &c_virt, 0).unwrap();
        let out = n_mode_product(&step, &c_occ, 1).unwrap();
        let ct = c_virt.dot(&tvec);
        let cu = c_occ.dot(&uvec);
        for a in 0..2 {
            for i in 0..3 {
                assert_abs_diff_eq!(out.data[IxDyn(&[a, i])], ct[a] * cu[i], epsilon = 1e-14);
            }
        }
        let _ = tp;
    }
}

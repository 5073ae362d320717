//! Amplitude interpolation along a trajectory: Chebyshev nodes, barycentric
//! Lagrange evaluation, the offline (per-node solve) and online (evaluate
//! anywhere) stages, the interpolation error bound, and error metrics.

use ndarray::{Array2, Array4};
use thiserror::Error;

use crate::basis::{BasisError, BasisLibrary};
use crate::ccsd::{self, AmplitudeSet, CcConfig, CcError, CcSolution};
use crate::geometry::{GeomError, Geometry, Trajectory};
use crate::integrals::{compute_integrals, IntegralBundle, IntegralError};
use crate::linalg::spectral_norm_sym;
use crate::mo::{mo_transform, MoIntegrals};
use crate::scf::{scf_iterate, ScfConfig, ScfError, ScfSolution};
use crate::snapshot::Snapshot;
use crate::tensor::{cross_transform, mo_to_ao, ExcTensor, TransformPair};

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("at node {index} (mu = {mu}): {source}")]
    NodeScf {
        index: usize,
        mu: f64,
        #[source]
        source: ScfError,
    },
    #[error("at node {index} (mu = {mu}): {source}")]
    NodeCc {
        index: usize,
        mu: f64,
        #[source]
        source: CcError,
    },
    #[error("target geometry (mu = {mu}): {source}")]
    Target {
        mu: f64,
        #[source]
        source: ScfError,
    },
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Integrals(#[from] IntegralError),
    #[error(transparent)]
    Scf(#[from] ScfError),
    #[error(transparent)]
    Cc(#[from] CcError),
    #[error("reference amplitude vector has norm below 1e-14")]
    ZeroReference,
    #[error("non-positive error value {value} passed to the mean log error")]
    NonpositiveError { value: f64 },
    #[error("interpolant needs at least one node")]
    EmptyNodes,
    #[error("snapshot set inconsistent: {msg}")]
    InconsistentSnapshots { msg: String },
}

/// Combined solver configuration carried through drivers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverConfig {
    pub scf: ScfConfig,
    pub cc: CcConfig,
}

impl SolverConfig {
    /// Canonical one-line echo recorded in snapshots and CSV headers.
    pub fn echo(&self) -> String {
        format!(
            "scf.tol_grad={} scf.tol_e={} scf.max_iter={} scf.diis_dim={} scf.gap_min={} \
             ccsd.tol_r={} ccsd.tol_e={} ccsd.max_iter={} ccsd.diis_dim={} ccsd.guess={:?}",
            self.scf.tol_grad,
            self.scf.tol_e,
            self.scf.max_iter,
            self.scf.diis_dim,
            self.scf.gap_min,
            self.cc.tol_r,
            self.cc.tol_e,
            self.cc.max_iter,
            self.cc.diis_dim,
            self.cc.guess,
        )
    }
}

/// Chebyshev interpolation nodes on [0, 1] with barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Chebyshev nodes of the first kind mapped to [0, 1]:
/// mu_k = (1 + cos((2k+1) pi / 2d)) / 2, sorted ascending, with the
/// canonical barycentric weights (-1)^k sin((2k+1) pi / 2d) normalized to
/// max |w| = 1.
pub fn chebyshev_nodes(d: usize) -> NodeSet {
    assert!(d >= 1, "chebyshev_nodes: need at least one node");
    let mut pairs: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let theta = (2 * k + 1) as f64 * std::f64::consts::PI / (2.0 * d as f64);
            let node = 0.5 * (1.0 + theta.cos());
            let weight = if k % 2 == 0 { 1.0 } else { -1.0 } * theta.sin();
            (node, weight)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let wmax = pairs.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    NodeSet {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / wmax).collect(),
    }
}

/// Barycentric weights for an arbitrary strictly-increasing node set,
/// w_j = 1 / prod_{k != j} (mu_j - mu_k), normalized to max |w| = 1. Used
/// when nodes come from ingested snapshot sets instead of the Chebyshev
/// formula.
pub fn nodes_from_points(points: &[f64]) -> NodeSet {
    assert!(!points.is_empty());
    let d = points.len();
    let mut weights = vec![1.0; d];
    for j in 0..d {
        for k in 0..d {
            if k != j {
                weights[j] /= points[j] - points[k];
            }
        }
    }
    let wmax = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    for w in weights.iter_mut() {
        *w /= wmax;
    }
    NodeSet {
        nodes: points.to_vec(),
        weights,
    }
}

/// Second-form barycentric Lagrange basis values L_j(mu). An exact node hit
/// returns the corresponding unit vector.
pub fn lagrange_basis(ns: &NodeSet, mu: f64) -> Vec<f64> {
    let d = ns.len();
    let mut out = vec![0.0; d];
    for (j, &node) in ns.nodes.iter().enumerate() {
        if mu == node {
            out[j] = 1.0;
            return out;
        }
    }
    let mut denom = 0.0;
    for j in 0..d {
        let term = ns.weights[j] / (mu - ns.nodes[j]);
        out[j] = term;
        denom += term;
    }
    for v in out.iter_mut() {
        *v /= denom;
    }
    out
}

/// Integrals + SCF at one geometry.
#[derive(Debug, Clone)]
pub struct ScfPoint {
    pub geometry: Geometry,
    pub bundle: IntegralBundle,
    pub scf: ScfSolution,
}

impl ScfPoint {
    pub fn transform_pair(&self) -> TransformPair {
        TransformPair::from_spatial(&self.scf.c, &self.bundle.s, self.scf.n_occ)
    }
}

/// Run integrals and SCF at a geometry.
pub fn scf_point(
    geometry: Geometry,
    basis: &BasisLibrary,
    n_electrons: usize,
    cfg: &ScfConfig,
) -> Result<ScfPoint, InterpError> {
    let set = basis.build(&geometry)?;
    let bundle = compute_integrals(&geometry, &set)?;
    let scf = scf_iterate(&bundle, n_electrons, cfg)?;
    Ok(ScfPoint {
        geometry,
        bundle,
        scf,
    })
}

/// Full offline solve at one geometry: integrals, SCF, MO transform, CCSD
/// from the MP2 guess.
pub fn full_point(
    geometry: Geometry,
    basis: &BasisLibrary,
    n_electrons: usize,
    cfg: &SolverConfig,
) -> Result<(ScfPoint, MoIntegrals, CcSolution), InterpError> {
    let point = scf_point(geometry, basis, n_electrons, &cfg.scf)?;
    let mo = mo_transform(&point.bundle, &point.scf);
    let guess = ccsd::mp2_guess(&mo)?;
    let cc = ccsd::solve_ccsd(&guess, &mo, &cfg.cc)?;
    Ok((point, mo, cc))
}

/// A built interpolant: node set plus one snapshot per node, along with the
/// trajectory/basis identity needed to evaluate new geometries online.
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub node_set: NodeSet,
    pub snapshots: Vec<Snapshot>,
    pub trajectory: Trajectory,
    pub basis: BasisLibrary,
    pub n_electrons: usize,
}

impl Interpolant {
    /// Assemble from parts, enforcing the shared-identity invariants.
    pub fn from_parts(
        node_set: NodeSet,
        snapshots: Vec<Snapshot>,
        trajectory: Trajectory,
        basis: BasisLibrary,
    ) -> Result<Self, InterpError> {
        if node_set.is_empty() {
            return Err(InterpError::EmptyNodes);
        }
        if node_set.len() != snapshots.len() {
            return Err(InterpError::InconsistentSnapshots {
                msg: format!(
                    "{} nodes but {} snapshots",
                    node_set.len(),
                    snapshots.len()
                ),
            });
        }
        let n_electrons = snapshots[0].n_electrons;
        for (j, s) in snapshots.iter().enumerate() {
            if s.mu != node_set.nodes[j] {
                return Err(InterpError::InconsistentSnapshots {
                    msg: format!(
                        "snapshot {} has mu = {} but node is {}",
                        j, s.mu, node_set.nodes[j]
                    ),
                });
            }
            if s.basis_checksum != basis.checksum() {
                return Err(InterpError::InconsistentSnapshots {
                    msg: format!("snapshot {j} basis checksum differs from the library"),
                });
            }
            if s.n_electrons != n_electrons {
                return Err(InterpError::InconsistentSnapshots {
                    msg: format!("snapshot {j} electron count differs"),
                });
            }
        }
        Ok(Interpolant {
            node_set,
            snapshots,
            trajectory,
            basis,
            n_electrons,
        })
    }
}

/// Offline stage: solve integrals -> SCF -> CCSD at every Chebyshev node and
/// collect the per-node snapshots.
pub fn offline_build(
    traj: &Trajectory,
    basis: &BasisLibrary,
    d: usize,
    cfg: &SolverConfig,
) -> Result<Interpolant, InterpError> {
    let node_set = chebyshev_nodes(d);
    let n_electrons = traj.gamma0.n_electrons_neutral();
    let mut snapshots = Vec::with_capacity(d);
    for (index, &mu) in node_set.nodes.iter().enumerate() {
        let geometry = traj.eval(mu)?;
        let (point, _mo, cc) =
            full_point(geometry, basis, n_electrons, cfg).map_err(|e| match e {
                InterpError::Scf(source) => InterpError::NodeScf { index, mu, source },
                InterpError::Cc(source) => InterpError::NodeCc { index, mu, source },
                other => other,
            })?;
        snapshots.push(Snapshot {
            schema_version: crate::snapshot::SCHEMA_VERSION,
            mu,
            geometry: point.geometry.clone(),
            basis_name: basis.name.clone(),
            basis_checksum: basis.checksum().to_string(),
            n_electrons,
            s: point.bundle.s.clone(),
            c: point.scf.c.clone(),
            lambdas: point.scf.lambdas.clone(),
            e_hf: point.scf.e_hf,
            gap: point.scf.gap,
            t1: cc.amplitudes.t1.clone(),
            t2: cc.amplitudes.t2.clone(),
            e_corr: cc.e_corr,
            scf_iterations: point.scf.iterations,
            cc_iterations: cc.iterations,
            config_echo: cfg.echo(),
        });
    }
    Interpolant::from_parts(node_set, snapshots, traj.clone(), basis.clone())
}

/// Online stage against a pre-computed target transform pair:
/// T~_k(mu) = sum_j L_k(mu, mu_j) T_k(mu_j) L_j(mu) for k = 1, 2, with a
/// final antisymmetrization of t2 to remove rounding drift.
pub fn online_eval_at(itp: &Interpolant, mu: f64, target: &TransformPair) -> AmplitudeSet {
    let lag = lagrange_basis(&itp.node_set, mu);
    let nv = target.n_virt_so();
    let no = target.n_occ_so();
    let mut acc1 = Array2::<f64>::zeros((nv, no));
    let mut acc2 = Array4::<f64>::zeros((nv, nv, no, no));
    for (snap, &lj) in itp.snapshots.iter().zip(&lag) {
        if lj == 0.0 {
            continue;
        }
        let tp_j = TransformPair::from_spatial(&snap.c, &snap.s, snap.n_electrons / 2);
        let t1 = ExcTensor::from_t1(&snap.t1);
        let t2 = ExcTensor::from_t2(&snap.t2);
        let x1 = cross_transform(&t1, target, &tp_j).expect("dims checked by construction");
        let x2 = cross_transform(&t2, target, &tp_j).expect("dims checked by construction");
        let x1 = x1.data.into_dimensionality::<ndarray::Ix2>().unwrap();
        let x2 = x2.data.into_dimensionality::<ndarray::Ix4>().unwrap();
        acc1.scaled_add(lj, &x1);
        acc2.scaled_add(lj, &x2);
    }
    let mut amps = AmplitudeSet { t1: acc1, t2: acc2 };
    amps.antisymmetrize();
    amps
}

/// Online stage from scratch: a fresh integrals + SCF run at the target
/// geometry supplies S(mu) and C(mu), then the node sum is evaluated.
pub fn online_eval(itp: &Interpolant, mu: f64, cfg: &ScfConfig) -> Result<AmplitudeSet, InterpError> {
    let geometry = itp.trajectory.eval(mu)?;
    let point = scf_point(geometry, &itp.basis, itp.n_electrons, cfg)
        .map_err(|e| match e {
            InterpError::Scf(source) => InterpError::Target { mu, source },
            other => other,
        })?;
    Ok(online_eval_at(itp, mu, &point.transform_pair()))
}

/// Both sides of the interpolation error bound for one rank.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub rank: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Absolute slack allowed when asserting the bound.
pub const BOUND_SLACK: f64 = 1e-10;

/// Check ||T~_k - T_k||_F <= ||S||_2^k e_k for k = 1, 2 at `mu`, where e_k
/// is the AO-basis polynomial interpolation error and exact amplitudes come
/// from a full CCSD run at the target.
pub fn error_bound_check(
    itp: &Interpolant,
    mu: f64,
    t_exact: &AmplitudeSet,
    target: &TransformPair,
) -> Vec<BoundReport> {
    let approx = online_eval_at(itp, mu, target);
    let lag = lagrange_basis(&itp.node_set, mu);
    let s_norm = spectral_norm_sym(&target.s);

    let mut reports = Vec::with_capacity(2);
    for rank in 1..=2usize {
        let lhs = if rank == 1 {
            diff_norm2(&approx.t1, &t_exact.t1)
        } else {
            diff_norm4(&approx.t2, &t_exact.t2)
        };
        // AO-basis interpolation error e_k
        let exact_ao = {
            let t = if rank == 1 {
                ExcTensor::from_t1(&t_exact.t1)
            } else {
                ExcTensor::from_t2(&t_exact.t2)
            };
            mo_to_ao(&t, target).expect("dims consistent")
        };
        let mut acc = exact_ao.data.clone();
        acc.fill(0.0);
        for (snap, &lj) in itp.snapshots.iter().zip(&lag) {
            if lj == 0.0 {
                continue;
            }
            let tp_j = TransformPair::from_spatial(&snap.c, &snap.s, snap.n_electrons / 2);
            let t = if rank == 1 {
                ExcTensor::from_t1(&snap.t1)
            } else {
                ExcTensor::from_t2(&snap.t2)
            };
            let ao = mo_to_ao(&t, &tp_j).expect("dims consistent");
            acc.scaled_add(lj, &ao.data);
        }
        acc -= &exact_ao.data;
        let e_k = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rhs = s_norm.powi(rank as i32) * e_k;
        reports.push(BoundReport {
            rank,
            lhs,
            rhs,
            holds: lhs <= rhs + BOUND_SLACK,
        });
    }
    reports
}

fn diff_norm2(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn diff_norm4(a: &Array4<f64>, b: &Array4<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Relative l2 error over the concatenated (t1, t2) vector.
pub fn amplitude_error(approx: &AmplitudeSet, exact: &AmplitudeSet) -> Result<f64, InterpError> {
    let ref_norm = exact.norm();
    if ref_norm < 1e-14 {
        return Err(InterpError::ZeroReference);
    }
    let d1: f64 = approx
        .t1
        .iter()
        .zip(exact.t1.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let d2: f64 = approx
        .t2
        .iter()
        .zip(exact.t2.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((d1 + d2).sqrt() / ref_norm)
}

/// Mean log error: the arithmetic mean of log10 of the relative errors over
/// a test set.
pub fn mle(errors: &[f64]) -> Result<f64, InterpError> {
    if errors.is_empty() {
        return Err(InterpError::NonpositiveError { value: f64::NAN });
    }
    let mut sum = 0.0;
    for &e in errors {
        if e <= 0.0 {
            return Err(InterpError::NonpositiveError { value: e });
        }
        sum += e.log10();
    }
    Ok(sum / errors.len() as f64)
}

/// The default test grid: `n` equidistant points of [0, 1] including both
/// endpoints.
pub fn test_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

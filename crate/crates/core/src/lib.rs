//! Electronic-structure toolkit for small molecules: Gaussian-orbital
//! integrals, restricted Hartree-Fock, spin-orbital CCSD, and interpolation
//! of coupled cluster amplitudes along one-parameter nuclear trajectories.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`] / [`basis`]: nuclear configurations, analytic trajectories
//!   and contracted Cartesian Gaussian basis sets.
//! - [`boys`] / [`integrals`]: the Boys function and McMurchie-Davidson
//!   one- and two-electron integrals.
//! - [`scf`] / [`mo`]: restricted Hartree-Fock with DIIS and the AO to MO
//!   integral transformation into spin orbitals.
//! - [`ccsd`] / [`fci`]: the spin-orbital CCSD solver and a dense full-CI
//!   oracle for small systems.
//! - [`tensor`]: excitation-tensor algebra (n-mode products, the MO/AO basis
//!   transforms and the factored cross-geometry transform).
//! - [`interp`]: Chebyshev-node interpolants for amplitudes along a
//!   trajectory, with error metrics and the interpolation error bound.
//! - [`snapshot`]: a portable on-disk container for per-geometry solution
//!   bundles and manifests over sets of them.

pub mod basis;
pub mod boys;
mod diis;

pub mod ccsd;
pub mod fci;
pub mod geometry;
pub mod integrals;
pub mod interp;
pub mod linalg;
pub mod mo;
pub mod scf;
pub mod snapshot;
pub mod tensor;

pub use basis::{BasisLibrary, BasisSet, Shell};
pub use ccsd::{AmplitudeSet, CcConfig, CcError, CcSolution};
pub use geometry::{Atom, GeomError, Geometry, Trajectory};
pub use integrals::{IntegralBundle, IntegralError};
pub use interp::{Interpolant, InterpError, NodeSet};
pub use mo::MoIntegrals;
pub use scf::{ScfConfig, ScfError, ScfSolution};
pub use snapshot::{Snapshot, SnapshotManifest, SnapshotError};
pub use tensor::{Basis as TensorBasis, ExcTensor, TensorError, TransformPair};
pub use interp::SolverConfig;

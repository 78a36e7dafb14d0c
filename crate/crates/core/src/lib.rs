//! Numerical verification workbench for isoparametric foliations built from
//! symmetric Clifford systems.
//!
//! A symmetric Clifford system is a family of symmetric matrices
//! `P_0, ..., P_m` on `R^{2l}` with `P_a P_b + P_b P_a = 2 δ_ab I`. Such a
//! system induces a quartic polynomial whose restriction to the unit sphere
//! is isoparametric, together with two chains of minimal submanifolds
//! (`M_0 ⊃ M_1 ⊃ ...` and `N_1 ⊂ N_2 ⊂ ...`), focal sets, normal exponential
//! maps, and a family of parallel hypersurfaces. This crate constructs all of
//! these objects with exact integer matrices at the base, samples them, and
//! verifies their geometric identities numerically at pinned tolerances.
//!
//! | Module | Content |
//! |--------|---------|
//! | [`clifford_core`] | exact sign-matrix Clifford systems, generators, eigenspaces |
//! | [`munzner_forms`] | the quartic form, quadratic generators, gradient/Hessian, PDE checks |
//! | [`foliation_manifolds`] | sampling, frames, membership for every manifold in the foliation |
//! | [`intrinsic_calculus`] | restricted gradients/Laplacians, second fundamental form, minimality |
//! | [`curvature_spectra`] | shape-operator spectra, Ricci formula, σ-certificates |
//! | [`focal_harmonic`] | normal exponential maps, fibers, eigenmaps, tension fields |
//! | [`spectral_estimation`] | graph-Laplacian eigenvalue estimates and exact eigenfunction checks |
//! | [`cli_report`] | run configuration, claim registry, machine-readable reports |

pub mod cli_report;
pub mod clifford_core;
pub mod curvature_spectra;
pub mod focal_harmonic;
pub mod foliation_manifolds;
pub mod intrinsic_calculus;
pub mod linalg;
pub mod munzner_forms;
pub mod quat;
pub mod spectral_estimation;
pub mod tol;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variant is only defined for (m,k)=(4,2); got (m,k)=({m},{k})")]
    InvalidVariant { m: usize, k: usize },
    #[error("coefficient vector must be unit: |c| = {norm}")]
    NotUnitCoefficients { norm: f64 },
    #[error("projection onto {manifold} failed to converge (residual {residual:.3e})")]
    ConvergenceFailure { manifold: String, residual: f64 },
    #[error("frame for {manifold} has rank {got}, expected {expected}")]
    RankDeficiency {
        manifold: String,
        expected: usize,
        got: usize,
    },
    #[error("foliation is degenerate: multiplicities (m1,m2)=({m1},{m2}) need m2 > 0")]
    DegenerateFoliation { m1: i64, m2: i64 },
    #[error("level |c| = {c} is focal; shape operator formulas need |c| < 1")]
    FocalLevel { c: f64 },
    #[error("angle t = {t} is focal (|cos 4t| = 1); hypersurface is singular there")]
    FocalAngle { t: f64 },
    #[error("point is not on the source manifold (residual {residual:.3e})")]
    NotOnSource { residual: f64 },
    #[error("point is not on the focal manifold (residual {residual:.3e})")]
    NotOnFocalManifold { residual: f64 },
    #[error("retraction projection failed (residual {residual:.3e})")]
    ProjectionFailure { residual: f64 },
    #[error("optimizer stalled; best value so far {best}")]
    OptimizerStall { best: f64 },
    #[error("the Clifford system does not extend by a further anticommuting matrix")]
    ExtensionUnavailable,
    #[error("operation requires the other (4,2) family variant")]
    WrongVariant,
    #[error("k-NN graph is disconnected; increase samples or neighbors")]
    Disconnected,
    #[error("spectral estimation infeasible: manifold dimension {dim} exceeds budget cap {cap}")]
    Infeasible { dim: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

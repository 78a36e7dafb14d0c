//! Central numerical tolerances.
//!
//! Every tolerance used by a verification routine lives here, with a note on
//! the error source it budgets for. Exact integer checks (anticommutation,
//! orthogonality of sign matrices, trace) take no tolerance and do not appear.

/// Accepted membership residual for sampled points. Newton / exact samplers
/// converge to machine precision; anything above this indicates a bug, not
/// roundoff.
pub const SAMPLE_RESIDUAL: f64 = 1e-12;

/// Target residual inside Gauss-Newton projection loops. One step below
/// [`SAMPLE_RESIDUAL`] so accepted points clear it with margin.
pub const NEWTON_TARGET: f64 = 1e-14;

/// Maximum Newton iterations before declaring non-convergence.
pub const NEWTON_MAX_ITERS: usize = 200;

/// Orthonormality defect allowed in assembled tangent/normal frames
/// (Gram-Schmidt on well-conditioned inputs keeps this near 1e-15).
pub const FRAME_ORTHO: f64 = 1e-10;

/// Rank cutoff when orthonormalizing spanning sets: residual norms below this
/// count as dependent directions.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Unit-norm requirement on Clifford-sphere coefficient vectors.
pub const COEFF_UNIT: f64 = 1e-12;

/// Eigenvector residual `|P v -+ v|` for eigenspace projector output.
pub const EIGENSPACE_RESIDUAL: f64 = 1e-12;

/// Relative error allowed in the two quartic PDE identities at random points.
pub const PDE_REL: f64 = 1e-9;

/// Relative agreement between analytic and finite-difference derivatives of
/// the quartic (central differences with step [`FD_STEP_GRAD`] carry ~1e-10
/// truncation plus ~1e-11 rounding on O(1) quantities).
pub const FD_GRAD_REL: f64 = 1e-7;

/// Central-difference step for first-derivative oracles.
pub const FD_STEP_GRAD: f64 = 1e-5;

/// Base step for retraction second-difference oracles. Richardson
/// extrapolation over steps (h, h/2) leaves ~1e-9 total error because the
/// retractions land exactly on the manifold.
pub const FD_STEP_RETRACTION: f64 = 1e-3;

/// Absolute tolerance on gradient-norm and Laplacian identities for the
/// restricted quadratics (values are O(1) on the unit sphere).
pub const RESTRICTED_IDENTITY: f64 = 1e-6;

/// Absolute tolerance on closed-form principal curvatures from assembled
/// shape-operator matrices.
pub const SPECTRUM_EIG: f64 = 1e-8;

/// Relative gap used to cluster numerically equal eigenvalues.
pub const CLUSTER_GAP: f64 = 1e-5;

/// Residual allowed when checking a vector lies in a predicted subspace.
pub const SUBSPACE_RESIDUAL: f64 = 1e-7;

/// Mean curvature norm below which a submanifold counts as minimal
/// (dominated by the retraction-oracle noise floor).
pub const MINIMALITY: f64 = 1e-7;

/// Componentwise tolerance on closed-form pushforward factorizations.
pub const PUSHFORWARD: f64 = 1e-9;

/// Relative tolerance on volume-factor cross-checks (Gram determinant vs
/// closed form).
pub const VOLUME_FACTOR_REL: f64 = 1e-8;

/// Absolute target for adaptive Simpson quadrature.
pub const QUADRATURE: f64 = 1e-10;

/// Absolute tolerance for quadrature-vs-closed-form ratio identities.
pub const RATIO_IDENTITY: f64 = 1e-6;

/// Residual for fiber membership, fiber Gram models, and normal-geodesy
/// checks on focal fibers.
pub const FIBER_GEODESY: f64 = 1e-8;

/// Relative tolerance on eigenmap identities `Δφ = -λ φ`.
pub const EIGENMAP_REL: f64 = 1e-6;

/// Tangential-component norm below which a tension field counts as normal.
pub const TENSION_NORMAL: f64 = 1e-6;

/// Membership residual required of focal/harmonic map targets.
pub const MAP_TARGET_RESIDUAL: f64 = 1e-10;

/// Residual of the algebraic identity tying `|B(X,X)|^2` to the quartic on
/// the focal submanifolds (pure roundoff; the identity is exact).
pub const SIGMA_IDENTITY: f64 = 1e-10;

/// Projected-gradient norm at which the σ optimizer declares convergence.
pub const SIGMA_GRAD: f64 = 1e-10;

/// Objective value at which the search for a vanishing-`|B(X,X)|^2` witness
/// is accepted.  The minimum is a degenerate critical point (the objective
/// is quartically flat there), so gradient descent approaches it sublinearly
/// and a value criterion is the honest certificate.
pub const SIGMA_MIN_VALUE: f64 = 1e-9;

/// Absolute agreement between the curvature-formula and Gauss-equation
/// routes to the Ricci form.
pub const RICCI_AGREE: f64 = 1e-6;

/// Accepted relative error on graph-Laplacian calibration (sphere
/// ground truth); estimator runs outside this band are rejected.
pub const CALIBRATION_REL: f64 = 0.12;

/// Multiplicative slack applied to strict spectral inequalities before an
/// ESTIMATE verdict is issued.
pub const ESTIMATE_SLACK: f64 = 0.2;

/// Manifold dimension cap for graph-Laplacian estimation.
pub const ESTIMATE_DIM_CAP: usize = 6;

/// Width of the eigenvalue window, relative to the first nonzero estimate,
/// used to count the multiplicity cluster at the bottom of an estimated
/// spectrum.
pub const ESTIMATE_CLUSTER_WINDOW: f64 = 0.15;

/// Residual for the quaternionic membership charts of the ten-dimensional
/// focal manifolds of the (m, l) = (4, 8) systems.
pub const CHART_RESIDUAL: f64 = 1e-9;

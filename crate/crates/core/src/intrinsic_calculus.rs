//! Intrinsic first and second order calculus on the embedded manifolds.
//!
//! Scalar fields enter through [`AmbientScalar`], an ambient extension with
//! exact gradient and Hessian action.  On a submanifold with orthonormal
//! tangent frame `{e_a}` and ambient mean curvature vector `H` the intrinsic
//! Laplacian of the restriction is
//!
//! ```text
//! lap f = sum_a Hess f(e_a, e_a) + <grad f, H>
//! ```
//!
//! independent of the chosen extension.
//!
//! The second fundamental form is computed along three routes that are kept
//! deliberately separate so they can cross check each other:
//!
//! * [`second_fundamental_chain`]: the closed form on the chain manifolds
//!   `M_i`, bilinear in the sign matrices.
//! * [`second_fundamental_gram`]: the inverse Gram formula for manifolds cut
//!   out by independent constraints (sphere, `M_i`, coefficient levels, tube
//!   hypersurfaces, focal eigenspheres).
//! * [`second_fundamental_retraction`]: a finite difference of the exact
//!   landing retractions from [`crate::foliation_manifolds`], the only route
//!   available on the `N_i` chain where the constraint description is
//!   degenerate.

use crate::clifford_core::CliffordSystem;
use crate::foliation_manifolds::{frames, project, sample, ManifoldId};
use crate::linalg;
use crate::munzner_forms::{QuadraticForm, QuarticForm};
use crate::tol;
use crate::{Error, Result};
use serde::Serialize;

/// Scalar field on the ambient space with exact derivatives.
pub trait AmbientScalar {
    fn eval(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Hessian applied to a direction, `Hess f(x) v`.
    fn hess_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64>;
}

impl AmbientScalar for QuarticForm<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        QuarticForm::eval(self, x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        QuarticForm::gradient(self, x)
    }
    fn hess_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        QuarticForm::hess_apply(self, x, v)
    }
}

impl AmbientScalar for QuadraticForm {
    fn eval(&self, x: &[f64]) -> f64 {
        QuadraticForm::eval(self, x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        QuadraticForm::gradient(self, x)
    }
    fn hess_apply(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
        QuadraticForm::hess_apply(self, v)
    }
}

/// Coordinate function `x -> x[j]` on the ambient space.
pub struct Coordinate {
    pub j: usize,
    pub n: usize,
}

impl AmbientScalar for Coordinate {
    fn eval(&self, x: &[f64]) -> f64 {
        x[self.j]
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        g[self.j] = 1.0;
        g
    }
    fn hess_apply(&self, x: &[f64], _v: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
}

/// Linear functional `x -> <a, x>`; the ambient components of the focal and
/// harmonic maps are of this shape.
pub struct LinearForm {
    pub a: Vec<f64>,
}

impl AmbientScalar for LinearForm {
    fn eval(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.a, x)
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.a.clone()
    }
    fn hess_apply(&self, x: &[f64], _v: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
}

/// Projection of the ambient gradient onto the tangent frame.
pub fn intrinsic_gradient(f: &dyn AmbientScalar, x: &[f64], tangent: &[Vec<f64>]) -> Vec<f64> {
    let g = f.gradient(x);
    let mut out = vec![0.0; x.len()];
    for e in tangent {
        linalg::axpy(&mut out, linalg::dot(&g, e), e);
    }
    out
}

/// Trace of the ambient Hessian over the tangent frame.
pub fn tangent_hessian_trace(f: &dyn AmbientScalar, x: &[f64], tangent: &[Vec<f64>]) -> f64 {
    tangent
        .iter()
        .map(|e| linalg::dot(&f.hess_apply(x, e), e))
        .sum()
}

/// Intrinsic Laplacian through an ambient extension and the mean curvature
/// vector of the submanifold in the ambient space.
pub fn intrinsic_laplacian(
    f: &dyn AmbientScalar,
    x: &[f64],
    tangent: &[Vec<f64>],
    mean_curvature: &[f64],
) -> f64 {
    tangent_hessian_trace(f, x, tangent) + linalg::dot(&f.gradient(x), mean_curvature)
}

/// Defining constraint of a manifold, with gradient and Hessian form.
enum Constraint {
    /// `|x|^2 - const`
    SphereRadius,
    /// `<P_a x, x> - const`
    ChainCoefficient(usize),
    /// `F(x) - const`
    QuarticLevel,
    /// `<v, x>`
    Linear(Vec<f64>),
}

impl Constraint {
    fn gradient(&self, sys: &CliffordSystem, x: &[f64]) -> Vec<f64> {
        match self {
            Constraint::SphereRadius => linalg::scaled(x, 2.0),
            Constraint::ChainCoefficient(a) => linalg::scaled(&sys.apply_p(*a, x), 2.0),
            Constraint::QuarticLevel => QuarticForm::new(sys).gradient(x),
            Constraint::Linear(v) => v.clone(),
        }
    }

    fn hess_bilinear(&self, sys: &CliffordSystem, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        match self {
            Constraint::SphereRadius => 2.0 * linalg::dot(u, v),
            Constraint::ChainCoefficient(a) => 2.0 * linalg::dot(&sys.apply_p(*a, u), v),
            Constraint::QuarticLevel => {
                linalg::dot(&QuarticForm::new(sys).hess_apply(x, u), v)
            }
            Constraint::Linear(_) => 0.0,
        }
    }
}

/// Independent constraint description, when one exists.  The `N_i` chain and
/// its coefficient levels have no regular constraint presentation: the sum of
/// squared chain coefficients has gradient parallel to the radial one on the
/// zero set, so their Gram matrix is singular there.
fn constraint_set(sys: &CliffordSystem, id: ManifoldId) -> Option<Vec<Constraint>> {
    let mut cons = vec![Constraint::SphereRadius];
    match id {
        ManifoldId::Sphere => {}
        ManifoldId::M(i) => {
            for a in 0..=i {
                cons.push(Constraint::ChainCoefficient(a));
            }
        }
        ManifoldId::LevelU { i, .. } => {
            for a in 0..=i + 1 {
                cons.push(Constraint::ChainCoefficient(a));
            }
        }
        ManifoldId::Hypersurface { .. } => cons.push(Constraint::QuarticLevel),
        ManifoldId::FocalU { i, sign } => {
            let mut e = vec![0.0; sys.m + 1];
            e[i + 1] = 1.0;
            let opposite = sys
                .eigenspace_basis(&e, crate::clifford_core::Sign::from(sign).flip())
                .ok()?;
            cons.extend(opposite.into_iter().map(Constraint::Linear));
        }
        ManifoldId::FocalV { i, sign } => {
            let mut e = vec![0.0; sys.m + 1];
            e[i] = 1.0;
            let opposite = sys
                .eigenspace_basis(&e, crate::clifford_core::Sign::from(sign).flip())
                .ok()?;
            cons.extend(opposite.into_iter().map(Constraint::Linear));
        }
        ManifoldId::N(_) | ManifoldId::LevelV { .. } => return None,
    }
    Some(cons)
}

/// Closed form second fundamental form of the chain manifold `M_i` in the
/// ambient space: `B(X, Y) = -<X, Y> x - sum_a <P_a X, Y> P_a x`.
pub fn second_fundamental_chain(
    sys: &CliffordSystem,
    i: usize,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Vec<f64> {
    let mut out = linalg::scaled(x, -linalg::dot(u, v));
    for a in 0..=i {
        let pu = sys.apply_p(a, u);
        linalg::axpy(&mut out, -linalg::dot(&pu, v), &sys.apply_p(a, x));
    }
    out
}

/// Second fundamental form through the inverse Gram formula
/// `B(X, Y) = -sum (G^-1)_{uv} Hess h_u(X, Y) grad h_v`.
pub fn second_fundamental_gram(
    sys: &CliffordSystem,
    id: ManifoldId,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<Vec<f64>> {
    let cons = constraint_set(sys, id).ok_or_else(|| {
        Error::Config(format!("no regular constraint description for {id}"))
    })?;
    let grads: Vec<Vec<f64>> = cons.iter().map(|c| c.gradient(sys, x)).collect();
    let hess: Vec<f64> = cons.iter().map(|c| c.hess_bilinear(sys, x, u, v)).collect();
    gram_combination(&grads, &hess)
}

/// Solves `G w = values` for the constraint Gram matrix and returns the
/// normal vector `-sum_v w_v grad h_v`.
fn gram_combination(grads: &[Vec<f64>], values: &[f64]) -> Result<Vec<f64>> {
    let k = grads.len();
    let mut gram = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let g = linalg::dot(&grads[a], &grads[b]);
            gram[a * k + b] = g;
            gram[b * k + a] = g;
        }
    }
    let w = linalg::solve(gram, k, values.to_vec());
    if w.iter().any(|t| !t.is_finite()) {
        return Err(Error::RankDeficiency {
            manifold: "constraint gram".into(),
            expected: k,
            got: 0,
        });
    }
    let n = grads[0].len();
    let mut out = vec![0.0; n];
    for (wv, g) in w.iter().zip(grads) {
        linalg::axpy(&mut out, -wv, g);
    }
    Ok(out)
}

/// Second fundamental form `B(X, X)` from a second difference of the landing
/// retraction.  Any retraction curve `t -> R(x + t X)` stays on the manifold
/// with velocity `X` at `t = 0`, so the normal component of its acceleration
/// is `B(X, X)` regardless of the tangential parametrisation drift.
pub fn second_fundamental_retraction(
    sys: &CliffordSystem,
    id: ManifoldId,
    x: &[f64],
    u: &[f64],
) -> Result<Vec<f64>> {
    let second = |h: f64| -> Result<Vec<f64>> {
        let plus = project(sys, id, &linalg::add_scaled(x, h, u))?;
        let minus = project(sys, id, &linalg::add_scaled(x, -h, u))?;
        let mut d = linalg::add_scaled(&plus, 1.0, &minus);
        linalg::axpy(&mut d, -2.0, x);
        Ok(linalg::scaled(&d, 1.0 / (h * h)))
    };
    let h = tol::FD_STEP_RETRACTION;
    let coarse = second(h)?;
    let fine = second(h / 2.0)?;
    let mut rich = linalg::scaled(&fine, 4.0 / 3.0);
    linalg::axpy(&mut rich, -1.0 / 3.0, &coarse);
    let (_, normal) = frames(sys, id, x)?;
    let mut out = vec![0.0; x.len()];
    for nu in &normal {
        linalg::axpy(&mut out, linalg::dot(&rich, nu), nu);
    }
    Ok(out)
}

/// Polarisation of the retraction route: `B(X, Y) = (B(X+Y) - B(X-Y)) / 4`.
pub fn second_fundamental_retraction_polarized(
    sys: &CliffordSystem,
    id: ManifoldId,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<Vec<f64>> {
    let plus = second_fundamental_retraction(sys, id, x, &linalg::add_scaled(u, 1.0, v))?;
    let minus = second_fundamental_retraction(sys, id, x, &linalg::add_scaled(u, -1.0, v))?;
    let mut out = linalg::add_scaled(&plus, -1.0, &minus);
    for t in &mut out {
        *t *= 0.25;
    }
    Ok(out)
}

/// Ambient mean curvature vector `H = sum_a B(e_a, e_a)` over the given
/// orthonormal tangent frame, by the cheapest reliable route for the kind.
pub fn mean_curvature_amb(
    sys: &CliffordSystem,
    id: ManifoldId,
    x: &[f64],
    tangent: &[Vec<f64>],
) -> Result<Vec<f64>> {
    match id {
        ManifoldId::Sphere | ManifoldId::M(_) => {
            let top = match id {
                ManifoldId::M(i) => i as i64,
                _ => -1,
            };
            let mut out = linalg::scaled(x, -(tangent.len() as f64));
            for a in 0..=top {
                let tr: f64 = tangent
                    .iter()
                    .map(|e| linalg::dot(&sys.apply_p(a as usize, e), e))
                    .sum();
                linalg::axpy(&mut out, -tr, &sys.apply_p(a as usize, x));
            }
            Ok(out)
        }
        ManifoldId::LevelU { .. }
        | ManifoldId::Hypersurface { .. }
        | ManifoldId::FocalU { .. }
        | ManifoldId::FocalV { .. } => {
            let cons = constraint_set(sys, id).expect("regular kinds have constraints");
            let grads: Vec<Vec<f64>> = cons.iter().map(|c| c.gradient(sys, x)).collect();
            let traces: Vec<f64> = cons
                .iter()
                .map(|c| {
                    tangent
                        .iter()
                        .map(|e| c.hess_bilinear(sys, x, e, e))
                        .sum()
                })
                .collect();
            gram_combination(&grads, &traces)
        }
        ManifoldId::N(_) | ManifoldId::LevelV { .. } => {
            let mut out = vec![0.0; x.len()];
            for e in tangent {
                let b = second_fundamental_retraction(sys, id, x, e)?;
                linalg::axpy(&mut out, 1.0, &b);
            }
            Ok(out)
        }
    }
}

/// Maximal relative deviation of the ambient mean curvature from `-dim x`
/// over a sample.  A vanishing deviation is minimality in the round sphere.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub manifold: String,
    pub dim: usize,
    pub samples: usize,
    pub max_defect: f64,
}

pub fn verify_minimality(
    sys: &CliffordSystem,
    id: ManifoldId,
    samples: usize,
    seed: u64,
) -> Result<MinimalityReport> {
    let pts = sample(sys, id, samples, seed)?;
    let dim = id.dim(sys) as f64;
    let mut max_defect: f64 = 0.0;
    for p in &pts {
        let h = mean_curvature_amb(sys, id, &p.coords, &p.tangent)?;
        let defect = linalg::norm(&linalg::add_scaled(&h, dim, &p.coords)) / dim;
        max_defect = max_defect.max(defect);
    }
    Ok(MinimalityReport {
        manifold: id.label(),
        dim: id.dim(sys),
        samples: pts.len(),
        max_defect,
    })
}

/// Gradient and Laplacian identities of one chain function.
#[derive(Debug, Clone, Serialize)]
pub struct ChainIdentityReport {
    pub manifold: String,
    pub function: String,
    pub eigenvalue: f64,
    pub samples: usize,
    pub max_gradient_rel: f64,
    pub max_laplace_rel: f64,
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// Checks `|grad f_i|^2 = 4 (1 - f_i^2)`, `lap f_i = -4 (l - i - 1) f_i` on
/// `M_i` for the descending chain and `|grad g_i|^2 = 4 (1 - g_i^2)`,
/// `lap g_i = -4 i g_i` on `N_i` for the ascending one.
pub fn chain_function_identities(
    sys: &CliffordSystem,
    samples: usize,
    seed: u64,
) -> Result<Vec<ChainIdentityReport>> {
    let l = sys.l as f64;
    let mut reports = Vec::new();
    for i in 0..sys.m {
        let f = QuadraticForm::from_op(sys, i + 1);
        let id = ManifoldId::M(i);
        let lambda = 4.0 * (l - i as f64 - 1.0);
        reports.push(one_chain_identity(
            sys,
            id,
            &f,
            format!("f_{i}"),
            lambda,
            samples,
            seed.wrapping_add(i as u64),
        )?);
    }
    for i in 2..=sys.m {
        let g = QuadraticForm::from_op(sys, i);
        let id = ManifoldId::N(i);
        let lambda = 4.0 * i as f64;
        reports.push(one_chain_identity(
            sys,
            id,
            &g,
            format!("g_{i}"),
            lambda,
            samples,
            seed.wrapping_add(64 + i as u64),
        )?);
    }
    Ok(reports)
}

fn one_chain_identity(
    sys: &CliffordSystem,
    id: ManifoldId,
    f: &QuadraticForm,
    name: String,
    lambda: f64,
    samples: usize,
    seed: u64,
) -> Result<ChainIdentityReport> {
    let pts = sample(sys, id, samples, seed)?;
    let mut max_grad: f64 = 0.0;
    let mut max_lap: f64 = 0.0;
    for p in &pts {
        let val = f.eval(&p.coords);
        let grad = intrinsic_gradient(f, &p.coords, &p.tangent);
        max_grad = max_grad.max(rel(linalg::dot(&grad, &grad), 4.0 * (1.0 - val * val)));
        let h = mean_curvature_amb(sys, id, &p.coords, &p.tangent)?;
        let lap = intrinsic_laplacian(f, &p.coords, &p.tangent, &h);
        max_lap = max_lap.max(rel(lap, -lambda * val));
    }
    Ok(ChainIdentityReport {
        manifold: id.label(),
        function: name,
        eigenvalue: lambda,
        samples: pts.len(),
        max_gradient_rel: max_grad,
        max_laplace_rel: max_lap,
    })
}

/// Unit normal field, shape operator, and curvature invariants of a tube
/// hypersurface point, all from closed form derivatives of the quartic.
#[derive(Debug, Clone)]
pub struct HypersurfaceShape {
    pub xi: Vec<f64>,
    pub tangent: Vec<Vec<f64>>,
    /// Shape operator in the tangent frame, row major `dim x dim`,
    /// symmetrised.
    pub shape_matrix: Vec<f64>,
    /// Trace of the shape operator (mean curvature in the round sphere).
    pub mean_curvature: f64,
    /// Squared norm of the second fundamental form in the round sphere.
    pub b_norm_sq: f64,
}

/// Ambient Jacobian of the unit normal extension `xi = w / |w|`,
/// `w(y) = grad F(y) - 4 F(y) y`, applied to a direction.
fn xi_jacobian_apply(sys: &CliffordSystem, y: &[f64], v: &[f64]) -> Vec<f64> {
    let form = QuarticForm::new(sys);
    let mut w = form.gradient(y);
    linalg::axpy(&mut w, -4.0 * form.eval(y), y);
    let mut dw = form.hess_apply(y, v);
    let g = form.gradient(y);
    linalg::axpy(&mut dw, -4.0 * linalg::dot(&g, v), y);
    linalg::axpy(&mut dw, -4.0 * form.eval(y), v);
    let wn = linalg::norm(&w);
    let xi = linalg::scaled(&w, 1.0 / wn);
    let mut out = linalg::add_scaled(&dw, -linalg::dot(&xi, &dw), &xi);
    for t in &mut out {
        *t /= wn;
    }
    out
}

pub fn hypersurface_shape(sys: &CliffordSystem, t: f64, x: &[f64]) -> Result<HypersurfaceShape> {
    let id = ManifoldId::Hypersurface { t };
    let (tangent, normal) = frames(sys, id, x)?;
    let xi = normal[1].clone();
    let dim = tangent.len();
    let mut a = vec![0.0; dim * dim];
    for (col, e) in tangent.iter().enumerate() {
        let dxi = xi_jacobian_apply(sys, x, e);
        for (row, eb) in tangent.iter().enumerate() {
            a[row * dim + col] = -linalg::dot(&dxi, eb);
        }
    }
    for r in 0..dim {
        for c in r + 1..dim {
            let s = 0.5 * (a[r * dim + c] + a[c * dim + r]);
            a[r * dim + c] = s;
            a[c * dim + r] = s;
        }
    }
    let mean: f64 = (0..dim).map(|r| a[r * dim + r]).sum();
    let b2: f64 = a.iter().map(|v| v * v).sum();
    Ok(HypersurfaceShape {
        xi,
        tangent,
        shape_matrix: a,
        mean_curvature: mean,
        b_norm_sq: b2,
    })
}

/// Residuals of the Laplace identities for the position and unit normal of a
/// tube hypersurface: `lap x = -n x + H xi` and `lap xi = H x - |B|^2 xi`.
#[derive(Debug, Clone, Serialize)]
pub struct TensionIdentityReport {
    pub t: f64,
    pub samples: usize,
    /// `max |H_amb + n x - H xi|`, closed form on both sides.
    pub max_coordinate_residual: f64,
    /// `max |lap xi - H x + |B|^2 xi|`, finite differences on the left.
    pub max_normal_residual: f64,
}

pub fn verify_hypersurface_laplacian_identities(
    sys: &CliffordSystem,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<TensionIdentityReport> {
    let id = ManifoldId::Hypersurface { t };
    let pts = sample(sys, id, samples, seed)?;
    let n = id.dim(sys) as f64;
    let mut max_coord: f64 = 0.0;
    let mut max_normal: f64 = 0.0;
    for p in &pts {
        let shape = hypersurface_shape(sys, t, &p.coords)?;
        let h_amb = mean_curvature_amb(sys, id, &p.coords, &shape.tangent)?;

        let mut coord = linalg::add_scaled(&h_amb, n, &p.coords);
        linalg::axpy(&mut coord, -shape.mean_curvature, &shape.xi);
        max_coord = max_coord.max(linalg::norm(&coord));

        let lap_xi = xi_laplacian(sys, &p.coords, &shape, &h_amb);
        let mut normal_res = linalg::add_scaled(&lap_xi, -shape.mean_curvature, &p.coords);
        linalg::axpy(&mut normal_res, shape.b_norm_sq, &shape.xi);
        max_normal = max_normal.max(linalg::norm(&normal_res));
    }
    Ok(TensionIdentityReport {
        t,
        samples: pts.len(),
        max_coordinate_residual: max_coord,
        max_normal_residual: max_normal,
    })
}

/// Componentwise intrinsic Laplacian of the unit normal extension.  The
/// frame Hessian trace is a central first difference of the analytic
/// Jacobian, which loses only one derivative to rounding; the mean curvature
/// term is fully analytic.
pub(crate) fn xi_laplacian(
    sys: &CliffordSystem,
    x: &[f64],
    shape: &HypersurfaceShape,
    h_amb: &[f64],
) -> Vec<f64> {
    let dim = x.len();
    let h = 1e-5;
    let mut lap = vec![0.0; dim];
    for e in &shape.tangent {
        let plus = xi_jacobian_apply(sys, &linalg::add_scaled(x, h, e), e);
        let minus = xi_jacobian_apply(sys, &linalg::add_scaled(x, -h, e), e);
        for j in 0..dim {
            lap[j] += (plus[j] - minus[j]) / (2.0 * h);
        }
    }
    let first_order = xi_jacobian_apply(sys, x, h_amb);
    linalg::axpy(&mut lap, 1.0, &first_order);
    lap
}

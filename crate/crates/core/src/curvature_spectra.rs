//! Principal curvature spectra of the level hypersurfaces, the extrinsic
//! curvature certificate on the focal pair, and Ricci based harmonic
//! stability classification.
//!
//! Closed forms used here:
//!
//! * level of the descending chain, unit normal `xi = (P_{i+1} x - c x) / s`
//!   with `s = sqrt(1 - c^2)`: shape operator `A X = -((P_{i+1} X)^T - c X) / s`,
//!   principal curvatures `-sqrt((1-c)/(1+c)), 0, sqrt((1+c)/(1-c))` with
//!   multiplicities `l - i - 2, i + 1, l - i - 2`;
//! * level of the ascending chain, unit normal `eta = (P_i x - c x) / s`:
//!   `A X = -((P_i X)^T - c X) / s`, same curvature values with
//!   multiplicities `i - 1, l - i, i - 1`;
//! * on the focal manifold `M_+`, for unit tangent `X`,
//!   `|B(X, X)|^2 = sum_a <P_a X, X>^2 = (1 - F(X)) / 2`, so the extremal
//!   value `1` is taken exactly on directions lying on the opposite focal
//!   manifold, and `0` exactly on directions lying on `M_+` itself;
//! * Ricci curvature of `M_+` for unit tangents:
//!   `rho(X, X) = 2 (l - m - 2) + 2 sum_{a<b} <X, P_a P_b x>^2`.

use crate::clifford_core::{CliffordSystem, Variant};
use crate::foliation_manifolds::{frames, residual, sample, ManifoldId, SignTag};
use crate::intrinsic_calculus::second_fundamental_retraction;
use crate::linalg;
use crate::munzner_forms::QuarticForm;
use crate::tol;
use crate::{Error, Result};
use serde::Serialize;

/// Shape operator of a level hypersurface inside its chain parent, in the
/// tangent frame of the level.
pub struct ShapeOperator {
    pub dim: usize,
    /// Row major `dim x dim`, symmetrised.
    pub matrix: Vec<f64>,
    pub tangent: Vec<Vec<f64>>,
    /// Ambient unit normal within the parent.
    pub normal_in_parent: Vec<f64>,
    pub c: f64,
    /// Index of the sign matrix entering the closed form.
    pub op_index: usize,
}

pub fn shape_operator(sys: &CliffordSystem, id: ManifoldId, x: &[f64]) -> Result<ShapeOperator> {
    let (op_index, c) = match id {
        ManifoldId::LevelU { i, c } => (i + 1, c),
        ManifoldId::LevelV { i, c } => (i, c),
        _ => {
            return Err(Error::Config(format!(
                "shape operator closed form applies to chain levels, not {id}"
            )))
        }
    };
    id.validate(sys)?;
    let (tangent, normal) = frames(sys, id, x)?;
    let xi = normal.last().expect("levels carry a parent normal").clone();
    let s = (1.0 - c * c).sqrt();
    let dim = tangent.len();
    let mut a = vec![0.0; dim * dim];
    for (col, e) in tangent.iter().enumerate() {
        let pe = sys.apply_p(op_index, e);
        for (row, eb) in tangent.iter().enumerate() {
            let delta = if row == col { 1.0 } else { 0.0 };
            a[row * dim + col] = -(linalg::dot(&pe, eb) - c * delta) / s;
        }
    }
    for r in 0..dim {
        for col in r + 1..dim {
            let sym = 0.5 * (a[r * dim + col] + a[col * dim + r]);
            a[r * dim + col] = sym;
            a[col * dim + r] = sym;
        }
    }
    Ok(ShapeOperator {
        dim,
        matrix: a,
        tangent,
        normal_in_parent: xi,
        c,
        op_index,
    })
}

/// One principal curvature cluster against its prediction.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub predicted_value: f64,
    pub predicted_multiplicity: usize,
    pub observed_multiplicity: usize,
    pub max_value_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub manifold: String,
    pub clusters: Vec<ClusterReport>,
    pub max_value_residual: f64,
    pub multiplicity_mismatches: usize,
}

fn predicted_spectrum(sys: &CliffordSystem, id: ManifoldId) -> Result<Vec<(f64, usize)>> {
    let l = sys.l;
    let (c, mults) = match id {
        ManifoldId::LevelU { i, c } => (c, [l - i - 2, i + 1, l - i - 2]),
        ManifoldId::LevelV { i, c } => (c, [i - 1, l - i, i - 1]),
        _ => return Err(Error::Config(format!("no curvature prediction for {id}"))),
    };
    let values = [
        -((1.0 - c) / (1.0 + c)).sqrt(),
        0.0,
        ((1.0 + c) / (1.0 - c)).sqrt(),
    ];
    Ok(values
        .iter()
        .zip(mults.iter())
        .filter(|(_, m)| **m > 0)
        .map(|(v, m)| (*v, *m))
        .collect())
}

/// Diagonalises the closed form shape operator and checks each curvature
/// cluster against the predicted value and multiplicity.  Eigenvalues are
/// grouped greedily in ascending order; a grouping that does not reproduce
/// the predicted multiplicities is reported, not fatal.
pub fn principal_spectrum(sys: &CliffordSystem, id: ManifoldId, x: &[f64]) -> Result<SpectrumReport> {
    let shape = shape_operator(sys, id, x)?;
    let (evals, _) = linalg::sym_eigen(&shape.matrix, shape.dim);
    let predicted = predicted_spectrum(sys, id)?;
    let mut clusters = Vec::new();
    let mut cursor = 0usize;
    let mut max_res: f64 = 0.0;
    let mut mismatches = 0usize;
    for (value, mult) in &predicted {
        let mut observed = 0usize;
        while cursor + observed < evals.len()
            && (evals[cursor + observed] - value).abs() < tol::CLUSTER_GAP.max(10.0 * tol::SPECTRUM_EIG)
        {
            observed += 1;
        }
        let mut res: f64 = 0.0;
        for e in &evals[cursor..cursor + observed.min(*mult).max(observed)] {
            res = res.max((e - value).abs());
        }
        if observed != *mult {
            mismatches += 1;
        }
        max_res = max_res.max(res);
        clusters.push(ClusterReport {
            predicted_value: *value,
            predicted_multiplicity: *mult,
            observed_multiplicity: observed,
            max_value_residual: res,
        });
        cursor += observed;
    }
    if cursor != evals.len() {
        mismatches += 1;
    }
    Ok(SpectrumReport {
        manifold: id.label(),
        clusters,
        max_value_residual: max_res,
        multiplicity_mismatches: mismatches,
    })
}

/// Residuals of the predicted principal curvature spaces.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalSpaceReport {
    pub manifold: String,
    /// `|P v - v|` over the negative curvature eigenvectors.
    pub max_plus_eigen_residual: f64,
    /// `|P v + v|` over the positive curvature eigenvectors.
    pub max_minus_eigen_residual: f64,
    /// Deviation of the kernel eigenvectors from their predicted span.
    pub max_kernel_residual: f64,
}

/// Checks the principal space characterisations: the `-sqrt((1-c)/(1+c))`
/// cluster lies in `E_+(P)`, the positive one in `E_-(P)`, and the kernel is
/// `span{P_a xi}` on descending levels, respectively the subspace of
/// `E_+(sum c_a P_a)` orthogonal to `x` and to all `P_i Q x` with `Q` in the
/// coefficient complement on ascending levels.
pub fn principal_space_membership(
    sys: &CliffordSystem,
    id: ManifoldId,
    x: &[f64],
) -> Result<PrincipalSpaceReport> {
    let shape = shape_operator(sys, id, x)?;
    let (evals, evecs) = linalg::sym_eigen(&shape.matrix, shape.dim);
    let predicted = predicted_spectrum(sys, id)?;
    let lift = |coords: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; x.len()];
        for (t, e) in coords.iter().zip(&shape.tangent) {
            linalg::axpy(&mut v, *t, e);
        }
        v
    };

    let kernel_basis: Vec<Vec<f64>> = match id {
        ManifoldId::LevelU { i, .. } => {
            let raw: Vec<Vec<f64>> = (0..=i)
                .map(|a| sys.apply_p(a, &shape.normal_in_parent))
                .collect();
            linalg::orthonormalize(&raw, tol::RANK_CUTOFF)
        }
        _ => Vec::new(),
    };
    let ascending_checks: Option<(Vec<f64>, Vec<Vec<f64>>)> = match id {
        ManifoldId::LevelV { i, .. } => {
            let chat: Vec<f64> = sys.coeffs(x)[..=i].to_vec();
            let qdirs = linalg::orthonormal_complement(&[chat.clone()], i + 1);
            let controls: Vec<Vec<f64>> = qdirs
                .iter()
                .map(|q| sys.apply_p(i, &sys.apply_combo(q, x)))
                .collect();
            Some((chat, controls))
        }
        _ => None,
    };

    let mut max_plus: f64 = 0.0;
    let mut max_minus: f64 = 0.0;
    let mut max_kernel: f64 = 0.0;
    for (ev, coords) in evals.iter().zip(&evecs) {
        let v = lift(coords);
        let pv = sys.apply_p(shape.op_index, &v);
        let near = |target: f64| (ev - target).abs() < tol::CLUSTER_GAP;
        if near(predicted[0].0) && predicted[0].0 < -tol::CLUSTER_GAP {
            max_plus = max_plus.max(linalg::norm(&linalg::sub(&pv, &v)));
        } else if near(0.0) {
            match (&kernel_basis.is_empty(), &ascending_checks) {
                (false, _) => {
                    max_kernel = max_kernel.max(linalg::span_residual(&v, &kernel_basis));
                }
                (true, Some((chat, controls))) => {
                    let comb = sys.apply_combo(chat, &v);
                    let mut r = linalg::norm(&linalg::sub(&comb, &v));
                    r = r.max(linalg::dot(&v, x).abs());
                    for ctl in controls {
                        r = r.max(linalg::dot(&v, ctl).abs());
                    }
                    max_kernel = max_kernel.max(r);
                }
                _ => {}
            }
        } else if near(*predicted.last().map(|(v, _)| v).unwrap_or(&f64::NAN)) {
            max_minus = max_minus.max(linalg::norm(&linalg::add_scaled(&pv, 1.0, &v)));
        }
    }
    Ok(PrincipalSpaceReport {
        manifold: id.label(),
        max_plus_eigen_residual: max_plus,
        max_minus_eigen_residual: max_minus,
        max_kernel_residual: max_kernel,
    })
}

/// Certificate for the extremal normal curvature `sigma = max |B(X, X)|^2`
/// over unit tangents of a focal manifold.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaCertificate {
    pub manifold: String,
    /// Certified value at the best witness, by the defining route
    /// (sign matrix sums on `M_+`, retraction differences on `M_-`).
    pub sigma_hat: f64,
    pub witness_x: Vec<f64>,
    pub witness_dir: Vec<f64>,
    /// Sphere point residual of the maximising direction on the opposite
    /// focal manifold.
    pub witness_dir_on_opposite: f64,
    /// `|sigma_hat - (1 -/+ F(witness)) / 2|`.
    pub identity_at_witness: f64,
    /// Certified minimum of `|B(X, X)|^2` from the descent branch.
    pub min_value: f64,
    /// Sphere point residual of the minimising direction on the same focal
    /// manifold.
    pub min_dir_on_same: f64,
    /// Max over random probes of the defining route against the quartic
    /// identity `(1 -/+ F)/2`.
    pub identity_max_residual: f64,
    /// On the descending focal manifold: max over base points and normal
    /// directions of `|tr A_a|`, a pointwise minimality certificate.
    pub max_shape_trace: f64,
    pub converged_runs: usize,
    pub total_runs: usize,
}

struct AscentRun {
    value: f64,
    coords: Vec<f64>,
    converged: bool,
}

/// Projected gradient ascent on the unit sphere of tangent coordinates,
/// Armijo backtracking with warm started step lengths.  The iteration budget
/// is generous because the objective flattens near its extremal set.
///
/// `accept_above`, when set, certifies a run as soon as the objective clears
/// that value.  Witness searches for the vanishing of `|B(X, X)|^2` need it:
/// their optimum is a degenerate critical point, so the gradient test alone
/// would never fire.
fn sphere_ascend(
    objective: &dyn Fn(&[f64]) -> f64,
    gradient: &dyn Fn(&[f64]) -> Vec<f64>,
    tangent: &[Vec<f64>],
    mut xi: Vec<f64>,
    accept_above: Option<f64>,
) -> AscentRun {
    let n = tangent[0].len();
    let lift = |c: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; n];
        for (t, e) in c.iter().zip(tangent) {
            linalg::axpy(&mut v, *t, e);
        }
        v
    };
    let obj = |c: &[f64]| objective(&lift(c));
    linalg::normalize(&mut xi);
    let mut value = obj(&xi);
    let mut converged = false;
    let mut step_hint = 1.0f64;
    for _ in 0..20_000 {
        if accept_above.is_some_and(|floor| value > floor) {
            converged = true;
            break;
        }
        let ambient_grad = gradient(&lift(&xi));
        let mut g: Vec<f64> = tangent.iter().map(|e| linalg::dot(&ambient_grad, e)).collect();
        let radial = linalg::dot(&g, &xi);
        for (gc, xc) in g.iter_mut().zip(&xi) {
            *gc -= radial * xc;
        }
        let gn = linalg::norm(&g);
        if gn < tol::SIGMA_GRAD {
            converged = true;
            break;
        }
        let mut step = (step_hint * 2.0).min(1.0);
        let mut advanced = false;
        while step > 1e-18 {
            let mut trial = linalg::add_scaled(&xi, step, &g);
            linalg::normalize(&mut trial);
            let tv = obj(&trial);
            if tv > value + 1e-4 * step * gn * gn {
                xi = trial;
                value = tv;
                step_hint = step;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if !advanced {
            // flat to rounding; accept as converged if the gradient is tiny
            converged = gn < 1e-7;
            break;
        }
    }
    AscentRun { value, coords: xi, converged }
}

/// `sum_a <P_a X, X>^2` and its ambient gradient: the squared norm of the
/// spherical second fundamental form of `M_+` along a tangent direction.
fn plus_objective(sys: &CliffordSystem, xv: &[f64]) -> f64 {
    (0..=sys.m)
        .map(|a| {
            let c = linalg::dot(&sys.apply_p(a, xv), xv);
            c * c
        })
        .sum()
}

fn plus_gradient(sys: &CliffordSystem, xv: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; xv.len()];
    for a in 0..=sys.m {
        let pv = sys.apply_p(a, xv);
        linalg::axpy(&mut g, 4.0 * linalg::dot(&pv, xv), &pv);
    }
    g
}

/// Defining route for `|B(X, X)|^2` on the ascending focal manifold: a
/// retraction second difference gives the ambient `B`, and the spherical
/// part is `B_amb + |X|^2 x`.
fn minus_b_norm_sq(sys: &CliffordSystem, x: &[f64], xv: &[f64]) -> Result<f64> {
    let id = ManifoldId::N(sys.m);
    let b_amb = second_fundamental_retraction(sys, id, x, xv)?;
    let b_sph = linalg::add_scaled(&b_amb, linalg::dot(xv, xv), x);
    Ok(linalg::dot(&b_sph, &b_sph))
}

pub fn sigma_certificate(
    sys: &CliffordSystem,
    which: SignTag,
    points: usize,
    restarts: usize,
    seed: u64,
) -> Result<SigmaCertificate> {
    let id = match which {
        SignTag::Plus => ManifoldId::M(sys.m),
        SignTag::Minus => ManifoldId::N(sys.m),
    };
    let opposite = match which {
        SignTag::Plus => ManifoldId::N(sys.m),
        SignTag::Minus => ManifoldId::M(sys.m),
    };
    let form = QuarticForm::new(sys);
    let fsign = match which {
        SignTag::Plus => 1.0,
        SignTag::Minus => -1.0,
    };
    let identity_value = |xv: &[f64]| (1.0 - fsign * form.eval(xv)) / 2.0;
    let objective = |xv: &[f64]| -> f64 {
        match which {
            SignTag::Plus => plus_objective(sys, xv),
            SignTag::Minus => identity_value(xv),
        }
    };
    let gradient = |xv: &[f64]| -> Vec<f64> {
        match which {
            SignTag::Plus => plus_gradient(sys, xv),
            SignTag::Minus => linalg::scaled(&form.gradient(xv), -fsign / 2.0),
        }
    };

    let base = sample(sys, id, points, seed)?;
    let min_restarts = (restarts / 4).max(2);
    let max_jobs: Vec<(usize, u64)> = (0..base.len())
        .flat_map(|pi| (0..restarts as u64).map(move |s| (pi, s)))
        .collect();
    let min_jobs: Vec<(usize, u64)> = (0..base.len())
        .flat_map(|pi| (0..min_restarts as u64).map(move |s| (pi, s)))
        .collect();
    let run_one = |(pi, s): &(usize, u64), negate: bool, salt: u64| -> (usize, AscentRun) {
        let p = &base[*pi];
        let mut rng = linalg::rng_for(seed ^ salt, (*pi as u64) * 1024 + s);
        let xi0 = linalg::gaussian_vec(&mut rng, p.tangent.len());
        let run = if negate {
            let neg_obj = |xv: &[f64]| -objective(xv);
            let neg_grad = |xv: &[f64]| linalg::scaled(&gradient(xv), -1.0);
            sphere_ascend(&neg_obj, &neg_grad, &p.tangent, xi0, Some(-tol::SIGMA_MIN_VALUE))
        } else {
            sphere_ascend(&objective, &gradient, &p.tangent, xi0, None)
        };
        (*pi, run)
    };
    use rayon::prelude::*;
    let runs: Vec<(usize, AscentRun)> =
        max_jobs.par_iter().map(|j| run_one(j, false, 0x5157)).collect();
    let min_runs: Vec<(usize, AscentRun)> =
        min_jobs.par_iter().map(|j| run_one(j, true, 0x3141)).collect();
    let total_runs = runs.len() + min_runs.len();
    let converged_runs = runs.iter().chain(min_runs.iter()).filter(|(_, r)| r.converged).count();

    let certify = |pi: usize, coords: &[f64]| -> Result<(f64, Vec<f64>)> {
        let p = &base[pi];
        let mut xv = vec![0.0; sys.dim_ambient()];
        for (t, e) in coords.iter().zip(&p.tangent) {
            linalg::axpy(&mut xv, *t, e);
        }
        let value = match which {
            SignTag::Plus => plus_objective(sys, &xv),
            SignTag::Minus => minus_b_norm_sq(sys, &p.coords, &xv)?,
        };
        Ok((value, xv))
    };

    let mut identity_max: f64 = 0.0;
    for (pi, r) in runs.iter().chain(min_runs.iter()) {
        let (lhs, xv) = certify(*pi, &r.coords)?;
        identity_max = identity_max.max((lhs - identity_value(&xv)).abs());
    }

    let mut max_shape_trace: f64 = 0.0;
    for p in &base {
        match which {
            SignTag::Plus => {
                for a in 0..=sys.m {
                    let tr: f64 = p
                        .tangent
                        .iter()
                        .map(|e| -linalg::dot(&sys.apply_p(a, e), e))
                        .sum();
                    max_shape_trace = max_shape_trace.max(tr.abs());
                }
            }
            SignTag::Minus => {
                let h = crate::intrinsic_calculus::mean_curvature_amb(sys, id, &p.coords, &p.tangent)?;
                let sph = linalg::add_scaled(&h, p.tangent.len() as f64, &p.coords);
                max_shape_trace = max_shape_trace.max(linalg::norm(&sph));
            }
        }
    }

    let best = runs
        .iter()
        .filter(|(_, r)| r.converged)
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .or_else(|| runs.iter().max_by(|a, b| a.1.value.total_cmp(&b.1.value)))
        .ok_or(Error::OptimizerStall { best: 0.0 })?;
    if !best.1.converged {
        return Err(Error::OptimizerStall { best: best.1.value });
    }
    let (sigma_hat, witness_dir) = certify(best.0, &best.1.coords)?;
    let witness_x = base[best.0].coords.clone();
    let witness_on_opposite = residual(sys, opposite, &witness_dir);
    let identity_at_witness = (sigma_hat - identity_value(&witness_dir)).abs();

    let best_min = min_runs
        .iter()
        .filter(|(_, r)| r.converged)
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .ok_or(Error::OptimizerStall { best: 0.0 })?;
    let (min_value, min_dir) = certify(best_min.0, &best_min.1.coords)?;
    let min_dir_on_same = residual(sys, id, &min_dir);

    for (pi, p) in base.iter().enumerate() {
        let mut rng = linalg::rng_for(seed ^ 0x9e37, pi as u64);
        for _ in 0..8 {
            let raw = linalg::gaussian_vec(&mut rng, p.tangent.len());
            let mut xv = vec![0.0; sys.dim_ambient()];
            for (t, e) in raw.iter().zip(&p.tangent) {
                linalg::axpy(&mut xv, *t, e);
            }
            linalg::normalize(&mut xv);
            let lhs = match which {
                SignTag::Plus => plus_objective(sys, &xv),
                SignTag::Minus => minus_b_norm_sq(sys, &p.coords, &xv)?,
            };
            identity_max = identity_max.max((lhs - identity_value(&xv)).abs());
        }
    }

    Ok(SigmaCertificate {
        manifold: id.label(),
        sigma_hat,
        witness_x,
        witness_dir,
        witness_dir_on_opposite: witness_on_opposite,
        identity_at_witness,
        min_value,
        min_dir_on_same,
        identity_max_residual: identity_max,
        max_shape_trace,
        converged_runs,
        total_runs,
    })
}

/// Ricci curvature of `M_+` for a unit tangent, closed form route.
pub fn ricci_formula(sys: &CliffordSystem, x: &[f64], xv: &[f64]) -> f64 {
    let l = sys.l as f64;
    let m = sys.m as f64;
    let mut s = 0.0;
    for a in 0..=sys.m {
        let pax = sys.apply_p(a, x);
        for b in a + 1..=sys.m {
            let v = linalg::dot(xv, &sys.apply_p(b, &pax));
            s += v * v;
        }
    }
    2.0 * (l - m - 2.0) + 2.0 * s
}

/// Exact unit tangent direction of the ascending focal manifold along which
/// the second fundamental form vanishes: `X = (b . P)(a . P) x` for any
/// orthonormal pair `a, b` of coefficient vectors.  The anticommutation
/// relations make `X` a unit tangent at `x`, a point of the manifold itself,
/// and a zero of every `<P_c X, X>`, all exactly in floating point up to
/// matrix-vector roundoff.  This is the closed-form witness that the minimum
/// of `|B(X, X)|^2` is zero; the certificate search can only approach it at
/// the degenerate-critical-point rate.
pub fn isotropic_direction(sys: &CliffordSystem, x: &[f64], a: usize, b: usize) -> Result<Vec<f64>> {
    if a > sys.m || b > sys.m || a == b {
        return Err(Error::Config(format!(
            "need two distinct operator indices at most {}, got {a} and {b}",
            sys.m
        )));
    }
    Ok(sys.apply_p(b, &sys.apply_p(a, x)))
}

/// Ricci curvature by the Gauss equation for a minimal submanifold of the
/// round sphere: `(n-1) - sum_a |(P_a X)^T|^2` over the normal frame `P_a x`.
pub fn ricci_gauss(sys: &CliffordSystem, xv: &[f64], tangent: &[Vec<f64>]) -> f64 {
    let n = tangent.len() as f64;
    let mut s = 0.0;
    for a in 0..=sys.m {
        let px = sys.apply_p(a, xv);
        for e in tangent {
            let t = linalg::dot(&px, e);
            s += t * t;
        }
    }
    n - 1.0 - s
}

#[derive(Debug, Clone, Serialize)]
pub struct RicciReport {
    pub samples: usize,
    pub max_route_disagreement: f64,
    pub min_value: f64,
    pub max_value: f64,
}

/// Compares the closed form Ricci curvature with the Gauss equation route on
/// random unit tangents of `M_+` and records the observed range.
pub fn verify_ricci(sys: &CliffordSystem, samples: usize, seed: u64) -> Result<RicciReport> {
    let id = ManifoldId::M(sys.m);
    let pts = sample(sys, id, samples, seed)?;
    let mut max_dis: f64 = 0.0;
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    for (pi, p) in pts.iter().enumerate() {
        let mut rng = linalg::rng_for(seed ^ 0x52cc, pi as u64);
        let raw = linalg::gaussian_vec(&mut rng, p.tangent.len());
        let mut xv = vec![0.0; sys.dim_ambient()];
        for (t, e) in raw.iter().zip(&p.tangent) {
            linalg::axpy(&mut xv, *t, e);
        }
        linalg::normalize(&mut xv);
        let a = ricci_formula(sys, &p.coords, &xv);
        let b = ricci_gauss(sys, &xv, &p.tangent);
        max_dis = max_dis.max((a - b).abs());
        min_v = min_v.min(a);
        max_v = max_v.max(a);
    }
    Ok(RicciReport {
        samples: pts.len(),
        max_route_disagreement: max_dis,
        min_value: min_v,
        max_value: max_v,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StabilityVerdict {
    HarmonicallyUnstable,
    NotHarmonicallyUnstable,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityClassification {
    pub m1: i64,
    pub m2: i64,
    pub verdict: StabilityVerdict,
    pub reason: String,
}

/// Harmonic stability of `M_+` from the Ricci lower bound
/// `rho >= 2 (l - m - 2)`, which beats `dim M_+ / 2` exactly when
/// `m2 > (m1 + 4) / 2`, together with the known verdicts for the remaining
/// multiplicity pairs.
pub fn classify_harmonic_stability(sys: &CliffordSystem) -> Result<StabilityClassification> {
    let (m1, m2) = sys.multiplicities();
    if m2 <= 0 {
        return Err(Error::DegenerateFoliation { m1, m2 });
    }
    let (verdict, reason) = match (m1, m2) {
        (1, 1) => (
            StabilityVerdict::NotHarmonicallyUnstable,
            "focal manifold is diffeomorphic to SO(3), whose fundamental group is Z/2".into(),
        ),
        (1, 2) => (
            StabilityVerdict::NotHarmonicallyUnstable,
            "focal manifold is the unit tangent bundle of S^3 with nontrivial pi_2".into(),
        ),
        (2, 1) => (
            StabilityVerdict::NotHarmonicallyUnstable,
            "focal manifold has fundamental group Z".into(),
        ),
        (5, 2) => (
            StabilityVerdict::NotHarmonicallyUnstable,
            "focal manifold has nontrivial second homotopy group".into(),
        ),
        (6, 1) => (
            StabilityVerdict::NotHarmonicallyUnstable,
            "focal manifold has fundamental group Z".into(),
        ),
        (4, 3) => {
            if sys.variant == Variant::QuaternionSame {
                (
                    StabilityVerdict::HarmonicallyUnstable,
                    "Ricci curvature is constant 6 > dim/2 = 5 on this family".into(),
                )
            } else {
                (
                    StabilityVerdict::Undetermined,
                    "Ricci lower bound 4 does not beat dim/2 = 5 and no topological obstruction applies".into(),
                )
            }
        }
        (2, 3) | (9, 6) => (
            StabilityVerdict::Undetermined,
            "Ricci lower bound does not beat dim/2 and no topological obstruction applies".into(),
        ),
        _ => {
            if 2 * m2 > m1 + 4 {
                (
                    StabilityVerdict::HarmonicallyUnstable,
                    format!(
                        "Ricci lower bound {} exceeds dim/2 = {}",
                        2 * (m2 - 1),
                        (m1 + 2 * m2) as f64 / 2.0
                    ),
                )
            } else {
                (
                    StabilityVerdict::Undetermined,
                    "multiplicity pair outside the tabulated range".into(),
                )
            }
        }
    };
    Ok(StabilityClassification { m1, m2, verdict, reason })
}

//! The manifolds of the foliation: identification, sampling, frames.
//!
//! For a system `P_0, ..., P_m` on `R^{2l}`, writing `c_a(x) = <P_a x, x>`,
//! the objects handled here are (all inside the unit sphere):
//!
//! ```text
//! M_i   = { c_0 = ... = c_i = 0 }                    dim 2l - i - 2
//! N_i   = { c_0^2 + ... + c_i^2 = 1 }                dim l + i - 1
//! U_c   = { x in M_i : c_{i+1} = c }                 dim 2l - i - 3   (|c| < 1)
//! V_c   = { x in N_i : c_i = c }                     dim l + i - 2    (|c| < 1)
//! U_±1  = unit sphere of the eigenspace E_±(P_{i+1}) dim l - 1
//! V_±1  = unit sphere of the eigenspace E_±(P_i)     dim l - 1
//! M_t   = { F = cos 4t } isoparametric hypersurface  dim 2l - 2
//! ```
//!
//! Sampling is exact wherever the algebra allows it: `N_i` via eigenspace
//! projectors of the Clifford sphere, level sets via the normal exponential
//! map from the next chain member, focal sets via eigenspace projectors of a
//! single operator. Only `M_i` and `M_t` need Gauss-Newton projection, and
//! accepted points carry residuals near machine precision.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford_core::{CliffordSystem, Sign};
use crate::linalg;
use crate::munzner_forms::QuarticForm;
use crate::quat::Quat;
use crate::tol;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ManifoldId {
    Sphere,
    M(usize),
    N(usize),
    LevelU { i: usize, c: f64 },
    LevelV { i: usize, c: f64 },
    FocalU { i: usize, sign: SignTag },
    FocalV { i: usize, sign: SignTag },
    Hypersurface { t: f64 },
}

/// Serializable mirror of [`Sign`] used inside manifold identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignTag {
    Plus,
    Minus,
}

impl From<SignTag> for Sign {
    fn from(s: SignTag) -> Sign {
        match s {
            SignTag::Plus => Sign::Plus,
            SignTag::Minus => Sign::Minus,
        }
    }
}

impl SignTag {
    pub fn as_f64(self) -> f64 {
        Sign::from(self).as_f64()
    }
}

impl ManifoldId {
    /// Intrinsic dimension for the given system.
    pub fn dim(&self, sys: &CliffordSystem) -> usize {
        let l = sys.l;
        match *self {
            ManifoldId::Sphere => 2 * l - 1,
            ManifoldId::M(i) => 2 * l - i - 2,
            ManifoldId::N(i) => l + i - 1,
            ManifoldId::LevelU { i, .. } => 2 * l - i - 3,
            ManifoldId::LevelV { i, .. } => l + i - 2,
            ManifoldId::FocalU { .. } | ManifoldId::FocalV { .. } => l - 1,
            ManifoldId::Hypersurface { .. } => 2 * l - 2,
        }
    }

    pub fn validate(&self, sys: &CliffordSystem) -> Result<()> {
        let m = sys.m;
        let ok = match *self {
            ManifoldId::Sphere => true,
            ManifoldId::M(i) => i <= m,
            ManifoldId::N(i) => (1..=m).contains(&i),
            ManifoldId::LevelU { i, c } => i + 1 <= m && c.abs() < 1.0,
            ManifoldId::LevelV { i, c } => (2..=m).contains(&i) && c.abs() < 1.0,
            ManifoldId::FocalU { i, .. } => i + 1 <= m,
            ManifoldId::FocalV { i, .. } => (2..=m).contains(&i),
            ManifoldId::Hypersurface { t } => {
                if (4.0 * t).cos().abs() >= 1.0 - 1e-8 {
                    return Err(Error::FocalAngle { t });
                }
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("{self} is out of range for this system")))
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ManifoldId::Sphere => "sphere".into(),
            ManifoldId::M(i) => format!("m{i}"),
            ManifoldId::N(i) => format!("n{i}"),
            ManifoldId::LevelU { i, c } => format!("u{i}_c{c:+.3}"),
            ManifoldId::LevelV { i, c } => format!("v{i}_c{c:+.3}"),
            ManifoldId::FocalU { i, sign } => format!(
                "fu{i}_{}",
                if sign == SignTag::Plus { "plus" } else { "minus" }
            ),
            ManifoldId::FocalV { i, sign } => format!(
                "fv{i}_{}",
                if sign == SignTag::Plus { "plus" } else { "minus" }
            ),
            ManifoldId::Hypersurface { t } => format!("mt_{t:.4}"),
        }
    }
}

impl std::fmt::Display for ManifoldId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A sampled point with verified membership and orthonormal frames.
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub manifold: ManifoldId,
    pub coords: Vec<f64>,
    pub residual: f64,
    pub tangent: Vec<Vec<f64>>,
    pub normal: Vec<Vec<f64>>,
}

/// Largest constraint violation of `x` against the named manifold.
pub fn residual(sys: &CliffordSystem, id: ManifoldId, x: &[f64]) -> f64 {
    let sphere = (linalg::dot(x, x) - 1.0).abs();
    match id {
        ManifoldId::Sphere => sphere,
        ManifoldId::M(i) => {
            let worst = (0..=i).map(|a| sys.coeff(a, x).abs()).fold(0.0, f64::max);
            sphere.max(worst)
        }
        ManifoldId::N(i) => {
            let s: f64 = (0..=i).map(|a| sys.coeff(a, x).powi(2)).sum();
            sphere.max((s - 1.0).abs())
        }
        ManifoldId::LevelU { i, c } => {
            residual(sys, ManifoldId::M(i), x).max((sys.coeff(i + 1, x) - c).abs())
        }
        ManifoldId::LevelV { i, c } => {
            residual(sys, ManifoldId::N(i), x).max((sys.coeff(i, x) - c).abs())
        }
        ManifoldId::FocalU { i, sign } => {
            let px = sys.apply_p(i + 1, x);
            let r = linalg::norm(&linalg::sub(&px, &linalg::scaled(x, sign.as_f64())));
            sphere.max(r)
        }
        ManifoldId::FocalV { i, sign } => {
            let px = sys.apply_p(i, x);
            let r = linalg::norm(&linalg::sub(&px, &linalg::scaled(x, sign.as_f64())));
            sphere.max(r)
        }
        ManifoldId::Hypersurface { t } => {
            let f = QuarticForm::new(sys).eval(x);
            sphere.max((f - (4.0 * t).cos()).abs())
        }
    }
}

/// Membership residuals of `x` against the sphere and every chain member.
pub fn membership_report(sys: &CliffordSystem, x: &[f64]) -> Vec<(ManifoldId, f64)> {
    let mut out = vec![(ManifoldId::Sphere, residual(sys, ManifoldId::Sphere, x))];
    for i in 0..=sys.m {
        out.push((ManifoldId::M(i), residual(sys, ManifoldId::M(i), x)));
    }
    for i in 1..=sys.m {
        out.push((ManifoldId::N(i), residual(sys, ManifoldId::N(i), x)));
    }
    out
}

/// Constraint values and gradient rows for the Gauss-Newton targets.
fn constraints(sys: &CliffordSystem, id: ManifoldId, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut h = vec![linalg::dot(x, x) - 1.0];
    let mut grads = vec![linalg::scaled(x, 2.0)];
    match id {
        ManifoldId::M(i) => {
            for a in 0..=i {
                let px = sys.apply_p(a, x);
                h.push(linalg::dot(&px, x));
                grads.push(linalg::scaled(&px, 2.0));
            }
        }
        ManifoldId::LevelU { i, c } => {
            for a in 0..=i {
                let px = sys.apply_p(a, x);
                h.push(linalg::dot(&px, x));
                grads.push(linalg::scaled(&px, 2.0));
            }
            let px = sys.apply_p(i + 1, x);
            h.push(linalg::dot(&px, x) - c);
            grads.push(linalg::scaled(&px, 2.0));
        }
        ManifoldId::Hypersurface { t } => {
            let q = QuarticForm::new(sys);
            h.push(q.eval(x) - (4.0 * t).cos());
            grads.push(q.gradient(x));
        }
        _ => unreachable!("gauss-newton is only used for sphere-regular constraint sets"),
    }
    (h, grads)
}

fn gn_step(h: &[f64], grads: &[Vec<f64>], x: &mut [f64]) {
    let p = h.len();
    let mut gram = vec![0.0; p * p];
    for a in 0..p {
        for b in 0..p {
            gram[a * p + b] = linalg::dot(&grads[a], &grads[b]);
        }
    }
    let lambda = linalg::solve(gram, p, h.to_vec());
    for (la, g) in lambda.iter().zip(grads) {
        linalg::axpy(x, -la, g);
    }
}

fn gauss_newton(sys: &CliffordSystem, id: ManifoldId, start: &[f64]) -> Result<Vec<f64>> {
    let mut x = start.to_vec();
    for _ in 0..tol::NEWTON_MAX_ITERS {
        let (h, grads) = constraints(sys, id, &x);
        let res = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if res <= tol::NEWTON_TARGET {
            return Ok(x);
        }
        gn_step(&h, &grads, &mut x);
    }
    let res = residual(sys, id, &x);
    if res <= tol::NEWTON_TARGET {
        Ok(x)
    } else {
        Err(Error::ConvergenceFailure {
            manifold: id.label(),
            residual: res,
        })
    }
}

/// Retraction onto `id` from a point near it. Used both to correct drift and
/// as the map differentiated by the second-fundamental-form oracle, so each
/// branch fixes the manifold pointwise and has identity differential on
/// tangent spaces:
/// * chain `N_i`, level `V_c`, focal sets: one-shot eigenspace projection
///   (lands exactly);
/// * `M_i`, `U_c`, `M_t`: Gauss-Newton least-norm projection.
pub fn project(sys: &CliffordSystem, id: ManifoldId, y: &[f64]) -> Result<Vec<f64>> {
    match id {
        ManifoldId::Sphere => Ok(linalg::normalized(y)),
        ManifoldId::M(_) | ManifoldId::LevelU { .. } | ManifoldId::Hypersurface { .. } => {
            gauss_newton(sys, id, y)
        }
        ManifoldId::N(i) => {
            let mut c = vec![0.0; sys.m + 1];
            for (a, ca) in c.iter_mut().enumerate().take(i + 1) {
                *ca = sys.coeff(a, y);
            }
            let nc = linalg::normalize(&mut c);
            if nc < 1e-6 {
                return Err(Error::ProjectionFailure { residual: nc });
            }
            let py = sys.apply_combo(&c, y);
            let mut x = linalg::add_scaled(y, 1.0, &py);
            let n = linalg::normalize(&mut x);
            if n < 1e-12 {
                return Err(Error::ProjectionFailure { residual: n });
            }
            Ok(x)
        }
        ManifoldId::LevelV { i, c } => {
            // land on N_i, then rescale the coefficient vector to put c_i at
            // the requested level and project onto the adjusted eigenspace.
            let on_n = project(sys, ManifoldId::N(i), y)?;
            let mut cv: Vec<f64> = (0..=i).map(|a| sys.coeff(a, &on_n)).collect();
            let ci = cv[i];
            let rest = (1.0 - ci * ci).max(0.0).sqrt();
            if rest < 1e-9 {
                return Err(Error::FocalLevel { c: ci });
            }
            let scale = (1.0 - c * c).sqrt() / rest;
            for v in cv.iter_mut().take(i) {
                *v *= scale;
            }
            cv[i] = c;
            let mut full = vec![0.0; sys.m + 1];
            full[..=i].copy_from_slice(&cv);
            linalg::normalize(&mut full);
            let py = sys.apply_combo(&full, &on_n);
            let mut x = linalg::add_scaled(&on_n, 1.0, &py);
            let n = linalg::normalize(&mut x);
            if n < 1e-12 {
                return Err(Error::ProjectionFailure { residual: n });
            }
            Ok(x)
        }
        ManifoldId::FocalU { i, sign } => {
            let py = sys.apply_p(i + 1, y);
            let mut x = linalg::add_scaled(y, sign.as_f64(), &py);
            let n = linalg::normalize(&mut x);
            if n < 1e-12 {
                return Err(Error::ProjectionFailure { residual: n });
            }
            Ok(x)
        }
        ManifoldId::FocalV { i, sign } => {
            let py = sys.apply_p(i, y);
            let mut x = linalg::add_scaled(y, sign.as_f64(), &py);
            let n = linalg::normalize(&mut x);
            if n < 1e-12 {
                return Err(Error::ProjectionFailure { residual: n });
            }
            Ok(x)
        }
    }
}

/// Draws one point of `id` using the stream already positioned in `rng`.
pub fn sample_one(sys: &CliffordSystem, id: ManifoldId, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let n = sys.dim_ambient();
    match id {
        ManifoldId::Sphere => Ok(linalg::normalized(&linalg::gaussian_vec(rng, n))),
        ManifoldId::M(_) | ManifoldId::Hypersurface { .. } => {
            let mut last = Error::ConvergenceFailure {
                manifold: id.label(),
                residual: f64::NAN,
            };
            for _ in 0..10 {
                let start = linalg::normalized(&linalg::gaussian_vec(rng, n));
                match gauss_newton(sys, id, &start) {
                    Ok(x) => return Ok(x),
                    Err(e) => last = e,
                }
            }
            Err(last)
        }
        ManifoldId::N(i) => {
            let mut c = vec![0.0; sys.m + 1];
            let ci = linalg::normalized(&linalg::gaussian_vec(rng, i + 1));
            c[..=i].copy_from_slice(&ci);
            let g = linalg::gaussian_vec(rng, n);
            let pg = sys.apply_combo(&c, &g);
            let mut x = linalg::add_scaled(&g, 1.0, &pg);
            if linalg::normalize(&mut x) < 1e-9 {
                // measure-zero start; redraw deterministically from the stream
                return sample_one(sys, id, rng);
            }
            Ok(x)
        }
        ManifoldId::LevelU { i, c } => {
            let base = sample_one(sys, ManifoldId::M(i + 1), rng)?;
            let t = 0.5 * c.asin();
            let pb = sys.apply_p(i + 1, &base);
            Ok(linalg::add_scaled(
                &linalg::scaled(&base, t.cos()),
                t.sin(),
                &pb,
            ))
        }
        ManifoldId::LevelV { i, c } => {
            let base = sample_one(sys, ManifoldId::N(i - 1), rng)?;
            let t = 0.5 * c.asin();
            let pb = sys.apply_p(i, &base);
            Ok(linalg::add_scaled(
                &linalg::scaled(&base, t.cos()),
                t.sin(),
                &pb,
            ))
        }
        ManifoldId::FocalU { i, sign } => {
            let g = linalg::gaussian_vec(rng, n);
            let pg = sys.apply_p(i + 1, &g);
            let mut x = linalg::add_scaled(&g, sign.as_f64(), &pg);
            if linalg::normalize(&mut x) < 1e-9 {
                return sample_one(sys, id, rng);
            }
            Ok(x)
        }
        ManifoldId::FocalV { i, sign } => {
            let g = linalg::gaussian_vec(rng, n);
            let pg = sys.apply_p(i, &g);
            let mut x = linalg::add_scaled(&g, sign.as_f64(), &pg);
            if linalg::normalize(&mut x) < 1e-9 {
                return sample_one(sys, id, rng);
            }
            Ok(x)
        }
    }
}

/// Orthonormal tangent and normal frames of `id` at `x`. Conventions:
/// * the first normal vector is always the position `x`;
/// * for level sets and hypersurfaces the last normal vector is the unit
///   normal of the level inside its parent manifold.
pub fn frames(
    sys: &CliffordSystem,
    id: ManifoldId,
    x: &[f64],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = sys.dim_ambient();
    let want_t = id.dim(sys);
    let (tangent, normal) = match id {
        ManifoldId::Sphere => {
            let normal = vec![x.to_vec()];
            let tangent = linalg::orthonormal_complement(&normal, n);
            (tangent, normal)
        }
        ManifoldId::M(i) => {
            let mut normal = vec![x.to_vec()];
            for a in 0..=i {
                normal.push(sys.apply_p(a, x));
            }
            let normal = linalg::orthonormalize(&normal, tol::RANK_CUTOFF);
            if normal.len() != i + 2 {
                return Err(Error::RankDeficiency {
                    manifold: id.label(),
                    expected: i + 2,
                    got: normal.len(),
                });
            }
            let tangent = linalg::orthonormal_complement(&normal, n);
            (tangent, normal)
        }
        ManifoldId::N(i) => {
            let mut c = vec![0.0; sys.m + 1];
            for (a, ca) in c.iter_mut().enumerate().take(i + 1) {
                *ca = sys.coeff(a, x);
            }
            linalg::normalize(&mut c);
            let plus = sys.eigenspace_basis(&c, Sign::Plus)?;
            let minus = sys.eigenspace_basis(&c, Sign::Minus)?;
            // span{P_a x} = R x + (Clifford directions inside E_-)
            let mut px = vec![x.to_vec()];
            for a in 0..=i {
                px.push(sys.apply_p(a, x));
            }
            let px = linalg::orthonormalize(&px, tol::RANK_CUTOFF);
            if px.len() != i + 1 {
                return Err(Error::RankDeficiency {
                    manifold: id.label(),
                    expected: i + 1,
                    got: px.len(),
                });
            }
            let qdirs: Vec<Vec<f64>> = px[1..].to_vec();
            // tangent: (E_+ minus the position) plus the Clifford directions
            let mut tp = vec![x.to_vec()];
            tp.extend(plus.iter().cloned());
            let tp = linalg::orthonormalize(&tp, tol::RANK_CUTOFF);
            let mut tangent: Vec<Vec<f64>> = tp[1..].to_vec();
            tangent.extend(qdirs.iter().cloned());
            // normal: position plus the E_- complement of the Clifford directions
            let mut nm = qdirs.clone();
            nm.extend(minus.iter().cloned());
            let nm = linalg::orthonormalize(&nm, tol::RANK_CUTOFF);
            let mut normal = vec![x.to_vec()];
            normal.extend(nm[qdirs.len()..].iter().cloned());
            (tangent, normal)
        }
        ManifoldId::LevelU { i, c: _ } => {
            let (tm, nm) = frames(sys, ManifoldId::M(i), x)?;
            let ct = sys.coeff(i + 1, x);
            if ct.abs() >= 1.0 - 1e-8 {
                return Err(Error::FocalLevel { c: ct });
            }
            let px = sys.apply_p(i + 1, x);
            let xi = linalg::scaled(
                &linalg::add_scaled(&px, -ct, x),
                1.0 / (1.0 - ct * ct).sqrt(),
            );
            let mut tt = vec![xi.clone()];
            tt.extend(tm);
            let tt = linalg::orthonormalize(&tt, tol::RANK_CUTOFF);
            let tangent = tt[1..].to_vec();
            let mut normal = nm;
            normal.push(xi);
            (tangent, normal)
        }
        ManifoldId::LevelV { i, c: _ } => {
            let (tn, nn) = frames(sys, ManifoldId::N(i), x)?;
            let ct = sys.coeff(i, x);
            if ct.abs() >= 1.0 - 1e-8 {
                return Err(Error::FocalLevel { c: ct });
            }
            let px = sys.apply_p(i, x);
            let eta = linalg::scaled(
                &linalg::add_scaled(&px, -ct, x),
                1.0 / (1.0 - ct * ct).sqrt(),
            );
            let mut tt = vec![eta.clone()];
            tt.extend(tn);
            let tt = linalg::orthonormalize(&tt, tol::RANK_CUTOFF);
            let tangent = tt[1..].to_vec();
            let mut normal = nn;
            normal.push(eta);
            (tangent, normal)
        }
        ManifoldId::FocalU { i, sign } | ManifoldId::FocalV { i, sign } => {
            let alpha = match id {
                ManifoldId::FocalU { .. } => i + 1,
                _ => i,
            };
            let mut e = vec![0.0; sys.m + 1];
            e[alpha] = 1.0;
            let own = sys.eigenspace_basis(&e, sign.into())?;
            let other = sys.eigenspace_basis(&e, Sign::from(sign).flip())?;
            let mut tp = vec![x.to_vec()];
            tp.extend(own);
            let tp = linalg::orthonormalize(&tp, tol::RANK_CUTOFF);
            let tangent = tp[1..].to_vec();
            let mut normal = vec![x.to_vec()];
            normal.extend(other);
            (tangent, normal)
        }
        ManifoldId::Hypersurface { .. } => {
            let q = QuarticForm::new(sys);
            let f = q.eval(x);
            let mut w = q.gradient(x);
            linalg::axpy(&mut w, -4.0 * f, x);
            let nw = linalg::normalize(&mut w);
            if nw < 1e-8 {
                return Err(Error::FocalAngle {
                    t: 0.25 * f.clamp(-1.0, 1.0).acos(),
                });
            }
            let normal = vec![x.to_vec(), w];
            let tangent = linalg::orthonormal_complement(&normal, n);
            (tangent, normal)
        }
    };
    if tangent.len() != want_t || tangent.len() + normal.len() != n {
        return Err(Error::RankDeficiency {
            manifold: id.label(),
            expected: want_t,
            got: tangent.len(),
        });
    }
    let mut full = tangent.clone();
    full.extend(normal.iter().cloned());
    let defect = linalg::frame_defect(&full);
    if defect > tol::FRAME_ORTHO {
        return Err(Error::RankDeficiency {
            manifold: id.label(),
            expected: want_t,
            got: tangent.len(),
        });
    }
    Ok((tangent, normal))
}

/// Samples `count` points with frames, deterministically from `seed`.
pub fn sample(
    sys: &CliffordSystem,
    id: ManifoldId,
    count: usize,
    seed: u64,
) -> Result<Vec<SamplePoint>> {
    id.validate(sys)?;
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut rng = linalg::rng_for(seed, idx as u64);
            let coords = sample_one(sys, id, &mut rng)?;
            let res = residual(sys, id, &coords);
            if res > tol::SAMPLE_RESIDUAL {
                return Err(Error::ConvergenceFailure {
                    manifold: id.label(),
                    residual: res,
                });
            }
            let (tangent, normal) = frames(sys, id, &coords)?;
            Ok(SamplePoint {
                manifold: id,
                coords,
                residual: res,
                tangent,
                normal,
            })
        })
        .collect()
}

/// Coordinates only; used where frames are not needed (spectral sampling).
pub fn sample_coords(
    sys: &CliffordSystem,
    id: ManifoldId,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    id.validate(sys)?;
    (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut rng = linalg::rng_for(seed, idx as u64);
            let coords = sample_one(sys, id, &mut rng)?;
            let res = residual(sys, id, &coords);
            if res > tol::SAMPLE_RESIDUAL {
                return Err(Error::ConvergenceFailure {
                    manifold: id.label(),
                    residual: res,
                });
            }
            Ok(coords)
        })
        .collect()
}

/// Image of a point of the (m,l) = (4,8) focal submanifold `M_+` under the
/// variant-specific diffeomorphism.
#[derive(Clone, Debug)]
pub enum ChartImage {
    /// `sqrt(2) [[u1, u2], [v1, v2]]`, a quaternion-unitary 2x2 matrix.
    QuaternionFrame { rows: [[Quat; 2]; 2] },
    /// `((u1, u2), w)` on `S^7(1/sqrt 2) x S^3(1)`.
    SphereProduct { s7: [Quat; 2], s3: Quat },
}

#[derive(Clone, Debug)]
pub struct ChartReport {
    pub image: ChartImage,
    /// Residual of the quaternionic membership condition.
    pub membership_residual: f64,
    /// Residual of the image's defining property (unitarity of the frame,
    /// or unit norms of the product factors).
    pub image_residual: f64,
}

/// Quaternionic charts of `M_+` for the two (m,k) = (4,2) families:
/// the frame map for the family with scalar product discriminant, the
/// sphere-product map for the non-scalar one.
pub fn sp2_charts(sys: &CliffordSystem, x: &[f64]) -> Result<ChartReport> {
    use crate::clifford_core::{ProductDiscriminant, Variant};
    if sys.m != 4 || sys.l != 8 {
        return Err(Error::WrongVariant);
    }
    let res = residual(sys, ManifoldId::M(4), x);
    if res > 1e-8 {
        return Err(Error::NotOnFocalManifold { residual: res });
    }
    let u1 = Quat::from_slice(&x[0..4]);
    let u2 = Quat::from_slice(&x[4..8]);
    let v1 = Quat::from_slice(&x[8..12]);
    let v2 = Quat::from_slice(&x[12..16]);
    let u_norm = ((u1.norm_sq() + u2.norm_sq()) - 0.5).abs();
    let v_norm = ((v1.norm_sq() + v2.norm_sq()) - 0.5).abs();
    match sys.product_discriminant {
        ProductDiscriminant::PlusIdentity | ProductDiscriminant::MinusIdentity => {
            debug_assert!(matches!(
                sys.variant,
                Variant::QuaternionSame | Variant::Standard
            ));
            // membership: |u| = |v| = 1/sqrt 2 and u1 conj(v1) + u2 conj(v2) = 0
            let mem = u1.mul(v1.conj()).add(u2.mul(v2.conj())).norm();
            let membership_residual = mem.max(u_norm).max(v_norm);
            let s = 2.0f64.sqrt();
            let rows = [
                [u1.scale(s), u2.scale(s)],
                [v1.scale(s), v2.scale(s)],
            ];
            // unitarity of the frame: row norms 1, quaternionic row product 0
            let r11 = (rows[0][0].norm_sq() + rows[0][1].norm_sq() - 1.0).abs();
            let r22 = (rows[1][0].norm_sq() + rows[1][1].norm_sq() - 1.0).abs();
            let r12 = rows[0][0]
                .mul(rows[1][0].conj())
                .add(rows[0][1].mul(rows[1][1].conj()))
                .norm();
            Ok(ChartReport {
                image: ChartImage::QuaternionFrame { rows },
                membership_residual,
                image_residual: r11.max(r22).max(r12),
            })
        }
        ProductDiscriminant::NotScalar => {
            debug_assert!(matches!(sys.variant, Variant::QuaternionOpposite));
            // membership: |u| = |v| = 1/sqrt 2 and v1 conj(u1) + u2 conj(v2) = 0
            let mem = v1.mul(u1.conj()).add(u2.mul(v2.conj())).norm();
            let membership_residual = mem.max(u_norm).max(v_norm);
            let w = u2
                .conj()
                .mul(v1)
                .add(v2.conj().mul(u1).scale(-1.0))
                .scale(2.0);
            let image_residual = (w.norm_sq() - 1.0).abs().max(u_norm);
            Ok(ChartReport {
                image: ChartImage::SphereProduct { s7: [u1, u2], s3: w },
                membership_residual,
                image_residual,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford_core::Variant;

    fn sys22() -> CliffordSystem {
        CliffordSystem::build(2, 2, Variant::Standard).unwrap()
    }

    #[test]
    fn sampling_and_frames_across_the_foliation() {
        let sys = sys22();
        let ids = [
            ManifoldId::Sphere,
            ManifoldId::M(0),
            ManifoldId::M(1),
            ManifoldId::M(2),
            ManifoldId::N(1),
            ManifoldId::N(2),
            ManifoldId::LevelU { i: 0, c: 0.5 },
            ManifoldId::LevelU { i: 1, c: -0.3 },
            ManifoldId::LevelV { i: 2, c: 0.4 },
            ManifoldId::FocalU { i: 0, sign: SignTag::Plus },
            ManifoldId::FocalU { i: 1, sign: SignTag::Minus },
            ManifoldId::FocalV { i: 2, sign: SignTag::Plus },
            ManifoldId::Hypersurface { t: 0.3 },
        ];
        for id in ids {
            let pts = sample(&sys, id, 5, 91).unwrap();
            for p in &pts {
                assert!(p.residual <= tol::SAMPLE_RESIDUAL, "{id}: residual {}", p.residual);
                assert_eq!(p.tangent.len(), id.dim(&sys), "{id}: tangent dim");
                assert_eq!(
                    p.tangent.len() + p.normal.len(),
                    sys.dim_ambient(),
                    "{id}: frame split"
                );
            }
        }
    }

    #[test]
    fn chain_nesting() {
        let sys = sys22();
        // descending chain M_0 > M_1 > M_2 and ascending N_1 < N_2
        for p in sample(&sys, ManifoldId::M(2), 10, 7).unwrap() {
            for i in 0..=2 {
                assert!(residual(&sys, ManifoldId::M(i), &p.coords) < 1e-12);
            }
        }
        for p in sample(&sys, ManifoldId::N(1), 10, 7).unwrap() {
            assert!(residual(&sys, ManifoldId::N(2), &p.coords) < 1e-12);
        }
        // the zero level of the chain functions is the next chain member
        let u0 = ManifoldId::LevelU { i: 0, c: 0.0 };
        for p in sample(&sys, u0, 10, 7).unwrap() {
            assert!(residual(&sys, ManifoldId::M(1), &p.coords) < 1e-12);
        }
    }

    #[test]
    fn focal_sets_sit_in_their_parents() {
        let sys = sys22();
        for p in sample(
            &sys,
            ManifoldId::FocalU { i: 1, sign: SignTag::Plus },
            10,
            11,
        )
        .unwrap()
        {
            assert!(residual(&sys, ManifoldId::M(1), &p.coords) < 1e-12);
            assert!((sys.coeff(2, &p.coords) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn membership_report_separates_chains() {
        let sys = sys22();
        let p = &sample(&sys, ManifoldId::N(1), 1, 13).unwrap()[0];
        let rep = membership_report(&sys, &p.coords);
        for (id, r) in rep {
            match id {
                ManifoldId::Sphere | ManifoldId::N(_) => assert!(r < 1e-12, "{id}"),
                ManifoldId::M(_) => assert!(r > 0.01, "{id} unexpectedly small: {r}"),
                _ => {}
            }
        }
    }

    #[test]
    fn retractions_land_exactly_and_fix_tangents() {
        let sys = sys22();
        for id in [
            ManifoldId::M(1),
            ManifoldId::N(2),
            ManifoldId::LevelV { i: 2, c: 0.3 },
            ManifoldId::FocalU { i: 0, sign: SignTag::Plus },
        ] {
            let p = &sample(&sys, id, 1, 17).unwrap()[0];
            // fixes the manifold pointwise
            let back = project(&sys, id, &p.coords).unwrap();
            assert!(linalg::norm(&linalg::sub(&back, &p.coords)) < 1e-12, "{id}");
            // lands on the manifold from nearby ambient points
            let mut rng = linalg::rng_for(19, 0);
            let off = linalg::add_scaled(
                &p.coords,
                0.01,
                &linalg::normalized(&linalg::gaussian_vec(&mut rng, sys.dim_ambient())),
            );
            let proj = project(&sys, id, &off).unwrap();
            assert!(residual(&sys, id, &proj) < 1e-12, "{id}");
            // identity differential along tangents
            let h = 1e-4;
            for x_dir in p.tangent.iter().take(3) {
                let moved = project(&sys, id, &linalg::add_scaled(&p.coords, h, x_dir)).unwrap();
                let diff = linalg::scaled(&linalg::sub(&moved, &p.coords), 1.0 / h);
                assert!(
                    linalg::norm(&linalg::sub(&diff, x_dir)) < 1e-3,
                    "{id}: retraction differential deviates"
                );
            }
        }
    }

    #[test]
    fn quaternion_charts_on_both_families() {
        for variant in [Variant::QuaternionSame, Variant::QuaternionOpposite] {
            let sys = CliffordSystem::build(4, 2, variant).unwrap();
            for p in sample(&sys, ManifoldId::M(4), 25, 23).unwrap() {
                let rep = sp2_charts(&sys, &p.coords).unwrap();
                assert!(rep.membership_residual < 1e-9, "{variant}: membership");
                assert!(rep.image_residual < 1e-9, "{variant}: image");
            }
        }
    }

    #[test]
    fn charts_reject_wrong_inputs() {
        let sys = sys22();
        let p = &sample(&sys, ManifoldId::M(2), 1, 29).unwrap()[0];
        assert!(matches!(sp2_charts(&sys, &p.coords), Err(Error::WrongVariant)));
        let sys42 = CliffordSystem::build(4, 2, Variant::QuaternionSame).unwrap();
        let q = &sample(&sys42, ManifoldId::Sphere, 1, 29).unwrap()[0];
        assert!(matches!(
            sp2_charts(&sys42, &q.coords),
            Err(Error::NotOnFocalManifold { .. })
        ));
    }

    #[test]
    fn focal_angles_rejected() {
        let sys = sys22();
        assert!(matches!(
            ManifoldId::Hypersurface { t: 0.0 }.validate(&sys),
            Err(Error::FocalAngle { .. })
        ));
        assert!(matches!(
            ManifoldId::Hypersurface { t: std::f64::consts::FRAC_PI_4 }.validate(&sys),
            Err(Error::FocalAngle { .. })
        ));
        ManifoldId::Hypersurface { t: 0.2 }.validate(&sys).unwrap();
    }

    #[test]
    fn hypersurface_level_matches_angle() {
        let sys = sys22();
        let t = 0.35;
        for p in sample(&sys, ManifoldId::Hypersurface { t }, 5, 31).unwrap() {
            let f = QuarticForm::new(&sys).eval(&p.coords);
            assert!((f - (4.0 * t).cos()).abs() < 1e-12);
        }
    }
}

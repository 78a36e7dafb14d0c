//! Normal exponential maps along the chain foliations, their pushforwards
//! and fiber geometry, and the harmonic-map verifications for the focal
//! pair.
//!
//! Closed forms used here:
//!
//! * the flow `x -> cos t x + sin t xi(x)` along a unit normal field `xi`
//!   follows great circles, so every map in this module is linear in `x`
//!   except the ones starting on a tube hypersurface, where `xi` is the
//!   normalised spherical gradient of the quartic;
//! * pushforward of the chain flow splits over the principal spaces of the
//!   source: factor `cos t + sin t` on the curvature `-1` space, factor
//!   `cos t - sin t` on the curvature `+1` space, and an isometry on the
//!   kernel of the shape operator;
//! * the volume element contracts by `(cos 2t)^{l-i-2}`, the product of the
//!   pushforward singular values;
//! * fibers of the quarter-turn maps are round spheres of radius
//!   `1/sqrt(2)`: `{(y + z)/sqrt(2)}` with `z` running over a unit sphere in
//!   an explicit linear subspace, and the curves
//!   `(y + cos s z + sin s v)/sqrt(2)` are geodesics of the source because
//!   their spherical acceleration is exactly half the unit normal at the
//!   point;
//! * sources of all linear map kinds are minimal in the round sphere, so
//!   every ambient component `f` satisfies `lap f = -dim(source) f`.

use crate::clifford_core::CliffordSystem;
use crate::foliation_manifolds::{frames, residual, sample, ManifoldId, SignTag};
use crate::intrinsic_calculus::{
    hypersurface_shape, intrinsic_laplacian, mean_curvature_amb, xi_laplacian, AmbientScalar,
    LinearForm,
};
use crate::linalg;
use crate::munzner_forms::QuarticForm;
use crate::tol;
use crate::{Error, Result};
use serde::Serialize;

/// The map kinds: chain flows at a general angle, their focal (quarter
/// turn) limits, the focal-pair maps driven by a chosen unit normal
/// combination, the extension-driven maps going the other way, and the
/// projections from a tube hypersurface back to either focal manifold.
#[derive(Clone, Debug)]
pub enum FocalMapKind {
    /// Normal exponential flow of the descending chain: `M_{i+1}` into the
    /// level at `sin 2t` of its parent.
    PhiT { i: usize, t: f64 },
    /// Normal exponential flow of the ascending chain: `N_{i-1}` into the
    /// level at `sin 2t` of its parent.
    PsiT { i: usize, t: f64 },
    /// Quarter-turn limit of `PhiT`: submersion onto the focal sphere
    /// `SE_sign(P_{i+1})`.
    PhiQuarter { i: usize, sign: SignTag },
    /// Quarter-turn limit of `PsiT`: submersion onto `SE_sign(P_i)`.
    PsiQuarter { i: usize, sign: SignTag },
    /// `x -> (x + Px)/sqrt(2)` from the ascending focal manifold to the
    /// descending one, `P` a unit combination of the system.
    PlusToMinus { coeffs: Vec<f64> },
    /// `x -> cos t x + sin t Px` from the ascending focal manifold onto the
    /// tube at distance `t` from it.
    PlusToHypersurface { coeffs: Vec<f64>, t: f64 },
    /// `x -> (x + P_{m+1}x)/sqrt(2)`; needs the system to extend.
    MinusToPlus,
    /// `x -> cos s x + sin s P_{m+1}x` onto the tube at distance `s` from
    /// the descending focal manifold; needs the system to extend.
    MinusToHypersurface { s: f64 },
    /// Focal projection of the tube at angle `t` onto the ascending focal
    /// manifold, along the spherical gradient of the quartic.
    HypersurfaceToPlus { t: f64 },
    /// Focal projection of the tube onto the descending focal manifold.
    HypersurfaceToMinus { t: f64 },
}

enum NormalField {
    Op(usize),
    Combo(Vec<f64>),
    Extension,
    LevelGradient,
}

/// A validated map with resolved source, target, and rotation angle.
pub struct FocalMap {
    pub kind: FocalMapKind,
    pub source: ManifoldId,
    pub target: ManifoldId,
    angle: f64,
    field: NormalField,
}

const QUARTER: f64 = std::f64::consts::FRAC_PI_4;

fn unit_coeffs(sys: &CliffordSystem, coeffs: &[f64]) -> Result<()> {
    if coeffs.len() != sys.m + 1 {
        return Err(Error::Config(format!(
            "coefficient vector must have length {}, got {}",
            sys.m + 1,
            coeffs.len()
        )));
    }
    let norm = linalg::norm(coeffs);
    if (norm - 1.0).abs() > tol::COEFF_UNIT {
        return Err(Error::NotUnitCoefficients { norm });
    }
    Ok(())
}

impl FocalMap {
    pub fn new(sys: &CliffordSystem, kind: FocalMapKind) -> Result<FocalMap> {
        let (source, target, angle, field) = match &kind {
            FocalMapKind::PhiT { i, t } => {
                let c = (2.0 * t).sin();
                if c.abs() >= 1.0 - 1e-8 {
                    return Err(Error::FocalAngle { t: *t });
                }
                let target = ManifoldId::LevelU { i: *i, c };
                target.validate(sys)?;
                (ManifoldId::M(i + 1), target, *t, NormalField::Op(i + 1))
            }
            FocalMapKind::PsiT { i, t } => {
                let c = (2.0 * t).sin();
                if c.abs() >= 1.0 - 1e-8 {
                    return Err(Error::FocalAngle { t: *t });
                }
                let target = ManifoldId::LevelV { i: *i, c };
                target.validate(sys)?;
                (ManifoldId::N(i - 1), target, *t, NormalField::Op(*i))
            }
            FocalMapKind::PhiQuarter { i, sign } => {
                let target = ManifoldId::FocalU { i: *i, sign: *sign };
                target.validate(sys)?;
                let angle = sign.as_f64() * QUARTER;
                (ManifoldId::M(i + 1), target, angle, NormalField::Op(i + 1))
            }
            FocalMapKind::PsiQuarter { i, sign } => {
                let target = ManifoldId::FocalV { i: *i, sign: *sign };
                target.validate(sys)?;
                let angle = sign.as_f64() * QUARTER;
                (ManifoldId::N(i - 1), target, angle, NormalField::Op(*i))
            }
            FocalMapKind::PlusToMinus { coeffs } => {
                unit_coeffs(sys, coeffs)?;
                (
                    ManifoldId::M(sys.m),
                    ManifoldId::N(sys.m),
                    QUARTER,
                    NormalField::Combo(coeffs.clone()),
                )
            }
            FocalMapKind::PlusToHypersurface { coeffs, t } => {
                unit_coeffs(sys, coeffs)?;
                let target = ManifoldId::Hypersurface { t: *t };
                target.validate(sys)?;
                (ManifoldId::M(sys.m), target, *t, NormalField::Combo(coeffs.clone()))
            }
            FocalMapKind::MinusToPlus => {
                if sys.extension_op().is_none() {
                    return Err(Error::ExtensionUnavailable);
                }
                (ManifoldId::N(sys.m), ManifoldId::M(sys.m), QUARTER, NormalField::Extension)
            }
            FocalMapKind::MinusToHypersurface { s } => {
                if sys.extension_op().is_none() {
                    return Err(Error::ExtensionUnavailable);
                }
                let target = ManifoldId::Hypersurface { t: QUARTER - s };
                target.validate(sys)?;
                (ManifoldId::N(sys.m), target, *s, NormalField::Extension)
            }
            FocalMapKind::HypersurfaceToPlus { t } => {
                let source = ManifoldId::Hypersurface { t: *t };
                source.validate(sys)?;
                (source, ManifoldId::M(sys.m), *t, NormalField::LevelGradient)
            }
            FocalMapKind::HypersurfaceToMinus { t } => {
                let source = ManifoldId::Hypersurface { t: *t };
                source.validate(sys)?;
                (source, ManifoldId::N(sys.m), t - QUARTER, NormalField::LevelGradient)
            }
        };
        Ok(FocalMap { kind, source, target, angle, field })
    }

    pub fn label(&self) -> String {
        match &self.kind {
            FocalMapKind::PhiT { i, t } => format!("phi_t(i={i},t={t:.4})"),
            FocalMapKind::PsiT { i, t } => format!("psi_t(i={i},t={t:.4})"),
            FocalMapKind::PhiQuarter { i, sign } => {
                format!("phi_quarter(i={i},{})", sign_str(*sign))
            }
            FocalMapKind::PsiQuarter { i, sign } => {
                format!("psi_quarter(i={i},{})", sign_str(*sign))
            }
            FocalMapKind::PlusToMinus { .. } => "plus_to_minus".into(),
            FocalMapKind::PlusToHypersurface { t, .. } => format!("plus_to_tube(t={t:.4})"),
            FocalMapKind::MinusToPlus => "minus_to_plus".into(),
            FocalMapKind::MinusToHypersurface { s } => format!("minus_to_tube(s={s:.4})"),
            FocalMapKind::HypersurfaceToPlus { t } => format!("tube_to_plus(t={t:.4})"),
            FocalMapKind::HypersurfaceToMinus { t } => format!("tube_to_minus(t={t:.4})"),
        }
    }

    /// The unit normal field of the source driving the flow, at `x`.
    pub fn normal_at(&self, sys: &CliffordSystem, x: &[f64]) -> Result<Vec<f64>> {
        match &self.field {
            NormalField::Op(a) => Ok(sys.apply_p(*a, x)),
            NormalField::Combo(c) => Ok(sys.apply_combo(c, x)),
            NormalField::Extension => {
                let p = sys.extension_op().ok_or(Error::ExtensionUnavailable)?;
                Ok(p.apply_vec(x))
            }
            NormalField::LevelGradient => {
                let form = QuarticForm::new(sys);
                let mut w = form.gradient(x);
                linalg::axpy(&mut w, -4.0 * form.eval(x), x);
                linalg::normalize(&mut w);
                Ok(w)
            }
        }
    }

    fn op_index(&self) -> Option<usize> {
        match self.field {
            NormalField::Op(a) => Some(a),
            _ => None,
        }
    }
}

fn sign_str(sign: SignTag) -> &'static str {
    match sign {
        SignTag::Plus => "plus",
        SignTag::Minus => "minus",
    }
}

/// Flow `x` along the map's unit normal by the map's angle.
pub fn apply(sys: &CliffordSystem, map: &FocalMap, x: &[f64]) -> Result<Vec<f64>> {
    let res = residual(sys, map.source, x);
    if res > tol::MAP_TARGET_RESIDUAL {
        return Err(Error::NotOnSource { residual: res });
    }
    let xi = map.normal_at(sys, x)?;
    let mut out = linalg::scaled(x, map.angle.cos());
    linalg::axpy(&mut out, map.angle.sin(), &xi);
    Ok(out)
}

/// Orthonormal bases (ambient coordinates) of the three principal spaces of
/// the minimal chain hypersurface: curvature `-1`, curvature `+1`, and the
/// shape-operator kernel, with respect to the unit normal `P_op x`.
///
/// The descending case uses the closed kernel basis `{P_a P_op x}`; the rest
/// of the splitting is by the eigenprojections `(X ± P_op X)/2`, which leave
/// the kernel complement invariant, so no rank decision is involved.  The
/// ascending case diagonalises `<P_op e_a, e_b>` on the frame; its spectrum
/// is exactly `{-1, 0, 1}` with gaps of order one.
fn principal_split(
    sys: &CliffordSystem,
    map: &FocalMap,
    x: &[f64],
    tangent: &[Vec<f64>],
) -> Result<[Vec<Vec<f64>>; 3]> {
    let op = map
        .op_index()
        .ok_or_else(|| Error::Config("principal splitting needs a chain flow".into()))?;
    match map.source {
        ManifoldId::M(_) => {
            let xi = sys.apply_p(op, x);
            let kernel: Vec<Vec<f64>> = (0..op).map(|a| sys.apply_p(a, &xi)).collect();
            let project = |e: &Vec<f64>| -> Vec<f64> {
                let mut v = e.clone();
                for b in &kernel {
                    let c = linalg::dot(&v, b);
                    linalg::axpy(&mut v, -c, b);
                }
                v
            };
            let mut minus_one = Vec::new();
            let mut plus_one = Vec::new();
            for e in tangent {
                let ep = project(e);
                let pe = sys.apply_p(op, &ep);
                minus_one.push(linalg::add_scaled(&ep, 1.0, &pe));
                plus_one.push(linalg::add_scaled(&ep, -1.0, &pe));
            }
            let minus_one = linalg::orthonormalize(&minus_one, tol::RANK_CUTOFF);
            let plus_one = linalg::orthonormalize(&plus_one, tol::RANK_CUTOFF);
            Ok([minus_one, plus_one, kernel])
        }
        ManifoldId::N(_) => {
            let d = tangent.len();
            let mut mat = vec![0.0; d * d];
            for (a, ea) in tangent.iter().enumerate() {
                let pe = sys.apply_p(op, ea);
                for (b, eb) in tangent.iter().enumerate() {
                    mat[a * d + b] = linalg::dot(&pe, eb);
                }
            }
            for a in 0..d {
                for b in (a + 1)..d {
                    let s = 0.5 * (mat[a * d + b] + mat[b * d + a]);
                    mat[a * d + b] = s;
                    mat[b * d + a] = s;
                }
            }
            let (vals, vecs) = linalg::sym_eigen(&mat, d);
            let mut split: [Vec<Vec<f64>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
            for (val, coords) in vals.iter().zip(&vecs) {
                let mut v = vec![0.0; x.len()];
                for (c, e) in coords.iter().zip(tangent) {
                    linalg::axpy(&mut v, *c, e);
                }
                let slot = if *val > 0.5 {
                    0
                } else if *val < -0.5 {
                    1
                } else {
                    2
                };
                split[slot].push(v);
            }
            Ok(split)
        }
        _ => Err(Error::Config("principal splitting needs a chain flow".into())),
    }
}

/// Pushforward of a tangent vector under a chain flow, with the closed-form
/// scaling laws checked on the principal decomposition of the input.
#[derive(Debug, Clone, Serialize)]
pub struct Pushforward {
    pub map: String,
    pub t: f64,
    /// `cos t X + sin t P X`.
    pub image: Vec<f64>,
    /// Norms of the components of `X` on the curvature `-1`, `+1`, and
    /// kernel principal spaces.
    pub part_norms: [f64; 3],
    /// `cos t + sin t`, `cos t - sin t`, `1`.
    pub factors: [f64; 3],
    /// Worst deviation from the scaling laws: vector residual on the two
    /// curved spaces, norm residual on the kernel.
    pub scaling_residual: f64,
    /// `|X - (X_{-1} + X_{+1} + X_0)|`.
    pub decomposition_residual: f64,
    /// Component of the image outside the target tangent space at the image
    /// point.
    pub target_tangency: f64,
}

pub fn pushforward(
    sys: &CliffordSystem,
    map: &FocalMap,
    x: &[f64],
    xv: &[f64],
) -> Result<Pushforward> {
    let op = map
        .op_index()
        .ok_or_else(|| Error::Config("pushforward factorization needs a chain flow".into()))?;
    let res = residual(sys, map.source, x);
    if res > tol::MAP_TARGET_RESIDUAL {
        return Err(Error::NotOnSource { residual: res });
    }
    let (tangent, _) = frames(sys, map.source, x)?;
    let split = principal_split(sys, map, x, &tangent)?;
    let (s, c) = map.angle.sin_cos();
    let factors = [c + s, c - s, 1.0];

    let push = |v: &[f64]| -> Vec<f64> {
        let mut out = linalg::scaled(v, c);
        linalg::axpy(&mut out, s, &sys.apply_p(op, v));
        out
    };

    let mut parts: [Vec<f64>; 3] =
        [vec![0.0; x.len()], vec![0.0; x.len()], vec![0.0; x.len()]];
    for (slot, basis) in split.iter().enumerate() {
        for b in basis {
            let coef = linalg::dot(xv, b);
            linalg::axpy(&mut parts[slot], coef, b);
        }
    }
    let mut recombined = parts[0].clone();
    linalg::axpy(&mut recombined, 1.0, &parts[1]);
    linalg::axpy(&mut recombined, 1.0, &parts[2]);
    let decomposition_residual = linalg::norm(&linalg::sub(xv, &recombined));

    let mut scaling_residual: f64 = 0.0;
    for slot in 0..2 {
        let expected = linalg::scaled(&parts[slot], factors[slot]);
        let got = push(&parts[slot]);
        scaling_residual = scaling_residual.max(linalg::norm(&linalg::sub(&got, &expected)));
    }
    let kernel_image = push(&parts[2]);
    scaling_residual =
        scaling_residual.max((linalg::norm(&kernel_image) - linalg::norm(&parts[2])).abs());

    let image = push(xv);
    let image_point = apply(sys, map, x)?;
    let (ttan, _) = frames(sys, map.target, &image_point)?;
    let mut residual_vec = image.clone();
    for e in &ttan {
        let coef = linalg::dot(&residual_vec, e);
        linalg::axpy(&mut residual_vec, -coef, e);
    }
    let target_tangency = linalg::norm(&residual_vec);

    Ok(Pushforward {
        map: map.label(),
        t: map.angle,
        image,
        part_norms: [
            linalg::norm(&parts[0]),
            linalg::norm(&parts[1]),
            linalg::norm(&parts[2]),
        ],
        factors,
        scaling_residual,
        decomposition_residual,
        target_tangency,
    })
}

/// `(cos 2t)^{l-i-2}`: the factor by which the chain flow at angle `t`
/// contracts the volume element of the minimal hypersurface `M_{i+1}`.
pub fn volume_element_factor(sys: &CliffordSystem, i: usize, t: f64) -> Result<f64> {
    if i + 1 > sys.m {
        return Err(Error::Config(format!(
            "volume factor needs a chain index with i+1 <= {}, got {i}",
            sys.m
        )));
    }
    if t.abs() >= QUARTER {
        return Err(Error::FocalAngle { t });
    }
    Ok((2.0 * t).cos().powi((sys.l - i - 2) as i32))
}

/// Ratio of the weighted to unweighted integrals of the volume factor,
/// `K/G` with `K = int (cos 2t)^{l-i-2} / (cos t + sin t)^2 dt`.  The
/// integrand is regularised by `(cos 2t)^2 = (1 - sin 2t)(1 + sin 2t)`,
/// which removes the endpoint 0/0; the closed value is
/// `(l-i-2)/(l-i-3)`.
pub fn kg_ratio(sys: &CliffordSystem, i: usize) -> Result<f64> {
    if i + 1 > sys.m {
        return Err(Error::Config(format!(
            "K/G needs a chain index with i+1 <= {}, got {i}",
            sys.m
        )));
    }
    let p = sys.l as i32 - i as i32 - 2;
    if p - 1 <= 0 {
        return Err(Error::Config(format!(
            "K/G ratio is defined only for l-i-3 > 0; got l={}, i={i}",
            sys.l
        )));
    }
    let k1 = linalg::simpson_adaptive(
        &|t: f64| (2.0 * t).cos().powi(p - 2) * (1.0 - (2.0 * t).sin()),
        -QUARTER,
        QUARTER,
        tol::QUADRATURE,
    );
    let g = linalg::simpson_adaptive(
        &|t: f64| (2.0 * t).cos().powi(p),
        -QUARTER,
        QUARTER,
        tol::QUADRATURE,
    );
    Ok(k1 / g)
}

/// Fiber geometry of a quarter-turn map over a point of its focal target:
/// dimension, roundness of the sphere model, and total geodesy of the
/// explicit fiber curves.
#[derive(Debug, Clone, Serialize)]
pub struct FiberReport {
    pub map: String,
    pub fiber_dim: usize,
    pub samples: usize,
    /// Worst membership residual of fiber points in the source manifold.
    pub max_source_residual: f64,
    /// Worst distance from `apply(fiber point)` to the base point.
    pub max_map_defect: f64,
    /// Worst deviation of pairwise centred inner products from the round
    /// sphere of radius `1/sqrt(2)`.
    pub max_model_residual: f64,
    /// Worst tangential component of the spherical acceleration of the
    /// fiber curves.
    pub max_tangential_acceleration: f64,
    /// Worst deviation of the spherical acceleration from half the unit
    /// normal at the curve point.
    pub max_normal_identity_residual: f64,
}

/// Orthonormal basis of the linear space whose unit sphere parametrises the
/// fiber over `y`: `x = (y + z)/sqrt(2)`.
fn fiber_space(sys: &CliffordSystem, map: &FocalMap, y: &[f64]) -> Result<Vec<Vec<f64>>> {
    match (&map.kind, map.op_index()) {
        (FocalMapKind::PhiQuarter { i, sign }, Some(op)) => {
            let mut coeff = vec![0.0; sys.m + 1];
            coeff[op] = 1.0;
            let opposite = match sign {
                SignTag::Plus => crate::clifford_core::Sign::Minus,
                SignTag::Minus => crate::clifford_core::Sign::Plus,
            };
            let big = sys.eigenspace_basis(&coeff, opposite)?;
            let mut cut: Vec<Vec<f64>> = (0..=*i).map(|a| sys.apply_p(a, y)).collect();
            cut.extend(big);
            let all = linalg::orthonormalize(&cut, tol::RANK_CUTOFF);
            if all.len() != sys.l {
                return Err(Error::RankDeficiency {
                    manifold: map.target.label(),
                    expected: sys.l,
                    got: all.len(),
                });
            }
            Ok(all[(i + 1)..].to_vec())
        }
        (FocalMapKind::PsiQuarter { i, .. }, Some(_)) => {
            Ok((0..*i).map(|a| sys.apply_p(a, y)).collect())
        }
        _ => Err(Error::Config("fiber geometry is defined for quarter-turn maps".into())),
    }
}

pub fn fiber_check(
    sys: &CliffordSystem,
    map: &FocalMap,
    y: &[f64],
    count: usize,
    seed: u64,
) -> Result<FiberReport> {
    let res = residual(sys, map.target, y);
    if res > tol::MAP_TARGET_RESIDUAL {
        return Err(Error::NotOnFocalManifold { residual: res });
    }
    let space = fiber_space(sys, map, y)?;
    let fiber_dim = space.len() - 1;
    let inv_sqrt2 = 0.5f64.sqrt();

    let mut rng = linalg::rng_for(seed, 0);
    let draw_unit = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let raw = linalg::gaussian_vec(rng, space.len());
        let mut z = vec![0.0; y.len()];
        for (c, b) in raw.iter().zip(&space) {
            linalg::axpy(&mut z, *c, b);
        }
        linalg::normalize(&mut z);
        z
    };

    let mut points = Vec::with_capacity(count);
    let mut zs = Vec::with_capacity(count);
    let mut max_source_residual: f64 = 0.0;
    let mut max_map_defect: f64 = 0.0;
    for _ in 0..count {
        let z = draw_unit(&mut rng);
        let mut x = linalg::add_scaled(y, 1.0, &z);
        for v in x.iter_mut() {
            *v *= inv_sqrt2;
        }
        max_source_residual = max_source_residual.max(residual(sys, map.source, &x));
        let back = apply(sys, map, &x)?;
        max_map_defect = max_map_defect.max(linalg::norm(&linalg::sub(&back, y)));
        points.push(x);
        zs.push(z);
    }

    let center = linalg::scaled(y, inv_sqrt2);
    let mut max_model_residual: f64 = 0.0;
    for (xj, zj) in points.iter().zip(&zs) {
        for (xk, zk) in points.iter().zip(&zs) {
            let dj = linalg::sub(xj, &center);
            let dk = linalg::sub(xk, &center);
            let got = linalg::dot(&dj, &dk);
            let model = 0.5 * linalg::dot(zj, zk);
            max_model_residual = max_model_residual.max((got - model).abs());
        }
    }

    let op = map.op_index().expect("fiber_space already checked the kind");
    let mut max_tan_acc: f64 = 0.0;
    let mut max_normal_id: f64 = 0.0;
    for _ in 0..count {
        let z = draw_unit(&mut rng);
        let mut v = draw_unit(&mut rng);
        let zc = linalg::dot(&v, &z);
        linalg::axpy(&mut v, -zc, &z);
        if linalg::norm(&v) < 1e-8 {
            continue;
        }
        linalg::normalize(&mut v);
        for sstep in 0..5 {
            let s = -0.9 + 0.45 * sstep as f64;
            let (ss, cs) = s.sin_cos();
            let mut cpt = linalg::add_scaled(y, cs, &z);
            linalg::axpy(&mut cpt, ss, &v);
            for w in cpt.iter_mut() {
                *w *= inv_sqrt2;
            }
            // spherical acceleration of the curve:
            // (y - cos s z - sin s v) / (2 sqrt 2)
            let mut acc = linalg::add_scaled(y, -cs, &z);
            linalg::axpy(&mut acc, -ss, &v);
            for w in acc.iter_mut() {
                *w *= inv_sqrt2 * 0.5;
            }
            let pn = sys.apply_p(op, &cpt);
            let sign = map.angle.signum();
            let identity = linalg::sub(&acc, &linalg::scaled(&pn, sign * 0.5));
            max_normal_id = max_normal_id.max(linalg::norm(&identity));
            let (tangent, _) = frames(sys, map.source, &cpt)?;
            let mut tan = vec![0.0; cpt.len()];
            for e in &tangent {
                linalg::axpy(&mut tan, linalg::dot(&acc, e), e);
            }
            max_tan_acc = max_tan_acc.max(linalg::norm(&tan));
        }
    }

    Ok(FiberReport {
        map: map.label(),
        fiber_dim,
        samples: count,
        max_source_residual,
        max_map_defect,
        max_model_residual,
        max_tangential_acceleration: max_tan_acc,
        max_normal_identity_residual: max_normal_id,
    })
}

/// Componentwise Laplace identity `lap f = -dim(source) f` for the ambient
/// components of a linear map kind, plus exactness of the unit-sphere
/// image norm.
#[derive(Debug, Clone, Serialize)]
pub struct EigenmapReport {
    pub map: String,
    pub eigenvalue: f64,
    pub samples: usize,
    pub max_rel_residual: f64,
    pub max_image_norm_defect: f64,
}

pub fn eigenmap_check(
    sys: &CliffordSystem,
    map: &FocalMap,
    samples: usize,
    seed: u64,
) -> Result<EigenmapReport> {
    if matches!(map.field, NormalField::LevelGradient) {
        return Err(Error::Config(
            "eigenmap identities apply to the linear map kinds".into(),
        ));
    }
    let lambda = map.source.dim(sys) as f64;
    let pts = sample(sys, map.source, samples, seed)?;
    let n = sys.dim_ambient();
    let (s, c) = map.angle.sin_cos();
    let mut max_rel: f64 = 0.0;
    let mut max_norm_defect: f64 = 0.0;
    for p in &pts {
        let h_amb = mean_curvature_amb(sys, map.source, &p.coords, &p.tangent)?;
        let image = apply(sys, map, &p.coords)?;
        max_norm_defect = max_norm_defect.max((linalg::norm(&image) - 1.0).abs());
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let mut a = sys_normal_column(sys, map, &e)?;
            for (av, ev) in a.iter_mut().zip(&e) {
                *av = c * ev + s * *av;
            }
            let lf = LinearForm { a };
            let lap = intrinsic_laplacian(&lf, &p.coords, &p.tangent, &h_amb);
            let value = lf.eval(&p.coords);
            let rel = (lap + lambda * value).abs() / (1.0f64).max((lambda * value).abs());
            max_rel = max_rel.max(rel);
        }
    }
    Ok(EigenmapReport {
        map: map.label(),
        eigenvalue: lambda,
        samples: pts.len(),
        max_rel_residual: max_rel,
        max_image_norm_defect: max_norm_defect,
    })
}

/// `P e_j` for the map's driving matrix; the ambient components of the map
/// are `<cos t e_j + sin t P e_j, x>`.
fn sys_normal_column(sys: &CliffordSystem, map: &FocalMap, e: &[f64]) -> Result<Vec<f64>> {
    match &map.field {
        NormalField::Op(a) => Ok(sys.apply_p(*a, e)),
        NormalField::Combo(c) => Ok(sys.apply_combo(c, e)),
        NormalField::Extension => {
            let p = sys.extension_op().ok_or(Error::ExtensionUnavailable)?;
            Ok(p.apply_vec(e))
        }
        NormalField::LevelGradient => {
            Err(Error::Config("no linear column for the tube projections".into()))
        }
    }
}

/// Normality of the tension field: the componentwise intrinsic Laplacian of
/// the composed ambient map, projected onto the target tangent space at the
/// image point.
#[derive(Debug, Clone, Serialize)]
pub struct TensionReport {
    pub map: String,
    pub samples: usize,
    /// Worst tangential component of the tension field at the image.
    pub max_tangential: f64,
    /// Worst membership residual of image points in the target.
    pub max_target_residual: f64,
    /// Scale of the tension field itself, for context.
    pub max_tension_norm: f64,
}

pub fn tension_normality(
    sys: &CliffordSystem,
    map: &FocalMap,
    samples: usize,
    seed: u64,
) -> Result<TensionReport> {
    let pts = sample(sys, map.source, samples, seed)?;
    let n = sys.dim_ambient();
    let (s, c) = map.angle.sin_cos();
    let mut max_tangential: f64 = 0.0;
    let mut max_target_residual: f64 = 0.0;
    let mut max_tension: f64 = 0.0;
    for p in &pts {
        let tension: Vec<f64> = if matches!(map.field, NormalField::LevelGradient) {
            let t = match map.source {
                ManifoldId::Hypersurface { t } => t,
                _ => unreachable!("tube projections start on a tube"),
            };
            let shape = hypersurface_shape(sys, t, &p.coords)?;
            let h_amb = mean_curvature_amb(sys, map.source, &p.coords, &shape.tangent)?;
            let lap_xi = xi_laplacian(sys, &p.coords, &shape, &h_amb);
            let mut out = linalg::scaled(&h_amb, c);
            linalg::axpy(&mut out, s, &lap_xi);
            out
        } else {
            let h_amb = mean_curvature_amb(sys, map.source, &p.coords, &p.tangent)?;
            let mut out = vec![0.0; n];
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let mut a = sys_normal_column(sys, map, &e)?;
                for (av, ev) in a.iter_mut().zip(&e) {
                    *av = c * ev + s * *av;
                }
                let lf = LinearForm { a };
                out[j] = intrinsic_laplacian(&lf, &p.coords, &p.tangent, &h_amb);
            }
            out
        };
        max_tension = max_tension.max(linalg::norm(&tension));
        let image = apply(sys, map, &p.coords)?;
        max_target_residual = max_target_residual.max(residual(sys, map.target, &image));
        let (ttan, _) = frames(sys, map.target, &image)?;
        let mut tan = vec![0.0; n];
        for e in &ttan {
            linalg::axpy(&mut tan, linalg::dot(&tension, e), e);
        }
        max_tangential = max_tangential.max(linalg::norm(&tan));
    }
    Ok(TensionReport {
        map: map.label(),
        samples: pts.len(),
        max_tangential,
        max_target_residual,
        max_tension_norm: max_tension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford_core::Variant;

    fn sys22() -> CliffordSystem {
        CliffordSystem::build(2, 2, Variant::Standard).unwrap()
    }

    fn sys42() -> CliffordSystem {
        CliffordSystem::build(4, 2, Variant::QuaternionOpposite).unwrap()
    }

    fn canonical_coeffs(sys: &CliffordSystem) -> Vec<f64> {
        let mut c = vec![0.0; sys.m + 1];
        c[0] = 1.0;
        c
    }

    fn all_maps(sys: &CliffordSystem) -> Vec<FocalMap> {
        let mut maps = Vec::new();
        for i in 0..sys.m {
            maps.push(FocalMap::new(sys, FocalMapKind::PhiT { i, t: 0.31 }).unwrap());
            maps.push(FocalMap::new(sys, FocalMapKind::PhiT { i, t: -0.22 }).unwrap());
            for sign in [SignTag::Plus, SignTag::Minus] {
                maps.push(FocalMap::new(sys, FocalMapKind::PhiQuarter { i, sign }).unwrap());
            }
        }
        for i in 2..=sys.m {
            maps.push(FocalMap::new(sys, FocalMapKind::PsiT { i, t: 0.27 }).unwrap());
            for sign in [SignTag::Plus, SignTag::Minus] {
                maps.push(FocalMap::new(sys, FocalMapKind::PsiQuarter { i, sign }).unwrap());
            }
        }
        let coeffs = canonical_coeffs(sys);
        maps.push(FocalMap::new(sys, FocalMapKind::PlusToMinus { coeffs: coeffs.clone() }).unwrap());
        maps.push(
            FocalMap::new(sys, FocalMapKind::PlusToHypersurface { coeffs, t: 0.3 }).unwrap(),
        );
        if sys.extension_op().is_some() {
            maps.push(FocalMap::new(sys, FocalMapKind::MinusToPlus).unwrap());
            maps.push(FocalMap::new(sys, FocalMapKind::MinusToHypersurface { s: 0.2 }).unwrap());
        }
        maps.push(FocalMap::new(sys, FocalMapKind::HypersurfaceToPlus { t: 0.3 }).unwrap());
        maps.push(FocalMap::new(sys, FocalMapKind::HypersurfaceToMinus { t: 0.3 }).unwrap());
        maps
    }

    #[test]
    fn maps_land_on_their_targets() {
        for sys in [sys22(), sys42()] {
            for map in all_maps(&sys) {
                let pts = sample(&sys, map.source, 12, 29).unwrap();
                for p in &pts {
                    let image = apply(&sys, &map, &p.coords).unwrap();
                    let res = residual(&sys, map.target, &image);
                    assert!(
                        res <= tol::MAP_TARGET_RESIDUAL,
                        "{} residual {res:.3e}",
                        map.label()
                    );
                }
            }
        }
    }

    #[test]
    fn chain_flow_hits_every_level_on_a_grid() {
        let sys = sys22();
        let pts = sample(&sys, ManifoldId::M(1), 4, 31).unwrap();
        for step in 0..64 {
            let t = -0.74 + 1.48 * (step as f64) / 63.0;
            let map = FocalMap::new(&sys, FocalMapKind::PhiT { i: 0, t }).unwrap();
            for p in &pts {
                let image = apply(&sys, &map, &p.coords).unwrap();
                let f = linalg::dot(&sys.apply_p(1, &image), &image);
                assert!((f - (2.0 * t).sin()).abs() < 1e-10, "t={t}");
                assert!(residual(&sys, map.target, &image) < 1e-10);
            }
        }
    }

    #[test]
    fn extension_gated_kinds_require_an_extension() {
        let same = CliffordSystem::build(4, 2, Variant::QuaternionSame).unwrap();
        assert!(matches!(
            FocalMap::new(&same, FocalMapKind::MinusToPlus),
            Err(Error::ExtensionUnavailable)
        ));
        let odd = CliffordSystem::build(1, 3, Variant::Standard).unwrap();
        assert!(matches!(
            FocalMap::new(&odd, FocalMapKind::MinusToHypersurface { s: 0.2 }),
            Err(Error::ExtensionUnavailable)
        ));
        assert!(sys22().extension_op().is_some());
        assert!(sys42().extension_op().is_some());
    }

    #[test]
    fn pushforward_scaling_laws_hold() {
        use rand::Rng;
        for sys in [sys22(), sys42()] {
            let mut kinds = vec![
                FocalMapKind::PhiT { i: 0, t: 0.31 },
                FocalMapKind::PhiT { i: sys.m - 1, t: -0.17 },
                FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus },
                FocalMapKind::PsiQuarter { i: sys.m, sign: SignTag::Minus },
            ];
            if sys.m >= 2 {
                kinds.push(FocalMapKind::PsiT { i: 2, t: 0.23 });
            }
            for kind in kinds {
                let map = FocalMap::new(&sys, kind).unwrap();
                let pts = sample(&sys, map.source, 5, 37).unwrap();
                for (pi, p) in pts.iter().enumerate() {
                    let mut rng = linalg::rng_for(41, pi as u64);
                    let mut xv = vec![0.0; sys.dim_ambient()];
                    for e in &p.tangent {
                        linalg::axpy(&mut xv, rng.gen_range(-1.0..1.0), e);
                    }
                    let push = pushforward(&sys, &map, &p.coords, &xv).unwrap();
                    assert!(
                        push.scaling_residual < tol::PUSHFORWARD,
                        "{}: {push:?}",
                        map.label()
                    );
                    assert!(push.decomposition_residual < 1e-9, "{}", map.label());
                    assert!(push.target_tangency < 1e-9, "{}", map.label());
                    let expected_sq: f64 = push
                        .part_norms
                        .iter()
                        .zip(&push.factors)
                        .map(|(n, f)| (n * f).powi(2))
                        .sum();
                    let got = linalg::dot(&push.image, &push.image);
                    assert!((got - expected_sq).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn volume_factor_matches_the_gram_determinant() {
        for (sys, i) in [(sys22(), 0usize), (sys42(), 2usize)] {
            for t in [-0.3, 0.05, 0.4] {
                let map = FocalMap::new(&sys, FocalMapKind::PhiT { i, t }).unwrap();
                let closed = volume_element_factor(&sys, i, t).unwrap();
                let p = &sample(&sys, map.source, 1, 43).unwrap()[0];
                let d = p.tangent.len();
                let images: Vec<Vec<f64>> = p
                    .tangent
                    .iter()
                    .map(|e| {
                        let mut v = linalg::scaled(e, t.cos());
                        linalg::axpy(&mut v, t.sin(), &sys.apply_p(i + 1, e));
                        v
                    })
                    .collect();
                let mut gram = vec![0.0; d * d];
                for a in 0..d {
                    for b in 0..d {
                        gram[a * d + b] = linalg::dot(&images[a], &images[b]);
                    }
                }
                let vol = linalg::det(gram, d).sqrt();
                assert!(
                    (vol - closed).abs() <= tol::VOLUME_FACTOR_REL * closed.abs(),
                    "i={i} t={t}: {vol} vs {closed}"
                );
            }
        }
        assert!(matches!(
            volume_element_factor(&sys22(), 0, 0.9),
            Err(Error::FocalAngle { .. })
        ));
    }

    #[test]
    fn kg_ratio_matches_the_closed_form() {
        let sys = sys22();
        let got = kg_ratio(&sys, 0).unwrap();
        assert!((got - 2.0).abs() < tol::RATIO_IDENTITY, "{got}");
        assert!(kg_ratio(&sys, 1).is_err());
        let sys = sys42();
        for i in 0..sys.m {
            let p = (sys.l - i - 2) as f64;
            let got = kg_ratio(&sys, i).unwrap();
            assert!((got - p / (p - 1.0)).abs() < tol::RATIO_IDENTITY, "i={i} {got}");
        }
    }

    #[test]
    fn fibers_are_round_and_totally_geodesic() {
        let sys = sys22();
        for (kind, want_dim) in [
            (FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus }, sys.l - 2),
            (FocalMapKind::PhiQuarter { i: 1, sign: SignTag::Minus }, sys.l - 3),
            (FocalMapKind::PsiQuarter { i: 2, sign: SignTag::Plus }, 1usize),
            (FocalMapKind::PsiQuarter { i: 2, sign: SignTag::Minus }, 1usize),
        ] {
            let map = FocalMap::new(&sys, kind).unwrap();
            let y = &sample(&sys, map.target, 1, 47).unwrap()[0];
            let rep = fiber_check(&sys, &map, &y.coords, 6, 53).unwrap();
            assert_eq!(rep.fiber_dim, want_dim, "{}", map.label());
            assert!(rep.max_source_residual < tol::MAP_TARGET_RESIDUAL, "{rep:?}");
            assert!(rep.max_map_defect < tol::FIBER_GEODESY, "{rep:?}");
            assert!(rep.max_model_residual < tol::FIBER_GEODESY, "{rep:?}");
            assert!(rep.max_tangential_acceleration < tol::FIBER_GEODESY, "{rep:?}");
            assert!(rep.max_normal_identity_residual < tol::FIBER_GEODESY, "{rep:?}");
        }
    }

    #[test]
    fn eigenmap_identities_hold_with_the_source_dimension() {
        let sys = sys42();
        let phi = FocalMap::new(&sys, FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus })
            .unwrap();
        let rep = eigenmap_check(&sys, &phi, 6, 59).unwrap();
        assert_eq!(rep.eigenvalue, 13.0);
        assert!(rep.max_rel_residual < tol::EIGENMAP_REL, "{rep:?}");
        assert!(rep.max_image_norm_defect < 1e-12, "{rep:?}");
        let psi = FocalMap::new(&sys, FocalMapKind::PsiQuarter { i: 4, sign: SignTag::Minus })
            .unwrap();
        let rep = eigenmap_check(&sys, &psi, 4, 61).unwrap();
        assert_eq!(rep.eigenvalue, 10.0);
        assert!(rep.max_rel_residual < tol::EIGENMAP_REL, "{rep:?}");

        let sys = sys22();
        let kinds = [
            FocalMapKind::PlusToMinus { coeffs: canonical_coeffs(&sys) },
            FocalMapKind::MinusToPlus,
        ];
        for kind in kinds {
            let map = FocalMap::new(&sys, kind).unwrap();
            let rep = eigenmap_check(&sys, &map, 5, 67).unwrap();
            assert_eq!(rep.eigenvalue, map.source.dim(&sys) as f64);
            assert!(rep.max_rel_residual < tol::EIGENMAP_REL, "{rep:?}");
        }
    }

    #[test]
    fn tension_fields_are_normal_to_their_targets() {
        for sys in [sys22(), sys42()] {
            let coeffs = canonical_coeffs(&sys);
            let mut kinds = vec![
                FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus },
                FocalMapKind::PsiQuarter { i: sys.m, sign: SignTag::Plus },
                FocalMapKind::PlusToMinus { coeffs: coeffs.clone() },
                FocalMapKind::PlusToHypersurface { coeffs, t: 0.3 },
                FocalMapKind::HypersurfaceToPlus { t: 0.3 },
                FocalMapKind::HypersurfaceToMinus { t: 0.3 },
            ];
            if sys.extension_op().is_some() {
                kinds.push(FocalMapKind::MinusToPlus);
                kinds.push(FocalMapKind::MinusToHypersurface { s: 0.2 });
            }
            for kind in kinds {
                let map = FocalMap::new(&sys, kind).unwrap();
                let rep = tension_normality(&sys, &map, 5, 71).unwrap();
                assert!(
                    rep.max_tangential < tol::TENSION_NORMAL,
                    "{}: {rep:?}",
                    map.label()
                );
                assert!(rep.max_target_residual < tol::MAP_TARGET_RESIDUAL, "{rep:?}");
                assert!(rep.max_tension_norm > 1.0, "{}: {rep:?}", map.label());
            }
        }
    }

    #[test]
    fn section_maps_round_trip_to_the_identity() {
        let sys = sys22();
        let t = 0.3;
        let section = FocalMap::new(
            &sys,
            FocalMapKind::PlusToHypersurface { coeffs: canonical_coeffs(&sys), t },
        )
        .unwrap();
        let back = FocalMap::new(&sys, FocalMapKind::HypersurfaceToPlus { t }).unwrap();
        let pts = sample(&sys, ManifoldId::M(sys.m), 10, 73).unwrap();
        for p in &pts {
            let mid = apply(&sys, &section, &p.coords).unwrap();
            let home = apply(&sys, &back, &mid).unwrap();
            assert!(linalg::norm(&linalg::sub(&home, &p.coords)) < 1e-9);
        }
        if sys.extension_op().is_some() {
            let s = 0.2;
            let section =
                FocalMap::new(&sys, FocalMapKind::MinusToHypersurface { s }).unwrap();
            let back = FocalMap::new(
                &sys,
                FocalMapKind::HypersurfaceToMinus { t: QUARTER - s },
            )
            .unwrap();
            let pts = sample(&sys, ManifoldId::N(sys.m), 10, 79).unwrap();
            for p in &pts {
                let mid = apply(&sys, &section, &p.coords).unwrap();
                let home = apply(&sys, &back, &mid).unwrap();
                assert!(linalg::norm(&linalg::sub(&home, &p.coords)) < 1e-9);
            }
        }
    }

    #[test]
    fn quarter_maps_are_not_horizontally_conformal() {
        let sys = sys22();
        let map =
            FocalMap::new(&sys, FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus }).unwrap();
        let pts = sample(&sys, map.source, 10, 83).unwrap();
        for p in &pts {
            let split = principal_split(&sys, &map, &p.coords, &p.tangent).unwrap();
            // horizontal space: everything but the kernel of the pushforward,
            // which at the quarter turn is the curvature +1 space
            let mut horizontals = split[0].clone();
            horizontals.extend(split[2].iter().cloned());
            let mut smin = f64::INFINITY;
            let mut smax: f64 = 0.0;
            for h in &horizontals {
                let push = pushforward(&sys, &map, &p.coords, h).unwrap();
                let s = linalg::norm(&push.image) / linalg::norm(h);
                smin = smin.min(s);
                smax = smax.max(s);
            }
            assert!(smax - smin >= 0.4, "spread {}", smax - smin);
        }
    }

    #[test]
    fn maps_reject_bad_inputs() {
        let sys = sys22();
        let map =
            FocalMap::new(&sys, FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus }).unwrap();
        let off = vec![0.5; sys.dim_ambient()];
        assert!(matches!(apply(&sys, &map, &off), Err(Error::NotOnSource { .. })));
        assert!(matches!(
            fiber_check(&sys, &map, &off, 3, 1),
            Err(Error::NotOnFocalManifold { .. })
        ));
        let plus = FocalMap::new(
            &sys,
            FocalMapKind::PlusToMinus { coeffs: canonical_coeffs(&sys) },
        )
        .unwrap();
        let x = &sample(&sys, ManifoldId::M(sys.m), 1, 3).unwrap()[0];
        assert!(pushforward(&sys, &plus, &x.coords, &x.tangent[0]).is_err());
        assert!(matches!(
            FocalMap::new(&sys, FocalMapKind::PhiT { i: 0, t: QUARTER }),
            Err(Error::FocalAngle { .. })
        ));
        assert!(matches!(
            FocalMap::new(&sys, FocalMapKind::PlusToMinus { coeffs: vec![0.5, 0.5, 0.5] }),
            Err(Error::NotUnitCoefficients { .. })
        ));
        let bad_len = FocalMap::new(&sys, FocalMapKind::PlusToMinus { coeffs: vec![1.0] });
        assert!(bad_len.is_err());
    }
}

//! The quartic form of a Clifford system and its ambient calculus.
//!
//! For a system `P_0, ..., P_m` on `R^{2l}` the quartic is
//!
//! ```text
//! F(x) = |x|^4 - 2 sum_a <P_a x, x>^2
//! ```
//!
//! with gradient `4|x|^2 x - 8 sum_a <P_a x, x> P_a x` and Hessian
//! `4|x|^2 I + 8 x x' - 16 sum_a (P_a x)(P_a x)' - 8 sum_a <P_a x, x> P_a`.
//! Restricted to the unit sphere it satisfies the two defining identities of
//! an isoparametric polynomial of degree four,
//!
//! ```text
//! |grad F|^2 = 16 |x|^6        lap F = 8 (m2 - m1) |x|^2
//! ```
//!
//! with multiplicities `m1 = m`, `m2 = l - m - 1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::clifford_core::CliffordSystem;
use crate::linalg;
use crate::{Error, Result};

pub struct QuarticForm<'a> {
    pub sys: &'a CliffordSystem,
}

impl<'a> QuarticForm<'a> {
    pub fn new(sys: &'a CliffordSystem) -> Self {
        QuarticForm { sys }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2 = linalg::dot(x, x);
        let s: f64 = (0..=self.sys.m)
            .map(|a| {
                let c = self.sys.coeff(a, x);
                c * c
            })
            .sum();
        r2 * r2 - 2.0 * s
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r2 = linalg::dot(x, x);
        let mut g = linalg::scaled(x, 4.0 * r2);
        for a in 0..=self.sys.m {
            let px = self.sys.apply_p(a, x);
            let c = linalg::dot(&px, x);
            linalg::axpy(&mut g, -8.0 * c, &px);
        }
        g
    }

    /// Hessian applied to a direction.
    pub fn hess_apply(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let r2 = linalg::dot(x, x);
        let xv = linalg::dot(x, v);
        let mut h = linalg::scaled(v, 4.0 * r2);
        linalg::axpy(&mut h, 8.0 * xv, x);
        for a in 0..=self.sys.m {
            let px = self.sys.apply_p(a, x);
            let c = linalg::dot(&px, x);
            let pv = self.sys.apply_p(a, v);
            linalg::axpy(&mut h, -16.0 * linalg::dot(&px, v), &px);
            linalg::axpy(&mut h, -8.0 * c, &pv);
        }
        h
    }

    /// `<Hess(x) v, v>`
    pub fn hess_quadratic(&self, x: &[f64], v: &[f64]) -> f64 {
        linalg::dot(&self.hess_apply(x, v), v)
    }

    /// Ambient Laplacian, summed numerically over coordinate directions.
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut tr = 0.0;
        let mut e = vec![0.0; n];
        for i in 0..n {
            e[i] = 1.0;
            tr += self.hess_apply(x, &e)[i];
            e[i] = 0.0;
        }
        tr
    }
}

/// A symmetric-matrix quadratic `q(x) = <S x, x>`, the building block of the
/// restricted functions on the foliation (chain coordinates, eigenfunction
/// candidates).
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    pub n: usize,
    s: Vec<f64>,
}

impl QuadraticForm {
    pub fn from_sym_matrix(n: usize, s: Vec<f64>) -> Self {
        assert_eq!(s.len(), n * n);
        for i in 0..n {
            for j in 0..i {
                debug_assert!((s[i * n + j] - s[j * n + i]).abs() < 1e-15);
            }
        }
        QuadraticForm { n, s }
    }

    /// `q(x) = <P_a x, x>`
    pub fn from_op(sys: &CliffordSystem, alpha: usize) -> Self {
        let m = sys.op(alpha);
        QuadraticForm {
            n: m.n,
            s: m.to_dense(),
        }
    }

    pub fn matrix(&self) -> &[f64] {
        &self.s
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        linalg::dot(&linalg::matvec(&self.s, self.n, x), x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        linalg::scaled(&linalg::matvec(&self.s, self.n, x), 2.0)
    }

    pub fn hess_apply(&self, v: &[f64]) -> Vec<f64> {
        linalg::scaled(&linalg::matvec(&self.s, self.n, v), 2.0)
    }

    pub fn hess_quadratic(&self, v: &[f64]) -> f64 {
        2.0 * linalg::dot(&linalg::matvec(&self.s, self.n, v), v)
    }
}

#[derive(Debug, Serialize)]
pub struct PdeReport {
    pub m1: i64,
    pub m2: i64,
    pub samples: usize,
    pub max_rel_gradient_identity: f64,
    pub max_rel_laplace_identity: f64,
}

/// Checks both defining identities of the quartic at random ambient points
/// with radii in `[0.5, 1.5]`. Degenerate families (`m2 <= 0`) are rejected:
/// their level sets are not a foliation by hypersurfaces.
pub fn verify_munzner_pde(sys: &CliffordSystem, samples: usize, seed: u64) -> Result<PdeReport> {
    let (m1, m2) = sys.multiplicities();
    if m2 <= 0 {
        return Err(Error::DegenerateFoliation { m1, m2 });
    }
    let f = QuarticForm::new(sys);
    let n = sys.dim_ambient();
    let errs: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = linalg::rng_for(seed, idx as u64);
            let mut x = linalg::gaussian_vec(&mut rng, n);
            let r = 0.5 + rng.gen_range(0.0..1.0);
            let nm = linalg::norm(&x);
            for xi in x.iter_mut() {
                *xi *= r / nm;
            }
            let r2 = linalg::dot(&x, &x);
            let g = f.gradient(&x);
            let want_g = 16.0 * r2 * r2 * r2;
            let e_g = (linalg::dot(&g, &g) - want_g).abs() / want_g;
            let lap = f.laplacian(&x);
            let want_l = 8.0 * (m2 - m1) as f64 * r2;
            let scale = 8.0 * ((m2 - m1).abs().max(1)) as f64 * r2;
            let e_l = (lap - want_l).abs() / scale;
            (e_g, e_l)
        })
        .collect();
    let max_rel_gradient_identity = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let max_rel_laplace_identity = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(PdeReport {
        m1,
        m2,
        samples,
        max_rel_gradient_identity,
        max_rel_laplace_identity,
    })
}

use rand::Rng;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford_core::Variant;

    fn fd_gradient(f: &QuarticForm, x: &[f64]) -> Vec<f64> {
        let h = crate::tol::FD_STEP_GRAD;
        let n = x.len();
        let mut g = vec![0.0; n];
        let mut y = x.to_vec();
        for i in 0..n {
            y[i] = x[i] + h;
            let fp = f.eval(&y);
            y[i] = x[i] - h;
            let fm = f.eval(&y);
            y[i] = x[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        g
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sys = CliffordSystem::build(2, 2, Variant::Standard).unwrap();
        let f = QuarticForm::new(&sys);
        let mut rng = linalg::rng_for(23, 0);
        for _ in 0..20 {
            let x = linalg::gaussian_vec(&mut rng, sys.dim_ambient());
            let g = f.gradient(&x);
            let fd = fd_gradient(&f, &x);
            let scale = linalg::norm(&g).max(1.0);
            assert!(linalg::norm(&linalg::sub(&g, &fd)) / scale < crate::tol::FD_GRAD_REL);
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let sys = CliffordSystem::build(1, 3, Variant::Standard).unwrap();
        let f = QuarticForm::new(&sys);
        let mut rng = linalg::rng_for(29, 0);
        let h = crate::tol::FD_STEP_GRAD;
        for _ in 0..10 {
            let x = linalg::gaussian_vec(&mut rng, sys.dim_ambient());
            let v = linalg::normalized(&linalg::gaussian_vec(&mut rng, sys.dim_ambient()));
            let xp = linalg::add_scaled(&x, h, &v);
            let xm = linalg::add_scaled(&x, -h, &v);
            let fd: Vec<f64> = linalg::scaled(
                &linalg::sub(&f.gradient(&xp), &f.gradient(&xm)),
                1.0 / (2.0 * h),
            );
            let hv = f.hess_apply(&x, &v);
            let scale = linalg::norm(&hv).max(1.0);
            assert!(linalg::norm(&linalg::sub(&hv, &fd)) / scale < crate::tol::FD_GRAD_REL);
        }
    }

    #[test]
    fn euler_identities() {
        // degree-4 homogeneity: <grad F, x> = 4 F and Hess(x) x = 3 grad F.
        let sys = CliffordSystem::build(4, 2, Variant::QuaternionOpposite).unwrap();
        let f = QuarticForm::new(&sys);
        let mut rng = linalg::rng_for(31, 0);
        for _ in 0..10 {
            let x = linalg::gaussian_vec(&mut rng, sys.dim_ambient());
            let g = f.gradient(&x);
            let fx = f.eval(&x);
            assert!((linalg::dot(&g, &x) - 4.0 * fx).abs() < 1e-9 * (1.0 + fx.abs()));
            let hx = f.hess_apply(&x, &x);
            let r = linalg::sub(&hx, &linalg::scaled(&g, 3.0));
            assert!(linalg::norm(&r) < 1e-9 * (1.0 + linalg::norm(&g)));
        }
    }

    #[test]
    fn pde_identities_hold() {
        for (m, k, v) in [
            (1, 3, Variant::Standard),
            (2, 2, Variant::Standard),
            (4, 2, Variant::QuaternionSame),
            (4, 2, Variant::QuaternionOpposite),
        ] {
            let sys = CliffordSystem::build(m, k, v).unwrap();
            let rep = verify_munzner_pde(&sys, 200, 37).unwrap();
            assert!(rep.max_rel_gradient_identity < crate::tol::PDE_REL);
            assert!(rep.max_rel_laplace_identity < crate::tol::PDE_REL);
        }
    }

    #[test]
    fn degenerate_multiplicity_is_rejected() {
        // (m, k) = (3, 1) has m2 = 0: fine as a Clifford system, not as a
        // foliation.
        let sys = CliffordSystem::build(3, 1, Variant::Standard).unwrap();
        assert!(matches!(
            verify_munzner_pde(&sys, 10, 0),
            Err(Error::DegenerateFoliation { m1: 3, m2: 0 })
        ));
    }

    #[test]
    fn quartic_is_pinched_by_radius() {
        let sys = CliffordSystem::build(2, 2, Variant::Standard).unwrap();
        let f = QuarticForm::new(&sys);
        let mut rng = linalg::rng_for(41, 0);
        for _ in 0..50 {
            let x = linalg::gaussian_vec(&mut rng, sys.dim_ambient());
            let r4 = linalg::dot(&x, &x).powi(2);
            let v = f.eval(&x);
            assert!(v <= r4 + 1e-12 && v >= -r4 - 1e-12);
        }
    }
}

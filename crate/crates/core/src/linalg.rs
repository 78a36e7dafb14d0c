//! Dense linear algebra on `f64` slices.
//!
//! Everything here operates on problems of size at most a few dozen (ambient
//! dimensions up to 32, frames up to 31 vectors), so simple O(n^3) routines
//! with explicit pivoting are both adequate and easy to audit. Vectors are
//! `&[f64]`, matrices are flat row-major `Vec<f64>` with an explicit side
//! length.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Normalizes in place and returns the original norm (0 leaves `a` untouched).
pub fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
    n
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let mut v = a.to_vec();
    normalize(&mut v);
    v
}

/// Removes from `v` its projection onto each (orthonormal) basis vector.
/// One pass; callers needing full reorthogonalization run it twice.
pub fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        axpy(v, -c, b);
    }
}

/// Distance from `v` to the span of an orthonormal `basis`.
pub fn span_residual(v: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r = v.to_vec();
    project_out(&mut r, basis);
    project_out(&mut r, basis);
    norm(&r)
}

/// Largest deviation of pairwise inner products from the identity.
pub fn frame_defect(basis: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}

/// Modified Gram-Schmidt with a second pass per vector. Vectors whose
/// residual falls below `rank_cutoff` are dropped as dependent.
pub fn orthonormalize(vs: &[Vec<f64>], rank_cutoff: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut r = v.clone();
        project_out(&mut r, &out);
        project_out(&mut r, &out);
        if normalize(&mut r) > rank_cutoff {
            out.push(r);
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of `basis` (assumed
/// orthonormal) inside `R^dim`. Coordinate vectors are admitted greedily by
/// largest residual, which keeps the construction deterministic and well
/// conditioned.
pub fn orthonormal_complement(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let want = dim - basis.len();
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(want);
    while out.len() < want {
        let mut best = (0usize, -1.0f64);
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            project_out(&mut e, &all);
            let r = norm(&e);
            if r > best.1 {
                best = (j, r);
            }
        }
        let mut e = vec![0.0; dim];
        e[best.0] = 1.0;
        project_out(&mut e, &all);
        project_out(&mut e, &all);
        let r = normalize(&mut e);
        assert!(
            r > 0.5_f64.sqrt() * 0.1,
            "complement pivot degenerate: residual {r}"
        );
        all.push(e.clone());
        out.push(e);
    }
    out
}

/// `out = A x` for flat row-major `a` of side `n`.
pub fn matvec(a: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = dot(&a[i * n..(i + 1) * n], x);
    }
    out
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// `a` is consumed as scratch. Panics on exactly singular pivots; callers
/// guard conditioning themselves.
pub fn solve(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Vec<f64> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        assert!(d != 0.0, "singular system in solve()");
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a[col * n + j] * x[j];
        }
        x[col] = s / a[col * n + col];
    }
    x
}

/// Determinant via LU with partial pivoting.
pub fn det(mut a: Vec<f64>, n: usize) -> f64 {
    let mut sign = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            sign = -sign;
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
        }
    }
    let mut p = sign;
    for i in 0..n {
        p *= a[i * n + i];
    }
    p
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues ascending with matching eigenvectors (unit rows of the
/// second component). Converges quadratically; 50 sweeps is far beyond need
/// for n <= 64.
pub fn sym_eigen(a_in: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a_in.len(), n * n);
    let mut a = a_in.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = (0..n)
        .map(|i| a[i * n + i].abs())
        .fold(1.0f64, f64::max);
    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let np = arp - s * (arq + tau * arp);
                    let nq = arq + s * (arp - tau * arq);
                    a[r * n + p] = np;
                    a[p * n + r] = np;
                    a[r * n + q] = nq;
                    a[q * n + r] = nq;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let evecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|r| v[r * n + k]).collect())
        .collect();
    (evals, evecs)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn simpson_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 40)
}

/// Deterministic per-stream RNG: a fixed seed plus a stream index yields
/// independent, reproducible draws regardless of thread scheduling.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalize_drops_dependent() {
        let vs = vec![
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1e-14, 0.0],
            vec![0.0, 1.0, 1.0],
        ];
        let basis = orthonormalize(&vs, 1e-10);
        assert_eq!(basis.len(), 2);
        assert!(frame_defect(&basis) < 1e-14);
    }

    #[test]
    fn complement_completes_frame() {
        let mut rng = rng_for(7, 0);
        let v = normalized(&gaussian_vec(&mut rng, 9));
        let basis = vec![v];
        let comp = orthonormal_complement(&basis, 9);
        assert_eq!(comp.len(), 8);
        let mut full = basis;
        full.extend(comp);
        assert!(frame_defect(&full) < 1e-13);
    }

    #[test]
    fn solve_roundtrip() {
        let mut rng = rng_for(11, 0);
        let n = 8;
        let a = gaussian_vec(&mut rng, n * n);
        let x = gaussian_vec(&mut rng, n);
        let b = matvec(&a, n, &x);
        let got = solve(a, n, b);
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        // A = Q D Q' for a random orthogonal Q built by Gram-Schmidt.
        let n = 10;
        let mut rng = rng_for(13, 0);
        let cols: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(&mut rng, n)).collect();
        let q = orthonormalize(&cols, 1e-10);
        assert_eq!(q.len(), n);
        let d: Vec<f64> = (0..n).map(|i| i as f64 - 3.0).collect();
        let mut a = vec![0.0; n * n];
        for (k, qk) in q.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] += d[k] * qk[i] * qk[j];
                }
            }
        }
        let (evals, evecs) = sym_eigen(&a, n);
        for i in 0..n {
            assert!((evals[i] - (i as f64 - 3.0)).abs() < 1e-12);
            let av = matvec(&a, n, &evecs[i]);
            let res = sub(&av, &scaled(&evecs[i], evals[i]));
            assert!(norm(&res) < 1e-11);
        }
    }

    #[test]
    fn jacobi_handles_multiplicity() {
        // diag(2,2,2,5) conjugated; the triple eigenvalue must come back
        // with an orthonormal eigenbasis.
        let n = 4;
        let mut rng = rng_for(17, 0);
        let cols: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(&mut rng, n)).collect();
        let q = orthonormalize(&cols, 1e-10);
        let d = [2.0, 2.0, 2.0, 5.0];
        let mut a = vec![0.0; n * n];
        for (k, qk) in q.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] += d[k] * qk[i] * qk[j];
                }
            }
        }
        let (evals, evecs) = sym_eigen(&a, n);
        assert!((evals[0] - 2.0).abs() < 1e-12);
        assert!((evals[2] - 2.0).abs() < 1e-12);
        assert!((evals[3] - 5.0).abs() < 1e-12);
        assert!(frame_defect(&evecs) < 1e-12);
    }

    #[test]
    fn simpson_matches_known_integral() {
        // \int_0^{pi/4} cos(2t)^3 dt = 1/3 - sin^3(pi/2)/6 ... compute directly:
        // antiderivative (sin 2t)/2 - (sin^3 2t)/6.
        let f = |t: f64| (2.0 * t).cos().powi(3);
        let got = simpson_adaptive(&f, 0.0, std::f64::consts::FRAC_PI_4, 1e-12);
        let want = 0.5 - 1.0 / 6.0;
        assert!((got - want).abs() < 1e-11);
    }

    #[test]
    fn rng_streams_are_stable() {
        let a: Vec<f64> = gaussian_vec(&mut rng_for(42, 3), 4);
        let b: Vec<f64> = gaussian_vec(&mut rng_for(42, 3), 4);
        let c: Vec<f64> = gaussian_vec(&mut rng_for(42, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

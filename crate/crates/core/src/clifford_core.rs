//! Symmetric Clifford systems with exact integer arithmetic.
//!
//! All base matrices here are signed permutation matrices, so every algebraic
//! invariant of a system (symmetry, orthogonality, anticommutation, traces,
//! the product discriminant) is checked exactly over the integers; floating
//! point enters only when a system acts on sampled vectors.
//!
//! Construction follows the standard doubling pattern for anticommuting
//! skew-symmetric orthogonal matrices:
//!
//! | dim | generators | count |
//! |-----|------------|-------|
//! | 1   | none | 0 |
//! | 2   | `J` | 1 |
//! | 4   | left quaternion units `L_i, L_j, L_k` | 3 |
//! | 8   | `diag(L_e, -L_e)`, swap blocks with right units | 7 |
//! | 16d'| `A ⊗ I_8 ⊗ s`, `I ⊗ B ⊗ t`, `I ⊗ I ⊗ J` | count(d') + 8 |
//!
//! where `s = diag(1,-1)`, `t` is the 2x2 swap, and the 2x2 relations
//! `st = -ts`, `sJ = -Js`, `tJ = -Jt` propagate anticommutation through the
//! tensor recursion. The count realizes the Radon-Hurwitz bound on every
//! power of two.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense integer matrix. Entries of everything stored here stay in
/// {-1, 0, 1}; products are materialized transiently during exact checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub n: usize,
    a: Vec<i32>,
}

impl IntMat {
    pub fn zeros(n: usize) -> Self {
        IntMat { n, a: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[&[i32]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            m.a[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> i32 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i32) {
        self.a[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.a[j * n + i] = self.a[i * n + j];
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let mut p = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.a[i * n + k];
                if v == 0 {
                    continue;
                }
                for j in 0..n {
                    p.a[i * n + j] += v * o.a[k * n + j];
                }
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let mut s = self.clone();
        for (x, y) in s.a.iter_mut().zip(&o.a) {
            *x += y;
        }
        s
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for x in s.a.iter_mut() {
            *x = -*x;
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_skew(&self) -> bool {
        self.transpose() == self.neg()
    }

    pub fn is_sign_matrix(&self) -> bool {
        self.a.iter().all(|&x| (-1..=1).contains(&x))
    }

    pub fn is_orthogonal(&self) -> bool {
        self.transpose().mul(self).is_identity()
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.a[i * self.n + i] as i64).sum()
    }

    pub fn anticommutes(&self, o: &Self) -> bool {
        self.mul(o).add(&o.mul(self)).is_zero()
    }

    /// Kronecker product; index convention `(i_a * o.n + i_b)`.
    pub fn tensor(&self, o: &Self) -> Self {
        let (na, nb) = (self.n, o.n);
        let n = na * nb;
        let mut t = Self::zeros(n);
        for ia in 0..na {
            for ja in 0..na {
                let va = self.a[ia * na + ja];
                if va == 0 {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        t.a[(ia * nb + ib) * n + (ja * nb + jb)] = va * o.a[ib * nb + jb];
                    }
                }
            }
        }
        t
    }

    /// `[[A, B], [C, D]]` from four optional signed blocks of equal size.
    pub fn from_blocks(
        a: Option<(&IntMat, i32)>,
        b: Option<(&IntMat, i32)>,
        c: Option<(&IntMat, i32)>,
        d: Option<(&IntMat, i32)>,
    ) -> Self {
        let half = [&a, &b, &c, &d]
            .iter()
            .find_map(|x| x.as_ref().map(|(m, _)| m.n))
            .expect("at least one block");
        let n = 2 * half;
        let mut m = Self::zeros(n);
        let mut put = |blk: Option<(&IntMat, i32)>, ro: usize, co: usize| {
            if let Some((src, sgn)) = blk {
                assert_eq!(src.n, half);
                for i in 0..half {
                    for j in 0..half {
                        m.a[(ro + i) * n + (co + j)] = sgn * src.at(i, j);
                    }
                }
            }
        };
        put(a, 0, 0);
        put(b, 0, half);
        put(c, half, 0);
        put(d, half, half);
        m
    }

    pub fn to_dense(&self) -> Vec<f64> {
        self.a.iter().map(|&x| x as f64).collect()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                let v = self.a[i * n + j];
                if v != 0 {
                    s += v as f64 * x[j];
                }
            }
            out[i] = s;
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply(x, &mut out);
        out
    }

    pub fn rows_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<i32>> = (0..self.n)
            .map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec())
            .collect();
        serde_json::json!(rows)
    }
}

/// Radon-Hurwitz style dimension: the smallest fiber dimension carrying
/// `m - 1` anticommuting skew-symmetric orthogonal matrices.
pub fn delta(m: usize) -> usize {
    assert!(m >= 1);
    const TABLE: [usize; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    if m <= 8 {
        TABLE[m - 1]
    } else {
        16 * delta(m - 8)
    }
}

fn quat_left(e: usize) -> IntMat {
    match e {
        1 => IntMat::from_rows(&[
            &[0, -1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 0, -1],
            &[0, 0, 1, 0],
        ]),
        2 => IntMat::from_rows(&[
            &[0, 0, -1, 0],
            &[0, 0, 0, 1],
            &[1, 0, 0, 0],
            &[0, -1, 0, 0],
        ]),
        3 => IntMat::from_rows(&[
            &[0, 0, 0, -1],
            &[0, 0, -1, 0],
            &[0, 1, 0, 0],
            &[1, 0, 0, 0],
        ]),
        _ => unreachable!(),
    }
}

fn quat_right(e: usize) -> IntMat {
    match e {
        1 => IntMat::from_rows(&[
            &[0, -1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 0, 1],
            &[0, 0, -1, 0],
        ]),
        2 => IntMat::from_rows(&[
            &[0, 0, -1, 0],
            &[0, 0, 0, -1],
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
        ]),
        3 => IntMat::from_rows(&[
            &[0, 0, 0, -1],
            &[0, 0, 1, 0],
            &[0, -1, 0, 0],
            &[1, 0, 0, 0],
        ]),
        _ => unreachable!(),
    }
}

fn two_by_two(name: char) -> IntMat {
    match name {
        's' => IntMat::from_rows(&[&[1, 0], &[0, -1]]),
        't' => IntMat::from_rows(&[&[0, 1], &[1, 0]]),
        'j' => IntMat::from_rows(&[&[0, -1], &[1, 0]]),
        _ => unreachable!(),
    }
}

/// Maximal known family of mutually anticommuting skew-symmetric orthogonal
/// matrices on `R^d`. Supported for `d` a power of two (where the family
/// realizes the Radon-Hurwitz bound) and for `d = 1`; other dimensions return
/// an empty list, which callers treat as "no candidates".
pub fn skew_chain(d: usize) -> Vec<IntMat> {
    if d == 1 {
        return vec![];
    }
    if d == 2 {
        return vec![two_by_two('j')];
    }
    if d == 4 {
        return vec![quat_left(1), quat_left(2), quat_left(3)];
    }
    if d == 8 {
        let mut out = Vec::with_capacity(7);
        for e in 1..=3 {
            let le = quat_left(e);
            out.push(IntMat::from_blocks(
                Some((&le, 1)),
                None,
                None,
                Some((&le, -1)),
            ));
        }
        let i4 = IntMat::identity(4);
        out.push(IntMat::from_blocks(None, Some((&i4, -1)), Some((&i4, 1)), None));
        for e in 1..=3 {
            let re = quat_right(e);
            out.push(IntMat::from_blocks(
                None,
                Some((&re, 1)),
                Some((&re, 1)),
                None,
            ));
        }
        return out;
    }
    if d % 16 == 0 && d.is_power_of_two() {
        let dp = d / 16;
        let inner = skew_chain(dp);
        let base8 = skew_chain(8);
        let (i_dp, i8) = (IntMat::identity(dp), IntMat::identity(8));
        let (s, t, j) = (two_by_two('s'), two_by_two('t'), two_by_two('j'));
        let mut out = Vec::with_capacity(inner.len() + 8);
        for a in &inner {
            out.push(a.tensor(&i8).tensor(&s));
        }
        for b in &base8 {
            out.push(i_dp.tensor(b).tensor(&t));
        }
        out.push(i_dp.tensor(&i8).tensor(&j));
        return out;
    }
    vec![]
}

/// Anticommuting skew-symmetric orthogonal matrices on `R^dim`.
#[derive(Clone, Debug)]
pub struct SkewGeneratorSet {
    pub dim: usize,
    pub generators: Vec<IntMat>,
}

impl SkewGeneratorSet {
    /// Exact validation of every defining relation.
    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            let ok = g.n == self.dim
                && g.is_sign_matrix()
                && g.is_skew()
                && g.is_orthogonal()
                && g.mul(g) == IntMat::identity(self.dim).neg();
            if !ok {
                return Err(Error::Config(format!("generator {i} fails exact relations")));
            }
            for h in &self.generators[i + 1..] {
                if !g.anticommutes(h) {
                    return Err(Error::Config(format!(
                        "generator pair including {i} fails anticommutation"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The `m - 1` generators used on the minimal fiber `R^{delta(m)}`.
pub fn construct_generators(m: usize) -> SkewGeneratorSet {
    let d = delta(m);
    let chain = skew_chain(d);
    assert!(
        chain.len() >= m - 1,
        "chain on dim {d} too short for m = {m}"
    );
    SkewGeneratorSet {
        dim: d,
        generators: chain[..m - 1].to_vec(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Standard,
    QuaternionSame,
    QuaternionOpposite,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variant::Standard => "standard",
            Variant::QuaternionSame => "q-same",
            Variant::QuaternionOpposite => "q-opposite",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductDiscriminant {
    PlusIdentity,
    MinusIdentity,
    NotScalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if *self == Sign::Plus { "+" } else { "-" })
    }
}

/// A symmetric Clifford system `P_0, ..., P_m` on `R^{2l}`, `l = k delta(m)`.
#[derive(Clone, Debug)]
pub struct CliffordSystem {
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub delta_m: usize,
    pub variant: Variant,
    pub product_discriminant: ProductDiscriminant,
    ops: Vec<IntMat>,
    gens: Vec<IntMat>,
    extension: Option<IntMat>,
}

/// `P_0 (u,v) = (u,-v)`, `P_1 (u,v) = (v,u)`, `P_{1+i} (u,v) = (E_i v, -E_i u)`.
fn assemble_ops(l: usize, gens: &[IntMat]) -> Vec<IntMat> {
    let il = IntMat::identity(l);
    let mut ops = Vec::with_capacity(gens.len() + 2);
    ops.push(IntMat::from_blocks(
        Some((&il, 1)),
        None,
        None,
        Some((&il, -1)),
    ));
    ops.push(IntMat::from_blocks(None, Some((&il, 1)), Some((&il, 1)), None));
    for e in gens {
        ops.push(IntMat::from_blocks(
            None,
            Some((e, 1)),
            Some((e, -1)),
            None,
        ));
    }
    ops
}

impl CliffordSystem {
    pub fn build(m: usize, k: usize, variant: Variant) -> Result<Self> {
        assert!(m >= 1 && k >= 1);
        let delta_m = delta(m);
        let l = k * delta_m;
        let gens: Vec<IntMat> = match variant {
            Variant::Standard => {
                let base = construct_generators(m);
                base.validate()?;
                let ik = IntMat::identity(k);
                base.generators.iter().map(|g| ik.tensor(g)).collect()
            }
            Variant::QuaternionSame | Variant::QuaternionOpposite => {
                if m != 4 || k != 2 {
                    return Err(Error::InvalidVariant { m, k });
                }
                let outer = match variant {
                    Variant::QuaternionSame => IntMat::identity(2),
                    _ => two_by_two('s'),
                };
                (1..=3).map(|e| outer.tensor(&quat_left(e))).collect()
            }
        };
        let ops = assemble_ops(l, &gens);
        let product_discriminant = product_of(&ops);
        let extension = search_extension(l, &gens);
        let sys = CliffordSystem {
            m,
            k,
            l,
            delta_m,
            variant,
            product_discriminant,
            ops,
            gens,
            extension,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Exact verification of every defining relation of the system.
    pub fn validate(&self) -> Result<()> {
        let n = 2 * self.l;
        if self.ops.len() != self.m + 1 {
            return Err(Error::Config("wrong operator count".into()));
        }
        for (a, p) in self.ops.iter().enumerate() {
            let ok = p.n == n
                && p.is_sign_matrix()
                && p.is_symmetric()
                && p.is_orthogonal()
                && p.mul(p).is_identity()
                && p.trace() == 0;
            if !ok {
                return Err(Error::Config(format!("operator {a} fails exact relations")));
            }
            for q in &self.ops[a + 1..] {
                if !p.anticommutes(q) {
                    return Err(Error::Config(format!(
                        "operator pair including {a} fails anticommutation"
                    )));
                }
            }
        }
        if let Some(ext) = &self.extension {
            for (a, p) in self.ops.iter().enumerate() {
                if !ext.anticommutes(p) {
                    return Err(Error::Config(format!("extension fails against operator {a}")));
                }
            }
            if !(ext.is_symmetric() && ext.mul(ext).is_identity()) {
                return Err(Error::Config("extension fails exact relations".into()));
            }
        }
        Ok(())
    }

    pub fn dim_ambient(&self) -> usize {
        2 * self.l
    }

    /// Multiplicity pair of the induced isoparametric family.
    pub fn multiplicities(&self) -> (i64, i64) {
        (self.m as i64, self.l as i64 - self.m as i64 - 1)
    }

    pub fn matrices(&self) -> &[IntMat] {
        &self.ops
    }

    pub fn op(&self, alpha: usize) -> &IntMat {
        &self.ops[alpha]
    }

    pub fn generators(&self) -> &[IntMat] {
        &self.gens
    }

    /// The ambient matrix `P_{m+1}` extending the system, when one exists.
    ///
    /// Candidates are drawn from [`skew_chain`] on the fiber, which is
    /// complete for fiber dimensions that are powers of two; other fiber
    /// dimensions may report a false negative (none occur in the verified
    /// configurations: odd fibers genuinely admit no extension).
    pub fn extension_op(&self) -> Option<&IntMat> {
        self.extension.as_ref()
    }

    pub fn apply_p(&self, alpha: usize, x: &[f64]) -> Vec<f64> {
        self.ops[alpha].apply_vec(x)
    }

    /// `<P_alpha x, x>`
    pub fn coeff(&self, alpha: usize, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.ops[alpha].apply_vec(x), x)
    }

    pub fn coeffs(&self, x: &[f64]) -> Vec<f64> {
        (0..=self.m).map(|a| self.coeff(a, x)).collect()
    }

    /// `sum_a c_a P_a x` over the first `c.len()` operators.
    pub fn apply_combo(&self, c: &[f64], x: &[f64]) -> Vec<f64> {
        assert!(c.len() <= self.ops.len());
        let mut out = vec![0.0; x.len()];
        let mut tmp = vec![0.0; x.len()];
        for (ca, p) in c.iter().zip(&self.ops) {
            if *ca == 0.0 {
                continue;
            }
            p.apply(x, &mut tmp);
            crate::linalg::axpy(&mut out, *ca, &tmp);
        }
        out
    }

    /// Orthonormal basis of the eigenspace `E_sign(sum c_a P_a)` for a unit
    /// coefficient vector. Each basis vector is verified to satisfy
    /// `P v = sign v` within [`crate::tol::EIGENSPACE_RESIDUAL`].
    pub fn eigenspace_basis(&self, c: &[f64], sign: Sign) -> Result<Vec<Vec<f64>>> {
        use crate::linalg;
        assert_eq!(c.len(), self.m + 1);
        let norm = linalg::norm(c);
        if (norm - 1.0).abs() > crate::tol::COEFF_UNIT {
            return Err(Error::NotUnitCoefficients { norm });
        }
        let n = self.dim_ambient();
        let s = sign.as_f64();
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let pe = self.apply_combo(c, &e);
            // column of (I + s P)/2
            cols.push((0..n).map(|i| 0.5 * (e[i] + s * pe[i])).collect());
        }
        let basis = linalg::orthonormalize(&cols, crate::tol::RANK_CUTOFF);
        if basis.len() != self.l {
            return Err(Error::RankDeficiency {
                manifold: format!("E_{sign}(sum c_a P_a)"),
                expected: self.l,
                got: basis.len(),
            });
        }
        let mut worst = 0.0f64;
        for v in &basis {
            let pv = self.apply_combo(c, v);
            let r = linalg::norm(&linalg::sub(&pv, &linalg::scaled(v, s)));
            worst = worst.max(r);
        }
        if worst > crate::tol::EIGENSPACE_RESIDUAL {
            return Err(Error::ProjectionFailure { residual: worst });
        }
        Ok(basis)
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "k": self.k,
            "l": self.l,
            "delta_m": self.delta_m,
            "variant": self.variant.to_string(),
            "product_discriminant": format!("{:?}", self.product_discriminant),
            "extends": self.extension.is_some(),
            "matrices": self.ops.iter().map(|p| p.rows_json()).collect::<Vec<_>>(),
        })
    }
}

/// Classifies `P_0 P_1 ... P_m` exactly.
pub fn product_of(ops: &[IntMat]) -> ProductDiscriminant {
    let mut prod = IntMat::identity(ops[0].n);
    for p in ops {
        prod = prod.mul(p);
    }
    if prod.is_identity() {
        ProductDiscriminant::PlusIdentity
    } else if prod.neg().is_identity() {
        ProductDiscriminant::MinusIdentity
    } else {
        ProductDiscriminant::NotScalar
    }
}

pub fn product_discriminant(sys: &CliffordSystem) -> ProductDiscriminant {
    product_of(sys.matrices())
}

/// First chain element anticommuting with every current generator, if any.
fn search_extension(l: usize, gens: &[IntMat]) -> Option<IntMat> {
    for cand in skew_chain(l) {
        if gens.iter().all(|g| cand.anticommutes(g)) {
            return Some(IntMat::from_blocks(
                None,
                Some((&cand, 1)),
                Some((&cand, -1)),
                None,
            ));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_table_and_periodicity() {
        let want = [1usize, 2, 4, 4, 8, 8, 8, 8, 16, 32];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(delta(i + 1), *w, "delta({})", i + 1);
        }
        for m in 1..=8 {
            assert_eq!(delta(m + 8), 16 * delta(m));
        }
    }

    #[test]
    fn quaternion_matrix_tables() {
        let (li, lj, lk) = (quat_left(1), quat_left(2), quat_left(3));
        let (ri, rj, rk) = (quat_right(1), quat_right(2), quat_right(3));
        // left chain follows the Hamilton table; right composition reverses.
        assert_eq!(li.mul(&lj), lk);
        assert_eq!(ri.mul(&rj), rk.neg());
        // left and right multiplications commute.
        for a in [&li, &lj, &lk] {
            for b in [&ri, &rj, &rk] {
                assert_eq!(a.mul(b), b.mul(a));
            }
        }
    }

    #[test]
    fn chains_satisfy_exact_relations() {
        let counts = [(1, 0), (2, 1), (4, 3), (8, 7), (16, 8), (32, 9), (64, 11), (128, 15)];
        for (d, want) in counts {
            let chain = skew_chain(d);
            assert_eq!(chain.len(), want, "count at dim {d}");
            let set = SkewGeneratorSet {
                dim: d,
                generators: chain,
            };
            set.validate().unwrap();
        }
    }

    #[test]
    fn unsupported_dims_have_no_candidates() {
        for d in [3usize, 5, 6, 12, 24] {
            assert!(skew_chain(d).is_empty());
        }
    }

    #[test]
    fn systems_validate_exactly() {
        let cases = [
            (1, 1, Variant::Standard),
            (1, 3, Variant::Standard),
            (2, 2, Variant::Standard),
            (3, 1, Variant::Standard),
            (4, 2, Variant::QuaternionSame),
            (4, 2, Variant::QuaternionOpposite),
            (5, 1, Variant::Standard),
            (8, 1, Variant::Standard),
            (9, 1, Variant::Standard),
        ];
        for (m, k, v) in cases {
            let sys = CliffordSystem::build(m, k, v).unwrap();
            assert_eq!(sys.l, k * delta(m));
            assert_eq!(sys.matrices().len(), m + 1);
        }
    }

    #[test]
    fn variant_requires_4_2() {
        assert!(matches!(
            CliffordSystem::build(3, 2, Variant::QuaternionSame),
            Err(Error::InvalidVariant { .. })
        ));
    }

    #[test]
    fn discriminants() {
        let same = CliffordSystem::build(4, 2, Variant::QuaternionSame).unwrap();
        assert_ne!(same.product_discriminant, ProductDiscriminant::NotScalar);
        let opp = CliffordSystem::build(4, 2, Variant::QuaternionOpposite).unwrap();
        assert_eq!(opp.product_discriminant, ProductDiscriminant::NotScalar);
        // products with m not divisible by 4 are never scalar: for odd m the
        // product anticommutes with each operator, for m = 2 mod 4 it is skew.
        for (m, k) in [(1, 3), (2, 2), (3, 1), (5, 1), (6, 1)] {
            let sys = CliffordSystem::build(m, k, Variant::Standard).unwrap();
            assert_eq!(sys.product_discriminant, ProductDiscriminant::NotScalar);
        }
        let m4 = CliffordSystem::build(4, 1, Variant::Standard).unwrap();
        assert_ne!(m4.product_discriminant, ProductDiscriminant::NotScalar);
    }

    #[test]
    fn extension_table() {
        let cases = [
            (1, 1, Variant::Standard, false), // fiber R^1 is odd
            (1, 2, Variant::Standard, true),
            (1, 3, Variant::Standard, false), // fiber R^3 is odd
            (2, 2, Variant::Standard, true),
            (2, 4, Variant::Standard, true),
            (3, 1, Variant::Standard, true),
            (4, 2, Variant::QuaternionSame, false), // scalar product obstructs
            (4, 2, Variant::QuaternionOpposite, true),
            (5, 1, Variant::Standard, true),
            (9, 1, Variant::Standard, false), // delta(10) = 32 > 16
        ];
        for (m, k, v, want) in cases {
            let sys = CliffordSystem::build(m, k, v).unwrap();
            assert_eq!(
                sys.extension_op().is_some(),
                want,
                "extension for ({m},{k},{v})"
            );
        }
    }

    #[test]
    fn eigenspace_projector_splits_evenly() {
        use crate::linalg;
        let sys = CliffordSystem::build(2, 2, Variant::Standard).unwrap();
        let mut rng = linalg::rng_for(5, 0);
        for _ in 0..20 {
            let c = linalg::normalized(&linalg::gaussian_vec(&mut rng, sys.m + 1));
            let plus = sys.eigenspace_basis(&c, Sign::Plus).unwrap();
            let minus = sys.eigenspace_basis(&c, Sign::Minus).unwrap();
            assert_eq!(plus.len(), sys.l);
            assert_eq!(minus.len(), sys.l);
            for p in &plus {
                for q in &minus {
                    assert!(linalg::dot(p, q).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigenspace_projector_rejects_non_unit() {
        let sys = CliffordSystem::build(1, 2, Variant::Standard).unwrap();
        let err = sys.eigenspace_basis(&[0.5, 0.5], Sign::Plus);
        assert!(matches!(err, Err(Error::NotUnitCoefficients { .. })));
    }

    #[test]
    fn quaternion_variants_share_fiber_relations_but_differ() {
        let same = CliffordSystem::build(4, 2, Variant::QuaternionSame).unwrap();
        let std = CliffordSystem::build(4, 2, Variant::Standard).unwrap();
        assert_eq!(same.matrices(), std.matrices());
        let opp = CliffordSystem::build(4, 2, Variant::QuaternionOpposite).unwrap();
        assert_ne!(same.matrices(), opp.matrices());
    }
}

//! Minimal quaternion arithmetic for the (m,l) = (4,8) charts.
//!
//! Convention: `Quat([a, b, c, d])` is `a + b i + c j + d k`, matching the
//! coordinate blocks used when `R^4` carries the left-multiplication
//! generators.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat(pub [f64; 4]);

impl Quat {
    pub fn from_slice(s: &[f64]) -> Self {
        Quat([s[0], s[1], s[2], s[3]])
    }

    pub fn conj(self) -> Self {
        let [a, b, c, d] = self.0;
        Quat([a, -b, -c, -d])
    }

    pub fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    pub fn add(self, o: Quat) -> Quat {
        Quat([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }

    pub fn scale(self, s: f64) -> Quat {
        Quat([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn norm_sq(self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Real part of `self * o.conj()`, i.e. the Euclidean inner product.
    pub fn dot(self, o: Quat) -> f64 {
        self.0.iter().zip(&o.0).map(|(x, y)| x * y).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Quat = Quat([0.0, 1.0, 0.0, 0.0]);
    const J: Quat = Quat([0.0, 0.0, 1.0, 0.0]);
    const K: Quat = Quat([0.0, 0.0, 0.0, 1.0]);

    #[test]
    fn hamilton_table() {
        assert_eq!(I.mul(J), K);
        assert_eq!(J.mul(K), I);
        assert_eq!(K.mul(I), J);
        assert_eq!(J.mul(I), K.scale(-1.0));
        assert_eq!(I.mul(I), Quat([-1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn norm_is_multiplicative() {
        let p = Quat([1.0, -2.0, 3.0, 0.5]);
        let q = Quat([0.25, 1.5, -1.0, 2.0]);
        let lhs = p.mul(q).norm_sq();
        let rhs = p.norm_sq() * q.norm_sq();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }
}

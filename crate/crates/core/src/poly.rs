//! Dense complex polynomials, coefficients in ascending order.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub c: Vec<C>,
}

impl Poly {
    pub fn new(c: Vec<C>) -> Self {
        let mut p = Poly { c };
        if p.c.is_empty() {
            p.c.push(C::new(0.0, 0.0));
        }
        p
    }

    pub fn constant(v: C) -> Self {
        Poly { c: vec![v] }
    }

    pub fn x() -> Self {
        Poly::new(vec![C::new(0.0, 0.0), C::new(1.0, 0.0)])
    }

    pub fn from_roots(roots: &[C]) -> Self {
        let mut p = Poly::constant(C::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, C::new(1.0, 0.0)]));
        }
        p
    }

    /// Nominal degree, counting trailing zeros.
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn leading(&self) -> C {
        *self.c.last().unwrap()
    }

    pub fn eval(&self, z: C) -> C {
        self.c.iter().rev().fold(C::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Sum of |c_k||z|^k, the natural size of the terms in `eval`.
    pub fn eval_scale(&self, z: C) -> f64 {
        let r = z.norm();
        self.c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() == 1 {
            return Poly::constant(C::new(0.0, 0.0));
        }
        Poly::new((1..self.c.len()).map(|k| self.c[k] * k as f64).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let get = |p: &Poly, k: usize| p.c.get(k).copied().unwrap_or_default();
        Poly::new((0..n).map(|k| get(self, k) + get(o, k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly::new(self.c.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![C::new(0.0, 0.0); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// p(a z + b) as a polynomial in z.
    pub fn compose_affine(&self, a: C, b: C) -> Poly {
        let lin = Poly::new(vec![b, a]);
        let mut out = Poly::constant(C::new(0.0, 0.0));
        for coef in self.c.iter().rev() {
            out = out.mul(&lin).add(&Poly::constant(*coef));
        }
        out.c.truncate(self.c.len());
        out
    }

    /// Quotient of p(z) / (z - r), dropping the remainder.
    pub fn deflate(&self, r: C) -> Poly {
        let n = self.degree();
        if n == 0 {
            return Poly::constant(C::new(0.0, 0.0));
        }
        let mut q = vec![C::new(0.0, 0.0); n];
        let mut acc = C::new(0.0, 0.0);
        for k in (1..=n).rev() {
            acc = acc * r + self.c[k];
            q[k - 1] = acc;
        }
        Poly::new(q)
    }

    /// Drops leading coefficients with |c| <= tol * max|c|.
    pub fn trimmed(&self, tol: f64) -> Poly {
        let m = self.c.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let mut c = self.c.clone();
        while c.len() > 1 && c.last().unwrap().norm() <= tol * m {
            c.pop();
        }
        Poly::new(c)
    }

    /// Roots by companion-matrix eigenvalues, then Newton polish.
    pub fn roots(&self) -> Vec<C> {
        let n = self.degree();
        if n == 0 {
            return vec![];
        }
        // companion matrix of p(r z) / (lead r^n), roots of size one
        let lead = self.leading();
        let r = (0..n)
            .map(|k| (self.c[k].norm() / lead.norm()).powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-300);
        let mut m = DMatrix::<C>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = C::new(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.c[i] / lead / r.powi((n - i) as i32);
        }
        let schur = nalgebra::linalg::Schur::new(m);
        let eig: Vec<C> = match schur.eigenvalues() {
            Some(v) => v.iter().map(|z| z * r).collect(),
            None => {
                let (_, t) = schur.unpack();
                (0..n).map(|i| t[(i, i)] * r).collect()
            }
        };
        let d = self.derivative();
        eig.into_iter()
            .map(|mut z| {
                for _ in 0..30 {
                    let f = self.eval(z);
                    let fp = d.eval(z);
                    if fp.norm() == 0.0 {
                        break;
                    }
                    let step = f / fp;
                    let cand = z - step;
                    if self.eval(cand).norm() < f.norm() {
                        z = cand;
                    } else {
                        break;
                    }
                }
                z
            })
            .collect()
    }
}

/// Relative coefficient distance after rescaling E by `radius`, so that all
/// coefficients of a polynomial whose roots are of size `radius` are O(1).
pub fn scaled_coeff_distance(p: &Poly, q: &Poly, radius: f64) -> f64 {
    let n = p.c.len().max(q.c.len());
    let r = radius.max(1.0);
    let top = (n - 1) as i32;
    let get = |a: &Poly, k: usize| a.c.get(k).copied().unwrap_or_default();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for k in 0..n {
        let w = r.powi(k as i32 - top);
        num = num.max((get(p, k) - get(q, k)).norm() * w);
        den = den.max(get(q, k).norm() * w);
    }
    num / den
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[C], b: &[C]) -> f64 {
    let d = |x: &[C], y: &[C]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    d(a, b).max(d(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_product() {
        let r = [C::new(1.0, 1.0), C::new(-2.0, 0.0), C::new(0.0, 3.0), C::new(0.25, 0.0)];
        let p = Poly::from_roots(&r);
        assert!(hausdorff(&p.roots(), &r) < 1e-12);
    }

    #[test]
    fn affine_composition() {
        let p = Poly::new(vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(3.0, 0.0)]);
        let q = p.compose_affine(C::new(2.0, 0.0), C::new(-1.0, 0.0));
        for z in [C::new(0.3, 0.2), C::new(-1.0, 2.0)] {
            let want = p.eval(z * 2.0 - 1.0);
            assert!((q.eval(z) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn deflation_removes_a_root() {
        let r = [C::new(1.0, -1.0), C::new(2.0, 0.5), C::new(-0.5, 0.0)];
        let q = Poly::from_roots(&r).deflate(r[0]);
        assert!(hausdorff(&q.roots(), &r[1..]) < 1e-12);
    }

    #[test]
    fn linear_root() {
        let p = Poly::new(vec![C::new(-3.0, 0.0), C::new(1.0, 0.0)]);
        assert!((p.roots()[0] - 3.0).norm() < 1e-15);
    }
}

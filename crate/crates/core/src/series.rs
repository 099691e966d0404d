//! Truncated Taylor series at a fixed point.
//!
//! `c[k]` holds `f^(k)(x0) / k!`. Binary operations truncate to the shorter
//! operand.

use num_complex::Complex64 as C;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub c: Vec<C>,
}

impl Jet {
    pub fn new(c: Vec<C>) -> Self {
        assert!(!c.is_empty(), "empty jet");
        Jet { c }
    }

    pub fn constant(v: C, len: usize) -> Self {
        let mut c = vec![C::new(0.0, 0.0); len];
        c[0] = v;
        Jet { c }
    }

    pub fn zero(len: usize) -> Self {
        Jet { c: vec![C::new(0.0, 0.0); len] }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn value(&self) -> C {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> C {
        self.c[k] * factorial(k)
    }

    pub fn derivative(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet::zero(1);
        }
        Jet {
            c: (1..self.c.len()).map(|k| self.c[k] * k as f64).collect(),
        }
    }

    pub fn truncate(&self, len: usize) -> Jet {
        Jet { c: self.c[..len.min(self.c.len())].to_vec() }
    }

    pub fn scale(&self, s: C) -> Jet {
        Jet { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_const(&self, s: C) -> Jet {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut r = vec![C::new(0.0, 0.0); n];
        r[0] = 1.0 / a0;
        for k in 1..n {
            let mut s = C::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s / a0;
        }
        Jet { c: r }
    }

    pub fn powi(&self, e: i32) -> Jet {
        let n = self.c.len();
        if e == 0 {
            return Jet::constant(C::new(1.0, 0.0), n);
        }
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Jet::constant(C::new(1.0, 0.0), n);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |a, j| a * (n - j) as f64 / (j + 1) as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        Jet { c: (0..n).map(|k| self.c[k] + o.c[k]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        Jet { c: (0..n).map(|k| self.c[k] - o.c[k]).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.c.len().min(o.c.len());
        let mut c = vec![C::new(0.0, 0.0); n];
        for i in 0..n {
            if self.c[i] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { c: self.c.iter().map(|v| -v).collect() }
    }
}

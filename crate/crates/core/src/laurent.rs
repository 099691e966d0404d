//! Truncated Laurent series in a local variable t, with tracked precision.
//!
//! `c[k]` is the coefficient of `t^(lo + k)`; every coefficient up to
//! `t^(lo + c.len() - 1)` is exact, higher ones are unknown.

use num_complex::Complex64 as C;

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub lo: i32,
    pub c: Vec<C>,
}

const ZERO: C = C::new(0.0, 0.0);

impl Laurent {
    pub fn new(lo: i32, c: Vec<C>) -> Self {
        assert!(!c.is_empty(), "empty Laurent series");
        Laurent { lo, c }
    }

    /// Highest power known exactly.
    pub fn hi(&self) -> i32 {
        self.lo + self.c.len() as i32 - 1
    }

    pub fn constant(v: C, hi: i32) -> Self {
        let mut c = vec![ZERO; (hi + 1).max(1) as usize];
        c[0] = v;
        Laurent { lo: 0, c }
    }

    /// Coefficient of t^p (zero below `lo`).
    pub fn coeff(&self, p: i32) -> C {
        assert!(p <= self.hi(), "coefficient t^{p} beyond precision t^{}", self.hi());
        if p < self.lo {
            ZERO
        } else {
            self.c[(p - self.lo) as usize]
        }
    }

    pub fn truncate_to(&self, hi: i32) -> Laurent {
        let n = ((hi - self.lo + 1).max(1) as usize).min(self.c.len());
        Laurent { lo: self.lo, c: self.c[..n].to_vec() }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        let lo = self.lo.min(o.lo);
        let hi = self.hi().min(o.hi());
        let c = (lo..=hi)
            .map(|p| {
                let a = if p >= self.lo { self.c[(p - self.lo) as usize] } else { ZERO };
                let b = if p >= o.lo { o.c[(p - o.lo) as usize] } else { ZERO };
                a + b
            })
            .collect();
        Laurent::new(lo, c)
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.add(&o.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> Laurent {
        Laurent { lo: self.lo, c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add_const(&self, s: C) -> Laurent {
        self.add(&Laurent::constant(s, self.hi().max(0)))
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let lo = self.lo + o.lo;
        let hi = (self.hi() + o.lo).min(o.hi() + self.lo);
        let n = (hi - lo + 1).max(1) as usize;
        let mut c = vec![ZERO; n];
        for (i, a) in self.c.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                c[i + j] += a * b;
            }
        }
        Laurent::new(lo, c)
    }

    pub fn derivative(&self) -> Laurent {
        let c = self.c.iter().enumerate().map(|(k, v)| v * (self.lo + k as i32) as f64).collect();
        Laurent { lo: self.lo - 1, c }
    }

    /// Leading coefficient must be nonzero.
    pub fn recip(&self) -> Laurent {
        let a0 = self.c[0];
        assert!(a0 != ZERO, "reciprocal of a series with zero leading term");
        let n = self.c.len();
        let mut r = vec![ZERO; n];
        r[0] = 1.0 / a0;
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s / a0;
        }
        Laurent { lo: -self.lo, c: r }
    }

    pub fn powi(&self, e: i32) -> Laurent {
        if e == 0 {
            let hi = self.hi() - self.lo;
            return Laurent::constant(C::new(1.0, 0.0), hi.max(0));
        }
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Square root for even `lo`, choosing the branch whose leading
    /// coefficient is the principal root.
    pub fn sqrt(&self) -> Laurent {
        assert!(self.lo % 2 == 0, "odd leading power has no Laurent square root");
        let a0 = self.c[0];
        let n = self.c.len();
        let mut r = vec![ZERO; n];
        r[0] = a0.sqrt();
        for k in 1..n {
            let mut s = self.c[k];
            for j in 1..k {
                s -= r[j] * r[k - j];
            }
            r[k] = s / (2.0 * r[0]);
        }
        Laurent { lo: self.lo / 2, c: r }
    }
}

/// Laurent expansion of wp at 0 through t^hi, from g2 and g3.
pub fn wp_at_zero(g2: C, g3: C, hi: i32) -> Laurent {
    // wp = t^-2 + sum_{k>=2} c_k t^(2k-2)
    let kmax = ((hi + 2) / 2).max(2) as usize;
    let mut ck = vec![ZERO; kmax + 1];
    if kmax >= 2 {
        ck[2] = g2 / 20.0;
    }
    if kmax >= 3 {
        ck[3] = g3 / 28.0;
    }
    for k in 4..=kmax {
        let mut s = ZERO;
        for m in 2..=k - 2 {
            s += ck[m] * ck[k - m];
        }
        ck[k] = s * 3.0 / (((2 * k + 1) * (k - 3)) as f64);
    }
    let n = (hi + 3) as usize;
    let mut c = vec![ZERO; n];
    c[0] = C::new(1.0, 0.0);
    for (k, v) in ck.iter().enumerate().skip(2) {
        let idx = 2 * k;
        if idx < n {
            c[idx] = *v;
        }
    }
    Laurent::new(-2, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_and_recip_roundtrip() {
        let s = Laurent::new(-2, vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.3, -0.1), C::new(0.0, 0.0), C::new(2.0, 0.0)]);
        let r = s.sqrt();
        let back = r.mul(&r);
        for p in -2..=back.hi() {
            assert!((back.coeff(p) - s.coeff(p)).norm() < 1e-14);
        }
        let one = s.mul(&s.recip());
        assert!((one.coeff(0) - 1.0).norm() < 1e-14);
        for p in 1..=one.hi() {
            assert!(one.coeff(p).norm() < 1e-14);
        }
    }

    #[test]
    fn precision_is_tracked() {
        let w = wp_at_zero(C::new(1.0, 0.0), C::new(0.5, 0.0), 10);
        assert_eq!(w.hi(), 10);
        let w3 = w.powi(3);
        assert_eq!(w3.hi(), 10 - 4);
        assert_eq!(w.derivative().hi(), 9);
    }
}

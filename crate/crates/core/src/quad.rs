//! Quadrature for complex-valued integrands of a real parameter.

use crate::error::{Error, Result};
use num_complex::Complex64 as C;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> C>(f: &mut F, a: f64, b: f64) -> (C, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod (7/15) on [a, b]; stops when the summed error
/// estimate is below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: FnMut(f64) -> C>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<C> {
    let mut parts = vec![(a, b, gk15(&mut f, a, b))];
    for _ in 0..2000 {
        let total: C = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap())
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&mut f, lo, mid)));
        parts.push((mid, hi, gk15(&mut f, mid, hi)));
    }
    Err(Error::NoConvergence("adaptive quadrature exceeded subdivision limit".into()))
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Trapezoid rule for a periodic integrand on [0, 1), doubling until two
/// successive estimates agree.
pub fn periodic_trapezoid<F: FnMut(f64) -> C>(mut f: F, tol: f64) -> Result<C> {
    let mut n = 16usize;
    let mut sum: C = (0..n).map(|k| f(k as f64 / n as f64)).sum();
    let mut prev = sum / n as f64;
    while n < 1 << 16 {
        let extra: C = (0..n).map(|k| f((2 * k + 1) as f64 / (2 * n) as f64)).sum();
        sum += extra;
        n *= 2;
        let cur = sum / n as f64;
        if (cur - prev).norm() <= tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence("periodic trapezoid rule did not settle".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let (x1, w1) = gauss_legendre(7);
        let s1: f64 = x1.iter().zip(&w1).map(|(x, w)| w * (x.powi(6) + 1.0)).sum();
        assert!((s1 - (2.0 / 7.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peak() {
        let v = integrate(|t| C::new(1.0 / (1e-4 + t * t), 0.0), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v.re - want).abs() < 1e-8 * want);
    }

    #[test]
    fn trapezoid_periodic() {
        let v = periodic_trapezoid(|t| C::new(1.0 / (2.0 + (2.0 * std::f64::consts::PI * t).cos()), 0.0), 1e-14)
            .unwrap();
        assert!((v.re - 1.0 / 3f64.sqrt()).abs() < 1e-13);
    }
}

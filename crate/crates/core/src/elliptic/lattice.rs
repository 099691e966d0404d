//! Reference backend: lattice sums, used to cross-check the theta backend.

use num_complex::Complex64 as C;
use std::f64::consts::PI;

fn inv_sin2(z: C) -> C {
    if z.im.abs() < 1.0 {
        let s = (z * PI).sin();
        return PI * PI / (s * s);
    }
    // exponential form avoids overflow far from the real axis
    let w = if z.im > 0.0 { z } else { -z };
    let q = (C::new(0.0, 2.0 * PI) * w).exp();
    -4.0 * PI * PI * q / ((1.0 - q) * (1.0 - q))
}

/// wp(z) by summing rows of the lattice in closed form,
/// `pi^2/sin^2(pi(z - n tau)) - pi^2/sin^2(pi n tau)` for |n| <= rows.
pub fn wp(z: C, tau: C, rows: i64) -> C {
    let mut s = inv_sin2(z) - PI * PI / 3.0;
    for n in 1..=rows {
        let nt = tau * n as f64;
        let corr = 2.0 * inv_sin2(nt);
        s += inv_sin2(z - nt) + inv_sin2(z + nt) - corr;
    }
    s
}

/// wp'(z) from the derivative of the row sums.
pub fn wp_prime(z: C, tau: C, rows: i64) -> C {
    let d = |w: C| {
        let (v, sgn) = if w.im >= 0.0 { (w, 1.0) } else { (-w, -1.0) };
        let q = (C::new(0.0, 2.0 * PI) * v).exp();
        let cot = C::new(0.0, 1.0) * (q + 1.0) / (q - 1.0) * sgn;
        -2.0 * PI * cot * inv_sin2(w)
    };
    let mut s = d(z);
    for n in 1..=rows {
        let nt = tau * n as f64;
        s += d(z - nt) + d(z + nt);
    }
    s
}

/// Plain truncated sum `sum' w^-k` over |m|, |n| <= bound.
pub fn eisenstein_sum(tau: C, k: i32, bound: i64) -> C {
    let mut s = C::new(0.0, 0.0);
    for m in -bound..=bound {
        for n in -bound..=bound {
            if m == 0 && n == 0 {
                continue;
            }
            let w = C::new(m as f64, 0.0) + tau * n as f64;
            s += w.powi(-k);
        }
    }
    s
}

/// g3 = 140 sum' w^-6 by brute force.
pub fn g3_brute(tau: C, bound: i64) -> C {
    140.0 * eisenstein_sum(tau, 6, bound)
}

/// e_i = wp(omega_i) from the row sums.
pub fn e_values(tau: C, rows: i64) -> [C; 3] {
    [
        wp(C::new(0.5, 0.0), tau, rows),
        wp(-(tau + 1.0) / 2.0, tau, rows),
        wp(tau / 2.0, tau, rows),
    ]
}

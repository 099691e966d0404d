//! Weierstrass functions for the lattice generated by 1 and tau.
//!
//! Evaluation goes through Jacobi theta series in the nome `p = exp(i pi tau)`
//! after reducing the argument into the period parallelogram centred at 0.
//! Theta convention: `theta1(v) = 2 sum (-1)^n p^((n+1/2)^2) sin((2n+1)v)`,
//! `theta2(v) = 2 sum p^((n+1/2)^2) cos((2n+1)v)`,
//! `theta3(v) = 1 + 2 sum p^(n^2) cos(2nv)`,
//! `theta4(v) = 1 + 2 sum (-1)^n p^(n^2) cos(2nv)`, with `v = pi z`.

pub mod lattice;

use crate::error::{Error, Result};
use crate::series::Jet;
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

const I: C = C::new(0.0, 1.0);
const POLE_EPS: f64 = 1e-8;
const TRUNC_TOL: f64 = 1e-12;
pub const DEFAULT_TRUNC: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct EllipticContext {
    pub tau: C,
    pub nome_p: C,
    /// omega_0 = 0, omega_1 = 1/2, omega_2 = -(tau+1)/2, omega_3 = tau/2.
    pub half_periods: [C; 4],
    pub e_values: [C; 3],
    pub eta1: C,
    /// zeta(tau/2).
    pub eta3: C,
    pub g2: C,
    pub g3: C,
    pub trunc_order: usize,
    #[serde(skip)]
    theta0: [C; 4],
}

#[derive(Clone, Copy, Debug)]
struct Thetas {
    t1: C,
    t1p: C,
    t2: C,
    t3: C,
    t4: C,
}

fn theta_series(tau: C, v: C, order: usize) -> Thetas {
    let mut t1 = C::new(0.0, 0.0);
    let mut t1p = C::new(0.0, 0.0);
    let mut t2 = C::new(0.0, 0.0);
    let mut t3 = C::new(1.0, 0.0);
    let mut t4 = C::new(1.0, 0.0);
    for n in 0..order {
        let h = n as f64 + 0.5;
        let a = I * PI * tau * h * h;
        let w = I * v * (2.0 * h);
        let tp = (a + w).exp();
        let tm = (a - w).exp();
        let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
        t1 += (tp - tm) / I * sgn;
        t1p += (tp + tm) * (2.0 * h) * sgn;
        t2 += tp + tm;
        let mut small = tp.norm() + tm.norm();
        if n >= 1 {
            let nf = n as f64;
            let b = I * PI * tau * nf * nf;
            let w2 = I * v * (2.0 * nf);
            let s = (b + w2).exp() + (b - w2).exp();
            t3 += s;
            t4 += s * sgn;
            small += s.norm();
        }
        let scale = t1.norm() + t2.norm() + t3.norm() + t4.norm() + t1p.norm();
        if n >= 2 && small < 1e-18 * scale {
            break;
        }
    }
    Thetas { t1, t1p, t2, t3, t4 }
}

/// theta_k(v) for k = 1..4 by direct summation, no argument reduction.
pub fn theta(k: usize, v: C, ctx: &EllipticContext) -> C {
    let t = theta_series(ctx.tau, v, ctx.trunc_order);
    match k {
        1 => t.t1,
        2 => t.t2,
        3 => t.t3,
        4 => t.t4,
        _ => panic!("theta index must be 1..4"),
    }
}

struct Reduced {
    z0: C,
    m: i64,
    n: i64,
}

impl EllipticContext {
    pub fn new(tau: C) -> Result<Self> {
        make_context(tau, DEFAULT_TRUNC)
    }

    fn reduce(&self, z: C) -> Reduced {
        let n = (z.im / self.tau.im).round();
        let z1 = z - self.tau * n;
        let m = z1.re.round();
        Reduced { z0: z1 - m, m: m as i64, n: n as i64 }
    }

    fn pole_distance(&self, z0: C) -> f64 {
        let mut d = f64::INFINITY;
        for a in -1..=1 {
            for b in -1..=1 {
                d = d.min((z0 - (a as f64) - self.tau * b as f64).norm());
            }
        }
        d
    }

    fn check_pole(&self, z: C, z0: C) -> Result<()> {
        let d = self.pole_distance(z0);
        if d < POLE_EPS {
            return Err(Error::Pole { z: format!("{z}"), dist: d });
        }
        Ok(())
    }

    fn thetas(&self, z0: C) -> Thetas {
        theta_series(self.tau, z0 * PI, self.trunc_order)
    }

    fn co_wp_reduced(&self, th: &Thetas) -> [C; 3] {
        let [_, a2, a3, a4] = self.theta0;
        [
            PI * a3 * a4 * th.t2 / th.t1,
            PI * a2 * a4 * th.t3 / th.t1,
            PI * a2 * a3 * th.t4 / th.t1,
        ]
    }

    /// The three co-p functions at z: odd, ~1/z at 0, squares equal wp - e_i.
    pub fn co_wp_all(&self, z: C) -> Result<[C; 3]> {
        let r = self.reduce(z);
        self.check_pole(z, r.z0)?;
        let v = self.co_wp_reduced(&self.thetas(r.z0));
        let s = co_wp_signs(r.m, r.n);
        Ok([v[0] * s[0], v[1] * s[1], v[2] * s[2]])
    }

    pub fn co_wp(&self, i: usize, z: C) -> Result<C> {
        assert!((1..=3).contains(&i), "co-p index must be 1..3");
        Ok(self.co_wp_all(z)?[i - 1])
    }

    pub fn wp(&self, z: C) -> Result<C> {
        let p = self.co_wp_all(z)?;
        Ok(self.e_values[0] + p[0] * p[0])
    }

    pub fn wp_prime(&self, z: C) -> Result<C> {
        let p = self.co_wp_all(z)?;
        Ok(-2.0 * p[0] * p[1] * p[2])
    }

    pub fn wp_second(&self, z: C) -> Result<C> {
        let w = self.wp(z)?;
        Ok(6.0 * w * w - self.g2 / 2.0)
    }

    pub fn zeta_w(&self, z: C) -> Result<C> {
        let r = self.reduce(z);
        self.check_pole(z, r.z0)?;
        let th = self.thetas(r.z0);
        let base = 2.0 * self.eta1 * r.z0 + PI * th.t1p / th.t1;
        Ok(base + 2.0 * self.eta1 * r.m as f64 + 2.0 * self.eta3 * r.n as f64)
    }

    fn sigma_shift(&self, r: &Reduced) -> C {
        let (m, n) = (r.m, r.n);
        let sign = if (m + n + m * n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let eta_p = self.eta1 * m as f64 + self.eta3 * n as f64;
        let half = C::new(m as f64 / 2.0, 0.0) + self.tau * (n as f64 / 2.0);
        (2.0 * eta_p * (r.z0 + half)).exp() * sign
    }

    pub fn sigma_w(&self, z: C) -> C {
        let r = self.reduce(z);
        let th = self.thetas(r.z0);
        let s0 = (self.eta1 * r.z0 * r.z0).exp() * th.t1 / (PI * self.theta0[0]);
        s0 * self.sigma_shift(&r)
    }

    /// sigma_i = wp_i * sigma, finite everywhere.
    pub fn co_sigma(&self, i: usize, z: C) -> C {
        assert!((1..=3).contains(&i), "co-sigma index must be 1..3");
        let r = self.reduce(z);
        let th = self.thetas(r.z0);
        let [t1p0, a2, a3, a4] = self.theta0;
        let num = match i {
            1 => a3 * a4 * th.t2,
            2 => a2 * a4 * th.t3,
            _ => a2 * a3 * th.t4,
        };
        let s0 = (self.eta1 * r.z0 * r.z0).exp() * num / t1p0;
        s0 * self.sigma_shift(&r) * co_wp_signs(r.m, r.n)[i - 1]
    }

    /// Taylor jets of the three co-p functions at z, `len` coefficients each.
    pub fn co_wp_jets(&self, z: C, len: usize) -> Result<[Jet; 3]> {
        let v = self.co_wp_all(z)?;
        let mut a = [vec![v[0]], vec![v[1]], vec![v[2]]];
        for k in 0..len.saturating_sub(1) {
            for i in 0..3 {
                let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                let mut s = C::new(0.0, 0.0);
                for q in 0..=k {
                    s += a[j][q] * a[l][k - q];
                }
                let next = -s / (k + 1) as f64;
                a[i].push(next);
            }
        }
        let [a0, a1, a2] = a;
        Ok([Jet::new(a0), Jet::new(a1), Jet::new(a2)])
    }

    /// Taylor jet of wp at z.
    pub fn wp_jet(&self, z: C, len: usize) -> Result<Jet> {
        let p = self.co_wp_jets(z, len)?;
        Ok((&p[0] * &p[0]).add_const(self.e_values[0]))
    }

    /// Jet of wp(z + omega_i) - e_i = co_wp_i(z + omega_i)^2 (i = 1..3), or of
    /// wp(z) itself for i = 0.
    pub fn shifted_wp_jet(&self, i: usize, z: C, len: usize) -> Result<Jet> {
        if i == 0 {
            return self.wp_jet(z, len);
        }
        let p = self.co_wp_jets(z + self.half_periods[i], len)?;
        Ok(&p[i - 1] * &p[i - 1])
    }

    /// Exact x-period integral of wp^k along a lattice translation
    /// `m + n tau`, for k = 0..=kmax. Path independent because wp^k has no
    /// residues.
    pub fn wp_power_periods(&self, m: i64, n: i64, kmax: usize) -> Vec<C> {
        let per = C::new(m as f64, 0.0) + self.tau * n as f64;
        let eta_p = self.eta1 * m as f64 + self.eta3 * n as f64;
        let mut j = vec![per];
        if kmax >= 1 {
            j.push(-2.0 * eta_p);
        }
        for k in 1..kmax {
            let kf = k as f64;
            let prev2 = if k >= 2 { j[k - 2] } else { C::new(0.0, 0.0) };
            let next = ((kf - 0.5) * self.g2 * j[k - 1] + (kf - 1.0) * self.g3 * prev2)
                / (4.0 * kf + 2.0);
            j.push(next);
        }
        j
    }

    /// Distance from z to the nearest half-lattice point.
    pub fn half_lattice_distance(&self, z: C) -> f64 {
        let r = self.reduce(z);
        let mut d = f64::INFINITY;
        for a in -2..=2 {
            for b in -2..=2 {
                d = d.min((r.z0 - (a as f64) / 2.0 - self.tau * (b as f64) / 2.0).norm());
            }
        }
        d
    }
}

fn co_wp_signs(m: i64, n: i64) -> [f64; 3] {
    let pm = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let pn = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    [pn, pm * pn, pm]
}

fn constants(tau: C, order: usize) -> [C; 5] {
    let th = theta_series(tau, C::new(0.0, 0.0), order);
    let (a2, a3, a4) = (th.t2, th.t3, th.t4);
    let mut t1ppp = C::new(0.0, 0.0);
    for n in 0..order {
        let h = n as f64 + 0.5;
        let term = (I * PI * tau * h * h).exp() * (2.0 * h).powi(3);
        let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
        t1ppp -= 2.0 * term * sgn;
        if term.norm() < 1e-300 {
            break;
        }
    }
    [th.t1p, a2, a3, a4, t1ppp]
}

/// Builds the lattice context for periods (1, tau).
pub fn make_context(tau: C, trunc_order: usize) -> Result<EllipticContext> {
    if tau.im <= 0.0 || !tau.im.is_finite() || !tau.re.is_finite() {
        return Err(Error::BadTau(tau.im));
    }
    if trunc_order < 8 {
        return Err(Error::Truncation { order: trunc_order, next: 8, diff: f64::NAN });
    }
    let c = constants(tau, trunc_order);
    let c4 = constants(tau, trunc_order + 4);
    let mut diff: f64 = 0.0;
    for k in 0..5 {
        diff = diff.max((c[k] - c4[k]).norm() / c4[k].norm().max(1e-300));
    }
    if diff > TRUNC_TOL {
        return Err(Error::Truncation { order: trunc_order, next: trunc_order + 4, diff });
    }
    let [t1p, a2, a3, a4, t1ppp] = c;
    let pi2 = PI * PI;
    let e1 = pi2 * (a3.powi(4) + a4.powi(4)) / 3.0;
    let e2 = pi2 * (a2.powi(4) - a4.powi(4)) / 3.0;
    let e3 = -pi2 * (a2.powi(4) + a3.powi(4)) / 3.0;
    let eta1 = -pi2 * t1ppp / (6.0 * t1p);
    let eta3 = eta1 * tau - I * PI;
    Ok(EllipticContext {
        tau,
        nome_p: (I * PI * tau).exp(),
        half_periods: [C::new(0.0, 0.0), C::new(0.5, 0.0), -(tau + 1.0) / 2.0, tau / 2.0],
        e_values: [e1, e2, e3],
        eta1,
        eta3,
        g2: -4.0 * (e1 * e2 + e2 * e3 + e3 * e1),
        g3: 4.0 * e1 * e2 * e3,
        trunc_order,
        theta0: [t1p, a2, a3, a4],
    })
}

/// Context from a nome p with 0 < |p| < 1, using the principal logarithm.
pub fn context_from_nome(p: C) -> Result<EllipticContext> {
    if p.norm() >= 1.0 || p.norm() == 0.0 {
        return Err(Error::Invalid(format!("nome {p} must satisfy 0 < |p| < 1")));
    }
    make_context(p.ln() / (I * PI), DEFAULT_TRUNC)
}

#![allow(dead_code)]
//! Independent reference values shared by the integration tests.

use fingap_core::elliptic::EllipticContext;
use fingap_core::Poly;
use num_complex::Complex64 as C;
use std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// sum_{n>=1} n^k q^(2n) / (1 - q^(2n)), q = exp(i pi tau).
fn lambert(tau: C, k: i32) -> C {
    let q2 = (C::new(0.0, 2.0 * PI) * tau).exp();
    let mut s = C::new(0.0, 0.0);
    let mut qn = q2;
    for n in 1..400 {
        let t = (n as f64).powi(k) * qn / (1.0 - qn);
        s += t;
        if t.norm() < 1e-20 {
            break;
        }
        qn *= q2;
    }
    s
}

pub fn eta1_lambert(tau: C) -> C {
    PI * PI / 6.0 * (1.0 - 24.0 * lambert(tau, 1))
}

pub fn g2_lambert(tau: C) -> C {
    4.0 * PI.powi(4) / 3.0 * (1.0 + 240.0 * lambert(tau, 3))
}

pub fn g3_lambert(tau: C) -> C {
    8.0 * PI.powi(6) / 27.0 * (1.0 - 504.0 * lambert(tau, 5))
}

/// wp by its Fourier expansion in the strip |Im z| < Im tau.
pub fn wp_fourier(z: C, tau: C) -> C {
    let s = (z * PI).sin();
    let mut acc = -PI * PI / 3.0 + PI * PI / (s * s);
    let q2 = (C::new(0.0, 2.0 * PI) * tau).exp();
    let mut qn = q2;
    for n in 1..400 {
        let nf = n as f64;
        let t = 8.0 * PI * PI * nf * qn / (1.0 - qn) * (1.0 - (z * (2.0 * PI * nf)).cos());
        acc += t;
        if t.norm() < 1e-20 && n > 5 {
            break;
        }
        qn *= q2;
    }
    acc
}

pub fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn poly_from_real_desc(desc: &[C]) -> Poly {
    Poly::new(desc.iter().rev().copied().collect())
}

/// Xi for (2,1,0,0): c0, b[0] (wp^2, wp^1) and b[1] (wp(x+1/2)^1), ascending in E.
pub struct XiTable {
    pub c0: Vec<C>,
    pub b: Vec<Vec<Vec<C>>>,
}

pub fn xi_2100(ctx: &EllipticContext) -> XiTable {
    let e1 = ctx.e_values[0];
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    XiTable {
        c0: vec![-27.0 * e1 * e1, -5.0 * e1, one],
        b: vec![
            vec![vec![c(9.0, 0.0), z], vec![-6.0 * e1, c(3.0, 0.0)]],
            vec![vec![4.0 * e1, one]],
            vec![],
            vec![],
        ],
    }
}

pub fn xi_0001(ctx: &EllipticContext) -> XiTable {
    let _ = ctx;
    XiTable {
        c0: vec![c(0.0, 0.0), c(1.0, 0.0)],
        b: vec![vec![], vec![], vec![], vec![vec![c(1.0, 0.0)]]],
    }
}

pub fn q_0001(ctx: &EllipticContext) -> Poly {
    let [e1, e2, e3] = ctx.e_values;
    Poly::from_roots(&[-e1, -e2, -e3])
}

pub fn q_2100(ctx: &EllipticContext) -> Poly {
    let e1 = ctx.e_values[0];
    let g2 = ctx.g2;
    let quartic = poly_from_real_desc(&[
        c(16.0, 0.0),
        -224.0 * e1,
        56.0 * g2 - 144.0 * e1 * e1,
        -(200.0 * g2 * e1 - 5920.0 * e1.powi(3)),
        81.0 * g2 * g2 - 3640.0 * g2 * e1 * e1 + 19216.0 * e1.powi(4),
    ]);
    Poly::new(vec![4.0 * e1, c(1.0, 0.0)]).mul(&quartic).scale(c(1.0 / 16.0, 0.0))
}

pub fn q1_0001(ctx: &EllipticContext) -> Poly {
    Poly::new(vec![-2.0 * ctx.eta1, c(1.0, 0.0)])
}

pub fn q1_2100(ctx: &EllipticContext) -> Poly {
    let e1 = ctx.e_values[0];
    let eta = ctx.eta1;
    Poly::new(vec![
        0.75 * ctx.g2 - 27.0 * e1 * e1 + 4.0 * e1 * eta,
        -(5.0 * e1 + 8.0 * eta),
        c(1.0, 0.0),
    ])
}

/// Largest coefficientwise error, relative to each reference coefficient
/// (absolute against 1 for coefficients whose reference is small).
pub fn table_error(got: &[Vec<C>], want: &[Vec<C>]) -> f64 {
    let mut err: f64 = 0.0;
    for (g, w) in got.iter().zip(want) {
        for k in 0..g.len().max(w.len()) {
            let a = g.get(k).copied().unwrap_or_default();
            let b = w.get(k).copied().unwrap_or_default();
            err = err.max((a - b).norm() / b.norm().max(1.0));
        }
    }
    err
}

/// Relative coefficient error of two polynomials after scaling E by `r`.
pub fn poly_error(p: &Poly, q: &Poly, r: f64) -> f64 {
    fingap_core::poly::scaled_coeff_distance(p, q, r)
}

fn tau_of_nome(p: f64) -> C {
    let t = -p.abs().ln() / PI;
    if p > 0.0 {
        c(0.0, t)
    } else {
        c(1.0, t)
    }
}

/// wp(x) - pi^2/sin^2(pi x) for real x, from the Fourier series with q = p^2.
fn wp_regular(x: f64, p: f64) -> f64 {
    let q = p * p;
    let mut acc = -PI * PI / 3.0;
    let mut qn = q;
    for n in 1..400 {
        let nf = n as f64;
        let t = 8.0 * PI * PI * nf * qn / (1.0 - qn) * (1.0 - (2.0 * PI * nf * x).cos());
        acc += t;
        if t.abs() < 1e-20 && n > 5 {
            break;
        }
        qn *= q;
    }
    acc
}

/// The potential with the real-axis poles at 0 and 1/2 removed, real p.
fn smooth_potential(l: [u32; 4], p: f64, x: f64) -> f64 {
    let s = l.map(|v| (v * (v + 1)) as f64);
    let mut acc = s[0] * wp_regular(x, p) + s[1] * wp_regular(x + 0.5, p);
    // wp off the real axis tends to -pi^2/3 as p -> 0
    let far = |shift: f64| {
        if p == 0.0 {
            -PI * PI / 3.0
        } else {
            let tau = tau_of_nome(p);
            wp_fourier(c(x + shift, 0.0) + tau / 2.0, tau).re
        }
    };
    if s[2] != 0.0 {
        acc += s[2] * far(0.5);
    }
    if s[3] != 0.0 {
        acc += s[3] * far(0.0);
    }
    acc
}

/// Cosine coefficients 0..n of an even 1-periodic function sampled at the
/// midpoints (k + 1/2)/G.
fn cos_coeffs(vals: &[f64], grid: &[f64], n: usize, period: f64) -> Vec<f64> {
    let g = vals.len() as f64;
    (0..n)
        .map(|j| {
            let w = if j == 0 { 1.0 / g } else { 2.0 / g };
            w * vals.iter().zip(grid).map(|(v, x)| v * (2.0 * PI * j as f64 * x / period).cos()).sum::<f64>()
        })
        .collect()
}

fn sorted_real_eigs(m: nalgebra::DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Eigenvalues of Phi^-1 H Phi, Phi = sin^(l0+1)(pi x) cos^(l1+1)(pi x), on
/// even 1-periodic functions, in the basis cos(2 pi k x), k < modes; real p.
/// The operator is -g'' - 2 pi (a cot pi x - b tan pi x) g' + (V + pi^2 (a+b)^2) g
/// with a = l0 + 1, b = l1 + 1 and V the pole-free part of the potential.
pub fn gauge_galerkin_eigenvalues(l: [u32; 4], p: f64, modes: usize) -> Vec<f64> {
    let (a, b) = ((l[0] + 1) as f64, (l[1] + 1) as f64);
    let g = 2 * modes + 64;
    let grid: Vec<f64> = (0..g).map(|k| (k as f64 + 0.5) / g as f64).collect();
    let v: Vec<f64> = grid.iter().map(|&x| smooth_potential(l, p, x) + PI * PI * (a + b).powi(2)).collect();
    let mut m = nalgebra::DMatrix::<f64>::zeros(modes, modes);
    for k in 0..modes {
        let w = 2.0 * PI * k as f64;
        let hg: Vec<f64> = grid
            .iter()
            .zip(&v)
            .map(|(&x, vx)| {
                let drift = a / (PI * x).tan() - b * (PI * x).tan();
                w * w * (w * x).cos() + 2.0 * PI * drift * w * (w * x).sin() + vx * (w * x).cos()
            })
            .collect();
        for (j, cj) in cos_coeffs(&hg, &grid, modes, 1.0).into_iter().enumerate() {
            m[(j, k)] = cj;
        }
    }
    sorted_real_eigs(m)
}

/// Eigenvalues of -f'' + u f on 2-periodic functions for l0 = l1 = 0 and
/// real p, split into the even (cos(pi k x)) and odd (sin(pi k x)) parts.
pub fn fourier_eigenvalues_period2(l: [u32; 4], p: f64, modes: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(l[0] == 0 && l[1] == 0);
    let g = 2 * modes + 64;
    // u is even and 1-periodic; its cosine coefficients in cos(2 pi n x)
    let grid: Vec<f64> = (0..g).map(|k| (k as f64 + 0.5) / g as f64).collect();
    let u: Vec<f64> = grid.iter().map(|&x| smooth_potential(l, p, x)).collect();
    let uc = cos_coeffs(&u, &grid, 2 * modes + 2, 1.0);
    // u cos(pi k x) = U_0 cos(pi k x) + sum_{n>=1} U_n/2 [cos(pi (k+2n) x) + cos(pi (k-2n) x)],
    // likewise for sin with sin(-y) = -sin(y)
    let block = |even: bool| {
        let first = if even { 0 } else { 1 };
        let mut m = nalgebra::DMatrix::<f64>::zeros(modes, modes);
        for kk in 0..modes {
            let k = (kk + first) as i64;
            m[(kk, kk)] += (PI * k as f64).powi(2) + uc[0];
            for (n, &un) in uc.iter().enumerate().skip(1) {
                for t in [k + 2 * n as i64, k - 2 * n as i64] {
                    let j = t.abs() - first as i64;
                    if t == 0 && !even || j < 0 || j >= modes as i64 {
                        continue;
                    }
                    let sign = if !even && t < 0 { -1.0 } else { 1.0 };
                    m[(j as usize, kk)] += sign * un / 2.0;
                }
            }
        }
        sorted_real_eigs(m)
    };
    (block(true), block(false))
}

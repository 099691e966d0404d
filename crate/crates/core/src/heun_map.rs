//! The change of variables w = (e1 - e3)/(wp(x) - e3) taking the eigenvalue
//! equation to the Heun equation, its parameter map in both directions and
//! the monodromy around the cycle enclosing w = 0 and w = 1.

use crate::coupling::CouplingVector;
use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::monodromy::{choose_base, hyperelliptic_integral, hyperelliptic_multiplier, Period};
use crate::poly::Poly;
use crate::spectral_curve::SpectralCurve;
use crate::xi_solver::XiExpansion;
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

const HALF_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeunParams {
    pub alpha: C,
    pub beta: C,
    pub gamma: C,
    pub delta: C,
    pub epsilon: C,
    pub q: C,
    pub t: C,
    /// (e2 - e3)/(e1 - e3).
    pub a: C,
    /// The constant c0 in q = -(E/(e1 - e3) + c0)/(4a).
    pub heun_shift_c0: C,
}

impl HeunParams {
    /// gamma + delta + epsilon - alpha - beta - 1, zero for every valid set.
    pub fn fuchs_defect(&self) -> C {
        self.gamma + self.delta + self.epsilon - self.alpha - self.beta - 1.0
    }
}

pub fn modulus_a(ctx: &EllipticContext) -> C {
    let [e1, e2, e3] = ctx.e_values;
    (e2 - e3) / (e1 - e3)
}

fn shift_c0(raw: [f64; 4], a: C) -> C {
    let s: f64 = raw.iter().map(|l| l * (l + 1.0)).sum();
    (a + 1.0) / 3.0 * s - a * (raw[0] + raw[2] + 2.0).powi(2) - (raw[0] + raw[1] + 2.0).powi(2)
}

/// q as an affine function of E: q = slope E + offset.
fn q_of_e(raw: [f64; 4], ctx: &EllipticContext) -> (C, C) {
    let [e1, _, e3] = ctx.e_values;
    let a = modulus_a(ctx);
    let c0 = shift_c0(raw, a);
    (-1.0 / (4.0 * a * (e1 - e3)), -c0 / (4.0 * a))
}

fn heun_from_raw(raw: [f64; 4], e: C, ctx: &EllipticContext) -> HeunParams {
    let a = modulus_a(ctx);
    let (slope, offset) = q_of_e(raw, ctx);
    let [l0, l1, l2, l3] = raw;
    let r = |v: f64| C::new(v, 0.0);
    HeunParams {
        alpha: r(0.5 * (l0 + l1 + l2 + l3 + 4.0)),
        beta: r(0.5 * (l0 + l1 + l2 - l3 + 3.0)),
        gamma: r(l0 + 1.5),
        delta: r(l1 + 1.5),
        epsilon: r(l2 + 1.5),
        q: slope * e + offset,
        t: 1.0 / a,
        a,
        heun_shift_c0: shift_c0(raw, a),
    }
}

pub fn ino_to_heun(l: &CouplingVector, e: C, ctx: &EllipticContext) -> HeunParams {
    heun_from_raw(l.l.map(f64::from), e, ctx)
}

/// Inverts `ino_to_heun`. The couplings are read off as gamma - 3/2,
/// delta - 3/2, epsilon - 3/2 and alpha - beta - 1/2, then normalized to be
/// nonnegative (l and -l - 1 give the same potential); E is computed from q
/// with the couplings as read.
pub fn heun_to_ino(h: &HeunParams, ctx: &EllipticContext) -> Result<(CouplingVector, C)> {
    if h.fuchs_defect().norm() > HALF_TOL {
        return Err(Error::Invalid(format!("gamma + delta + epsilon != alpha + beta + 1 (defect {})", h.fuchs_defect())));
    }
    let read = |name: &str, v: C| -> Result<i64> {
        let k = v - 1.5;
        if k.im.abs() > HALF_TOL || (k.re - k.re.round()).abs() > HALF_TOL {
            return Err(Error::Invalid(format!("{name} = {v} is not in 1/2 + Z")));
        }
        Ok(k.re.round() as i64)
    };
    let raw = [
        read("gamma", h.gamma)?,
        read("delta", h.delta)?,
        read("epsilon", h.epsilon)?,
        read("alpha - beta", h.alpha - h.beta + 1.0)?,
    ];
    let a = modulus_a(ctx);
    if (h.t * a - 1.0).norm() > 1e-8 {
        return Err(Error::Invalid(format!("t = {} does not match 1/a = {} for this lattice", h.t, 1.0 / a)));
    }
    let (slope, offset) = q_of_e(raw.map(|v| v as f64), ctx);
    let e = (h.q - offset) / slope;
    Ok((CouplingVector::new(raw)?, e))
}

/// Q~ and Q~1 with Q(E) = (4(e3 - e2))^(2g+1) Q~(q(E)) and
/// Q1(E) = (4(e3 - e2))^g Q~1(q(E)).
pub fn scaled_polynomials(l: &CouplingVector, curve: &SpectralCurve, ctx: &EllipticContext) -> (Poly, Poly) {
    let (slope, offset) = q_of_e(l.l.map(f64::from), ctx);
    // E = (q - offset)/slope
    let (m, b) = (1.0 / slope, -offset / slope);
    let k = 4.0 * (ctx.e_values[2] - ctx.e_values[1]);
    let g = curve.genus as i32;
    let qt = curve.q.compose_affine(m, b).scale(k.powi(-(2 * g + 1)));
    let q1t = curve.q1.compose_affine(m, b).scale(k.powi(-g));
    (qt, q1t)
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleMonodromy {
    pub q_star: C,
    pub e_star: C,
    /// (-1)^(l0+l1) B(E*) and its reciprocal.
    pub eigenvalues: [C; 2],
    pub base_q: C,
    pub base_sign: i8,
    /// sqrt(e3 - e2) int_{q0}^{q*} Q~1/sqrt(-Q~) dq, computed in the q-plane.
    pub q_integral: C,
}

/// Eigenvalues of the monodromy along the cycle around w = 0 and w = 1 at
/// the accessory parameter q*. The multiplier comes from the E-plane
/// integral. The q-plane integral is returned alongside for comparison; its
/// exponential reproduces the pair up to order and the base sign.
pub fn cycle_monodromy_eigenvalues(
    q_star: C,
    l: &CouplingVector,
    curve: &SpectralCurve,
    xi: &XiExpansion,
    ctx: &EllipticContext,
) -> Result<CycleMonodromy> {
    let (slope, offset) = q_of_e(l.l.map(f64::from), ctx);
    let e_star = (q_star - offset) / slope;
    let (e0, sign0) = choose_base(curve, xi, ctx, Period::ONE)?;
    let at_base = (e_star - e0).norm() <= 1e-12 * curve.scale();
    if !at_base && curve.is_root(e_star, 1e-7) {
        return Err(Error::AtRoot(format!("q* = {q_star} is a root of Q~; another basis of solutions is needed there")));
    }
    let e_star = if at_base { e0 } else { e_star };
    let h = hyperelliptic_multiplier(e_star, e0, sign0, curve, xi, ctx, Period::ONE)?;
    let b = h.multiplier;
    let branch = if (l.l[0] + l.l[1]) % 2 == 0 { 1.0 } else { -1.0 };
    let q0 = slope * e0 + offset;
    let (qt, q1t) = scaled_polynomials(l, curve, ctx);
    let iq = if at_base {
        C::new(0.0, 0.0)
    } else {
        // the image of the E-path keeps the same clearance from the roots
        let path: Vec<C> = h.path.iter().map(|e| slope * e + offset).collect();
        hyperelliptic_integral(&q1t, &qt, &path, false)?.0
    };
    Ok(CycleMonodromy {
        q_star,
        e_star,
        eigenvalues: [branch * b, branch / b],
        base_q: q0,
        base_sign: sign0,
        q_integral: (ctx.e_values[2] - ctx.e_values[1]).sqrt() * iq,
    })
}

/// w(x) = (e1 - e3)/(wp(x) - e3).
pub fn w_of_x(ctx: &EllipticContext, x: C) -> Result<C> {
    let [e1, _, e3] = ctx.e_values;
    Ok((e1 - e3) / (ctx.wp(x)? - e3))
}

/// Winding numbers about w = 0, 1, 1/a of the image of eps -> eps + 1,
/// summed from argument increments over `n` segments and counted
/// counterclockwise. Im eps < 0 gives (1, 1, 0); the mirror segment at -eps
/// runs the same loop backwards.
pub fn cycle_winding_numbers(ctx: &EllipticContext, eps: C, n: usize) -> Result<[i64; 3]> {
    let centres = [C::new(0.0, 0.0), C::new(1.0, 0.0), 1.0 / modulus_a(ctx)];
    let pts = (0..=n).map(|k| w_of_x(ctx, eps + k as f64 / n as f64)).collect::<Result<Vec<_>>>()?;
    let mut out = [0i64; 3];
    for (o, c) in out.iter_mut().zip(centres) {
        let turn: f64 = pts.windows(2).map(|w| ((w[1] - c) / (w[0] - c)).arg()).sum();
        *o = (turn / (2.0 * PI)).round() as i64;
    }
    Ok(out)
}

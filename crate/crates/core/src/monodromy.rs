//! The multiplier B(E) in Lambda(x + P, E) = B(E) Lambda(x, E) for
//! Lambda = sqrt(Xi) exp(int sqrt(-Q)/Xi dx), computed directly along an
//! x-path and from the hyperelliptic integral of I_P(E)/sqrt(-Q(E)).

use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad;
use crate::spectral_curve::{period_polynomial, SpectralCurve};
use crate::xi_solver::XiExpansion;
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

const ROOT_TOL: f64 = 1e-7;
const XI_CLEAR: f64 = 0.03;
const POLE_CLEAR: f64 = 0.05;
const ROUTE_CLEAR: f64 = 1e-2;
const ROUTE_MIN: f64 = 1e-3;
const MAX_ARG_STEP: f64 = PI / 4.0;
const QUAD_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Hyperelliptic,
}

/// The lattice translation m + n tau.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Period {
    pub m: i64,
    pub n: i64,
}

impl Period {
    pub const ONE: Period = Period { m: 1, n: 0 };
    pub const TAU: Period = Period { m: 0, n: 1 };

    pub fn value(&self, ctx: &EllipticContext) -> C {
        C::new(self.m as f64, 0.0) + ctx.tau * self.n as f64
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyResult {
    pub e_star: C,
    pub multiplier: C,
    /// The branch of sqrt(-Q(E*)) that Lambda was built with.
    pub sqrt_minus_q: C,
    pub base_point: Option<C>,
    pub base_sign: Option<i8>,
    pub period: Period,
    pub method: Method,
    /// Waypoints in the x-plane (direct) or the E-plane (hyperelliptic).
    pub path: Vec<C>,
}

/// Square roots of f(t), t in [0, 1], continued from `r0`. Nodes are placed
/// so that arg f turns by less than pi/4 between neighbours.
fn track_sqrt<F: Fn(f64) -> Result<C>>(f: &F, r0: C) -> Result<(Vec<f64>, Vec<C>)> {
    let mut ts = vec![0.0];
    let mut rs = vec![r0];
    let mut v_prev = f(0.0)?;
    let mut t = 0.0;
    let mut dt: f64 = 1.0 / 64.0;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        let v = f(t + step)?;
        if v == C::new(0.0, 0.0) || (v / v_prev).arg().abs() > MAX_ARG_STEP {
            dt = step / 2.0;
            if dt < 1e-10 {
                return Err(Error::Path(format!("square root argument vanishes near t = {t:.6}")));
            }
            continue;
        }
        t = if step == 1.0 - t { 1.0 } else { t + step };
        let r = align(v.sqrt(), *rs.last().unwrap());
        ts.push(t);
        rs.push(r);
        v_prev = v;
        dt = (step * 2.0).min(1.0 / 64.0);
    }
    Ok((ts, rs))
}

/// The root r or -r closer to `near`.
fn align(r: C, near: C) -> C {
    if (r - near).norm() <= (r + near).norm() {
        r
    } else {
        -r
    }
}

/// Integral over [0, 1] of g(t, sqrt f(t)) with the root continued along the
/// tracker's nodes. Returns the integral and the root at t = 1.
fn integrate_tracked<F, G>(f: &F, r0: C, g: G) -> Result<(C, C)>
where
    F: Fn(f64) -> Result<C>,
    G: Fn(f64, C) -> Result<C>,
{
    let (ts, rs) = track_sqrt(f, r0)?;
    let mut total = C::new(0.0, 0.0);
    for i in 0..ts.len() - 1 {
        let near = rs[i];
        let mut err = None;
        let part = quad::integrate(
            |t| {
                let val = f(t).and_then(|v| g(t, align(v.sqrt(), near)));
                match val {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        C::new(0.0, 0.0)
                    }
                }
            },
            ts[i],
            ts[i + 1],
            QUAD_TOL,
            1e-12,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        total += part;
    }
    Ok((total, *rs.last().unwrap()))
}

/// Start of the x-path, a quarter period off both axes.
pub fn default_epsilon(ctx: &EllipticContext) -> C {
    ctx.tau * 0.25 + 0.23
}

fn segment_clear(ctx: &EllipticContext, start: C, per: C) -> bool {
    (0..=256).all(|k| ctx.half_lattice_distance(start + per * (k as f64 / 256.0)) >= POLE_CLEAR)
}

/// Smallest Newton distance |Xi/Xi'| to a zero of Xi(., E) along the segment.
fn xi_zero_distance(xi: &XiExpansion, ctx: &EllipticContext, e: C, start: C, per: C) -> Result<f64> {
    let mut d = f64::INFINITY;
    for k in 0..=256 {
        let h = xi.jet(ctx, start + per * (k as f64 / 256.0), e, 2)?;
        d = d.min(h.value().norm() / h.deriv(1).norm().max(1e-300));
    }
    Ok(d)
}

/// Offsets tried for the x-path start: a small grid in the directions 1 and
/// tau, nearest first.
fn start_shifts(ctx: &EllipticContext) -> Vec<C> {
    let mut out: Vec<C> = (-2..=2)
        .flat_map(|a| (-2..=2).map(move |b| (a, b)))
        .map(|(a, b)| C::new(0.04 * a as f64, 0.0) + ctx.tau * (0.04 * b as f64))
        .collect();
    out.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    out
}

/// An x-path start clear of poles and of zeros of Xi(., E), as close to the
/// default epsilon as possible.
fn choose_start(xi: &XiExpansion, ctx: &EllipticContext, e: C, per: C) -> Result<C> {
    let eps = default_epsilon(ctx);
    for shift in start_shifts(ctx) {
        let s = eps + shift;
        if segment_clear(ctx, s, per) && xi_zero_distance(xi, ctx, e, s, per)? >= XI_CLEAR {
            return Ok(s);
        }
    }
    Err(Error::Path(format!("zeros of Xi(x, {e}) or poles within reach of every x-path from {eps}")))
}

/// Sign relating sqrt(Xi) continued from `start` to `start + P` with its
/// starting value.
fn sqrt_xi_sign(xi: &XiExpansion, ctx: &EllipticContext, e: C, start: C, per: C) -> Result<i8> {
    let f = |t: f64| xi.eval(ctx, start + per * t, e);
    let r0 = f(0.0)?.sqrt();
    let (_, rs) = track_sqrt(&f, r0)?;
    let r1 = *rs.last().unwrap();
    Ok(if (r1 - r0).norm() < (r1 + r0).norm() { 1 } else { -1 })
}

/// s exp int_eps^{eps+P} y / Xi(x, E) dx with y = sqrt(-Q(E)) (principal
/// unless given) and s the continuation sign of sqrt(Xi).
pub fn direct_multiplier(
    e: C,
    y: Option<C>,
    xi: &XiExpansion,
    curve: &SpectralCurve,
    ctx: &EllipticContext,
    p: Period,
) -> Result<MonodromyResult> {
    let y = y.unwrap_or_else(|| (-curve.q.eval(e)).sqrt());
    let mut out = MonodromyResult {
        e_star: e,
        multiplier: C::new(1.0, 0.0),
        sqrt_minus_q: y,
        base_point: None,
        base_sign: None,
        period: p,
        method: Method::Direct,
        path: vec![],
    };
    if p.is_zero() {
        return Ok(out);
    }
    if curve.is_root(e, ROOT_TOL) {
        return Err(Error::AtRoot(format!("{e}")));
    }
    let per = p.value(ctx);
    let start = choose_start(xi, ctx, e, per)?;
    let mut err = None;
    let integral = quad::integrate(
        |t| match xi.eval(ctx, start + per * t, e) {
            Ok(h) => y / h * per,
            Err(e) => {
                err.get_or_insert(e);
                C::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        QUAD_TOL,
        1e-12,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    let s = sqrt_xi_sign(xi, ctx, e, start, per)?;
    out.multiplier = integral.exp() * s as f64;
    out.path = vec![start, start + per];
    Ok(out)
}

/// The sign of Lambda(x + P, E0) / Lambda(x, E0) at a root E0 of Q, where
/// Lambda = sqrt(Xi).
pub fn base_sign_at_root(e0: C, xi: &XiExpansion, curve: &SpectralCurve, ctx: &EllipticContext, p: Period) -> Result<i8> {
    if !curve.is_root(e0, ROOT_TOL) {
        return Err(Error::Invalid(format!("{e0} is not a root of Q")));
    }
    if p.is_zero() {
        return Ok(1);
    }
    let per = p.value(ctx);
    let eps = default_epsilon(ctx);
    let mut last = None;
    for shift in start_shifts(ctx) {
        let s = eps + shift;
        if !segment_clear(ctx, s, per) {
            continue;
        }
        match sqrt_xi_sign(xi, ctx, e0, s, per) {
            Ok(v) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Path("no pole-free x-path".into())))
}

/// Distance from r to the segment [a, b] and the foot of the perpendicular.
fn segment_distance(a: C, b: C, r: C) -> (f64, C) {
    let d = b - a;
    let t = if d.norm_sqr() == 0.0 { 0.0 } else { ((r - a) * d.conj()).re / d.norm_sqr() };
    let foot = a + d * t.clamp(0.0, 1.0);
    ((r - foot).norm(), foot)
}

/// Polyline from `e0` to `e_star` keeping `clear` away from every root of Q
/// other than the endpoints.
pub fn route(e0: C, e_star: C, roots: &[C], clear: f64) -> Result<Vec<C>> {
    let apart = |r: &C, e: C| (r - e).norm() > 1e-9 * (1.0 + e.norm());
    let others: Vec<C> = roots.iter().copied().filter(|r| apart(r, e0) && apart(r, e_star)).collect();
    let mut pts = vec![e0, e_star];
    for _ in 0..64 {
        let mut hit = None;
        'seg: for i in 0..pts.len() - 1 {
            for r in &others {
                let (d, foot) = segment_distance(pts[i], pts[i + 1], *r);
                if d < clear {
                    hit = Some((i, *r, foot));
                    break 'seg;
                }
            }
        }
        let Some((i, r, foot)) = hit else {
            return Ok(pts);
        };
        if (r - e_star).norm() < clear || (r - pts[i]).norm() < clear {
            return Err(Error::Path(format!("roots of Q too dense near the path: {others:?}")));
        }
        let dir = pts[i + 1] - pts[i];
        let mut away = foot - r;
        if away.norm() < 1e-3 * clear {
            away = dir * C::new(0.0, 1.0);
        }
        let w = r + away / away.norm() * (2.0 * clear);
        pts.insert(i + 1, w);
    }
    Err(Error::Path(format!("could not route around the roots of Q: {others:?}")))
}

/// int_{E0}^{E*} I(E) / sqrt(-Q(E)) dE along `path` (starting at the root
/// E0). sqrt(-Q) is principal at the first waypoint after E0 and continued
/// from there. With `end_at_root` the last waypoint is a root of Q as well
/// and the last segment is substituted like the first. Returns the integral
/// and sqrt(-Q(E*)) on that branch (zero at a root).
pub fn hyperelliptic_integral(num: &Poly, q: &Poly, path: &[C], end_at_root: bool) -> Result<(C, C)> {
    let mut path = path.to_vec();
    if end_at_root && path.len() == 2 {
        path.insert(1, 0.5 * (path[0] + path[1]));
    }
    let e0 = path[0];
    let e1 = path[1];
    let r = q.deflate(e0).scale(C::new(-1.0, 0.0));
    // E = E0 + (t s1)^2, sqrt(-Q) = t s1 sqrt(R)
    let s1 = (e1 - e0).sqrt();
    let f = |t: f64| Ok(r.eval(e0 + s1 * s1 * (t * t)));
    let r0 = r.eval(e0).sqrt();
    let (first, end) = integrate_tracked(&f, r0, |t, root| Ok(2.0 * s1 * num.eval(e0 + s1 * s1 * (t * t)) / root))?;
    let mut y = s1 * end;
    let principal = (-q.eval(e1)).sqrt();
    let mut total = first;
    if (y - principal).norm() > (y + principal).norm() {
        total = -total;
        y = -y;
    }
    let last = path.len() - 2;
    for (i, w) in path[1..].windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if end_at_root && i + 1 == last {
            // E = b + (a - b)(1 - t)^2, sqrt(-Q) = (1 - t) sb sqrt(R_b)
            let rb = q.deflate(b).scale(C::new(-1.0, 0.0));
            let sb = (a - b).sqrt();
            let at = |t: f64| b + sb * sb * ((1.0 - t) * (1.0 - t));
            let f = |t: f64| Ok(rb.eval(at(t)));
            let (part, _) = integrate_tracked(&f, y / sb, |t, root| Ok(-2.0 * sb * num.eval(at(t)) / root))?;
            total += part;
            y = C::new(0.0, 0.0);
            break;
        }
        let f = |t: f64| Ok(-q.eval(a + (b - a) * t));
        let (part, end) = integrate_tracked(&f, y, |t, root| Ok(num.eval(a + (b - a) * t) / root * (b - a)))?;
        total += part;
        y = end;
    }
    Ok((total, y))
}

/// sign0 exp(-1/2 int_{E0}^{E*} I_P(E)/sqrt(-Q(E)) dE), with the E-path routed
/// around the other roots of Q.
pub fn hyperelliptic_multiplier(
    e_star: C,
    e0: C,
    sign0: i8,
    curve: &SpectralCurve,
    xi: &XiExpansion,
    ctx: &EllipticContext,
    p: Period,
) -> Result<MonodromyResult> {
    let scale = curve.scale();
    if !curve.is_root(e0, ROOT_TOL) {
        return Err(Error::Invalid(format!("base point {e0} is not a root of Q")));
    }
    if (e_star - e0).norm() < 1e-14 * scale {
        return Ok(MonodromyResult {
            e_star,
            multiplier: C::new(sign0 as f64, 0.0),
            sqrt_minus_q: C::new(0.0, 0.0),
            base_point: Some(e0),
            base_sign: Some(sign0),
            period: p,
            method: Method::Hyperelliptic,
            path: vec![e0],
        });
    }
    if curve.is_root(e_star, ROOT_TOL) {
        return Err(Error::AtRoot(format!("{e_star}")));
    }
    let clear = ROUTE_CLEAR * scale;
    let path = route(e0, e_star, &curve.roots, clear)
        .or_else(|_| route(e0, e_star, &curve.roots, ROUTE_MIN * scale))?;
    let num = period_polynomial(xi, ctx, p.m, p.n);
    let (integral, y) = hyperelliptic_integral(&num, &curve.q, &path, false)?;
    Ok(MonodromyResult {
        e_star,
        multiplier: (-0.5 * integral).exp() * sign0 as f64,
        sqrt_minus_q: y,
        base_point: Some(e0),
        base_sign: Some(sign0),
        period: p,
        method: Method::Hyperelliptic,
        path,
    })
}

/// The multiplier at another root E1 of Q, continued from (E0, sign0) by the
/// hyperelliptic formula. It should be +-1 and equal the base sign at E1.
pub fn root_multiplier(
    e1: C,
    e0: C,
    sign0: i8,
    curve: &SpectralCurve,
    xi: &XiExpansion,
    ctx: &EllipticContext,
    p: Period,
) -> Result<MonodromyResult> {
    let scale = curve.scale();
    if !curve.is_root(e0, ROOT_TOL) || !curve.is_root(e1, ROOT_TOL) {
        return Err(Error::Invalid(format!("{e0} and {e1} must both be roots of Q")));
    }
    let path = route(e0, e1, &curve.roots, ROUTE_CLEAR * scale)
        .or_else(|_| route(e0, e1, &curve.roots, ROUTE_MIN * scale))?;
    let num = period_polynomial(xi, ctx, p.m, p.n);
    let (integral, _) = hyperelliptic_integral(&num, &curve.q, &path, true)?;
    Ok(MonodromyResult {
        e_star: e1,
        multiplier: (-0.5 * integral).exp() * sign0 as f64,
        sqrt_minus_q: C::new(0.0, 0.0),
        base_point: Some(e0),
        base_sign: Some(sign0),
        period: p,
        method: Method::Hyperelliptic,
        path,
    })
}

/// The simple root of Q farthest from the others, with its base sign for P.
pub fn choose_base(curve: &SpectralCurve, xi: &XiExpansion, ctx: &EllipticContext, p: Period) -> Result<(C, i8)> {
    let roots = &curve.roots;
    let sep = |i: usize| {
        roots
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| (r - roots[i]).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| sep(b).partial_cmp(&sep(a)).unwrap());
    let mut last = None;
    for i in order {
        match base_sign_at_root(roots[i], xi, curve, ctx, p) {
            Ok(s) => return Ok((roots[i], s)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Invalid("Q has no roots".into())))
}

/// (Lambda, Lambda') at x for Lambda normalized to 1 there:
/// Lambda'/Lambda = Xi'/(2 Xi) + y/Xi.
pub fn lambda_state(xi: &XiExpansion, ctx: &EllipticContext, x: C, e: C, y: C) -> Result<[C; 2]> {
    let h = xi.jet(ctx, x, e, 2)?;
    Ok([C::new(1.0, 0.0), h.deriv(1) / (2.0 * h.value()) + y / h.value()])
}

//! Browser bindings: the spectral curve, a Floquet sweep along real E and
//! the potential along a horizontal line. Results are JSON strings.

use fingap_core::monodromy::{choose_base, hyperelliptic_multiplier, Period};
use fingap_core::spectral_curve::{compute_curve, SpectralCurve};
use fingap_core::xi_solver::{compute_xi, XiExpansion};
use fingap_core::{make_context, Complex64 as C, CouplingVector, EllipticContext};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 4000;

#[derive(Serialize)]
pub struct CurveView {
    pub genus: usize,
    pub q: Vec<[f64; 2]>,
    pub q1: Vec<[f64; 2]>,
    pub roots: Vec<[f64; 2]>,
    pub e_values: Vec<[f64; 2]>,
}

#[derive(Serialize)]
pub struct Sweep {
    pub e: Vec<f64>,
    /// B + 1/B; NaN (null) at roots of Q.
    pub trace_re: Vec<f64>,
    pub trace_im: Vec<f64>,
    /// |ln|B||, zero inside bands.
    pub growth: Vec<f64>,
}

#[derive(Serialize)]
pub struct Profile {
    pub x: Vec<f64>,
    pub y: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

fn setup(l: [i32; 4], tau_re: f64, tau_im: f64) -> Result<(CouplingVector, EllipticContext), String> {
    let l = CouplingVector::new(l.map(i64::from)).map_err(|e| e.to_string())?;
    let ctx = make_context(C::new(tau_re, tau_im), 64).map_err(|e| e.to_string())?;
    Ok((l, ctx))
}

fn spectral(l: &CouplingVector, ctx: &EllipticContext) -> Result<(XiExpansion, SpectralCurve), String> {
    let xi = compute_xi(l, ctx).map_err(|e| e.to_string())?;
    let curve = compute_curve(&xi, ctx).map_err(|e| e.to_string())?;
    Ok((xi, curve))
}

pub fn curve_view(l: [i32; 4], tau_re: f64, tau_im: f64) -> Result<CurveView, String> {
    let (l, ctx) = setup(l, tau_re, tau_im)?;
    let (_, curve) = spectral(&l, &ctx)?;
    let mut roots = curve.roots.clone();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(CurveView {
        genus: curve.genus,
        q: curve.q.c.iter().map(|z| pair(*z)).collect(),
        q1: curve.q1.c.iter().map(|z| pair(*z)).collect(),
        roots: roots.into_iter().map(pair).collect(),
        e_values: ctx.e_values.iter().map(|z| pair(*z)).collect(),
    })
}

pub fn floquet_sweep(l: [i32; 4], tau_re: f64, tau_im: f64, e_min: f64, e_max: f64, n: usize) -> Result<Sweep, String> {
    if !(e_max > e_min) || n < 2 || n > MAX_SAMPLES {
        return Err(format!("need e_min < e_max and 2 <= n <= {MAX_SAMPLES}"));
    }
    let (l, ctx) = setup(l, tau_re, tau_im)?;
    let (xi, curve) = spectral(&l, &ctx)?;
    let (e0, s0) = choose_base(&curve, &xi, &ctx, Period::ONE).map_err(|e| e.to_string())?;
    let mut out = Sweep { e: vec![], trace_re: vec![], trace_im: vec![], growth: vec![] };
    for k in 0..n {
        let e = e_min + (e_max - e_min) * k as f64 / (n - 1) as f64;
        let (t, g) = match hyperelliptic_multiplier(C::new(e, 0.0), e0, s0, &curve, &xi, &ctx, Period::ONE) {
            Ok(h) => (h.multiplier + 1.0 / h.multiplier, h.multiplier.norm().ln().abs()),
            Err(_) => (C::new(f64::NAN, f64::NAN), f64::NAN),
        };
        out.e.push(e);
        out.trace_re.push(t.re);
        out.trace_im.push(t.im);
        out.growth.push(g);
    }
    Ok(out)
}

/// u(x + i y) for x in [0, 1], y a fraction of Im tau; NaN at poles.
pub fn potential_profile(l: [i32; 4], tau_re: f64, tau_im: f64, y_frac: f64, n: usize) -> Result<Profile, String> {
    if n < 2 || n > MAX_SAMPLES {
        return Err(format!("need 2 <= n <= {MAX_SAMPLES}"));
    }
    let (l, ctx) = setup(l, tau_re, tau_im)?;
    let y = y_frac * tau_im;
    let mut out = Profile { x: vec![], y, re: vec![], im: vec![] };
    for k in 0..n {
        let x = k as f64 / (n - 1) as f64;
        let u = l.potential(&ctx, C::new(x, y)).unwrap_or(C::new(f64::NAN, f64::NAN));
        out.x.push(x);
        out.re.push(u.re);
        out.im.push(u.im);
    }
    Ok(out)
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn curve(l0: i32, l1: i32, l2: i32, l3: i32, tau_re: f64, tau_im: f64) -> Result<String, JsError> {
    to_js(curve_view([l0, l1, l2, l3], tau_re, tau_im))
}

#[wasm_bindgen]
pub fn sweep(l0: i32, l1: i32, l2: i32, l3: i32, tau_re: f64, tau_im: f64, e_min: f64, e_max: f64, n: usize) -> Result<String, JsError> {
    to_js(floquet_sweep([l0, l1, l2, l3], tau_re, tau_im, e_min, e_max, n))
}

#[wasm_bindgen]
pub fn profile(l0: i32, l1: i32, l2: i32, l3: i32, tau_re: f64, tau_im: f64, y_frac: f64, n: usize) -> Result<String, JsError> {
    to_js(potential_profile([l0, l1, l2, l3], tau_re, tau_im, y_frac, n))
}

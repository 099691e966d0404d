//! The spectral curve y^2 = -Q(E) and the period polynomial Q1(E).

use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::poly::{scaled_coeff_distance, Poly};
use crate::quad;
use crate::laurent::Laurent;
use crate::xi_solver::{laurent_order, potential_laurent, sample_points, sample_points_clear, BasisFn, XiExpansion};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

const SPREAD_HARD: f64 = 1e-4;
const CLUSTER_GAP: f64 = 1e-5;
/// Q samples stay in the middle of the cell, where the powers of wp that
/// make up Xi are smallest.
const CLEAR: f64 = 0.25;

pub use crate::xi_solver::genus_of;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralCurve {
    pub q: Poly,
    pub q1: Poly,
    pub roots: Vec<C>,
    pub genus: usize,
    /// Index pairs of roots closer than 1e-5.
    pub clusters: Vec<(usize, usize)>,
    /// Relative spread of Q across the x samples.
    pub x_spread: f64,
    pub xi_ref: String,
}

impl SpectralCurve {
    /// Typical root size, used as the natural scale of E.
    pub fn scale(&self) -> f64 {
        root_radius(&self.q)
    }

    /// Whether |Q(E)| is negligible relative to the size of its terms.
    pub fn is_root(&self, e: C, tol: f64) -> bool {
        self.q.eval(e).norm() < tol * self.q.eval_scale(e)
    }
}

/// Fujiwara-type bound max |c_k / c_n|^(1/(n-k)), at least 1.
pub fn root_radius(p: &Poly) -> f64 {
    let n = p.degree();
    let lead = p.leading().norm();
    (0..n)
        .map(|k| (p.c[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(1.0, f64::max)
}

fn q_at_x(xi: &XiExpansion, ctx: &EllipticContext, x: C) -> Result<Poly> {
    let jets = xi.slice_jets(ctx, x, 3)?;
    let col = |k: usize| -> Vec<C> { jets.iter().map(|j| j.deriv(k)).collect() };
    let f = XiExpansion::slices_as_poly(&col(0));
    let f1 = XiExpansion::slices_as_poly(&col(1));
    let f2 = XiExpansion::slices_as_poly(&col(2));
    let u = xi.coupling.potential(ctx, x)?;
    let e_minus_u = Poly::new(vec![-u, C::new(1.0, 0.0)]);
    Ok(f.mul(&f)
        .mul(&e_minus_u)
        .add(&f.mul(&f2).scale(C::new(0.5, 0.0)))
        .sub(&f1.mul(&f1).scale(C::new(0.25, 0.0))))
}

fn coeff_of_product(a: &Laurent, b: &Laurent, p: i32) -> C {
    (a.lo..=p - b.lo).map(|k| a.coeff(k) * b.coeff(p - k)).sum()
}

/// Q(E) as the constant term of its Laurent expansion about the half period
/// with the smallest coupling.
pub fn compute_q_laurent(xi: &XiExpansion, ctx: &EllipticContext) -> Poly {
    let l = &xi.coupling;
    let m = (0..4).min_by_key(|&i| l.l[i]).unwrap();
    compute_q_laurent_at(xi, ctx, m)
}

/// Q(E) from the expansion about omega_m.
pub fn compute_q_laurent_at(xi: &XiExpansion, ctx: &EllipticContext, m: usize) -> Poly {
    let l = &xi.coupling;
    let hi = laurent_order(l);
    let a = xi.slice_laurents(ctx, m, hi);
    let u = potential_laurent(l, ctx, m, hi);
    let d1: Vec<Laurent> = a.iter().map(|f| f.derivative()).collect();
    let d2: Vec<Laurent> = d1.iter().map(|f| f.derivative()).collect();
    let au: Vec<Laurent> = a.iter().map(|f| f.mul(&u)).collect();
    let g = xi.g;
    let mut q = vec![C::new(0.0, 0.0); 2 * g + 2];
    for j in 0..=g {
        for k in 0..=g {
            let p = 2 * g - j - k;
            q[p + 1] += coeff_of_product(&a[j], &a[k], 0);
            q[p] += -coeff_of_product(&au[j], &a[k], 0) + 0.5 * coeff_of_product(&a[j], &d2[k], 0)
                - 0.25 * coeff_of_product(&d1[j], &d1[k], 0);
        }
    }
    Poly::new(q)
}

/// Q(E) = Xi^2 (E - u) + Xi Xi''/2 - Xi'^2/4. The coefficients come from the
/// Laurent expansion at a half period; the same expression formed at 8
/// sample points of the cell measures the x-dependence. Returns Q and the
/// largest relative deviation of a sample.
pub fn compute_q(xi: &XiExpansion, ctx: &EllipticContext) -> Result<(Poly, f64)> {
    let pts = sample_points_clear(ctx, 8, 101, CLEAR);
    let qs: Vec<Poly> = pts.iter().map(|&x| q_at_x(xi, ctx, x)).collect::<Result<_>>()?;
    let mean = compute_q_laurent(xi, ctx);
    let r = root_radius(&mean);
    let spread = qs.iter().map(|q| scaled_coeff_distance(q, &mean, r)).fold(0.0, f64::max);
    if spread > SPREAD_HARD {
        return Err(Error::NotConstant(spread));
    }
    let lead = mean.leading();
    if (lead - 1.0).norm() > 1e-8 {
        return Err(Error::NotConstant((lead - 1.0).norm()));
    }
    let mut q = mean;
    *q.c.last_mut().unwrap() = C::new(1.0, 0.0);
    Ok((q, spread))
}

/// Q by interpolation through 2g+2 Chebyshev nodes on a circle-free real
/// segment of radius 2 + 2 max|e_i|, with Q(E) at each node averaged over the
/// x samples. Used as an independent check on `compute_q`.
pub fn compute_q_interpolated(xi: &XiExpansion, ctx: &EllipticContext) -> Result<Poly> {
    let deg = 2 * xi.g + 1;
    let nodes = deg + 1;
    let rad = 2.0 + 2.0 * ctx.e_values.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let pts = sample_points(ctx, 8, 101);
    let per_x: Vec<Poly> = pts.iter().map(|&x| q_at_x(xi, ctx, x)).collect::<Result<_>>()?;
    let mut a = DMatrix::<C>::zeros(nodes, nodes);
    let mut b = DVector::<C>::zeros(nodes);
    for k in 0..nodes {
        let t = (PI * (k as f64 + 0.5) / nodes as f64).cos();
        let e = C::new(rad * t, 0.0);
        let val: C = per_x.iter().map(|q| q.eval(e)).sum::<C>() / per_x.len() as f64;
        for j in 0..nodes {
            a[(k, j)] = C::new(t.powi(j as i32), 0.0);
        }
        b[k] = val;
    }
    let sol = a.lu().solve(&b).ok_or_else(|| Error::IllConditioned(f64::INFINITY))?;
    Ok(Poly::new((0..nodes).map(|j| sol[j] / rad.powi(j as i32)).collect()))
}

/// I_P(E) = integral of Xi(x, E) over the lattice translation P = m + n tau,
/// reduced exactly with the period integrals of wp^k.
pub fn period_polynomial(xi: &XiExpansion, ctx: &EllipticContext, m: i64, n: i64) -> Poly {
    let kmax = xi.coupling.l.iter().copied().max().unwrap_or(0) as usize;
    let j = ctx.wp_power_periods(m, n, kmax);
    let mut out = Poly::constant(C::new(0.0, 0.0));
    for (idx, bf) in xi.basis.iter().enumerate() {
        let weight = match *bf {
            BasisFn::One => j[0],
            BasisFn::Power { k, .. } => j[k as usize],
        };
        out = out.add(&xi.basis_poly(idx).scale(weight));
    }
    out
}

/// Q1(E) from exact reduction of the wp-power integrals.
pub fn compute_q1_termwise(xi: &XiExpansion, ctx: &EllipticContext) -> Poly {
    period_polynomial(xi, ctx, 1, 0)
}

/// Q1(E) by integrating each slice over [eps, 1 + eps], eps = tau/4.
pub fn compute_q1_quadrature(xi: &XiExpansion, ctx: &EllipticContext) -> Result<Poly> {
    period_polynomial_quadrature(xi, ctx, 1, 0, ctx.tau / 4.0)
}

/// Slice-by-slice quadrature of I_P along the straight segment eps -> eps + P.
pub fn period_polynomial_quadrature(xi: &XiExpansion, ctx: &EllipticContext, m: i64, n: i64, eps: C) -> Result<Poly> {
    let per = C::new(m as f64, 0.0) + ctx.tau * n as f64;
    let mut start = eps;
    let clear = |s: C| (0..64).map(|k| ctx.half_lattice_distance(s + per * (k as f64 / 64.0))).fold(f64::INFINITY, f64::min);
    if clear(start) < 0.05 {
        start += ctx.tau * 0.06;
        if clear(start) < 0.05 {
            return Err(Error::Path(format!("pole within 0.05 of the segment from {eps}")));
        }
    }
    let g = xi.g;
    let mut coeffs = vec![C::new(0.0, 0.0); g + 1];
    for j in 0..=g {
        let v = quad::periodic_trapezoid(
            |t| {
                xi.slice_jets(ctx, start + per * t, 1)
                    .map(|s| s[j].value())
                    .unwrap_or(C::new(f64::NAN, f64::NAN))
            },
            1e-14,
        )?;
        coeffs[g - j] = v * per;
    }
    Ok(Poly::new(coeffs))
}

fn clusters_of(roots: &[C]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < CLUSTER_GAP {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn compute_curve(xi: &XiExpansion, ctx: &EllipticContext) -> Result<SpectralCurve> {
    let (q, spread) = compute_q(xi, ctx)?;
    let q1 = compute_q1_termwise(xi, ctx);
    let roots = q.roots();
    for r in &roots {
        if q.eval(*r).norm() > 1e-7 * q.eval_scale(*r) {
            return Err(Error::NoConvergence(format!("root {r} does not reproduce Q")));
        }
    }
    let clusters = clusters_of(&roots);
    Ok(SpectralCurve {
        q,
        q1,
        roots,
        genus: xi.g,
        clusters,
        x_spread: spread,
        xi_ref: format!("{} tau={}", xi.coupling, xi.tau),
    })
}

//! The doubly periodic solution Xi(x, E) of the product equation
//! `h''' - 4(u - E) h' - 2u' h = 0`, polynomial in E.
//!
//! Xi is expanded over `1` and `wp(x + omega_i)^k`, 1 <= k <= l_i; the
//! public table indexes the same powers as `wp(x + omega_i)^(l_i - j)`.

use crate::coupling::CouplingVector;
use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::laurent::{wp_at_zero, Laurent};
use crate::linalg::{self, CMat};
use crate::poly::Poly;
use crate::series::Jet;
use num_complex::Complex64 as C;
use serde::Serialize;

const GAP: f64 = 1e6;
const SMALL: f64 = 1e-7;
const NOISE: f64 = 1e-10;
const REFINE: usize = 3;
const WEIGHT_FLOORS: [f64; 3] = [1e-14, 1e-11, 1e-9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisFn {
    One,
    /// `wp(x + omega_i)^k`.
    Power { i: usize, k: u32 },
}

pub fn ansatz(l: &CouplingVector) -> Vec<BasisFn> {
    let mut b = vec![BasisFn::One];
    for i in 0..4 {
        for k in 1..=l.l[i] {
            b.push(BasisFn::Power { i, k });
        }
    }
    b
}

/// Jets of every ansatz function at x.
pub fn basis_jets(basis: &[BasisFn], ctx: &EllipticContext, x: C, len: usize) -> Result<Vec<Jet>> {
    let mut base: [Option<Jet>; 4] = [None, None, None, None];
    let mut out = Vec::with_capacity(basis.len());
    for b in basis {
        match *b {
            BasisFn::One => out.push(Jet::constant(C::new(1.0, 0.0), len)),
            BasisFn::Power { i, k } => {
                if base[i].is_none() {
                    let mut w = ctx.shifted_wp_jet(i, x, len)?;
                    if i > 0 {
                        w = w.add_const(ctx.e_values[i - 1]);
                    }
                    base[i] = Some(w);
                }
                out.push(base[i].as_ref().unwrap().powi(k as i32));
            }
        }
    }
    Ok(out)
}

/// Index k with omega_k = omega_i + omega_m modulo the period lattice.
pub fn half_sum(i: usize, m: usize) -> usize {
    const BITS: [u8; 4] = [0b00, 0b10, 0b11, 0b01];
    let b = BITS[i] ^ BITS[m];
    BITS.iter().position(|&v| v == b).unwrap()
}

/// Laurent series of wp(t + omega_k) in t, exact through t^hi.
pub fn shifted_wp_laurent(ctx: &EllipticContext, k: usize, hi: i32) -> Laurent {
    let w = wp_at_zero(ctx.g2, ctx.g3, hi);
    if k == 0 {
        return w;
    }
    let e = ctx.e_values;
    let (a, b) = (k % 3, (k + 1) % 3);
    let ek = e[k - 1];
    let ck = (ek - e[a]) * (ek - e[b]);
    w.add_const(-ek).recip().scale(ck).add_const(ek).truncate_to(hi)
}

/// Laurent series of every ansatz function about the half period omega_m.
pub fn basis_laurents(basis: &[BasisFn], ctx: &EllipticContext, m: usize, hi: i32) -> Vec<Laurent> {
    let mut base: [Option<Laurent>; 4] = [None, None, None, None];
    basis
        .iter()
        .map(|b| match *b {
            BasisFn::One => Laurent::constant(C::new(1.0, 0.0), hi),
            BasisFn::Power { i, k } => {
                let f = base[i].get_or_insert_with(|| shifted_wp_laurent(ctx, half_sum(i, m), hi));
                f.powi(k as i32)
            }
        })
        .collect()
}

/// Laurent series of the potential about omega_m.
pub fn potential_laurent(l: &CouplingVector, ctx: &EllipticContext, m: usize, hi: i32) -> Laurent {
    let s = l.strengths();
    let mut acc = Laurent::constant(C::new(0.0, 0.0), hi);
    for i in 0..4 {
        if s[i] != 0.0 {
            acc = acc.add(&shifted_wp_laurent(ctx, half_sum(i, m), hi).scale(C::new(s[i], 0.0)));
        }
    }
    acc
}

/// Working precision for local expansions of the ansatz for l.
pub fn laurent_order(l: &CouplingVector) -> i32 {
    4 * *l.l.iter().max().unwrap() as i32 + 16
}

/// Quasi-random points of the period cell kept away from every half-lattice
/// point.
pub fn sample_points(ctx: &EllipticContext, count: usize, salt: u32) -> Vec<C> {
    sample_points_clear(ctx, count, salt, 0.1)
}

/// As `sample_points`, keeping a distance of `frac` times the shorter period
/// from the half lattice.
pub fn sample_points_clear(ctx: &EllipticContext, count: usize, salt: u32, frac: f64) -> Vec<C> {
    let min_period = ctx.tau.norm().min(1.0).min(ctx.tau.im);
    let dmin = frac * min_period;
    let (a1, a2) = (0.754877666246692760, 0.569840290998053265);
    let mut out = Vec::with_capacity(count);
    let mut k = 1u64 + 7919 * u64::from(salt);
    while out.len() < count {
        let s = (0.5 + a1 * k as f64).fract();
        let t = (0.5 + a2 * k as f64).fract();
        k += 1;
        let x = C::new(s, 0.0) + ctx.tau * t;
        if ctx.half_lattice_distance(x) >= dmin {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct XiExpansion {
    pub coupling: CouplingVector,
    pub tau: C,
    pub g: usize,
    /// c_0(E), ascending powers of E, monic.
    pub c0: Vec<C>,
    /// `b[i][j]`: coefficient polynomial (ascending in E) of `wp(x + omega_i)^(l_i - j)`.
    pub b: Vec<Vec<Vec<C>>>,
    #[serde(skip)]
    pub basis: Vec<BasisFn>,
    /// `slices[j][n]`: coefficient of basis function n in a_j(x).
    #[serde(skip)]
    pub slices: Vec<Vec<C>>,
    #[serde(skip)]
    pub e_values: [C; 3],
}

impl XiExpansion {
    /// Jets of a_0(x), ..., a_g(x).
    pub fn slice_jets(&self, ctx: &EllipticContext, x: C, len: usize) -> Result<Vec<Jet>> {
        let phi = basis_jets(&self.basis, ctx, x, len)?;
        Ok(self
            .slices
            .iter()
            .map(|coef| {
                let mut acc = Jet::zero(len);
                for (c, f) in coef.iter().zip(&phi) {
                    if *c != C::new(0.0, 0.0) {
                        acc = &acc + &f.scale(*c);
                    }
                }
                acc
            })
            .collect())
    }

    /// (a_j, a_j', a_j'', a_j''') at x for every j.
    pub fn xi_slices(&self, ctx: &EllipticContext, x: C) -> Result<Vec<[C; 4]>> {
        Ok(self
            .slice_jets(ctx, x, 4)?
            .iter()
            .map(|j| [j.deriv(0), j.deriv(1), j.deriv(2), j.deriv(3)])
            .collect())
    }

    /// Jet in x of Xi(., E) at x.
    pub fn jet(&self, ctx: &EllipticContext, x: C, e: C, len: usize) -> Result<Jet> {
        let sl = self.slice_jets(ctx, x, len)?;
        let mut acc = Jet::zero(len);
        for a in sl.iter() {
            acc = &acc.scale(e) + a;
        }
        Ok(acc)
    }

    pub fn eval(&self, ctx: &EllipticContext, x: C, e: C) -> Result<C> {
        Ok(self.jet(ctx, x, e, 1)?.value())
    }

    /// Laurent series of a_0, ..., a_g about omega_m.
    pub fn slice_laurents(&self, ctx: &EllipticContext, m: usize, hi: i32) -> Vec<Laurent> {
        let phi = basis_laurents(&self.basis, ctx, m, hi);
        self.slices
            .iter()
            .map(|coef| {
                let mut acc = Laurent::constant(C::new(0.0, 0.0), hi);
                for (c, f) in coef.iter().zip(&phi) {
                    if *c != C::new(0.0, 0.0) {
                        acc = acc.add(&f.scale(*c));
                    }
                }
                acc
            })
            .collect()
    }

    /// Xi(x, E) as a polynomial in E with the slice values at x.
    pub fn slices_as_poly(slices: &[C]) -> Poly {
        Poly::new(slices.iter().rev().copied().collect())
    }

    /// The polynomial in E multiplying basis function n.
    pub fn basis_poly(&self, n: usize) -> Poly {
        let g = self.g;
        Poly::new((0..=g).map(|p| self.slices[g - p][n]).collect())
    }
}

/// h''' - 4(u - E)h' - 2u'h for h given by its jet (length >= 4) at x.
pub fn product_ode_residual(h: &Jet, x: C, e: C, l: &CouplingVector, ctx: &EllipticContext) -> Result<C> {
    let u = l.potential_jet(ctx, x, 2)?;
    Ok(h.deriv(3) - 4.0 * (u.value() - e) * h.deriv(1) - 2.0 * u.deriv(1) * h.value())
}

/// Same residual for a plain function, derivatives by central differences
/// with step `step`.
pub fn product_ode_residual_stencil<F>(h: F, x: C, e: C, l: &CouplingVector, ctx: &EllipticContext, step: f64) -> Result<C>
where
    F: Fn(C) -> C,
{
    let s = C::new(step, 0.0);
    let f = |k: f64| h(x + s * k);
    let d1 = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * step);
    let d3 = (f(-3.0) - 8.0 * f(-2.0) + 13.0 * f(-1.0) - 13.0 * f(1.0) + 8.0 * f(2.0) - f(3.0))
        / (8.0 * step.powi(3));
    let u = l.potential_jet(ctx, x, 2)?;
    Ok(d3 - 4.0 * (u.value() - e) * d1 - 2.0 * u.deriv(1) * h(x))
}

/// Degree candidate from the four-case genus table.
pub fn genus_of(l: &CouplingVector) -> usize {
    let k = l.sorted();
    let s = l.sum() as usize;
    let (k0, k3) = (k[0] as usize, k[3] as usize);
    if s % 2 == 0 {
        if k0 + k3 >= s / 2 {
            k0
        } else {
            (s - 2 * k3) / 2
        }
    } else if 2 * k0 > s {
        k0
    } else {
        s.div_ceil(2)
    }
}

struct KernelProbe {
    dim: usize,
    vector: Option<Vec<C>>,
    singular: Vec<f64>,
}

/// Rows L0 a_j + 4 a_{j+1}' = 0 for j = 0..=g over the unknowns
/// (a_0 constant, a_1, ..., a_g); a_0 is constant by the E^(g+1) equation.
fn system_matrix(nb: usize, d1: &[Vec<C>], l0: &[Vec<C>], g: usize) -> CMat {
    let ms = d1.len();
    let col = |j: usize, n: usize| if j == 0 { 0 } else { 1 + (j - 1) * nb + n };
    let mut a = CMat::zeros((g + 1) * ms, 1 + g * nb);
    for s in 0..ms {
        for j in 0..=g {
            let r = j * ms + s;
            let width = if j == 0 { 1 } else { nb };
            for n in 0..width {
                a[(r, col(j, n))] = l0[s][n];
            }
            if j < g {
                for n in 0..nb {
                    a[(r, col(j + 1, n))] = 4.0 * d1[s][n];
                }
            }
        }
    }
    a
}

/// Kernel of the recursion system for degree g. With `weights`, column c is
/// scaled by weights[c] instead of being equilibrated, so a previous
/// solution can serve as its own scale.
fn probe(basis: &[BasisFn], d1: &[Vec<C>], l0: &[Vec<C>], g: usize, weights: Option<&[f64]>) -> KernelProbe {
    let nb = basis.len();
    let cols = 1 + g * nb;
    let a = system_matrix(nb, d1, l0, g);
    // rows that are rounding noise of a structurally zero coefficient
    // would be promoted to real equations by row scaling
    let (a, s1) = linalg::equilibrate_cols(&a);
    let keep: Vec<usize> = (0..a.nrows())
        .filter(|&r| a.row(r).iter().any(|v| v.norm() > NOISE))
        .collect();
    let (a, scale) = match weights {
        None => {
            let a = linalg::equilibrate_rows(&a.select_rows(keep.iter()));
            let (a, s2) = linalg::equilibrate_cols(&a);
            (a, s1.iter().zip(&s2).map(|(x, y)| x * y).collect::<Vec<f64>>())
        }
        Some(w) => {
            let mut a = a.select_rows(keep.iter());
            for (c, mut col) in a.column_iter_mut().enumerate() {
                col *= C::new(w[c] * s1[c], 0.0);
            }
            (linalg::equilibrate_rows(&a), w.iter().map(|v| 1.0 / v).collect())
        }
    };
    let (s, v) = linalg::svd_sorted(&a);
    let top = s[0];
    let mut dim = 0;
    let mut best = 0.0;
    for k in 0..s.len() - 1 {
        if s[k + 1] < SMALL * top {
            let ratio = s[k] / s[k + 1].max(1e-300);
            if ratio > best {
                best = ratio;
                dim = s.len() - 1 - k;
            }
        }
    }
    if best < GAP {
        dim = 0;
    }
    let vector = (dim == 1).then(|| {
        let col = v.column(s.len() - 1);
        (0..cols).map(|c| col[c] / scale[c]).collect()
    });
    KernelProbe { dim, vector, singular: s }
}

/// Solves for Xi by matching principal parts at the half periods.
///
/// An odd elliptic function whose poles lie at half periods vanishes exactly
/// when all of its principal parts do, so every condition is a linear
/// equation in the Laurent coefficients of the ansatz, which depend only on
/// g2, g3 and the e_i.
pub fn compute_xi(l: &CouplingVector, ctx: &EllipticContext) -> Result<XiExpansion> {
    let basis = ansatz(l);
    let (d1, l0) = principal_part_rows(l, ctx, &basis);
    solve_kernel(l, ctx, basis, &d1, &l0)
}

/// Odd principal-part coefficients of phi' and L0 phi for every ansatz
/// function, one row per (half period, power).
pub fn principal_part_rows(l: &CouplingVector, ctx: &EllipticContext, basis: &[BasisFn]) -> (Vec<Vec<C>>, Vec<Vec<C>>) {
    let hi = laurent_order(l);
    let mut d1 = Vec::new();
    let mut l0 = Vec::new();
    for m in 0..4 {
        if l.l[m] == 0 {
            continue;
        }
        let phi = basis_laurents(basis, ctx, m, hi);
        let u = potential_laurent(l, ctx, m, hi);
        let du = u.derivative();
        let dphi: Vec<Laurent> = phi.iter().map(|f| f.derivative()).collect();
        let lphi: Vec<Laurent> = phi
            .iter()
            .zip(&dphi)
            .map(|(f, d)| {
                d.derivative()
                    .derivative()
                    .sub(&u.mul(d).scale(C::new(4.0, 0.0)))
                    .sub(&du.mul(f).scale(C::new(2.0, 0.0)))
            })
            .collect();
        for r in 0..=l.l[m] as i32 + 1 {
            let p = -(2 * r + 1);
            d1.push(dphi.iter().map(|f| f.coeff(p)).collect::<Vec<_>>());
            l0.push(lphi.iter().map(|f| f.coeff(p)).collect::<Vec<_>>());
        }
    }
    (d1, l0)
}

/// Collocation of the product equation at quasi-random points of the cell,
/// a different point set for each salt. Used as an independent check.
pub fn compute_xi_collocation(l: &CouplingVector, ctx: &EllipticContext, salt: u32) -> Result<XiExpansion> {
    let basis = ansatz(l);
    let nb = basis.len();
    let pts = sample_points(ctx, 3 * nb, salt);
    let mut d1 = Vec::with_capacity(pts.len());
    let mut l0 = Vec::with_capacity(pts.len());
    for &x in &pts {
        let phi = basis_jets(&basis, ctx, x, 4)?;
        let u = l.potential_jet(ctx, x, 2)?;
        d1.push(phi.iter().map(|f| f.deriv(1)).collect::<Vec<_>>());
        l0.push(
            phi.iter()
                .map(|f| f.deriv(3) - 4.0 * u.value() * f.deriv(1) - 2.0 * u.deriv(1) * f.value())
                .collect::<Vec<_>>(),
        );
    }
    solve_kernel(l, ctx, basis, &d1, &l0)
}

fn solve_kernel(l: &CouplingVector, ctx: &EllipticContext, basis: Vec<BasisFn>, d1: &[Vec<C>], l0: &[Vec<C>]) -> Result<XiExpansion> {
    let candidate = genus_of(l);
    let mut g = candidate;
    let mut tried = Vec::new();
    let found = loop {
        let p = probe(&basis, d1, l0, g, None);
        tried.push((g, p.dim));
        match p.dim {
            1 => break (g, p.vector.unwrap()),
            0 if g < candidate + 3 && tried.iter().all(|t| t.0 != g + 1) => g += 1,
            d if d > 1 && g + 1 >= d && tried.iter().all(|t| t.0 != g + 1 - d) => g = g + 1 - d,
            _ => {
                let tail: Vec<String> = p.singular.iter().rev().take(4).map(|v| format!("{v:.2e}")).collect();
                return Err(Error::Kernel {
                    candidate,
                    detail: format!("kernel dimensions {tried:?}; smallest singular values {}", tail.join(", ")),
                });
            }
        }
    };
    let (g, first) = found;
    // rescale by the solution itself, with a floor weight for structural
    // zeros; the candidate whose Q agrees best between half periods wins
    let mut best = (f64::INFINITY, first.clone());
    let mut consider = |z: Vec<C>| {
        let xi = from_kernel(l, ctx, g, &basis, &z);
        let d = half_period_disagreement(&xi, ctx);
        if d < best.0 {
            best = (d, z);
        }
    };
    consider(first.clone());
    for floor in WEIGHT_FLOORS {
        let mut z = first.clone();
        for _ in 0..REFINE {
            let top = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let w: Vec<f64> = z.iter().map(|v| v.norm() + floor * top).collect();
            match probe(&basis, d1, l0, g, Some(&w)) {
                KernelProbe { dim: 1, vector: Some(v), .. } => z = v,
                _ => break,
            }
        }
        consider(z);
    }
    Ok(from_kernel(l, ctx, g, &basis, &best.1))
}

/// Largest scaled distance between the Laurent Q at each half period and
/// the one at the origin.
fn half_period_disagreement(xi: &XiExpansion, ctx: &EllipticContext) -> f64 {
    let q0 = crate::spectral_curve::compute_q_laurent_at(xi, ctx, 0);
    let r = crate::spectral_curve::root_radius(&q0);
    (1..4)
        .map(|m| crate::poly::scaled_coeff_distance(&crate::spectral_curve::compute_q_laurent_at(xi, ctx, m), &q0, r))
        .fold(0.0, f64::max)
}

fn from_kernel(l: &CouplingVector, ctx: &EllipticContext, g: usize, basis: &[BasisFn], z: &[C]) -> XiExpansion {
    let nb = basis.len();
    let lead = z[0];
    let mut slices = vec![vec![C::new(0.0, 0.0); nb]; g + 1];
    slices[0][0] = C::new(1.0, 0.0);
    for j in 1..=g {
        for n in 0..nb {
            slices[j][n] = z[1 + (j - 1) * nb + n] / lead;
        }
    }
    assemble(l, ctx, g, basis.to_vec(), slices)
}

fn assemble(l: &CouplingVector, ctx: &EllipticContext, g: usize, basis: Vec<BasisFn>, slices: Vec<Vec<C>>) -> XiExpansion {
    let zero = C::new(0.0, 0.0);
    let mut c0 = vec![zero; g + 1];
    let mut b: Vec<Vec<Vec<C>>> = (0..4).map(|i| vec![vec![zero; g + 1]; l.l[i] as usize]).collect();
    for (n, bf) in basis.iter().enumerate() {
        for j in 0..=g {
            let coef = slices[j][n];
            let ep = g - j;
            match *bf {
                BasisFn::One => c0[ep] += coef,
                BasisFn::Power { i, k } => b[i][(l.l[i] - k) as usize][ep] += coef,
            }
        }
    }
    c0[g] = C::new(1.0, 0.0);
    for row in b.iter_mut() {
        for p in row.iter_mut() {
            p.truncate(g.max(1));
        }
    }
    XiExpansion { coupling: *l, tau: ctx.tau, g, c0, b, basis, slices, e_values: ctx.e_values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::make_context;

    #[test]
    fn genus_table_cases() {
        let g = |l: [u32; 4]| genus_of(&CouplingVector::from_u32(l).unwrap());
        assert_eq!(g([0, 0, 0, 1]), 1);
        assert_eq!(g([2, 1, 0, 0]), 2);
        assert_eq!(g([1, 1, 1, 1]), 1);
        assert_eq!(g([1, 1, 1, 0]), 2);
        assert_eq!(g([3, 0, 0, 0]), 3);
        assert_eq!(g([2, 2, 1, 1]), 2);
        assert_eq!(g([2, 2, 2, 0]), 3);
    }

    #[test]
    fn lame_one_is_wp_plus_e() {
        let ctx = make_context(C::new(0.1, 1.2), 64).unwrap();
        let l = CouplingVector::from_u32([1, 0, 0, 0]).unwrap();
        let xi = compute_xi(&l, &ctx).unwrap();
        assert_eq!(xi.g, 1);
        assert!((xi.c0[0]).norm() < 1e-10, "{:?}", xi.c0);
        assert!((xi.b[0][0][0] - 1.0).norm() < 1e-10);
    }

    #[test]
    fn residual_vanishes_at_random_points() {
        let ctx = make_context(C::new(0.3, 1.4), 64).unwrap();
        let l = CouplingVector::from_u32([2, 1, 0, 1]).unwrap();
        let xi = compute_xi(&l, &ctx).unwrap();
        for (x, e) in [(C::new(0.31, 0.4), C::new(1.3, -0.7)), (C::new(-0.2, 0.9), C::new(-4.0, 2.0))] {
            let h = xi.jet(&ctx, x, e, 4).unwrap();
            let r = product_ode_residual(&h, x, e, &l, &ctx).unwrap();
            let scale = h.deriv(3).norm() + h.value().norm() * (1.0 + e.norm());
            assert!(r.norm() < 1e-8 * scale, "{r}");
        }
    }
}

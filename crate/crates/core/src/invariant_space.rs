//! The finite-dimensional H-invariant space spanned by products of co-p
//! functions, and the characteristic polynomial of H on it.

use crate::coupling::CouplingVector;
use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::laurent::{wp_at_zero, Laurent};
use crate::linalg::{self, CMat};
use crate::xi_solver::potential_laurent;
use crate::poly::Poly;
use crate::series::Jet;
use num_complex::Complex64 as C;
use serde::Serialize;

const COND_MAX: f64 = 1e12;
const RESID_MAX: f64 = 1e-6;
const CHECK_ORDERS: i32 = 12;
const WINDOW: i32 = 6;

/// `co_wp_1^a1 co_wp_2^a2 co_wp_3^a3 wp^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub alpha: [i32; 3],
    pub n: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Block {
    /// The U-block label (one of -l_i, l_i + 1 per entry).
    pub label: [i64; 4],
    /// Index of the V-space actually spanned (label or 1 - label).
    pub beta: [i64; 4],
    pub elements: Vec<Monomial>,
    /// Sign picked up under x -> x + 1 and x -> x + tau.
    pub parity: (i8, i8),
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantBasis {
    pub coupling: CouplingVector,
    pub blocks: Vec<Block>,
    pub dim: usize,
}

impl InvariantBasis {
    pub fn exponent_table(&self) -> Vec<Monomial> {
        self.blocks.iter().flat_map(|b| b.elements.iter().copied()).collect()
    }

    pub fn parity_labels(&self) -> Vec<(i8, i8)> {
        self.blocks.iter().map(|b| b.parity).collect()
    }
}

fn sign(e: i64) -> i8 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Dimension predicted by the four-case rule on the sorted couplings.
pub fn dimension_formula(l: &CouplingVector) -> usize {
    let k = l.sorted().map(|v| v as usize);
    let s: usize = k.iter().sum();
    if s % 2 == 0 {
        if k[0] + k[3] >= k[1] + k[2] {
            2 * k[0] + 1
        } else {
            k[0] + k[1] + k[2] + 1 - k[3]
        }
    } else if k[0] > k[1] + k[2] + k[3] {
        2 * k[0] + 1
    } else {
        s + 2
    }
}

fn block_labels(l: &CouplingVector) -> Vec<[i64; 4]> {
    let m = l.l.map(|v| -i64::from(v));
    let p = l.l.map(|v| i64::from(v) + 1);
    if l.sum() % 2 == 0 {
        vec![
            [m[0], m[1], m[2], m[3]],
            [m[0], m[1], p[2], p[3]],
            [m[0], p[1], m[2], p[3]],
            [m[0], p[1], p[2], m[3]],
        ]
    } else {
        vec![
            [m[0], m[1], m[2], p[3]],
            [m[0], m[1], p[2], m[3]],
            [m[0], p[1], m[2], m[3]],
            [p[0], m[1], m[2], m[3]],
        ]
    }
}

pub fn build_invariant_space(l: &CouplingVector) -> InvariantBasis {
    let mut blocks = Vec::new();
    for label in block_labels(l) {
        let half: i64 = label.iter().sum::<i64>() / 2;
        let beta = match half {
            h if h <= 0 => label,
            1 => continue,
            _ => label.map(|a| 1 - a),
        };
        let d = -beta.iter().sum::<i64>() / 2;
        let alpha = [beta[1] as i32, beta[2] as i32, beta[3] as i32];
        let elements = (0..=d as u32).map(|n| Monomial { alpha, n }).collect();
        let parity = (sign(beta[2] + beta[3]), sign(beta[1] + beta[2]));
        blocks.push(Block { label, beta, elements, parity });
    }
    let dim = blocks.iter().map(|b| b.elements.len()).sum();
    InvariantBasis { coupling: *l, blocks, dim }
}

/// Jets of the given monomials at x.
pub fn monomial_jets(elems: &[Monomial], ctx: &EllipticContext, x: C, len: usize) -> Result<Vec<Jet>> {
    let p = ctx.co_wp_jets(x, len)?;
    let w = (&p[0] * &p[0]).add_const(ctx.e_values[0]);
    Ok(elems
        .iter()
        .map(|m| {
            let mut f = w.powi(m.n as i32);
            for i in 0..3 {
                if m.alpha[i] != 0 {
                    f = &f * &p[i].powi(m.alpha[i]);
                }
            }
            f
        })
        .collect())
}

/// The regular collocation points x = 0.13 + t (0.74 + 0.11 tau).
pub fn collocation_points(ctx: &EllipticContext, count: usize, offset: f64) -> Vec<C> {
    let dir = C::new(0.74, 0.0) + ctx.tau * 0.11;
    (0..count)
        .map(|k| C::new(0.13, 0.0) + dir * ((k as f64 + offset) / count as f64))
        .collect()
}

#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    /// Block-diagonal matrix M with H f_j = sum_i M_ij f_i.
    pub blocks: Vec<CMat>,
    pub condition: f64,
    /// Largest relative residual on an independent grid.
    pub residual: f64,
}

impl HamiltonianMatrix {
    pub fn full(&self) -> CMat {
        let n: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let mut m = CMat::zeros(n, n);
        let mut o = 0;
        for b in &self.blocks {
            let k = b.nrows();
            m.view_mut((o, o), (k, k)).copy_from(b);
            o += k;
        }
        m
    }
}

fn h_values(elems: &[Monomial], l: &CouplingVector, ctx: &EllipticContext, x: C) -> Result<(Vec<C>, Vec<C>)> {
    let f = monomial_jets(elems, ctx, x, 3)?;
    let u = l.potential(ctx, x)?;
    let vals = f.iter().map(|j| j.value()).collect();
    let hf = f.iter().map(|j| -j.deriv(2) + u * j.value()).collect();
    Ok((vals, hf))
}

/// Laurent series at x = 0 of the block elements, with
/// co_wp_i = t^-1 sqrt(t^2 (wp - e_i)).
pub fn monomial_laurents(elems: &[Monomial], ctx: &EllipticContext, hi: i32) -> Vec<Laurent> {
    let w = wp_at_zero(ctx.g2, ctx.g3, hi);
    let co: Vec<Laurent> = (0..3)
        .map(|i| {
            let d = w.add_const(-ctx.e_values[i]);
            let r = Laurent::new(d.lo + 2, d.c).sqrt();
            Laurent::new(r.lo - 1, r.c)
        })
        .collect();
    elems
        .iter()
        .map(|m| {
            let mut f = w.powi(m.n as i32);
            for i in 0..3 {
                if m.alpha[i] != 0 {
                    f = f.mul(&co[i].powi(m.alpha[i]));
                }
            }
            f
        })
        .collect()
}

/// Matrix of H on each block from the Laurent expansion at x = 0.
///
/// Element n of a block has leading term t^-(B + 2n), B the total co-wp
/// degree, so H f_n is peeled off term by term from its most singular
/// coefficient down. The remainder must vanish; its largest size relative
/// to the terms it came from, over a few further orders, is the residual.
pub fn hamiltonian_matrix(basis: &InvariantBasis, ctx: &EllipticContext) -> Result<HamiltonianMatrix> {
    let l = &basis.coupling;
    let mut out = Vec::new();
    let mut resid: f64 = 0.0;
    for block in &basis.blocks {
        let k = block.elements.len();
        let b: i32 = block.elements[0].alpha.iter().sum();
        let deepest = b + 2 * k as i32;
        let hi = 2 * deepest + 24;
        let f = monomial_laurents(&block.elements, ctx, hi);
        let u = potential_laurent(l, ctx, 0, hi);
        let mut m = CMat::zeros(k, k);
        for j in 0..k {
            let uf = u.mul(&f[j]);
            let d2 = f[j].derivative().derivative();
            let hf = uf.sub(&d2);
            let mut r = hf.clone();
            for i in (0..k).rev() {
                let p = -b - 2 * i as i32;
                let c = r.coeff(p) / f[i].coeff(p);
                m[(i, j)] = c;
                r = r.sub(&f[i].scale(c));
            }
            let col: f64 = (0..k).map(|i| m[(i, j)].norm()).sum();
            // structurally zero orders carry rounding noise, so each order is
            // measured against its neighbours as well
            let terms = |p: i32| {
                let fmax = f.iter().map(|g| g.coeff(p).norm()).fold(0.0, f64::max);
                uf.coeff(p).norm() + d2.coeff(p).norm() + col * fmax
            };
            let last = (-b + CHECK_ORDERS).min(r.hi() - WINDOW);
            for p in -deepest..=last {
                let size: f64 = (p - WINDOW..=p + WINDOW).map(terms).sum();
                if size > 0.0 {
                    resid = resid.max(r.coeff(p).norm() / size);
                }
            }
        }
        out.push(m);
    }
    if resid > RESID_MAX {
        return Err(Error::NotInvariant(resid));
    }
    Ok(HamiltonianMatrix { blocks: out, condition: 1.0, residual: resid })
}

/// Matrix of H on each block by least-squares collocation.
pub fn hamiltonian_matrix_collocation(basis: &InvariantBasis, ctx: &EllipticContext) -> Result<HamiltonianMatrix> {
    let l = &basis.coupling;
    let npts = 4 * basis.dim.max(1);
    let pts = collocation_points(ctx, npts, 0.5);
    let check = collocation_points(ctx, npts, 0.23);
    let mut out = Vec::new();
    let mut cond: f64 = 1.0;
    let mut resid: f64 = 0.0;
    for block in &basis.blocks {
        let k = block.elements.len();
        let mut f = CMat::zeros(npts, k);
        let mut g = CMat::zeros(npts, k);
        for (r, &x) in pts.iter().enumerate() {
            let (v, hv) = h_values(&block.elements, l, ctx, x)?;
            let s = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for j in 0..k {
                f[(r, j)] = v[j] / s;
                g[(r, j)] = hv[j] / s;
            }
        }
        let (m, c) = linalg::least_squares(&f, &g);
        if c > COND_MAX {
            return Err(Error::IllConditioned(c));
        }
        cond = cond.max(c);
        for &x in &check {
            let (v, hv) = h_values(&block.elements, l, ctx, x)?;
            for j in 0..k {
                let approx: C = (0..k).map(|i| m[(i, j)] * v[i]).sum();
                let scale = hv[j].norm() + (0..k).map(|i| (m[(i, j)] * v[i]).norm()).sum::<f64>();
                resid = resid.max((approx - hv[j]).norm() / scale);
            }
        }
        out.push(m);
    }
    Ok(HamiltonianMatrix { blocks: out, condition: cond, residual: resid })
}

pub fn characteristic_polynomial(m: &CMat) -> Poly {
    linalg::characteristic_polynomial(m)
}

/// P(E): product of the block characteristic polynomials.
pub fn invariant_polynomial(h: &HamiltonianMatrix) -> Poly {
    h.blocks
        .iter()
        .fold(Poly::constant(C::new(1.0, 0.0)), |acc, b| acc.mul(&characteristic_polynomial(b)))
}

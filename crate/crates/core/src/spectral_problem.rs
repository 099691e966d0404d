//! Boundary value problems on the real line: the three square-integrable
//! classes, the eigenvalue condition on B(E), continuation of eigenvalues in
//! the nome p, band edges in the real case and the nonrepeated eigenvalues
//! from the invariant space.

use crate::coupling::CouplingVector;
use crate::elliptic::{context_from_nome, EllipticContext};
use crate::error::{Error, Result};
use crate::invariant_space::{build_invariant_space, characteristic_polynomial, hamiltonian_matrix};
use crate::monodromy::{self, choose_base, direct_multiplier, hyperelliptic_integral, route, Period};
use crate::ode;
use crate::spectral_curve::{compute_curve, SpectralCurve};
use crate::xi_solver::{compute_xi, potential_laurent, XiExpansion};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

const NEWTON_TOL: f64 = 1e-11;
const ACCEPT_TOL: f64 = 1e-8;
const MAX_NEWTON: usize = 40;
const FLAG_TOL: f64 = 1e-4;
const START_MAX: f64 = 0.05;
const MIN_FRACTION: f64 = 1.0 / 4096.0;
const ROUTE_CLEAR: f64 = 1e-2;
const ROUTE_MIN: f64 = 1e-3;
const REAL_TOL: f64 = 1e-7;
const BAND_TOL: f64 = 1e-6;
const FROBENIUS_AT: f64 = 0.05;
const FROBENIUS_TERMS: usize = 40;
const ODE_STEP: f64 = 5e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassTag {
    D,
    Dstar,
    DstarStar,
}

/// Powers of sin(pi x) and cos(pi x) in the trigonometric ground state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroundState {
    pub sin_power: u32,
    pub cos_power: u32,
}

impl GroundState {
    pub fn eval(&self, x: f64) -> f64 {
        (PI * x).sin().powi(self.sin_power as i32) * (PI * x).cos().powi(self.cos_power as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryClass {
    pub tag: ClassTag,
    /// Admissible values of B(E) for the translation x -> x + 1.
    pub target_multipliers: Vec<i8>,
    pub ground_state: GroundState,
    pub l: [u32; 4],
}

impl BoundaryClass {
    /// Class D needs l0, l1 >= 1, class D* exactly one of them zero and
    /// class D** both zero. With l0 = 0 < l1 the roles of 0 and 1/2 swap.
    pub fn of(l: &CouplingVector) -> Self {
        let [l0, l1, ..] = l.l;
        let (tag, targets, gs) = match (l0 >= 1, l1 >= 1) {
            (true, true) => {
                let s = if (l0 + l1) % 2 == 0 { 1 } else { -1 };
                (ClassTag::D, vec![s], GroundState { sin_power: l0 + 1, cos_power: l1 + 1 })
            }
            (true, false) => (ClassTag::Dstar, vec![1, -1], GroundState { sin_power: l0 + 1, cos_power: 0 }),
            (false, true) => (ClassTag::Dstar, vec![1, -1], GroundState { sin_power: 0, cos_power: l1 + 1 }),
            (false, false) => (ClassTag::DstarStar, vec![1, -1], GroundState { sin_power: 0, cos_power: 0 }),
        };
        BoundaryClass { tag, target_multipliers: targets, ground_state: gs, l: l.l }
    }

    /// Offset and spacing of the lattice that int Q1/sqrt(-Q) dE must hit,
    /// given the sign B(E0) at the base root.
    pub fn lattice(&self, base_sign: i8) -> (C, C) {
        let i2pi = C::new(0.0, 2.0 * PI);
        match self.tag {
            ClassTag::D => {
                let shift = if base_sign < 0 { 1 } else { 0 };
                (i2pi * f64::from(self.l[0] + self.l[1] + shift), 2.0 * i2pi)
            }
            _ => (C::new(0.0, 0.0), i2pi),
        }
    }
}

/// The p = 0 eigenvalue with index m in the class of l.
pub fn trig_eigenvalue(m: u32, l: &CouplingVector) -> f64 {
    let [l0, l1, ..] = l.l;
    let k = match BoundaryClass::of(l).tag {
        ClassTag::D => 2 * m + l0 + l1 + 2,
        ClassTag::Dstar => m + l0.max(l1) + 1,
        ClassTag::DstarStar => m,
    };
    let s: f64 = l.strengths().iter().sum();
    PI * PI * f64::from(k).powi(2) - PI * PI / 3.0 * s
}

#[derive(Clone, Debug, Serialize)]
pub struct Eigencondition {
    pub e: C,
    /// Distance of the integral to the nearest admissible lattice point.
    pub residual: C,
    pub integral: C,
    /// d(integral)/dE = Q1(E)/sqrt(-Q(E)) on the branch used.
    pub derivative: C,
    pub lattice_index: i64,
    pub lattice_period: C,
    pub base_point: C,
    pub base_sign: i8,
    pub sqrt_minus_q: C,
}

/// The eigenvalue condition at E against a known base root and sign.
pub fn eigencondition_from_base(e: C, class: &BoundaryClass, base: (C, i8), curve: &SpectralCurve) -> Result<Eigencondition> {
    let scale = curve.scale();
    if curve.is_root(e, 1e-7) {
        return Err(Error::AtRoot(format!(
            "{e}; nonrepeated eigenvalues come from the invariant-space diagonalization"
        )));
    }
    let (e0, sign0) = base;
    let path = route(e0, e, &curve.roots, ROUTE_CLEAR * scale).or_else(|_| route(e0, e, &curve.roots, ROUTE_MIN * scale))?;
    let (integral, y) = hyperelliptic_integral(&curve.q1, &curve.q, &path, false)?;
    let (offset, period) = class.lattice(sign0);
    let k = ((integral - offset) / period).re.round();
    Ok(Eigencondition {
        e,
        residual: integral - offset - period * k,
        integral,
        derivative: curve.q1.eval(e) / y,
        lattice_index: k as i64,
        lattice_period: period,
        base_point: e0,
        base_sign: sign0,
        sqrt_minus_q: y,
    })
}

/// Residual of int_{E0}^{E} Q1/sqrt(-Q) dE against the admissible lattice of
/// the class; zero exactly when B(E) is an admissible multiplier.
pub fn eigencondition(e: C, class: &BoundaryClass, curve: &SpectralCurve, xi: &XiExpansion, ctx: &EllipticContext) -> Result<Eigencondition> {
    let base = choose_base(curve, xi, ctx, Period::ONE)?;
    eigencondition_from_base(e, class, base, curve)
}

/// Damped Newton on the eigencondition. The lattice point is re-read at every
/// iterate, so callers must start close to the wanted eigenvalue.
pub fn solve_eigencondition(guess: C, class: &BoundaryClass, base: (C, i8), curve: &SpectralCurve) -> Result<Eigencondition> {
    let mut cur = eigencondition_from_base(guess, class, base, curve)?;
    for _ in 0..MAX_NEWTON {
        if cur.residual.norm() < NEWTON_TOL {
            return Ok(cur);
        }
        let step = -cur.residual / cur.derivative;
        let mut t = 1.0;
        loop {
            match eigencondition_from_base(cur.e + step * t, class, base, curve) {
                Ok(next) if next.residual.norm() < cur.residual.norm() => {
                    cur = next;
                    break;
                }
                _ => {
                    t *= 0.5;
                    if t < 1e-4 {
                        return if cur.residual.norm() < ACCEPT_TOL {
                            Ok(cur)
                        } else {
                            Err(Error::NoConvergence(format!("Newton stalled at E = {} (residual {:.3e})", cur.e, cur.residual.norm())))
                        };
                    }
                }
            }
        }
    }
    if cur.residual.norm() < ACCEPT_TOL {
        Ok(cur)
    } else {
        Err(Error::NoConvergence(format!("Newton did not converge from {guess}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleFlags {
    pub near_q_root: bool,
    pub near_q1_root: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenTrajectory {
    pub m: u32,
    pub class: ClassTag,
    pub p_samples: Vec<C>,
    pub e_values: Vec<C>,
    pub residuals: Vec<f64>,
    pub flags: Vec<SampleFlags>,
    /// Set when the path could not be followed to its end.
    pub diagnostic: Option<String>,
}

/// Elliptic data at the nome p.
pub struct NomeData {
    pub ctx: EllipticContext,
    pub xi: XiExpansion,
    pub curve: SpectralCurve,
}

impl NomeData {
    pub fn new(l: &CouplingVector, p: C) -> Result<Self> {
        let ctx = context_from_nome(p)?;
        let xi = compute_xi(l, &ctx)?;
        let curve = compute_curve(&xi, &ctx)?;
        Ok(NomeData { ctx, xi, curve })
    }
}

pub fn singularity_flags(e: C, curve: &SpectralCurve) -> SampleFlags {
    SampleFlags {
        near_q_root: curve.q.eval(e).norm() < FLAG_TOL * curve.q.eval_scale(e),
        near_q1_root: curve.q1.eval(e).norm() < FLAG_TOL * curve.q1.eval_scale(e),
    }
}

fn solve_at(l: &CouplingVector, class: &BoundaryClass, p: C, guess: C) -> Result<(Eigencondition, SampleFlags)> {
    let d = NomeData::new(l, p)?;
    let base = choose_base(&d.curve, &d.xi, &d.ctx, Period::ONE)?;
    let sol = solve_eigencondition(guess, class, base, &d.curve)?;
    // a converged step must not have slid to a neighbouring lattice point
    if ((sol.e - guess) * sol.derivative).norm() > 0.5 * sol.lattice_period.norm() {
        return Err(Error::NoConvergence(format!("step from {guess} jumped to {}", sol.e)));
    }
    Ok((sol.clone(), singularity_flags(sol.e, &d.curve)))
}

/// Follows the eigenvalue seeded by `trig_eigenvalue(m, l)` at p = 0 along
/// `p_path`, subdividing steps where Newton fails. Trajectories start at
/// p = 0 implicitly; the first leg is ramped from there.
pub fn continue_eigenvalue(m: u32, l: &CouplingVector, p_path: &[C]) -> Result<EigenTrajectory> {
    let class = BoundaryClass::of(l);
    let e_trig = C::new(trig_eigenvalue(m, l), 0.0);
    let mut traj = EigenTrajectory {
        m,
        class: class.tag,
        p_samples: vec![],
        e_values: vec![],
        residuals: vec![],
        flags: vec![],
        diagnostic: None,
    };
    let mut hist: Vec<(C, C)> = vec![(C::new(0.0, 0.0), e_trig)];
    for &target in p_path {
        if target.norm() >= 1.0 {
            return Err(Error::Invalid(format!("nome {target} must satisfy |p| < 1")));
        }
        if target.norm() == 0.0 {
            traj.p_samples.push(target);
            traj.e_values.push(e_trig);
            traj.residuals.push(0.0);
            traj.flags.push(SampleFlags::default());
            hist = vec![(target, e_trig)];
            continue;
        }
        let from = hist.last().unwrap().0;
        let mut done = 0.0;
        let mut h: f64 = if from.norm() == 0.0 { (START_MAX / target.norm()).min(1.0) } else { 1.0 };
        let mut last = None;
        while done < 1.0 {
            let frac = (done + h).min(1.0);
            let p = from + (target - from) * frac;
            let guess = predict(&hist, p);
            match solve_at(l, &class, p, guess) {
                Ok(s) => {
                    hist.push((p, s.0.e));
                    if hist.len() > 3 {
                        hist.remove(0);
                    }
                    done = frac;
                    last = Some(s);
                    h = (2.0 * h).min(1.0);
                }
                Err(err) => {
                    h *= 0.5;
                    if h < MIN_FRACTION {
                        traj.diagnostic = Some(format!("stopped near p = {p}: {err} (possible singular point)"));
                        return Ok(traj);
                    }
                }
            }
        }
        let (sol, flags) = last.unwrap();
        traj.p_samples.push(target);
        traj.e_values.push(sol.e);
        traj.residuals.push(sol.residual.norm());
        traj.flags.push(flags);
    }
    Ok(traj)
}

/// Linear extrapolation in p from the last two accepted points.
fn predict(hist: &[(C, C)], p: C) -> C {
    match hist {
        [.., (p0, e0), (p1, e1)] if (p1 - p0).norm() > 0.0 => e1 + (e1 - e0) / (p1 - p0) * (p - p1),
        [.., (_, e1)] => *e1,
        [] => unreachable!(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BandSample {
    pub e: f64,
    pub abs_multiplier: f64,
    pub in_band: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandStructure {
    /// The 2g+1 real roots of Q in increasing order.
    pub edges: Vec<f64>,
    /// Gaps (lo, hi); the first has lo = -infinity.
    pub gaps: Vec<(f64, f64)>,
    pub samples: Vec<BandSample>,
    /// Every band sample has |B| = 1 and every gap sample |B| != 1.
    pub consistent: bool,
}

/// Gap edges of the real operator (l0 = l1 = 0, tau in Z + iR), checked by
/// |B(E)| at band and gap midpoints.
pub fn band_structure(l: &CouplingVector, ctx: &EllipticContext) -> Result<BandStructure> {
    if l.l[0] != 0 || l.l[1] != 0 {
        return Err(Error::Invalid(format!("bands need l0 = l1 = 0, got {l}")));
    }
    if (ctx.tau.re - ctx.tau.re.round()).abs() > 1e-12 {
        return Err(Error::Invalid(format!("bands need Re tau integral, got tau = {}", ctx.tau)));
    }
    let xi = compute_xi(l, ctx)?;
    let curve = compute_curve(&xi, ctx)?;
    let scale = curve.scale();
    if let Some(r) = curve.roots.iter().find(|r| r.im.abs() > REAL_TOL * scale) {
        return Err(Error::Invalid(format!("root {r} of Q is not real; tau and couplings do not give a real potential")));
    }
    let mut edges: Vec<f64> = curve.roots.iter().map(|r| r.re).collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut gaps = vec![(f64::NEG_INFINITY, edges[0])];
    for w in edges[1..].chunks(2) {
        gaps.push((w[0], w[1]));
    }
    let mut probes = vec![(edges[0] - (edges[edges.len() - 1] - edges[0]).max(1.0), false)];
    for (i, w) in edges.windows(2).enumerate() {
        probes.push((0.5 * (w[0] + w[1]), i % 2 == 0));
    }
    probes.push((edges[edges.len() - 1] + (edges[edges.len() - 1] - edges[0]).max(1.0), true));
    let mut samples = vec![];
    let mut consistent = true;
    for (e, in_band) in probes {
        let b = direct_multiplier(C::new(e, 0.0), None, &xi, &curve, ctx, Period::ONE)?.multiplier.norm();
        consistent &= ((b - 1.0).abs() < BAND_TOL) == in_band;
        samples.push(BandSample { e, abs_multiplier: b, in_band });
    }
    Ok(BandStructure { edges, gaps, samples, consistent })
}

/// Trigonometric-limit family: cos-type (even) or sin-type (odd).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    Diamond,
    Box,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonrepeatedEigenvalue {
    pub e: C,
    /// f(x + 1) = shift_sign f(x).
    pub shift_sign: i8,
    /// f(-x) = reflection_sign f(x).
    pub reflection_sign: i8,
    pub family: Family,
}

/// Eigenvalues of H on the invariant space, with the symmetry of their
/// eigenfunctions. Only meaningful for l0 = l1 = 0, where these functions
/// are smooth on the real line.
pub fn nonrepeated_eigenvalues(l: &CouplingVector, ctx: &EllipticContext) -> Result<Vec<NonrepeatedEigenvalue>> {
    if BoundaryClass::of(l).tag != ClassTag::DstarStar {
        return Err(Error::Invalid(format!("nonrepeated eigenvalues are defined here for l0 = l1 = 0, got {l}")));
    }
    let basis = build_invariant_space(l);
    let h = hamiltonian_matrix(&basis, ctx)?;
    let mut out = vec![];
    for (block, m) in basis.blocks.iter().zip(&h.blocks) {
        let a = block.elements[0].alpha;
        let reflection_sign = if (a[0] + a[1] + a[2]).rem_euclid(2) == 0 { 1 } else { -1 };
        for e in characteristic_polynomial(m).roots() {
            out.push(NonrepeatedEigenvalue {
                e,
                shift_sign: block.parity.0,
                reflection_sign,
                family: if reflection_sign > 0 { Family::Diamond } else { Family::Box },
            });
        }
    }
    out.sort_by(|a, b| a.e.re.partial_cmp(&b.e.re).unwrap());
    Ok(out)
}

/// Frobenius coefficients of Lambda_sym = Lambda(x) - (-1)^l0 Lambda(-x)
/// about a pole: f = A t^-l (1 + ...) + B t^(l+1) (1 + ...).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrobeniusSplit {
    pub singular: f64,
    pub regular: f64,
    /// |A| / |B|.
    pub ratio: f64,
    /// |A| t^-l / (|B| t^(l+1)) at the probe distance t.
    pub local_ratio: f64,
}

/// None where the coupling at that pole vanishes.
#[derive(Clone, Debug, Serialize)]
pub struct SymRegularity {
    pub at_zero: Option<FrobeniusSplit>,
    pub at_half: Option<FrobeniusSplit>,
}

pub fn lambda_sym_regularity(xi: &XiExpansion, ctx: &EllipticContext, e: C, y: C) -> Result<SymRegularity> {
    let l = xi.coupling;
    let q = |x: C| Ok(l.potential(ctx, x)? - e);
    let anchor = [0.1, 0.15, 0.2, 0.25, 0.3]
        .iter()
        .map(|f| C::new(0.25, f * ctx.tau.im))
        .map(|x| {
            let h = xi.jet(ctx, x, e, 2)?;
            Ok((x, h.value().norm() / h.deriv(1).norm().max(1e-300)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap()
        .0;
    let start = monodromy::lambda_state(xi, ctx, anchor, e, y)?;
    let at_quarter = carry(&q, anchor, C::new(0.25, 0.0), start)?;
    let at_minus = carry(&q, anchor, C::new(-0.25, 0.0), start)?;
    let s = if l.l[0] % 2 == 0 { 1.0 } else { -1.0 };
    let sym = [at_quarter[0] - s * at_minus[0], at_quarter[1] + s * at_minus[1]];
    let split = |m: usize, centre: f64| -> Result<Option<FrobeniusSplit>> {
        let lv = l.l[m];
        if lv == 0 {
            return Ok(None);
        }
        let toward = if centre < 0.25 { centre + FROBENIUS_AT } else { centre - FROBENIUS_AT };
        let f = carry(&q, C::new(0.25, 0.0), C::new(toward, 0.0), sym)?;
        let t = C::new(toward - centre, 0.0);
        let r = regular_frobenius(lv, &potential_laurent(&l, ctx, m, FROBENIUS_TERMS as i32), e, t);
        // W(t^-l, t^(l+1)) = 2l + 1
        let singular = (f[0] * r[1] - f[1] * r[0]).norm() / f64::from(2 * lv + 1);
        let regular = (f[0] / r[0]).norm();
        let ratio = singular / regular.max(1e-300);
        Ok(Some(FrobeniusSplit { singular, regular, ratio, local_ratio: ratio * FROBENIUS_AT.powi(-(2 * lv as i32 + 1)) }))
    };
    Ok(SymRegularity { at_zero: split(0, 0.0)?, at_half: split(1, 0.5)? })
}

/// RK4 transport of (f, f') along the segment a -> b.
fn carry<Q: Fn(C) -> Result<C>>(q: &Q, a: C, b: C, y0: [C; 2]) -> Result<[C; 2]> {
    let len = (b - a).norm();
    let steps = (len / ODE_STEP).ceil().max(1.0) as usize;
    let out = ode::integrate_linear(q, a, b - a, y0, len / steps as f64, steps)?;
    Ok(*out.last().unwrap())
}

/// (f, f') at t for the solution t^(l+1)(1 + ...) of f'' = (u - E) f, where
/// u has the Laurent series `u` with leading term l(l+1)/t^2.
fn regular_frobenius(l: u32, u: &crate::laurent::Laurent, e: C, t: C) -> [C; 2] {
    let s = f64::from(l) + 1.0;
    let ll = f64::from(l * (l + 1));
    let mut a = vec![C::new(1.0, 0.0)];
    for k in 1..FROBENIUS_TERMS {
        let mut rhs = C::new(0.0, 0.0);
        for (j, aj) in a.iter().enumerate() {
            rhs += u.coeff(k as i32 - 2 - j as i32) * aj;
        }
        if k >= 2 {
            rhs -= e * a[k - 2];
        }
        let kf = k as f64;
        a.push(rhs / ((s + kf) * (s + kf - 1.0) - ll));
    }
    let mut v = C::new(0.0, 0.0);
    let mut d = C::new(0.0, 0.0);
    for (k, ak) in a.iter().enumerate() {
        let p = s + k as f64;
        v += ak * t.powf(p);
        d += ak * p * t.powf(p - 1.0);
    }
    [v, d]
}

mod common;

use common::*;
use fingap_core::elliptic::{make_context, EllipticContext};
use fingap_core::heun_map::*;
use fingap_core::monodromy::{direct_multiplier, Period};
use fingap_core::spectral_curve::{compute_curve, SpectralCurve};
use fingap_core::xi_solver::{compute_xi, XiExpansion};
use fingap_core::CouplingVector;
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn setup(l: [u32; 4], tau: C) -> (EllipticContext, XiExpansion, SpectralCurve) {
    let ctx = make_context(tau, 64).unwrap();
    let xi = compute_xi(&CouplingVector::from_u32(l).unwrap(), &ctx).unwrap();
    let curve = compute_curve(&xi, &ctx).unwrap();
    (ctx, xi, curve)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip(
        l in prop::array::uniform4(0u32..5).prop_filter("nonzero", |l| l.iter().sum::<u32>() > 0),
        er in -50.0f64..50.0, ei in -50.0f64..50.0,
        tr in -0.5f64..0.5, ti in 0.7f64..2.0,
    ) {
        let ctx = make_context(c(tr, ti), 64).unwrap();
        let cl = CouplingVector::from_u32(l).unwrap();
        let e = c(er, ei);
        let h = ino_to_heun(&cl, e, &ctx);
        prop_assert!(h.fuchs_defect().norm() < 1e-10);
        prop_assert!((h.t * h.a - 1.0).norm() < 1e-12);
        let (back, e2) = heun_to_ino(&h, &ctx).unwrap();
        prop_assert_eq!(back.l, l);
        prop_assert!((e2 - e).norm() < 1e-10 * e.norm().max(1.0));
    }
}

#[test]
fn half_integer_readings() {
    let ctx = make_context(c(0.0, 2.0), 64).unwrap();
    let h = ino_to_heun(&CouplingVector::from_u32([0, 0, 0, 1]).unwrap(), c(2.0, 0.0), &ctx);
    assert!((h.alpha - h.beta - 1.5).norm() < 1e-15);
    assert_eq!(heun_to_ino(&h, &ctx).unwrap().0.l, [0, 0, 0, 1]);
    // gamma = 1/2 reads as l0 = -1, which normalizes to 0
    let mut g = h;
    g.gamma = c(0.5, 0.0);
    g.alpha -= 0.5;
    g.beta -= 0.5;
    let (l, _) = heun_to_ino(&g, &ctx).unwrap();
    assert_eq!(l.l, [0, 0, 0, 1]);
    assert!(l.normalized);
    let mut bad = h;
    bad.beta += 0.1;
    assert!(heun_to_ino(&bad, &ctx).is_err());
    let mut wrong_t = h;
    wrong_t.t *= 1.5;
    assert!(heun_to_ino(&wrong_t, &ctx).is_err());
}

#[test]
fn correspondence_table() {
    for tau in [c(0.0, 1.3), c(0.4, 1.1)] {
        let ctx = make_context(tau, 64).unwrap();
        let a = modulus_a(&ctx);
        assert!(w_of_x(&ctx, c(1e-5, 0.0)).unwrap().norm() < 1e-8);
        assert!((w_of_x(&ctx, c(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-8);
        assert!((w_of_x(&ctx, (tau + 1.0) / 2.0).unwrap() - 1.0 / a).norm() < 1e-8);
        assert!(w_of_x(&ctx, tau / 2.0 + 1e-4).unwrap().norm() > 1e6);
    }
}

#[test]
fn real_period_maps_to_the_cycle_around_zero_and_one() {
    for tau in [c(0.0, 1.3), c(0.4, 1.1), c(-0.3, 0.9)] {
        let ctx = make_context(tau, 64).unwrap();
        for eps in [c(0.0, -0.03), c(0.02, -0.05)] {
            assert_eq!(cycle_winding_numbers(&ctx, eps, 512).unwrap(), [1, 1, 0], "{tau} {eps}");
            // the mirror segment traverses the same loop backwards
            assert_eq!(cycle_winding_numbers(&ctx, -eps, 512).unwrap(), [-1, -1, 0], "{tau} {eps}");
        }
    }
}

#[test]
fn scaled_polynomials_reproduce_q() {
    for l in [[0, 0, 0, 1], [2, 1, 0, 0], [1, 1, 1, 1]] {
        let (ctx, _, curve) = setup(l, c(0.2, 1.2));
        let cl = CouplingVector::from_u32(l).unwrap();
        let (qt, q1t) = scaled_polynomials(&cl, &curve, &ctx);
        assert!((qt.leading() - 1.0).norm() < 1e-9 && (q1t.leading() - 1.0).norm() < 1e-9);
        let k = 4.0 * (ctx.e_values[2] - ctx.e_values[1]);
        let g = curve.genus as i32;
        for e in [c(1.0, 2.0), c(-30.0, 5.0), c(12.0, -40.0)] {
            let q = ino_to_heun(&cl, e, &ctx).q;
            assert!(rel(k.powi(2 * g + 1) * qt.eval(q), curve.q.eval(e)) < 1e-9);
            assert!(rel(k.powi(g) * q1t.eval(q), curve.q1.eval(e)) < 1e-9);
        }
    }
}

#[test]
fn cycle_eigenvalues() {
    for l in [[0, 0, 0, 1], [2, 1, 0, 0], [1, 0, 1, 1]] {
        let (ctx, xi, curve) = setup(l, c(0.1, 1.3));
        let cl = CouplingVector::from_u32(l).unwrap();
        let branch = if (l[0] + l[1]) % 2 == 0 { 1.0 } else { -1.0 };
        for e in [c(3.0, 7.0), c(-20.0, 1.0)] {
            let q = ino_to_heun(&cl, e, &ctx).q;
            let m = cycle_monodromy_eigenvalues(q, &cl, &curve, &xi, &ctx).unwrap_or_else(|err| panic!("{l:?} {e} {:?} {err}", curve.roots));
            assert!(rel(m.e_star, e) < 1e-12);
            assert!((m.eigenvalues[0] * m.eigenvalues[1] - 1.0).norm() < 1e-10);
            // the q-plane integral gives the same pair
            let s = branch * m.base_sign as f64;
            let pair = [s * m.q_integral.exp(), s * (-m.q_integral).exp()];
            let same = |x: [C; 2], y: [C; 2]| (x[0] - y[0]).norm() + (x[1] - y[1]).norm() < 1e-7 * (1.0 + x[0].norm() + x[1].norm());
            assert!(same(pair, m.eigenvalues) || same([pair[1], pair[0]], m.eigenvalues), "{l:?}: {pair:?} {:?}", m.eigenvalues);
            if l == [0, 0, 0, 1] {
                let d = direct_multiplier(e, None, &xi, &curve, &ctx, Period::ONE).unwrap().multiplier;
                let hit = m.eigenvalues.iter().any(|v| (v - branch * d).norm() < 1e-7 * v.norm());
                assert!(hit, "{d} vs {:?}", m.eigenvalues);
            }
        }
        let q0 = m_base(&cl, &curve, &xi, &ctx);
        let at = cycle_monodromy_eigenvalues(q0, &cl, &curve, &xi, &ctx).unwrap();
        let want = branch * at.base_sign as f64;
        assert!(at.eigenvalues.iter().all(|v| (v - want).norm() < 1e-14), "{:?}", at.eigenvalues);
        let slope = ino_to_heun(&cl, c(1.0, 0.0), &ctx).q - ino_to_heun(&cl, c(0.0, 0.0), &ctx).q;
        let gap = |d: f64| {
            let m = cycle_monodromy_eigenvalues(q0 + d * curve.scale() * slope, &cl, &curve, &xi, &ctx).unwrap();
            (m.eigenvalues[0] - want).norm()
        };
        // the pair closes in on the base value like sqrt(q* - q0)
        assert!(gap(1e-6) < gap(1e-2) / 30.0);
    }
}

fn m_base(l: &CouplingVector, curve: &SpectralCurve, xi: &XiExpansion, ctx: &EllipticContext) -> C {
    let (e0, _) = fingap_core::monodromy::choose_base(curve, xi, ctx, Period::ONE).unwrap();
    ino_to_heun(l, e0, ctx).q
}

#[test]
fn roots_of_scaled_q_are_rejected() {
    let (ctx, xi, curve) = setup([0, 0, 0, 1], c(0.0, 1.3));
    let cl = CouplingVector::from_u32([0, 0, 0, 1]).unwrap();
    let q = ino_to_heun(&cl, curve.roots[1], &ctx).q;
    assert!(cycle_monodromy_eigenvalues(q, &cl, &curve, &xi, &ctx).is_err());
}

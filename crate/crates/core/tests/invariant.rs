mod common;

use common::*;
use fingap_core::elliptic::make_context;
use fingap_core::invariant_space::*;
use fingap_core::spectral_curve::{compute_curve, root_radius};
use fingap_core::xi_solver::compute_xi;
use fingap_core::CouplingVector;
use proptest::prelude::*;

fn cv(l: [u32; 4]) -> CouplingVector {
    CouplingVector::from_u32(l).unwrap()
}

#[test]
fn laurent_and_collocation_matrices_agree() {
    let ctx = make_context(c(0.25, 1.3), 64).unwrap();
    for l in [[0, 0, 0, 1], [2, 1, 0, 0], [1, 1, 1, 1], [0, 2, 1, 0]] {
        let basis = build_invariant_space(&cv(l));
        let a = invariant_polynomial(&hamiltonian_matrix(&basis, &ctx).unwrap());
        let b = invariant_polynomial(&hamiltonian_matrix_collocation(&basis, &ctx).unwrap());
        assert!(poly_error(&b, &a, root_radius(&a)) < 1e-8, "{l:?}");
    }
}

#[test]
fn lame_two_block_is_explicit() {
    // H 1 = 6 wp and H wp = g2 / 2 for u = 6 wp
    let ctx = make_context(c(0.1, 1.1), 64).unwrap();
    let basis = build_invariant_space(&cv([2, 0, 0, 0]));
    let h = hamiltonian_matrix(&basis, &ctx).unwrap();
    let m = &h.blocks[0];
    assert!(m[(0, 0)].norm() < 1e-12);
    assert!((m[(1, 0)] - 6.0).norm() < 1e-12);
    assert!(rel(m[(0, 1)], ctx.g2 / 2.0) < 1e-12);
    assert!(m[(1, 1)].norm() < 1e-12);
}

#[test]
fn residual_is_small_on_every_block() {
    let ctx = make_context(c(0.0, 1.0), 64).unwrap();
    for l in [[3, 0, 0, 0], [4, 0, 1, 0], [2, 2, 2, 2]] {
        let h = hamiltonian_matrix(&build_invariant_space(&cv(l)), &ctx).unwrap();
        assert!(h.residual < 1e-10, "{l:?}: {}", h.residual);
    }
}

fn arb_l() -> impl Strategy<Value = [u32; 4]> {
    prop::array::uniform4(0u32..4).prop_filter("nonzero", |l| l.iter().sum::<u32>() > 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariant_polynomial_equals_curve(l in arb_l(), re in -0.5f64..0.5, im in 0.8f64..1.6) {
        let ctx = make_context(c(re, im), 64).unwrap();
        let l = cv(l);
        let basis = build_invariant_space(&l);
        prop_assert_eq!(basis.dim, dimension_formula(&l));
        let p = invariant_polynomial(&hamiltonian_matrix(&basis, &ctx).unwrap());
        let curve = compute_curve(&compute_xi(&l, &ctx).unwrap(), &ctx).unwrap();
        prop_assert_eq!(p.degree(), curve.q.degree());
        prop_assert!(poly_error(&p, &curve.q, root_radius(&curve.q)) < 1e-7);
    }
}

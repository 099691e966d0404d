use fingap_wasm::{curve_view, floquet_sweep, potential_profile};

#[test]
fn lame_curve_has_roots_minus_e() {
    let v = curve_view([0, 0, 0, 1], 0.0, 2.0).unwrap();
    assert_eq!(v.genus, 1);
    let mut minus_e: Vec<f64> = v.e_values.iter().map(|z| -z[0]).collect();
    minus_e.sort_by(f64::total_cmp);
    for (r, m) in v.roots.iter().zip(&minus_e) {
        assert!((r[0] - m).abs() < 1e-9 * m.abs());
    }
}

#[test]
fn sweep_sees_the_bands() {
    let v = curve_view([0, 0, 0, 1], 0.0, 2.0).unwrap();
    let r: Vec<f64> = v.roots.iter().map(|z| z[0]).collect();
    let s = floquet_sweep([0, 0, 0, 1], 0.0, 2.0, r[0] - 5.0, r[2] + 5.0, 301).unwrap();
    for (k, e) in s.e.iter().enumerate() {
        let g = s.growth[k];
        if g.is_nan() {
            continue;
        }
        let in_band = (*e > r[0] && *e < r[1]) || *e > r[2];
        let margin = r.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
        if margin < 1e-2 {
            continue;
        }
        assert_eq!(g < 1e-8, in_band, "E = {e}, growth {g}");
        if in_band {
            assert!(s.trace_re[k].abs() <= 2.0 + 1e-8 && s.trace_im[k].abs() < 1e-8);
        }
    }
}

#[test]
fn profile_is_periodic_and_real_off_the_poles() {
    let p = potential_profile([0, 0, 1, 1], 0.0, 1.5, 0.0, 101).unwrap();
    assert!((p.re[0] - p.re[100]).abs() < 1e-9 * p.re[0].abs().max(1.0));
    assert!(p.im.iter().all(|v| v.abs() < 1e-9));
    let q = potential_profile([1, 0, 0, 0], 0.0, 1.5, 0.0, 11).unwrap();
    assert!(q.re[0].is_nan());
}

#[test]
fn bad_inputs_are_reported() {
    assert!(curve_view([0, 0, 0, 0], 0.0, 1.0).is_err());
    assert!(curve_view([0, 0, 0, 1], 0.0, -1.0).is_err());
    assert!(floquet_sweep([0, 0, 0, 1], 0.0, 1.0, 1.0, 0.0, 10).is_err());
    assert!(potential_profile([0, 0, 0, 1], 0.0, 1.0, 0.0, 1).is_err());
}

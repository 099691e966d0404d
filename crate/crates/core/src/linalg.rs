use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

pub type CMat = DMatrix<C>;

/// Scales each row to unit max-norm; returns the scaled copy.
pub fn equilibrate_rows(a: &CMat) -> CMat {
    let mut out = a.clone();
    for mut row in out.row_iter_mut() {
        let m = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if m > 0.0 {
            row /= C::new(m, 0.0);
        }
    }
    out
}

/// Scales columns to unit 2-norm; returns the copy and the scale factors
/// (original column = scaled column * factor).
pub fn equilibrate_cols(a: &CMat) -> (CMat, Vec<f64>) {
    let mut out = a.clone();
    let mut f = Vec::with_capacity(a.ncols());
    for mut col in out.column_iter_mut() {
        let m = col.norm();
        let s = if m > 0.0 { m } else { 1.0 };
        col /= C::new(s, 0.0);
        f.push(s);
    }
    (out, f)
}

/// Singular values in decreasing order and the matching right singular
/// vectors as columns.
pub fn svd_sorted(a: &CMat) -> (Vec<f64>, CMat) {
    let (r, c) = a.shape();
    // pad short matrices so that V carries a full basis
    let work = if r < c {
        let mut p = CMat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let s: Vec<f64> = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = CMat::zeros(c, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        for j in 0..c {
            v[(j, k)] = v_t[(i, j)].conj();
        }
    }
    (s, v)
}

/// Least-squares solution of A X = B with condition estimate.
pub fn least_squares(a: &CMat, b: &CMat) -> (CMat, f64) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let x = svd.solve(b, smax * 1e-15).expect("svd has both factors");
    (x, smax / smin)
}

/// Monic characteristic polynomial det(E - M) via Hessenberg reduction.
pub fn characteristic_polynomial(m: &CMat) -> Poly {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    if n == 0 {
        return Poly::constant(C::new(1.0, 0.0));
    }
    let h = m.clone().hessenberg().h();
    let mut p: Vec<Poly> = vec![Poly::constant(C::new(1.0, 0.0))];
    for k in 0..n {
        let lin = Poly::new(vec![-h[(k, k)], C::new(1.0, 0.0)]);
        let mut pk = lin.mul(&p[k]);
        let mut prod = C::new(1.0, 0.0);
        for i in (0..k).rev() {
            prod *= h[(i + 1, i)];
            let term = p[i].scale(h[(i, k)] * prod);
            pk = pk.sub(&term);
        }
        p.push(pk);
    }
    p.pop().unwrap()
}

pub fn determinant(m: &CMat) -> C {
    m.clone().lu().determinant()
}

pub fn to_vec(v: &DVector<C>) -> Vec<C> {
    v.iter().copied().collect()
}

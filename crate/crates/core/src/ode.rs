//! Fixed-step RK4 for `f'' = q(x) f` along a straight segment in the x-plane.

use crate::error::Result;
use num_complex::Complex64 as C;

/// State (f, df/dx) sampled at `x0 + k h dir`, k = 0..=steps.
pub fn integrate_linear<Q>(q: Q, x0: C, dir: C, y0: [C; 2], h: f64, steps: usize) -> Result<Vec<[C; 2]>>
where
    Q: Fn(C) -> Result<C>,
{
    let d = dir / dir.norm();
    // in the arc parameter s: f_ss = d^2 q f, state (f, f_s)
    let rhs = |x: C, y: [C; 2]| -> Result<[C; 2]> { Ok([y[1], d * d * q(x)? * y[0]]) };
    let mut y = [y0[0], y0[1] * d];
    let mut out = Vec::with_capacity(steps + 1);
    out.push([y[0], y[1] / d]);
    for k in 0..steps {
        let x = x0 + d * (k as f64 * h);
        let xm = x + d * (0.5 * h);
        let xe = x + d * h;
        let k1 = rhs(x, y)?;
        let k2 = rhs(xm, [y[0] + k1[0] * (0.5 * h), y[1] + k1[1] * (0.5 * h)])?;
        let k3 = rhs(xm, [y[0] + k2[0] * (0.5 * h), y[1] + k2[1] * (0.5 * h)])?;
        let k4 = rhs(xe, [y[0] + k3[0] * h, y[1] + k3[1] * h])?;
        for j in 0..2 {
            y[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0);
        }
        out.push([y[0], y[1] / d]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_along_diagonal() {
        // f'' = -f, f = cos x
        let dir = C::new(1.0, 1.0);
        let h = 1e-3;
        let n = 1000;
        let out = integrate_linear(|_| Ok(C::new(-1.0, 0.0)), C::new(0.0, 0.0), dir, [C::new(1.0, 0.0), C::new(0.0, 0.0)], h, n)
            .unwrap();
        let x = dir / dir.norm() * (n as f64 * h);
        assert!((out[n][0] - x.cos()).norm() < 1e-11);
        assert!((out[n][1] + x.sin()).norm() < 1e-11);
    }
}

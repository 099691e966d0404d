use crate::elliptic::EllipticContext;
use crate::error::{Error, Result};
use crate::series::Jet;
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// Four integer couplings, stored in nonnegative form.
///
/// A negative entry `l` is replaced by `-l - 1`, which leaves `l(l+1)` and
/// hence the potential unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CouplingVector {
    pub l: [u32; 4],
    pub normalized: bool,
}

impl CouplingVector {
    pub fn new(raw: [i64; 4]) -> Result<Self> {
        let mut l = [0u32; 4];
        let mut changed = false;
        for (k, &v) in raw.iter().enumerate() {
            let n = if v < 0 {
                changed = true;
                -v - 1
            } else {
                v
            };
            l[k] = u32::try_from(n).map_err(|_| Error::Invalid(format!("coupling {v} out of range")))?;
        }
        if l == [0; 4] {
            return Err(Error::ZeroCoupling);
        }
        Ok(CouplingVector { l, normalized: changed })
    }

    pub fn from_u32(l: [u32; 4]) -> Result<Self> {
        Self::new(l.map(i64::from))
    }

    pub fn sum(&self) -> u32 {
        self.l.iter().sum()
    }

    /// l_i (l_i + 1) for each i.
    pub fn strengths(&self) -> [f64; 4] {
        self.l.map(|v| f64::from(v) * f64::from(v + 1))
    }

    /// Couplings sorted in decreasing order (k_0 >= k_1 >= k_2 >= k_3).
    pub fn sorted(&self) -> [u32; 4] {
        let mut k = self.l;
        k.sort_unstable_by(|a, b| b.cmp(a));
        k
    }

    /// Every coupling vector with nonnegative entries summing to 1..=max_sum.
    pub fn all_up_to(max_sum: u32) -> Vec<CouplingVector> {
        let mut out = Vec::new();
        for a in 0..=max_sum {
            for b in 0..=max_sum - a {
                for c in 0..=max_sum - a - b {
                    for d in 0..=max_sum - a - b - c {
                        if a + b + c + d > 0 {
                            out.push(CouplingVector { l: [a, b, c, d], normalized: false });
                        }
                    }
                }
            }
        }
        out
    }

    /// Jet of the potential u(x) = sum l_i(l_i+1) wp(x + omega_i) at x.
    pub fn potential_jet(&self, ctx: &EllipticContext, x: C, len: usize) -> Result<Jet> {
        let s = self.strengths();
        let mut u = Jet::zero(len);
        for i in 0..4 {
            if s[i] == 0.0 {
                continue;
            }
            let mut w = ctx.shifted_wp_jet(i, x, len)?;
            if i > 0 {
                w = w.add_const(ctx.e_values[i - 1]);
            }
            u = &u + &w.scale(C::new(s[i], 0.0));
        }
        Ok(u)
    }

    pub fn potential(&self, ctx: &EllipticContext, x: C) -> Result<C> {
        Ok(self.potential_jet(ctx, x, 1)?.value())
    }
}

impl std::fmt::Display for CouplingVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = self.l;
        write!(f, "({a},{b},{c},{d})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_maps_negative_entries() {
        let c = CouplingVector::new([-3, 0, -1, 2]).unwrap();
        assert_eq!(c.l, [2, 0, 0, 2]);
        assert!(c.normalized);
        assert!(matches!(CouplingVector::new([0, -1, 0, 0]), Err(Error::ZeroCoupling)));
    }

    #[test]
    fn enumeration_count() {
        // compositions of n into 4 nonnegative parts, n = 1..=8
        assert_eq!(CouplingVector::all_up_to(8).len(), 494);
    }
}

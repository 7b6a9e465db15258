//! `D_f`, `G(D_f)` and the Rényi divergence.

use crate::error::{check_len, Error, Result};
use crate::generators::{AdmissiblePair, FGenerator};
use crate::numeric::pairwise_sum;
use crate::probcore::Dist;

/// A divergence value together with a flag telling whether some term used
/// the `q(x) = 0 < p(x)` extension `p(x)·lim f(t)/t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FDivDetail {
    pub value: f64,
    pub used_slope_extension: bool,
}

/// `Σ q f(p/q)` with `0·f(0/0) = 0` and `q = 0 < p` contributing `p·slope_inf`.
pub fn f_div(p: &Dist, q: &Dist, f: &FGenerator) -> Result<f64> {
    f_div_detail(p, q, f).map(|d| d.value)
}

pub fn f_div_detail(p: &Dist, q: &Dist, f: &FGenerator) -> Result<FDivDetail> {
    check_len(p.len(), q.len())?;
    let (value, used_slope_extension) = f_div_raw(p.probs(), q.probs(), f);
    Ok(FDivDetail { value, used_slope_extension })
}

/// Slice-level evaluation shared with the solvers. Lengths must agree.
pub(crate) fn f_div_raw(p: &[f64], q: &[f64], f: &FGenerator) -> (f64, bool) {
    let mut used = false;
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        let t = if qi > 0.0 {
            if pi == 0.0 {
                let f0 = f.eval(0.0);
                if f0 == f64::INFINITY {
                    f64::INFINITY
                } else {
                    qi * f0
                }
            } else {
                qi * f.eval(pi / qi)
            }
        } else if pi > 0.0 {
            used = true;
            let s = f.slope_value();
            if s == f64::INFINITY {
                f64::INFINITY
            } else {
                pi * s
            }
        } else {
            0.0
        };
        if t == f64::INFINITY {
            return (f64::INFINITY, used || (qi == 0.0 && pi > 0.0));
        }
        terms.push(t);
    }
    (pairwise_sum(&terms), used)
}

/// `G(D_f(p‖q))`; a value at or past the domain edge maps to `G(ν⁻)`.
pub fn gf_div(p: &Dist, q: &Dist, pair: &AdmissiblePair) -> Result<f64> {
    Ok(pair.g.eval(f_div(p, q, &pair.f)?))
}

/// `(α−1)⁻¹ log Σ p^α q^{1−α}`, evaluated directly.
pub fn renyi_div(p: &Dist, q: &Dist, alpha: f64) -> Result<f64> {
    check_len(p.len(), q.len())?;
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "renyi_div".into(),
            detail: format!("alpha = {alpha} must lie in (0,1)∪(1,∞)"),
        });
    }
    let terms: Vec<f64> = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| {
            if pi == 0.0 {
                0.0
            } else {
                pi.powf(alpha) * qi.powf(1.0 - alpha)
            }
        })
        .collect();
    let s = pairwise_sum(&terms);
    if s == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let v = s.ln() / (alpha - 1.0);
    // `p = q` can leave the sum a rounding error away from 1
    Ok(if v.abs() < 1e-15 { 0.0 } else { v })
}

//! Closed-form probability bounds for the random face model and the matrix
//! concentration inequalities they are assembled from.
//!
//! Each theorem bound is `1 - (failure term)`, clamped to `[0, 1]`. The raw
//! failure terms and the per-matrix span-failure terms are exposed as well,
//! in log form, so the assembly inequalities can be checked without underflow.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::randmodel::BalanceParam;

/// Constant in the unbalanced hypercontractive bound: `4 / 13122`.
pub const THM3_CONSTANT: f64 = 4.0 / 13_122.0;

fn check_r(r: u64) -> Result<()> {
    if r < 2 {
        return input(format!("bounds need r >= 2, got {r}"));
    }
    Ok(())
}

fn big_r(r: u64) -> f64 {
    1.0 + (r * (r - 1) / 2) as f64
}

fn big_r_prime(r: u64) -> f64 {
    (r * (r - 1) / 2) as f64
}

fn clamp_prob(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `ln(r² e^{-n/r²})`, the log failure term of the balanced bound.
pub fn thm1_ln_failure(r: u64, n: u64) -> Result<f64> {
    check_r(r)?;
    if n == 0 {
        return input("the balanced bound needs n >= 1");
    }
    let r2 = (r * r) as f64;
    Ok(r2.ln() - n as f64 / r2)
}

/// `max(0, 1 - r² exp(-n/r²))` for `p = 1/2`.
pub fn bound_thm1(r: u64, n: u64) -> Result<f64> {
    Ok(clamp_prob(1.0 - thm1_ln_failure(r, n)?.exp()))
}

/// `ln(r² exp(-4p²(1-p)² n / r²))`.
pub fn thm2_ln_failure(p: f64, r: u64, n: u64) -> Result<f64> {
    let b = BalanceParam::interior(p)?;
    check_r(r)?;
    let q = b.p() * (1.0 - b.p());
    let r2 = (r * r) as f64;
    Ok(r2.ln() - 4.0 * q * q * n as f64 / r2)
}

/// `max(0, 1 - r² exp(-4p²(1-p)² n / r²))`.
pub fn bound_thm2(p: f64, r: u64, n: u64) -> Result<f64> {
    Ok(clamp_prob(1.0 - thm2_ln_failure(p, r, n)?.exp()))
}

/// `ln(4 exp((r² - c p²(1-p)² n) / 4))` with `c = 4/13122`.
pub fn thm3_ln_failure(p: f64, r: u64, n: u64) -> Result<f64> {
    let b = BalanceParam::interior(p)?;
    check_r(r)?;
    let q = b.p() * (1.0 - b.p());
    let r2 = (r * r) as f64;
    Ok(4f64.ln() + (r2 - THM3_CONSTANT * q * q * n as f64) / 4.0)
}

/// `max(0, 1 - 4 exp((r² - c p²(1-p)² n) / 4))` with `c = 4/13122`.
pub fn bound_thm3(p: f64, r: u64, n: u64) -> Result<f64> {
    Ok(clamp_prob(1.0 - thm3_ln_failure(p, r, n)?.exp()))
}

/// Inputs to the matrix Chernoff span bound for `s` iid copies of a random
/// vector in `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffParams {
    pub d: f64,
    /// Smallest eigenvalue of the second-moment matrix.
    pub lambda: f64,
    /// Almost-sure bound on the squared norm.
    pub b: f64,
    pub s: f64,
}

impl ChernoffParams {
    fn validate(&self) -> Result<()> {
        if self.b <= 0.0 {
            return input("Chernoff bound needs B > 0");
        }
        if !(self.lambda >= 0.0) || self.lambda > self.b {
            return input(format!("need 0 <= lambda <= B, got lambda = {}, B = {}", self.lambda, self.b));
        }
        if !(self.s >= 1.0) || !(self.d >= 1.0) {
            return input("Chernoff bound needs d >= 1 and s >= 1");
        }
        Ok(())
    }

    /// `ln(d · exp(-λ s / (2B)))`.
    pub fn ln_bound(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.d.ln() - self.lambda * self.s / (2.0 * self.b))
    }
}

/// `min(1, d · exp(-λ s / (2B)))`: probability that the copies fail to span.
pub fn chernoff_span_bound(params: &ChernoffParams) -> Result<f64> {
    Ok(params.ln_bound()?.exp().min(1.0))
}

/// Inputs to Oliveira's lower-tail span bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OliveiraParams {
    pub d: f64,
    /// Hypercontractive parameter, a fourth-to-squared-second moment ratio.
    pub h: f64,
    pub s: f64,
}

impl OliveiraParams {
    /// `ln(2 exp(d/2 - s/(162 h)))`.
    pub fn ln_bound(&self) -> Result<f64> {
        if !(self.h >= 1.0) {
            return input(format!("hypercontractive parameter must be >= 1, got {}", self.h));
        }
        if !(self.s >= 0.0) || !(self.d >= 0.0) {
            return input("Oliveira bound needs d >= 0 and s >= 0");
        }
        Ok(2f64.ln() + self.d / 2.0 - self.s / (162.0 * self.h))
    }
}

/// `min(1, 2 exp(d/2 - s/(162 h)))`.
pub fn oliveira_span_bound(params: &OliveiraParams) -> Result<f64> {
    Ok(params.ln_bound()?.exp().min(1.0))
}

/// `(9 / (p(1-p)))^k`, the hypercontractive bound for a degree-`k` polynomial.
pub fn hyper_h_bound(p: f64, k: u32) -> Result<f64> {
    let b = BalanceParam::interior(p)?;
    Ok((9.0 / (b.p() * (1.0 - b.p()))).powi(k as i32))
}

/// `ln(e^a + e^b)` without overflow or underflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Both sides, in log form, of one theorem's final union-bound step:
/// `ln_sum` is the log of the two span-failure terms added together and
/// `ln_total` the log of the failure term in the theorem statement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assembly {
    pub ln_sum: f64,
    pub ln_total: f64,
}

impl Assembly {
    /// True when `sum <= total` up to a relative slack of `rel_tol`, i.e.
    /// `ln_sum <= ln_total + rel_tol * max(1, |ln_total|)` in log form.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.ln_sum <= self.ln_total + rel_tol * self.ln_total.abs().max(1.0)
    }
}

/// `r e^{-n/(2r)} + R e^{-n/(2R)}` against `r² e^{-n/r²}` (balanced case,
/// matrices `W` and `Z`, Chernoff with `λ = 1`).
pub fn thm1_assembly(r: u64, n: u64) -> Result<Assembly> {
    check_r(r)?;
    let (rf, rr, s) = (r as f64, big_r(r), n as f64);
    let w = ChernoffParams { d: rf, lambda: 1.0, b: rf, s }.ln_bound()?;
    let z = ChernoffParams { d: rr, lambda: 1.0, b: rr, s }.ln_bound()?;
    Ok(Assembly { ln_sum: ln_add_exp(w, z), ln_total: thm1_ln_failure(r, n)? })
}

/// `r e^{-(1-α)n/(2r)} + R' e^{-(1-α)²n/(8R')}` against
/// `r² e^{-(1-α)² n / (4r²)}` (matrices `W` and `Y`, Chernoff).
pub fn thm2_assembly(p: f64, r: u64, n: u64) -> Result<Assembly> {
    let bp = BalanceParam::interior(p)?;
    check_r(r)?;
    let (rf, rp, s) = (r as f64, big_r_prime(r), n as f64);
    let gap = 1.0 - bp.alpha();
    let w = ChernoffParams { d: rf, lambda: gap, b: rf, s }.ln_bound()?;
    let y = ChernoffParams { d: rp, lambda: gap * gap, b: 4.0 * rp, s }.ln_bound()?;
    Ok(Assembly { ln_sum: ln_add_exp(w, y), ln_total: thm2_ln_failure(p, r, n)? })
}

/// `2e^{r/2 - p(1-p)n/1458} + 2e^{R/2 - p²(1-p)²n/13122}` against
/// `4 e^{(r² - c p²(1-p)² n)/4}` (matrices `W` and `Z`, Oliveira).
pub fn thm3_assembly(p: f64, r: u64, n: u64) -> Result<Assembly> {
    check_r(r)?;
    let (rf, rr, s) = (r as f64, big_r(r), n as f64);
    let w = OliveiraParams { d: rf, h: hyper_h_bound(p, 1)?, s }.ln_bound()?;
    let z = OliveiraParams { d: rr, h: hyper_h_bound(p, 2)?, s }.ln_bound()?;
    Ok(Assembly { ln_sum: ln_add_exp(w, z), ln_total: thm3_ln_failure(p, r, n)? })
}

/// Every bound evaluated at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub p: f64,
    pub r: u64,
    pub n: u64,
    /// Balanced bound; only defined at `p = 1/2`.
    pub thm1: Option<f64>,
    pub thm2: f64,
    pub thm3: f64,
}

pub fn bound_row(p: f64, r: u64, n: u64) -> Result<BoundRow> {
    let thm1 = if p == 0.5 && n >= 1 { Some(bound_thm1(r, n)?) } else { None };
    Ok(BoundRow { p, r, n, thm1, thm2: bound_thm2(p, r, n)?, thm3: bound_thm3(p, r, n)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn thm1_examples() {
        let v = bound_thm1(3, 200).unwrap();
        assert!(close(1.0 - v, 9.0 * (-200.0f64 / 9.0).exp(), 1e-15));
        assert!(close(1.0 - v, 2.0103e-9, 1e-13));
        assert_eq!(bound_thm1(2, 1).unwrap(), 0.0);
        assert!(bound_thm1(2, 0).is_err());
        assert!(bound_thm1(1, 10).is_err());
        assert_eq!(bound_thm1(10, 10_000).unwrap(), 1.0);
    }

    #[test]
    fn thm2_examples() {
        // At p = 1/2 the exponent is n/(4r²).
        let ln = thm2_ln_failure(0.5, 3, 500).unwrap();
        assert!(close(ln, 9f64.ln() - 500.0 / 36.0, 1e-12));
        assert!(bound_thm2(0.5, 3, 500).unwrap() < bound_thm1(3, 500).unwrap());
        let v = bound_thm2(0.1, 2, 100_000).unwrap();
        assert!(close(v, 1.0 - 4.0 * (-4.0 * 0.0081 * 1e5 / 4.0f64).exp(), 1e-15));
        assert_eq!(bound_thm2(0.3, 4, 0).unwrap(), 0.0);
        assert!(bound_thm2(0.0, 2, 10).is_err());
        assert!(bound_thm2(1.0, 2, 10).is_err());
    }

    #[test]
    fn thm3_examples() {
        assert!(THM3_CONSTANT >= 0.0003);
        assert!(close(THM3_CONSTANT, 3.048e-4, 1e-7));
        let v = bound_thm3(0.5, 2, 1_000_000).unwrap();
        let expect = 1.0 - 4.0 * ((4.0 - THM3_CONSTANT * 0.0625 * 1e6) / 4.0f64).exp();
        assert!(close(v, expect, 1e-15));
        assert!(close(v, 0.907_143, 1e-6));
        assert_eq!(bound_thm3(0.5, 2, 0).unwrap(), 0.0);
        assert!(bound_thm3(1.0, 2, 10).is_err());
    }

    #[test]
    fn chernoff_examples() {
        let (r, n) = (5.0, 300.0);
        let v = chernoff_span_bound(&ChernoffParams { d: r, lambda: 1.0, b: r, s: n }).unwrap();
        assert!(close(v, r * (-n / (2.0 * r)).exp(), 1e-15));
        let vac = chernoff_span_bound(&ChernoffParams { d: 7.0, lambda: 0.0, b: 3.0, s: 10.0 }).unwrap();
        assert_eq!(vac, 1.0);
        let alpha = 0.36f64;
        let rp = 6.0;
        let v = chernoff_span_bound(&ChernoffParams {
            d: rp,
            lambda: (1.0 - alpha).powi(2),
            b: 4.0 * rp,
            s: 5000.0,
        })
        .unwrap();
        assert!(close(v, rp * (-(1.0 - alpha).powi(2) * 5000.0 / (8.0 * rp)).exp(), 1e-15));
        assert!(chernoff_span_bound(&ChernoffParams { d: 2.0, lambda: 0.0, b: 0.0, s: 1.0 }).is_err());
        assert!(chernoff_span_bound(&ChernoffParams { d: 2.0, lambda: 3.0, b: 2.0, s: 1.0 }).is_err());
    }

    #[test]
    fn oliveira_examples() {
        let (p, r, n) = (0.3f64, 4.0, 1e6);
        let q = p * (1.0 - p);
        let w = oliveira_span_bound(&OliveiraParams { d: r, h: 9.0 / q, s: n }).unwrap();
        assert!(close(w, 2.0 * (r / 2.0 - q * n / 1458.0).exp(), 1e-15));
        let rr = 7.0;
        let z = oliveira_span_bound(&OliveiraParams { d: rr, h: 81.0 / (q * q), s: 3e7 }).unwrap();
        assert!(close(z, 2.0 * (rr / 2.0 - q * q * 3e7 / 13122.0).exp(), 1e-15));
        assert_eq!(oliveira_span_bound(&OliveiraParams { d: 3.0, h: 2.0, s: 0.0 }).unwrap(), 1.0);
        assert!(oliveira_span_bound(&OliveiraParams { d: 3.0, h: 0.5, s: 1.0 }).is_err());
    }

    #[test]
    fn hyper_examples() {
        assert!(close(hyper_h_bound(0.5, 1).unwrap(), 36.0, 1e-12));
        assert_eq!(hyper_h_bound(0.5, 0).unwrap(), 1.0);
        assert!(close(hyper_h_bound(0.5, 2).unwrap(), 1296.0, 1e-9));
        assert!(hyper_h_bound(0.0, 1).is_err());
    }

    #[test]
    fn assemblies_on_a_small_grid() {
        for r in 2..8 {
            for n in [1, 50, 5000] {
                assert!(thm1_assembly(r, n).unwrap().holds(1e-12));
                for p in [0.2, 0.5, 0.8] {
                    assert!(thm2_assembly(p, r, n).unwrap().holds(1e-12));
                    assert!(thm3_assembly(p, r, n).unwrap().holds(1e-12));
                }
            }
        }
    }

    #[test]
    fn balanced_assembly_is_tight_at_two() {
        // r = 2 gives R = 2 and r + R = r², so both sides coincide.
        let a = thm1_assembly(2, 37).unwrap();
        assert!(close(a.ln_sum, a.ln_total, 1e-12));
    }

    #[test]
    fn monotone_and_symmetric() {
        for r in [2u64, 3, 5] {
            let mut prev = [0.0f64; 3];
            for n in (1..400_000).step_by(997) {
                let cur = [bound_thm1(r, n).unwrap(), bound_thm2(0.3, r, n).unwrap(), bound_thm3(0.3, r, n).unwrap()];
                for k in 0..3 {
                    assert!(cur[k] >= prev[k]);
                }
                prev = cur;
                assert_eq!(bound_thm2(0.3, r, n).unwrap(), bound_thm2(0.7, r, n).unwrap());
                assert_eq!(bound_thm3(0.3, r, n).unwrap(), bound_thm3(0.7, r, n).unwrap());
            }
        }
    }

    #[test]
    fn ln_add_exp_matches_direct() {
        assert!(close(ln_add_exp(0.0, 0.0), 2f64.ln(), 1e-15));
        assert!(close(ln_add_exp(-1.0, 2.0), ((-1.0f64).exp() + 2f64.exp()).ln(), 1e-14));
        assert!(close(ln_add_exp(-2000.0, -2000.0), -2000.0 + 2f64.ln(), 1e-12));
    }
}

//! Exact (Clopper–Pearson) binomial confidence intervals.

use statrs::function::beta::beta_reg;

use crate::error::{input, Result};

/// Two-sided Clopper–Pearson interval for `successes` out of `trials` at the
/// given confidence level.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return input("Clopper-Pearson interval needs at least one trial");
    }
    if successes > trials {
        return input(format!("{successes} successes exceed {trials} trials"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return input(format!("confidence {confidence} is not in (0, 1)"));
    }
    let tail = (1.0 - confidence) / 2.0;
    let (k, n) = (successes as f64, trials as f64);
    let low = if successes == 0 { 0.0 } else { beta_quantile(tail, k, n - k + 1.0) };
    let high = if successes == trials { 1.0 } else { beta_quantile(1.0 - tail, k + 1.0, n - k) };
    Ok((low, high))
}

/// Inverse of the regularized incomplete beta function in `x`, by bisection.
fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

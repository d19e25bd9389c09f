//! The random face model: `r` independent signed Bernoulli cut vectors and
//! the convex hull of their cut matrices.
//!
//! Every trial draws from its own counter-based ChaCha stream keyed by
//! `(seed, trial_index)`, so estimates do not depend on scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutgeom::CutVector;
use crate::error::{input, Error, Result};
use crate::lpcert::{build_certificate_matrices, certify_matrices};
use crate::rank::exact_rank;
use crate::stats::clopper_pearson;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_160_501;

pub type TrialStream = ChaCha8Rng;

/// Independent stream for one trial.
pub fn trial_stream(seed: u64, trial_index: u64) -> TrialStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Balance parameter `p` of `SBern(p)` together with `α = (2p - 1)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceParam {
    p: f64,
    alpha: f64,
}

impl BalanceParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return input(format!("balance parameter {p} is not in [0, 1]"));
        }
        let mean = 2.0 * p - 1.0;
        Ok(Self { p, alpha: mean * mean })
    }

    /// Like [`BalanceParam::new`] but also rejects `p ∈ {0, 1}`.
    pub fn interior(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return input(format!("balance parameter {p} must lie strictly inside (0, 1)"));
        }
        Self::new(p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// One `SBern(p, n)` vector. Consumes exactly `n` draws.
pub fn sample_sbern_vector<R: Rng + ?Sized>(p: BalanceParam, n: usize, rng: &mut R) -> Result<CutVector> {
    if n == 0 {
        return input("dimension n must be positive");
    }
    CutVector::new((0..n).map(|_| if rng.random::<f64>() < p.p { 1 } else { -1 }).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceCandidate {
    pub cuts: Vec<CutVector>,
    pub p: f64,
    pub r: usize,
    pub n: usize,
    pub seed: u64,
    pub trial_index: u64,
}

pub fn sample_face_candidate(
    p: BalanceParam,
    r: usize,
    n: usize,
    seed: u64,
    trial_index: u64,
) -> Result<FaceCandidate> {
    if r == 0 {
        return input("number of vertices r must be positive");
    }
    let mut rng = trial_stream(seed, trial_index);
    let cuts = (0..r).map(|_| sample_sbern_vector(p, n, &mut rng)).collect::<Result<_>>()?;
    Ok(FaceCandidate { cuts, p: p.p, r, n, seed, trial_index })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub certified: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateConfig {
    pub p: f64,
    pub r: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

/// Certifies one sampled candidate, re-checking certified ones on the exact
/// elimination path.
fn certify_trial(cfg: &EstimateConfig, p: BalanceParam, t: u64) -> Result<bool> {
    let cand = sample_face_candidate(p, cfg.r, cfg.n, cfg.seed, t)?;
    let mats = build_certificate_matrices(&cand.cuts)?;
    let cert = certify_matrices(&mats)?;
    if cert.is_certified()
        && (exact_rank(&mats.w) != mats.w.cols() || exact_rank(&mats.z) != mats.z.cols())
    {
        return Err(Error::Invariant(format!("trial {t}: certified without full column rank")));
    }
    Ok(cert.is_certified())
}

/// Fraction of `Face(p, r, n)` candidates that pass the certificate. This
/// estimates a lower bound on the probability of a simplicial face.
///
/// `workers = None` uses the global rayon pool; the result is identical for
/// every worker count.
pub fn estimate_face_probability(cfg: &EstimateConfig, workers: Option<usize>) -> Result<MonteCarloEstimate> {
    if cfg.trials == 0 {
        return input("trials must be at least 1");
    }
    if cfg.r < 2 {
        return input("the certificate needs r >= 2");
    }
    if cfg.n == 0 {
        return input("dimension n must be positive");
    }
    if !(cfg.confidence > 0.0 && cfg.confidence < 1.0) {
        return input(format!("confidence {} is not in (0, 1)", cfg.confidence));
    }
    let p = BalanceParam::new(cfg.p)?;

    let count = || -> Result<u64> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| certify_trial(cfg, p, t).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    };
    let certified = match workers {
        None => count()?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Input(format!("cannot start worker pool: {e}")))?
            .install(count)?,
    };

    let (ci_low, ci_high) = clopper_pearson(certified, cfg.trials, cfg.confidence)?;
    Ok(MonteCarloEstimate {
        trials: cfg.trials,
        certified,
        point_estimate: certified as f64 / cfg.trials as f64,
        ci_low,
        ci_high,
        confidence: cfg.confidence,
    })
}

/// Natural log of `(e · 2^(n-1) / r)^r`, the rough number of `r`-vertex
/// simplicial faces.
pub fn log_face_count_estimate(r: u64, n: u64) -> Result<f64> {
    if r == 0 || n == 0 {
        return input("r and n must be positive");
    }
    let ln2 = std::f64::consts::LN_2;
    let too_many = if n - 1 < 64 { r > 1u64 << (n - 1) } else { false };
    if too_many {
        return input(format!("r = {r} exceeds the 2^(n-1) vertices available at n = {n}"));
    }
    let (r, n) = (r as f64, n as f64);
    Ok(r * (1.0 + (n - 1.0) * ln2 - r.ln()))
}

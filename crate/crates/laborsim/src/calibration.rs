//! Monte Carlo calibration of the ranking-preference weight: solve
//! `U(gamma) = target` by noise-aware bisection over seeded replicate
//! estimates of the time-averaged unemployment rate.
//!
//! The market-history weight stays fixed during calibration; only the
//! ranking preference is fitted. All replicate evaluations reuse the same
//! seed ladder (seed, seed+1, …), so estimates at different gamma values
//! share their random numbers and comparisons between them are far less
//! noisy than independent draws would be.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::MarketConfig;
use crate::error::{Error, Result};
use crate::stages::run_annual;

// ── estimation ────────────────────────────────────────────────────────────

/// Monte Carlo estimate of the steady-state unemployment rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UEstimate {
    /// Sample mean of the replicate time averages.
    pub mean: f64,
    /// Standard error of the mean; zero for a single replicate.
    pub standard_error: f64,
    pub replicates: usize,
}

/// Estimates the time-averaged unemployment rate at the given ranking
/// preference by running `replicates` independent annual simulations.
///
/// Replicate `r` runs on seed `config.seed + r`, so the full estimate is a
/// pure function of `(config, gamma, replicates, horizon)`. Replicates are
/// reduced in index order, keeping the result deterministic.
pub fn estimate_u(
    gamma: f64,
    config: &MarketConfig,
    replicates: usize,
    horizon: usize,
) -> Result<UEstimate> {
    if replicates == 0 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    let mut samples = Vec::with_capacity(replicates);
    for r in 0..replicates {
        let mut replicate_config = config.clone();
        replicate_config.gamma = gamma;
        replicate_config.seed = config.seed.wrapping_add(r as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_config.seed);
        samples.push(run_annual(&replicate_config, horizon, &mut rng)?.average_u);
    }
    let mean = samples.iter().sum::<f64>() / replicates as f64;
    let standard_error = if replicates > 1 {
        let variance = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
            / (replicates - 1) as f64;
        (variance / replicates as f64).sqrt()
    } else {
        0.0
    };
    Ok(UEstimate {
        mean,
        standard_error,
        replicates,
    })
}

// ── search configuration and result ───────────────────────────────────────

/// Knobs of the bisection search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSearch {
    /// Upper end of the gamma bracket; the lower end is always 0.
    pub gamma_max: f64,
    /// Bracket width below which the search stops.
    pub tolerance: f64,
    /// Hard cap on bisection iterations.
    pub max_iterations: usize,
    /// Monte Carlo replicates per unemployment estimate.
    pub replicates: usize,
    /// Annual horizon per replicate.
    pub horizon: usize,
}

impl Default for CalibrationSearch {
    fn default() -> Self {
        Self {
            gamma_max: 20.0,
            tolerance: 0.05,
            max_iterations: 40,
            replicates: 16,
            horizon: 60,
        }
    }
}

impl CalibrationSearch {
    fn validate(&self) -> Result<()> {
        if !self.gamma_max.is_finite() || self.gamma_max <= 0.0 {
            return Err(Error::Config(format!(
                "gamma_max must be positive and finite, got {}",
                self.gamma_max
            )));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::Config(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        Ok(())
    }
}

/// One recorded evaluation of the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub gamma: f64,
    pub estimated_u: f64,
    pub standard_error: f64,
    /// Bracket after this evaluation was absorbed. The first two entries are
    /// the endpoint seedings with the initial bracket; from there each
    /// bisection iteration strictly halves the recorded width.
    pub bracket: (f64, f64),
}

/// Outcome of a calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Fitted ranking preference.
    pub gamma_hat: f64,
    /// Final bracket around the root.
    pub bracket: (f64, f64),
    pub target_u: f64,
    /// Estimated unemployment at `gamma_hat`.
    pub achieved_u: f64,
    pub achieved_standard_error: f64,
    pub replicates: usize,
    /// Bisection iterations performed (endpoint seedings not counted).
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
}

// ── the solver ────────────────────────────────────────────────────────────

/// Fits gamma so the simulated unemployment rate meets `target_u`.
///
/// The search brackets `[0, gamma_max]`, checks that the target is
/// achievable within two standard errors of the endpoint estimates, and
/// bisects exploiting the empirically monotone non-decreasing `U(gamma)`.
/// Because evaluations carry Monte Carlo noise, termination is two-sided:
/// the search stops as soon as either the bracket is narrower than
/// `tolerance` or the midpoint estimate matches the target within twice its
/// standard error (plain bisection on noisy values can loop). A midpoint
/// estimate that leaves the bracket's own range by more than three combined
/// standard errors aborts with a diagnostic instead of silently returning a
/// root the data contradicts.
pub fn calibrate_gamma(
    target_u: f64,
    config: &MarketConfig,
    search: &CalibrationSearch,
) -> Result<CalibrationResult> {
    config.validate()?;
    search.validate()?;
    if !target_u.is_finite() || target_u <= 0.0 || target_u >= 1.0 {
        return Err(Error::Infeasible(format!(
            "target unemployment must lie strictly between 0 and 1, got {target_u}"
        )));
    }

    let low = estimate_u(0.0, config, search.replicates, search.horizon)?;
    let high = estimate_u(search.gamma_max, config, search.replicates, search.horizon)?;
    let mut trace = vec![
        TraceEntry {
            gamma: 0.0,
            estimated_u: low.mean,
            standard_error: low.standard_error,
            bracket: (0.0, search.gamma_max),
        },
        TraceEntry {
            gamma: search.gamma_max,
            estimated_u: high.mean,
            standard_error: high.standard_error,
            bracket: (0.0, search.gamma_max),
        },
    ];

    if low.mean > high.mean + 3.0 * (low.standard_error + high.standard_error) {
        return Err(Error::NonMonotone(format!(
            "unemployment estimate at gamma = 0 ({:.6}) exceeds the estimate at gamma = {} \
             ({:.6}) by more than three standard errors; increase replicates to tighten \
             the estimates",
            low.mean, search.gamma_max, high.mean
        )));
    }

    let achievable_low = low.mean - 2.0 * low.standard_error;
    let achievable_high = high.mean + 2.0 * high.standard_error;
    if target_u < achievable_low || target_u > achievable_high {
        return Err(Error::Infeasible(format!(
            "target unemployment {target_u} lies outside the achievable range \
             [{:.6}, {:.6}] spanned by gamma in [0, {}]",
            achievable_low.max(0.0),
            achievable_high.min(1.0),
            search.gamma_max
        )));
    }

    // boundary fixed points: the target already matches an endpoint
    if (low.mean - target_u).abs() <= 2.0 * low.standard_error {
        return Ok(CalibrationResult {
            gamma_hat: 0.0,
            bracket: (0.0, search.gamma_max),
            target_u,
            achieved_u: low.mean,
            achieved_standard_error: low.standard_error,
            replicates: search.replicates,
            iterations: 0,
            trace,
        });
    }
    if (high.mean - target_u).abs() <= 2.0 * high.standard_error {
        return Ok(CalibrationResult {
            gamma_hat: search.gamma_max,
            bracket: (0.0, search.gamma_max),
            target_u,
            achieved_u: high.mean,
            achieved_standard_error: high.standard_error,
            replicates: search.replicates,
            iterations: 0,
            trace,
        });
    }

    let (mut lo, mut hi) = (0.0_f64, search.gamma_max);
    let (mut lo_est, mut hi_est) = (low, high);
    let mut iterations = 0;
    let mut converged: Option<(f64, UEstimate)> = None;
    while hi - lo >= search.tolerance && iterations < search.max_iterations {
        let mid = 0.5 * (lo + hi);
        let est = estimate_u(mid, config, search.replicates, search.horizon)?;
        iterations += 1;

        let floor = lo_est.mean - 3.0 * (lo_est.standard_error + est.standard_error);
        let ceiling = hi_est.mean + 3.0 * (hi_est.standard_error + est.standard_error);
        if est.mean < floor || est.mean > ceiling {
            return Err(Error::NonMonotone(format!(
                "unemployment estimate {:.6} at gamma = {mid:.6} falls outside its \
                 bracket's estimates [{:.6}, {:.6}] by more than three standard errors; \
                 increase replicates to tighten the estimates",
                est.mean, lo_est.mean, hi_est.mean
            )));
        }

        if est.mean < target_u {
            lo = mid;
            lo_est = est;
        } else {
            hi = mid;
            hi_est = est;
        }
        trace.push(TraceEntry {
            gamma: mid,
            estimated_u: est.mean,
            standard_error: est.standard_error,
            bracket: (lo, hi),
        });

        if (est.mean - target_u).abs() <= 2.0 * est.standard_error {
            converged = Some((mid, est));
            break;
        }
    }

    let (gamma_hat, achieved) = match converged {
        Some(hit) => hit,
        None => {
            let gamma = 0.5 * (lo + hi);
            let est = estimate_u(gamma, config, search.replicates, search.horizon)?;
            (gamma, est)
        }
    };
    Ok(CalibrationResult {
        gamma_hat,
        bracket: (lo, hi),
        target_u,
        achieved_u: achieved.mean,
        achieved_standard_error: achieved.standard_error,
        replicates: search.replicates,
        iterations,
        trace,
    })
}

// ── tests ─────────────────────────────────────────────────────────────────

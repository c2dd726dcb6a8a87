//! Simulation configuration: population sizes, the job-offer ratio, softmax
//! preference weights, and the derivation of per-company hiring quotas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default student cohort size.
pub const DEFAULT_STUDENTS: usize = 2000;
/// Default company count.
pub const DEFAULT_COMPANIES: usize = 100;
/// Default number of application letters each student posts per step.
pub const DEFAULT_LETTERS: usize = 10;

/// How the application-count gap enters the softmax energy.
///
/// `Raw` uses the absolute gap `|quota − applications|` directly; the
/// market-history weight absorbs the scale. `ByTotalVacancy` divides the gap
/// by the total number of open seats, yielding a dimensionless mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchNormalization {
    #[default]
    Raw,
    ByTotalVacancy,
}

/// All parameters of one market instance.
///
/// Quotas default to a near-uniform split of `round(alpha * n_students)`
/// seats across companies (see [`MarketConfig::quotas`]). An explicit
/// `quota_per_company` overrides that derivation — including the degenerate
/// `Some(0)`, which closes the market entirely and is useful for boundary
/// tests; the derived default always assigns at least one seat per company.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    /// Cohort size N (job seekers entering the year).
    pub n_students: usize,
    /// Company count K.
    pub n_companies: usize,
    /// Job-offer ratio alpha = total seats / N, used to derive quotas.
    pub job_offer_ratio: f64,
    /// Uniform per-company quota override; `None` derives quotas from alpha.
    pub quota_per_company: Option<usize>,
    /// Ranking-preference weight (gamma >= 0).
    pub gamma: f64,
    /// Market-history (mismatch-aversion) weight (beta >= 0).
    pub beta: f64,
    /// Application letters each student posts per step (1 <= a <= K).
    pub letters_per_student: usize,
    /// Gap normalization used inside the softmax energy.
    pub mismatch_normalization: MismatchNormalization,
    /// Seed for the deterministic random stream.
    pub seed: u64,
    /// History depth tau; only the most recent entry carries weight.
    pub history_depth: usize,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            n_students: DEFAULT_STUDENTS,
            n_companies: DEFAULT_COMPANIES,
            job_offer_ratio: 1.0,
            quota_per_company: None,
            gamma: 1.0,
            beta: 1.0,
            letters_per_student: DEFAULT_LETTERS,
            mismatch_normalization: MismatchNormalization::default(),
            seed: 0,
            history_depth: 1,
        }
    }
}

impl MarketConfig {
    /// Checks every structural invariant; all entry points call this before
    /// running, so downstream code may assume a valid configuration.
    pub fn validate(&self) -> Result<()> {
        if self.n_students == 0 {
            return Err(Error::Config("n_students must be at least 1".into()));
        }
        if self.n_companies == 0 {
            return Err(Error::Config("n_companies must be at least 1".into()));
        }
        if self.letters_per_student == 0 {
            return Err(Error::Config("letters_per_student must be at least 1".into()));
        }
        if self.letters_per_student > self.n_companies {
            return Err(Error::Config(format!(
                "letters_per_student ({}) cannot exceed n_companies ({})",
                self.letters_per_student, self.n_companies
            )));
        }
        if !self.job_offer_ratio.is_finite() || self.job_offer_ratio <= 0.0 {
            return Err(Error::Config(format!(
                "job_offer_ratio must be a positive finite number, got {}",
                self.job_offer_ratio
            )));
        }
        // Seat totals must stay exactly representable as f64 integers so the
        // stage bookkeeping below remains exact arithmetic.
        let target = self.job_offer_ratio * self.n_students as f64;
        if target > 1e12 {
            return Err(Error::Config(format!(
                "total vacancy alpha*N = {target:.3e} is too large to simulate"
            )));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::Config(format!(
                "gamma must be non-negative and finite, got {}",
                self.gamma
            )));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Config(format!(
                "beta must be non-negative and finite, got {}",
                self.beta
            )));
        }
        if self.history_depth == 0 {
            return Err(Error::Config("history_depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Per-company quotas.
    ///
    /// With an explicit override every company opens exactly that many
    /// seats. Otherwise the derived total is `round(alpha * N)`, raised to at
    /// least K seats so every company opens at least one; the total is split
    /// as evenly as integers allow, with the remainder going one seat each to
    /// the lowest-index companies. The derived total V always satisfies
    /// `|V − alpha*N| < K`.
    pub fn quotas(&self) -> Vec<usize> {
        if let Some(q) = self.quota_per_company {
            return vec![q; self.n_companies];
        }
        let k = self.n_companies;
        let target = (self.job_offer_ratio * self.n_students as f64).round() as usize;
        let total = target.max(k);
        let base = total / k;
        let remainder = total % k;
        (0..k)
            .map(|idx| if idx < remainder { base + 1 } else { base })
            .collect()
    }

    /// Total number of seats V = sum of quotas.
    pub fn total_vacancy(&self) -> usize {
        match self.quota_per_company {
            Some(q) => q * self.n_companies,
            None => self.quotas().iter().sum(),
        }
    }

    /// The job-offer ratio actually realized by integer quotas, V/N.
    ///
    /// This is the alpha used in stage records and learning-curve regimes,
    /// so simulated bookkeeping and closed-form recomputation agree exactly.
    pub fn effective_alpha(&self) -> f64 {
        self.total_vacancy() as f64 / self.n_students as f64
    }
}

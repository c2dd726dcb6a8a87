//! The microscopic market model: ranking factors, mismatch, softmax
//! aggregation probabilities, letter sampling, and company-side random
//! selection composed into a single market step.
//!
//! Company indices in the public scalar operations ([`ranking_factor`],
//! [`energy`]) are 1-based ranks in `1..=K`; all vectors and the indices
//! stored in [`ApplicationMatrix`] are 0-based.

use rand::Rng;

use crate::config::{MarketConfig, MismatchNormalization};
use crate::error::{Error, Result};

/// Consecutive rejection-sampling misses tolerated per letter before falling
/// back to an exact O(K) conditional draw over the not-yet-chosen companies.
const REJECTION_LIMIT: u32 = 32;

// ── scalar model ingredients ──────────────────────────────────────────────

/// Fixed attractiveness of company `k` (1-based): `1 + k/K`, strictly
/// increasing in rank with maximum exactly 2 at `k = K`.
pub fn ranking_factor(k: usize, n_companies: usize) -> Result<f64> {
    if k == 0 || k > n_companies {
        return Err(Error::Domain(format!(
            "company rank {k} outside 1..={n_companies}"
        )));
    }
    Ok(1.0 + k as f64 / n_companies as f64)
}

/// Gap between a company's quota and the applications it received.
///
/// `Raw` returns `|quota − applications|`; `ByTotalVacancy` divides by the
/// total number of open seats (which must be positive in that mode).
pub fn local_mismatch(
    quota: usize,
    applications: usize,
    total_vacancy: usize,
    mode: MismatchNormalization,
) -> Result<f64> {
    let gap = quota.abs_diff(applications) as f64;
    match mode {
        MismatchNormalization::Raw => Ok(gap),
        MismatchNormalization::ByTotalVacancy => {
            if total_vacancy == 0 {
                return Err(Error::Domain(
                    "total vacancy must be positive for normalized mismatch".into(),
                ));
            }
            Ok(gap / total_vacancy as f64)
        }
    }
}

/// Softmax energy of company `k` (1-based): `−gamma·ln(1 + k/K) + beta·h`,
/// where `h` is the most recent mismatch. Only the first history entry
/// carries weight; deeper entries are stored by callers but zero-weighted.
pub fn energy(
    k: usize,
    n_companies: usize,
    gamma: f64,
    beta: f64,
    mismatch_history: &[f64],
) -> Result<f64> {
    let factor = ranking_factor(k, n_companies)?;
    let recent = mismatch_history.first().copied().unwrap_or(0.0);
    Ok(-gamma * factor.ln() + beta * recent)
}

// ── state ─────────────────────────────────────────────────────────────────

/// Per-company and per-student state at one step or stage.
///
/// Invariants: `filled[k] <= quotas[k]` for every company, and
/// `sum(filled) == |{i : student_matched[i]}|` — each newly matched student
/// occupies exactly one seat.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    /// Open seats per company (stage-reduced as the year progresses).
    pub quotas: Vec<usize>,
    /// Application counts from the previous step, feeding the mismatch term.
    pub prev_applications: Vec<usize>,
    /// Unmatched students entering the step.
    pub active_students: usize,
    /// Seats filled per company in the most recent step.
    pub filled: Vec<usize>,
    /// Match status per active student after the most recent step.
    pub student_matched: Vec<bool>,
}

impl MarketState {
    /// Fresh full-size market with zero initial mismatch: the previous
    /// application counts start equal to the quotas, so the first step's
    /// history term vanishes and the cold start is unbiased.
    pub fn initial(config: &MarketConfig) -> Result<Self> {
        config.validate()?;
        let quotas = config.quotas();
        Ok(Self {
            prev_applications: quotas.clone(),
            active_students: config.n_students,
            filled: vec![0; quotas.len()],
            student_matched: vec![false; config.n_students],
            quotas,
        })
    }

    /// Seats still open across all companies.
    pub fn total_quota(&self) -> usize {
        self.quotas.iter().sum()
    }
}

// ── aggregation probabilities ─────────────────────────────────────────────

/// Softmax over negated energies, restricted to `active` entries.
///
/// Uses max-subtraction so the largest weight is exactly 1; inactive entries
/// get probability 0. Returns all zeros when nothing is active.
pub(crate) fn softmax_weights(energies: &[f64], active: &[bool]) -> Vec<f64> {
    let min_energy = energies
        .iter()
        .zip(active)
        .filter(|(_, &a)| a)
        .map(|(&e, _)| e)
        .fold(f64::INFINITY, f64::min);
    if !min_energy.is_finite() {
        return vec![0.0; energies.len()];
    }
    let mut weights: Vec<f64> = energies
        .iter()
        .zip(active)
        .map(|(&e, &a)| if a { (min_energy - e).exp() } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Probability that one application letter targets each company:
/// `P_k ∝ exp[gamma·ln(1 + k/K) − beta·h_k]`, with `h_k` computed from the
/// previous step's application counts.
///
/// Companies with exhausted quotas are removed from the choice set (weight
/// zero, remainder renormalized). When every quota is exhausted the vector
/// is all zeros and no letters can be sent.
pub fn aggregation_probabilities(state: &MarketState, config: &MarketConfig) -> Result<Vec<f64>> {
    let k_count = state.quotas.len();
    if state.prev_applications.len() != k_count {
        return Err(Error::Config(format!(
            "state has {} quota entries but {} application counts",
            k_count,
            state.prev_applications.len()
        )));
    }
    let total_vacancy = state.total_quota();
    let mut energies = vec![0.0; k_count];
    let mut active = vec![false; k_count];
    for idx in 0..k_count {
        if state.quotas[idx] == 0 {
            continue;
        }
        active[idx] = true;
        let gap = local_mismatch(
            state.quotas[idx],
            state.prev_applications[idx],
            total_vacancy,
            config.mismatch_normalization,
        )?;
        energies[idx] = energy(idx + 1, k_count, config.gamma, config.beta, &[gap])?;
    }
    Ok(softmax_weights(&energies, &active))
}

// ── letter sampling ───────────────────────────────────────────────────────

/// One step's application letters: per-student distinct company choices and
/// the aggregated per-company counts `v_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApplicationMatrix {
    /// Distinct 0-based company indices chosen by each student.
    pub letters: Vec<Vec<usize>>,
    /// Applications received per company; equals the column sums of `letters`.
    pub application_counts: Vec<usize>,
}

/// Draws each student's letters by sequential weighted sampling without
/// replacement from `probabilities`.
///
/// Each student receives `min(letters_per_student, support)` distinct
/// companies, where `support` counts the companies with positive weight;
/// zero-weight companies are unreachable. Sampling rejects from the full
/// categorical distribution (binary search over cumulative sums) and falls
/// back to an exact conditional draw after repeated collisions, so the
/// result is distributionally exact sequential sampling without replacement.
pub fn sample_applications(
    probabilities: &[f64],
    active_students: usize,
    letters_per_student: usize,
    rng: &mut impl Rng,
) -> Result<ApplicationMatrix> {
    let k_count = probabilities.len();
    if letters_per_student > k_count {
        return Err(Error::Config(format!(
            "letters_per_student ({letters_per_student}) cannot exceed company count ({k_count})"
        )));
    }
    let support = probabilities.iter().filter(|&&p| p > 0.0).count();
    let budget = letters_per_student.min(support);

    let mut cumulative = Vec::with_capacity(k_count);
    let mut acc = 0.0;
    for &p in probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;

    let mut letters: Vec<Vec<usize>> = vec![Vec::new(); active_students];
    let mut application_counts = vec![0usize; k_count];
    // stamp[k] records the last student who picked k, making duplicate
    // detection O(1) without clearing a bitset between students
    let mut stamp = vec![usize::MAX; k_count];

    for (student, list) in letters.iter_mut().enumerate() {
        list.reserve_exact(budget);
        for _ in 0..budget {
            let mut misses = 0u32;
            let chosen = loop {
                let u = rng.random::<f64>() * total;
                let k = cumulative.partition_point(|&c| c <= u).min(k_count - 1);
                if probabilities[k] > 0.0 && stamp[k] != student {
                    break k;
                }
                misses += 1;
                if misses >= REJECTION_LIMIT {
                    break conditional_draw(probabilities, &stamp, student, rng);
                }
            };
            stamp[chosen] = student;
            list.push(chosen);
            application_counts[chosen] += 1;
        }
    }
    Ok(ApplicationMatrix {
        letters,
        application_counts,
    })
}

/// Exact draw from the distribution conditioned on the companies `student`
/// has not picked yet. Callers guarantee at least one eligible company.
fn conditional_draw(
    probabilities: &[f64],
    stamp: &[usize],
    student: usize,
    rng: &mut impl Rng,
) -> usize {
    let remaining: f64 = probabilities
        .iter()
        .enumerate()
        .filter(|&(k, &p)| p > 0.0 && stamp[k] != student)
        .map(|(_, &p)| p)
        .sum();
    let target = rng.random::<f64>() * remaining;
    let mut acc = 0.0;
    let mut last_eligible = None;
    for (k, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 || stamp[k] == student {
            continue;
        }
        acc += p;
        last_eligible = Some(k);
        if acc > target {
            return k;
        }
    }
    last_eligible.expect("conditional draw requires an eligible company")
}

// ── company-side selection and placement ──────────────────────────────────

/// Result of one selection round.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    /// Seat taken by each student (0-based company), `None` if unmatched.
    pub placement: Vec<Option<usize>>,
    /// Seats consumed per company; sums to the matched-student count.
    pub fill_counts: Vec<usize>,
    /// Acceptance offers extended per company (`min(v_k, quota_k)`); the sum
    /// can exceed the matched count when students hold several offers.
    pub acceptance_counts: Vec<usize>,
}

/// Companies accept applicants, then multi-accepted students pick one seat.
///
/// Each company `k` accepts all its applicants when `v_k <= quota_k`, and
/// otherwise accepts exactly `quota_k` of them uniformly at random without
/// replacement. A student accepted by several companies is matched once:
/// they occupy one seat at one accepting company chosen uniformly at random,
/// and the surplus offers lapse. This keeps `sum(fill_counts)` equal to the
/// matched-student count, so seat and student bookkeeping balance exactly;
/// `acceptance_counts` preserves the gross offer tallies.
pub fn resolve_selection(
    applications: &ApplicationMatrix,
    quotas: &[usize],
    rng: &mut impl Rng,
) -> SelectionOutcome {
    let k_count = quotas.len();
    let n_students = applications.letters.len();

    let mut applicants: Vec<Vec<usize>> = vec![Vec::new(); k_count];
    for (student, list) in applications.letters.iter().enumerate() {
        for &k in list {
            applicants[k].push(student);
        }
    }

    let mut offers: Vec<Vec<usize>> = vec![Vec::new(); n_students];
    let mut acceptance_counts = vec![0usize; k_count];
    for (k, pool) in applicants.iter_mut().enumerate() {
        let quota = quotas[k];
        if pool.len() > quota {
            // partial Fisher–Yates: the first `quota` entries of a uniform
            // shuffle are a uniform sample without replacement
            for j in 0..quota {
                let pick = j + rng.random_range(0..pool.len() - j);
                pool.swap(j, pick);
            }
            pool.truncate(quota);
        }
        acceptance_counts[k] = pool.len();
        for &student in pool.iter() {
            offers[student].push(k);
        }
    }

    let mut placement = vec![None; n_students];
    let mut fill_counts = vec![0usize; k_count];
    for (student, offer_list) in offers.iter().enumerate() {
        if offer_list.is_empty() {
            continue;
        }
        let chosen = offer_list[rng.random_range(0..offer_list.len())];
        placement[student] = Some(chosen);
        fill_counts[chosen] += 1;
    }

    SelectionOutcome {
        placement,
        fill_counts,
        acceptance_counts,
    }
}

// ── one full market step ──────────────────────────────────────────────────

/// Aggregated outcome of one market step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    /// Students matched this step; equals `sum(fill_counts)`.
    pub matched: usize,
    /// Seats consumed per company.
    pub fill_counts: Vec<usize>,
    /// Applications received per company (`v_k`).
    pub application_counts: Vec<usize>,
    /// Acceptance offers extended per company.
    pub acceptance_counts: Vec<usize>,
}

impl StepSummary {
    /// Total acceptance offers extended; at least `matched`.
    pub fn gross_acceptances(&self) -> usize {
        self.acceptance_counts.iter().sum()
    }
}

/// Runs aggregation → letter sampling → selection, updating the state's
/// application history, fill counts, and per-student match flags in place.
/// Quotas and the active-student count are left for the caller: annual runs
/// reuse them as-is, stage pipelines shrink them between stages.
pub fn market_step(
    state: &mut MarketState,
    config: &MarketConfig,
    rng: &mut impl Rng,
) -> Result<StepSummary> {
    let probabilities = aggregation_probabilities(state, config)?;
    let applications = sample_applications(
        &probabilities,
        state.active_students,
        config.letters_per_student,
        rng,
    )?;
    let outcome = resolve_selection(&applications, &state.quotas, rng);
    let matched = outcome.placement.iter().filter(|p| p.is_some()).count();

    state.prev_applications = applications.application_counts.clone();
    state.filled = outcome.fill_counts.clone();
    state.student_matched = outcome.placement.iter().map(Option::is_some).collect();

    Ok(StepSummary {
        matched,
        fill_counts: outcome.fill_counts,
        application_counts: applications.application_counts,
        acceptance_counts: outcome.acceptance_counts,
    })
}

// ── tests ─────────────────────────────────────────────────────────────────

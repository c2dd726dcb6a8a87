//! Closed-form stage mathematics: transforms between cumulative and
//! stage-wise quantities, the identity `U = alpha*Omega + 1 − alpha`,
//! monotonicity and asymptotic classifiers, scale-invariant solutions, and
//! learning curves.
//!
//! Conventions: the cumulative employment rate before stage 0 is 0, so
//! stage 0 of every transform uses the full market. A cumulative rate is a
//! fraction of the original cohort; a stage-wise rate is a fraction of the
//! sub-market surviving into that stage.

use serde::Serialize;

use crate::error::{Error, Result};

// ── domain types ──────────────────────────────────────────────────────────

/// One year's job-offer ratio and monotone cumulative employment rates,
/// validated at construction: every downstream transform may assume a
/// structurally sound series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeSeries {
    year_label: String,
    alpha0: f64,
    cum_employment: Vec<f64>,
}

impl CumulativeSeries {
    /// Validates and wraps a series.
    ///
    /// Requirements: `alpha0` positive and finite; every rate finite and in
    /// `[0, 1]`; rates non-decreasing; and in a buyer's market
    /// (`alpha0 < 1`) no rate may exceed `alpha0`, since cumulative
    /// employment is capped by the seats that exist.
    pub fn new(
        year_label: impl Into<String>,
        alpha0: f64,
        cum_employment: Vec<f64>,
    ) -> Result<Self> {
        if !alpha0.is_finite() || alpha0 <= 0.0 {
            return Err(Error::Series(format!(
                "job-offer ratio must be positive and finite, got {alpha0}"
            )));
        }
        for (n, &rate) in cum_employment.iter().enumerate() {
            if !rate.is_finite() || !(0.0..=1.0).contains(&rate) {
                return Err(Error::Series(format!(
                    "cumulative rate at stage {n} must lie in [0, 1], got {rate}"
                )));
            }
            if n > 0 && rate < cum_employment[n - 1] {
                return Err(Error::Series(format!(
                    "cumulative rate decreased at stage {n}: {} -> {rate}",
                    cum_employment[n - 1]
                )));
            }
            if alpha0 < 1.0 && rate > alpha0 {
                return Err(Error::Series(format!(
                    "cumulative rate {rate} at stage {n} exceeds the job-offer ratio \
                     {alpha0}; employment cannot outrun the seats that exist"
                )));
            }
        }
        Ok(Self {
            year_label: year_label.into(),
            alpha0,
            cum_employment,
        })
    }

    pub fn year_label(&self) -> &str {
        &self.year_label
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn cum_employment(&self) -> &[f64] {
        &self.cum_employment
    }

    /// Number of recorded stages.
    pub fn len(&self) -> usize {
        self.cum_employment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum_employment.is_empty()
    }
}

/// Stage-wise job-offer ratio, unemployment rate, and labor-shortage ratio
/// for one stage of the surviving sub-market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageTriple {
    pub stage: usize,
    pub alpha_stage: f64,
    pub u_stage: f64,
    pub omega_stage: f64,
}

impl StageTriple {
    /// Signed residual of `u = alpha*omega + 1 − alpha`; zero up to floating
    /// point for every triple this crate produces.
    pub fn identity_residual(&self) -> f64 {
        self.alpha_stage * self.omega_stage + 1.0 - self.alpha_stage - self.u_stage
    }
}

/// Stage-wise transform of one year, truncated at saturation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagewiseSeries {
    pub year_label: String,
    pub triples: Vec<StageTriple>,
    /// First stage whose sub-market is empty (all students matched, or all
    /// seats taken in a buyer's market); stages from here on are undefined
    /// 0/0 forms and are truncated rather than emitted as NaN.
    pub saturated_at: Option<usize>,
}

// ── elementary transforms ─────────────────────────────────────────────────

/// Labor-shortage ratio `(alpha − (1 − u)) / alpha`: the fraction of seats
/// left unfilled when unemployment is `u` at job-offer ratio `alpha`.
/// Inverse of the identity `u = alpha*omega + 1 − alpha` solved for omega.
pub fn labor_shortage(u: f64, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "job-offer ratio must be positive and finite, got {alpha}"
        )));
    }
    if !u.is_finite() {
        return Err(Error::Domain(format!("unemployment rate must be finite, got {u}")));
    }
    Ok((alpha - (1.0 - u)) / alpha)
}

/// Decomposes a cumulative series into per-stage triples.
///
/// Stage 0 sees the full market: `(alpha, 1 − c_0, (alpha − c_0)/alpha)`.
/// Stage n rescales by what survived stage n−1:
/// `alpha_n = (alpha − c_{n−1})/(1 − c_{n−1})`,
/// `u_n = (1 − c_n)/(1 − c_{n−1})`,
/// `omega_n = (alpha − c_n)/(alpha − c_{n−1})`.
/// When a denominator hits zero the market saturated and the output is
/// truncated there with [`StagewiseSeries::saturated_at`] set.
pub fn stagewise_from_cumulative(series: &CumulativeSeries) -> StagewiseSeries {
    let alpha = series.alpha0;
    let rates = &series.cum_employment;
    let mut triples = Vec::with_capacity(rates.len());
    let mut saturated_at = None;
    let mut prev = 0.0;
    for (n, &rate) in rates.iter().enumerate() {
        let students_left = 1.0 - prev;
        let offers_left = alpha - prev;
        if students_left <= 0.0 || offers_left <= 0.0 {
            saturated_at = Some(n);
            break;
        }
        triples.push(StageTriple {
            stage: n,
            alpha_stage: offers_left / students_left,
            u_stage: (1.0 - rate) / students_left,
            omega_stage: (alpha - rate) / offers_left,
        });
        prev = rate;
    }
    StagewiseSeries {
        year_label: series.year_label.clone(),
        triples,
        saturated_at,
    }
}

/// Rebuilds the cumulative employment series from stage-wise unemployment
/// rates: `c_n = 1 − product(u_0..=u_n)`. Exact inverse (up to rounding) of
/// the `u` component of [`stagewise_from_cumulative`].
pub fn cumulative_from_stagewise(u_stages: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(u_stages.len());
    let mut survival = 1.0;
    for (n, &u) in u_stages.iter().enumerate() {
        if !u.is_finite() || !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!(
                "stage-wise unemployment at stage {n} must lie in [0, 1], got {u}"
            )));
        }
        survival *= u;
        out.push(1.0 - survival);
    }
    Ok(out)
}

/// Residual achievable employment after each stage: `1 − c_n` when
/// `alpha >= 1` (everyone could in principle be hired), `alpha − c_n` when
/// `alpha < 1` (employment is capped by the seats). Non-negative and
/// non-increasing for any valid series.
pub fn learning_curve(series: &CumulativeSeries) -> Vec<f64> {
    let cap = if series.alpha0 >= 1.0 { 1.0 } else { series.alpha0 };
    series
        .cum_employment
        .iter()
        .map(|&rate| cap - rate)
        .collect()
}

// ── scale-invariant solutions ─────────────────────────────────────────────

fn pow_stage(base: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(exp) => base.powi(exp),
        Err(_) => base.powf(n as f64),
    }
}

/// Stage-wise job-offer ratio consistent with a constant labor-shortage
/// ratio `omega` at every stage: `alpha * omega^n / (1 − alpha(1 − omega^n))`.
/// Exists only in a buyer's market (`alpha < 1`); strictly decreasing in
/// `n` and vanishing as `n` grows.
pub fn invariant_omega_alpha(alpha: f64, omega: f64, n: usize) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::Domain(format!(
            "a constant labor-shortage ratio requires a buyer's market (0 < alpha < 1), got {alpha}"
        )));
    }
    if !omega.is_finite() || omega <= 0.0 || omega >= 1.0 {
        return Err(Error::Domain(format!(
            "the invariant shortage ratio must lie strictly in (0, 1), got {omega}"
        )));
    }
    let omega_n = pow_stage(omega, n);
    Ok(alpha * omega_n / (1.0 - alpha * (1.0 - omega_n)))
}

/// Stage-wise job-offer ratio consistent with a constant unemployment rate
/// `u` at every stage: `(alpha − 1 + u^n) / u^n`. Exists only in a seller's
/// market (`alpha > 1`); strictly increasing in `n` and divergent.
pub fn invariant_u_alpha(alpha: f64, u: f64, n: usize) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::Domain(format!(
            "a constant unemployment rate requires a seller's market (alpha > 1), got {alpha}"
        )));
    }
    if !u.is_finite() || u <= 0.0 || u >= 1.0 {
        return Err(Error::Domain(format!(
            "the invariant unemployment rate must lie strictly in (0, 1), got {u}"
        )));
    }
    let u_n = pow_stage(u, n);
    Ok((alpha - 1.0 + u_n) / u_n)
}

// ── asymptotic classification ─────────────────────────────────────────────

/// Which side of the marginal point `alpha = 1` a market sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarketRegime {
    /// `alpha < 1`: fewer seats than seekers.
    BuyersMarket,
    /// `alpha = 1` exactly.
    Marginal,
    /// `alpha > 1`: more seats than seekers.
    SellersMarket,
}

impl MarketRegime {
    pub fn classify(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Domain(format!(
                "job-offer ratio must be positive and finite, got {alpha}"
            )));
        }
        Ok(if alpha < 1.0 {
            MarketRegime::BuyersMarket
        } else if alpha > 1.0 {
            MarketRegime::SellersMarket
        } else {
            MarketRegime::Marginal
        })
    }
}

impl std::fmt::Display for MarketRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MarketRegime::BuyersMarket => write!(f, "buyer's market"),
            MarketRegime::Marginal => write!(f, "marginal market"),
            MarketRegime::SellersMarket => write!(f, "seller's market"),
        }
    }
}

/// A stage-wise limit: a finite value, divergence, or the marginal case in
/// which the quantity keeps depending on the data with no universal limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Value(f64),
    Diverges,
    Marginal,
}

impl std::fmt::Display for LimitValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitValue::Value(v) => write!(f, "{v}"),
            LimitValue::Diverges => write!(f, "diverges"),
            LimitValue::Marginal => write!(f, "marginal"),
        }
    }
}

/// Large-`n` limits of the stage-wise triple plus the cumulative
/// labor-shortage limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticLimits {
    pub regime: MarketRegime,
    pub alpha_stage: LimitValue,
    pub u_stage: LimitValue,
    pub omega_stage: LimitValue,
    /// Limit of the cumulative shortage ratio: 0 for `alpha <= 1`,
    /// `(alpha − 1)/alpha` for `alpha > 1`.
    pub cumulative_shortage: f64,
}

/// Classifies the long-run fate of a market by its job-offer ratio.
///
/// A buyer's market ends in full unemployment pressure: the triple tends to
/// `(0, 1, 0)`. A seller's market ends in labor shortage: the stage ratio
/// diverges and the triple tends to `(diverges, 0, 1)` with a residual
/// cumulative shortage `(alpha − 1)/alpha`. At `alpha = 1` the stage ratio
/// is pinned at 1 and unemployment equals shortage at every stage, with no
/// universal stage-wise limit.
pub fn asymptotic_limits(alpha: f64) -> Result<AsymptoticLimits> {
    let regime = MarketRegime::classify(alpha)?;
    Ok(match regime {
        MarketRegime::BuyersMarket => AsymptoticLimits {
            regime,
            alpha_stage: LimitValue::Value(0.0),
            u_stage: LimitValue::Value(1.0),
            omega_stage: LimitValue::Value(0.0),
            cumulative_shortage: 0.0,
        },
        MarketRegime::SellersMarket => AsymptoticLimits {
            regime,
            alpha_stage: LimitValue::Diverges,
            u_stage: LimitValue::Value(0.0),
            omega_stage: LimitValue::Value(1.0),
            cumulative_shortage: (alpha - 1.0) / alpha,
        },
        MarketRegime::Marginal => AsymptoticLimits {
            regime,
            alpha_stage: LimitValue::Value(1.0),
            u_stage: LimitValue::Marginal,
            omega_stage: LimitValue::Marginal,
            cumulative_shortage: 0.0,
        },
    })
}

// ── trajectories and monotonicity ─────────────────────────────────────────

/// Whether a trajectory plots cumulative or stage-wise coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryMode {
    Cumulative,
    Stagewise,
}

/// One `(omega, u)` point of a cross-year trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub year_label: String,
    pub stage: usize,
    pub omega: f64,
    pub u: f64,
}

/// A year that could not contribute a point, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedYear {
    pub year_label: String,
    pub reason: String,
}

/// Cross-year unemployment–shortage trajectory at one stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub mode: TrajectoryMode,
    pub stage: usize,
    pub points: Vec<TrajectoryPoint>,
    pub skipped: Vec<SkippedYear>,
}

/// Collects the per-year `(omega, u)` point at stage `n`, ordered by year
/// label. Cumulative mode plots `((alpha − c_n)/alpha, 1 − c_n)`; stage-wise
/// mode plots `(omega_n, u_n)` from the stage decomposition. Years without
/// data at stage `n` are skipped with a reason, never silently dropped.
pub fn uv_trajectory(
    series_list: &[CumulativeSeries],
    stage: usize,
    mode: TrajectoryMode,
) -> Trajectory {
    let mut ordered: Vec<&CumulativeSeries> = series_list.iter().collect();
    ordered.sort_by(|a, b| a.year_label.cmp(&b.year_label));

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for series in ordered {
        match mode {
            TrajectoryMode::Cumulative => {
                if let Some(&rate) = series.cum_employment.get(stage) {
                    points.push(TrajectoryPoint {
                        year_label: series.year_label.clone(),
                        stage,
                        omega: (series.alpha0 - rate) / series.alpha0,
                        u: 1.0 - rate,
                    });
                } else {
                    skipped.push(SkippedYear {
                        year_label: series.year_label.clone(),
                        reason: format!(
                            "series records {} stages, none at stage {stage}",
                            series.len()
                        ),
                    });
                }
            }
            TrajectoryMode::Stagewise => {
                let stagewise = stagewise_from_cumulative(series);
                if let Some(triple) = stagewise.triples.get(stage) {
                    points.push(TrajectoryPoint {
                        year_label: series.year_label.clone(),
                        stage,
                        omega: triple.omega_stage,
                        u: triple.u_stage,
                    });
                } else {
                    let reason = match stagewise.saturated_at {
                        Some(s) if s <= stage => {
                            format!("market saturated at stage {s}, before stage {stage}")
                        }
                        _ => format!(
                            "series records {} stages, none at stage {stage}",
                            series.len()
                        ),
                    };
                    skipped.push(SkippedYear {
                        year_label: series.year_label.clone(),
                        reason,
                    });
                }
            }
        }
    }
    Trajectory {
        mode,
        stage,
        points,
        skipped,
    }
}

/// Change in the stage-wise job-offer ratio between stages `n−1` and `n`,
/// in the factored form `(alpha − 1)(c_{n−1} − c_{n−2}) /
/// ((1 − c_{n−1})(1 − c_{n−2}))` whose floating-point sign is exact: the
/// sign equals `sign(alpha − 1)` whenever the cumulative series strictly
/// increased at stage n−1, and the gap is exactly zero when it stalled or
/// when `alpha = 1`.
pub fn stage_alpha_gap(series: &CumulativeSeries, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain(
            "the stage ratio gap is defined from stage 1 onward".into(),
        ));
    }
    let rates = &series.cum_employment;
    if n > rates.len() {
        return Err(Error::Domain(format!(
            "series records {} stages; gap at stage {n} needs the rate at stage {}",
            rates.len(),
            n - 1
        )));
    }
    let newer = rates[n - 1];
    let older = if n >= 2 { rates[n - 2] } else { 0.0 };
    let den_newer = 1.0 - newer;
    let den_older = 1.0 - older;
    if den_newer <= 0.0 || den_older <= 0.0 {
        return Err(Error::Domain(format!(
            "market saturated before stage {n}; the stage ratio is undefined there"
        )));
    }
    Ok((series.alpha0 - 1.0) * (newer - older) / (den_newer * den_older))
}

// ── tests ─────────────────────────────────────────────────────────────────

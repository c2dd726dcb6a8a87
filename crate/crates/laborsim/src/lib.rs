//! Agent-based simulator and analytical toolkit for multi-stage job-matching
//! markets.
//!
//! A cohort of `N` students faces `K` companies holding `alpha * N` seats in
//! total. Each selection stage, every student posts a fixed number of
//! application letters across companies according to a softmax over company
//! rank and last stage's application pressure; companies accept up to quota,
//! each student takes one seat, and the unmatched survivors plus unfilled
//! seats form the next stage's sub-market.
//!
//! The crate is organized in layers:
//!
//! - [`config`]: market parameters, quota derivation, validation.
//! - [`market`]: one selection stage — aggregation probabilities,
//!   application sampling, acceptance, and single-seat placement.
//! - [`stages`]: the stage pipeline (a cohort filtered through repeated
//!   stages within one year) and annual runs (a fresh cohort each year,
//!   with application history carrying over).
//! - [`analytics`]: exact transforms between cumulative employment series
//!   and the per-stage triple (job-offer ratio, unemployment, vacancy),
//!   learning curves, asymptotic classification, cross-year trajectories.
//! - [`calibration`]: noise-aware bisection fitting the ranking preference
//!   to a target steady-state unemployment rate.
//! - [`data`]: employment-CSV ingestion and byte-stable CSV/JSON writers.
//! - [`cli`]: the `laborsim` binary — `simulate`, `analyze`, `calibrate`,
//!   and `limits` subcommands with reproducible run manifests.
//!
//! Every random decision flows from a single seeded generator, so any
//! result in this crate is reproducible from its configuration and seed.
//! The runnable examples under `examples/` walk through each capability.

pub mod analytics;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod market;
pub mod stages;

pub use error::{Error, Result};

//! The yearly unemployment rate as an order parameter: fresh same-size
//! cohorts face the market year after year, with only the application-count
//! history carrying over, and the post-burn-in average summarizes where the
//! market settles. Sweeping the ranking-preference weight shows collective
//! herding: the more students chase the same highly-ranked companies, the
//! more of them stay unmatched.
//!
//! Run with: cargo run --example annual_order_parameter

use laborsim::config::MarketConfig;
use laborsim::stages::run_annual;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // tight quotas make application concentration genuinely costly
    let base = MarketConfig {
        n_students: 300,
        n_companies: 100,
        job_offer_ratio: 1.0,
        quota_per_company: Some(3),
        beta: 0.0,
        letters_per_student: 3,
        seed: 5,
        ..MarketConfig::default()
    };

    let horizon = 40;
    println!("steady-state unemployment vs ranking preference (horizon {horizon} years):");
    println!();
    let mut previous = f64::NEG_INFINITY;
    for gamma in [0.0, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0] {
        let config = MarketConfig { gamma, ..base.clone() };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let trace = run_annual(&config, horizon, &mut rng).unwrap();
        let bar = "#".repeat((trace.average_u * 80.0).round() as usize);
        println!("  gamma {gamma:>4.1}: U = {:.4}  {bar}", trace.average_u);
        assert!(trace.average_u >= previous - 0.02, "herding should not relax");
        previous = trace.average_u;
    }

    println!();
    let config = MarketConfig { gamma: 6.0, ..base };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let trace = run_annual(&config, horizon, &mut rng).unwrap();
    let first_years: Vec<String> = trace.u_values[..8].iter().map(|u| format!("{u:.3}")).collect();
    println!(
        "yearly trace at gamma = 6 (first 8 of {} years, {} burn-in): {}",
        trace.horizon,
        trace.burn_in,
        first_years.join("  ")
    );
}

//! At a job-offer ratio of exactly 1 the market is marginal: every stage
//! keeps the ratio pinned at 1 and stage-wise unemployment equals the
//! stage-wise vacancy ratio — one seat left open for every student left
//! unmatched. This example shows the pinning on simulated data, where the
//! equality is exact integer bookkeeping, not an approximation.
//!
//! Run with: cargo run --example marginal_market

use laborsim::config::MarketConfig;
use laborsim::stages::run_stages;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let config = MarketConfig {
        n_students: 1000,
        n_companies: 50,
        job_offer_ratio: 1.0,
        letters_per_student: 5,
        seed: 7,
        ..MarketConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let records = run_stages(&config, 15, &mut rng).expect("valid configuration");

    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "stage", "alpha", "u", "omega", "u - omega");
    for r in &records {
        println!(
            "{:>5} {:>12} {:>12.6} {:>12.6} {:>12}",
            r.stage,
            r.alpha_stage,
            r.u_stage,
            r.omega_stage,
            r.u_stage - r.omega_stage
        );
        // exact: both rates are the same count divided by the same count
        assert_eq!(r.alpha_stage, 1.0);
        assert_eq!(r.u_stage, r.omega_stage);
    }
    println!();
    println!(
        "all {} stages pinned: alpha_stage = 1 and u = omega exactly",
        records.len()
    );
}

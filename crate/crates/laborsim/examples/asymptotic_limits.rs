//! Infinite-stage fate of a market by its job-offer ratio: a seat-scarce
//! market ends with every seat taken and unemployment saturating; a
//! seat-rich market ends with every student hired and a permanent seat
//! shortage (alpha - 1)/alpha; the marginal point stays balanced forever.
//!
//! Run with: cargo run --example asymptotic_limits

use laborsim::analytics::{asymptotic_limits, LimitValue};

fn cell(value: LimitValue) -> String {
    match value {
        LimitValue::Value(v) => format!("{v}"),
        LimitValue::Diverges => "diverges".into(),
        LimitValue::Marginal => "marginal".into(),
    }
}

fn main() {
    println!(
        "{:>7} {:>18} {:>12} {:>12} {:>12} {:>10}",
        "alpha", "regime", "ratio_limit", "u_limit", "omega_limit", "shortage"
    );
    for alpha in [0.25, 0.5, 0.9, 1.0, 1.1, 1.28, 2.0, 3.0] {
        let limits = asymptotic_limits(alpha).unwrap();
        println!(
            "{:>7} {:>18} {:>12} {:>12} {:>12} {:>10.4}",
            alpha,
            limits.regime.to_string(),
            cell(limits.alpha_stage),
            cell(limits.u_stage),
            cell(limits.omega_stage),
            limits.cumulative_shortage
        );
    }
    println!();
    println!("the cumulative shortage limit is 0 up to alpha = 1, then (alpha - 1)/alpha:");
    println!("seats beyond one per student can never all be filled");
}

//! Waiting time for a run of ones in non-stationary Bernoulli trials: exact
//! law by recursion, checked by enumeration, with finiteness and decay rates.
//!
//! cargo run --release --example runs

use firstgap::bernoulli::{
    brute_force_tail, discrete_asymptotic_form, discretize, exact_distribution, run_sum_test, z_root,
    BernoulliProfile,
};
use firstgap::{Family, RateFunction};

fn main() -> firstgap::Result<()> {
    // fair coin, two heads in a row
    let coin = BernoulliProfile::constant(0.5)?;
    let d = exact_distribution(&coin, 2, 500)?;
    println!("fair coin, ℓ = 2: P(D > 10) = {:.10} (enumeration {:.10})", d.tail[10], brute_force_tail(&coin, 2, 10)?);
    println!("    decay per trial {:.10}, log z = {:.10}", d.log_slope(500)?, z_root(0.5, 2)?.ln());

    // p_i = i^{−1/2}: long-tailed, −log P(D > n) ≈ 2√n
    let n = 1_000_000;
    let slow = BernoulliProfile::power_law(0.5)?;
    let d = exact_distribution(&slow, 1, n)?;
    println!("p_i = i^(−1/2): −log P(D > 10⁶) / (2√n) = {:.4}", -d.log_tail[n] / (2.0 * (n as f64).sqrt()));
    println!("    asymptotic form: {}", discrete_asymptotic_form(&slow, 1)?);

    // discretised continuous rates
    for b in [0.5, 2.0] {
        let profile = discretize(&RateFunction::family(Family::LogGrowth { a: 1.0, b })?)?;
        println!("discretised log_growth b = {b}: {:?}", run_sum_test(&profile, 1)?.verdict);
    }
    Ok(())
}

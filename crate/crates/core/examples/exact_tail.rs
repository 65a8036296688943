//! Exact tail of the first-gap time for a constant rate, checked against the
//! homogeneous asymptotics `P(D > t) ~ c e^{−γt}`.
//!
//! cargo run --example exact_tail

use firstgap::asymptotics::{gamma_root, renewal_constant};
use firstgap::{solve_tail, RateFunction};

fn main() -> firstgap::Result<()> {
    let (mu, ell) = (2.0, 1.0);
    let rf = RateFunction::constant(mu)?;
    let curve = solve_tail(&rf, ell, 30.0, 1.0 / 256.0)?;

    let gamma = gamma_root(mu, ell)?;
    let c = renewal_constant(mu, ell)?;
    println!("γ = {gamma:.10}, c = {c:.10}");
    println!("fitted slope of −log P on [15, 30]: {:.10}", curve.neg_log_slope(15.0, 30.0)?);

    println!("{:>6} {:>14} {:>14}", "t", "P(D > t)", "c e^{−γt}");
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0] {
        println!("{t:>6} {:>14.6e} {:>14.6e}", curve.tail_at(t)?, c * (-gamma * t).exp());
    }

    // the whole grid as CSV
    let mut csv = Vec::new();
    curve.write_csv(&mut csv).expect("in-memory write");
    println!("\nCSV: {} rows, header {:?}", curve.times.len(), String::from_utf8_lossy(&csv).lines().next().unwrap());
    Ok(())
}

//! Completion time of a task under RESTART when the service rate changes
//! over time: time change to a first-gap problem, exact tail, simulation.
//!
//! cargo run --release --example restart

use firstgap::montecarlo::path_rng;
use firstgap::restart::{classify_restart, simulate_restart, time_change, total_time_curve, ServiceRate, SolverBudget};

fn main() -> firstgap::Result<()> {
    let (mu_star, task) = (1.0, 1.0);
    for (name, sr) in [
        ("constant r = 1", ServiceRate::constant(1.0)?),
        ("speeding up, r = t", ServiceRate::power_law(1.0, 1.0)?),
        ("slowing down, r = 1/(1+t)", ServiceRate::reciprocal(1.0)?),
    ] {
        let v = classify_restart(mu_star, &sr, task)?;
        let rf = time_change(mu_star, &sr)?;
        println!("{name}: {:?} via {:?}; failure rate in work units at u = 10: {:.4}", v.verdict, v.criterion, rf.eval(10.0)?);
    }

    let sr = ServiceRate::power_law(1.0, 1.0)?;
    let times: Vec<f64> = (0..8).map(|k| 1.5 + 0.25 * k as f64).collect();
    let exact = total_time_curve(mu_star, &sr, task, &times, SolverBudget::default())?;
    let n = 100_000;
    let paths = simulate_restart(mu_star, &sr, task, n, 5, 100_000)?;
    println!("\nr(t) = t, μ* = 1, task = 1");
    for (t, p) in times.iter().zip(&exact) {
        let hat = paths.iter().filter(|x| x.direct > *t).count() as f64 / n as f64;
        println!("    P(X* > {t:.2}) = {p:.5}   simulated {hat:.5}");
    }
    let one = firstgap::restart::simulate_restart_path(mu_star, &sr, task, 1000, &mut path_rng(5, 0))?;
    println!("path 0: {} failures, done at {:.6} (mapped {:.6})", one.failures, one.direct, one.mapped);
    Ok(())
}

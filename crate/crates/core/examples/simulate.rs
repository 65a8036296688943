//! Monte Carlo estimate of `P(D > t)` with reproducible per-path streams,
//! compared with the exact tail.
//!
//! cargo run --release --example simulate

use firstgap::montecarlo::{empirical_tail, Method, SimulationConfig};
use firstgap::{solve_tail, Family, RateFunction};

fn main() -> firstgap::Result<()> {
    let ell = 1.0;
    let rf = RateFunction::family(Family::LogGrowth { a: 1.0, b: 0.5 })?;
    let exact = solve_tail(&rf, ell, 6.0, 1.0 / 128.0)?;
    let grid: Vec<f64> = (0..=12).map(|k| 0.5 * k as f64).collect();

    for method in [Method::Inversion, Method::thinning_for(ell)] {
        let config = SimulationConfig::new(rf.clone(), ell, 7.0, 200_000, 2024)?.with_method(method);
        let est = empirical_tail(&config, &grid)?;
        println!("{method:?} (censored {:.4}%)", 100.0 * est.censored_fraction);
        for (i, &t) in grid.iter().enumerate() {
            let p = exact.tail_at(t)?;
            let z = (est.estimate[i] - p) / est.stderr[i];
            println!("    t = {t:>4}: P̂ = {:.5} ± {:.5}   exact {p:.5}   z = {z:+.2}", est.estimate[i], est.half_width[i]);
        }
    }
    Ok(())
}

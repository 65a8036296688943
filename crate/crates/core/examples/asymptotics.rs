//! Asymptotic forms of `−log P(D > t)` in the three regimes, and the
//! short-tail sandwich bounds compared with the exact tail.
//!
//! cargo run --example asymptotics

use firstgap::asymptotics::{asymptotic_form, default_sandwich_k, sandwich_bounds, tail_class};
use firstgap::{solve_tail, Family, RateFunction};

fn main() -> firstgap::Result<()> {
    let ell = 1.0;
    for family in [
        Family::Constant { mu: 2.0 },
        Family::PowerDecay { a: 1.0, b: 1.0 },
        Family::ExpDecay { a: 1.0, b: 0.5 },
        Family::LogGrowth { a: 1.0, b: 0.5 },
        Family::LogLogGrowth { a: 1.0, b: 1.0 },
    ] {
        let rf = RateFunction::family(family)?;
        let class = tail_class(&rf, ell)?;
        match asymptotic_form(&rf, ell) {
            Ok(form) => println!("{family:?}: {:?}, −log P ≈ {form}", class.regime()),
            Err(e) => println!("{family:?}: {:?}, no closed form ({e})", class.regime()),
        }
    }

    let rf = RateFunction::family(Family::PowerDecay { a: 1.0, b: 1.0 })?;
    let curve = solve_tail(&rf, ell, 100.0, 1.0 / 128.0)?;
    let k = default_sandwich_k(&rf, 1000)?;
    println!("\nμ(t) = 1/t: exact −log P(D > t) between the sandwich bounds");
    for t in [10.0, 20.0, 50.0, 100.0] {
        let (lo, hi) = sandwich_bounds(&rf, t, 0.1, k)?;
        let f = curve.neg_log_at(t)?;
        println!("    t = {t:>5}: {lo:>8.2} ≤ {f:>8.2} ≤ {hi:>8.2}   (t log t = {:.2})", t * t.ln());
    }
    Ok(())
}

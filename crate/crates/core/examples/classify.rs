//! Is the first gap ever reached? Runs the finiteness tests over a few rate
//! families, including both sides of the iterated-logarithm boundary.
//!
//! cargo run --example classify

use firstgap::finiteness::{integral_test, iterated_log_classify, log_threshold_classify};
use firstgap::{Family, RateFunction};

fn main() -> firstgap::Result<()> {
    let ell = 1.0;
    let families = [
        Family::ExpDecay { a: 1.0, b: 1.0 },
        Family::Constant { mu: 1.0 },
        Family::PowerDecay { a: 1.0, b: 1.0 },
        Family::LogGrowth { a: 1.0, b: 0.5 },
        Family::LogGrowth { a: 1.0, b: 2.0 },
        Family::LogLogGrowth { a: 1.0, b: 1.0 },
    ];
    for family in families {
        let rf = RateFunction::family(family)?;
        let v = integral_test(&rf, ell, 100.0)?;
        let threshold = log_threshold_classify(&rf, ell)
            .map(|t| format!("{:?}", t.verdict))
            .unwrap_or_else(|_| "n/a".into());
        println!("{family:?}\n    integral test: {:?} ({:?}), threshold test: {threshold}", v.verdict, v.criterion);
    }

    println!("\niterated-log boundary, n = 4:");
    for b in [0.5, 1.0, 1.5] {
        let v = iterated_log_classify(4, b, ell)?;
        println!("    b = {b}: {:?}", v.verdict);
    }

    let v = integral_test(&RateFunction::family(Family::LogGrowth { a: 1.0, b: 2.0 })?, ell, 100.0)?;
    println!("\n{}", v.to_json());
    Ok(())
}

//! Building rate functions: families with floors, custom closures, splicing,
//! rescaling to a unit gap, and the JSON form the CLI accepts.
//!
//! cargo run --example rate_functions

use firstgap::intensity::{splice, Floor, RateSpec};
use firstgap::{solve_tail, Family, RateFunction};

fn main() -> firstgap::Result<()> {
    let decay = RateFunction::family_with_floor(Family::PowerDecay { a: 2.0, b: 0.5 }, Some(Floor { t0: 1.0, value: 2.0 }))?;
    println!("μ(0.5) = {}, μ(4) = {}, M(0, 10) = {:.6}", decay.eval(0.5)?, decay.eval(4.0)?, decay.cumulative(0.0, 10.0)?);

    // a custom rate falls back to quadrature for M
    let wave = RateFunction::custom("wave", |t: f64| 1.0 + 0.5 * (t).sin());
    println!("custom M(0, 2π) = {:.10} (exact 2π = {:.10})", wave.cumulative(0.0, 2.0 * std::f64::consts::PI)?, 2.0 * std::f64::consts::PI);

    // the same tail at gap ℓ = 2, and after rescaling to a unit gap
    let ell = 2.0;
    let rf = RateFunction::constant(0.8)?;
    let unit = rf.rescale_unit_gap(ell)?;
    let a = solve_tail(&rf, ell, 20.0, ell / 64.0)?;
    let b = solve_tail(&unit, 1.0, 10.0, 1.0 / 64.0)?;
    println!("P(D > 12) at ℓ = 2: {:.10}; rescaled at 6: {:.10}", a.tail_at(12.0)?, b.tail_at(6.0)?);

    // constant early, decaying later; only the tail decides finiteness
    let spliced = splice(&RateFunction::constant(3.0)?, &decay, 5.0)?;
    println!("spliced μ(4) = {}, μ(9) = {}", spliced.eval(4.0)?, spliced.eval(9.0)?);

    let spec = RateSpec::named("log_growth").with("a", 1.0).with("b", 0.5);
    let json = serde_json::to_string(&spec).expect("serializable");
    let back = RateFunction::from_spec(&serde_json::from_str(&json).expect("valid JSON"))?;
    println!("{json} -> μ(100) = {:.6}", back.eval(100.0)?);
    Ok(())
}

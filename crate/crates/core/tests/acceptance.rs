//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line is visible in the test log.
//! The process fails if any criterion outside `EXPECTED_FAILURES` fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use firstgap::asymptotics::{default_sandwich_k, gamma_root, renewal_constant, sandwich_bounds};
use firstgap::bernoulli::{brute_force_tail, discretize, exact_distribution, run_sum_test, BernoulliProfile};
use firstgap::dde::solve_tail;
use firstgap::finiteness::{integral_test, iterated_log_classify, ClassificationVerdict, Criterion, Verdict};
use firstgap::intensity::{Family, RateFunction};
use firstgap::montecarlo::{empirical_tail, simulate_counts, SimulationConfig, TailCounts};
use firstgap::restart::{simulate_restart, total_time_curve, ServiceRate, SolverBudget};

/// Criteria that cannot hold as worded; each still runs and prints FAIL.
///
/// 6: the discrete run-sum series lacks the factor `μ` that the continuous
///    gap integral carries, so on the iterated-log boundary the discretised
///    profile is classified differently (the series converges where the
///    integral diverges).
/// 7: `−log P(D > t) ≈ t^{1/2}(log t − 2) + O(log³ t)`, so its ratio to
///    `t^{1/2} log t` crosses 1 near t ≈ 200 and moves away from it until
///    t ≈ 10⁵; it cannot drift monotonically toward 1 over 10²…10⁴.
/// 8: for `μ = 1/t` the increments of `−log P` solve `Δe^{−Δ} ≈ 1/t`, giving
///    `t log t + t log log t − t + …`; the ratio to `t log t` stays above 1
///    and cannot drift upward toward it.
const EXPECTED_FAILURES: &[usize] = &[6, 7, 8];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Outcome;

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn homogeneous_rate() -> Outcome {
    let start = Instant::now();
    let rf = RateFunction::constant(2.0).unwrap();
    let curve = solve_tail(&rf, 1.0, 30.0, 1.0 / 256.0).unwrap();
    let slope = curve.neg_log_slope(15.0, 30.0).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let gamma = gamma_root(2.0, 1.0).unwrap();
    let err = rel_err(slope, gamma);
    Outcome::new(
        err <= 0.01 && elapsed < 5.0,
        format!("slope {slope:.6}, γ {gamma:.6}, rel err {err:.2e}, {elapsed:.2}s"),
    )
}

fn renewal_const() -> Outcome {
    let rf = RateFunction::constant(1.0).unwrap();
    let curve = solve_tail(&rf, 1.0, 25.0, 1.0 / 256.0).unwrap();
    let c = renewal_constant(1.0, 1.0).unwrap();
    let worst = (0..=40)
        .map(|k| 15.0 + 0.25 * k as f64)
        .map(|t| rel_err(curve.tail_at(t).unwrap() * t.exp(), c))
        .fold(0.0, f64::max);
    Outcome::new(worst <= 0.02, format!("c {c:.6}, worst rel err on [15, 25] {worst:.2e}"))
}

fn monte_carlo_vs_dde() -> Outcome {
    let start = Instant::now();
    let rf = RateFunction::constant(1.0).unwrap();
    let config = SimulationConfig::new(rf.clone(), 1.0, 12.0, 100_000, 0).unwrap();
    let grid: Vec<f64> = (0..48).map(|k| 10.0 * k as f64 / 47.0).collect();
    let est = empirical_tail(&config, &grid).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let curve = solve_tail(&rf, 1.0, 10.0, 1.0 / 256.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (i, &t) in grid.iter().enumerate() {
        let exact = curve.tail_at(t).unwrap();
        let z = (est.estimate[i] - exact).abs();
        ok &= z <= 3.0 * est.stderr[i];
        worst = worst.max(z / est.stderr[i]);
    }
    Outcome::new(
        ok && elapsed < 30.0,
        format!("max |P̂ − P|/stderr {worst:.2}, {elapsed:.2}s"),
    )
}

fn discrete_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let ell = 1 + case % 4;
        let n = 18 - ell;
        let ps: Vec<f64> = (0..n + ell).map(|_| rng.random_range(0.05..0.95)).collect();
        let profile = BernoulliProfile::explicit(ps).unwrap();
        let exact = exact_distribution(&profile, ell, n).unwrap().tail[n];
        let brute = brute_force_tail(&profile, ell, n).unwrap();
        worst = worst.max((exact - brute).abs());
    }
    Outcome::new(worst <= 1e-12, format!("200 profiles, max abs diff {worst:.2e}"))
}

fn discrete_rate() -> Outcome {
    let d = exact_distribution(&BernoulliProfile::constant(0.5).unwrap(), 2, 500).unwrap();
    let slope = d.log_slope(500).unwrap();
    let want = (5f64.sqrt() - 1.0).ln();
    let err = rel_err(slope, want);
    Outcome::new(err <= 0.005, format!("slope {slope:.8}, log(√5−1) {want:.8}, rel err {err:.2e}"))
}

fn finiteness_battery() -> Outcome {
    let family = |f| RateFunction::family(f).unwrap();
    let cases: Vec<(&str, RateFunction, Verdict, Option<Criterion>)> = vec![
        ("exp_decay", family(Family::ExpDecay { a: 1.0, b: 1.0 }), Verdict::AlmostSurelyFinite, Some(Criterion::TotalMassFinite)),
        ("constant", family(Family::Constant { mu: 1.0 }), Verdict::AlmostSurelyFinite, None),
        ("log_growth b=0.5", family(Family::LogGrowth { a: 1.0, b: 0.5 }), Verdict::AlmostSurelyFinite, None),
        ("log_growth b=2", family(Family::LogGrowth { a: 1.0, b: 2.0 }), Verdict::PositiveProbabilityInfinite, None),
        ("iterated_log n=4 b=1", family(Family::IteratedLogBoundary { n: 4, b: 1.0, ell: 1.0 }), Verdict::AlmostSurelyFinite, None),
        ("iterated_log n=4 b=1.5", family(Family::IteratedLogBoundary { n: 4, b: 1.5, ell: 1.0 }), Verdict::PositiveProbabilityInfinite, None),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, rf, want, criterion) in &cases {
        let continuous: ClassificationVerdict = match rf.as_family() {
            Some(Family::IteratedLogBoundary { n, b, ell }) => iterated_log_classify(n, b, ell).unwrap(),
            _ => integral_test(rf, 1.0, 100.0).unwrap(),
        };
        let discrete = run_sum_test(&discretize(rf).unwrap(), 1).unwrap();
        let good = continuous.verdict == *want
            && criterion.is_none_or(|c| continuous.criterion == c)
            && discrete.verdict == *want;
        if !good {
            notes.push(format!(
                "{name}: continuous {:?}/{:?}, discrete {:?}",
                continuous.verdict, continuous.criterion, discrete.verdict
            ));
        }
        ok &= good;
    }
    let detail = if ok { format!("{} cases agree", cases.len()) } else { notes.join("; ") };
    Outcome::new(ok, detail)
}

fn long_tail_logarithmic() -> Outcome {
    let n = 1_000_000;
    let d = exact_distribution(&BernoulliProfile::power_law(0.5).unwrap(), 1, n).unwrap();
    let discrete = -d.log_tail[n] / (2.0 * (n as f64).sqrt());

    let rf = RateFunction::family(Family::LogGrowth { a: 1.0, b: 0.5 }).unwrap();
    let curve = solve_tail(&rf, 1.0, 1e4, 1.0 / 32.0).unwrap();
    let ratios: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&t| curve.neg_log_at(t).unwrap() / (t.sqrt() * t.ln()))
        .collect();
    let drifting = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    let ok = (0.9..=1.1).contains(&discrete) && (0.7..=1.3).contains(&ratios[2]) && drifting;
    Outcome::new(
        ok,
        format!("discrete ratio {discrete:.4}; continuous ratios at 1e2, 1e3, 1e4: {ratios:.4?}"),
    )
}

fn short_tail_sandwich() -> Outcome {
    let rf = RateFunction::family(Family::PowerDecay { a: 1.0, b: 1.0 }).unwrap();
    let curve = solve_tail(&rf, 1.0, 100.0, 1.0 / 256.0).unwrap();
    let k = default_sandwich_k(&rf, 1000).unwrap();
    let mut ok = true;
    let mut ratios = Vec::new();
    let mut notes = Vec::new();
    for t in [20.0, 50.0, 100.0] {
        let v = curve.neg_log_at(t).unwrap();
        let (lo, hi) = sandwich_bounds(&rf, t, 0.1, k).unwrap();
        ok &= lo <= v && v <= hi;
        notes.push(format!("t={t}: {lo:.2} ≤ {v:.2} ≤ {hi:.2}"));
        ratios.push(v / (t * t.ln()));
    }
    let rising = ratios.windows(2).all(|w| w[1] > w[0]);
    ok &= ratios.iter().all(|r| (0.5..=1.5).contains(r)) && rising;
    Outcome::new(ok, format!("{}; ratios {ratios:.4?}", notes.join(", ")))
}

fn scaling_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = rng.random_range(0.5..2.0);
        let b = rng.random_range(0.2..1.5);
        let family = match rng.random_range(0..5) {
            0 => Family::Constant { mu: a },
            1 => Family::PowerDecay { a, b },
            2 => Family::ExpDecay { a, b: 0.2 * b },
            3 => Family::LogGrowth { a, b: 0.5 * b },
            _ => Family::LogPowerDecay { a, b },
        };
        let ell = [0.5, 1.0, 2.0, 3.0][rng.random_range(0..4)];
        let rf = RateFunction::family(family).unwrap();
        let scaled = rf.rescale_unit_gap(ell).unwrap();
        let original = solve_tail(&rf, ell, 10.0 * ell, ell / 64.0).unwrap();
        let unit = solve_tail(&scaled, 1.0, 10.0, 1.0 / 64.0).unwrap();
        for k in 0..=40 {
            let s = 0.25 * k as f64;
            let diff = (original.neg_log_at(s * ell).unwrap() - unit.neg_log_at(s).unwrap()).abs();
            worst = worst.max(diff);
        }
    }
    Outcome::new(worst <= 1e-6, format!("20 pairs, max |Δ neglog| {worst:.2e}"))
}

fn restart_round_trip() -> Outcome {
    let sr = ServiceRate::power_law(1.0, 1.0).unwrap();
    let n = 100_000;
    let paths = simulate_restart(1.0, &sr, 1.0, n, 11, 100_000).unwrap();
    let coupling = paths.iter().map(|p| (p.direct - p.mapped).abs()).fold(0.0, f64::max);
    // P(X* > t) runs from 0.6 down to about 2e-3 on this grid
    let grid: Vec<f64> = (0..20).map(|k| 1.5 + 0.075 * k as f64).collect();
    let exact = total_time_curve(1.0, &sr, 1.0, &grid, SolverBudget::default()).unwrap();
    let mut ok = coupling <= 1e-10;
    let mut worst: f64 = 0.0;
    for (&t, &p) in grid.iter().zip(&exact) {
        let hat = paths.iter().filter(|x| x.direct > t).count() as f64 / n as f64;
        let se = (hat * (1.0 - hat) / n as f64).sqrt();
        ok &= (hat - p).abs() <= 3.0 * se;
        worst = worst.max((hat - p).abs() / se);
    }
    Outcome::new(ok, format!("coupling max {coupling:.2e}, max |P̂ − P|/stderr {worst:.2}"))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_firstgap"))
            .args([
                "simulate", "--family", "log_growth", "--a", "1", "--b", "0.5", "--ell", "1", "--horizon", "8",
                "--paths", "20000", "--seed", "42", "--grid", "0:6:13",
            ])
            .output()
            .expect("binary runs")
    };
    let (first, second) = (run(), run());
    let identical = first.status.success() && first.stdout == second.stdout && !first.stdout.is_empty();

    let rf = RateFunction::constant(1.5).unwrap();
    let config = SimulationConfig::new(rf, 1.0, 6.0, 30_000, 3).unwrap();
    let grid = [0.0, 1.0, 2.0, 4.0];
    let whole = simulate_counts(&config, &grid, 0..30_000).unwrap();
    let merged = [0..7_001, 7_001..19_999, 19_999..30_000]
        .into_iter()
        .map(|r| simulate_counts(&config, &grid, r).unwrap())
        .fold(TailCounts::empty(grid.len()), |acc, c| acc.merge(&c));
    let merges = merged == whole;
    Outcome::new(
        identical && merges,
        format!("repeated CLI output identical: {identical}; partitioned counts equal: {merges}"),
    )
}

fn main() -> ExitCode {
    let checks: [(usize, &str, Check); 11] = [
        (1, "homogeneous decay rate", homogeneous_rate),
        (2, "renewal constant", renewal_const),
        (3, "Monte Carlo vs DDE", monte_carlo_vs_dde),
        (4, "discrete oracle equivalence", discrete_oracle),
        (5, "discrete homogeneous rate", discrete_rate),
        (6, "finiteness battery", finiteness_battery),
        (7, "long-tail logarithmic asymptotics", long_tail_logarithmic),
        (8, "short-tail sandwich", short_tail_sandwich),
        (9, "scaling identity", scaling_identity),
        (10, "RESTART round trip", restart_round_trip),
        (11, "determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, check) in checks {
        let out = check();
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status}  {name}: {}", out.detail);
        if out.passed {
            passed += 1;
        } else if !EXPECTED_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    println!("acceptance: {passed}/11 passed; expected failures {EXPECTED_FAILURES:?}; unexpected failures {unexpected:?}");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

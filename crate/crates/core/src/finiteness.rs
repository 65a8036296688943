//! Is the first-gap time `D` finite almost surely?
//!
//! Three tests are available: the integral test on
//! `I = ∫_0^∞ e^{−M(t,t+ℓ)} μ(t) dt` (finite total mass or `I = ∞` give
//! `D < ∞` a.s.; `I < ∞` with infinite mass gives `P(D = ∞) > 0`), the
//! threshold test on `lim μ(t)/log t` against `1/ℓ`, and the exact criterion
//! for the iterated-logarithm boundary family. A comparison test propagates
//! verdicts between pointwise-ordered rate functions.
//!
//! Floating point alone never proves a divergence, so functions without
//! symbolic information get [`Verdict::Inconclusive`] together with the
//! partial integrals as evidence.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::intensity::{is_critical, RateFunction};
use crate::quadrature::{self, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AlmostSurelyFinite,
    PositiveProbabilityInfinite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    TotalMassFinite,
    IntegralDiverges,
    IntegralConverges,
    LogThreshold,
    IteratedLog,
    Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub verdict: Verdict,
    pub criterion: Criterion,
    pub evidence: BTreeMap<String, f64>,
}

impl ClassificationVerdict {
    fn new(verdict: Verdict, criterion: Criterion) -> Self {
        Self {
            verdict,
            criterion,
            evidence: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.evidence.insert(key.to_string(), value);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.verdict == Verdict::AlmostSurelyFinite
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts always serialize")
    }
}

/// `∫_0^T e^{−M(t,t+ℓ)} μ(t) dt`.
pub fn partial_gap_integral(rf: &RateFunction, ell: f64, truncation: f64) -> Result<f64> {
    let integrand = |t: f64| {
        let w = rf.cumulative(t, t + ell).unwrap_or(f64::INFINITY);
        (-w).exp() * rf.eval_unchecked(t)
    };
    // integrate piecewise so long ranges stay resolved
    let pieces = (truncation / ell).ceil().clamp(1.0, 10_000.0) as usize;
    let width = truncation / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let r = quadrature::integrate(integrand, k as f64 * width, (k + 1) as f64 * width, Tolerance::default());
        if !r.value.is_finite() {
            return Err(Error::Integrity(format!(
                "gap integrand not integrable on [{}, {}]",
                k as f64 * width,
                (k + 1) as f64 * width
            )));
        }
        total += r.value;
    }
    Ok(total)
}

fn check_ell(ell: f64) -> Result<()> {
    if ell.is_finite() && ell > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("gap length must be positive and finite, got {ell}")))
    }
}

/// Integral test. Symbolic where the family allows it, otherwise
/// inconclusive with the integrals truncated at `truncation` as evidence.
pub fn integral_test(rf: &RateFunction, ell: f64, truncation: f64) -> Result<ClassificationVerdict> {
    check_ell(ell)?;
    if !(truncation > 0.0) || !truncation.is_finite() {
        return Err(domain(format!("truncation must be positive and finite, got {truncation}")));
    }
    let partial_i = partial_gap_integral(rf, ell, truncation)?;
    let partial_mass = rf.cumulative(0.0, truncation)?;
    let attach = |v: ClassificationVerdict| {
        v.with("truncation", truncation)
            .with("partial_integral", partial_i)
            .with("partial_mass", partial_mass)
    };

    if rf.total_mass_finite() == Some(true) {
        let mut v = attach(ClassificationVerdict::new(
            Verdict::AlmostSurelyFinite,
            Criterion::TotalMassFinite,
        ));
        if let Ok(total) = rf.cumulative(0.0, f64::INFINITY) {
            v = v.with("total_mass", total);
        }
        return Ok(v);
    }
    match (rf.total_mass_finite(), rf.integral_diverges(ell)) {
        (_, Some(true)) => Ok(attach(ClassificationVerdict::new(
            Verdict::AlmostSurelyFinite,
            Criterion::IntegralDiverges,
        ))),
        (Some(false), Some(false)) => Ok(attach(
            ClassificationVerdict::new(Verdict::PositiveProbabilityInfinite, Criterion::IntegralConverges)
                // P(D = ∞) ≤ 1/(1 + I) and I ≥ the truncated integral
                .with("p_infinite_upper_bound", 1.0 / (1.0 + partial_i)),
        )),
        _ => Ok(attach(
            ClassificationVerdict::new(Verdict::Inconclusive, Criterion::IntegralConverges)
                .with("p_infinite_upper_bound", 1.0 / (1.0 + partial_i)),
        )),
    }
}

/// Threshold test on `L = lim μ(t)/log t`: finite a.s. when `L < 1/ℓ`,
/// `P(D = ∞) > 0` when `L > 1/ℓ`, inconclusive at equality.
pub fn log_threshold_classify(rf: &RateFunction, ell: f64) -> Result<ClassificationVerdict> {
    check_ell(ell)?;
    let limit = rf.log_ratio_limit().ok_or_else(|| {
        Error::UnsupportedFamily(format!(
            "{:?} has no symbolic limit of μ(t)/log t; use the integral test",
            rf.family_tag()
        ))
    })?;
    let threshold = 1.0 / ell;
    let verdict = if is_critical(limit * ell, 1.0) {
        Verdict::Inconclusive
    } else if limit < threshold {
        Verdict::AlmostSurelyFinite
    } else {
        Verdict::PositiveProbabilityInfinite
    };
    Ok(ClassificationVerdict::new(verdict, Criterion::LogThreshold)
        .with("log_ratio_limit", limit)
        .with("threshold", threshold))
}

/// Exact criterion for the boundary family
/// `ℓμ(t) = log t + 2 log₂ t + log₃ t + … + log_{n−1} t + b log_n t` (`n ≥ 4`),
/// and `log t + (1+b) log₂ t` (`n = 2`), `log t + 2 log₂ t + b log₃ t` (`n = 3`):
/// `D < ∞` a.s. iff `b ≤ 1`.
pub fn iterated_log_classify(n: u32, b: f64, ell: f64) -> Result<ClassificationVerdict> {
    check_ell(ell)?;
    if n < 2 {
        return Err(domain(format!("iterated-log order must be ≥ 2, got {n}")));
    }
    if !b.is_finite() {
        return Err(domain(format!("b must be finite, got {b}")));
    }
    let verdict = if b <= 1.0 || is_critical(b, 1.0) {
        Verdict::AlmostSurelyFinite
    } else {
        Verdict::PositiveProbabilityInfinite
    };
    Ok(ClassificationVerdict::new(verdict, Criterion::IteratedLog)
        .with("n", f64::from(n))
        .with("b", b)
        .with("ell", ell))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `μ ≤ μ'`
    Below,
    /// `μ ≥ μ'`
    Above,
}

const COMPARISON_SAMPLES: usize = 256;

/// Comparison test: a finite verdict for `reference` carries over to any
/// smaller rate, and a positive-probability-infinite verdict to any larger
/// rate. Domination is spot-checked on a geometric grid past both floors.
pub fn compare(
    rf: &RateFunction,
    reference: &RateFunction,
    direction: Direction,
    reference_verdict: &ClassificationVerdict,
) -> Result<ClassificationVerdict> {
    let start = rf.domain_floor().max(reference.domain_floor()).max(1.0);
    let ratio = 1e6_f64.powf(1.0 / (COMPARISON_SAMPLES - 1) as f64);
    let mut t = start;
    for _ in 0..COMPARISON_SAMPLES {
        let (mine, theirs) = (rf.eval(t)?, reference.eval(t)?);
        let slack = 1e-12 * theirs.abs();
        let ok = match direction {
            Direction::Below => mine <= theirs + slack,
            Direction::Above => mine + slack >= theirs,
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "domination {direction:?} fails at t = {t}: μ = {mine}, μ' = {theirs}"
            )));
        }
        t *= ratio;
    }
    let verdict = match (direction, reference_verdict.verdict) {
        (Direction::Below, Verdict::AlmostSurelyFinite) => Verdict::AlmostSurelyFinite,
        (Direction::Above, Verdict::PositiveProbabilityInfinite) => {
            Verdict::PositiveProbabilityInfinite
        }
        _ => Verdict::Inconclusive,
    };
    Ok(ClassificationVerdict::new(verdict, Criterion::Comparison).with("checked_from", start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::Family;

    fn fam(f: Family) -> RateFunction {
        RateFunction::family(f).unwrap()
    }

    #[test]
    fn integral_test_examples() {
        let v = integral_test(&fam(Family::ExpDecay { a: 1.0, b: 1.0 }), 1.0, 50.0).unwrap();
        assert_eq!((v.verdict, v.criterion), (Verdict::AlmostSurelyFinite, Criterion::TotalMassFinite));
        assert!((v.evidence["total_mass"] - 1.0).abs() < 1e-12);

        let v = integral_test(&fam(Family::Constant { mu: 1.0 }), 1.0, 50.0).unwrap();
        assert_eq!((v.verdict, v.criterion), (Verdict::AlmostSurelyFinite, Criterion::IntegralDiverges));
        // integrand is the constant e^{-1}
        assert!((v.evidence["partial_integral"] - 50.0 * (-1f64).exp()).abs() < 1e-9);

        let v = integral_test(&fam(Family::LogGrowth { a: 1.0, b: 2.0 }), 1.0, 50.0).unwrap();
        assert_eq!(v.verdict, Verdict::PositiveProbabilityInfinite);
        assert!(v.evidence["p_infinite_upper_bound"] < 1.0);
    }

    #[test]
    fn custom_is_inconclusive_with_evidence() {
        let rf = RateFunction::custom("c", |_| 1.0);
        let v = integral_test(&rf, 1.0, 20.0).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
        assert!((v.evidence["partial_mass"] - 20.0).abs() < 1e-9);
        assert!(matches!(log_threshold_classify(&rf, 1.0), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn log_threshold_examples() {
        let v = log_threshold_classify(&fam(Family::PowerDecay { a: 1.0, b: 0.5 }), 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::AlmostSurelyFinite);
        let v = log_threshold_classify(&fam(Family::LogGrowth { a: 1.0, b: 0.5 }), 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::AlmostSurelyFinite);
        let v = log_threshold_classify(&fam(Family::LogGrowth { a: 1.0, b: 1.0 }), 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
        let v = log_threshold_classify(&fam(Family::LogGrowth { a: 1.0, b: 2.0 }), 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::PositiveProbabilityInfinite);
    }

    #[test]
    fn iterated_log_examples() {
        assert!(iterated_log_classify(4, 1.0, 1.0).unwrap().is_finite());
        assert_eq!(
            iterated_log_classify(4, 1.5, 1.0).unwrap().verdict,
            Verdict::PositiveProbabilityInfinite
        );
        assert!(iterated_log_classify(2, 0.5, 1.0).unwrap().is_finite());
        assert!(iterated_log_classify(3, 1.0, 1.0).unwrap().is_finite());
        assert!(iterated_log_classify(7, 0.2, 2.0).unwrap().is_finite());
        assert!(matches!(iterated_log_classify(1, 0.5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn iterated_log_family_agrees_with_classifier() {
        for n in 2..=4 {
            for &b in &[0.5, 1.0, 1.5] {
                let rf = fam(Family::IteratedLogBoundary { n, b, ell: 1.0 });
                let direct = iterated_log_classify(n, b, 1.0).unwrap().verdict;
                assert_eq!(rf.integral_diverges(1.0), Some(direct == Verdict::AlmostSurelyFinite));
                assert_eq!(log_threshold_classify(&rf, 1.0).unwrap().verdict, Verdict::Inconclusive);
            }
        }
    }

    #[test]
    fn comparison_examples() {
        let small = fam(Family::LogGrowth { a: 1.0, b: 0.3 });
        let mid = fam(Family::LogGrowth { a: 1.0, b: 0.5 });
        let reference = log_threshold_classify(&mid, 1.0).unwrap();
        let v = compare(&small, &mid, Direction::Below, &reference).unwrap();
        assert_eq!(v.verdict, Verdict::AlmostSurelyFinite);

        let big = fam(Family::LogGrowth { a: 1.0, b: 3.0 });
        let two = fam(Family::LogGrowth { a: 1.0, b: 2.0 });
        let reference = integral_test(&two, 1.0, 10.0).unwrap();
        let v = compare(&big, &two, Direction::Above, &reference).unwrap();
        assert_eq!(v.verdict, Verdict::PositiveProbabilityInfinite);

        let unknown = ClassificationVerdict::new(Verdict::Inconclusive, Criterion::IntegralConverges);
        assert_eq!(compare(&mid, &mid, Direction::Below, &unknown).unwrap().verdict, Verdict::Inconclusive);

        assert!(matches!(
            compare(&big, &two, Direction::Below, &reference),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verdict_json_shape() {
        let v = iterated_log_classify(4, 1.0, 1.0).unwrap();
        let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(json["verdict"], "AlmostSurelyFinite");
        assert_eq!(json["criterion"], "IteratedLog");
        assert_eq!(json["evidence"]["n"], 4.0);
    }

    #[test]
    fn symbolic_tests_agree_and_never_conflict() {
        let fams = [
            Family::Constant { mu: 0.7 },
            Family::Constant { mu: 4.0 },
            Family::PowerDecay { a: 1.0, b: 0.5 },
            Family::PowerDecay { a: 1.0, b: 2.0 },
            Family::ExpDecay { a: 2.0, b: 0.5 },
            Family::LogPowerDecay { a: 1.0, b: 1.0 },
            Family::LogGrowth { a: 1.0, b: 0.4 },
            Family::LogGrowth { a: 2.0, b: 0.9 },
            Family::LogGrowth { a: 0.5, b: 1.3 },
            Family::LogGrowth { a: 1.0, b: 3.0 },
        ];
        for f in fams {
            let rf = fam(f);
            for &ell in &[0.5, 1.0, 2.0] {
                let a = integral_test(&rf, ell, 10.0).unwrap();
                let b = log_threshold_classify(&rf, ell).unwrap();
                if b.verdict != Verdict::Inconclusive {
                    assert_eq!(a.verdict, b.verdict, "{f:?} ℓ={ell}");
                }
                if a.verdict == Verdict::PositiveProbabilityInfinite {
                    assert_eq!(rf.total_mass_finite(), Some(false));
                }
            }
        }
    }
}

//! Task completion times under the RESTART protocol.
//!
//! A task needs `ℓ` units of work. Failures interrupt it and the work done
//! so far is lost, so with failure epochs `T_n` (inhomogeneous rate `μ`,
//! unit service speed) the task ends at `X = ℓ + D`, `D` the first gap of
//! length `ℓ`.
//!
//! With failures at a constant rate `μ*` and a time-varying service rate
//! `r(t)` (cumulative work `R(t) = ∫_0^t r`), the time change `u = R(t)`
//! turns the failure process into one with rate `μ(u) = μ*/r(R^{-1}(u))`
//! and unit service speed. The completion time is then
//! `X* = R^{-1}(D + ℓ)` and `P(X* > t) = P(D > R(t) − ℓ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dde;
use crate::error::{domain, Error, Result};
use crate::finiteness::{self, ClassificationVerdict, Criterion, Verdict};
use crate::intensity::{is_critical, RateFunction, RateLimit};
use crate::montecarlo::{first_gap, path_rng, unit_exponential, GapOutcome};
use crate::quadrature::{self, Tolerance};
use crate::roots;

const INVERSE_TOL: f64 = 1e-14;

/// Service rates with elementary `R` and `R^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ServiceFamily {
    /// `r(t) = r`
    Constant { r: f64 },
    /// `r(t) = a t^b`, `b > −1`
    PowerLaw { a: f64, b: f64 },
    /// `r(t) = a/(1 + t)`, so `R(t) = a log(1 + t)`
    Reciprocal { a: f64 },
}

type RateFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum ServiceKind {
    Family(ServiceFamily),
    Custom { name: String, rate: Arc<RateFn> },
}

/// Work per unit time `r(t) > 0`, with `R(∞) = ∞`.
#[derive(Clone)]
pub struct ServiceRate {
    kind: ServiceKind,
}

impl fmt::Debug for ServiceRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ServiceKind::Family(fam) => write!(f, "ServiceRate({fam:?})"),
            ServiceKind::Custom { name, .. } => write!(f, "ServiceRate(Custom({name}))"),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and positive, got {x}")))
    }
}

impl ServiceRate {
    pub fn family(family: ServiceFamily) -> Result<Self> {
        match family {
            ServiceFamily::Constant { r } => positive("r", r)?,
            ServiceFamily::PowerLaw { a, b } => {
                positive("a", a)?;
                if !(b > -1.0 && b.is_finite()) {
                    return Err(domain(format!("power-law exponent must exceed −1, got {b}")));
                }
            }
            ServiceFamily::Reciprocal { a } => positive("a", a)?,
        }
        Ok(Self {
            kind: ServiceKind::Family(family),
        })
    }

    pub fn constant(r: f64) -> Result<Self> {
        Self::family(ServiceFamily::Constant { r })
    }

    pub fn power_law(a: f64, b: f64) -> Result<Self> {
        Self::family(ServiceFamily::PowerLaw { a, b })
    }

    pub fn reciprocal(a: f64) -> Result<Self> {
        Self::family(ServiceFamily::Reciprocal { a })
    }

    /// Arbitrary continuous positive rate; `R` by quadrature, `R^{-1}` by
    /// root solving.
    pub fn custom<F>(name: impl Into<String>, rate: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: ServiceKind::Custom {
                name: name.into(),
                rate: Arc::new(rate),
            },
        }
    }

    pub fn as_family(&self) -> Option<ServiceFamily> {
        match &self.kind {
            ServiceKind::Family(f) => Some(*f),
            ServiceKind::Custom { .. } => None,
        }
    }

    /// `r(t)`.
    pub fn rate(&self, t: f64) -> f64 {
        match &self.kind {
            ServiceKind::Family(ServiceFamily::Constant { r }) => *r,
            ServiceKind::Family(ServiceFamily::PowerLaw { a, b }) => a * t.powf(*b),
            ServiceKind::Family(ServiceFamily::Reciprocal { a }) => a / (1.0 + t),
            ServiceKind::Custom { rate, .. } => rate(t),
        }
    }

    /// `R(t) = ∫_0^t r(s) ds`.
    pub fn work(&self, t: f64) -> f64 {
        match &self.kind {
            ServiceKind::Family(ServiceFamily::Constant { r }) => r * t,
            ServiceKind::Family(ServiceFamily::PowerLaw { a, b }) => a * t.powf(b + 1.0) / (b + 1.0),
            ServiceKind::Family(ServiceFamily::Reciprocal { a }) => a * t.ln_1p(),
            ServiceKind::Custom { rate, .. } => {
                quadrature::integrate(|s| rate(s), 0.0, t, Tolerance::default()).value
            }
        }
    }

    /// `R^{-1}(u)`; NaN when the inverse cannot be found.
    pub fn inverse_work(&self, u: f64) -> f64 {
        self.try_inverse_work(u).unwrap_or(f64::NAN)
    }

    pub fn try_inverse_work(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(domain(format!("work must be ≥ 0, got {u}")));
        }
        match &self.kind {
            ServiceKind::Family(ServiceFamily::Constant { r }) => Ok(u / r),
            ServiceKind::Family(ServiceFamily::PowerLaw { a, b }) => {
                Ok(((b + 1.0) * u / a).powf(1.0 / (b + 1.0)))
            }
            ServiceKind::Family(ServiceFamily::Reciprocal { a }) => Ok((u / a).exp_m1()),
            ServiceKind::Custom { .. } => {
                if u == 0.0 {
                    return Ok(0.0);
                }
                let mut hi = 1.0;
                let mut doublings = 0;
                while self.work(hi) < u {
                    hi *= 2.0;
                    doublings += 1;
                    if doublings > 200 {
                        return Err(Error::Integrity(format!(
                            "cumulative work never reaches {u}; R(∞) must be infinite"
                        )));
                    }
                }
                let lo = if doublings == 0 { 0.0 } else { hi / 2.0 };
                roots::newton_bisect(|t| (self.work(t) - u, self.rate(t)), lo, hi, INVERSE_TOL)
            }
        }
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(self.kind, ServiceKind::Family(_))
    }

    /// `lim μ*/(r(t) log R(t))`, which equals `lim μ(u)/log u` of the
    /// time-changed rate.
    /// It does not depend on `μ*`: `r log R` tends to `∞` or to `0`.
    pub fn restart_limit(&self) -> Option<f64> {
        match self.as_family()? {
            ServiceFamily::Constant { .. } => Some(0.0),
            ServiceFamily::PowerLaw { b, .. } if b >= 0.0 => Some(0.0),
            ServiceFamily::PowerLaw { .. } | ServiceFamily::Reciprocal { .. } => Some(f64::INFINITY),
        }
    }

    pub(crate) fn time_changed_limit(&self, mu_star: f64) -> Option<RateLimit> {
        Some(match self.as_family()? {
            ServiceFamily::Constant { r } => RateLimit::Finite(mu_star / r),
            ServiceFamily::PowerLaw { a, b } => {
                if b > 0.0 {
                    RateLimit::Zero
                } else if b == 0.0 {
                    RateLimit::Finite(mu_star / a)
                } else {
                    RateLimit::Infinite
                }
            }
            ServiceFamily::Reciprocal { .. } => RateLimit::Infinite,
        })
    }

    pub(crate) fn time_changed_log_ratio(&self, _mu_star: f64) -> Option<f64> {
        self.restart_limit()
    }

    pub(crate) fn time_changed_mass_finite(&self) -> Option<bool> {
        // M(0, u) = μ* R^{-1}(u) → ∞ because R^{-1}(∞) = ∞
        self.as_family().map(|_| false)
    }

    pub(crate) fn time_changed_integral_diverges(&self, _mu_star: f64, _ell: f64) -> Option<bool> {
        Some(match self.as_family()? {
            ServiceFamily::Constant { .. } => true,
            // μ(u) = c u^{-b/(b+1)} with exponent in (−1, 0]: non-integrable
            // while e^{-M(u,u+ℓ)} → 1
            ServiceFamily::PowerLaw { b, .. } if b >= 0.0 => true,
            // μ grows like a power or exponentially; e^{-M(u,u+ℓ)} decays faster
            _ => false,
        })
    }

    pub fn to_spec(&self) -> Result<ServiceSpec> {
        let mut params = BTreeMap::new();
        let family = match self.as_family() {
            Some(ServiceFamily::Constant { r }) => {
                params.insert("r".to_string(), r);
                "constant"
            }
            Some(ServiceFamily::PowerLaw { a, b }) => {
                params.insert("a".to_string(), a);
                params.insert("b".to_string(), b);
                "power_law"
            }
            Some(ServiceFamily::Reciprocal { a }) => {
                params.insert("a".to_string(), a);
                "reciprocal"
            }
            None => return Err(Error::Config("custom service rates have no JSON form".into())),
        };
        Ok(ServiceSpec {
            family: family.to_string(),
            params,
        })
    }

    pub fn from_spec(spec: &ServiceSpec) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            spec.params.get(key).copied().ok_or_else(|| {
                Error::Config(format!("service family '{}' needs parameter '{key}'", spec.family))
            })
        };
        let family = match spec.family.as_str() {
            "constant" => ServiceFamily::Constant { r: get("r")? },
            "power_law" => ServiceFamily::PowerLaw { a: get("a")?, b: get("b")? },
            "reciprocal" => ServiceFamily::Reciprocal { a: get("a")? },
            other => return Err(Error::Config(format!("unknown service family '{other}'"))),
        };
        Self::family(family).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Serializable service rate: `{"family": "power_law", "params": {"a": 1, "b": 1}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceSpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// The failure rate seen in work time: `μ(u) = μ*/r(R^{-1}(u))`.
pub fn time_change(mu_star: f64, sr: &ServiceRate) -> Result<RateFunction> {
    positive("mu_star", mu_star)?;
    if let Some(ServiceFamily::Constant { r }) = sr.as_family() {
        return RateFunction::constant(mu_star / r);
    }
    Ok(RateFunction::time_changed(mu_star, sr.clone()))
}

/// Finite a.s. when `lim μ*/(r log R) < 1/ℓ`, `P(X* = ∞) > 0` when it
/// exceeds `1/ℓ`. Service rates without a symbolic limit go through the
/// time change and the general finiteness tests.
pub fn classify_restart(mu_star: f64, sr: &ServiceRate, ell: f64) -> Result<ClassificationVerdict> {
    positive("ell", ell)?;
    let rf = time_change(mu_star, sr)?;
    match finiteness::log_threshold_classify(&rf, ell) {
        Ok(v) => Ok(v),
        Err(Error::UnsupportedFamily(_)) => finiteness::integral_test(&rf, ell, 100.0 * ell),
        Err(e) => Err(e),
    }
}

/// Limits on the deterministic tail solver used by the RESTART helpers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBudget {
    /// Largest horizon (in work units) the solver may integrate to.
    pub max_horizon: f64,
    pub steps_per_gap: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            max_horizon: 1e3,
            steps_per_gap: 256,
        }
    }
}

/// `P(D > x)` for each `x`, solving once; negative `x` give 1.
fn tail_values(rf: &RateFunction, ell: f64, xs: &[f64], budget: SolverBudget) -> Result<Vec<f64>> {
    let need = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let curve = if need >= ell {
        Some(dde::solve_tail(rf, ell, need, ell / budget.steps_per_gap as f64)?)
    } else {
        None
    };
    xs.iter()
        .map(|&x| {
            if x < 0.0 {
                Ok(1.0)
            } else if x < ell {
                dde::initial_tail(rf, ell, x)
            } else {
                curve.as_ref().expect("solved when x ≥ ℓ").tail_at(x)
            }
        })
        .collect()
}

/// `P(X* > t)` for each `t` in `times`.
pub fn total_time_curve(
    mu_star: f64,
    sr: &ServiceRate,
    ell: f64,
    times: &[f64],
    budget: SolverBudget,
) -> Result<Vec<f64>> {
    positive("ell", ell)?;
    if let Some(&t) = times.iter().find(|&&t| !(t >= 0.0 && t.is_finite())) {
        return Err(domain(format!("times must be finite and ≥ 0, got {t}")));
    }
    let rf = time_change(mu_star, sr)?;
    let xs: Vec<f64> = times.iter().map(|&t| sr.work(t) - ell).collect();
    let need = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if need > budget.max_horizon {
        return Err(Error::Budget {
            what: format!("R(t) − ℓ = {need} exceeds the solver horizon {}", budget.max_horizon),
            max_reachable: sr.inverse_work(budget.max_horizon + ell),
        });
    }
    tail_values(&rf, ell, &xs, budget)
}

/// `P(X* > t) = P(D > R(t) − ℓ)`.
pub fn total_time_tail(mu_star: f64, sr: &ServiceRate, ell: f64, t: f64, budget: SolverBudget) -> Result<f64> {
    Ok(total_time_curve(mu_star, sr, ell, &[t], budget)?[0])
}

/// Bounds on `P(D > t)` for a random task size `L ≤ ℓ*`:
/// `P(L > ℓ* − ε) P(D(ℓ* − ε) > t) ≤ P(D > t) ≤ P(D(ℓ*) > t)`.
pub fn random_length_bounds(
    rf: &RateFunction,
    ell_star: f64,
    eps: f64,
    mass_above: f64,
    t: f64,
    budget: SolverBudget,
) -> Result<(f64, f64)> {
    positive("ell_star", ell_star)?;
    if !(eps > 0.0 && eps < ell_star) {
        return Err(domain(format!("ε must lie in (0, ℓ*) = (0, {ell_star}), got {eps}")));
    }
    if !(mass_above > 0.0 && mass_above <= 1.0) {
        return Err(domain(format!("P(L > ℓ* − ε) must lie in (0, 1], got {mass_above}")));
    }
    if !(t >= 0.0) {
        return Err(domain(format!("t must be ≥ 0, got {t}")));
    }
    if t > budget.max_horizon {
        return Err(Error::Budget {
            what: format!("t = {t} exceeds the solver horizon {}", budget.max_horizon),
            max_reachable: budget.max_horizon,
        });
    }
    let lower = mass_above * tail_values(rf, ell_star - eps, &[t], budget)?[0];
    let upper = tail_values(rf, ell_star, &[t], budget)?[0];
    Ok((lower, upper))
}

/// One simulated task: completion time from the restart rule in real time,
/// and the same path mapped through `R` as `R^{-1}(D + ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartPath {
    pub direct: f64,
    pub mapped: f64,
    pub failures: usize,
}

/// Simulates failures at rate `μ*` until the task completes.
pub fn simulate_restart_path<R: Rng + ?Sized>(
    mu_star: f64,
    sr: &ServiceRate,
    ell: f64,
    max_failures: usize,
    rng: &mut R,
) -> Result<RestartPath> {
    positive("mu_star", mu_star)?;
    positive("ell", ell)?;
    let mut failures = Vec::new();
    let mut start = 0.0;
    loop {
        let next = start + unit_exponential(rng) / mu_star;
        let done = sr.work(next) - sr.work(start) >= ell;
        failures.push(next);
        if done {
            // solve ∫_start^X r = ℓ in real time
            let base = sr.work(start);
            let direct = roots::newton_bisect(
                |x| (sr.work(x) - base - ell, sr.rate(x)),
                start,
                next,
                INVERSE_TOL,
            )?;
            let epochs: Vec<f64> = failures.iter().map(|&t| sr.work(t)).collect();
            let horizon = *epochs.last().expect("at least one failure");
            let mapped = match first_gap(&epochs, ell, horizon)? {
                GapOutcome::Gap(d) => sr.try_inverse_work(d + ell)?,
                GapOutcome::Censored => {
                    return Err(Error::Integrity("mapped path has no resolvable gap".into()))
                }
            };
            return Ok(RestartPath {
                direct,
                mapped,
                failures: failures.len() - 1,
            });
        }
        if failures.len() > max_failures {
            return Err(Error::Budget {
                what: format!("task not finished after {max_failures} failures"),
                max_reachable: start,
            });
        }
        start = next;
    }
}

/// `n_paths` independent tasks; path `i` uses stream `i` of `seed`.
pub fn simulate_restart(
    mu_star: f64,
    sr: &ServiceRate,
    ell: f64,
    n_paths: u64,
    seed: u64,
    max_failures: usize,
) -> Result<Vec<RestartPath>> {
    (0..n_paths)
        .into_par_iter()
        .map(|i| simulate_restart_path(mu_star, sr, ell, max_failures, &mut path_rng(seed, i)))
        .collect()
}

/// Verdict and criterion for the symbolic RESTART limit, for callers that
/// want it without building the time-changed rate.
pub fn restart_limit_verdict(sr: &ServiceRate, ell: f64) -> Option<ClassificationVerdict> {
    let limit = sr.restart_limit()?;
    let verdict = if is_critical(limit * ell, 1.0) {
        Verdict::Inconclusive
    } else if limit * ell < 1.0 {
        Verdict::AlmostSurelyFinite
    } else {
        Verdict::PositiveProbabilityInfinite
    };
    let mut evidence = BTreeMap::new();
    evidence.insert("restart_limit".to_string(), limit);
    evidence.insert("threshold".to_string(), 1.0 / ell);
    Some(ClassificationVerdict {
        verdict,
        criterion: Criterion::LogThreshold,
        evidence,
    })
}

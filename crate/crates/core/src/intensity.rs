//! Rate functions `μ(t)` of inhomogeneous Poisson processes and their
//! cumulative intensity `M(a, b) = ∫_a^b μ(t) dt`.
//!
//! A [`RateFunction`] is immutable and cheap to clone. Built-in parametric
//! families carry closed-form cumulative masses where elementary, and the
//! symbolic limits that the classification modules rely on. Families that
//! are only meaningful "for large t" use a *domain floor*: below `T0` the
//! formula is replaced by a fixed positive constant.
//!
//! Rate functions have a JSON form:
//!
//! ```json
//! {"family": "power_decay", "params": {"a": 1.0, "b": 2.0}, "floor": {"T0": 1.0, "value": 1.0}}
//! ```
//!
//! Spliced, rescaled and time-changed functions nest their children under
//! `head`/`tail`, `inner` and `service` respectively.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::restart::{ServiceRate, ServiceSpec};
use crate::roots;

/// Relative tolerance for deciding that a parameter sits exactly on a
/// critical boundary (e.g. `bℓ = 1`).
pub(crate) const CRITICAL_TOL: f64 = 1e-12;

pub(crate) fn is_critical(x: f64, target: f64) -> bool {
    (x - target).abs() <= CRITICAL_TOL * target.abs().max(1.0)
}

/// Parametric families with closed-form rate formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `μ`
    Constant { mu: f64 },
    /// `a · log^{-b} t`
    LogPowerDecay { a: f64, b: f64 },
    /// `a · t^{-b}`
    PowerDecay { a: f64, b: f64 },
    /// `a · e^{-bt}`
    ExpDecay { a: f64, b: f64 },
    /// `b · log t − log a`
    LogGrowth { a: f64, b: f64 },
    /// `log t − b · log log t − log a`
    LogLogGrowth { a: f64, b: f64 },
    /// `ell · μ(t) = log t + 2 log₂ t + log₃ t + … + log_{n−1} t + b · log_n t`
    /// for `n ≥ 4`; `log t + (1 + b) log₂ t` for `n = 2` and
    /// `log t + 2 log₂ t + b log₃ t` for `n = 3`.
    IteratedLogBoundary { n: u32, b: f64, ell: f64 },
}

/// Limit of `μ(t)` as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateLimit {
    Zero,
    Finite(f64),
    Infinite,
}

/// Reported family of a rate function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Parametric(Family),
    Spliced,
    Rescaled,
    TimeChanged,
    Custom(String),
}

/// Below `t0` the rate is the constant `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Floor {
    #[serde(rename = "T0")]
    pub t0: f64,
    pub value: f64,
}

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;
type MassFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kind {
    Family {
        family: Family,
        floor: Option<Floor>,
    },
    Spliced {
        head: RateFunction,
        tail: RateFunction,
        at: f64,
    },
    /// `μ'(t) = ell · μ(t · ell)`
    Rescaled {
        ell: f64,
        inner: RateFunction,
    },
    /// `μ(u) = mu_star / r(R^{-1}(u))`
    TimeChanged {
        mu_star: f64,
        service: ServiceRate,
    },
    Custom {
        name: String,
        eval: Arc<EvalFn>,
        mass: Option<Arc<MassFn>>,
    },
}

/// An intensity `μ(t) ≥ 0` on `[0, ∞)`.
#[derive(Clone)]
pub struct RateFunction {
    kind: Arc<Kind>,
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.kind {
            Kind::Family { family, floor } => f
                .debug_struct("RateFunction")
                .field("family", family)
                .field("floor", floor)
                .finish(),
            Kind::Spliced { head, tail, at } => f
                .debug_struct("Spliced")
                .field("head", head)
                .field("tail", tail)
                .field("at", at)
                .finish(),
            Kind::Rescaled { ell, inner } => f
                .debug_struct("Rescaled")
                .field("ell", ell)
                .field("inner", inner)
                .finish(),
            Kind::TimeChanged { mu_star, service } => f
                .debug_struct("TimeChanged")
                .field("mu_star", mu_star)
                .field("service", service)
                .finish(),
            Kind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and positive, got {x}")))
    }
}

/// `log_k t` (k-fold iterated logarithm); `log_1 = ln`.
fn iterated_log(t: f64, k: u32) -> f64 {
    let mut x = t;
    for _ in 0..k {
        x = x.ln();
    }
    x
}

impl Family {
    fn validate(&self) -> Result<()> {
        match *self {
            Family::Constant { mu } => check_positive("mu", mu),
            Family::LogPowerDecay { a, b }
            | Family::PowerDecay { a, b }
            | Family::ExpDecay { a, b }
            | Family::LogGrowth { a, b } => {
                check_positive("a", a)?;
                check_positive("b", b)
            }
            Family::LogLogGrowth { a, b } => {
                check_positive("a", a)?;
                if b.is_finite() {
                    Ok(())
                } else {
                    Err(domain("b must be finite"))
                }
            }
            Family::IteratedLogBoundary { n, b, ell } => {
                if !(2..=4).contains(&n) {
                    return Err(domain(format!(
                        "iterated-log rate with n = {n} is not representable; \
                         n must be 2, 3 or 4 (classify larger n symbolically)"
                    )));
                }
                check_positive("ell", ell)?;
                if b.is_finite() {
                    Ok(())
                } else {
                    Err(domain("b must be finite"))
                }
            }
        }
    }

    /// The raw formula, valid for `t` at or beyond the default floor.
    fn formula(&self, t: f64) -> f64 {
        match *self {
            Family::Constant { mu } => mu,
            Family::LogPowerDecay { a, b } => a * t.ln().powf(-b),
            Family::PowerDecay { a, b } => a * t.powf(-b),
            Family::ExpDecay { a, b } => a * (-b * t).exp(),
            Family::LogGrowth { a, b } => b * t.ln() - a.ln(),
            Family::LogLogGrowth { a, b } => t.ln() - b * t.ln().ln() - a.ln(),
            Family::IteratedLogBoundary { n, b, ell } => {
                let l1 = t.ln();
                let l2 = iterated_log(t, 2);
                let sum = match n {
                    2 => l1 + (1.0 + b) * l2,
                    3 => l1 + 2.0 * l2 + b * iterated_log(t, 3),
                    _ => {
                        let mut s = l1 + 2.0 * l2;
                        for k in 3..n {
                            s += iterated_log(t, k);
                        }
                        s + b * iterated_log(t, n)
                    }
                };
                sum / ell
            }
        }
    }

    /// Default floor: the formula is used from the first point where it is
    /// positive and finite.
    fn default_floor(&self) -> Option<Floor> {
        let t0 = match *self {
            Family::Constant { .. } | Family::ExpDecay { .. } => return None,
            Family::PowerDecay { .. } => 1.0,
            Family::LogPowerDecay { .. } => E,
            Family::LogGrowth { a, b } => E * a.powf(1.0 / b).max(1.0),
            Family::LogLogGrowth { .. } => {
                let mut t0 = E.exp();
                for _ in 0..64 {
                    if self.formula(t0) >= 1.0 {
                        break;
                    }
                    t0 *= t0;
                }
                t0
            }
            // point where the innermost iterated log vanishes
            Family::IteratedLogBoundary { n, .. } => {
                let mut t0: f64 = 1.0;
                for _ in 0..(n - 1) {
                    t0 = t0.exp();
                }
                t0
            }
        };
        Some(Floor {
            t0,
            value: self.formula(t0),
        })
    }

    /// Closed-form `∫_a^b formula(t) dt` for `T0 ≤ a ≤ b < ∞`, when elementary.
    fn formula_mass(&self, a: f64, b: f64) -> Option<f64> {
        let width = b - a;
        match *self {
            Family::Constant { mu } => Some(mu * width),
            Family::PowerDecay { a: c, b: p } => {
                if a <= 0.0 {
                    if p < 1.0 {
                        return Some(c * b.powf(1.0 - p) / (1.0 - p));
                    }
                    return None;
                }
                let log_ratio = (width / a).ln_1p();
                if is_critical(p, 1.0) {
                    Some(c * log_ratio)
                } else {
                    let q = 1.0 - p;
                    Some(c * a.powf(q) * (q * log_ratio).exp_m1() / q)
                }
            }
            Family::ExpDecay { a: c, b: r } => Some(c / r * (-r * a).exp() * (-(-r * width).exp_m1())),
            Family::LogGrowth { a: c, b: r } => {
                // ∫ log t = t log t − t, written to avoid cancellation
                let tlogt = if a > 0.0 {
                    width * b.ln() + a * (width / a).ln_1p()
                } else {
                    b * b.ln()
                };
                Some(r * (tlogt - width) - width * c.ln())
            }
            _ => None,
        }
    }

    fn rate_limit(&self) -> RateLimit {
        match *self {
            Family::Constant { mu } => RateLimit::Finite(mu),
            Family::LogPowerDecay { .. } | Family::PowerDecay { .. } | Family::ExpDecay { .. } => {
                RateLimit::Zero
            }
            Family::LogGrowth { .. }
            | Family::LogLogGrowth { .. }
            | Family::IteratedLogBoundary { .. } => RateLimit::Infinite,
        }
    }

    fn log_ratio_limit(&self) -> f64 {
        match *self {
            Family::Constant { .. }
            | Family::LogPowerDecay { .. }
            | Family::PowerDecay { .. }
            | Family::ExpDecay { .. } => 0.0,
            Family::LogGrowth { b, .. } => b,
            Family::LogLogGrowth { .. } => 1.0,
            Family::IteratedLogBoundary { ell, .. } => 1.0 / ell,
        }
    }

    fn total_mass_finite(&self) -> bool {
        match *self {
            Family::ExpDecay { .. } => true,
            Family::PowerDecay { b, .. } => b > 1.0 && !is_critical(b, 1.0),
            _ => false,
        }
    }

    /// Whether `I = ∫ e^{-M(t,t+ℓ)} μ(t) dt` diverges, decided from the
    /// asymptotic form of the integrand.
    fn integral_diverges(&self, ell: f64) -> bool {
        match *self {
            Family::Constant { .. } | Family::LogPowerDecay { .. } => true,
            // e^{-M(t,t+ℓ)} → 1, so I ~ ∫ a t^{-b}
            Family::PowerDecay { b, .. } => b < 1.0 || is_critical(b, 1.0),
            Family::ExpDecay { .. } => false,
            // integrand ~ a^ℓ b t^{-bℓ} log t
            Family::LogGrowth { b, .. } => b * ell < 1.0 || is_critical(b * ell, 1.0),
            // integrand ~ a^ℓ t^{-ℓ} log^{ℓb + 1} t
            Family::LogLogGrowth { b, .. } => {
                if is_critical(ell, 1.0) {
                    b > -2.0 || is_critical(b, -2.0)
                } else {
                    ell < 1.0
                }
            }
            Family::IteratedLogBoundary { b, ell: scale, .. } => {
                if is_critical(ell, scale) {
                    b < 1.0 || is_critical(b, 1.0)
                } else {
                    ell < scale
                }
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "constant",
            Family::LogPowerDecay { .. } => "log_power_decay",
            Family::PowerDecay { .. } => "power_decay",
            Family::ExpDecay { .. } => "exp_decay",
            Family::LogGrowth { .. } => "log_growth",
            Family::LogLogGrowth { .. } => "log_log_growth",
            Family::IteratedLogBoundary { .. } => "iterated_log",
        }
    }
}

impl RateFunction {
    fn from_kind(kind: Kind) -> Self {
        Self {
            kind: Arc::new(kind),
        }
    }

    /// A parametric family with its default floor.
    pub fn family(family: Family) -> Result<Self> {
        family.validate()?;
        Ok(Self::from_kind(Kind::Family {
            family,
            floor: family.default_floor(),
        }))
    }

    /// A parametric family with an explicit floor (`None` disables it).
    pub fn family_with_floor(family: Family, floor: Option<Floor>) -> Result<Self> {
        family.validate()?;
        if let Some(fl) = floor {
            if !(fl.t0.is_finite() && fl.t0 >= 0.0) {
                return Err(domain(format!("floor T0 must be finite and ≥ 0, got {}", fl.t0)));
            }
            check_positive("floor value", fl.value)?;
        }
        let t0 = floor.map_or(0.0, |f| f.t0);
        // the formula must be usable from T0 on
        if t0 > 0.0 || !matches!(family, Family::Constant { .. } | Family::ExpDecay { .. }) {
            let probe = if t0 > 0.0 { t0 } else { f64::MIN_POSITIVE };
            let v = family.formula(probe);
            let singular_ok = t0 == 0.0
                && matches!(family, Family::PowerDecay { b, .. } if b < 1.0);
            if !singular_ok && !(v.is_finite() && v > 0.0) {
                return Err(domain(format!(
                    "{} formula is not positive and finite at T0 = {t0} (value {v})",
                    family.name()
                )));
            }
        }
        Ok(Self::from_kind(Kind::Family { family, floor }))
    }

    pub fn constant(mu: f64) -> Result<Self> {
        Self::family(Family::Constant { mu })
    }

    /// Rate function from an arbitrary evaluator; cumulative masses use quadrature.
    pub fn custom<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_kind(Kind::Custom {
            name: name.into(),
            eval: Arc::new(eval),
            mass: None,
        })
    }

    /// Custom rate function with a closed-form cumulative `(a, b) ↦ M(a, b)`.
    pub fn custom_with_cumulative<F, G>(name: impl Into<String>, eval: F, mass: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_kind(Kind::Custom {
            name: name.into(),
            eval: Arc::new(eval),
            mass: Some(Arc::new(mass)),
        })
    }

    pub(crate) fn time_changed(mu_star: f64, service: ServiceRate) -> Self {
        Self::from_kind(Kind::TimeChanged { mu_star, service })
    }

    pub fn family_tag(&self) -> FamilyTag {
        match &*self.kind {
            Kind::Family { family, .. } => FamilyTag::Parametric(*family),
            Kind::Spliced { .. } => FamilyTag::Spliced,
            Kind::Rescaled { .. } => FamilyTag::Rescaled,
            Kind::TimeChanged { .. } => FamilyTag::TimeChanged,
            Kind::Custom { name, .. } => FamilyTag::Custom(name.clone()),
        }
    }

    /// The parametric family, if this is one.
    pub fn as_family(&self) -> Option<Family> {
        match &*self.kind {
            Kind::Family { family, .. } => Some(*family),
            _ => None,
        }
    }

    pub fn floor(&self) -> Option<Floor> {
        match &*self.kind {
            Kind::Family { floor, .. } => *floor,
            _ => None,
        }
    }

    /// Time below which the rate is not given by an asymptotic formula.
    pub fn domain_floor(&self) -> f64 {
        match &*self.kind {
            Kind::Family { floor, .. } => floor.map_or(0.0, |f| f.t0),
            Kind::Spliced { tail, at, .. } => at.max(tail.domain_floor()),
            Kind::Rescaled { ell, inner } => inner.domain_floor() / ell,
            Kind::TimeChanged { .. } | Kind::Custom { .. } => 0.0,
        }
    }

    /// `μ(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain(format!("rate evaluated at negative time {t}")));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match &*self.kind {
            Kind::Family { family, floor } => match floor {
                Some(fl) if t < fl.t0 => fl.value,
                _ => family.formula(t),
            },
            Kind::Spliced { head, tail, at } => {
                if t <= *at {
                    head.eval_unchecked(t)
                } else {
                    tail.eval_unchecked(t)
                }
            }
            Kind::Rescaled { ell, inner } => ell * inner.eval_unchecked(t * ell),
            Kind::TimeChanged { mu_star, service } => {
                mu_star / service.rate(service.inverse_work(t))
            }
            Kind::Custom { eval, .. } => eval(t),
        }
    }

    /// Whether `cumulative` is evaluated in closed form on finite intervals.
    pub fn has_closed_form_cumulative(&self) -> bool {
        match &*self.kind {
            Kind::Family { family, floor } => {
                let t0 = floor.map_or(0.0, |f| f.t0);
                family.formula_mass(t0.max(1.0), t0.max(1.0) + 1.0).is_some()
            }
            Kind::Spliced { head, tail, .. } => {
                head.has_closed_form_cumulative() && tail.has_closed_form_cumulative()
            }
            Kind::Rescaled { inner, .. } => inner.has_closed_form_cumulative(),
            Kind::TimeChanged { service, .. } => service.has_closed_form(),
            Kind::Custom { mass, .. } => mass.is_some(),
        }
    }

    /// `M(a, b) = ∫_a^b μ(t) dt`. `b` may be `+∞`; a divergent total mass is
    /// reported as [`Error::Divergent`].
    pub fn cumulative(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0) || a.is_infinite() {
            return Err(domain(format!("cumulative lower limit must be finite and ≥ 0, got {a}")));
        }
        if !(a <= b) {
            return Err(domain(format!("cumulative needs a ≤ b, got ({a}, {b})")));
        }
        if a == b {
            return Ok(0.0);
        }
        if b.is_infinite() {
            return self.cumulative_to_infinity(a);
        }
        self.finite_mass(a, b)
    }

    fn finite_mass(&self, a: f64, b: f64) -> Result<f64> {
        match &*self.kind {
            Kind::Family { family, floor } => {
                let t0 = floor.map_or(0.0, |f| f.t0);
                let mut total = 0.0;
                if a < t0 {
                    let fl = floor.expect("t0 > 0 implies a floor");
                    total += fl.value * (b.min(t0) - a);
                }
                let lo = a.max(t0);
                if lo < b {
                    total += match family.formula_mass(lo, b) {
                        Some(m) => m,
                        None => quadrature_mass(|t| family.formula(t), lo, b)?,
                    };
                }
                Ok(total)
            }
            Kind::Spliced { head, tail, at } => {
                let mut total = 0.0;
                if a < *at {
                    total += head.finite_mass(a, b.min(*at))?;
                }
                if b > *at {
                    total += tail.finite_mass(a.max(*at), b)?;
                }
                Ok(total)
            }
            Kind::Rescaled { ell, inner } => inner.finite_mass(a * ell, b * ell),
            Kind::TimeChanged { mu_star, service } => {
                if service.has_closed_form() {
                    Ok(mu_star * (service.inverse_work(b) - service.inverse_work(a)))
                } else {
                    quadrature_mass(|t| self.eval_unchecked(t), a, b)
                }
            }
            Kind::Custom { eval, mass, .. } => match mass {
                Some(m) => Ok(m(a, b)),
                None => quadrature_mass(|t| eval(t), a, b),
            },
        }
    }

    fn cumulative_to_infinity(&self, a: f64) -> Result<f64> {
        if let Some(finite) = self.total_mass_finite() {
            if !finite {
                let probe = self.finite_mass(a, a + 1e3)?;
                return Err(Error::Divergent { lower_bound: probe });
            }
            if let Kind::Family { family, floor } = &*self.kind {
                let t0 = floor.map_or(0.0, |f| f.t0);
                let head = if a < t0 { self.finite_mass(a, t0)? } else { 0.0 };
                let lo = a.max(t0);
                let tail = match *family {
                    Family::ExpDecay { a: c, b: r } => Some(c / r * (-r * lo).exp()),
                    Family::PowerDecay { a: c, b: p } if lo > 0.0 => {
                        Some(c * lo.powf(1.0 - p) / (p - 1.0))
                    }
                    _ => None,
                };
                if let Some(tail) = tail {
                    return Ok(head + tail);
                }
            }
        }
        let r = quadrature::integrate_to_infinity(|t| self.eval_unchecked(t), a, Tolerance::default());
        if r.converged && r.value.is_finite() {
            Ok(r.value)
        } else {
            Err(Error::Divergent {
                lower_bound: if r.value.is_finite() { r.value } else { f64::MAX },
            })
        }
    }

    /// Smallest `t ≥ from` with `M(from, t) = mass`.
    pub fn inverse_cumulative(&self, from: f64, mass: f64) -> Result<f64> {
        if !(mass >= 0.0) {
            return Err(domain(format!("mass must be ≥ 0, got {mass}")));
        }
        if mass == 0.0 {
            return Ok(from);
        }
        match &*self.kind {
            Kind::Family {
                family: Family::Constant { mu },
                ..
            } => return Ok(from + mass / mu),
            Kind::TimeChanged { mu_star, service } if service.has_closed_form() => {
                return Ok(service.work(service.inverse_work(from) + mass / mu_star));
            }
            Kind::Rescaled { ell, inner } => {
                return Ok(inner.inverse_cumulative(from * ell, mass)? / ell);
            }
            _ => {}
        }
        // bracket by doubling, then safeguarded Newton (dM/dt = μ)
        let mut width = 1.0_f64.max(from * 1e-3);
        let mut hi = from + width;
        let mut got = self.finite_mass(from, hi)?;
        let mut steps = 0;
        while got < mass {
            width *= 2.0;
            hi = from + width;
            got = self.finite_mass(from, hi)?;
            steps += 1;
            if steps > 200 || !hi.is_finite() {
                return Err(Error::Divergent { lower_bound: got });
            }
        }
        let lo = if steps == 0 { from } else { from + width / 2.0 };
        let base = if lo > from { self.finite_mass(from, lo)? } else { 0.0 };
        roots::newton_bisect(
            |t| {
                let m = base + self.finite_mass(lo, t).unwrap_or(f64::NAN);
                (m - mass, self.eval_unchecked(t))
            },
            lo,
            hi,
            1e-14,
        )
    }

    /// `μ'(t) = ℓ μ(tℓ)`, so that the first gap of length ℓ under `μ`
    /// corresponds to the first unit gap under `μ'` at time `t/ℓ`.
    pub fn rescale_unit_gap(&self, ell: f64) -> Result<Self> {
        check_positive("ell", ell)?;
        if ell == 1.0 {
            return Ok(self.clone());
        }
        let scale_floor = |floor: Option<Floor>| {
            floor.map(|f| Floor {
                t0: f.t0 / ell,
                value: f.value * ell,
            })
        };
        match &*self.kind {
            Kind::Family { family, floor } => {
                let mapped = match *family {
                    Family::Constant { mu } => Some(Family::Constant { mu: mu * ell }),
                    Family::PowerDecay { a, b } => Some(Family::PowerDecay {
                        a: a * ell.powf(1.0 - b),
                        b,
                    }),
                    Family::ExpDecay { a, b } => Some(Family::ExpDecay {
                        a: a * ell,
                        b: b * ell,
                    }),
                    Family::LogGrowth { a, b } => Some(Family::LogGrowth {
                        a: (ell * a.ln() - ell * b * ell.ln()).exp(),
                        b: b * ell,
                    }),
                    _ => None,
                };
                if let Some(mapped) = mapped {
                    return Ok(Self::from_kind(Kind::Family {
                        family: mapped,
                        floor: scale_floor(*floor),
                    }));
                }
            }
            Kind::Spliced { head, tail, at } => {
                return splice(&head.rescale_unit_gap(ell)?, &tail.rescale_unit_gap(ell)?, at / ell);
            }
            Kind::Rescaled { ell: inner_ell, inner } => {
                return inner.rescale_unit_gap(inner_ell * ell);
            }
            _ => {}
        }
        Ok(Self::from_kind(Kind::Rescaled {
            ell,
            inner: self.clone(),
        }))
    }

    /// Symbolic limit of `μ(t)` at infinity, when known.
    pub fn rate_limit(&self) -> Option<RateLimit> {
        match &*self.kind {
            Kind::Family { family, .. } => Some(family.rate_limit()),
            Kind::Spliced { tail, .. } => tail.rate_limit(),
            Kind::Rescaled { ell, inner } => inner.rate_limit().map(|l| match l {
                RateLimit::Finite(m) => RateLimit::Finite(m * ell),
                other => other,
            }),
            Kind::TimeChanged { mu_star, service } => service.time_changed_limit(*mu_star),
            Kind::Custom { .. } => None,
        }
    }

    /// Symbolic `lim μ(t) / log t` (possibly `+∞`), when known.
    pub fn log_ratio_limit(&self) -> Option<f64> {
        match &*self.kind {
            Kind::Family { family, .. } => Some(family.log_ratio_limit()),
            Kind::Spliced { tail, .. } => tail.log_ratio_limit(),
            Kind::Rescaled { ell, inner } => inner.log_ratio_limit().map(|l| l * ell),
            Kind::TimeChanged { mu_star, service } => service.time_changed_log_ratio(*mu_star),
            Kind::Custom { .. } => None,
        }
    }

    /// Whether `M(0, ∞) < ∞`, when symbolically known.
    pub fn total_mass_finite(&self) -> Option<bool> {
        match &*self.kind {
            Kind::Family { family, .. } => Some(family.total_mass_finite()),
            Kind::Spliced { tail, .. } => tail.total_mass_finite(),
            Kind::Rescaled { inner, .. } => inner.total_mass_finite(),
            Kind::TimeChanged { service, .. } => service.time_changed_mass_finite(),
            Kind::Custom { .. } => None,
        }
    }

    /// Whether `I = ∫ e^{-M(t,t+ℓ)} μ(t) dt` diverges, when symbolically known.
    pub fn integral_diverges(&self, ell: f64) -> Option<bool> {
        match &*self.kind {
            Kind::Family { family, .. } => Some(family.integral_diverges(ell)),
            Kind::Spliced { tail, .. } => tail.integral_diverges(ell),
            Kind::Rescaled { ell: scale, inner } => inner.integral_diverges(ell * scale),
            Kind::TimeChanged { mu_star, service } => {
                service.time_changed_integral_diverges(*mu_star, ell)
            }
            Kind::Custom { .. } => None,
        }
    }

    /// JSON description; `Custom` functions have none.
    pub fn to_spec(&self) -> Result<RateSpec> {
        let mut spec = RateSpec::named("");
        match &*self.kind {
            Kind::Family { family, floor } => {
                spec.family = family.name().to_string();
                let p = &mut spec.params;
                match *family {
                    Family::Constant { mu } => {
                        p.insert("mu".into(), mu);
                    }
                    Family::LogPowerDecay { a, b }
                    | Family::PowerDecay { a, b }
                    | Family::ExpDecay { a, b }
                    | Family::LogGrowth { a, b }
                    | Family::LogLogGrowth { a, b } => {
                        p.insert("a".into(), a);
                        p.insert("b".into(), b);
                    }
                    Family::IteratedLogBoundary { n, b, ell } => {
                        p.insert("n".into(), f64::from(n));
                        p.insert("b".into(), b);
                        p.insert("ell".into(), ell);
                    }
                }
                spec.floor = *floor;
            }
            Kind::Spliced { head, tail, at } => {
                spec.family = "spliced".into();
                spec.params.insert("at".into(), *at);
                spec.head = Some(Box::new(head.to_spec()?));
                spec.tail = Some(Box::new(tail.to_spec()?));
            }
            Kind::Rescaled { ell, inner } => {
                spec.family = "rescaled".into();
                spec.params.insert("ell".into(), *ell);
                spec.inner = Some(Box::new(inner.to_spec()?));
            }
            Kind::TimeChanged { mu_star, service } => {
                spec.family = "time_changed".into();
                spec.params.insert("mu_star".into(), *mu_star);
                spec.service = Some(service.to_spec()?);
            }
            Kind::Custom { name, .. } => {
                return Err(Error::Config(format!(
                    "custom rate function '{name}' has no JSON form"
                )))
            }
        }
        Ok(spec)
    }

    pub fn from_spec(spec: &RateSpec) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            spec.params.get(key).copied().ok_or_else(|| {
                Error::Config(format!("family '{}' needs parameter '{key}'", spec.family))
            })
        };
        let child = |c: &Option<Box<RateSpec>>, what: &str| -> Result<RateFunction> {
            match c {
                Some(c) => RateFunction::from_spec(c),
                None => Err(Error::Config(format!(
                    "family '{}' needs a nested '{what}' object",
                    spec.family
                ))),
            }
        };
        let family = match spec.family.as_str() {
            "constant" => Family::Constant { mu: get("mu")? },
            "log_power_decay" => Family::LogPowerDecay { a: get("a")?, b: get("b")? },
            "power_decay" => Family::PowerDecay { a: get("a")?, b: get("b")? },
            "exp_decay" => Family::ExpDecay { a: get("a")?, b: get("b")? },
            "log_growth" => Family::LogGrowth { a: get("a")?, b: get("b")? },
            "log_log_growth" => Family::LogLogGrowth { a: get("a")?, b: get("b")? },
            "iterated_log" => {
                let n = get("n")?;
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(Error::Config(format!("n must be a non-negative integer, got {n}")));
                }
                Family::IteratedLogBoundary {
                    n: n as u32,
                    b: get("b")?,
                    ell: spec.params.get("ell").copied().unwrap_or(1.0),
                }
            }
            "spliced" => {
                return splice(&child(&spec.head, "head")?, &child(&spec.tail, "tail")?, get("at")?)
                    .map_err(config_err);
            }
            "rescaled" => {
                let inner = child(&spec.inner, "inner")?;
                let ell = get("ell")?;
                check_positive("ell", ell).map_err(config_err)?;
                return Ok(Self::from_kind(Kind::Rescaled { ell, inner }));
            }
            "time_changed" => {
                let service = spec.service.as_ref().ok_or_else(|| {
                    Error::Config("time_changed needs a nested 'service' object".into())
                })?;
                let service = ServiceRate::from_spec(service)?;
                return crate::restart::time_change(get("mu_star")?, &service).map_err(config_err);
            }
            other => return Err(Error::Config(format!("unknown rate family '{other}'"))),
        };
        let built = match spec.floor {
            Some(floor) => Self::family_with_floor(family, Some(floor)),
            None => Self::family(family),
        };
        built.map_err(config_err)
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn quadrature_mass<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    let r = quadrature::integrate(f, a, b, Tolerance::default());
    if !r.value.is_finite() {
        return Err(Error::Integrity(format!(
            "quadrature of rate over [{a}, {b}] is not finite"
        )));
    }
    if !r.converged && r.abs_error > 1e-6 * r.value.abs().max(1e-300) {
        return Err(Error::Integrity(format!(
            "quadrature of rate over [{a}, {b}] did not converge (estimate {}, error {})",
            r.value, r.abs_error
        )));
    }
    Ok(r.value)
}

/// `μ(t) = head(t)` for `t ≤ at`, `tail(t)` after.
pub fn splice(head: &RateFunction, tail: &RateFunction, at: f64) -> Result<RateFunction> {
    if !(at >= 0.0 && at.is_finite()) {
        return Err(domain(format!("splice point must be finite and ≥ 0, got {at}")));
    }
    Ok(RateFunction::from_kind(Kind::Spliced {
        head: head.clone(),
        tail: tail.clone(),
        at,
    }))
}

/// Serializable description of a rate function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<Floor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<Box<RateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Box<RateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<RateSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service: Option<ServiceSpec>,
}

impl RateSpec {
    pub fn named(family: &str) -> Self {
        Self {
            family: family.to_string(),
            params: BTreeMap::new(),
            floor: None,
            head: None,
            tail: None,
            inner: None,
            service: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

//! Tail asymptotics of the first-gap time.
//!
//! A rate with a positive finite limit gives an exponential tail with the
//! homogeneous decay rate `γ`; a rate tending to 0 gives a short tail
//! (`P(D > t + u)/P(D > t) → 0`) and one tending to ∞ a long tail (the
//! ratio tends to 1). The forms returned here are logarithmic:
//! `−log P(D > t) ~ f(t)`, except for the homogeneous case where the
//! prefactor `c` of `P(D > t) ~ c e^{−γt}` is known too.

use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::error::{domain, Error, Result};
use crate::intensity::{is_critical, Family, RateFunction, RateLimit};
use crate::quadrature::{self, Tolerance};
use crate::roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Exponential,
    ShortTail,
    LongTail,
}

/// The function `f` in `−log P(D > t) ~ f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RateFormula {
    /// `k · t`
    Linear,
    /// `k · t log t`
    TLogT,
    /// `k · t log log t`
    TLogLogT,
    /// `k · t²`
    TSquared,
    /// `k · t^power · log t`
    PowerLog { power: f64 },
    /// `k · t^power`
    Power { power: f64 },
    /// `k · log^power t`
    LogPower { power: f64 },
    /// `k · log log t`
    LogLog,
}

impl RateFormula {
    fn eval(self, k: f64, t: f64) -> f64 {
        match self {
            RateFormula::Linear => k * t,
            RateFormula::TLogT => k * t * t.ln(),
            RateFormula::TLogLogT => k * t * t.ln().ln(),
            RateFormula::TSquared => k * t * t,
            RateFormula::PowerLog { power } => k * t.powf(power) * t.ln(),
            RateFormula::Power { power } => k * t.powf(power),
            RateFormula::LogPower { power } => k * t.ln().powf(power),
            RateFormula::LogLog => k * t.ln().ln(),
        }
    }
}

/// `−log P(D > t) ~ coefficient · formula(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticForm {
    pub regime: Regime,
    pub formula: RateFormula,
    pub coefficient: f64,
    /// `(ρ, α)`: `Σ_{i ≤ n} log μ(ic) ~ −c^ρ f(n)` with `f` regularly
    /// varying of index `α`.
    pub index_params: Option<(f64, f64)>,
    /// Exact prefactor `c` of `P(D > t) ~ c e^{−γt}` (homogeneous rates).
    pub constant_c: Option<f64>,
}

impl AsymptoticForm {
    pub fn eval(&self, t: f64) -> f64 {
        self.formula.eval(self.coefficient, t)
    }

    /// `{regime, f_formula, coefficient, gamma?, c?}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "regime": self.regime,
            "f_formula": self.to_string(),
            "coefficient": self.coefficient,
        });
        if self.regime == Regime::Exponential {
            v["gamma"] = json!(self.coefficient);
        }
        if let Some(c) = self.constant_c {
            v["c"] = json!(c);
        }
        if let Some((rho, alpha)) = self.index_params {
            v["rho"] = json!(rho);
            v["alpha"] = json!(alpha);
        }
        v
    }
}

impl fmt::Display for AsymptoticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.coefficient;
        match self.formula {
            RateFormula::Linear => write!(f, "{k}*t"),
            RateFormula::TLogT => write!(f, "{k}*t*log(t)"),
            RateFormula::TLogLogT => write!(f, "{k}*t*log(log(t))"),
            RateFormula::TSquared => write!(f, "{k}*t^2"),
            RateFormula::PowerLog { power } => write!(f, "{k}*t^{power}*log(t)"),
            RateFormula::Power { power } => write!(f, "{k}*t^{power}"),
            RateFormula::LogPower { power } => write!(f, "{k}*log(t)^{power}"),
            RateFormula::LogLog => write!(f, "{k}*log(log(t))"),
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

/// The positive `γ ≠ μ` with `γe^{−γℓ} = μe^{−μℓ}` (`γ = μ` when `μℓ = 1`).
pub fn gamma_root(mu: f64, ell: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("ell", ell)?;
    if is_critical(mu * ell, 1.0) {
        return Ok(mu);
    }
    // x ↦ log x − xℓ peaks at 1/ℓ; the other root is on the far side
    let target = mu.ln() - mu * ell;
    let g = |x: f64| (x.ln() - x * ell - target, 1.0 / x - ell);
    let peak = 1.0 / ell;
    let (lo, hi) = if mu > peak {
        let mut lo = peak / 2.0;
        while g(lo).0 > 0.0 {
            lo /= 2.0;
        }
        (lo, peak)
    } else {
        let mut hi = 2.0 * peak;
        while g(hi).0 > 0.0 {
            hi *= 2.0;
        }
        (peak, hi)
    };
    roots::newton_bisect(g, lo, hi, 1e-15)
}

/// `c` in `P(D > t) ~ c e^{−γt}` for the constant rate `μ`:
/// `c = ∫_0^ℓ (e^{−μt} − e^{−μℓ}) e^{γt} dt / ∫_0^ℓ s μ e^{(γ−μ)s} ds`.
pub fn renewal_constant(mu: f64, ell: f64) -> Result<f64> {
    let gamma = gamma_root(mu, ell)?;
    let tol = Tolerance {
        rel: 1e-14,
        ..Tolerance::default()
    };
    let num = quadrature::integrate(|t| ((-mu * t).exp() - (-mu * ell).exp()) * (gamma * t).exp(), 0.0, ell, tol);
    let den = quadrature::integrate(|s| s * mu * ((gamma - mu) * s).exp(), 0.0, ell, tol);
    Ok(num.value / den.value)
}

/// Exponential form for the constant rate `μ`.
pub fn homogeneous_form(mu: f64, ell: f64) -> Result<AsymptoticForm> {
    Ok(AsymptoticForm {
        regime: Regime::Exponential,
        formula: RateFormula::Linear,
        coefficient: gamma_root(mu, ell)?,
        index_params: None,
        constant_c: Some(renewal_constant(mu, ell)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailClass {
    Exponential { gamma: f64 },
    ShortTail,
    LongTail,
}

impl TailClass {
    pub fn regime(self) -> Regime {
        match self {
            TailClass::Exponential { .. } => Regime::Exponential,
            TailClass::ShortTail => Regime::ShortTail,
            TailClass::LongTail => Regime::LongTail,
        }
    }
}

/// Regime from the limit of `μ(t)`.
pub fn tail_class(rf: &RateFunction, ell: f64) -> Result<TailClass> {
    check_positive("ell", ell)?;
    match rf.rate_limit() {
        Some(RateLimit::Zero) => Ok(TailClass::ShortTail),
        Some(RateLimit::Infinite) => Ok(TailClass::LongTail),
        Some(RateLimit::Finite(mu)) => Ok(TailClass::Exponential {
            gamma: gamma_root(mu, ell)?,
        }),
        None => Err(Error::UnsupportedFamily(format!(
            "{:?} has no known limit of μ(t)",
            rf.family_tag()
        ))),
    }
}

/// Logarithmic form for the decaying families; independent of `a`.
pub fn short_tail_form(family: Family, ell: f64) -> Result<AsymptoticForm> {
    check_positive("ell", ell)?;
    let (formula, coefficient, index) = match family {
        Family::LogPowerDecay { b, .. } => (RateFormula::TLogLogT, b / ell, (0.0, 1.0)),
        Family::PowerDecay { b, .. } => (RateFormula::TLogT, b / ell, (0.0, 1.0)),
        Family::ExpDecay { b, .. } => (RateFormula::TSquared, b / (2.0 * ell), (1.0, 2.0)),
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "{other:?} is not a short-tailed family"
            )))
        }
    };
    Ok(AsymptoticForm {
        regime: Regime::ShortTail,
        formula,
        coefficient,
        index_params: Some(index),
        constant_c: None,
    })
}

/// Leading-order `f` for the slowly growing families:
/// `b log t − log a` (`bℓ < 1`), and for `ℓ = 1`, `log t − b log log t − log a`
/// (`b > −2`, and the boundary `b = −2`, where the tail is `log^{−a} t`).
pub fn long_tail_form(family: Family, ell: f64) -> Result<AsymptoticForm> {
    check_positive("ell", ell)?;
    let (formula, coefficient) = match family {
        Family::LogGrowth { a, b } => {
            if b * ell >= 1.0 || is_critical(b * ell, 1.0) {
                return Err(Error::Precondition(format!(
                    "log growth with bℓ = {} ≥ 1 is not long-tailed with finite D",
                    b * ell
                )));
            }
            let q = 1.0 - b * ell;
            (RateFormula::PowerLog { power: q }, b * a.powf(ell) / q)
        }
        Family::LogLogGrowth { a, b } => {
            if !is_critical(ell, 1.0) {
                return Err(Error::UnsupportedFamily(
                    "log-log growth forms are known for ℓ = 1 only".into(),
                ));
            }
            if is_critical(b, -2.0) {
                (RateFormula::LogLog, a)
            } else if b > -2.0 {
                (RateFormula::LogPower { power: 2.0 + b }, a / (2.0 + b))
            } else {
                return Err(domain(format!("log-log growth needs b ≥ −2, got {b}")));
            }
        }
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "no closed long-tail form for {other:?}; use long_tail_f"
            )))
        }
    };
    Ok(AsymptoticForm {
        regime: Regime::LongTail,
        formula,
        coefficient,
        index_params: None,
        constant_c: None,
    })
}

/// Form for any family with a known regime.
pub fn asymptotic_form(rf: &RateFunction, ell: f64) -> Result<AsymptoticForm> {
    match tail_class(rf, ell)? {
        TailClass::Exponential { .. } => match rf.rate_limit() {
            Some(RateLimit::Finite(mu)) if rf.as_family().is_some() => homogeneous_form(mu, ell),
            Some(RateLimit::Finite(mu)) => Ok(AsymptoticForm {
                constant_c: None,
                ..homogeneous_form(mu, ell)?
            }),
            _ => unreachable!("exponential class implies a finite limit"),
        },
        TailClass::ShortTail => short_tail_form(family_of(rf)?, ell),
        TailClass::LongTail => long_tail_form(family_of(rf)?, ell),
    }
}

fn family_of(rf: &RateFunction) -> Result<Family> {
    rf.as_family().ok_or_else(|| {
        Error::UnsupportedFamily(format!("{:?} is not a parametric family", rf.family_tag()))
    })
}

/// Default lower limit for [`long_tail_f`].
pub fn default_c0(rf: &RateFunction) -> f64 {
    rf.domain_floor().max(std::f64::consts::E)
}

/// `f(t) = ∫_{c₀}^t e^{−ℓμ(s)} μ(s) ds`, with `−log P(D > t) ~ f(t)` for
/// long-tailed rates with `D < ∞` a.s.
pub fn long_tail_f(rf: &RateFunction, ell: f64, c0: f64, t: f64) -> Result<f64> {
    check_positive("ell", ell)?;
    check_positive("c0", c0)?;
    if !(t >= c0) {
        return Err(domain(format!("need t ≥ c0, got t = {t}, c0 = {c0}")));
    }
    if rf.rate_limit() != Some(RateLimit::Infinite) {
        return Err(Error::Precondition(format!(
            "{:?} is not long-tailed (μ(t) does not tend to ∞)",
            rf.family_tag()
        )));
    }
    if rf.integral_diverges(ell) != Some(true) {
        return Err(Error::Precondition(
            "D may be infinite with positive probability; f is not defined".into(),
        ));
    }
    if let Some(Family::LogGrowth { a, b }) = rf.as_family() {
        if c0 >= rf.domain_floor() {
            let q = 1.0 - b * ell;
            let al = a.powf(ell);
            let primitive = |s: f64| {
                let sq = s.powf(q);
                b * al / q * sq * (s.ln() - 1.0 / q) - al * a.ln() / q * sq
            };
            return Ok(primitive(t) - primitive(c0));
        }
    }
    // s = e^x spreads the integrand evenly over decades
    let integrand = |x: f64| {
        let s = x.exp();
        let mu = rf.eval_unchecked(s);
        (-ell * mu).exp() * mu * s
    };
    let (lo, hi) = (c0.ln(), t.ln());
    let pieces = ((hi - lo).ceil() as usize).max(1);
    let width = (hi - lo) / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let a = lo + k as f64 * width;
        total += quadrature::integrate(integrand, a, a + width, Tolerance::default()).value;
    }
    Ok(total)
}

/// Bounds on `−log P(D > t)` for a unit gap:
/// `−Σ_{i=k}^{⌊t⌋} log(1 − e^{−M(i,i+1)})` below (each `[i, i+1)` must hold
/// a point) and `−Σ_{i=0}^{⌈t/h⌉} log(1 − e^{−M(hi, hi+ε)})`, `h = 1 − ε`,
/// above (a point in every `[hi, hi+ε)` forces `D > t`).
pub fn sandwich_bounds(rf: &RateFunction, t: f64, eps: f64, k: usize) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(format!("ε must lie in (0, 1/2), got {eps}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("t must be finite and ≥ 0, got {t}")));
    }
    let neg_log_hit = |a: f64, b: f64| -> Result<f64> {
        let m = rf.cumulative(a, b)?;
        Ok(-(-(-m).exp_m1()).ln())
    };
    let mut lower = 0.0;
    for i in k..=(t.floor() as usize) {
        lower += neg_log_hit(i as f64, i as f64 + 1.0)?;
    }
    let h = 1.0 - eps;
    let mut upper = 0.0;
    for i in 0..=((t / h).ceil() as usize) {
        let s = h * i as f64;
        upper += neg_log_hit(s, s + eps)?;
    }
    Ok((lower, upper))
}

/// Smallest `k` with `M(k, k+1) < 1` (searched up to `limit`).
pub fn default_sandwich_k(rf: &RateFunction, limit: usize) -> Result<usize> {
    for i in 0..=limit {
        if rf.cumulative(i as f64, i as f64 + 1.0)? < 1.0 {
            return Ok(i);
        }
    }
    Err(Error::Precondition(format!("M(i, i+1) ≥ 1 for all i ≤ {limit}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentVerdict {
    Finite,
    Infinite,
    Indeterminate,
}

/// `E D^p` for `ℓ = 1`, `μ(t) = log t + log log t − log a`.
pub fn moment_finite(p: f64, a: f64) -> MomentVerdict {
    if p < a {
        MomentVerdict::Finite
    } else if p > a {
        MomentVerdict::Infinite
    } else {
        MomentVerdict::Indeterminate
    }
}

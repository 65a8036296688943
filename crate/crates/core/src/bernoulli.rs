//! First run of `ℓ` ones in independent Bernoulli trials with success
//! probabilities `p_i`.
//!
//! `D = min{n : ξ_n = … = ξ_{n+ℓ−1} = 1}` is the discrete counterpart of the
//! first-gap time, with `p_i ↔ e^{−μ(i)}` (a trial "succeeds" when its unit
//! interval holds no point). Its law satisfies
//! `P(D = n+1) = q_n P(D > n−ℓ) ∏_{j=n+1}^{n+ℓ} p_j`, `q_n = 1 − p_n`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticForm, RateFormula, Regime};
use crate::error::{domain, Error, Result};
use crate::finiteness::{ClassificationVerdict, Criterion, Verdict};
use crate::intensity::{is_critical, Family, RateFunction, RateLimit, RateSpec};
use crate::roots;

/// Largest `n + ℓ − 1` accepted by [`brute_force_tail`].
pub const BRUTE_FORCE_MAX_TRIALS: usize = 24;
/// Terms used for the partial sums reported as evidence.
const EVIDENCE_TERMS: usize = 10_000;

#[derive(Debug, Clone)]
pub enum ProfileTag {
    Constant { p: f64 },
    /// `p_i = i^{−b}` (with `p_1 = 2^{−b}`, since `p_1 = 1` is not allowed)
    PowerLaw { b: f64 },
    /// `p_i = exp(−a i^{−b})`
    StretchedExp { a: f64, b: f64 },
    /// `p_i = e^{−μ(i)}`
    Discretized(RateFunction),
    Explicit(Vec<f64>),
}

/// Success probabilities `p_i ∈ (0, 1)`, `i = 1, 2, …`.
#[derive(Debug, Clone)]
pub struct BernoulliProfile {
    tag: ProfileTag,
}

fn open_unit(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must lie in (0, 1), got {p}")))
    }
}

impl BernoulliProfile {
    pub fn constant(p: f64) -> Result<Self> {
        open_unit("p", p)?;
        Ok(Self {
            tag: ProfileTag::Constant { p },
        })
    }

    pub fn power_law(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(domain(format!("b must be positive, got {b}")));
        }
        Ok(Self {
            tag: ProfileTag::PowerLaw { b },
        })
    }

    pub fn stretched_exp(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(domain(format!("a and b must be positive, got ({a}, {b})")));
        }
        Ok(Self {
            tag: ProfileTag::StretchedExp { a, b },
        })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("explicit profile is empty"));
        }
        for (i, &p) in values.iter().enumerate() {
            open_unit(&format!("p_{}", i + 1), p)?;
        }
        Ok(Self {
            tag: ProfileTag::Explicit(values),
        })
    }

    pub fn tag(&self) -> &ProfileTag {
        &self.tag
    }

    /// Number of trials the profile defines (`None` when unbounded).
    pub fn trials(&self) -> Option<usize> {
        match &self.tag {
            ProfileTag::Explicit(v) => Some(v.len()),
            _ => None,
        }
    }

    /// `p_i` for `i ≥ 1`.
    pub fn p(&self, i: usize) -> Result<f64> {
        if i == 0 {
            return Err(domain("trials are numbered from 1"));
        }
        let x = i as f64;
        // the exponent form stays valid where p itself rounds to 0 or 1
        let neg_log_p = match &self.tag {
            ProfileTag::StretchedExp { a, b } => Some(a * x.powf(-b)),
            ProfileTag::Discretized(rf) => Some(rf.eval(x)?),
            _ => None,
        };
        if let Some(m) = neg_log_p {
            // closed-form families are positive everywhere; a zero here is underflow
            let underflow = m == 0.0
                && matches!(&self.tag, ProfileTag::Discretized(rf) if rf.as_family().is_some());
            if !((m > 0.0 || underflow) && m.is_finite()) {
                return Err(Error::Precondition(format!("−log p_{i} = {m} is not in (0, ∞)")));
            }
            return Ok((-m).exp());
        }
        let p = match &self.tag {
            ProfileTag::Constant { p } => *p,
            ProfileTag::PowerLaw { b } => x.max(2.0).powf(-b),
            ProfileTag::Explicit(v) => *v.get(i - 1).ok_or_else(|| {
                domain(format!("explicit profile has {} trials, asked for p_{i}", v.len()))
            })?,
            ProfileTag::StretchedExp { .. } | ProfileTag::Discretized(_) => unreachable!(),
        };
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Precondition(format!("p_{i} = {p} is not in (0, 1)")));
        }
        Ok(p)
    }

    /// `log p_i` and `log q_i`, accurate when either is near 0.
    fn log_pq(&self, i: usize) -> Result<(f64, f64)> {
        let x = i as f64;
        let neg_log_p = match &self.tag {
            ProfileTag::StretchedExp { a, b } => Some(a * x.powf(-b)),
            ProfileTag::Discretized(rf) => Some(rf.eval(x)?),
            _ => None,
        };
        let p = self.p(i)?;
        Ok(match neg_log_p {
            Some(m) => (-m, (-(-m).exp_m1()).ln()),
            None => (p.ln(), (-p).ln_1p()),
        })
    }
}

/// Law of `D` on `1..=n_max`, with logs kept for tails below `f64` range.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDistribution {
    pub n_max: usize,
    /// `mass[n] = P(D = n)`; `mass[0] = 0`.
    pub mass: Vec<f64>,
    /// `tail[n] = P(D > n)`, `n = 0..=n_max`.
    pub tail: Vec<f64>,
    pub log_tail: Vec<f64>,
}

impl RunDistribution {
    /// `−log P(D > n) + log P(D > n−1)`.
    pub fn log_slope(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.n_max {
            return Err(domain(format!("n must lie in 1..={}", self.n_max)));
        }
        Ok(self.log_tail[n - 1] - self.log_tail[n])
    }

    /// CSV with header `n,mass,tail`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,mass,tail")?;
        for n in 1..=self.n_max {
            writeln!(out, "{n},{:.16e},{:.16e}", self.mass[n], self.tail[n])?;
        }
        Ok(())
    }
}

fn check_ell(ell: usize) -> Result<()> {
    if ell == 0 {
        Err(domain("run length ℓ must be at least 1"))
    } else {
        Ok(())
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Exact law of `D` by the renewal-type recursion.
pub fn exact_distribution(profile: &BernoulliProfile, ell: usize, n_max: usize) -> Result<RunDistribution> {
    check_ell(ell)?;
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    if let Some(len) = profile.trials() {
        if n_max + ell - 1 > len {
            return Err(domain(format!(
                "explicit profile has {len} trials; n_max = {n_max} with ℓ = {ell} needs {}",
                n_max + ell - 1
            )));
        }
    }
    let trials = n_max + ell - 1;
    let mut log_p = vec![0.0; trials + 1];
    let mut log_q = vec![0.0; trials + 1];
    for i in 1..=trials {
        (log_p[i], log_q[i]) = profile.log_pq(i)?;
    }
    // No run is complete after trial m: split by the length k < ℓ of the
    // trailing run of ones,
    //   G(m) = Σ_k q_{m−k} G(m−k−1) ∏_{j=m−k+1}^{m} p_j   (q_0 G(−1) read as 1).
    // Every term is positive, so deep tails keep full relative accuracy in
    // log-space. P(D > n) = G(n + ℓ − 1).
    let mut log_g = vec![0.0; trials + 1];
    let mut log_restart = vec![0.0; trials + 1];
    let mut terms = Vec::with_capacity(ell);
    for m in 1..=trials {
        log_restart[m] = log_q[m] + log_g[m - 1];
        if m < ell {
            continue;
        }
        terms.clear();
        let mut run = 0.0;
        for k in 0..ell.min(m + 1) {
            terms.push(log_restart[m - k] + run);
            run += log_p[m - k];
        }
        let lg = log_sum_exp(&terms);
        if lg.is_nan() || lg > 1e-12 {
            return Err(Error::Integrity(format!("invalid probability after trial {m}")));
        }
        log_g[m] = lg.min(0.0);
    }
    let log_tail: Vec<f64> = (0..=n_max).map(|n| log_g[n + ell - 1]).collect();
    let tail: Vec<f64> = log_tail.iter().map(|l| l.exp()).collect();
    let mut mass = vec![0.0; n_max + 1];
    // P(D = n+1) = q_n P(D > n−ℓ) ∏_{j=n+1}^{n+ℓ} p_j, with q_0 P(D > −ℓ) read as 1
    let mut window: f64 = log_p[1..=ell].iter().sum();
    mass[1] = window.exp();
    for n in 1..n_max {
        window += log_p[n + ell] - log_p[n];
        let prior = if n > ell { log_tail[n - ell] } else { 0.0 };
        mass[n + 1] = (log_q[n] + prior + window).exp();
    }
    Ok(RunDistribution {
        n_max,
        mass,
        tail,
        log_tail,
    })
}

/// `P(D > n)` by summing over all `2^{n+ℓ−1}` outcomes of the trials.
pub fn brute_force_tail(profile: &BernoulliProfile, ell: usize, n: usize) -> Result<f64> {
    check_ell(ell)?;
    let trials = n + ell - 1;
    if trials > BRUTE_FORCE_MAX_TRIALS {
        return Err(domain(format!(
            "n + ℓ − 1 = {trials} exceeds the enumeration bound {BRUTE_FORCE_MAX_TRIALS}"
        )));
    }
    let p: Vec<f64> = (1..=trials).map(|i| profile.p(i)).collect::<Result<_>>()?;
    let full: u32 = if trials == 32 { u32::MAX } else { (1u32 << trials) - 1 };
    let mut total = 0.0;
    for outcome in 0..=full {
        // bit k set ⇔ trial k+1 succeeds; a run of ℓ ones survives ℓ−1 shifted ANDs
        let mut runs = outcome;
        for s in 1..ell {
            runs &= outcome >> s;
        }
        if runs != 0 {
            continue;
        }
        let mut prob = 1.0;
        for (k, &pk) in p.iter().enumerate() {
            prob *= if outcome >> k & 1 == 1 { pk } else { 1.0 - pk };
        }
        total += prob;
    }
    Ok(total)
}

/// Partial sums `Σ q_i` and `I = Σ q_i ∏_{j=i+1}^{i+ℓ} p_j` over `i ≤ terms`.
fn partial_sums(profile: &BernoulliProfile, ell: usize, terms: usize) -> Result<(f64, f64)> {
    let (mut sum_q, mut sum_i) = (0.0, 0.0);
    for i in 1..=terms {
        let (_, lq) = profile.log_pq(i)?;
        let mut lp = 0.0;
        for j in i + 1..=i + ell {
            lp += profile.log_pq(j)?.0;
        }
        sum_q += lq.exp();
        sum_i += (lq + lp).exp();
    }
    Ok((sum_q, sum_i))
}

/// Symbolic behaviour of `(Σ q_i < ∞, I = ∞)`, when known.
fn series_behaviour(profile: &BernoulliProfile, ell: usize) -> Option<(bool, bool)> {
    let l = ell as f64;
    match profile.tag() {
        // constant positive terms
        ProfileTag::Constant { .. } => Some((false, true)),
        // q_i → 1, terms ~ i^{−bℓ}
        ProfileTag::PowerLaw { b } => Some((false, b * l <= 1.0 || is_critical(b * l, 1.0))),
        // q_i ~ a i^{−b}, and the products tend to 1
        ProfileTag::StretchedExp { b, .. } => {
            let summable = *b > 1.0 && !is_critical(*b, 1.0);
            Some((summable, !summable))
        }
        ProfileTag::Discretized(rf) => discretized_behaviour(rf, l),
        ProfileTag::Explicit(_) => None,
    }
}

/// For `p_i = e^{−μ(i)}`: `q_i ≈ μ(i)` when `μ → 0`, and the terms of `I`
/// behave like `e^{−ℓμ(i)}` when `μ → ∞`.
fn discretized_behaviour(rf: &RateFunction, l: f64) -> Option<(bool, bool)> {
    match rf.rate_limit()? {
        RateLimit::Finite(_) => Some((false, true)),
        RateLimit::Zero => {
            let finite = rf.total_mass_finite()?;
            Some((finite, !finite))
        }
        RateLimit::Infinite => {
            let diverges = match rf.as_family() {
                // e^{−ℓμ(i)} = a^ℓ i^{−bℓ}
                Some(Family::LogGrowth { b, .. }) => b * l <= 1.0 || is_critical(b * l, 1.0),
                // e^{−ℓμ(i)} ~ a^ℓ i^{−ℓ} log^{bℓ} i
                Some(Family::LogLogGrowth { b, .. }) => {
                    l < 1.0 || (is_critical(l, 1.0) && (b >= -1.0 || is_critical(b, -1.0)))
                }
                // e^{−ℓμ(i)} = i^{−ℓ/s} (log i)^{…}: compare ℓ with the scale s
                Some(Family::IteratedLogBoundary { n, b, ell: s }) => {
                    if is_critical(l, s) {
                        n == 2 && (b <= 0.0 || is_critical(b, 0.0))
                    } else {
                        l < s
                    }
                }
                _ => {
                    let lim = rf.log_ratio_limit()?;
                    if is_critical(lim * l, 1.0) {
                        return None;
                    }
                    lim * l < 1.0
                }
            };
            Some((false, diverges))
        }
    }
}

/// Discrete integral test: `D < ∞` a.s. when `Σ q_i < ∞` or `I = ∞`;
/// `P(D = ∞) > 0` when `I < ∞` and `Σ q_i = ∞`.
pub fn run_sum_test(profile: &BernoulliProfile, ell: usize) -> Result<ClassificationVerdict> {
    check_ell(ell)?;
    let terms = profile.trials().map_or(EVIDENCE_TERMS, |len| len.saturating_sub(ell));
    let (sum_q, sum_i) = partial_sums(profile, ell, terms)?;
    let (verdict, criterion) = match series_behaviour(profile, ell) {
        Some((true, _)) => (Verdict::AlmostSurelyFinite, Criterion::TotalMassFinite),
        Some((false, true)) => (Verdict::AlmostSurelyFinite, Criterion::IntegralDiverges),
        Some((false, false)) => (Verdict::PositiveProbabilityInfinite, Criterion::IntegralConverges),
        None => (Verdict::Inconclusive, Criterion::IntegralConverges),
    };
    let mut evidence = BTreeMap::new();
    evidence.insert("terms".to_string(), terms as f64);
    evidence.insert("partial_sum_q".to_string(), sum_q);
    evidence.insert("partial_integral".to_string(), sum_i);
    Ok(ClassificationVerdict {
        verdict,
        criterion,
        evidence,
    })
}

/// The root `z > 1` of `(1−p) z Σ_{i<ℓ} (pz)^i = 1`; `P(D > n)` decays like
/// `z^{−n}` for constant `p`.
pub fn z_root(p: f64, ell: usize) -> Result<f64> {
    open_unit("p", p)?;
    check_ell(ell)?;
    let g = |z: f64| {
        let (mut sum, mut dsum, mut term) = (0.0, 0.0, 1.0);
        for i in 0..ell {
            sum += term;
            if i > 0 {
                dsum += i as f64 * term / z;
            }
            term *= p * z;
        }
        ((1.0 - p) * z * sum - 1.0, (1.0 - p) * (sum + z * dsum))
    };
    // g(1) = −p^ℓ < 0 and g(1/(1−p)) ≥ 0
    roots::newton_bisect(g, 1.0, 1.0 / (1.0 - p), 1e-15)
}

/// Logarithmic form of `−log P(D > n)` for the parametric profiles.
pub fn discrete_asymptotic_form(profile: &BernoulliProfile, ell: usize) -> Result<AsymptoticForm> {
    check_ell(ell)?;
    let l = ell as f64;
    let (regime, formula, coefficient, index) = match profile.tag() {
        ProfileTag::Constant { p } => (Regime::Exponential, RateFormula::Linear, z_root(*p, ell)?.ln(), None),
        ProfileTag::StretchedExp { b, .. } => (Regime::ShortTail, RateFormula::TLogT, b / l, Some((0.0, 1.0))),
        ProfileTag::PowerLaw { b } => {
            if b * l >= 1.0 {
                return Err(Error::UnsupportedFamily(format!(
                    "power-law profile with bℓ = {} ≥ 1 has no long-tail form",
                    b * l
                )));
            }
            let q = 1.0 - b * l;
            (Regime::LongTail, RateFormula::Power { power: q }, 1.0 / q, None)
        }
        other => {
            return Err(Error::UnsupportedFamily(format!("no asymptotic form for {other:?}")));
        }
    };
    Ok(AsymptoticForm {
        regime,
        formula,
        coefficient,
        index_params: index,
        constant_c: None,
    })
}

/// `p_i = e^{−μ(i)}`.
pub fn discretize(rf: &RateFunction) -> Result<BernoulliProfile> {
    if let Some(Family::Constant { mu }) = rf.as_family() {
        return BernoulliProfile::constant((-mu).exp())
            .map_err(|e| Error::Precondition(e.to_string()));
    }
    let profile = BernoulliProfile {
        tag: ProfileTag::Discretized(rf.clone()),
    };
    for i in 1..=1000 {
        profile.p(i)?;
    }
    Ok(profile)
}

/// Serializable profile:
/// `{"family": "constant", "params": {"p": 0.5}}`, `"power_law"` (`b`),
/// `"stretched_exp"` (`a`, `b`), `"explicit"` with `"values": [...]`, or
/// `"discretized"` with a nested `"rate"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateSpec>,
}

impl BernoulliProfile {
    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            spec.params.get(key).copied().ok_or_else(|| {
                Error::Config(format!("profile '{}' needs parameter '{key}'", spec.family))
            })
        };
        let built = match spec.family.as_str() {
            "constant" => Self::constant(get("p")?),
            "power_law" => Self::power_law(get("b")?),
            "stretched_exp" => Self::stretched_exp(get("a")?, get("b")?),
            "explicit" => match &spec.values {
                Some(v) => Self::explicit(v.clone()),
                None => return Err(Error::Config("explicit profile needs 'values'".into())),
            },
            "discretized" => match &spec.rate {
                Some(r) => discretize(&RateFunction::from_spec(r)?),
                None => return Err(Error::Config("discretized profile needs 'rate'".into())),
            },
            other => return Err(Error::Config(format!("unknown profile family '{other}'"))),
        };
        built.map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })
    }

    pub fn to_spec(&self) -> Result<ProfileSpec> {
        let mut spec = ProfileSpec {
            family: String::new(),
            params: BTreeMap::new(),
            values: None,
            rate: None,
        };
        match &self.tag {
            ProfileTag::Constant { p } => {
                spec.family = "constant".into();
                spec.params.insert("p".into(), *p);
            }
            ProfileTag::PowerLaw { b } => {
                spec.family = "power_law".into();
                spec.params.insert("b".into(), *b);
            }
            ProfileTag::StretchedExp { a, b } => {
                spec.family = "stretched_exp".into();
                spec.params.insert("a".into(), *a);
                spec.params.insert("b".into(), *b);
            }
            ProfileTag::Explicit(v) => {
                spec.family = "explicit".into();
                spec.values = Some(v.clone());
            }
            ProfileTag::Discretized(rf) => {
                spec.family = "discretized".into();
                spec.rate = Some(rf.to_spec()?);
            }
        }
        Ok(spec)
    }
}

//! Exact tail `P(D > t)` of the first-gap time via the delay differential
//! equation
//!
//! ```text
//! P(D > t)' = −e^{−M(t, t+ℓ)} μ(t) P(D > t − ℓ)
//! ```
//!
//! integrated in the log form `f = −log P(D > t)`:
//!
//! ```text
//! f'(t) = e^{−M(t, t+ℓ)} μ(t) e^{f(t) − f(t−ℓ)}
//! ```
//!
//! On `[0, ℓ]` the tail is known in closed form up to a quadrature,
//! `P(D > t) = 1 − e^{−M(0,ℓ)} − ∫_0^t e^{−M(s,s+ℓ)} μ(s) ds`. Beyond that the
//! grid has step `ℓ/N`, so every delayed value `f(t − ℓ)` and every interval
//! seam `kℓ` is a node. Stepping the log form directly amplifies errors by
//! `e^{f(t)}`-like factors when the tail is short; the default [`Scheme`]
//! integrates the equivalent last-epoch representation instead, whose terms
//! are all positive.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::intensity::RateFunction;
use crate::quadrature::{self, Tolerance};

/// Fewest grid steps per gap length.
pub const MIN_STEPS_PER_GAP: usize = 16;

/// `h · f'` above this triggers an accuracy warning.
const STEP_WARNING_THRESHOLD: f64 = 0.25;
/// Change of `log μ` across one step above this triggers an accuracy warning.
const RATE_VARIATION_THRESHOLD: f64 = 0.5;
/// Relative decrease of `f` tolerated as rounding before it counts as an error.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    Dde,
    MonteCarlo,
}

/// `P(D > t)` on a grid, with `f = −log P` kept alongside to survive underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCurve {
    pub ell: f64,
    pub step: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub neg_log: Vec<f64>,
    pub source: CurveSource,
    pub warnings: Vec<String>,
}

impl TailCurve {
    /// Builds a curve from explicit `(t, P)` points. Times must increase
    /// strictly and values must be non-increasing in `(0, 1]`.
    pub fn from_points(ell: f64, times: Vec<f64>, values: Vec<f64>, source: CurveSource) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(domain("times and values must be non-empty and of equal length"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("curve times must be strictly increasing"));
        }
        if values.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(domain("curve values must lie in (0, 1]"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Integrity("curve values must be non-increasing".into()));
        }
        let neg_log = values.iter().map(|p| -p.ln()).collect();
        let step = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
        Ok(Self {
            ell,
            step,
            times,
            values,
            neg_log,
            source,
            warnings: Vec::new(),
        })
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("curves are non-empty")
    }

    /// `−log P(D > t)`, log-linear between grid nodes.
    pub fn neg_log_at(&self, t: f64) -> Result<f64> {
        if !(t >= self.times[0]) || t > self.horizon() {
            return Err(domain(format!(
                "t = {t} outside curve range [{}, {}]",
                self.times[0],
                self.horizon()
            )));
        }
        let idx = self.times.partition_point(|&x| x <= t);
        // times[idx - 1] <= t < times[idx]
        let lo = idx - 1;
        if self.times[lo] == t || lo + 1 == self.times.len() {
            return Ok(self.neg_log[lo]);
        }
        let (t0, t1) = (self.times[lo], self.times[lo + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.neg_log[lo] + w * (self.neg_log[lo + 1] - self.neg_log[lo]))
    }

    /// `P(D > t)`; exact at grid nodes, log-linear between them.
    pub fn tail_at(&self, t: f64) -> Result<f64> {
        let idx = self.times.partition_point(|&x| x < t);
        if idx < self.times.len() && self.times[idx] == t {
            return Ok(self.values[idx]);
        }
        Ok((-self.neg_log_at(t)?).exp())
    }

    /// Least-squares slope of `−log P` over the nodes in `[t0, t1]`.
    pub fn neg_log_slope(&self, t0: f64, t1: f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.neg_log)
            .filter(|(&t, _)| t >= t0 && t <= t1)
            .map(|(&t, &f)| (t, f))
            .collect();
        if pts.len() < 2 {
            return Err(domain(format!("fewer than two grid nodes in [{t0}, {t1}]")));
        }
        let n = pts.len() as f64;
        let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_f = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (t, f) in &pts {
            sxy += (t - mean_t) * (f - mean_f);
            sxx += (t - mean_t) * (t - mean_t);
        }
        Ok(sxy / sxx)
    }

    /// CSV with header `t,P,neglogP`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,P,neglogP")?;
        for ((t, p), f) in self.times.iter().zip(&self.values).zip(&self.neg_log) {
            writeln!(out, "{t:.16e},{p:.16e},{f:.16e}")?;
        }
        Ok(())
    }
}

fn gap_integrand(rf: &RateFunction, ell: f64, s: f64) -> f64 {
    let window = rf.cumulative(s, s + ell).unwrap_or(f64::NAN);
    (-window).exp() * rf.eval_unchecked(s)
}

fn check_ell(ell: f64) -> Result<()> {
    if ell.is_finite() && ell > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("gap length must be positive and finite, got {ell}")))
    }
}

/// `P(D > t)` for `0 ≤ t < ℓ` from the closed-form initial condition.
pub fn initial_tail(rf: &RateFunction, ell: f64, t: f64) -> Result<f64> {
    check_ell(ell)?;
    if !(t >= 0.0) {
        return Err(domain(format!("t must be ≥ 0, got {t}")));
    }
    if t >= ell {
        return Err(domain(format!(
            "initial_tail covers [0, ℓ) only (t = {t}, ℓ = {ell}); use solve_tail"
        )));
    }
    let no_point_mass = -(-rf.cumulative(0.0, ell)?).exp_m1();
    let r = quadrature::integrate(|s| gap_integrand(rf, ell, s), 0.0, t, Tolerance::default());
    clamp_probability(no_point_mass - r.value, r.abs_error)
}

fn clamp_probability(p: f64, quad_err: f64) -> Result<f64> {
    let slack = 10.0 * (quad_err + quadrature::DEFAULT_REL_TOL);
    if !p.is_finite() || p < -slack || p > 1.0 + slack {
        return Err(Error::Integrity(format!(
            "tail probability {p} outside [0, 1] beyond tolerance {slack}"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Number of grid steps per gap for a requested step (the grid step is
/// `ℓ / N` with `N = ⌈ℓ / step⌉`).
pub fn steps_per_gap(ell: f64, step: f64) -> Result<usize> {
    check_ell(ell)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(domain(format!("step must be positive, got {step}")));
    }
    let n = (ell / step - 1e-9).ceil().max(1.0);
    if n < MIN_STEPS_PER_GAP as f64 {
        return Err(domain(format!(
            "step {step} too coarse: need step ≤ ℓ/{MIN_STEPS_PER_GAP} = {}",
            ell / MIN_STEPS_PER_GAP as f64
        )));
    }
    if n > 1e8 {
        return Err(domain(format!("step {step} too fine for ℓ = {ell}")));
    }
    Ok(n as usize)
}

/// Integration scheme beyond the first gap length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Condition on the last epoch `u ∈ [t−ℓ, t]`:
    /// `P(D > t) = ∫_{t−ℓ}^{t} μ(u) P(D > u−ℓ) (e^{−M(u,t)} − e^{−M(u,u+ℓ)}) du`,
    /// a sum of positive terms, integrated segment by segment with the log of
/// the integrand interpolated linearly (exact for exponential kernels).
    /// Stable for every tail shape.
    #[default]
    LastEpoch,
    /// Trapezoidal predictor–corrector on `f' = e^{−M(t,t+ℓ)} μ(t) e^{f(t)−f(t−ℓ)}`.
    /// Errors grow like `e^{∫ f'}`, so it loses all accuracy once `f'` is
    /// large (short-tailed rates); kept for comparison.
    LogHeun,
}

/// Solves for `P(D > t)` on `[0, horizon]` with the default scheme.
pub fn solve_tail(rf: &RateFunction, ell: f64, horizon: f64, step: f64) -> Result<TailCurve> {
    solve_tail_with(rf, ell, horizon, step, Scheme::default())
}

pub fn solve_tail_with(rf: &RateFunction, ell: f64, horizon: f64, step: f64, scheme: Scheme) -> Result<TailCurve> {
    let per_gap = steps_per_gap(ell, step)?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(domain(format!("horizon must be positive and finite, got {horizon}")));
    }
    let h = ell / per_gap as f64;
    let n_steps = (horizon / h - 1e-9).ceil().max(1.0) as usize;
    let node = |i: usize| i as f64 * h;
    let mut warnings = Vec::new();

    // first interval, including the seam at ℓ where P is continuous
    let first = n_steps.min(per_gap);
    let no_point_mass = -(-rf.cumulative(0.0, ell)?).exp_m1();
    let mut neg_log = Vec::with_capacity(n_steps + 1);
    neg_log.push(-no_point_mass.ln());
    let mut integral = 0.0;
    let mut integral_err = 0.0;
    for i in 0..first {
        let r = quadrature::integrate(|s| gap_integrand(rf, ell, s), node(i), node(i + 1), Tolerance::default());
        integral += r.value;
        integral_err += r.abs_error;
        let p = clamp_probability(no_point_mass - integral, integral_err)?;
        if p <= 0.0 {
            return Err(Error::Integrity(format!("tail vanished at t = {}", node(i + 1))));
        }
        neg_log.push(-p.ln());
    }

    if n_steps > per_gap {
        match scheme {
            Scheme::LastEpoch => extend_last_epoch(rf, h, per_gap, n_steps, &mut neg_log)?,
            Scheme::LogHeun => extend_log_heun(rf, ell, h, per_gap, n_steps, &mut neg_log)?,
        }
        let slope_max = neg_log[per_gap..]
            .windows(2)
            .enumerate()
            .find(|(_, w)| w[1] - w[0] > STEP_WARNING_THRESHOLD);
        if let Some((i, _)) = slope_max {
            warnings.push(format!(
                "step {h} is large relative to the tail decay rate near t = {}",
                node(per_gap + i)
            ));
        }
        for i in per_gap..n_steps {
            let (m0, m1) = (rf.eval_unchecked(node(i)), rf.eval_unchecked(node(i + 1)));
            if (m1.ln() - m0.ln()).abs() > RATE_VARIATION_THRESHOLD {
                warnings.push(format!(
                    "rate varies by more than a factor e^{RATE_VARIATION_THRESHOLD} within one step near t = {}",
                    node(i)
                ));
                break;
            }
        }
    }

    Ok(TailCurve {
        ell,
        step: h,
        times: (0..=n_steps).map(node).collect(),
        values: neg_log.iter().map(|f| (-f).exp()).collect(),
        neg_log,
        source: CurveSource::Dde,
        warnings,
    })
}

fn accept_step(neg_log: &mut Vec<f64>, f_next: f64, t: f64) -> Result<()> {
    let f_prev = *neg_log.last().expect("first interval already solved");
    if !f_next.is_finite() {
        return Err(Error::Integrity(format!("non-finite log-tail at t = {t}")));
    }
    if f_next < f_prev - MONOTONE_SLACK * f_prev.abs().max(1.0) {
        return Err(Error::Integrity(format!("log-tail decreased at t = {t}")));
    }
    neg_log.push(f_next.max(f_prev));
    Ok(())
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// `log ∫` over one step of `exp` of the linear interpolant between `a0` and `a1`;
/// trapezoid when an end vanishes (the kernel starts from zero).
fn log_segment(a0: f64, a1: f64, log_h: f64) -> f64 {
    let (lo, hi) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
    if lo == f64::NEG_INFINITY {
        return hi + log_h - std::f64::consts::LN_2;
    }
    let d = hi - lo;
    let shape = if d < 1e-12 { 0.0 } else { (-(-d).exp_m1() / d).ln() };
    hi + log_h + shape
}

fn extend_last_epoch(rf: &RateFunction, h: f64, n: usize, n_steps: usize, neg_log: &mut Vec<f64>) -> Result<()> {
    let node = |i: usize| i as f64 * h;
    let step_mass: Vec<f64> = (0..n_steps + n)
        .map(|k| rf.cumulative(node(k), node(k + 1)))
        .collect::<Result<_>>()?;
    let log_mu: Vec<f64> = (0..=n_steps).map(|j| rf.eval_unchecked(node(j)).ln()).collect();
    // offsets r = 0..=n within the window, node j = t − n + r
    let mut before = vec![0.0; n + 1]; // M(t_j, t)
    let mut after = vec![0.0; n + 1]; // M(t, t_j + ℓ)
    let mut terms = Vec::with_capacity(n);
    let mut log_g = vec![0.0; n + 1];
    let log_h = h.ln();
    for t in n + 1..=n_steps {
        let lo = t - n;
        for r in (0..n).rev() {
            before[r] = before[r + 1] + step_mass[lo + r];
        }
        for r in 1..=n {
            after[r] = after[r - 1] + step_mass[t + r - 1];
        }
        // log of μ(u) P(D > u−ℓ) (e^{−M(u,t)} − e^{−M(u,u+ℓ)}) at node lo + r
        for r in 0..=n {
            let j = lo + r;
            let delayed = if j >= n { neg_log[j - n] } else { 0.0 };
            log_g[r] = log_mu[j] - delayed - before[r] + (-(-after[r]).exp_m1()).ln();
        }
        terms.clear();
        for r in 1..=n {
            // P(D > u−ℓ) jumps from 1 to P(D > 0) as u crosses ℓ
            let right = if lo + r == n { log_g[r] + neg_log[0] } else { log_g[r] };
            terms.push(log_segment(log_g[r - 1], right, log_h));
        }
        accept_step(neg_log, -log_sum_exp(&terms), node(t))?;
    }
    Ok(())
}

fn extend_log_heun(
    rf: &RateFunction,
    ell: f64,
    h: f64,
    per_gap: usize,
    n_steps: usize,
    neg_log: &mut Vec<f64>,
) -> Result<()> {
    let log_g = log_gap_integrand_on_grid(rf, ell, h, per_gap, n_steps)?;
    for i in per_gap..n_steps {
        let f_i = neg_log[i];
        let slope_i = (log_g[i] + f_i - neg_log[i - per_gap]).exp();
        let predicted = f_i + h * slope_i;
        let slope_next = (log_g[i + 1] + predicted - neg_log[i + 1 - per_gap]).exp();
        accept_step(neg_log, f_i + 0.5 * h * (slope_i + slope_next), (i + 1) as f64 * h)?;
    }
    Ok(())
}

/// `log(e^{−M(t,t+ℓ)} μ(t))` at grid nodes `0..=last`.
fn log_gap_integrand_on_grid(
    rf: &RateFunction,
    ell: f64,
    h: f64,
    per_gap: usize,
    last: usize,
) -> Result<Vec<f64>> {
    let node = |i: usize| i as f64 * h;
    let windows: Vec<f64> = if rf.has_closed_form_cumulative() {
        (0..=last)
            .map(|i| rf.cumulative(node(i), node(i) + ell))
            .collect::<Result<_>>()?
    } else {
        // prefix sums of per-step masses
        let mut prefix = Vec::with_capacity(last + per_gap + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for j in 0..(last + per_gap) {
            acc += rf.cumulative(node(j), node(j + 1))?;
            prefix.push(acc);
        }
        (0..=last).map(|i| prefix[i + per_gap] - prefix[i]).collect()
    };
    Ok(windows
        .iter()
        .enumerate()
        .map(|(i, w)| rf.eval_unchecked(node(i)).ln() - w)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::{Family, RateFunction};
    use approx::assert_relative_eq;

    fn unit() -> RateFunction {
        RateFunction::constant(1.0).unwrap()
    }

    /// Closed form of the initial condition for constant μ:
    /// P(D > t) = 1 − e^{−μℓ}(1 + μt) for t < ℓ.
    fn constant_initial(mu: f64, ell: f64, t: f64) -> f64 {
        1.0 - (-mu * ell).exp() * (1.0 + mu * t)
    }

    #[test]
    fn initial_tail_examples() {
        assert_relative_eq!(initial_tail(&unit(), 1.0, 0.0).unwrap(), 1.0 - (-1f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(initial_tail(&unit(), 1.0, 0.5).unwrap(), 0.448_180_838_242_836_5, max_relative = 1e-12);
        let two = RateFunction::constant(2.0).unwrap();
        assert_relative_eq!(initial_tail(&two, 1.0, 0.0).unwrap(), 0.864_664_716_763_387_3, max_relative = 1e-14);
        assert!(matches!(initial_tail(&unit(), 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(initial_tail(&unit(), 0.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn first_interval_matches_closed_form() {
        let curve = solve_tail(&unit(), 1.0, 0.9, 1.0 / 64.0).unwrap();
        assert_eq!(curve.source, CurveSource::Dde);
        for (&t, &p) in curve.times.iter().zip(&curve.values) {
            assert!((p - constant_initial(1.0, 1.0, t)).abs() < 1e-9, "t={t}");
        }
        assert_eq!(curve.values[0], -(-1f64).exp_m1());
    }

    #[test]
    fn coarse_step_rejected() {
        assert!(matches!(solve_tail(&unit(), 1.0, 5.0, 0.1), Err(Error::Domain(_))));
        assert!(solve_tail(&unit(), 1.0, 5.0, 1.0 / 16.0).is_ok());
    }

    #[test]
    fn curve_is_monotone_and_bounded() {
        let rf = RateFunction::family(Family::PowerDecay { a: 1.0, b: 1.0 }).unwrap();
        let c = solve_tail(&rf, 1.0, 20.0, 1.0 / 32.0).unwrap();
        assert!(c.values.iter().all(|&p| (0.0..=1.0).contains(&p)));
        assert!(c.neg_log.windows(2).all(|w| w[1] >= w[0]));
        assert!(c.values.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn tail_at_examples() {
        let c = TailCurve::from_points(1.0, vec![1.0, 2.0], vec![0.5, 0.25], CurveSource::Dde).unwrap();
        assert_relative_eq!(c.tail_at(1.5).unwrap(), 0.353_553_390_593_273_8, max_relative = 1e-14);
        assert_eq!(c.tail_at(2.0).unwrap(), 0.25);
        assert!(matches!(c.tail_at(2.5), Err(Error::Domain(_))));

        let curve = solve_tail(&unit(), 1.0, 5.0, 1.0 / 64.0).unwrap();
        assert!((curve.tail_at(0.5).unwrap() - 0.448_180_838_242_836_5).abs() < 1e-6);
        for i in [0, 7, 64, 200] {
            assert_eq!(curve.tail_at(curve.times[i]).unwrap(), curve.values[i]);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let c = solve_tail(&unit(), 1.0, 2.0, 1.0 / 16.0).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,P,neglogP"));
        assert_eq!(lines.count(), c.times.len());
    }

    #[test]
    fn step_halving_converges() {
        let rf = RateFunction::family(Family::ExpDecay { a: 2.0, b: 0.3 }).unwrap();
        let coarse = solve_tail(&rf, 1.0, 8.0, 1.0 / 16.0).unwrap();
        let mid = solve_tail(&rf, 1.0, 8.0, 1.0 / 32.0).unwrap();
        let fine = solve_tail(&rf, 1.0, 8.0, 1.0 / 64.0).unwrap();
        let diff = |a: &TailCurve, b: &TailCurve| {
            a.times
                .iter()
                .zip(&a.neg_log)
                .map(|(&t, &f)| (f - b.neg_log_at(t).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let d1 = diff(&coarse, &fine);
        let d2 = diff(&mid, &fine);
        assert!(d2 * 2.0 <= d1, "d1={d1} d2={d2}");
    }

    #[test]
    fn quadrature_backed_rate_matches_closed_form() {
        let closed = RateFunction::family(Family::ExpDecay { a: 1.5, b: 0.2 }).unwrap();
        let custom = RateFunction::custom("exp", |t: f64| 1.5 * (-0.2 * t).exp());
        let a = solve_tail(&closed, 1.0, 6.0, 1.0 / 32.0).unwrap();
        let b = solve_tail(&custom, 1.0, 6.0, 1.0 / 32.0).unwrap();
        for (x, y) in a.neg_log.iter().zip(&b.neg_log) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn respects_point_in_every_interval_envelope() {
        let rf = RateFunction::family(Family::PowerDecay { a: 1.0, b: 1.0 }).unwrap();
        let curve = solve_tail(&rf, 1.0, 40.0, 1.0 / 64.0).unwrap();
        for (&t, &f) in curve.times.iter().zip(&curve.neg_log) {
            let mut bound = 0.0;
            for i in 0..=(t.floor() as usize) {
                let m = rf.cumulative(i as f64, i as f64 + 1.0).unwrap();
                bound -= (-(-m).exp_m1()).ln();
            }
            assert!(f >= bound - 1e-9, "t={t}: {f} < {bound}");
        }
    }

    #[test]
    fn schemes_converge_to_the_same_tail() {
        let rf = RateFunction::constant(0.7).unwrap();
        let gap = |h: f64| {
            let a = solve_tail_with(&rf, 1.0, 15.0, h, Scheme::LastEpoch).unwrap();
            let b = solve_tail_with(&rf, 1.0, 15.0, h, Scheme::LogHeun).unwrap();
            (a.neg_log_at(15.0).unwrap() - b.neg_log_at(15.0).unwrap()).abs()
        };
        let (coarse, fine) = (gap(1.0 / 128.0), gap(1.0 / 512.0));
        assert!(fine < coarse / 4.0 && fine < 0.05, "{coarse} {fine}");
    }

    #[test]
    fn log_heun_loses_short_tails() {
        // the log form amplifies its own errors once f' is large
        let rf = RateFunction::family(Family::PowerDecay { a: 1.0, b: 1.0 }).unwrap();
        let stable = solve_tail(&rf, 1.0, 12.0, 1.0 / 128.0).unwrap();
        let heun = solve_tail_with(&rf, 1.0, 12.0, 1.0 / 128.0, Scheme::LogHeun).unwrap();
        assert!(stable.neg_log_at(12.0).unwrap() - heun.neg_log_at(12.0).unwrap() > 5.0);
    }
}

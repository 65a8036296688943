//! Monte Carlo simulation of first-gap times.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, path index)`,
//! so results do not depend on how paths are scheduled across threads.
//! Aggregation is by integer counts, which merge exactly in any order.

use std::io::{self, Write};
use std::ops::Range;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, Error, Result};
use crate::intensity::RateFunction;

/// Number of dyadic sample points per thinning block.
const MAJORANT_SAMPLES: usize = 64;
/// Safety factor applied to the sampled supremum.
const MAJORANT_MARGIN: f64 = 1.25;
/// Paths per parallel work unit.
const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Map unit-rate epochs through `M(0, ·)^{-1}`.
    Inversion,
    /// Propose at a blockwise-constant majorant and accept with `μ/majorant`.
    Thinning { block: f64 },
}

impl Method {
    /// Thinning with blocks of `ℓ/4`.
    pub fn thinning_for(ell: f64) -> Self {
        Method::Thinning { block: ell / 4.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub rf: RateFunction,
    pub ell: f64,
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub method: Method,
}

impl SimulationConfig {
    pub fn new(rf: RateFunction, ell: f64, horizon: f64, n_paths: u64, seed: u64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(domain(format!("gap length must be positive, got {ell}")));
        }
        if !(horizon > ell && horizon.is_finite()) {
            return Err(domain(format!("horizon {horizon} must exceed ℓ = {ell}")));
        }
        if n_paths == 0 {
            return Err(domain("n_paths must be at least 1"));
        }
        Ok(Self {
            rf,
            ell,
            horizon,
            n_paths,
            seed,
            method: Method::Inversion,
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// The random stream for one path.
pub fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// A unit-rate exponential variate.
pub fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1], so the log is finite
    -(1.0 - rng.random::<f64>()).ln()
}

/// Epochs of the process on `(0, horizon]`, in increasing order.
pub fn sample_path<R: Rng + ?Sized>(
    rf: &RateFunction,
    horizon: f64,
    method: Method,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain(format!("horizon must be positive, got {horizon}")));
    }
    match method {
        Method::Inversion => sample_by_inversion(rf, horizon, rng),
        Method::Thinning { block } => {
            if !(block > 0.0 && block.is_finite()) {
                return Err(domain(format!("thinning block must be positive, got {block}")));
            }
            sample_by_thinning(rf, horizon, block, rng)
        }
    }
}

fn sample_by_inversion<R: Rng + ?Sized>(rf: &RateFunction, horizon: f64, rng: &mut R) -> Result<Vec<f64>> {
    let mut epochs = Vec::new();
    let mut t = 0.0;
    loop {
        let e = unit_exponential(rng);
        if rf.cumulative(t, horizon)? < e {
            return Ok(epochs);
        }
        let next = rf.inverse_cumulative(t, e)?;
        if next > horizon {
            return Ok(epochs);
        }
        // a zero-width step means the mass is below floating-point resolution
        if next <= t {
            return Err(Error::Integrity(format!("inversion stalled at t = {t}")));
        }
        epochs.push(next);
        t = next;
    }
}

fn block_majorant(rf: &RateFunction, lo: f64, hi: f64) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for k in 0..=MAJORANT_SAMPLES {
        let t = lo + (hi - lo) * k as f64 / MAJORANT_SAMPLES as f64;
        sup = sup.max(rf.eval(t)?);
    }
    if !sup.is_finite() {
        return Err(Error::Integrity(format!(
            "rate is unbounded on [{lo}, {hi}]; thinning needs a finite majorant"
        )));
    }
    Ok(sup * MAJORANT_MARGIN)
}

fn sample_by_thinning<R: Rng + ?Sized>(
    rf: &RateFunction,
    horizon: f64,
    block: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut epochs = Vec::new();
    let mut lo = 0.0;
    while lo < horizon {
        let hi = (lo + block).min(horizon);
        let bound = block_majorant(rf, lo, hi)?;
        if bound > 0.0 {
            let mut t = lo;
            loop {
                t += unit_exponential(rng) / bound;
                if t > hi {
                    break;
                }
                let mu = rf.eval(t)?;
                if mu > bound {
                    return Err(Error::Integrity(format!(
                        "thinning majorant {bound} violated at t = {t} (μ = {mu})"
                    )));
                }
                if rng.random::<f64>() * bound < mu {
                    epochs.push(t);
                }
            }
        }
        lo = hi;
    }
    Ok(epochs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapOutcome {
    Gap(f64),
    Censored,
}

impl GapOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            GapOutcome::Gap(d) => Some(d),
            GapOutcome::Censored => None,
        }
    }
}

/// `D = min{T_n : T_{n+1} − T_n ≥ ℓ}` with `T_0 = 0`, as far as it is
/// resolved by the epochs on `(0, horizon]`.
pub fn first_gap(epochs: &[f64], ell: f64, horizon: f64) -> Result<GapOutcome> {
    if epochs.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("epochs must be sorted"));
    }
    if let (Some(&first), Some(&last)) = (epochs.first(), epochs.last()) {
        if !(first > 0.0) || last > horizon {
            return Err(domain(format!("epochs must lie in (0, {horizon}]")));
        }
    }
    let mut prev = 0.0;
    for &e in epochs {
        if e - prev >= ell {
            return Ok(GapOutcome::Gap(prev));
        }
        prev = e;
    }
    if prev + ell <= horizon {
        Ok(GapOutcome::Gap(prev))
    } else {
        Ok(GapOutcome::Censored)
    }
}

/// Exceedance counts `#{D > t}` on a grid; censored values count as
/// exceeding every grid point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailCounts {
    pub exceed: Vec<u64>,
    pub censored: u64,
    pub n: u64,
}

impl TailCounts {
    pub fn empty(grid_len: usize) -> Self {
        Self {
            exceed: vec![0; grid_len],
            censored: 0,
            n: 0,
        }
    }

    pub fn record(&mut self, grid: &[f64], value: Option<f64>) {
        self.n += 1;
        match value {
            None => {
                self.censored += 1;
                self.exceed.iter_mut().for_each(|c| *c += 1);
            }
            Some(d) => {
                for (c, &t) in self.exceed.iter_mut().zip(grid) {
                    if d > t {
                        *c += 1;
                    }
                }
            }
        }
    }

    pub fn merge(mut self, other: &TailCounts) -> Self {
        assert_eq!(self.exceed.len(), other.exceed.len(), "merging counts on different grids");
        for (a, b) in self.exceed.iter_mut().zip(&other.exceed) {
            *a += b;
        }
        self.censored += other.censored;
        self.n += other.n;
        self
    }
}

fn check_grid(grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("evaluation grid is empty"));
    }
    if let Some(&t) = grid.iter().find(|&&t| !(t >= lo && t <= hi)) {
        return Err(domain(format!("grid point {t} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// First-gap values of the paths in `paths`, in path order.
pub fn simulate_gaps(config: &SimulationConfig, paths: Range<u64>) -> Result<Vec<GapOutcome>> {
    let chunks: Vec<Range<u64>> = chunked(paths);
    let parts: Vec<Result<Vec<GapOutcome>>> = chunks
        .into_par_iter()
        .map(|range| {
            range
                .map(|i| {
                    let mut rng = path_rng(config.seed, i);
                    let epochs = sample_path(&config.rf, config.horizon, config.method, &mut rng)?;
                    first_gap(&epochs, config.ell, config.horizon)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn chunked(paths: Range<u64>) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut lo = paths.start;
    while lo < paths.end {
        let hi = (lo + CHUNK).min(paths.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Exceedance counts for a subset of paths; merging the counts of a
/// partition of `0..n_paths` reproduces [`empirical_tail`] exactly.
pub fn simulate_counts(config: &SimulationConfig, grid: &[f64], paths: Range<u64>) -> Result<TailCounts> {
    check_grid(grid, 0.0, config.horizon - config.ell)?;
    let parts: Vec<Result<TailCounts>> = chunked(paths)
        .into_par_iter()
        .map(|range| {
            let mut counts = TailCounts::empty(grid.len());
            for i in range {
                let mut rng = path_rng(config.seed, i);
                let epochs = sample_path(&config.rf, config.horizon, config.method, &mut rng)?;
                counts.record(grid, first_gap(&epochs, config.ell, config.horizon)?.value());
            }
            Ok(counts)
        })
        .collect();
    let mut total = TailCounts::empty(grid.len());
    for p in parts {
        total = total.merge(&p?);
    }
    Ok(total)
}

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTail {
    pub grid: Vec<f64>,
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub half_width: Vec<f64>,
    pub level: f64,
    pub censored_fraction: f64,
    pub n_paths: u64,
}

impl EmpiricalTail {
    pub fn from_counts(grid: &[f64], counts: &TailCounts, level: f64) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(domain(format!("confidence level must be in (0, 1), got {level}")));
        }
        if counts.n == 0 {
            return Err(domain("no paths were simulated"));
        }
        let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
        let n = counts.n as f64;
        let estimate: Vec<f64> = counts.exceed.iter().map(|&c| c as f64 / n).collect();
        let stderr: Vec<f64> = estimate.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
        Ok(Self {
            grid: grid.to_vec(),
            half_width: stderr.iter().map(|s| z * s).collect(),
            estimate,
            stderr,
            level,
            censored_fraction: counts.censored as f64 / n,
            n_paths: counts.n,
        })
    }

    /// CSV with header `t,Phat,stderr,censored_frac`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,Phat,stderr,censored_frac")?;
        for ((t, p), s) in self.grid.iter().zip(&self.estimate).zip(&self.stderr) {
            writeln!(out, "{t:.16e},{p:.16e},{s:.16e},{:.16e}", self.censored_fraction)?;
        }
        Ok(())
    }
}

/// Empirical `P(D > t)` on `grid ⊂ [0, horizon − ℓ]` at the default level.
pub fn empirical_tail(config: &SimulationConfig, grid: &[f64]) -> Result<EmpiricalTail> {
    empirical_tail_at_level(config, grid, DEFAULT_LEVEL)
}

pub fn empirical_tail_at_level(config: &SimulationConfig, grid: &[f64], level: f64) -> Result<EmpiricalTail> {
    let counts = simulate_counts(config, grid, 0..config.n_paths)?;
    EmpiricalTail::from_counts(grid, &counts, level)
}

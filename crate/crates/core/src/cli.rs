//! Command-line front end.
//!
//! Every subcommand prints one document (CSV or JSON) on stdout. Errors go to
//! stderr with exit status 2 (invalid configuration), 3 (numerical integrity)
//! or 4 (budget exceeded).

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

use crate::asymptotics;
use crate::bernoulli::{self, BernoulliProfile, ProfileSpec};
use crate::dde;
use crate::error::{Error, Result};
use crate::finiteness::{self, Verdict};
use crate::intensity::{Floor, RateFunction, RateSpec};
use crate::montecarlo::{self, Method, SimulationConfig};
use crate::restart::{self, ServiceRate, ServiceSpec, SolverBudget};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "firstgap", version, about = "First-gap times of inhomogeneous Poisson processes")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Output::Csv, global = true)]
    pub output: Output,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact tail P(D > t) on a grid
    Tail(TailArgs),
    /// Monte Carlo estimate of P(D > t)
    Simulate(SimulateArgs),
    /// Is D finite almost surely?
    Classify(ClassifyArgs),
    /// Asymptotic form of −log P(D > t)
    Asympt(AsymptArgs),
    /// Waiting time for a run of ones in Bernoulli trials
    Discrete(DiscreteArgs),
    /// RESTART completion-time tail
    Restart(RestartArgs),
    /// Run the built-in oracle checks
    Selftest,
}

/// Rate function given by family flags or a JSON document.
#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    /// constant, power_decay, log_power_decay, exp_decay, log_growth,
    /// log_log_growth or iterated_log
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Order of the iterated-log family
    #[arg(long)]
    pub n: Option<u32>,
    /// Gap length the iterated-log family is normalised to (default: --ell)
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub floor_t0: Option<f64>,
    #[arg(long)]
    pub floor_value: Option<f64>,
    /// Rate function as JSON (inline, or @path)
    #[arg(long, conflicts_with = "family")]
    pub rate: Option<String>,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long)]
    pub ell: f64,
    #[arg(long)]
    pub horizon: f64,
    /// Grid step, decimal or rational such as 1/64 (default ℓ/64)
    #[arg(long)]
    pub step: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Inversion,
    Thinning,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long)]
    pub ell: f64,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `lo:hi:count` or a comma-separated list (default 21 points on [0, horizon−ℓ])
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Inversion)]
    pub method: MethodArg,
    #[arg(long, default_value_t = montecarlo::DEFAULT_LEVEL)]
    pub level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    Integral,
    Threshold,
    IteratedLog,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long)]
    pub ell: f64,
    #[arg(long, value_enum, default_value_t = TestArg::Integral)]
    pub test: TestArg,
    /// Truncation point of the reported partial integrals
    #[arg(long, default_value_t = 100.0)]
    pub truncation: f64,
}

#[derive(Debug, Args)]
pub struct AsymptArgs {
    #[command(flatten)]
    pub rate: RateArgs,
    #[arg(long)]
    pub ell: f64,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    /// Profile as JSON (inline, or @path)
    #[arg(long)]
    pub profile: Option<String>,
    /// constant, power_law or stretched_exp
    #[arg(long, conflicts_with = "profile")]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct RestartArgs {
    #[arg(long)]
    pub mu_star: f64,
    /// constant, power_law or reciprocal
    #[arg(long)]
    pub rate_family: String,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Work the task needs (ℓ)
    #[arg(long)]
    pub task_size: f64,
    /// Comma-separated evaluation times
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value_t = SolverBudget::default().max_horizon)]
    pub max_horizon: f64,
    #[arg(long, default_value_t = SolverBudget::default().steps_per_gap)]
    pub steps_per_gap: usize,
}

/// Parses `1/64`, `0.015625` and the like.
pub fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse '{s}' as a number"));
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// `lo:hi:count` (inclusive, evenly spaced) or `t1,t2,...`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo = parse_rational(parts[0])?;
        let hi = parse_rational(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad grid count in '{s}'")))?;
        return Ok(linspace(lo, hi, count));
    }
    s.split(',').map(parse_rational).collect()
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn read_document(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn normalize_family(name: &str) -> String {
    let key: String = name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    match key.as_str() {
        "constant" => "constant",
        "powerdecay" => "power_decay",
        "logpowerdecay" => "log_power_decay",
        "expdecay" => "exp_decay",
        "loggrowth" => "log_growth",
        "logloggrowth" => "log_log_growth",
        "iteratedlog" | "iteratedlogboundary" => "iterated_log",
        "powerlaw" => "power_law",
        "stretchedexp" => "stretched_exp",
        "reciprocal" => "reciprocal",
        _ => return name.to_string(),
    }
    .to_string()
}

impl RateArgs {
    fn spec(&self, ell: f64) -> Result<RateSpec> {
        if let Some(doc) = &self.rate {
            return serde_json::from_str(&read_document(doc)?)
                .map_err(|e| Error::Config(format!("rate JSON: {e}")));
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("give --family or --rate".into()))?;
        let mut spec = RateSpec::named(&normalize_family(family));
        let mut put = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                spec.params.insert(key.to_string(), v);
            }
        };
        put("mu", self.mu);
        put("a", self.a);
        put("b", self.b);
        put("n", self.n.map(f64::from));
        if spec.family == "iterated_log" {
            spec.params.insert("ell".into(), self.scale.unwrap_or(ell));
        }
        match (self.floor_t0, self.floor_value) {
            (Some(t0), Some(value)) => spec.floor = Some(Floor { t0, value }),
            (None, None) => {}
            _ => return Err(Error::Config("--floor-t0 and --floor-value go together".into())),
        }
        Ok(spec)
    }

    fn build(&self, ell: f64) -> Result<(RateFunction, RateSpec)> {
        let spec = self.spec(ell)?;
        let rf = RateFunction::from_spec(&spec)?;
        Ok((rf, spec))
    }
}

fn positive_ell(ell: f64) -> Result<()> {
    if ell > 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("--ell must be positive, got {ell}")))
    }
}

fn to_json_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize") + "\n"
}

fn run_tail(args: &TailArgs, output: Output) -> Result<String> {
    positive_ell(args.ell)?;
    let (rf, spec) = args.rate.build(args.ell)?;
    let step = match &args.step {
        Some(s) => parse_rational(s)?,
        None => args.ell / 64.0,
    };
    let curve = dde::solve_tail(&rf, args.ell, args.horizon, step)?;
    for w in &curve.warnings {
        eprintln!("warning: {w}");
    }
    Ok(match output {
        Output::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Output::Json => to_json_string(&json!({
            "command": "tail",
            "rate": spec,
            "ell": args.ell,
            "horizon": args.horizon,
            "step": curve.step,
            "t": curve.times,
            "P": curve.values,
            "neglogP": curve.neg_log,
            "warnings": curve.warnings,
        })),
    })
}

fn run_simulate(args: &SimulateArgs, output: Output) -> Result<String> {
    positive_ell(args.ell)?;
    let (rf, spec) = args.rate.build(args.ell)?;
    let method = match args.method {
        MethodArg::Inversion => Method::Inversion,
        MethodArg::Thinning => Method::thinning_for(args.ell),
    };
    let config = SimulationConfig::new(rf, args.ell, args.horizon, args.paths, args.seed)?.with_method(method);
    let grid = match &args.grid {
        Some(g) => parse_grid(g)?,
        None => linspace(0.0, args.horizon - args.ell, 21),
    };
    let tail = montecarlo::empirical_tail_at_level(&config, &grid, args.level)?;
    Ok(match output {
        Output::Csv => {
            let mut buf = Vec::new();
            tail.write_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Output::Json => to_json_string(&json!({
            "command": "simulate",
            "rate": spec,
            "ell": args.ell,
            "horizon": args.horizon,
            "paths": args.paths,
            "seed": args.seed,
            "method": method,
            "level": tail.level,
            "t": tail.grid,
            "Phat": tail.estimate,
            "stderr": tail.stderr,
            "half_width": tail.half_width,
            "censored_frac": tail.censored_fraction,
        })),
    })
}

fn verdict_csv(v: &finiteness::ClassificationVerdict) -> String {
    let mut s = String::from("key,value\n");
    s += &format!("verdict,{:?}\ncriterion,{:?}\n", v.verdict, v.criterion);
    for (k, x) in &v.evidence {
        s += &format!("{k},{x:.16e}\n");
    }
    s
}

fn run_classify(args: &ClassifyArgs, output: Output) -> Result<String> {
    positive_ell(args.ell)?;
    let verdict = match args.test {
        TestArg::IteratedLog => {
            let n = args.rate.n.ok_or_else(|| Error::Config("iterated-log test needs --n".into()))?;
            let b = args.rate.b.ok_or_else(|| Error::Config("iterated-log test needs --b".into()))?;
            finiteness::iterated_log_classify(n, b, args.rate.scale.unwrap_or(args.ell))?
        }
        TestArg::Integral => {
            let (rf, _) = args.rate.build(args.ell)?;
            finiteness::integral_test(&rf, args.ell, args.truncation)?
        }
        TestArg::Threshold => {
            let (rf, _) = args.rate.build(args.ell)?;
            finiteness::log_threshold_classify(&rf, args.ell)?
        }
    };
    Ok(match output {
        Output::Csv => verdict_csv(&verdict),
        Output::Json => verdict.to_json() + "\n",
    })
}

fn run_asympt(args: &AsymptArgs, output: Output) -> Result<String> {
    positive_ell(args.ell)?;
    let (rf, _) = args.rate.build(args.ell)?;
    let form = asymptotics::asymptotic_form(&rf, args.ell)?;
    Ok(match output {
        Output::Json => to_json_string(&form.to_json()),
        Output::Csv => {
            let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.16e}"));
            let gamma = (form.regime == asymptotics::Regime::Exponential).then_some(form.coefficient);
            format!(
                "regime,f_formula,coefficient,gamma,c\n{:?},{},{:.16e},{},{}\n",
                form.regime,
                form,
                form.coefficient,
                opt(gamma),
                opt(form.constant_c)
            )
        }
    })
}

fn run_discrete(args: &DiscreteArgs, output: Output) -> Result<String> {
    let spec: ProfileSpec = match (&args.profile, &args.family) {
        (Some(doc), _) => serde_json::from_str(&read_document(doc)?)
            .map_err(|e| Error::Config(format!("profile JSON: {e}")))?,
        (None, Some(family)) => {
            let mut spec = ProfileSpec {
                family: normalize_family(family),
                params: Default::default(),
                values: None,
                rate: None,
            };
            for (k, v) in [("p", args.p), ("a", args.a), ("b", args.b)] {
                if let Some(v) = v {
                    spec.params.insert(k.into(), v);
                }
            }
            spec
        }
        (None, None) => return Err(Error::Config("give --profile or --family".into())),
    };
    let profile = BernoulliProfile::from_spec(&spec)?;
    let dist = bernoulli::exact_distribution(&profile, args.ell, args.n_max)?;
    Ok(match output {
        Output::Csv => {
            let mut buf = Vec::new();
            dist.write_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Output::Json => {
            let verdict = bernoulli::run_sum_test(&profile, args.ell)?;
            to_json_string(&json!({
                "command": "discrete",
                "profile": spec,
                "ell": args.ell,
                "n_max": args.n_max,
                "mass": &dist.mass[1..],
                "tail": &dist.tail[1..],
                "log_tail": &dist.log_tail[1..],
                "run_sum_test": verdict,
            }))
        }
    })
}

fn run_restart(args: &RestartArgs, output: Output) -> Result<String> {
    let mut spec = ServiceSpec {
        family: normalize_family(&args.rate_family),
        params: Default::default(),
    };
    for (k, v) in [("r", args.r), ("a", args.a), ("b", args.b)] {
        if let Some(v) = v {
            spec.params.insert(k.into(), v);
        }
    }
    let sr = ServiceRate::from_spec(&spec)?;
    let times = parse_grid(&args.t)?;
    let budget = SolverBudget {
        max_horizon: args.max_horizon,
        steps_per_gap: args.steps_per_gap,
    };
    let values = restart::total_time_curve(args.mu_star, &sr, args.task_size, &times, budget)?;
    Ok(match output {
        Output::Csv => {
            let mut s = String::from("t,P\n");
            for (t, p) in times.iter().zip(&values) {
                s += &format!("{t:.16e},{p:.16e}\n");
            }
            s
        }
        Output::Json => {
            let verdict = restart::classify_restart(args.mu_star, &sr, args.task_size)?;
            to_json_string(&json!({
                "command": "restart",
                "mu_star": args.mu_star,
                "service": spec,
                "task_size": args.task_size,
                "t": times,
                "P": values,
                "verdict": verdict,
            }))
        }
    })
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, got: f64, want: f64, tol: f64) -> Check {
    Check {
        name,
        passed: (got - want).abs() <= tol,
        detail: format!("got {got:.15e}, want {want:.15e}, tol {tol:e}"),
    }
}

fn selftest_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    out.push(check("gamma_root(2, 1)", asymptotics::gamma_root(2.0, 1.0)?, 0.406_375_739_959_959_9, 1e-12));
    out.push(check("gamma_root(0.5, 1)", asymptotics::gamma_root(0.5, 1.0)?, 1.756_431_208_626_169_7, 1e-12));
    out.push(check("renewal_constant(1, 1)", asymptotics::renewal_constant(1.0, 1.0)?, 2.0 / std::f64::consts::E, 1e-12));
    let unit = RateFunction::constant(1.0)?;
    out.push(check("initial_tail(0.5)", dde::initial_tail(&unit, 1.0, 0.5)?, 0.448_180_838_242_836_5, 1e-10));
    let curve = dde::solve_tail(&unit, 1.0, 1.0, 1.0 / 64.0)?;
    out.push(check("solve_tail seam", curve.tail_at(1.0)?, 1.0 - 2.0 * (-1f64).exp(), 1e-10));
    out.push(check("z_root(0.5, 2)", bernoulli::z_root(0.5, 2)?, 5f64.sqrt() - 1.0, 1e-13));

    let mut rng = montecarlo::path_rng(20_240_601, 0);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let ell = 1 + case % 4;
        let n = 14 - ell;
        let ps: Vec<f64> = (0..n + ell).map(|_| 0.05 + 0.9 * rng.random::<f64>()).collect();
        let profile = BernoulliProfile::explicit(ps)?;
        let exact = bernoulli::exact_distribution(&profile, ell, n)?.tail[n];
        let brute = bernoulli::brute_force_tail(&profile, ell, n)?;
        worst = worst.max((exact - brute).abs());
    }
    out.push(check("recursion vs enumeration", worst, 0.0, 1e-12));

    let verdicts = [
        (finiteness::iterated_log_classify(4, 1.0, 1.0)?.verdict, Verdict::AlmostSurelyFinite),
        (finiteness::iterated_log_classify(4, 1.5, 1.0)?.verdict, Verdict::PositiveProbabilityInfinite),
    ];
    out.push(Check {
        name: "iterated-log boundary",
        passed: verdicts.iter().all(|(a, b)| a == b),
        detail: format!("{verdicts:?}"),
    });
    Ok(out)
}

fn run_selftest(output: Output) -> Result<(String, bool)> {
    let checks = selftest_checks()?;
    let all = checks.iter().all(|c| c.passed);
    let text = match output {
        Output::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for c in &checks {
                s += &format!("{},{},\"{}\"\n", c.name, c.passed, c.detail);
            }
            s
        }
        Output::Json => to_json_string(&json!({
            "passed": all,
            "checks": checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })),
    };
    Ok((text, all))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Integrity(_) | Error::Divergent { .. } => EXIT_INTEGRITY,
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Config(_) | Error::Domain(_) | Error::Precondition(_) | Error::UnsupportedFamily(_) => EXIT_CONFIG,
    }
}

/// Executes a parsed command, returning the document to print.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Tail(a) => run_tail(a, cli.output),
        Command::Simulate(a) => run_simulate(a, cli.output),
        Command::Classify(a) => run_classify(a, cli.output),
        Command::Asympt(a) => run_asympt(a, cli.output),
        Command::Discrete(a) => run_discrete(a, cli.output),
        Command::Restart(a) => run_restart(a, cli.output),
        Command::Selftest => {
            let (text, passed) = run_selftest(cli.output)?;
            if passed {
                Ok(text)
            } else {
                Err(Error::Integrity(format!("selftest failed:\n{text}")))
            }
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("firstgap").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/64").unwrap(), 0.015625);
        assert_eq!(parse_rational(" 0.5 ").unwrap(), 0.5);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("1,2/4").unwrap(), vec![1.0, 0.5]);
    }

    #[test]
    fn tail_row_at_half() {
        let (code, out, _) = run_capture(&["tail", "--family", "constant", "--mu", "1", "--ell", "1", "--horizon", "5", "--step", "1/64"]);
        assert_eq!(code, 0);
        let row = out.lines().find(|l| l.starts_with("5.0000000000000000e-1,")).unwrap();
        let p: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((p - 0.4481808382428365).abs() < 1e-9);
    }

    #[test]
    fn classify_json() {
        let (code, out, _) = run_capture(&["--output", "json", "classify", "--family", "loggrowth", "--b", "2", "--a", "1", "--ell", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdict"], "PositiveProbabilityInfinite");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["tail", "--family", "nope", "--ell", "1", "--horizon", "2"]).0, EXIT_CONFIG);
        assert_eq!(run_capture(&["tail", "--family", "constant", "--ell", "1", "--horizon", "2"]).0, EXIT_CONFIG);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_CONFIG);
        assert_eq!(
            run_capture(&["restart", "--mu-star", "1", "--rate-family", "constant", "--r", "1", "--task-size", "1", "--t", "50", "--max-horizon", "10"]).0,
            EXIT_BUDGET
        );
        let custom_rate = r#"{"family":"power_decay","params":{"a":1,"b":0.5},"floor":{"T0":0,"value":1}}"#;
        assert_eq!(
            run_capture(&["simulate", "--rate", custom_rate, "--ell", "1", "--horizon", "3", "--paths", "10", "--method", "thinning"]).0,
            EXIT_INTEGRITY
        );
    }

    #[test]
    fn selftest_passes() {
        let (code, out, err) = run_capture(&["selftest"]);
        assert_eq!(code, 0, "{out}{err}");
    }
}

//! Command-line front end of the `periodik` binary.
//!
//! Exit codes: `0` success, `2` configuration / parse / I/O errors,
//! `3` precondition failures and degenerate localization.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::arcs::{hausdorff_distance, two_threshold_family, CircleSet, ModelOrder};
use crate::bounds::{
    corollary_event_rates, empirical_sup_tail, localization_failure_bounds,
    poisson_noise_sup_tail_bound, subgaussian_poly_tail_bound, LevelChoice, ProbabilityBound,
};
use crate::error::{Error, Result};
use crate::estimate::{estimate_in_mode, EstimateMode, EstimateOptions, ZRule};
use crate::io;
use crate::kernels::{
    check_kernel_bounds, evaluate_grid, kernel_at_one, kernel_grid, theta_samples, weight_energy,
    EvalPath, SummationMatrix,
};
use crate::schedule::{validate_schedule, ScheduleMode, ScheduleScheme, ThresholdSchedule};
use crate::signal::{synthesize, NoiseFamily, NoiseSpec, SignalModel};
use crate::sweep::{consistency_sweep, SweepPlan};

#[derive(Debug, Parser)]
#[command(name = "periodik", version, about = "Periodicities hidden in heavy-tailed noise")]
pub struct Cli {
    /// Worker threads (overrides PERIODIK_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a signal from a JSON model/noise config.
    Synth(SynthArgs),
    /// Kernel summaries, grid values and bound checks.
    Kernel(KernelArgs),
    /// Print or validate a threshold schedule.
    Schedule(ScheduleArgs),
    /// Superlevel arcs of a signal's partial sum.
    Arcs(ArcsArgs),
    /// Run the estimator on a signal.
    Estimate(EstimateArgs),
    /// Monte-Carlo consistency sweep.
    Sweep(SweepArgs),
    /// Evaluate probability bounds.
    Bounds(BoundsArgs),
    /// Pompeiu-Hausdorff distance between two subsets of the circle.
    Hausdorff(HausdorffArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixName {
    Poisson,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleName {
    DirichletExample,
    PoissonStandard,
    PoissonCorollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    Single,
    TwoStage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridMode {
    Detect,
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathName {
    Dft,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZRuleName {
    Midpoint,
    Maximizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Poly,
    Sup,
    Localization,
    Corollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelName {
    Detection,
    Confirmation,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Summation matrix.
    #[arg(long = "scheme", value_enum, default_value = "poisson")]
    pub matrix: MatrixName,
    /// Poisson constant C.
    #[arg(long = "poisson-c", default_value_t = 1.0)]
    pub poisson_c: f64,
}

impl MatrixArgs {
    fn matrix(&self) -> SummationMatrix {
        match self.matrix {
            MatrixName::Dirichlet => SummationMatrix::Dirichlet,
            MatrixName::Poisson => SummationMatrix::TruncatedPoisson { c: self.poisson_c },
        }
    }
}

#[derive(Debug, Args)]
pub struct ScheduleChoice {
    /// Schedule scheme (defaults to the one matching the matrix).
    #[arg(long = "schedule", value_enum)]
    pub schedule: Option<ScheduleName>,
    /// JSON file holding a full schedule; overrides the other schedule flags.
    #[arg(long = "schedule-file")]
    pub schedule_file: Option<PathBuf>,
    #[arg(long = "grid-mode", value_enum, default_value = "estimate")]
    pub grid_mode: GridMode,
    /// Exponent δ of `ln^{1-δ} m`.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Scheme constants: `c0,c1` or `c3,c4,c5,c6`.
    #[arg(long, value_delimiter = ',')]
    pub constants: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON with `model`, `noise` and `m`.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the noise seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the sample count.
    #[arg(long)]
    pub m: Option<usize>,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Write values on the `J`-point grid as CSV.
    #[arg(long = "grid")]
    pub grid: Option<usize>,
    /// Evaluate the partial sum of this signal instead of the kernel.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dft")]
    pub path: PathName,
    /// Check the Poisson kernel inequalities at this many sampled angles.
    #[arg(long = "check-bounds")]
    pub check_bounds: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long = "scheme", value_enum)]
    pub scheme: ScheduleName,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "grid-mode", value_enum, default_value = "detect")]
    pub grid_mode: GridMode,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub constants: Option<Vec<f64>>,
    /// Validate the schedule for every m in `LO:HI`.
    #[arg(long)]
    pub validate: Option<String>,
    /// Angles sampled per m during validation.
    #[arg(long = "theta-samples", default_value_t = 256)]
    pub theta_samples: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ArcsArgs {
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Grid order J.
    #[arg(long = "grid")]
    pub grid: usize,
    /// Detection level.
    #[arg(long)]
    pub h: f64,
    /// Confirmation level (defaults to `h`).
    #[arg(long = "h-prime")]
    pub h_prime: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[command(flatten)]
    pub schedule: ScheduleChoice,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: ModeName,
    #[arg(long = "z-rule", value_enum, default_value = "midpoint")]
    pub z_rule: ZRuleName,
    #[arg(long, value_enum, default_value = "dft")]
    pub path: PathName,
    /// Include wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Per-trial CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-m summary CSV (stderr if omitted).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    /// Threshold(s) C.
    #[arg(long = "C", value_delimiter = ',')]
    pub c: Vec<f64>,
    /// `r = b1² Σ|a_k|²` for the polynomial bound.
    #[arg(long)]
    pub r: Option<f64>,
    /// Polynomial degree for the polynomial bound.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub b1: f64,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Model JSON (localization, corollary).
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub schedule: ScheduleChoice,
    #[arg(long = "Delta")]
    pub big_delta: Option<f64>,
    /// Frequency index for the localization thresholds.
    #[arg(long = "index", default_value_t = 0)]
    pub index: usize,
    #[arg(long, value_enum, default_value = "detection")]
    pub level: LevelName,
    /// Monte-Carlo trials (sup, corollary).
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "alpha-tilde")]
    pub alpha_tilde: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HausdorffArgs {
    /// First set: comma-separated points `θ` and arcs `θ1:θ2`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("PERIODIK_THREADS") {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Error::Config(format!("PERIODIK_THREADS must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Kernel(a) => kernel(a),
        Command::Schedule(a) => schedule(a),
        Command::Arcs(a) => arcs(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Bounds(a) => bounds(a),
        Command::Hausdorff(a) => hausdorff(a),
    }
}

/// Output sink opened before any computation starts.
enum Sink {
    Stdout,
    File(PathBuf, std::io::BufWriter<std::fs::File>),
}

impl Sink {
    fn open(path: &Option<PathBuf>) -> Result<Self> {
        Ok(match path {
            None => Sink::Stdout,
            Some(p) => Sink::File(p.clone(), io::create(p)?),
        })
    }

    fn writer(&mut self) -> Box<dyn Write + '_> {
        match self {
            Sink::Stdout => Box::new(std::io::stdout().lock()),
            Sink::File(_, w) => Box::new(w),
        }
    }

    fn write_text(&mut self, text: &str) -> Result<()> {
        let name = match self {
            Sink::Stdout => "<stdout>".to_string(),
            Sink::File(p, _) => p.display().to_string(),
        };
        let mut w = self.writer();
        writeln!(w, "{text}")
            .and_then(|_| w.flush())
            .map_err(|e| Error::Io { path: name, source: e })
    }
}

fn require_file(path: &Path) -> Result<()> {
    io::open(path).map(|_| ())
}

fn scheme_from(
    name: ScheduleName,
    delta: Option<f64>,
    constants: &Option<Vec<f64>>,
    mode: GridMode,
) -> Result<ThresholdSchedule> {
    let mode = match mode {
        GridMode::Detect => ScheduleMode::Detect,
        GridMode::Estimate => ScheduleMode::Estimate,
    };
    let arity = |k: usize| -> Result<Option<Vec<f64>>> {
        match constants {
            Some(c) if c.len() != k => Err(Error::Config(format!(
                "--constants expects {k} values for this scheme, got {}",
                c.len()
            ))),
            other => Ok(other.clone()),
        }
    };
    let scheme = match name {
        ScheduleName::DirichletExample => {
            let c = arity(2)?.unwrap_or(vec![0.0, 1.0]);
            ScheduleScheme::DirichletExample {
                delta: delta.unwrap_or(0.5),
                c0: c[0],
                c1: c[1],
            }
        }
        ScheduleName::PoissonStandard => {
            let c = arity(4)?.unwrap_or(vec![1.0, 0.0, 2.0, 1.0]);
            ScheduleScheme::PoissonStandard {
                delta: delta.unwrap_or(0.5),
                c3: c[0],
                c4: c[1],
                c5: c[2],
                c6: c[3],
            }
        }
        ScheduleName::PoissonCorollary => {
            arity(0)?;
            ScheduleScheme::PoissonCorollary {
                delta: delta.unwrap_or(0.25),
            }
        }
    };
    let s = ThresholdSchedule { scheme, mode };
    s.validate()?;
    Ok(s)
}

impl ScheduleChoice {
    fn resolve(&self, matrix: &SummationMatrix) -> Result<ThresholdSchedule> {
        if let Some(path) = &self.schedule_file {
            let s: ThresholdSchedule = io::read_json(path)?;
            s.validate()?;
            return Ok(s);
        }
        let name = self.schedule.unwrap_or(match matrix {
            SummationMatrix::Dirichlet => ScheduleName::DirichletExample,
            _ => ScheduleName::PoissonStandard,
        });
        scheme_from(name, self.delta, &self.constants, self.grid_mode)
    }
}

fn eval_path(p: PathName) -> EvalPath {
    match p {
        PathName::Dft => EvalPath::Dft,
        PathName::Direct => EvalPath::Direct,
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut cfg: io::SynthConfig = io::read_json(&a.config)?;
    let mut sink = Sink::open(&a.out)?;
    if let Some(seed) = a.seed {
        cfg.noise = cfg.noise.with_seed(seed);
    }
    let m = a.m.unwrap_or(cfg.m);
    let signal = synthesize(&cfg.model, &cfg.noise, m)?;
    io::write_signal(sink.writer(), &signal)
}

fn kernel(a: KernelArgs) -> Result<()> {
    if let Some(p) = &a.signal {
        require_file(p)?;
    }
    let mut sink = Sink::open(&a.out)?;
    let matrix = a.matrix.matrix();
    matrix.validate()?;
    if a.m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    if let Some(grid) = a.grid {
        let eval = match &a.signal {
            Some(p) => {
                let s = io::read_signal_file(p)?;
                evaluate_grid(s.samples(), &matrix, a.m, grid, eval_path(a.path))?
            }
            None => kernel_grid(&matrix, a.m, grid, eval_path(a.path))?,
        };
        return io::write_grid(sink.writer(), &eval);
    }
    let mut report = json!({
        "m": a.m,
        "matrix": matrix,
        "kernel_at_one": kernel_at_one(&matrix, a.m),
        "weight_energy": weight_energy(&matrix, a.m),
    });
    if let Some(n) = a.check_bounds {
        let checks = check_kernel_bounds(&matrix, a.m, &theta_samples(n))?;
        report["bounds"] = serde_json::to_value(&checks).map_err(|e| Error::Parse(e.to_string()))?;
    }
    sink.write_text(&io::to_json(&report)?)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("--validate expects LO:HI, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn schedule(a: ScheduleArgs) -> Result<()> {
    let s = scheme_from(a.scheme, a.delta, &a.constants, a.grid_mode)?;
    let mut out = Sink::Stdout;
    if let Some(range) = &a.validate {
        let range = parse_range(range)?;
        let matrix = match a.scheme {
            ScheduleName::DirichletExample => SummationMatrix::Dirichlet,
            _ => SummationMatrix::poisson(),
        };
        let v = validate_schedule(&s, &matrix, range, a.theta_samples)?;
        out.write_text(&io::to_json(&v)?)?;
        if !v.passed() {
            return Err(Error::Precondition(format!(
                "schedule {} fails validation: {:?}",
                s.name(),
                v.first_failure
            )));
        }
        return Ok(());
    }
    let m = a
        .m
        .ok_or_else(|| Error::Config("schedule needs --m or --validate".into()))?;
    let v = s.at(m)?;
    if a.json {
        out.write_text(&io::to_json(&json!({"scheme": s.name(), "m": m, "values": v}))?)
    } else {
        out.write_text(&format!(
            "scheme={} m={m} H={} h={} h'={} J={}",
            s.name(),
            v.big_h,
            v.h,
            v.h_prime,
            v.grid
        ))
    }
}

fn arcs(a: ArcsArgs) -> Result<()> {
    require_file(&a.signal)?;
    let mut sink = Sink::open(&a.out)?;
    let signal = io::read_signal_file(&a.signal)?;
    let matrix = a.matrix.matrix();
    let eval = evaluate_grid(signal.samples(), &matrix, a.m, a.grid, EvalPath::Dft)?;
    let h_prime = a.h_prime.unwrap_or(a.h);
    let (family, order) = two_threshold_family(&eval.magnitudes(), a.h, h_prime)?;
    let report = json!({
        "m": a.m,
        "J": a.grid,
        "h": a.h,
        "h_prime": h_prime,
        "N_hat": order.count(),
        "full_circle": order == ModelOrder::FullCircle,
        "arcs": family.arcs,
    });
    sink.write_text(&io::to_json(&report)?)
}

fn estimate_cmd(a: EstimateArgs) -> Result<()> {
    require_file(&a.signal)?;
    if let Some(p) = &a.schedule.schedule_file {
        require_file(p)?;
    }
    let mut sink = Sink::open(&a.out)?;
    let matrix = a.matrix.matrix();
    let schedule = a.schedule.resolve(&matrix)?;
    let signal = io::read_signal_file(&a.signal)?;
    let options = EstimateOptions::new()
        .with_z_rule(match a.z_rule {
            ZRuleName::Midpoint => ZRule::Midpoint,
            ZRuleName::Maximizer => ZRule::Maximizer,
        })
        .with_path(eval_path(a.path))
        .with_timing(a.timing);
    let mode = match a.mode {
        ModeName::Single => EstimateMode::SingleGrid,
        ModeName::TwoStage => EstimateMode::TwoStage,
    };
    let report = estimate_in_mode(&signal, &matrix, &schedule, a.m, mode, &options)?;
    sink.write_text(&io::to_json(&report)?)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let plan: SweepPlan = io::read_json(&a.plan)?;
    plan.validate()?;
    let mut out = Sink::open(&a.out)?;
    let mut summary = match &a.summary {
        Some(p) => Some(io::create(p)?),
        None => None,
    };
    let report = consistency_sweep(&plan)?;
    report.write_records(out.writer())?;
    match summary.as_mut() {
        Some(w) => report.write_summaries(w),
        None => report.write_summaries(std::io::stderr().lock()),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required flag --{flag}")))
}

fn bound_json(raw: f64) -> serde_json::Value {
    let b = ProbabilityBound::from_raw(raw);
    json!({"raw": b.raw, "value": b.value, "vacuous": b.vacuous})
}

fn bounds(a: BoundsArgs) -> Result<()> {
    if let Some(p) = &a.model {
        require_file(p)?;
    }
    let mut sink = Sink::open(&a.out)?;
    let matrix = a.matrix.matrix();
    let value = match a.kind {
        BoundKind::Poly => {
            let r = need(a.r, "r")?;
            if a.c.is_empty() {
                return Err(Error::Config("missing required flag --C".into()));
            }
            let rows = a
                .c
                .iter()
                .map(|&c| {
                    let raw = subgaussian_poly_tail_bound(r, a.n, c)?;
                    Ok(json!({"C": c, "bound": bound_json(raw)}))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({"kind": "poly", "r": r, "n": a.n, "results": rows})
        }
        BoundKind::Sup => {
            let m = need(a.m, "m")?;
            if a.c.is_empty() {
                return Err(Error::Config("missing required flag --C".into()));
            }
            if a.trials > 0 {
                let noise = NoiseSpec::new(
                    NoiseFamily::ComplexGaussian {
                        b1: a.b1,
                        b2: None,
                        phi: 0.0,
                    },
                    a.seed,
                );
                let rows = empirical_sup_tail(&noise, &matrix, m, &a.c, a.trials)?;
                json!({"kind": "sup", "m": m, "b1": a.b1, "trials": a.trials, "results": rows})
            } else {
                let rows = a
                    .c
                    .iter()
                    .map(|&c| {
                        let raw = poisson_noise_sup_tail_bound(m, &matrix, a.b1, c)?;
                        Ok(json!({"C": c, "bound": bound_json(raw)}))
                    })
                    .collect::<Result<Vec<_>>>()?;
                json!({"kind": "sup", "m": m, "b1": a.b1, "results": rows})
            }
        }
        BoundKind::Localization => {
            let model: SignalModel = io::read_json(&need(a.model.as_ref(), "model")?.clone())?;
            let m = need(a.m, "m")?;
            let delta = need(a.big_delta, "Delta")?;
            let mut choice = a.schedule;
            if choice.schedule_file.is_none() && choice.schedule.is_none() {
                choice.grid_mode = GridMode::Detect;
            }
            let schedule = choice.resolve(&matrix)?;
            let level = match a.level {
                LevelName::Detection => LevelChoice::Detection,
                LevelName::Confirmation => LevelChoice::Confirmation,
            };
            let t = localization_failure_bounds(&model, &matrix, &schedule, m, delta, a.index, level)?;
            let (miss, spurious) = t.probabilities(&matrix, a.b1)?;
            json!({"kind": "localization", "thresholds": t, "b1": a.b1,
                   "miss_bound": miss, "spurious_bound": spurious})
        }
        BoundKind::Corollary => {
            let model: SignalModel = io::read_json(&need(a.model.as_ref(), "model")?.clone())?;
            let m = need(a.m, "m")?;
            let delta = need(a.big_delta, "Delta")?;
            let alpha_tilde = need(a.alpha_tilde, "alpha-tilde")?;
            let schedule = ThresholdSchedule::poisson_corollary(a.schedule.delta.unwrap_or(0.25))?;
            let noise = NoiseSpec::new(
                NoiseFamily::ComplexGaussian {
                    b1: a.b1,
                    b2: None,
                    phi: 0.0,
                },
                a.seed,
            );
            let rates = corollary_event_rates(
                &model,
                &noise,
                &matrix,
                &schedule,
                m,
                a.trials.max(1),
                alpha_tilde,
                delta,
            )?;
            json!({"kind": "corollary", "rates": rates, "consistent": rates.consistent()})
        }
    };
    sink.write_text(&io::to_json(&value)?)
}

/// Parses `θ` / `θ1:θ2` items separated by commas.
pub fn parse_circle_set(spec: &str) -> Result<CircleSet> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "empty" {
        return Ok(CircleSet::empty());
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad angle `{s}` in set `{spec}`")))
    };
    let mut arcs = Vec::new();
    for item in spec.split(',') {
        match item.split_once(':') {
            Some((a, b)) => arcs.push((num(a)?, num(b)?)),
            None => {
                let t = num(item)?;
                arcs.push((t, t));
            }
        }
    }
    CircleSet::from_arcs(&arcs)
}

fn hausdorff(a: HausdorffArgs) -> Result<()> {
    let x = parse_circle_set(&a.a)?;
    let y = parse_circle_set(&a.b)?;
    Sink::Stdout.write_text(&format!("{}", hausdorff_distance(&x, &y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_circle_sets() {
        let s = parse_circle_set("0:1.5707963267948966, 3").unwrap();
        assert_eq!(s.arcs.len(), 2);
        assert_eq!(s.arcs[1], (3.0, 0.0));
        assert!(parse_circle_set("empty").unwrap().is_empty());
        assert!(parse_circle_set("1:0").is_err());
        assert!(parse_circle_set("x").is_err());
        let d = hausdorff_distance(
            &parse_circle_set(&format!("0:{}", PI / 2.0)).unwrap(),
            &parse_circle_set(&format!("{}", PI / 4.0)).unwrap(),
        );
        assert!((d - 0.765_367).abs() < 1e-6);
    }

    #[test]
    fn constants_arity_is_checked() {
        let err = scheme_from(
            ScheduleName::PoissonStandard,
            None,
            &Some(vec![1.0, 2.0]),
            GridMode::Detect,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let s = scheme_from(
            ScheduleName::DirichletExample,
            None,
            &Some(vec![-1.0, 2.0]),
            GridMode::Detect,
        )
        .unwrap();
        assert_eq!(s.at(7).unwrap().grid, 56);
    }

    #[test]
    fn parse_errors_exit_two() {
        assert_eq!(run(["periodik", "estimate", "--bogus"]), 2);
        assert_eq!(run(["periodik", "schedule", "--scheme", "nope", "--m", "7"]), 2);
        assert_eq!(run(["periodik", "schedule", "--scheme", "dirichlet-example", "--m", "7"]), 0);
        assert_eq!(run(["periodik", "schedule", "--scheme", "poisson-standard", "--m", "2"]), 3);
    }
}

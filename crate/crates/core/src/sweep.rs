//! Seeded Monte-Carlo consistency sweeps over a grid of sample sizes.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::{hausdorff_distance, CircleSet};
use crate::error::{Error, Result};
use crate::estimate::{estimate_in_mode, EstimateMode, EstimateOptions, EstimationReport, ZRule};
use crate::kernels::SummationMatrix;
use crate::schedule::{ScheduleMode, ThresholdSchedule};
use crate::signal::{derive_seed, synthesize, NoiseSpec, SignalModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessTolerances {
    /// Angular tolerance; `None` means `π / J_det` with `J_det` the detect-mode grid.
    #[serde(default)]
    pub freq: Option<f64>,
    /// Relative amplitude tolerance.
    #[serde(default = "default_amp_rel")]
    pub amp_rel: f64,
}

fn default_amp_rel() -> f64 {
    0.25
}

impl Default for SuccessTolerances {
    fn default() -> Self {
        SuccessTolerances {
            freq: None,
            amp_rel: default_amp_rel(),
        }
    }
}

fn default_matrix() -> SummationMatrix {
    SummationMatrix::poisson()
}

fn default_schedule() -> ThresholdSchedule {
    ThresholdSchedule::poisson_standard(ScheduleMode::Detect)
}

fn default_mode() -> EstimateMode {
    EstimateMode::TwoStage
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub model: SignalModel,
    pub noise: NoiseSpec,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    #[serde(default = "default_matrix")]
    pub matrix: SummationMatrix,
    #[serde(default = "default_schedule")]
    pub schedule: ThresholdSchedule,
    #[serde(default = "default_mode")]
    pub mode: EstimateMode,
    #[serde(default)]
    pub z_rule: ZRule,
    #[serde(default)]
    pub tolerances: SuccessTolerances,
}

impl SweepPlan {
    pub fn new(model: SignalModel, noise: NoiseSpec, m_grid: Vec<usize>, trials: usize) -> Self {
        SweepPlan {
            model,
            noise,
            m_grid,
            trials,
            matrix: default_matrix(),
            schedule: default_schedule(),
            mode: default_mode(),
            z_rule: ZRule::default(),
            tolerances: SuccessTolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_grid.is_empty() {
            return Err(Error::Config("m_grid must not be empty".into()));
        }
        if self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("m_grid must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(f) = self.tolerances.freq {
            if !(f > 0.0) {
                return Err(Error::Config(format!("frequency tolerance must be positive, got {f}")));
            }
        }
        if !(self.tolerances.amp_rel > 0.0) {
            return Err(Error::Config("amplitude tolerance must be positive".into()));
        }
        self.noise.validate()?;
        self.matrix.validate()?;
        self.schedule.validate()?;
        self.schedule.check_matrix(&self.matrix)
    }
}

/// One trial. Errors are `NaN` when undefined (wrong count or no amplitudes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub m: usize,
    pub trial: usize,
    /// `-1` when the detection level was cleared on the whole grid.
    #[serde(rename = "N_hat")]
    pub n_hat: i64,
    #[serde(rename = "N_true")]
    pub n_true: usize,
    pub hausdorff: f64,
    pub max_freq_err: f64,
    pub max_amp_err: f64,
    pub success: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub m: usize,
    pub trials: usize,
    pub order_rate: f64,
    pub success_rate: f64,
    pub median_hausdorff: f64,
    pub p90_hausdorff: f64,
    pub median_freq_err: f64,
    pub p90_freq_err: f64,
    pub median_amp_err: f64,
    pub p90_amp_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<SweepSummary>,
}

impl SweepReport {
    pub fn summary(&self, m: usize) -> Option<&SweepSummary> {
        self.summaries.iter().find(|s| s.m == m)
    }

    pub fn write_records<W: Write>(&self, out: W) -> Result<()> {
        write_csv(out, &self.records)
    }

    pub fn write_summaries<W: Write>(&self, out: W) -> Result<()> {
        write_csv(out, &self.summaries)
    }
}

fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv output>".into(),
        source: e,
    })
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Matching of estimated to true frequencies minimising the largest angular
/// error (exhaustive up to 7 components, greedy beyond). `order[i]` is the
/// estimate assigned to true component `i`.
pub fn match_components(truth: &[f64], estimates: &[f64]) -> Vec<usize> {
    let n = truth.len();
    assert_eq!(n, estimates.len());
    let cost = |p: &[usize]| {
        p.iter()
            .enumerate()
            .map(|(i, &k)| angle_gap(truth[i], estimates[k]))
            .fold(0.0, f64::max)
    };
    if n <= 7 {
        permutations(n)
            .into_iter()
            .min_by(|a, b| cost(a).total_cmp(&cost(b)))
            .expect("at least one permutation")
    } else {
        let mut used = vec![false; n];
        (0..n)
            .map(|i| {
                let k = (0..n)
                    .filter(|&k| !used[k])
                    .min_by(|&a, &b| {
                        angle_gap(truth[i], estimates[a]).total_cmp(&angle_gap(truth[i], estimates[b]))
                    })
                    .expect("unused estimate");
                used[k] = true;
                k
            })
            .collect()
    }
}

/// Scores a report against the generating model.
pub fn score_report(
    model: &SignalModel,
    report: &EstimationReport,
    freq_tol: f64,
    amp_tol: f64,
) -> (f64, f64, f64, bool) {
    let support = CircleSet::from_points(model.frequencies());
    let hausdorff = hausdorff_distance(&report.peak_set(), &support);
    if report.n_hat != model.len() {
        return (hausdorff, f64::NAN, f64::NAN, false);
    }
    let est = report.frequencies();
    let order = match_components(model.frequencies(), &est);
    let freq_err = order
        .iter()
        .enumerate()
        .map(|(i, &k)| angle_gap(model.frequencies()[i], est[k]))
        .fold(0.0, f64::max);
    let amp_err = match report.alpha_hats() {
        Some(alphas) => order
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let a = model.amplitudes()[i];
                (alphas[k] - a).norm() / a.norm()
            })
            .fold(0.0, f64::max),
        None => f64::NAN,
    };
    let success = freq_err <= freq_tol && (amp_err.is_nan() || amp_err <= amp_tol);
    (hausdorff, freq_err, amp_err, success)
}

/// Trial `k` at size `m`; its noise seed is `derive_seed(noise.seed, k)` for
/// every `m`, so the samples at smaller `m` are a prefix of those at larger `m`.
pub fn run_trial(plan: &SweepPlan, m: usize, trial: usize) -> Result<TrialRecord> {
    let noise = plan.noise.with_seed(derive_seed(plan.noise.seed, trial as u64));
    let signal = synthesize(&plan.model, &noise, m)?;
    let options = EstimateOptions::new().with_z_rule(plan.z_rule);
    let freq_tol = plan
        .tolerances
        .freq
        .unwrap_or(PI / plan.schedule.detect_grid(m) as f64);
    let n_true = plan.model.len();
    match estimate_in_mode(&signal, &plan.matrix, &plan.schedule, m, plan.mode, &options) {
        Ok(report) => {
            let (hausdorff, max_freq_err, max_amp_err, success) =
                score_report(&plan.model, &report, freq_tol, plan.tolerances.amp_rel);
            Ok(TrialRecord {
                m,
                trial,
                n_hat: report.n_hat as i64,
                n_true,
                hausdorff,
                max_freq_err,
                max_amp_err,
                success,
            })
        }
        Err(Error::DegenerateLocalization { .. }) => {
            let full = CircleSet { arcs: vec![(0.0, TAU)] };
            Ok(TrialRecord {
                m,
                trial,
                n_hat: -1,
                n_true,
                hausdorff: hausdorff_distance(&full, &CircleSet::from_points(plan.model.frequencies())),
                max_freq_err: f64::NAN,
                max_amp_err: f64::NAN,
                success: false,
            })
        }
        Err(e) => Err(e),
    }
}

/// Nearest-rank quantile of the non-`NaN` values (`NaN` if there are none).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

fn summarise(m: usize, records: &[TrialRecord]) -> SweepSummary {
    let n = records.len();
    let col = |f: fn(&TrialRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let haus = col(|r| r.hausdorff);
    let freq = col(|r| r.max_freq_err);
    let amp = col(|r| r.max_amp_err);
    SweepSummary {
        m,
        trials: n,
        order_rate: records.iter().filter(|r| r.n_hat == r.n_true as i64).count() as f64 / n as f64,
        success_rate: records.iter().filter(|r| r.success).count() as f64 / n as f64,
        median_hausdorff: quantile(&haus, 0.5),
        p90_hausdorff: quantile(&haus, 0.9),
        median_freq_err: quantile(&freq, 0.5),
        p90_freq_err: quantile(&freq, 0.9),
        median_amp_err: quantile(&amp, 0.5),
        p90_amp_err: quantile(&amp, 0.9),
    }
}

/// Runs every `(m, trial)` pair of the plan in parallel; records come back
/// sorted by `(m, trial)`.
pub fn consistency_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    plan.validate()?;
    let jobs: Vec<(usize, usize)> = plan
        .m_grid
        .iter()
        .flat_map(|&m| (0..plan.trials).map(move |k| (m, k)))
        .collect();
    let records = jobs
        .into_par_iter()
        .map(|(m, k)| run_trial(plan, m, k))
        .collect::<Result<Vec<_>>>()?;
    let summaries = plan
        .m_grid
        .iter()
        .map(|&m| {
            let rows: Vec<TrialRecord> = records.iter().copied().filter(|r| r.m == m).collect();
            summarise(m, &rows)
        })
        .collect();
    Ok(SweepReport { records, summaries })
}

//! The two-threshold estimator of the model order, frequencies and amplitudes.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arcs::{refined_arcs, two_threshold_family, CircleSet, DiscreteArc, ModelOrder};
use crate::complex_serde;
use crate::error::{Error, Result};
use crate::kernels::{
    evaluate_at, evaluate_coefficients, evaluate_grid_window, kernel_at_one, weighted_sequence,
    EvalPath, SummationMatrix,
};
use crate::schedule::{ScheduleMode, ScheduleValues, ThresholdSchedule};
use crate::signal::SampledSignal;

/// Relative tolerance under which grid values count as tied maximizers.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Coarse grid factor of the two-stage mode: `J_coarse = 16·⌈2π√m⌉`.
pub const TWO_STAGE_OVERSAMPLING: usize = 16;

/// How the frequency estimate is picked on each arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZRule {
    /// `exp(2πi (j1 + j2) / (2J))`.
    #[default]
    Midpoint,
    /// The first maximizer of `|S|` on the arc.
    Maximizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    #[default]
    SingleGrid,
    TwoStage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateOptions {
    #[serde(default)]
    pub z_rule: ZRule,
    /// Evaluation route for the grid (and for the fine search in two-stage mode).
    #[serde(default = "default_path")]
    pub path: EvalPath,
    /// Record wall-clock time in the diagnostics.
    #[serde(default)]
    pub timing: bool,
}

fn default_path() -> EvalPath {
    EvalPath::Dft
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions::new()
    }
}

impl EstimateOptions {
    pub fn new() -> Self {
        EstimateOptions {
            z_rule: ZRule::Midpoint,
            path: EvalPath::Dft,
            timing: false,
        }
    }

    pub fn with_z_rule(self, z_rule: ZRule) -> Self {
        EstimateOptions { z_rule, ..self }
    }

    pub fn with_path(self, path: EvalPath) -> Self {
        EstimateOptions { path, ..self }
    }

    pub fn with_timing(self, timing: bool) -> Self {
        EstimateOptions { timing, ..self }
    }
}

/// One detected periodicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEstimate {
    /// The detection arc (on the detection grid).
    #[serde(flatten)]
    pub arc: DiscreteArc,
    #[serde(with = "complex_serde")]
    pub z_hat: Complex64,
    #[serde(
        with = "complex_serde::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha_hat: Option<Complex64>,
    /// Indices of the maximizers of `|S|`, on the grid of order `max_grid`.
    pub max_j: Vec<usize>,
    pub max_grid: usize,
    pub max_magnitude: f64,
    /// Maximal `h'`-arcs inside the detection arc.
    pub peak_arcs: Vec<DiscreteArc>,
}

impl ComponentEstimate {
    /// Angle of `z_hat` in `[-π, π)`.
    pub fn frequency(&self) -> f64 {
        let a = self.z_hat.arg();
        if a >= std::f64::consts::PI {
            a - TAU
        } else {
            a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub m: usize,
    /// Detection grid order.
    #[serde(rename = "J")]
    pub grid: usize,
    /// Grid order of the maximizer search, when it differs from `J`.
    #[serde(rename = "J_fine", default, skip_serializing_if = "Option::is_none")]
    pub fine_grid: Option<usize>,
    #[serde(rename = "H")]
    pub big_h: f64,
    pub h: f64,
    pub h_prime: f64,
    pub kernel_at_one: f64,
    pub mode: EstimateMode,
    pub z_rule: ZRule,
    /// Whether amplitude estimates were produced.
    pub amplitudes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    #[serde(rename = "N_hat")]
    pub n_hat: usize,
    pub components: Vec<ComponentEstimate>,
    pub diagnostics: Diagnostics,
}

impl EstimationReport {
    pub fn z_hats(&self) -> Vec<Complex64> {
        self.components.iter().map(|c| c.z_hat).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.frequency()).collect()
    }

    /// Amplitude estimates, if the configuration produces them.
    pub fn alpha_hats(&self) -> Option<Vec<Complex64>> {
        self.components.iter().map(|c| c.alpha_hat).collect()
    }

    pub fn arcs(&self) -> Vec<DiscreteArc> {
        self.components.iter().map(|c| c.arc).collect()
    }

    /// `L̂'_m ∩ (detected arcs)` as a subset of the circle.
    pub fn peak_set(&self) -> CircleSet {
        let arcs: Vec<DiscreteArc> = self
            .components
            .iter()
            .flat_map(|c| c.peak_arcs.iter().copied())
            .collect();
        CircleSet::from_discrete_arcs(&arcs)
    }
}

fn prepare(
    matrix: &SummationMatrix,
    schedule: &ThresholdSchedule,
    m: usize,
) -> Result<ScheduleValues> {
    matrix.validate()?;
    schedule.check_matrix(matrix)?;
    schedule.at(m)
}

/// Indices with value within [`TIE_TOLERANCE`] (relative) of the maximum.
fn maximizers(points: impl Iterator<Item = (usize, f64)>) -> (Vec<usize>, f64) {
    let points: Vec<(usize, f64)> = points.collect();
    let max = points.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
    let floor = max - TIE_TOLERANCE * max.abs();
    let idx = points.iter().filter(|&&(_, v)| v >= floor).map(|&(j, _)| j).collect();
    (idx, max)
}

fn mean(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let (sum, n) = values.fold((Complex64::new(0.0, 0.0), 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn pick_z(rule: ZRule, arc: &DiscreteArc, max_j: &[usize], max_grid: usize) -> Complex64 {
    match rule {
        ZRule::Midpoint => arc.midpoint(),
        ZRule::Maximizer => Complex64::from_polar(1.0, TAU * max_j[0] as f64 / max_grid as f64),
    }
}

fn peaks_within(all: &[DiscreteArc], arc: &DiscreteArc) -> Vec<DiscreteArc> {
    all.iter().copied().filter(|p| arc.contains_index(p.j1)).collect()
}

/// The full estimator on the schedule's grid `J_m`.
///
/// Amplitudes are produced for the truncated Poisson matrix in estimate mode;
/// otherwise the report is localization-only.
pub fn estimate(
    signal: &SampledSignal,
    matrix: &SummationMatrix,
    schedule: &ThresholdSchedule,
    m: usize,
    options: &EstimateOptions,
) -> Result<EstimationReport> {
    let started = Instant::now();
    let vals = prepare(matrix, schedule, m)?;
    let coeffs = weighted_sequence(signal.samples(), matrix, m)?;
    let values = evaluate_coefficients(&coeffs, vals.grid, options.path);
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();

    let (family, order) = two_threshold_family(&mags, vals.h, vals.h_prime)?;
    if order == ModelOrder::FullCircle {
        return Err(Error::DegenerateLocalization {
            arc: family.arcs[0],
        });
    }
    let amplitudes =
        *matrix != SummationMatrix::Dirichlet && schedule.mode == ScheduleMode::Estimate;
    let denom = kernel_at_one(matrix, m);
    let peaks = refined_arcs(&mags, &family, vals.h_prime).arcs;

    let components = family
        .arcs
        .iter()
        .map(|arc| {
            let (max_j, max_magnitude) = maximizers(arc.indices().map(|j| (j, mags[j])));
            let alpha_hat =
                amplitudes.then(|| mean(max_j.iter().map(|&j| values[j])) / denom);
            ComponentEstimate {
                arc: *arc,
                z_hat: pick_z(options.z_rule, arc, &max_j, vals.grid),
                alpha_hat,
                max_grid: vals.grid,
                max_j,
                max_magnitude,
                peak_arcs: peaks_within(&peaks, arc),
            }
        })
        .collect::<Vec<_>>();

    Ok(EstimationReport {
        n_hat: components.len(),
        components,
        diagnostics: Diagnostics {
            m,
            grid: vals.grid,
            fine_grid: None,
            big_h: vals.big_h,
            h: vals.h,
            h_prime: vals.h_prime,
            kernel_at_one: denom,
            mode: EstimateMode::SingleGrid,
            z_rule: options.z_rule,
            amplitudes,
            runtime_seconds: options.timing.then(|| started.elapsed().as_secs_f64()),
        },
    })
}

/// Detection on the coarse grid `16·⌈2π√m⌉`, then a maximizer search on the
/// estimate-mode grid `⌈2πm^{3/2}⌉` restricted to each detected arc and the
/// `h'`-level set. Amplitudes are always produced.
pub fn estimate_two_stage(
    signal: &SampledSignal,
    matrix: &SummationMatrix,
    schedule: &ThresholdSchedule,
    m: usize,
    options: &EstimateOptions,
) -> Result<EstimationReport> {
    let started = Instant::now();
    let vals = prepare(matrix, schedule, m)?;
    if *matrix == SummationMatrix::Dirichlet {
        return Err(Error::Unsupported("two-stage amplitude estimation"));
    }
    let coarse = TWO_STAGE_OVERSAMPLING * schedule.detect_grid(m);
    let fine = schedule.with_mode(ScheduleMode::Estimate).at(m)?.grid;

    let coeffs = weighted_sequence(signal.samples(), matrix, m)?;
    let coarse_values = evaluate_coefficients(&coeffs, coarse, options.path);
    let mags: Vec<f64> = coarse_values.iter().map(|v| v.norm()).collect();
    let (family, order) = two_threshold_family(&mags, vals.h, vals.h_prime)?;
    if order == ModelOrder::FullCircle {
        return Err(Error::DegenerateLocalization {
            arc: family.arcs[0],
        });
    }
    let denom = kernel_at_one(matrix, m);
    let peaks = refined_arcs(&mags, &family, vals.h_prime).arcs;

    let components = family
        .arcs
        .iter()
        .map(|arc| {
            // smallest fine-index range covering [θ_{j1}, θ_{j2}]
            let lo = (arc.j1 as u128 * fine as u128 / coarse as u128) as usize;
            let hi = (arc.j2 as u128 * fine as u128).div_ceil(coarse as u128) as usize;
            let count = hi - lo + 1;
            let window = match options.path {
                EvalPath::Dft => evaluate_grid_window(&coeffs, fine, lo as i64, count),
                EvalPath::Direct => (lo..=hi)
                    .map(|k| evaluate_at(&coeffs, TAU * (k % fine) as f64 / fine as f64))
                    .collect(),
            };
            let wm: Vec<f64> = window.iter().map(|v| v.norm()).collect();
            let confirmed = wm.iter().any(|&v| v >= vals.h_prime);
            let candidates = wm
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, v)| !confirmed || v >= vals.h_prime);
            let (local, max_magnitude) = maximizers(candidates);
            let alpha_hat = mean(local.iter().map(|&i| window[i])) / denom;
            let max_j: Vec<usize> = local.iter().map(|&i| (lo + i) % fine).collect();
            ComponentEstimate {
                arc: *arc,
                z_hat: pick_z(options.z_rule, arc, &max_j, fine),
                alpha_hat: Some(alpha_hat),
                max_grid: fine,
                max_j,
                max_magnitude,
                peak_arcs: peaks_within(&peaks, arc),
            }
        })
        .collect::<Vec<_>>();

    Ok(EstimationReport {
        n_hat: components.len(),
        components,
        diagnostics: Diagnostics {
            m,
            grid: coarse,
            fine_grid: Some(fine),
            big_h: vals.big_h,
            h: vals.h,
            h_prime: vals.h_prime,
            kernel_at_one: denom,
            mode: EstimateMode::TwoStage,
            z_rule: options.z_rule,
            amplitudes: true,
            runtime_seconds: options.timing.then(|| started.elapsed().as_secs_f64()),
        },
    })
}

/// Dispatch on [`EstimateMode`].
pub fn estimate_in_mode(
    signal: &SampledSignal,
    matrix: &SummationMatrix,
    schedule: &ThresholdSchedule,
    m: usize,
    mode: EstimateMode,
    options: &EstimateOptions,
) -> Result<EstimationReport> {
    match mode {
        EstimateMode::SingleGrid => estimate(signal, matrix, schedule, m, options),
        EstimateMode::TwoStage => estimate_two_stage(signal, matrix, schedule, m, options),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synthesize, NoiseFamily, NoiseSpec, SignalModel};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn noiseless(freqs: &[f64], amps: &[Complex64], m: usize) -> SampledSignal {
        let model = SignalModel::new(freqs.to_vec(), amps.to_vec()).unwrap();
        synthesize(&model, &NoiseSpec::none(), m).unwrap()
    }

    fn poisson_estimate() -> ThresholdSchedule {
        ThresholdSchedule::poisson_standard(ScheduleMode::Estimate)
    }

    // levels lifted above the deterministic tails of amplitude-2 components
    fn lifted(mode: ScheduleMode) -> ThresholdSchedule {
        ThresholdSchedule::poisson_with(0.5, [1.0, 2.0, 2.0, 3.0], mode).unwrap()
    }

    #[test]
    fn zero_signal_gives_empty_report() {
        let s = SampledSignal::new(vec![c(0.0, 0.0); 300]).unwrap();
        let p = SummationMatrix::poisson();
        let opts = EstimateOptions::new();
        let r = estimate(&s, &p, &poisson_estimate(), 300, &opts).unwrap();
        assert_eq!(r.n_hat, 0);
        assert!(r.components.is_empty());
        let r = estimate_two_stage(&s, &p, &poisson_estimate(), 300, &opts).unwrap();
        assert_eq!(r.n_hat, 0);
    }

    #[test]
    fn exact_recovery_on_grid() {
        let m = 200;
        let s = noiseless(&[0.0], &[c(2.0, 0.0)], m);
        let p = SummationMatrix::poisson();
        let opts = EstimateOptions::new();
        let r = estimate(&s, &p, &poisson_estimate(), m, &opts).unwrap();
        assert_eq!(r.n_hat, 1);
        let j = r.diagnostics.grid as f64;
        let comp = &r.components[0];
        assert!(comp.z_hat.arg().abs() <= PI / j);
        assert_eq!(comp.max_j, vec![0]);
        assert!((comp.alpha_hat.unwrap() - c(2.0, 0.0)).norm() <= 1e-9);
        assert_eq!(r.diagnostics.kernel_at_one, kernel_at_one(&p, m));

        let two = estimate_two_stage(&s, &p, &poisson_estimate(), m, &opts).unwrap();
        assert_eq!(two.n_hat, 1);
        assert!((two.components[0].z_hat - comp.z_hat).norm() <= 1e-9);
        assert!((two.components[0].alpha_hat.unwrap() - comp.alpha_hat.unwrap()).norm() <= 1e-9);
    }

    #[test]
    fn two_components_improve_with_m() {
        let freqs = [0.0, FRAC_PI_2];
        let amps = [c(2.0, 0.0), c(0.0, 1.5)];
        let p = SummationMatrix::poisson();
        let opts = EstimateOptions::new();
        let mut last = f64::INFINITY;
        for m in [200, 800, 3200] {
            let s = noiseless(&freqs, &amps, m);
            let r = estimate(&s, &p, &lifted(ScheduleMode::Estimate), m, &opts).unwrap();
            assert_eq!(r.n_hat, 2, "m = {m}");
            let alphas = r.alpha_hats().unwrap();
            let err = alphas
                .iter()
                .zip(&amps)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < last, "m = {m}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn z_on_arc_and_maximizer_rule() {
        let m = 300;
        let s = noiseless(&[-1.0, 2.0], &[c(2.0, 0.0), c(0.0, -2.0)], m);
        let p = SummationMatrix::poisson();
        let sched = lifted(ScheduleMode::Detect);
        let mid = estimate(&s, &p, &sched, m, &EstimateOptions::new()).unwrap();
        let max = estimate(
            &s,
            &p,
            &sched,
            m,
            &EstimateOptions::new().with_z_rule(ZRule::Maximizer),
        )
        .unwrap();
        assert_eq!(mid.n_hat, 2);
        assert_eq!(mid.arcs(), max.arcs());
        for (a, b) in mid.components.iter().zip(&max.components) {
            assert!(a.arc.contains_angle(a.z_hat.arg()));
            assert!(b.arc.contains_angle(b.z_hat.arg()));
            assert!(a.alpha_hat.is_none());
        }
        // components are ordered by arc start, so 2.0 precedes −1 ≡ 2π − 1
        let f = max.frequencies();
        assert!((f[0] - 2.0).abs() <= PI / max.diagnostics.grid as f64);
        assert!((f[1] + 1.0).abs() <= PI / max.diagnostics.grid as f64);
    }

    #[test]
    fn dirichlet_is_localization_only() {
        let m = 400;
        let s = noiseless(&[1.0], &[c(1.0, 0.0)], m);
        let d = SummationMatrix::Dirichlet;
        let sched = ThresholdSchedule::dirichlet_example();
        let r = estimate(&s, &d, &sched, m, &EstimateOptions::new()).unwrap();
        assert_eq!(r.n_hat, 1);
        assert!(r.alpha_hats().is_none());
        assert!(!r.diagnostics.amplitudes);
        assert!(matches!(
            estimate_two_stage(&s, &d, &sched, m, &EstimateOptions::new()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mismatched_schedule_is_config_error() {
        let s = noiseless(&[1.0], &[c(3.0, 0.0)], 50);
        let err = estimate(
            &s,
            &SummationMatrix::Dirichlet,
            &poisson_estimate(),
            50,
            &EstimateOptions::new(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn full_circle_is_degenerate() {
        let s = noiseless(&[1.0], &[c(3.0, 0.0)], 50);
        let sched =
            ThresholdSchedule::poisson_with(0.5, [1.0, -100.0, 2.0, -99.0], ScheduleMode::Detect)
                .unwrap();
        let err = estimate(&s, &SummationMatrix::poisson(), &sched, 50, &EstimateOptions::new())
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateLocalization { arc } if arc.full_circle));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn short_signal_is_rejected() {
        let s = noiseless(&[1.0], &[c(3.0, 0.0)], 50);
        let err = estimate(
            &s,
            &SummationMatrix::poisson(),
            &poisson_estimate(),
            60,
            &EstimateOptions::new(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InputLength { needed: 60, got: 50 }));
    }

    #[test]
    fn two_stage_direct_and_dft_agree() {
        let model = SignalModel::new(vec![0.4, -2.2], vec![c(2.0, 1.0), c(-1.5, 0.0)]).unwrap();
        let noise = NoiseSpec::new(NoiseFamily::SymmetricPareto { a: 1.5 }, 17);
        let m = 256;
        let s = synthesize(&model, &noise, m).unwrap();
        let p = SummationMatrix::poisson();
        let sched = ThresholdSchedule::poisson_standard(ScheduleMode::Detect);
        let a = estimate_two_stage(&s, &p, &sched, m, &EstimateOptions::new()).unwrap();
        let b = estimate_two_stage(
            &s,
            &p,
            &sched,
            m,
            &EstimateOptions::new().with_path(EvalPath::Direct),
        )
        .unwrap();
        assert_eq!(a.arcs(), b.arcs());
        for (x, y) in a.components.iter().zip(&b.components) {
            assert_eq!(x.max_j, y.max_j);
            assert!((x.alpha_hat.unwrap() - y.alpha_hat.unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn report_json_shape() {
        let m = 200;
        let s = noiseless(&[0.0], &[c(2.0, 0.0)], m);
        let r = estimate(
            &s,
            &SummationMatrix::poisson(),
            &poisson_estimate(),
            m,
            &EstimateOptions::new(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["N_hat"], 1);
        let comp = &v["components"][0];
        for key in ["j1", "j2", "z_hat", "alpha_hat", "max_j"] {
            assert!(comp.get(key).is_some(), "missing {key}");
        }
        assert!(v["diagnostics"].get("runtime_seconds").is_none());
        let back: EstimationReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}

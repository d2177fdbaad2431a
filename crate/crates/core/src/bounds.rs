//! Probability bounds for subgaussian noise and their Monte-Carlo counterparts.

use std::f64::consts::{E, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::{directed_angular_distance, superlevel_arcs, CircleSet};
use crate::error::{Error, Result};
use crate::kernels::{
    evaluate_coefficients, kernel_f, weight_energy, weighted_sequence, EvalPath, SummationMatrix,
    BETA_SUP_BOUND,
};
use crate::schedule::{ScheduleScheme, ThresholdSchedule};
use crate::signal::{derive_seed, draw_noise, synthesize, NoiseFamily, NoiseSpec, SignalModel};

/// Oversampling factor of the grid used to approximate `‖S‖_∞`.
pub const SUP_NORM_OVERSAMPLING: usize = 16;

/// A probability bound clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBound {
    /// Unclamped value (`+∞` when no finite bound applies).
    pub raw: f64,
    pub value: f64,
    /// The bound carries no information (`raw ≥ 1` or not applicable).
    pub vacuous: bool,
}

impl ProbabilityBound {
    pub fn from_raw(raw: f64) -> Self {
        let vacuous = !(raw < 1.0);
        ProbabilityBound {
            raw,
            value: if vacuous { 1.0 } else { raw.max(0.0) },
            vacuous,
        }
    }

    pub fn vacuous() -> Self {
        ProbabilityBound::from_raw(f64::INFINITY)
    }

    pub fn zero() -> Self {
        ProbabilityBound::from_raw(0.0)
    }
}

/// `P(‖q‖_∞ ≥ C) ≤ (n+1)·2π·e^{3/2}·(C²/(2r) − 1)·exp(−C²/(4r))` for a random
/// polynomial of degree `n` with `r = b₁² Σ|a_k|²`; valid for `C > 2√(2r)`.
pub fn subgaussian_poly_tail_bound(r: f64, n: usize, c: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be positive, got {r}")));
    }
    let floor = 2.0 * (2.0 * r).sqrt();
    if !(c > floor) {
        return Err(Error::Precondition(format!(
            "polynomial tail bound needs C > 2*sqrt(2r) = {floor}, got {c}"
        )));
    }
    let c2 = c * c;
    Ok((n + 1) as f64 * TAU * E.powf(1.5) * (c2 / (2.0 * r) - 1.0) * (-c2 / (4.0 * r)).exp())
}

/// Smallest `C` at which [`poisson_noise_sup_tail_bound`] applies: `2πb₁/√3`.
pub fn poisson_sup_floor(b1: f64) -> f64 {
    TAU * b1 / 3f64.sqrt()
}

/// `P(‖S^A_{ε,m}‖_∞ ≥ C) ≤ (π e^{3/2} / (b₁² Σ a²/t²))·m·C²·exp(−3C²/(2π²b₁²))`
/// under subgaussian noise with factor `b₁`; valid for `C ≥ 2πb₁/√3`.
pub fn poisson_noise_sup_tail_bound(
    m: usize,
    matrix: &SummationMatrix,
    b1: f64,
    c: f64,
) -> Result<f64> {
    matrix.validate()?;
    if !matches!(matrix, SummationMatrix::TruncatedPoisson { .. }) {
        return Err(Error::Unsupported("the Poisson sup-norm tail bound"));
    }
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    if !(b1 > 0.0 && b1.is_finite()) {
        return Err(Error::param("b1", format!("must be positive, got {b1}")));
    }
    let floor = poisson_sup_floor(b1);
    if !(c >= floor) {
        return Err(Error::Precondition(format!(
            "sup tail bound needs C >= 2*pi*b1/sqrt(3) = {floor}, got {c}"
        )));
    }
    let energy = weight_energy(matrix, m);
    let b2 = b1 * b1;
    Ok(PI * E.powf(1.5) / (b2 * energy)
        * m as f64
        * c
        * c
        * (-3.0 * c * c / (2.0 * PI * PI * b2)).exp())
}

/// Sup bound at `threshold`, reported as vacuous below the validity floor.
pub fn sup_bound_at(
    threshold: f64,
    m: usize,
    matrix: &SummationMatrix,
    b1: f64,
) -> Result<ProbabilityBound> {
    if !(threshold > 0.0) || threshold < poisson_sup_floor(b1) {
        return Ok(ProbabilityBound::vacuous());
    }
    Ok(ProbabilityBound::from_raw(poisson_noise_sup_tail_bound(
        m, matrix, b1, threshold,
    )?))
}

/// Which of the two levels plays the role of `h_m` in the localization bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelChoice {
    /// `L̂_m` at level `h_m`.
    #[default]
    Detection,
    /// `L̂'_m` at level `h'_m`.
    Confirmation,
}

/// Noise levels above which a localization failure becomes possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationThresholds {
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub level: LevelChoice,
    /// `P(e^{iλₙ} ∉ L̂_m) ≤ P(‖S_ε‖_∞ ≥ miss_threshold)`.
    pub miss_threshold: f64,
    /// `P(z ∈ L̂_m) ≤ P(‖S_ε‖_∞ ≥ spurious_threshold)` for `dist(z, supp μ) ≥ Δ`.
    pub spurious_threshold: f64,
}

impl LocalizationThresholds {
    /// Compose with [`poisson_noise_sup_tail_bound`]: `(miss, spurious)`.
    pub fn probabilities(
        &self,
        matrix: &SummationMatrix,
        b1: f64,
    ) -> Result<(ProbabilityBound, ProbabilityBound)> {
        Ok((
            sup_bound_at(self.miss_threshold, self.m, matrix, b1)?,
            sup_bound_at(self.spurious_threshold, self.m, matrix, b1)?,
        ))
    }
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Miss and spurious-detection thresholds for frequency `n` with isolation radius `Δ`.
pub fn localization_failure_bounds(
    model: &SignalModel,
    matrix: &SummationMatrix,
    schedule: &ThresholdSchedule,
    m: usize,
    delta: f64,
    n: usize,
    level: LevelChoice,
) -> Result<LocalizationThresholds> {
    schedule.check_matrix(matrix)?;
    let vals = schedule.at(m)?;
    if n >= model.len() {
        return Err(Error::param(
            "n",
            format!("frequency index {n} out of range for {} components", model.len()),
        ));
    }
    let step = TAU / vals.grid as f64;
    if !(delta > step) {
        return Err(Error::Precondition(format!(
            "Delta must exceed the grid step 2*pi/J = {step}, got {delta}"
        )));
    }
    let lambda = model.frequencies()[n];
    if model
        .frequencies()
        .iter()
        .enumerate()
        .any(|(k, &l)| k != n && circle_gap(l, lambda) < delta)
    {
        return Err(Error::Precondition(format!(
            "frequency {n} is not isolated at radius {delta}"
        )));
    }
    let h = match level {
        LevelChoice::Detection => vals.h,
        LevelChoice::Confirmation => vals.h_prime,
    };
    let a_n = model.amplitudes()[n].norm();
    let mass = model.total_variation();
    let miss = a_n * vals.big_h - h - (mass - a_n) * (kernel_f(matrix, m, delta - step)? + BETA_SUP_BOUND);
    let spurious = h - mass * (kernel_f(matrix, m, delta - step / 2.0)? + BETA_SUP_BOUND);
    Ok(LocalizationThresholds {
        m,
        n,
        delta,
        level,
        miss_threshold: miss,
        spurious_threshold: spurious,
    })
}

/// An empirical frequency with its binomial standard error and Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub hits: usize,
    pub trials: usize,
    pub rate: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

impl RateEstimate {
    pub fn new(hits: usize, trials: usize) -> Self {
        let n = trials as f64;
        let p = if trials == 0 { 0.0 } else { hits as f64 / n };
        let se = if trials == 0 { 0.0 } else { (p * (1.0 - p) / n).sqrt() };
        let z = 1.959_963_984_540_054;
        let ci95 = if trials == 0 {
            (0.0, 1.0)
        } else {
            let denom = 1.0 + z * z / n;
            let centre = (p + z * z / (2.0 * n)) / denom;
            let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
            ((centre - half).max(0.0), (centre + half).min(1.0))
        };
        RateEstimate {
            hits,
            trials,
            rate: p,
            std_error: se,
            ci95,
        }
    }

    /// `rate ≤ bound + k·SE`.
    pub fn within(&self, bound: f64, k: f64) -> bool {
        self.rate <= bound + k * self.std_error
    }
}

/// `max_j |S^A_{ε,m}(e^{2πij/(16m)})|`, the grid proxy for `‖S^A_{ε,m}‖_∞`.
pub fn noise_sup_norm(noise: &[num_complex::Complex64], matrix: &SummationMatrix, m: usize) -> Result<f64> {
    let coeffs = weighted_sequence(noise, matrix, m)?;
    Ok(evaluate_coefficients(&coeffs, SUP_NORM_OVERSAMPLING * m, EvalPath::Dft)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// Empirical `P(‖S_ε‖ ≥ C)` against the analytic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailComparison {
    #[serde(rename = "C")]
    pub c: f64,
    pub empirical: RateEstimate,
    pub bound: ProbabilityBound,
}

impl TailComparison {
    /// Empirical rate at most the bound plus three standard errors.
    pub fn consistent(&self) -> bool {
        self.empirical.within(self.bound.value, 3.0)
    }
}

fn subgaussian_factor(noise: &NoiseSpec) -> Result<Option<f64>> {
    noise.validate()?;
    match noise.family {
        NoiseFamily::None => Ok(None),
        NoiseFamily::ComplexGaussian { b1, .. } => Ok(Some(b1)),
        _ => Err(Error::Config(
            "analytic tail bounds need subgaussian (complex-gaussian) noise".into(),
        )),
    }
}

/// Seeded Monte-Carlo check of [`poisson_noise_sup_tail_bound`]; trial `k` uses
/// the seed `derive_seed(noise.seed, k)`.
pub fn empirical_sup_tail(
    noise: &NoiseSpec,
    matrix: &SummationMatrix,
    m: usize,
    thresholds: &[f64],
    trials: usize,
) -> Result<Vec<TailComparison>> {
    let b1 = subgaussian_factor(noise)?;
    let sups = (0..trials)
        .into_par_iter()
        .map(|k| {
            let eps = draw_noise(&noise.with_seed(derive_seed(noise.seed, k as u64)), m)?;
            noise_sup_norm(&eps, matrix, m)
        })
        .collect::<Result<Vec<f64>>>()?;
    thresholds
        .iter()
        .map(|&c| {
            let hits = sups.iter().filter(|&&s| s >= c).count();
            let bound = match b1 {
                Some(b1) => ProbabilityBound::from_raw(poisson_noise_sup_tail_bound(m, matrix, b1, c)?),
                None => ProbabilityBound::from_raw(if c > 0.0 { 0.0 } else { 1.0 }),
            };
            Ok(TailComparison {
                c,
                empirical: RateEstimate::new(hits, trials),
                bound,
            })
        })
        .collect()
}

/// Monte-Carlo rates of `B^𝔄_m(α̃, Δ) = {𝔄(α̃, Δ) ⊂ L̂_m}` and
/// `B^dist_m(Δ) = {L̂_m ⊂ O_Δ(supp μ)}` with analytic bounds on their failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRates {
    pub m: usize,
    #[serde(rename = "J")]
    pub grid: usize,
    pub h: f64,
    pub alpha_tilde: f64,
    pub delta: f64,
    /// Indices of the frequencies in `𝔄(α̃, Δ)`.
    pub a_set: Vec<usize>,
    pub b_alpha: RateEstimate,
    pub b_dist: RateEstimate,
    /// Bound on `1 − P(B^𝔄_m)`.
    pub alpha_failure_bound: ProbabilityBound,
    /// Bound on `1 − P(B^dist_m)`.
    pub dist_failure_bound: ProbabilityBound,
}

impl CorollaryRates {
    /// Both empirical failure rates within the analytic bound plus three SE.
    pub fn consistent(&self) -> bool {
        let fail_a = RateEstimate::new(self.b_alpha.trials - self.b_alpha.hits, self.b_alpha.trials);
        let fail_d = RateEstimate::new(self.b_dist.trials - self.b_dist.hits, self.b_dist.trials);
        fail_a.within(self.alpha_failure_bound.value, 3.0)
            && fail_d.within(self.dist_failure_bound.value, 3.0)
    }
}

/// `𝔄(α̃, Δ)`: frequencies with `|αₙ| > α̃` at distance `≥ Δ` from all others.
pub fn isolated_heavy_set(model: &SignalModel, alpha_tilde: f64, delta: f64) -> Vec<usize> {
    let f = model.frequencies();
    (0..model.len())
        .filter(|&n| model.amplitudes()[n].norm() > alpha_tilde)
        .filter(|&n| (0..f.len()).all(|k| k == n || circle_gap(f[k], f[n]) >= delta))
        .collect()
}

pub fn corollary_event_rates(
    model: &SignalModel,
    noise: &NoiseSpec,
    matrix: &SummationMatrix,
    schedule: &ThresholdSchedule,
    m: usize,
    trials: usize,
    alpha_tilde: f64,
    delta: f64,
) -> Result<CorollaryRates> {
    if !matches!(schedule.scheme, ScheduleScheme::PoissonCorollary { .. }) {
        return Err(Error::Config(format!(
            "event rates need the poisson-corollary schedule, got {}",
            schedule.name()
        )));
    }
    schedule.check_matrix(matrix)?;
    if !(alpha_tilde > 0.0) {
        return Err(Error::param("alpha_tilde", format!("must be positive, got {alpha_tilde}")));
    }
    if !(delta > 0.0 && delta < PI / 3.0) {
        return Err(Error::param("Delta", format!("must lie in (0, pi/3), got {delta}")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let b1 = subgaussian_factor(noise)?;
    let vals = schedule.at(m)?;
    let a_set = isolated_heavy_set(model, alpha_tilde, delta);

    let to_bound = |threshold: f64| -> Result<ProbabilityBound> {
        match b1 {
            Some(b1) => sup_bound_at(threshold, m, matrix, b1),
            None if threshold > 0.0 => Ok(ProbabilityBound::zero()),
            None => Ok(ProbabilityBound::vacuous()),
        }
    };
    let alpha_failure_bound = if a_set.is_empty() {
        ProbabilityBound::zero()
    } else {
        let mut worst = f64::INFINITY;
        for &n in &a_set {
            let t = localization_failure_bounds(
                model,
                matrix,
                schedule,
                m,
                delta,
                n,
                LevelChoice::Detection,
            )?;
            worst = worst.min(t.miss_threshold);
        }
        to_bound(worst)?
    };
    let dist_failure_bound = {
        let step = TAU / vals.grid as f64;
        if delta < step {
            ProbabilityBound::vacuous()
        } else {
            let spurious =
                vals.h - model.total_variation() * (kernel_f(matrix, m, delta - step / 2.0)? + BETA_SUP_BOUND);
            to_bound(spurious)?
        }
    };

    let support = CircleSet::from_points(model.frequencies());
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|k| {
            let x = synthesize(model, &noise.with_seed(derive_seed(noise.seed, k as u64)), m)?;
            let coeffs = weighted_sequence(x.samples(), matrix, m)?;
            let mags: Vec<f64> = evaluate_coefficients(&coeffs, vals.grid, EvalPath::Dft)
                .iter()
                .map(|v| v.norm())
                .collect();
            let family = superlevel_arcs(&mags, vals.h);
            let covered = a_set
                .iter()
                .all(|&n| family.contains_angle(model.frequencies()[n]));
            let near = family.is_empty()
                || directed_angular_distance(&family.to_circle_set(), &support) < delta;
            Ok((covered, near))
        })
        .collect::<Result<Vec<(bool, bool)>>>()?;

    Ok(CorollaryRates {
        m,
        grid: vals.grid,
        h: vals.h,
        alpha_tilde,
        delta,
        a_set,
        b_alpha: RateEstimate::new(outcomes.iter().filter(|o| o.0).count(), trials),
        b_dist: RateEstimate::new(outcomes.iter().filter(|o| o.1).count(), trials),
        alpha_failure_bound,
        dist_failure_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ScheduleMode;
    use num_complex::Complex64;

    #[test]
    fn poly_bound_examples() {
        let b = subgaussian_poly_tail_bound(1.0, 0, 4.0).unwrap();
        let oracle = TAU * 1.5f64.exp() * 7.0 * (-4.0f64).exp();
        assert!((b - oracle).abs() < 1e-12);
        assert!((b - 3.610).abs() < 5e-4);
        let b = subgaussian_poly_tail_bound(1.0, 0, 8.0).unwrap();
        assert!((b - 9.83e-5).abs() < 5e-7);
        assert!(ProbabilityBound::from_raw(3.61).vacuous);
    }

    #[test]
    fn poly_bound_boundary_excluded() {
        let r: f64 = 0.5;
        let c = 2.0 * (2.0 * r).sqrt();
        assert!(matches!(
            subgaussian_poly_tail_bound(r, 3, c),
            Err(Error::Precondition(_))
        ));
        assert!(subgaussian_poly_tail_bound(0.0, 3, 10.0).is_err());
    }

    #[test]
    fn poly_bound_decreasing_past_turning_point() {
        let r = 2.0;
        let start = 2.0 * (3.0f64 * r).sqrt();
        let mut last = f64::INFINITY;
        for k in 0..200 {
            let c = start + 0.05 * k as f64;
            let b = subgaussian_poly_tail_bound(r, 5, c).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn sup_bound_examples() {
        let p = SummationMatrix::poisson();
        assert!(matches!(
            poisson_noise_sup_tail_bound(256, &p, 1.0, 1.0),
            Err(Error::Precondition(_))
        ));
        let energy: f64 = (1..=256)
            .map(|t| {
                let a = (-(t as f64) / 256.0).exp();
                a * a / (t * t) as f64
            })
            .sum();
        let oracle = PI * 1.5f64.exp() / energy * 256.0 * 100.0 * (-300.0 / (2.0 * PI * PI)).exp();
        let b = poisson_noise_sup_tail_bound(256, &p, 1.0, 10.0).unwrap();
        assert!((b - oracle).abs() < 1e-12 * oracle);
        assert!((b - 0.056).abs() < 1e-3);
        assert!(matches!(
            poisson_noise_sup_tail_bound(256, &SummationMatrix::Dirichlet, 1.0, 10.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sup_bound_decreasing() {
        let p = SummationMatrix::poisson();
        let mut last = f64::INFINITY;
        for k in 0..100 {
            let c = TAU + 0.1 * k as f64;
            let b = poisson_noise_sup_tail_bound(64, &p, 1.0, c).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn miss_threshold_singleton() {
        let model = SignalModel::new(vec![0.7], vec![Complex64::new(0.0, 2.0)]).unwrap();
        let sched = ThresholdSchedule::poisson_standard(ScheduleMode::Detect);
        let p = SummationMatrix::poisson();
        let m = 10_000;
        let t = localization_failure_bounds(&model, &p, &sched, m, 0.5, 0, LevelChoice::Detection)
            .unwrap();
        let ln = (m as f64).ln();
        let oracle = (ln - 1.0) - ln.sqrt();
        assert!((t.miss_threshold - oracle).abs() < 1e-12);
        assert!((t.miss_threshold - 5.175).abs() < 1e-3);
        let conf =
            localization_failure_bounds(&model, &p, &sched, m, 0.5, 0, LevelChoice::Confirmation)
                .unwrap();
        assert!((conf.miss_threshold - (ln - 1.0 - 2.0 * ln.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn localization_preconditions() {
        let model =
            SignalModel::new(vec![0.0, 0.3], vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let sched = ThresholdSchedule::poisson_standard(ScheduleMode::Detect);
        let p = SummationMatrix::poisson();
        let step = TAU / sched.at(400).unwrap().grid as f64;
        let run = |delta, n| {
            localization_failure_bounds(&model, &p, &sched, 400, delta, n, LevelChoice::Detection)
        };
        assert!(matches!(run(step, 0), Err(Error::Precondition(_))));
        assert!(matches!(run(0.5, 0), Err(Error::Precondition(_))));
        assert!(run(0.29, 1).is_ok());
        assert!(matches!(run(0.29, 2), Err(Error::ParameterDomain { .. })));
    }

    #[test]
    fn negative_threshold_is_vacuous() {
        let b = sup_bound_at(-1.0, 100, &SummationMatrix::poisson(), 1.0).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.value, 1.0);
    }

    #[test]
    fn rate_estimate() {
        let r = RateEstimate::new(0, 1000);
        assert_eq!(r.rate, 0.0);
        assert_eq!(r.std_error, 0.0);
        assert!(r.ci95.1 > 0.0 && r.ci95.1 < 0.01);
        let r = RateEstimate::new(500, 1000);
        assert!((r.std_error - (0.25f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert!(r.ci95.0 < 0.5 && r.ci95.1 > 0.5);
    }

    #[test]
    fn corollary_noiseless_and_vacuous_cases() {
        let model = SignalModel::new(vec![1.0], vec![Complex64::new(2.0, 0.0)]).unwrap();
        let sched = ThresholdSchedule::poisson_corollary(0.25).unwrap();
        let p = SummationMatrix::poisson();
        let r = corollary_event_rates(&model, &NoiseSpec::none(), &p, &sched, 4096, 5, 1.0, 0.5)
            .unwrap();
        assert_eq!(r.b_alpha.rate, 1.0);
        assert_eq!(r.b_dist.rate, 1.0);
        assert_eq!(r.a_set, vec![0]);

        let r = corollary_event_rates(&model, &NoiseSpec::none(), &p, &sched, 4096, 3, 2.0, 0.5)
            .unwrap();
        assert!(r.a_set.is_empty());
        assert_eq!(r.b_alpha.rate, 1.0);
        assert_eq!(r.alpha_failure_bound.value, 0.0);

        let std = ThresholdSchedule::poisson_standard(ScheduleMode::Detect);
        assert!(matches!(
            corollary_event_rates(&model, &NoiseSpec::none(), &p, &std, 4096, 3, 1.0, 0.5),
            Err(Error::Config(_))
        ));
    }
}

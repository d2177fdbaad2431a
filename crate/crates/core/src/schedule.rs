//! Level and grid schedules `(H_m, h_m, h'_m, J_m)`.
//!
//! `H_m` is a floor for `|S^A_{1,m}|` on `[-2π/J_m, 2π/J_m]`, `h_m` the detection
//! level and `h'_m` the confirmation level. Admissible schedules need
//! `H_m → ∞`, `h_m → ∞`, `H_m/h_m → ∞`, and for two-threshold estimation also
//! `h'_m - h_m → ∞` and `H_m/h'_m → ∞`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::kernels::{kernel_at_one, kernel_value, SummationMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Grid just fine enough for detection, `J ≥ 2π√m`.
    #[default]
    Detect,
    /// Grid fine enough for amplitude recovery, `J ≥ 2πm^{3/2}`.
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum ScheduleScheme {
    /// Dirichlet summation: `H = ln(m+1)/√2`, `h = h' = c₀ + c₁ ln^{1-δ} m`, `J = 8m`.
    DirichletExample {
        #[serde(default = "half")]
        delta: f64,
        #[serde(default)]
        c0: f64,
        #[serde(default = "one")]
        c1: f64,
    },
    /// Poisson summation (`C = 1`): `H = (ln m)/2 - 1/2`,
    /// `h = c₃ ln^{1-δ} m + c₄`, `h' = c₅ ln^{1-δ} m + c₆`.
    PoissonStandard {
        #[serde(default = "half")]
        delta: f64,
        #[serde(default = "one")]
        c3: f64,
        #[serde(default)]
        c4: f64,
        #[serde(default = "two")]
        c5: f64,
        #[serde(default = "one")]
        c6: f64,
    },
    /// Poisson summation with `h = h' = ln^{1-δ} m`, `δ ∈ (0, 1/2)`, `J = ⌈2π√m⌉`.
    PoissonCorollary {
        #[serde(default = "quarter")]
        delta: f64,
    },
}

fn half() -> f64 {
    0.5
}
fn quarter() -> f64 {
    0.25
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    #[serde(flatten)]
    pub scheme: ScheduleScheme,
    #[serde(default)]
    pub mode: ScheduleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleValues {
    #[serde(rename = "H")]
    pub big_h: f64,
    pub h: f64,
    pub h_prime: f64,
    #[serde(rename = "J")]
    pub grid: usize,
}

impl ThresholdSchedule {
    pub fn dirichlet_example() -> Self {
        ThresholdSchedule {
            scheme: ScheduleScheme::DirichletExample {
                delta: 0.5,
                c0: 0.0,
                c1: 1.0,
            },
            mode: ScheduleMode::Detect,
        }
    }

    pub fn poisson_standard(mode: ScheduleMode) -> Self {
        ThresholdSchedule {
            scheme: ScheduleScheme::PoissonStandard {
                delta: 0.5,
                c3: 1.0,
                c4: 0.0,
                c5: 2.0,
                c6: 1.0,
            },
            mode,
        }
    }

    /// Poisson schedule with custom constants; validated on construction.
    pub fn poisson_with(
        delta: f64,
        [c3, c4, c5, c6]: [f64; 4],
        mode: ScheduleMode,
    ) -> Result<Self> {
        let s = ThresholdSchedule {
            scheme: ScheduleScheme::PoissonStandard {
                delta,
                c3,
                c4,
                c5,
                c6,
            },
            mode,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn poisson_corollary(delta: f64) -> Result<Self> {
        let s = ThresholdSchedule {
            scheme: ScheduleScheme::PoissonCorollary { delta },
            mode: ScheduleMode::Detect,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_mode(self, mode: ScheduleMode) -> Self {
        ThresholdSchedule { mode, ..self }
    }

    pub fn name(&self) -> &'static str {
        match self.scheme {
            ScheduleScheme::DirichletExample { .. } => "dirichlet-example",
            ScheduleScheme::PoissonStandard { .. } => "poisson-standard",
            ScheduleScheme::PoissonCorollary { .. } => "poisson-corollary",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |d: f64| d > 0.0 && d < 1.0;
        match self.scheme {
            ScheduleScheme::DirichletExample { delta, c0, c1 } => {
                if !in_unit(delta) {
                    return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
                }
                if !(c1 > 0.0) || !c0.is_finite() || !c1.is_finite() {
                    return Err(Error::Config(format!("need c1 > 0, got c0={c0}, c1={c1}")));
                }
            }
            ScheduleScheme::PoissonStandard {
                delta,
                c3,
                c4,
                c5,
                c6,
            } => {
                if !in_unit(delta) {
                    return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
                }
                if !(0.0 < c3 && c3 < c5) || !c5.is_finite() {
                    return Err(Error::Config(format!("need 0 < c3 < c5, got c3={c3}, c5={c5}")));
                }
                if !(c4 < c6) || !c4.is_finite() || !c6.is_finite() {
                    return Err(Error::Config(format!("need c4 < c6, got c4={c4}, c6={c6}")));
                }
            }
            ScheduleScheme::PoissonCorollary { delta } => {
                if !(delta > 0.0 && delta < 0.5) {
                    return Err(Error::Config(format!(
                        "corollary schedule needs delta in (0, 1/2), got {delta}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `matrix` is the summation scheme this schedule was derived for.
    pub fn check_matrix(&self, matrix: &SummationMatrix) -> Result<()> {
        let ok = match self.scheme {
            ScheduleScheme::DirichletExample { .. } => *matrix == SummationMatrix::Dirichlet,
            _ => matrix.is_unit_poisson(),
        };
        if ok {
            Ok(())
        } else {
            let wanted = match self.scheme {
                ScheduleScheme::DirichletExample { .. } => "the Dirichlet matrix",
                _ => "the truncated Poisson matrix with C = 1",
            };
            Err(Error::Config(format!(
                "schedule {} requires {wanted}, got {matrix:?}",
                self.name()
            )))
        }
    }

    /// Whether the confirmation level differs from the detection level.
    pub fn is_two_level(&self) -> bool {
        matches!(self.scheme, ScheduleScheme::PoissonStandard { .. })
    }

    /// Detection grid order `⌈2π√m⌉` / `8m` regardless of mode.
    pub fn detect_grid(&self, m: usize) -> usize {
        match self.scheme {
            ScheduleScheme::DirichletExample { .. } => 8 * m,
            _ => ceil_usize(TAU * (m as f64).sqrt()),
        }
    }

    /// `(H_m, h_m, h'_m, J_m)`; requires `m ≥ 3`.
    pub fn at(&self, m: usize) -> Result<ScheduleValues> {
        self.validate()?;
        if m < 3 {
            return Err(Error::Precondition(format!("schedules need m >= 3, got {m}")));
        }
        let ln_m = (m as f64).ln();
        let vals = match self.scheme {
            ScheduleScheme::DirichletExample { delta, c0, c1 } => {
                let h = c0 + c1 * ln_m.powf(1.0 - delta);
                ScheduleValues {
                    big_h: ((m + 1) as f64).ln() / SQRT_2,
                    h,
                    h_prime: h,
                    grid: 8 * m,
                }
            }
            ScheduleScheme::PoissonStandard {
                delta,
                c3,
                c4,
                c5,
                c6,
            } => {
                let l = ln_m.powf(1.0 - delta);
                ScheduleValues {
                    big_h: 0.5 * ln_m - 0.5,
                    h: c3 * l + c4,
                    h_prime: c5 * l + c6,
                    grid: self.grid_for(m),
                }
            }
            ScheduleScheme::PoissonCorollary { delta } => {
                let h = ln_m.powf(1.0 - delta);
                ScheduleValues {
                    big_h: 0.5 * ln_m - 0.5,
                    h,
                    h_prime: h,
                    grid: self.grid_for(m),
                }
            }
        };
        Ok(vals)
    }

    fn grid_for(&self, m: usize) -> usize {
        match (self.scheme, self.mode) {
            (ScheduleScheme::DirichletExample { .. }, _) => 8 * m,
            (_, ScheduleMode::Detect) => ceil_usize(TAU * (m as f64).sqrt()),
            (_, ScheduleMode::Estimate) => ceil_usize(TAU * (m as f64).powf(1.5)),
        }
    }

    /// Smallest `m ≥ 3` with `h_m > 0`.
    pub fn min_positive_level_m(&self) -> usize {
        let (c_const, c_slope, delta) = match self.scheme {
            ScheduleScheme::DirichletExample { delta, c0, c1 } => (c0, c1, delta),
            ScheduleScheme::PoissonStandard { delta, c3, c4, .. } => (c4, c3, delta),
            ScheduleScheme::PoissonCorollary { .. } => return 3,
        };
        if c_const > 0.0 {
            return 3;
        }
        // c_slope · (ln m)^{1-δ} > -c_const
        let ln_m = (-c_const / c_slope).powf(1.0 / (1.0 - delta));
        let mut m = (ln_m.exp().floor() as usize).max(3);
        while self.at(m).map(|v| v.h <= 0.0).unwrap_or(true) {
            m += 1;
        }
        m
    }
}

fn ceil_usize(x: f64) -> usize {
    // guard against representation error just above an integer
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleCheck {
    /// `H_m < S^A_{1,m}(1)`.
    FloorBelowPeak,
    /// `h_m ≤ h'_m`.
    LevelOrder,
    /// `|S^A_{1,m}(e^{iθ})| ≥ H_m` on `[-2π/J_m, 2π/J_m]`.
    GridFloor,
    /// `h_m > 0`.
    PositiveLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFailure {
    pub m: usize,
    pub check: ScheduleCheck,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleValidation {
    pub schedule: String,
    pub m_range: (usize, usize),
    pub checked: usize,
    /// Smallest `min_θ |S^A_{1,m}(e^{iθ})| - H_m` seen.
    pub worst_grid_margin: f64,
    pub m_min_positive_level: usize,
    pub first_failure: Option<ScheduleFailure>,
}

impl ScheduleValidation {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Numerically verifies the schedule conditions for every `m` in `m_range`
/// (inclusive), sampling `theta_samples` angles in `[-2π/J_m, 2π/J_m]`.
///
/// `h_m > 0` is only required from the reported `m_min_positive_level` on.
pub fn validate_schedule(
    schedule: &ThresholdSchedule,
    matrix: &SummationMatrix,
    m_range: (usize, usize),
    theta_samples: usize,
) -> Result<ScheduleValidation> {
    schedule.validate()?;
    matrix.validate()?;
    schedule.check_matrix(matrix)?;
    let (lo, hi) = m_range;
    if lo < 3 || hi < lo {
        return Err(Error::Precondition(format!(
            "m range must satisfy 3 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let samples = theta_samples.max(2);
    let m_min = schedule.min_positive_level_m();
    let mut worst = f64::INFINITY;
    let mut first_failure = None;
    let mut checked = 0;

    for m in lo..=hi {
        checked += 1;
        let v = schedule.at(m)?;
        let peak = kernel_at_one(matrix, m);
        let fail = |check, detail: String| Some(ScheduleFailure { m, check, detail });

        let mut failure = None;
        if !(v.big_h < peak) {
            failure = fail(
                ScheduleCheck::FloorBelowPeak,
                format!("H = {} >= S(1) = {peak}", v.big_h),
            );
        } else if !(v.h <= v.h_prime) {
            failure = fail(
                ScheduleCheck::LevelOrder,
                format!("h = {} > h' = {}", v.h, v.h_prime),
            );
        } else if m >= m_min && !(v.h > 0.0) {
            failure = fail(ScheduleCheck::PositiveLevel, format!("h = {}", v.h));
        }

        let half_width = TAU / v.grid as f64;
        let min_abs = (0..samples)
            .map(|k| -half_width + 2.0 * half_width * k as f64 / (samples - 1) as f64)
            .map(|th| kernel_value(matrix, m, th).norm())
            .fold(f64::INFINITY, f64::min);
        let margin = min_abs - v.big_h;
        worst = worst.min(margin);
        if failure.is_none() && margin < 0.0 {
            failure = fail(
                ScheduleCheck::GridFloor,
                format!("min |S| = {min_abs} < H = {}", v.big_h),
            );
        }
        if first_failure.is_none() {
            first_failure = failure;
        }
    }

    Ok(ScheduleValidation {
        schedule: schedule.name().to_string(),
        m_range,
        checked,
        worst_grid_margin: worst,
        m_min_positive_level: m_min,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_standard_floor_at_55() {
        let v = ThresholdSchedule::poisson_standard(ScheduleMode::Detect)
            .at(55)
            .unwrap();
        assert!((v.big_h - (0.5 * 55f64.ln() - 0.5)).abs() < 1e-15);
        assert!((v.big_h - 1.503_667).abs() < 1e-6, "{}", v.big_h);
        assert!((v.h - 55f64.ln().sqrt()).abs() < 1e-12);
        assert!((v.h_prime - (2.0 * 55f64.ln().sqrt() + 1.0)).abs() < 1e-12);
        assert_eq!(v.grid, 47); // ⌈2π·√55⌉ = ⌈46.6⌉
    }

    #[test]
    fn dirichlet_grid_is_8m() {
        let v = ThresholdSchedule::dirichlet_example().at(7).unwrap();
        assert_eq!(v.grid, 56);
        assert_eq!(v.h, v.h_prime);
        assert!((v.big_h - 8f64.ln() / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn estimate_grid_at_100() {
        let v = ThresholdSchedule::poisson_standard(ScheduleMode::Estimate)
            .at(100)
            .unwrap();
        assert_eq!(v.grid, 6284);
    }

    #[test]
    fn corollary_values() {
        let s = ThresholdSchedule::poisson_corollary(0.25).unwrap();
        let v = s.at(100).unwrap();
        assert_eq!(v.grid, 63);
        assert!((v.h - 100f64.ln().powf(0.75)).abs() < 1e-12);
        assert!(ThresholdSchedule::poisson_corollary(0.5).is_err());
    }

    #[test]
    fn constants_are_validated() {
        let mode = ScheduleMode::Detect;
        assert!(ThresholdSchedule::poisson_with(0.5, [2.0, 0.0, 1.0, 1.0], mode).is_err());
        assert!(ThresholdSchedule::poisson_with(0.5, [1.0, 1.0, 2.0, 1.0], mode).is_err());
        assert!(ThresholdSchedule::poisson_with(0.0, [1.0, 0.0, 2.0, 1.0], mode).is_err());
        assert!(ThresholdSchedule::poisson_with(1.0, [1.0, 0.0, 2.0, 1.0], mode).is_err());
        assert!(ThresholdSchedule::poisson_with(0.3, [0.5, -1.0, 0.8, 0.0], mode).is_ok());
        let err = ThresholdSchedule::poisson_with(0.5, [0.0, 0.0, 1.0, 1.0], mode).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn small_m_is_a_precondition_error() {
        let s = ThresholdSchedule::dirichlet_example();
        assert!(matches!(s.at(2), Err(Error::Precondition(_))));
    }

    #[test]
    fn levels_are_monotone() {
        for s in [
            ThresholdSchedule::dirichlet_example(),
            ThresholdSchedule::poisson_standard(ScheduleMode::Estimate),
            ThresholdSchedule::poisson_corollary(0.3).unwrap(),
        ] {
            let mut prev = s.at(3).unwrap();
            for m in 4..3000 {
                let v = s.at(m).unwrap();
                assert!(v.big_h >= prev.big_h && v.h >= prev.h && v.h_prime >= prev.h_prime);
                assert!(v.grid >= prev.grid);
                prev = v;
            }
        }
    }

    #[test]
    fn separation_grows() {
        let s = ThresholdSchedule::poisson_standard(ScheduleMode::Detect);
        let vals: Vec<_> = [10, 100, 1000, 10_000]
            .iter()
            .map(|&m| s.at(m).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1].h_prime - w[1].h > w[0].h_prime - w[0].h);
            assert!(w[1].big_h / w[1].h_prime > w[0].big_h / w[0].h_prime);
        }
    }

    #[test]
    fn min_positive_level() {
        let s = ThresholdSchedule {
            scheme: ScheduleScheme::DirichletExample {
                delta: 0.5,
                c0: -2.0,
                c1: 1.0,
            },
            mode: ScheduleMode::Detect,
        };
        // √(ln m) > 2 ⇔ m > e⁴ ≈ 54.6
        assert_eq!(s.min_positive_level_m(), 55);
        assert_eq!(ThresholdSchedule::dirichlet_example().min_positive_level_m(), 3);
    }

    #[test]
    fn validation_dirichlet_and_poisson() {
        let d = validate_schedule(
            &ThresholdSchedule::dirichlet_example(),
            &SummationMatrix::Dirichlet,
            (3, 500),
            9,
        )
        .unwrap();
        assert!(d.passed(), "{d:?}");
        assert_eq!(d.checked, 498);
        let p = validate_schedule(
            &ThresholdSchedule::poisson_standard(ScheduleMode::Detect),
            &SummationMatrix::poisson(),
            (3, 500),
            9,
        )
        .unwrap();
        assert!(p.passed(), "{p:?}");
    }

    #[test]
    fn validation_rejects_mismatch() {
        let err = validate_schedule(
            &ThresholdSchedule::dirichlet_example(),
            &SummationMatrix::poisson(),
            (3, 10),
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = validate_schedule(
            &ThresholdSchedule::poisson_standard(ScheduleMode::Detect),
            &SummationMatrix::TruncatedPoisson { c: 2.0 },
            (3, 10),
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn schedule_json() {
        let s: ThresholdSchedule = serde_json::from_str(
            r#"{"scheme":"poisson-standard","delta":0.5,"c3":1,"c4":0,"c5":2,"c6":1,"mode":"estimate"}"#,
        )
        .unwrap();
        assert_eq!(s, ThresholdSchedule::poisson_standard(ScheduleMode::Estimate));
        let s: ThresholdSchedule = serde_json::from_str(r#"{"scheme":"dirichlet-example"}"#).unwrap();
        assert_eq!(s, ThresholdSchedule::dirichlet_example());
    }
}

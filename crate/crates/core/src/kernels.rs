//! Summation matrices and evaluation of windowed partial sums
//! `S^A_{u,m}(e^{iθ}) = Σ_{t=1}^{m} (a_{m,t}/t) u(t) e^{itθ}`.
//!
//! Grids are the `J`-th roots of unity, `θ_j = 2πj/J`. Three evaluation routes
//! share one weighted sequence `c_t = a_{m,t} u(t) / t`:
//!
//! - a length-`J` inverse FFT of `c` folded modulo `J` (all points, `O(J log J)`),
//! - direct summation (oracle, `O(mJ)`),
//! - a chirp-z transform for a contiguous index window of a fine grid,
//!   used by the two-stage estimator.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Uniform bound on `|S^A_{1,m} - f_m|` for the truncated Poisson matrix with `C = 1`
/// (`ln 2 + π/3 + e^{-1}` rounded up).
pub const BETA_SUP_BOUND: f64 = 11.0 / 5.0;

/// Floating point slack when checking analytic kernel inequalities.
pub const KERNEL_BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum SummationMatrix {
    /// `a_{m,t} = 1` for `t ≤ m`.
    Dirichlet,
    /// `a_{m,t} = e^{-Ct/m}` for `t ≤ m`.
    #[serde(rename = "poisson", alias = "truncated-poisson")]
    TruncatedPoisson {
        #[serde(rename = "C", default = "default_poisson_c")]
        c: f64,
    },
}

fn default_poisson_c() -> f64 {
    1.0
}

impl SummationMatrix {
    pub fn poisson() -> Self {
        SummationMatrix::TruncatedPoisson { c: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SummationMatrix::Dirichlet => Ok(()),
            SummationMatrix::TruncatedPoisson { c } if c > 0.0 && c.is_finite() => Ok(()),
            SummationMatrix::TruncatedPoisson { c } => {
                Err(Error::param("C", format!("Poisson constant must be positive, got {c}")))
            }
        }
    }

    /// `r_m = e^{-C/m}` for the Poisson matrix.
    pub fn poisson_ratio(&self, m: usize) -> Option<f64> {
        match *self {
            SummationMatrix::TruncatedPoisson { c } => Some((-c / m as f64).exp()),
            SummationMatrix::Dirichlet => None,
        }
    }

    /// Whether this is the Poisson matrix with `C = 1`, the one with a known
    /// almost-decreasing split.
    pub fn is_unit_poisson(&self) -> bool {
        matches!(*self, SummationMatrix::TruncatedPoisson { c } if c == 1.0)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SummationMatrix::Dirichlet => "dirichlet",
            SummationMatrix::TruncatedPoisson { .. } => "poisson",
        }
    }
}

/// Matrix entry `a_{m,t}`.
pub fn weight(matrix: &SummationMatrix, m: usize, t: usize) -> f64 {
    if t == 0 || t > m {
        return 0.0;
    }
    match *matrix {
        SummationMatrix::Dirichlet => 1.0,
        SummationMatrix::TruncatedPoisson { c } => (-c * t as f64 / m as f64).exp(),
    }
}

/// `S^A_{1,m}(1) = Σ a_{m,t}/t`, which is also the sup norm of the kernel.
pub fn kernel_at_one(matrix: &SummationMatrix, m: usize) -> f64 {
    (1..=m).map(|t| weight(matrix, m, t) / t as f64).sum()
}

/// `Σ a_{m,t}² / t²`.
pub fn weight_energy(matrix: &SummationMatrix, m: usize) -> f64 {
    (1..=m)
        .map(|t| {
            let w = weight(matrix, m, t) / t as f64;
            w * w
        })
        .sum()
}

/// Values of a partial sum at `θ_j = 2πj/J`, `j = 0..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation {
    pub values: Vec<Complex64>,
    pub m: usize,
    pub grid: usize,
}

impl GridEvaluation {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.grid as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPath {
    Direct,
    Dft,
}

/// Weighted sequence `c_t = a_{m,t} u(t) / t` for `t = 1..=m`, stored at index `t-1`.
pub fn weighted_sequence(
    samples: &[Complex64],
    matrix: &SummationMatrix,
    m: usize,
) -> Result<Vec<Complex64>> {
    if samples.len() < m {
        return Err(Error::InputLength {
            needed: m,
            got: samples.len(),
        });
    }
    Ok(samples[..m]
        .iter()
        .enumerate()
        .map(|(i, &u)| u * (weight(matrix, m, i + 1) / (i + 1) as f64))
        .collect())
}

fn unit_sequence(matrix: &SummationMatrix, m: usize) -> Vec<Complex64> {
    (1..=m)
        .map(|t| Complex64::new(weight(matrix, m, t) / t as f64, 0.0))
        .collect()
}

/// `S^A_{u,m}` on the `J`-point grid.
pub fn evaluate_grid(
    samples: &[Complex64],
    matrix: &SummationMatrix,
    m: usize,
    grid: usize,
    path: EvalPath,
) -> Result<GridEvaluation> {
    matrix.validate()?;
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    if grid == 0 {
        return Err(Error::param("J", "grid order must be at least 1"));
    }
    let coeffs = weighted_sequence(samples, matrix, m)?;
    Ok(GridEvaluation {
        values: evaluate_coefficients(&coeffs, grid, path),
        m,
        grid,
    })
}

/// The kernel `S^A_{1,m}` on the `J`-point grid.
pub fn kernel_grid(
    matrix: &SummationMatrix,
    m: usize,
    grid: usize,
    path: EvalPath,
) -> Result<GridEvaluation> {
    matrix.validate()?;
    if m == 0 || grid == 0 {
        return Err(Error::param("m", "m and J must be at least 1"));
    }
    Ok(GridEvaluation {
        values: evaluate_coefficients(&unit_sequence(matrix, m), grid, path),
        m,
        grid,
    })
}

/// `Σ_t coeffs[t-1] e^{2πijt/J}` for every `j`.
pub fn evaluate_coefficients(coeffs: &[Complex64], grid: usize, path: EvalPath) -> Vec<Complex64> {
    match path {
        EvalPath::Dft => dft_eval(coeffs, grid),
        EvalPath::Direct => direct_eval(coeffs, grid),
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn run_fft(buf: &mut [Complex64], direction: FftDirection) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(buf.len(), direction));
    fft.process(buf);
}

fn dft_eval(coeffs: &[Complex64], grid: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    for (i, &c) in coeffs.iter().enumerate() {
        buf[(i + 1) % grid] += c;
    }
    // unnormalised inverse transform: X_j = Σ_k buf_k e^{+2πijk/J}
    run_fft(&mut buf, FftDirection::Inverse);
    buf
}

fn direct_eval(coeffs: &[Complex64], grid: usize) -> Vec<Complex64> {
    let roots: Vec<Complex64> = (0..grid)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / grid as f64))
        .collect();
    let g = grid as u64;
    (0..grid)
        .into_par_iter()
        .map(|j| {
            let j = j as u64;
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * roots[((j * (i as u64 + 1)) % g) as usize])
                .sum()
        })
        .collect()
}

/// `Σ_t coeffs[t-1] e^{itθ}` at an arbitrary angle.
pub fn evaluate_at(coeffs: &[Complex64], theta: f64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex64::from_polar(1.0, theta * (i + 1) as f64))
        .sum()
}

/// `S^A_{1,m}(e^{iθ})` by direct summation.
pub fn kernel_value(matrix: &SummationMatrix, m: usize, theta: f64) -> Complex64 {
    (1..=m)
        .map(|t| {
            let w = weight(matrix, m, t) / t as f64;
            Complex64::from_polar(w, theta * t as f64)
        })
        .sum()
}

fn unit_phase(numerator: i128, denominator: i128) -> Complex64 {
    // e^{2πi·numerator/denominator} with exact integer reduction
    let r = numerator.rem_euclid(denominator);
    Complex64::from_polar(1.0, TAU * r as f64 / denominator as f64)
}

/// Values at grid indices `start, start+1, …, start+count-1` of the `J`-point grid
/// (indices taken modulo `J`), via Bluestein's chirp-z transform.
pub fn evaluate_grid_window(
    coeffs: &[Complex64],
    grid: usize,
    start: i64,
    count: usize,
) -> Vec<Complex64> {
    if count == 0 {
        return Vec::new();
    }
    let n = coeffs.len() + 1; // includes t = 0 with zero coefficient
    let big_j = grid as i128;
    let two_j = 2 * big_j;
    // W^{d²/2} = e^{iπd²/J} = e^{2πi d² / (2J)}
    let chirp = |d: i128| unit_phase(d * d % two_j, two_j);

    let len = (n + count - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    for (i, &c) in coeffs.iter().enumerate() {
        let t = (i + 1) as i128;
        a[i + 1] = c * unit_phase(t * start as i128 % big_j, big_j) * chirp(t);
    }
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    for d in 0..count {
        b[d] = chirp(d as i128).conj();
    }
    for d in 1..n {
        b[len - d] = chirp(d as i128).conj();
    }
    run_fft(&mut a, FftDirection::Forward);
    run_fft(&mut b, FftDirection::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    run_fft(&mut a, FftDirection::Inverse);
    let scale = 1.0 / len as f64;
    (0..count)
        .map(|k| a[k] * scale * chirp(k as i128))
        .collect()
}

/// Exponential integral `E₁(C) = ∫_C^∞ e^{-x}/x dx`, by adaptive Simpson
/// quadrature after the substitution `x = C/u`.
pub fn exp_integral_e1(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param("C", format!("E1 needs a positive argument, got {c}")));
    }
    let f = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            (-c / u).exp() / u
        }
    };
    Ok(adaptive_simpson(&f, 0.0, 1.0, 1e-13, 60))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Main part of the almost-decreasing split for the Poisson matrix with `C = 1`:
/// `f_m(θ) = max{0, -ln|1 - e^{-1/m + iθ}|}`.
pub fn kernel_f(matrix: &SummationMatrix, m: usize, theta: f64) -> Result<f64> {
    if !matrix.is_unit_poisson() {
        return Err(Error::Unsupported("the f_m + beta kernel split"));
    }
    Ok(unit_poisson_f(m, theta))
}

pub(crate) fn unit_poisson_f(m: usize, theta: f64) -> f64 {
    let r = (-1.0 / m as f64).exp();
    let s = (0.5 * theta).sin();
    // |1 - r e^{iθ}|² = (1-r)² + 4r sin²(θ/2)
    let sq = (1.0 - r).powi(2) + 4.0 * r * s * s;
    (-0.5 * sq.ln()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelBound {
    /// `|S + ln(1 - r_m e^{iθ})| < E₁(C)`.
    LogRemainder,
    /// `|S - f_m(θ)| ≤ 11/5` (`C = 1`).
    AlmostDecreasing,
    /// `|S| ≥ (p+1)/2 · ln m - 1/2` for `|θ| ≤ m^{-(p+1/2)}` (`C = 1`).
    CentralFloor { p: u8 },
    /// `|S| ≥ -ln|1 - e^{-1/m+iθ}| - e^{-1}` for `|θ| ≤ π/3` (`C = 1`).
    LogFloor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: KernelBound,
    /// Number of angles at which the bound applied.
    pub samples: usize,
    /// Smallest `rhs - lhs` (upper bounds) or `lhs - rhs` (lower bounds).
    pub worst_margin: f64,
    pub worst_theta: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundReport {
    pub m: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub e1: f64,
    pub checks: Vec<BoundCheck>,
}

impl KernelBoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn get(&self, bound: KernelBound) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.bound == bound)
    }
}

struct Tracker {
    bound: KernelBound,
    samples: usize,
    worst_margin: f64,
    worst_theta: f64,
}

impl Tracker {
    fn new(bound: KernelBound) -> Self {
        Tracker {
            bound,
            samples: 0,
            worst_margin: f64::INFINITY,
            worst_theta: f64::NAN,
        }
    }

    fn record(&mut self, theta: f64, margin: f64) {
        self.samples += 1;
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_theta = theta;
        }
    }

    fn finish(self) -> BoundCheck {
        BoundCheck {
            bound: self.bound,
            samples: self.samples,
            worst_margin: self.worst_margin,
            worst_theta: self.worst_theta,
            satisfied: self.worst_margin >= -KERNEL_BOUND_TOL,
        }
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Checks the Poisson kernel inequalities at the sampled angles.
///
/// The central floors are additionally checked at `θ ∈ {0, ±m^{-(p+1/2)}}`.
pub fn check_kernel_bounds(
    matrix: &SummationMatrix,
    m: usize,
    thetas: &[f64],
) -> Result<KernelBoundReport> {
    matrix.validate()?;
    let SummationMatrix::TruncatedPoisson { c } = *matrix else {
        return Err(Error::Unsupported("kernel bound checks"));
    };
    if m == 0 {
        return Err(Error::param("m", "must be at least 1"));
    }
    let unit = matrix.is_unit_poisson();
    let e1 = exp_integral_e1(c)?;
    let r = (-c / m as f64).exp();
    let ln_m = (m as f64).ln();
    let coeffs = unit_sequence(matrix, m);

    let mut remainder = Tracker::new(KernelBound::LogRemainder);
    let mut split = Tracker::new(KernelBound::AlmostDecreasing);
    let mut floors = [
        Tracker::new(KernelBound::CentralFloor { p: 0 }),
        Tracker::new(KernelBound::CentralFloor { p: 1 }),
    ];
    let mut log_floor = Tracker::new(KernelBound::LogFloor);

    let mut angles: Vec<f64> = thetas.to_vec();
    if unit {
        for p in 0..2 {
            let w = (m as f64).powf(-(p as f64 + 0.5));
            angles.extend([0.0, w, -w]);
        }
    }

    for &theta in &angles {
        let s = evaluate_at(&coeffs, theta);
        let log_term = (Complex64::new(1.0, 0.0) - Complex64::from_polar(r, theta)).ln();
        remainder.record(theta, e1 - (s + log_term).norm());
        if !unit {
            continue;
        }
        let wrapped = wrap_angle(theta);
        let f = unit_poisson_f(m, theta);
        split.record(theta, BETA_SUP_BOUND - (s - f).norm());
        for (p, tracker) in floors.iter_mut().enumerate() {
            let width = (m as f64).powf(-(p as f64 + 0.5));
            if wrapped.abs() <= width {
                let floor = 0.5 * (p as f64 + 1.0) * ln_m - 0.5;
                tracker.record(theta, s.norm() - floor);
            }
        }
        if wrapped.abs() <= PI / 3.0 {
            let one_minus = Complex64::new(1.0, 0.0) - Complex64::from_polar(r, theta);
            let floor = -one_minus.norm().ln() - (-1f64).exp();
            log_floor.record(theta, s.norm() - floor);
        }
    }

    let mut checks = vec![remainder.finish()];
    if unit {
        checks.push(split.finish());
        checks.extend(floors.into_iter().map(Tracker::finish));
        checks.push(log_floor.finish());
    }
    Ok(KernelBoundReport { m, c, e1, checks })
}

/// `n` equally spaced angles covering `[-π, π]`.
pub fn theta_samples(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|k| -PI + TAU * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        let d = SummationMatrix::Dirichlet;
        assert_eq!(weight(&d, 5, 3), 1.0);
        assert_eq!(weight(&d, 5, 6), 0.0);
        let p = SummationMatrix::poisson();
        assert!((weight(&p, 1, 1) - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(weight(&p, 4, 5), 0.0);
    }

    #[test]
    fn kernel_at_one_values() {
        let d = SummationMatrix::Dirichlet;
        assert_eq!(kernel_at_one(&d, 1), 1.0);
        assert!((kernel_at_one(&d, 4) - 25.0 / 12.0).abs() < 1e-15);
        let p = SummationMatrix::poisson();
        let expected = (-0.5f64).exp() + (-1f64).exp() / 2.0;
        assert!((kernel_at_one(&p, 2) - expected).abs() < 1e-15);
        assert!((expected - 0.790_47).abs() < 1e-5);
    }

    #[test]
    fn matrix_axioms() {
        for matrix in [SummationMatrix::Dirichlet, SummationMatrix::poisson()] {
            let ms: Vec<usize> = (1..=200).chain([500, 1000, 4999, 10_000]).collect();
            for &m in &ms {
                let a1 = weight(&matrix, m, 1);
                assert!(a1 > 0.0 && a1 <= 1.0);
                for t in 1..=m {
                    let a = weight(&matrix, m, t);
                    assert!(a >= 0.0);
                    assert!(weight(&matrix, m, t + 1) <= a);
                    // non-decreasing in m
                    assert!(weight(&matrix, m + 1, t) >= a);
                }
                assert_eq!(weight(&matrix, m, m + 1), 0.0);
            }
            assert!(1.0 - weight(&matrix, 1_000_000, 3) < 1e-5);
        }
    }

    #[test]
    fn zero_signal_gives_zero_grid() {
        let zeros = vec![Complex64::new(0.0, 0.0); 10];
        for path in [EvalPath::Dft, EvalPath::Direct] {
            let g = evaluate_grid(&zeros, &SummationMatrix::poisson(), 10, 16, path).unwrap();
            assert!(g.values.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn two_term_dirichlet_value() {
        for path in [EvalPath::Dft, EvalPath::Direct] {
            let g = kernel_grid(&SummationMatrix::Dirichlet, 2, 4, path).unwrap();
            assert!((g.values[1] - Complex64::new(-0.5, 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn short_signal_is_rejected() {
        let s = vec![Complex64::new(1.0, 0.0); 3];
        let err = evaluate_grid(&s, &SummationMatrix::Dirichlet, 4, 8, EvalPath::Dft).unwrap_err();
        assert!(matches!(err, Error::InputLength { needed: 4, got: 3 }));
    }

    #[test]
    fn dft_matches_direct_for_poisson_kernel() {
        let p = SummationMatrix::poisson();
        let a = kernel_grid(&p, 64, 512, EvalPath::Dft).unwrap();
        let b = kernel_grid(&p, 64, 512, EvalPath::Direct).unwrap();
        let scale = b.sup_norm();
        let err = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err / scale <= 1e-10, "{err}");
    }

    #[test]
    fn dft_folds_when_m_exceeds_grid() {
        let p = SummationMatrix::poisson();
        let a = kernel_grid(&p, 40, 7, EvalPath::Dft).unwrap();
        let b = kernel_grid(&p, 40, 7, EvalPath::Direct).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_at_one_is_grid_value_at_zero_and_sup() {
        for matrix in [SummationMatrix::Dirichlet, SummationMatrix::poisson()] {
            for m in [1, 7, 100, 333] {
                let g = kernel_grid(&matrix, m, 4 * m + 3, EvalPath::Dft).unwrap();
                let k = kernel_at_one(&matrix, m);
                assert!((g.values[0].re - k).abs() < 1e-12 && g.values[0].im.abs() < 1e-12);
                assert!(g.sup_norm() <= k + 1e-10);
            }
        }
    }

    #[test]
    fn window_matches_full_grid() {
        let coeffs: Vec<Complex64> = (1..=50)
            .map(|t| Complex64::new((t as f64).sin(), (t as f64 * 0.3).cos()) / t as f64)
            .collect();
        let grid = 997;
        let full = evaluate_coefficients(&coeffs, grid, EvalPath::Direct);
        for (start, count) in [(0i64, 10usize), (990, 20), (-5, 11), (400, 1), (3, 997)] {
            let w = evaluate_grid_window(&coeffs, grid, start, count);
            for (k, v) in w.iter().enumerate() {
                let j = (start + k as i64).rem_euclid(grid as i64) as usize;
                assert!((v - full[j]).norm() < 1e-12, "start {start} k {k}");
            }
        }
    }

    #[test]
    fn kernel_f_examples() {
        let p = SummationMatrix::poisson();
        assert_eq!(kernel_f(&p, 1, PI).unwrap(), 0.0);
        assert!((kernel_f(&p, 1, 0.0).unwrap() - 0.458_675).abs() < 1e-6);
        let oracle = -(1.0 - (-0.01f64).exp()).ln();
        assert!((kernel_f(&p, 100, 0.0).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 4.610_17).abs() < 1e-5);
        assert!(matches!(
            kernel_f(&SummationMatrix::Dirichlet, 10, 0.0),
            Err(Error::Unsupported(_))
        ));
        assert!(kernel_f(&SummationMatrix::TruncatedPoisson { c: 2.0 }, 10, 0.0).is_err());
    }

    #[test]
    fn kernel_f_is_even_periodic_and_monotone() {
        let p = SummationMatrix::poisson();
        for m in [1, 10, 1000] {
            let mut prev = f64::INFINITY;
            for k in 0..=1000 {
                let th = PI * k as f64 / 1000.0;
                let f = kernel_f(&p, m, th).unwrap();
                assert!(f >= 0.0 && f <= prev + 1e-15);
                assert!((f - kernel_f(&p, m, -th).unwrap()).abs() < 1e-12);
                assert!((f - kernel_f(&p, m, th + TAU).unwrap()).abs() < 1e-9);
                prev = f;
            }
        }
    }

    #[test]
    fn e1_against_power_series() {
        // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
        let series = |x: f64| {
            let gamma = 0.577_215_664_901_532_9;
            let mut term = 1.0;
            let mut sum = 0.0;
            for k in 1..60 {
                term *= -x / k as f64;
                sum += term / k as f64;
            }
            -gamma - x.ln() - sum
        };
        for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let q = exp_integral_e1(x).unwrap();
            assert!((q - series(x)).abs() < 1e-10, "x={x}: {q} vs {}", series(x));
        }
        assert!((exp_integral_e1(1.0).unwrap() - 0.219_384).abs() < 1e-6);
        assert!(exp_integral_e1(0.0).is_err());
    }

    #[test]
    fn central_floor_example() {
        // m = 100, p = 0, θ = 1/√m = 0.1
        let p = SummationMatrix::poisson();
        let s = kernel_value(&p, 100, 0.1).norm();
        let floor = 0.5 * 100f64.ln() - 0.5;
        assert!((floor - 1.802_585).abs() < 1e-6);
        assert!(s >= floor, "{s}");
    }

    #[test]
    fn bounds_hold_on_grid_m10() {
        let report =
            check_kernel_bounds(&SummationMatrix::poisson(), 10, &theta_samples(1000)).unwrap();
        assert!(report.all_satisfied(), "{report:?}");
        assert_eq!(report.checks.len(), 5);
        let split = report.get(KernelBound::AlmostDecreasing).unwrap();
        assert_eq!(split.samples, 1006);
    }

    #[test]
    fn bounds_for_other_poisson_constants() {
        let report = check_kernel_bounds(
            &SummationMatrix::TruncatedPoisson { c: 2.5 },
            50,
            &theta_samples(200),
        )
        .unwrap();
        assert_eq!(report.checks.len(), 1);
        assert!(report.all_satisfied());
        assert!(matches!(
            check_kernel_bounds(&SummationMatrix::Dirichlet, 10, &[0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn matrix_json() {
        let m: SummationMatrix = serde_json::from_str(r#"{"scheme":"poisson","C":2.0}"#).unwrap();
        assert_eq!(m, SummationMatrix::TruncatedPoisson { c: 2.0 });
        let m: SummationMatrix = serde_json::from_str(r#"{"scheme":"poisson"}"#).unwrap();
        assert!(m.is_unit_poisson());
        let m: SummationMatrix = serde_json::from_str(r#"{"scheme":"dirichlet"}"#).unwrap();
        assert_eq!(m, SummationMatrix::Dirichlet);
    }
}

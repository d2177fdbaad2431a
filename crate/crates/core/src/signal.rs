//! Signal model, noise generators and synthesis.
//!
//! Samples are indexed `t = 1..=m`; `samples[0]` holds `x(1)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Pareto, StudentT};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::complex_serde;
use crate::error::{Error, Result};

/// Deterministic part `y(t) = Σ αₙ e^{-iλₙt}` of the signal.
///
/// Equivalently the point measure `μ = Σ αₙ δ(z - e^{iλₙ})` on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct SignalModel {
    frequencies: Vec<f64>,
    #[serde(with = "complex_serde::vec")]
    amplitudes: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawModel {
    frequencies: Vec<f64>,
    #[serde(with = "complex_serde::vec")]
    amplitudes: Vec<Complex64>,
}

impl TryFrom<RawModel> for SignalModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        SignalModel::new(raw.frequencies, raw.amplitudes)
    }
}

impl SignalModel {
    pub fn new(frequencies: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != amplitudes.len() {
            return Err(Error::param(
                "amplitudes",
                format!(
                    "{} frequencies but {} amplitudes",
                    frequencies.len(),
                    amplitudes.len()
                ),
            ));
        }
        for &lambda in &frequencies {
            if !(-PI..PI).contains(&lambda) {
                return Err(Error::param(
                    "frequencies",
                    format!("{lambda} is outside [-pi, pi)"),
                ));
            }
        }
        for (i, a) in frequencies.iter().enumerate() {
            if frequencies[i + 1..].contains(a) {
                return Err(Error::param(
                    "frequencies",
                    format!("{a} appears more than once"),
                ));
            }
        }
        if let Some(a) = amplitudes.iter().find(|a| !(a.norm() > 0.0)) {
            return Err(Error::param(
                "amplitudes",
                format!("amplitude {a} has zero modulus"),
            ));
        }
        Ok(SignalModel {
            frequencies,
            amplitudes,
        })
    }

    /// The model with no periodicities (`N = 0`).
    pub fn empty() -> Self {
        SignalModel {
            frequencies: Vec::new(),
            amplitudes: Vec::new(),
        }
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Number of periodicities `N`.
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Total variation `‖μ‖ = Σ |αₙ|`.
    pub fn total_variation(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).sum()
    }

    /// Points `zₙ = e^{iλₙ}` of `supp μ`.
    pub fn support_points(&self) -> Vec<Complex64> {
        self.frequencies
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l))
            .collect()
    }

    /// Deterministic part `y(t)` for a single `t ≥ 1`.
    pub fn value_at(&self, t: usize) -> Complex64 {
        let t = t as f64;
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .map(|(&l, &a)| a * Complex64::from_polar(1.0, -l * t))
            .sum()
    }

    /// Multiplies every amplitude by `e^{iψ}`.
    pub fn rotated(&self, psi: f64) -> Self {
        let rot = Complex64::from_polar(1.0, psi);
        SignalModel {
            frequencies: self.frequencies.clone(),
            amplitudes: self.amplitudes.iter().map(|a| rot * a).collect(),
        }
    }
}

/// Noise distribution family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum NoiseFamily {
    None,
    /// `e^{-iφ}(b₁ g₁ + i b₂ g₂)` with independent standard normals; real and
    /// imaginary parts of `e^{iφ}ε` are subgaussian with factors `b₁ ≥ b₂`.
    ComplexGaussian {
        b1: f64,
        #[serde(default)]
        b2: Option<f64>,
        #[serde(default)]
        phi: f64,
    },
    /// Independent real and imaginary parts, each `scale · T(dof)`.
    StudentT {
        dof: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Pareto modulus with `P(|ε| > x) = x^{-a}` for `x ≥ 1`, uniform phase.
    SymmetricPareto { a: f64 },
    /// `σ · t^{ν/2} · g` with `g` standard complex Gaussian (`E|g|² = 1`).
    GrowingVariance {
        nu: f64,
        #[serde(default = "one")]
        sigma: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub family: NoiseFamily,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec {
            family: NoiseFamily::None,
            seed: 0,
        }
    }

    pub fn new(family: NoiseFamily, seed: u64) -> Self {
        NoiseSpec { family, seed }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        NoiseSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            NoiseFamily::None => Ok(()),
            NoiseFamily::ComplexGaussian { b1, b2, phi } => {
                let b2 = b2.unwrap_or(b1);
                if !(b1 > 0.0 && b1.is_finite()) {
                    return Err(Error::param("b1", format!("must be positive, got {b1}")));
                }
                if !(0.0..=b1).contains(&b2) {
                    return Err(Error::param("b2", format!("need b1 >= b2 >= 0, got {b2}")));
                }
                if !phi.is_finite() {
                    return Err(Error::param("phi", "must be finite"));
                }
                Ok(())
            }
            NoiseFamily::StudentT { dof, scale } => {
                if !(dof > 1.0) {
                    return Err(Error::param("dof", format!("must exceed 1, got {dof}")));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::param("scale", format!("must be positive, got {scale}")));
                }
                Ok(())
            }
            NoiseFamily::SymmetricPareto { a } => {
                if !(a > 1.0 && a.is_finite()) {
                    return Err(Error::param("a", format!("tail index must exceed 1, got {a}")));
                }
                Ok(())
            }
            NoiseFamily::GrowingVariance { nu, sigma } => {
                if !(nu < 1.0) || !nu.is_finite() {
                    return Err(Error::param("nu", format!("must be below 1, got {nu}")));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
                }
                Ok(())
            }
        }
    }
}

/// `x(1..=m)` with optional record of how it was generated.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<Complex64>,
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: SignalModel,
    pub noise: NoiseSpec,
}

impl SampledSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("samples", "a signal needs at least one sample"));
        }
        Ok(SampledSignal {
            samples,
            provenance: None,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `x(t)` for `1 ≤ t ≤ m`.
    pub fn at(&self, t: usize) -> Complex64 {
        self.samples[t - 1]
    }

    /// Applies `x(t) ↦ g(t, x(t))` to every sample, dropping provenance.
    pub fn map(&self, mut g: impl FnMut(usize, Complex64) -> Complex64) -> SampledSignal {
        SampledSignal {
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(i, &x)| g(i + 1, x))
                .collect(),
            provenance: None,
        }
    }
}

/// Draws `ε₁..ε_m` for the given spec. Identical specs give bit-identical draws,
/// and the draws for `m` are a prefix of those for any larger `m`.
pub fn draw_noise(noise: &NoiseSpec, m: usize) -> Result<Vec<Complex64>> {
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let out = match noise.family {
        NoiseFamily::None => vec![Complex64::new(0.0, 0.0); m],
        NoiseFamily::ComplexGaussian { b1, b2, phi } => {
            let b2 = b2.unwrap_or(b1);
            let rot = Complex64::from_polar(1.0, -phi);
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            (0..m)
                .map(|_| {
                    let g1 = normal.sample(&mut rng);
                    let g2 = normal.sample(&mut rng);
                    rot * Complex64::new(b1 * g1, b2 * g2)
                })
                .collect()
        }
        NoiseFamily::StudentT { dof, scale } => {
            let dist = StudentT::new(dof).map_err(|e| Error::param("dof", e.to_string()))?;
            (0..m)
                .map(|_| {
                    let re = dist.sample(&mut rng);
                    let im = dist.sample(&mut rng);
                    Complex64::new(scale * re, scale * im)
                })
                .collect()
        }
        NoiseFamily::SymmetricPareto { a } => {
            let dist = Pareto::new(1.0, a).map_err(|e| Error::param("a", e.to_string()))?;
            (0..m)
                .map(|_| {
                    let r: f64 = dist.sample(&mut rng);
                    let phase = rng.random_range(-PI..PI);
                    Complex64::from_polar(r, phase)
                })
                .collect()
        }
        NoiseFamily::GrowingVariance { nu, sigma } => {
            let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("normal");
            (1..=m)
                .map(|t| {
                    let g = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
                    g * (sigma * (t as f64).powf(nu / 2.0))
                })
                .collect()
        }
    };
    Ok(out)
}

/// `x(t) = Σ αₙ e^{-iλₙt} + εₜ` for `t = 1..=m`.
pub fn synthesize(model: &SignalModel, noise: &NoiseSpec, m: usize) -> Result<SampledSignal> {
    if m == 0 {
        return Err(Error::param("m", "need at least one sample"));
    }
    let eps = draw_noise(noise, m)?;
    let samples = eps
        .into_iter()
        .enumerate()
        .map(|(i, e)| model.value_at(i + 1) + e)
        .collect();
    Ok(SampledSignal {
        samples,
        provenance: Some(Provenance {
            model: model.clone(),
            noise: *noise,
        }),
    })
}

/// Maps a power-decaying model `Σ αₙ e^{-iλₙt} / t^ξ + εₜ` to the stationary
/// form by `x(t) ↦ t^ξ x(t)`. Requires `0 ≤ ξ < 1/2`, so that i.i.d. finite
/// variance noise becomes noise with `E|t^ξ εₜ|² = O(t^{2ξ})`, `2ξ < 1`.
pub fn rescale_decaying(signal: &SampledSignal, xi: f64) -> Result<SampledSignal> {
    if !(0.0..0.5).contains(&xi) {
        return Err(Error::param("xi", format!("must lie in [0, 1/2), got {xi}")));
    }
    if xi == 0.0 {
        return Ok(signal.clone());
    }
    Ok(signal.map(|t, x| x * (t as f64).powf(xi)))
}

/// Per-trial seed derived from a master seed and a stream index (SplitMix64 finaliser).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

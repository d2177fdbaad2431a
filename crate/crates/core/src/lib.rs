//! Recovery of periodicities hidden in heavy-tailed noise.
//!
//! A signal `x(t) = Σ αₙ e^{-iλₙt} + εₜ`, `t = 1..m`, is summarised by the
//! windowed anti-derivative of its Z-transform,
//!
//! ```text
//! S(e^{iθ}) = Σ_{t=1}^{m} (a_{m,t} / t) · x(t) · e^{itθ},
//! ```
//!
//! evaluated on a uniform grid of `J` points. Frequencies show up as
//! logarithmic peaks of `|S|`; noise only contributes a bounded random
//! Fourier series even when `εₜ` has infinite variance. The estimator keeps
//! maximal superlevel arcs at a detection level `h` that also reach a higher
//! confirmation level `h'`: their count estimates `N`, their midpoints the
//! frequencies, and the normalised peak values the amplitudes.
//!
//! Module map:
//!
//! - [`signal`]: signal model, noise families, synthesis, decay rescaling.
//! - [`kernels`]: summation matrices, grid evaluation, kernel bounds.
//! - [`schedule`]: threshold/grid schedules `(H, h, h', J)` and their validation.
//! - [`arcs`]: superlevel arcs, the two-threshold family, Pompeiu–Hausdorff distance.
//! - [`estimate`]: the full estimator (single-grid and two-stage).
//! - [`bounds`]: subgaussian tail bounds and localization failure bounds.
//! - [`sweep`]: seeded Monte-Carlo consistency sweeps.
//! - [`io`]: CSV/JSON file formats shared by the `periodik` binary.

pub mod arcs;
pub mod bounds;
pub mod cli;
mod complex_serde;
pub mod error;
pub mod estimate;
pub mod io;
pub mod kernels;
pub mod schedule;
pub mod signal;
pub mod sweep;

pub use num_complex::Complex64;

pub use arcs::{
    hausdorff_distance, localization_set, superlevel_arcs, two_threshold_family, ArcFamily,
    CircleSet, DiscreteArc, ModelOrder,
};
pub use error::{Error, Result};
pub use estimate::{estimate, estimate_two_stage, EstimateOptions, EstimationReport, ZRule};
pub use kernels::{evaluate_grid, kernel_at_one, EvalPath, GridEvaluation, SummationMatrix};
pub use schedule::{ScheduleMode, ScheduleValues, ThresholdSchedule};
pub use signal::{NoiseFamily, NoiseSpec, SampledSignal, SignalModel};

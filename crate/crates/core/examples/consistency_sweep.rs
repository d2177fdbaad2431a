//! A small Monte-Carlo sweep; writes the per-m summary as CSV to stdout.

use num_complex::Complex64;
use periodik::estimate::ZRule;
use periodik::schedule::{ScheduleMode, ThresholdSchedule};
use periodik::signal::{NoiseFamily, NoiseSpec, SignalModel};
use periodik::sweep::{consistency_sweep, SweepPlan};

fn main() -> periodik::Result<()> {
    let model = SignalModel::new(
        vec![0.0, std::f64::consts::FRAC_PI_2],
        vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.5)],
    )?;
    let noise = NoiseSpec::new(NoiseFamily::GrowingVariance { nu: 0.4, sigma: 1.0 }, 11);
    let mut plan = SweepPlan::new(model, noise, vec![250, 500, 1000, 2000], 40);
    plan.schedule = ThresholdSchedule::poisson_with(0.5, [1.0, 2.0, 3.0, 3.0], ScheduleMode::Detect)?;
    plan.z_rule = ZRule::Maximizer;
    let report = consistency_sweep(&plan)?;
    report.write_summaries(std::io::stdout().lock())
}

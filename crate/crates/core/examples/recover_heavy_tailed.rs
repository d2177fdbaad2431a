//! One heavy-tailed recovery: infinite-variance Pareto noise.

use num_complex::Complex64;
use periodik::estimate::{estimate_two_stage, EstimateOptions, ZRule};
use periodik::kernels::SummationMatrix;
use periodik::schedule::{ScheduleMode, ThresholdSchedule};
use periodik::signal::{synthesize, NoiseFamily, NoiseSpec, SignalModel};

fn main() -> periodik::Result<()> {
    let model = SignalModel::new(
        vec![-1.2, 0.9],
        vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.5)],
    )?;
    let noise = NoiseSpec::new(NoiseFamily::SymmetricPareto { a: 1.5 }, 3);
    let poisson = SummationMatrix::poisson();
    let schedule = ThresholdSchedule::poisson_with(0.5, [1.0, 2.0, 3.0, 3.0], ScheduleMode::Detect)?;
    let options = EstimateOptions::new().with_z_rule(ZRule::Maximizer);
    for m in [1000, 4000, 16_000] {
        let signal = synthesize(&model, &noise, m)?;
        match estimate_two_stage(&signal, &poisson, &schedule, m, &options) {
            Ok(report) => {
                println!("m = {m}: N_hat = {}", report.n_hat);
                for c in &report.components {
                    let a = c.alpha_hat.unwrap_or_default();
                    println!("    lambda_hat = {:>8.5}  alpha_hat = {:.3}{:+.3}i", c.frequency(), a.re, a.im);
                }
            }
            Err(e) => println!("m = {m}: {e}"),
        }
    }
    Ok(())
}

//! Recovers a noiseless two-tone signal as m grows, with both z rules.

use num_complex::Complex64;
use periodik::estimate::{estimate, EstimateOptions, ZRule};
use periodik::kernels::SummationMatrix;
use periodik::schedule::{ScheduleMode, ThresholdSchedule};
use periodik::signal::{synthesize, NoiseSpec, SignalModel};

fn main() -> periodik::Result<()> {
    let model = SignalModel::new(
        vec![0.0, std::f64::consts::FRAC_PI_2],
        vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.5)],
    )?;
    let poisson = SummationMatrix::poisson();
    let schedule = ThresholdSchedule::poisson_with(0.5, [1.0, 2.0, 2.0, 3.0], ScheduleMode::Estimate)?;
    for m in [200, 800, 3200] {
        let signal = synthesize(&model, &NoiseSpec::none(), m)?;
        let report = estimate(&signal, &poisson, &schedule, m, &EstimateOptions::new())?;
        let peaks = estimate(
            &signal,
            &poisson,
            &schedule,
            m,
            &EstimateOptions::new().with_z_rule(ZRule::Maximizer),
        )?;
        println!("m = {m} (J = {}): N_hat = {}", report.diagnostics.grid, report.n_hat);
        for (c, p) in report.components.iter().zip(&peaks.components) {
            let a = c.alpha_hat.unwrap_or_default();
            println!(
                "    lambda_hat = {:>8.5} (midpoint) {:>8.5} (maximizer)  alpha_hat = {:.4}{:+.4}i",
                c.frequency(),
                p.frequency(),
                a.re,
                a.im
            );
        }
    }
    Ok(())
}

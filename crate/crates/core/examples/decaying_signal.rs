//! Amplitudes decaying like t^{-xi}: rescale by t^{xi} before estimating.

use num_complex::Complex64;
use periodik::estimate::{estimate, EstimateOptions, ZRule};
use periodik::kernels::SummationMatrix;
use periodik::schedule::{ScheduleMode, ThresholdSchedule};
use periodik::signal::{rescale_decaying, SampledSignal};

fn main() -> periodik::Result<()> {
    let m = 1000;
    let xi = 0.3;
    let (lambda, alpha) = (1.1, Complex64::new(2.0, -1.0));
    let observed = SampledSignal::new(
        (1..=m)
            .map(|t| alpha * Complex64::from_polar((t as f64).powf(-xi), -lambda * t as f64))
            .collect(),
    )?;
    let poisson = SummationMatrix::poisson();
    let schedule = ThresholdSchedule::poisson_standard(ScheduleMode::Estimate);
    let options = EstimateOptions::new().with_z_rule(ZRule::Maximizer);

    for (name, signal) in [("raw", observed.clone()), ("rescaled", rescale_decaying(&observed, xi)?)] {
        match estimate(&signal, &poisson, &schedule, m, &options) {
            Ok(r) => {
                let c = &r.components[0];
                println!(
                    "{name:>8}: N_hat = {}, lambda_hat = {:.5}, alpha_hat = {:.3}",
                    r.n_hat,
                    c.frequency(),
                    c.alpha_hat.unwrap_or_default()
                );
            }
            Err(e) => println!("{name:>8}: {e}"),
        }
    }
    println!("   truth: lambda = {lambda}, alpha = {alpha}");
    Ok(())
}

//! Subgaussian tail bounds against Monte-Carlo rates.

use num_complex::Complex64;
use periodik::bounds::{
    empirical_sup_tail, localization_failure_bounds, subgaussian_poly_tail_bound, LevelChoice,
};
use periodik::kernels::SummationMatrix;
use periodik::schedule::{ScheduleMode, ThresholdSchedule};
use periodik::signal::{NoiseFamily, NoiseSpec, SignalModel};

fn main() -> periodik::Result<()> {
    for c in [4.0, 6.0, 8.0] {
        println!("poly bound r = 1, n = 8, C = {c}: {:.4e}", subgaussian_poly_tail_bound(1.0, 8, c)?);
    }

    let poisson = SummationMatrix::poisson();
    let noise = NoiseSpec::new(NoiseFamily::ComplexGaussian { b1: 1.0, b2: None, phi: 0.0 }, 1);
    for row in empirical_sup_tail(&noise, &poisson, 256, &[6.0, 8.0, 10.0, 12.0], 500)? {
        println!(
            "P(sup |S_eps| >= {:>4}) empirical {:.3} [{:.3}, {:.3}]  bound {:.4}",
            row.c, row.empirical.rate, row.empirical.ci95.0, row.empirical.ci95.1, row.bound.value
        );
    }

    // the localization bounds only become informative at very large m
    let model = SignalModel::new(vec![0.0, 2.0], vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.5)])?;
    let schedules = [
        ThresholdSchedule::poisson_standard(ScheduleMode::Estimate),
        ThresholdSchedule::poisson_corollary(0.1)?,
    ];
    for schedule in &schedules {
        println!("{}:", schedule.name());
        for m in [10_000, 1_000_000, 100_000_000] {
            let t = localization_failure_bounds(&model, &poisson, schedule, m, 1.0, 0, LevelChoice::Detection)?;
            let (miss, spurious) = t.probabilities(&poisson, 1.0)?;
            println!(
                "    m = {m:>9}: miss threshold {:>7.3} (P <= {:.3}), spurious threshold {:>7.3} (P <= {:.3})",
                t.miss_threshold, miss.value, t.spurious_threshold, spurious.value
            );
        }
    }
    Ok(())
}

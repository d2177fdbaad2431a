//! Tabulates the threshold schedules and validates the defaults.

use periodik::kernels::SummationMatrix;
use periodik::schedule::{validate_schedule, ScheduleMode, ThresholdSchedule};

fn main() -> periodik::Result<()> {
    let schedules = [
        (ThresholdSchedule::dirichlet_example(), SummationMatrix::Dirichlet),
        (ThresholdSchedule::poisson_standard(ScheduleMode::Detect), SummationMatrix::poisson()),
        (ThresholdSchedule::poisson_standard(ScheduleMode::Estimate), SummationMatrix::poisson()),
        (ThresholdSchedule::poisson_corollary(0.25)?, SummationMatrix::poisson()),
    ];
    for (schedule, matrix) in &schedules {
        println!("{}", schedule.name());
        for m in [10, 100, 1000, 10_000] {
            let v = schedule.at(m)?;
            println!(
                "    m = {m:>5}: H = {:>7.4}  h = {:>7.4}  h' = {:>7.4}  J = {}",
                v.big_h, v.h, v.h_prime, v.grid
            );
        }
        let check = validate_schedule(schedule, matrix, (3, 300), 128)?;
        println!(
            "    validation over m in [3, 300]: {} (worst grid margin {:.4})",
            if check.passed() { "passed" } else { "failed" },
            check.worst_grid_margin
        );
    }
    Ok(())
}

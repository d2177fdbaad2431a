//! Evaluates the Poisson kernel and checks its inequalities.

use periodik::kernels::{
    check_kernel_bounds, kernel_at_one, kernel_f, kernel_grid, theta_samples, EvalPath,
    SummationMatrix, BETA_SUP_BOUND,
};

fn main() -> periodik::Result<()> {
    let poisson = SummationMatrix::poisson();
    for m in [10, 100, 1000, 10_000] {
        let report = check_kernel_bounds(&poisson, m, &theta_samples(1000))?;
        println!("m = {m:>5}: S(1) = {:.5}, f_m(0) = {:.5}", kernel_at_one(&poisson, m), kernel_f(&poisson, m, 0.0)?);
        for check in &report.checks {
            println!(
                "    {:<28} margin {:>10.3e}  {}",
                format!("{:?}", check.bound),
                check.worst_margin,
                if check.satisfied { "ok" } else { "VIOLATED" }
            );
        }
    }

    let m = 200;
    let eval = kernel_grid(&poisson, m, 16, EvalPath::Dft)?;
    println!("|S| on a 16-point grid at m = {m} (the split bound is {BETA_SUP_BOUND}):");
    for (j, v) in eval.values.iter().enumerate() {
        println!("    theta = {:>6.3}  |S| = {:.4}", eval.theta(j), v.norm());
    }
    Ok(())
}

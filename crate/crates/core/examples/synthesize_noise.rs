//! Draws every noise family and prints simple summary statistics.

use num_complex::Complex64;
use periodik::signal::{draw_noise, NoiseFamily, NoiseSpec};

fn main() -> periodik::Result<()> {
    let families = [
        ("complex-gaussian", NoiseFamily::ComplexGaussian { b1: 1.0, b2: Some(0.5), phi: 0.3 }),
        ("student-t", NoiseFamily::StudentT { dof: 3.0, scale: 1.0 }),
        ("symmetric-pareto", NoiseFamily::SymmetricPareto { a: 1.5 }),
        ("growing-variance", NoiseFamily::GrowingVariance { nu: 0.4, sigma: 1.0 }),
    ];
    let n = 100_000;
    for (name, family) in families {
        let eps = draw_noise(&NoiseSpec::new(family, 42), n)?;
        let mean: Complex64 = eps.iter().sum::<Complex64>() / n as f64;
        let mut moduli: Vec<f64> = eps.iter().map(|e| e.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        println!(
            "{name:>17}: |mean| = {:.4}, median |e| = {:.4}, max |e| = {:.1}",
            mean.norm(),
            moduli[n / 2],
            moduli[n - 1]
        );
    }
    // the Pareto median has the closed form 2^{1/a}
    println!("pareto median, closed form: {:.4}", 2f64.powf(1.0 / 1.5));
    Ok(())
}

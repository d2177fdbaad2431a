//! Chordal Hausdorff distances between arcs and point sets.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use periodik::arcs::{hausdorff_distance, CircleSet};

fn main() -> periodik::Result<()> {
    let quarter = CircleSet::from_arcs(&[(0.0, FRAC_PI_2)])?;
    let cases = [
        ("quarter arc vs its midpoint", quarter.clone(), CircleSet::from_points(&[FRAC_PI_4])),
        ("antipodal points", CircleSet::from_points(&[0.0]), CircleSet::from_points(&[PI])),
        ("full circle vs one point", CircleSet::from_arcs(&[(0.0, 2.0 * PI)])?, CircleSet::from_points(&[1.0])),
        ("arc across zero vs its ends", CircleSet::from_arcs(&[(-0.2, 0.2)])?, CircleSet::from_points(&[-0.2, 0.2])),
        ("quarter arc vs itself", quarter.clone(), quarter),
    ];
    for (name, a, b) in cases {
        println!("{name:<28} {:.6}", hausdorff_distance(&a, &b));
    }
    Ok(())
}

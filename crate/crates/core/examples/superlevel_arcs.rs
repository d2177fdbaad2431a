//! Superlevel arcs, the two-threshold family and cyclic wrap-around.

use periodik::arcs::{superlevel_arcs, two_threshold_family};

fn main() -> periodik::Result<()> {
    let mags = [5.0, 1.0, 6.0, 7.0, 1.0, 1.0, 5.0, 1.0];
    for arc in &superlevel_arcs(&mags, 4.0).arcs {
        println!("h = 4: arc [{}, {}] on J = {}", arc.j1, arc.j2, arc.grid);
    }
    let (family, order) = two_threshold_family(&mags, 4.0, 6.5)?;
    println!("h = 4, h' = 6.5: {} arc(s), order {:?}", family.len(), order);

    // indices 7 and 0 form a single arc across theta = 0
    let wrap = [3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0];
    let arc = superlevel_arcs(&wrap, 1.0).arcs[0];
    println!("wrapping arc: j1 = {}, j2 = {}, indices {:?}", arc.j1, arc.j2, arc.indices().collect::<Vec<_>>());

    let (_, full) = two_threshold_family(&[2.0; 6], 1.0, 1.5)?;
    println!("flat magnitudes above h: {full:?}");
    Ok(())
}

//! Exact heat evolution, the semigroup property and self-similar rescaling.
//!
//! Run with `cargo run --example heat_semigroup`.

use heatflow::{evolve, evolve_self_similar, integrate, make_gaussian, DiffusionCoefficient, Grid, GridFunction};

fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> heatflow::Result<()> {
    let grid = Grid::default();
    let alpha = DiffusionCoefficient::new(1.0)?;
    let m1 = make_gaussian(&grid, 1.0, 0.0)?;

    let m3 = evolve(&m1, alpha, 1.0)?;
    println!("variance after t = 1: {:.10}", m3.variance());
    println!("sup |evolve(M1, 1) - M3|: {:.2e}", sup_diff(&m3, &make_gaussian(&grid, 3.0, 0.0)?));

    let two_step = evolve(&evolve(&m1, alpha, 0.3)?, alpha, 0.7)?;
    println!("semigroup defect: {:.2e}", sup_diff(&two_step, &m3));

    // A box of unit mass approaches the unit Gaussian in self-similar variables.
    let box1 = GridFunction::from_fn(grid, |x| if x.abs() <= 1.0 { 0.5 } else { 0.0 })?.normalized()?;
    for t in [1.0, 10.0, 200.0] {
        let u = evolve_self_similar(&box1, alpha, t)?;
        println!("t = {t:>5}: mass {:.12}, sup distance to M1 {:.3e}", integrate(&u), sup_diff(&u, &m1));
    }
    Ok(())
}

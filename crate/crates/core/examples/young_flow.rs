//! Young functional along the two-speed heat flow with the optimal pair.
//!
//! Run with `cargo run --release --example young_flow`.

use heatflow::verify::{random_density, young_flow_check, DensityFamily, FlowOptions};
use heatflow::{make_gaussian, optimal_diffusion, sharp_young_constant, Grid, TimeGrid, YoungTriple};

fn main() -> heatflow::Result<()> {
    let grid = Grid::default();
    let triple = YoungTriple::new(4.0 / 3.0, 4.0 / 3.0)?;
    let pair = optimal_diffusion(&triple);
    let u = make_gaussian(&grid, 0.5, -2.0)?.add(&make_gaussian(&grid, 0.5, 2.0)?)?.normalized()?;
    let v = random_density(21, DensityFamily::Skewed);

    let check = young_flow_check(&u, &v, &triple, &pair, &TimeGrid::default(), &FlowOptions::default())?;
    let tr = &check.trace;
    let (first, last) = (tr.values[0], tr.values[tr.len() - 1]);
    println!("psi(t_min) = {first:.10}");
    println!("psi(t_max) = {last:.10}");
    println!("sharp constant = {:.10}", sharp_young_constant(&triple, 1));
    if let Some(limit) = &check.limit {
        println!(
            "rescaled limit / masses = {:.9}, exponent = {}",
            limit.normalized_limit,
            limit.exponent.label()
        );
    }
    for r in &check.reports {
        println!("{:<28} passed = {:<5} margin = {:+.3e}", r.check_name, r.passed, r.margin);
    }
    Ok(())
}

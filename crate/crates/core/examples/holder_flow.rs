//! The Hölder functional grows along the heat flow towards the mass product.
//!
//! Run with `cargo run --release --example holder_flow`.

use heatflow::verify::{holder_flow_check, FlowOptions};
use heatflow::{make_gaussian, Grid, TimeGrid};

fn main() -> heatflow::Result<()> {
    let grid = Grid::default();
    let u = make_gaussian(&grid, 0.5, -2.0)?.add(&make_gaussian(&grid, 0.5, 2.0)?)?.normalized()?;
    let v = make_gaussian(&grid, 1.0, 0.0)?;
    let check = holder_flow_check(&u, &v, 2.0, &TimeGrid::default(), &FlowOptions::default())?;

    let tr = &check.trace;
    for k in (0..tr.len()).step_by(8) {
        println!("t = {:>10.4e}  phi = {:.10}", tr.times[k], tr.values[k]);
    }
    for r in &check.reports {
        println!("{:<24} passed = {:<5} margin = {:+.3e}", r.check_name, r.passed, r.margin);
    }
    Ok(())
}

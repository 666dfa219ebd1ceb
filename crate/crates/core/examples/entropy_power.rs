//! Entropy power inequality and the Stam ratio along the heat flow.
//!
//! Run with `cargo run --release --example entropy_power`.

use heatflow::functionals::{entropy_power, stam_ratio};
use heatflow::verify::{epi_check, random_pair, stam_flow_check, FlowOptions, Tolerances};
use heatflow::{make_gaussian, Grid, TimeGrid};

fn main() -> heatflow::Result<()> {
    let grid = Grid::default();
    let m1 = make_gaussian(&grid, 1.0, 0.0)?;
    println!("N(M1) = {:.8} (2 pi e = {:.8})", entropy_power(&m1), 2.0 * std::f64::consts::PI * std::f64::consts::E);
    println!("Theta(M1, M1) = {:.10}", stam_ratio(&m1, &m1)?);

    let (f, g) = random_pair(5);
    let rep = epi_check(&f, &g, &Tolerances::default())?;
    println!("EPI: N(f) + N(g) = {:.6} <= N(f*g) = {:.6}", rep.lhs, rep.rhs);

    let check = stam_flow_check(&f, &g, &TimeGrid::default(), &FlowOptions::default())?;
    let tr = &check.trace;
    for k in (0..tr.len()).step_by(10) {
        println!("t = {:>10.4e}  theta = {:.8}", tr.times[k], tr.values[k]);
    }
    for r in &check.reports {
        println!("{:<20} passed = {}", r.check_name, r.passed);
    }
    Ok(())
}

//! In the reverse regime the Young functional decreases along the flow.
//!
//! Run with `cargo run --release --example reverse_young`.

use heatflow::verify::{random_pair, young_check, young_flow_check, FlowOptions, Tolerances};
use heatflow::{optimal_diffusion, sharp_young_constant, TimeGrid, YoungTriple};

fn main() -> heatflow::Result<()> {
    let triple = YoungTriple::with_r(0.75, 0.75, 0.6)?;
    let pair = optimal_diffusion(&triple);
    println!("reverse pair: alpha = {}, beta = {}", pair.alpha, pair.beta);
    println!("sharp constant (a lower bound here) = {:.10}", sharp_young_constant(&triple, 1));

    let (u, v) = random_pair(4);
    let rep = young_check(&u, &v, &triple, &Tolerances::default())?;
    println!("static check: lhs = {:.8}, rhs = {:.8}, passed = {}", rep.lhs, rep.rhs, rep.passed);

    let times = TimeGrid::geometric(1e-3, 1.25, 50.0)?;
    let check = young_flow_check(&u, &v, &triple, &pair, &times, &FlowOptions::default())?;
    let tr = &check.trace;
    println!("psi decreases from {:.8} to {:.8}", tr.values[0], tr.values[tr.len() - 1]);
    for r in &check.reports {
        println!("{:<28} passed = {}", r.check_name, r.passed);
    }
    Ok(())
}

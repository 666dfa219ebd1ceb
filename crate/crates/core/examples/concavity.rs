//! Concavity in time of the entropy power along the heat flow.
//!
//! Run with `cargo run --release --example concavity`.

use heatflow::verify::{entropy_power_concavity_check, random_density, DensityFamily, FlowOptions};
use heatflow::{make_gaussian, Grid, TimeGrid};

fn main() -> heatflow::Result<()> {
    let times = TimeGrid::geometric(1e-2, 1.25, 20.0)?;
    let opts = FlowOptions::default();

    let gauss = make_gaussian(&Grid::default(), 1.0, 0.0)?;
    let check = entropy_power_concavity_check(&gauss, &times, &opts)?;
    let worst = check.trace.second_differences().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    println!("Gaussian: N is affine in t, largest |second difference| = {worst:.2e}");

    for seed in 0..3 {
        let f = random_density(seed, DensityFamily::GaussianMixture);
        let check = entropy_power_concavity_check(&f, &times, &opts)?;
        let max = check.trace.second_differences().into_iter().fold(f64::NEG_INFINITY, f64::max);
        println!("mixture seed {seed}: max second difference {max:+.3e}, passed = {}", check.passed());
    }
    Ok(())
}

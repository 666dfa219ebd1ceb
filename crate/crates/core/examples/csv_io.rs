//! Writing and reading grid functions and flow traces as CSV.
//!
//! Run with `cargo run --example csv_io`.

use heatflow::functionals::holder_functional;
use heatflow::verify::{random_density, DensityFamily};
use heatflow::{evolve, DiffusionCoefficient, FlowTrace, GridFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("heatflow-csv-example");
    std::fs::create_dir_all(&dir)?;

    let f = random_density(1, DensityFamily::Skewed);
    let path = dir.join("density.csv");
    f.write_csv(&path)?;
    let back = GridFunction::read_csv(&path)?;
    println!("wrote and read {} samples from {}", back.samples().len(), path.display());

    let g = random_density(2, DensityFamily::SmoothedBump);
    let times: Vec<f64> = (0..12).map(|k| 0.01 * 1.5f64.powi(k)).collect();
    let alpha = DiffusionCoefficient::default();
    let values = times
        .iter()
        .map(|&t| holder_functional(&evolve(&back, alpha, t)?, &evolve(&g, alpha, t)?, 2.0))
        .collect::<heatflow::Result<Vec<f64>>>()?;
    let trace = FlowTrace::new(times, values, None)?;
    let trace_path = dir.join("trace.csv");
    trace.write_csv(&trace_path)?;
    print!("{}", std::fs::read_to_string(&trace_path)?);
    Ok(())
}

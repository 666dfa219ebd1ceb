//! Gaussian detection by a weighted quadratic fit of the logarithm.
//!
//! Run with `cargo run --example equality_cases`.

use heatflow::verify::equality_case_detect;
use heatflow::{make_gaussian, Grid};

fn main() -> heatflow::Result<()> {
    let grid = Grid::default();
    let cases = [
        ("M_2 shifted to 1", make_gaussian(&grid, 2.0, 1.0)?),
        ("two bumps at +-3", make_gaussian(&grid, 1.0, -3.0)?.add(&make_gaussian(&grid, 1.0, 3.0)?)?.scaled(0.5)?),
        (
            "M_1 + 1e-6 bump",
            make_gaussian(&grid, 1.0, 0.0)?.add(&make_gaussian(&grid, 0.3, 0.5)?.scaled(1e-6)?)?,
        ),
    ];
    for (name, f) in cases {
        let fit = equality_case_detect(&f)?;
        println!(
            "{name:<18} gaussian = {:<5} variance = {:>10.6} mean = {:>9.6} residual = {:.2e}",
            fit.is_gaussian, fit.fitted_variance, fit.fitted_mean, fit.fit_residual
        );
    }
    Ok(())
}

//! The generalized Blachman inequality and its Gaussian equality case.
//!
//! Run with `cargo run --release --example blachman_lemma`.

use heatflow::verify::{blachman_lemma_check, random_pair, Tolerances};
use heatflow::{make_gaussian, Grid};

fn main() -> heatflow::Result<()> {
    let grid = Grid::default();
    let tol = Tolerances::default();
    let (a, b, c) = (2.0, 3.0, 0.5);

    let f = make_gaussian(&grid, c * a, 0.0)?;
    let g = make_gaussian(&grid, c * b, 1.0)?;
    let rep = blachman_lemma_check(&f, &g, a, b, 2.0, &tol)?;
    println!("Gaussians M_ca, M_cb: lhs = {:.12}, rhs = {:.12}", rep.lhs, rep.rhs);
    if let Some(d) = rep.equality_diagnosis {
        println!("  equality diagnosis: gaussian = {}, residual = {:.2e}", d.is_gaussian, d.fit_residual);
    }

    for seed in 0..3 {
        let (u, v) = random_pair(seed);
        for r in [1.0, 2.0] {
            let rep = blachman_lemma_check(&u, &v, 1.0, 1.0, r, &tol)?;
            println!("seed {seed}, r = {r}: relative margin {:.4e}", rep.margin / rep.rhs);
        }
    }
    Ok(())
}

//! Dual exponents, sharp Young constants and the optimal diffusion pair.
//!
//! Run with `cargo run --example sharp_constants`.

use heatflow::{a_constant, gamma_function, optimal_diffusion, sharp_young_constant, YoungTriple};

fn main() -> heatflow::Result<()> {
    println!("{:>8} {:>8} {:>8} {:>10} {:>10} {:>8} {:>8} {:>10}", "p", "q", "r", "A_p", "sharp", "alpha", "beta", "gamma");
    for (p, q) in [(4.0 / 3.0, 4.0 / 3.0), (1.2, 1.5), (2.0, 1.5), (0.75, 0.75), (0.8, 0.6)] {
        let t = YoungTriple::new(p, q)?;
        let pair = optimal_diffusion(&t);
        println!(
            "{:>8.4} {:>8.4} {:>8.4} {:>10.6} {:>10.6} {:>8.4} {:>8.4} {:>10.1e}",
            t.p(),
            t.q(),
            t.r(),
            a_constant(t.p())?,
            sharp_young_constant(&t, 1),
            pair.alpha,
            pair.beta,
            gamma_function(pair.alpha, pair.beta, &t),
        );
    }

    // Off the optimal half-line Γ is strictly positive.
    let t = YoungTriple::new(1.5, 1.2)?;
    println!("gamma(1, 1) for (1.5, 1.2): {:.6}", gamma_function(1.0, 1.0, &t));
    Ok(())
}

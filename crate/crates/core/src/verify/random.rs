use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Shapes of generated test densities. All are centered at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityFamily {
    /// 2 to 4 Gaussian components, means in [−5, 5], variances in [0.3, 2].
    GaussianMixture,
    /// A uniform density of half-width in [0.5, 4] convolved with a Gaussian of variance in [0.1, 1].
    SmoothedBump,
    /// A skew-normal density with shape in ±[2, 8] and scale in [0.7, 2].
    Skewed,
}

impl DensityFamily {
    pub const ALL: [DensityFamily; 3] = [
        DensityFamily::GaussianMixture,
        DensityFamily::SmoothedBump,
        DensityFamily::Skewed,
    ];

    fn tag(self) -> u64 {
        match self {
            DensityFamily::GaussianMixture => 0x6d69_7874,
            DensityFamily::SmoothedBump => 0x6275_6d70,
            DensityFamily::Skewed => 0x736b_6577,
        }
    }
}

fn rng_for(seed: u64, family: DensityFamily) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ family.tag())
}

fn gaussian(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    (-z * z / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Standard normal CDF, accurate in both tails.
fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Largest mass defect tolerated before renormalization.
const TRUNCATION_TOL: f64 = 1e-8;

/// Deterministic unit-mass density on the default grid.
pub fn random_density(seed: u64, family: DensityFamily) -> GridFunction {
    random_density_on(&Grid::default(), seed, family).expect("default grid holds every family")
}

/// Deterministic unit-mass density sampled on `grid`; `Truncation` if it does not fit.
pub fn random_density_on(grid: &Grid, seed: u64, family: DensityFamily) -> Result<GridFunction> {
    let mut rng = rng_for(seed, family);
    let f = match family {
        DensityFamily::GaussianMixture => {
            let k = rng.gen_range(2..=4usize);
            let (weights, means, vars) = loop {
                let mut w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                let mut m: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let v: Vec<f64> = (0..k).map(|_| rng.gen_range(0.3..2.0)).collect();
                let partial: f64 = w.iter().zip(&m).map(|(a, b)| a * b).sum();
                let last = -partial / w[k - 1];
                if last.abs() <= 5.0 {
                    m.push(last);
                    break (w, m, v);
                }
            };
            GridFunction::from_fn(*grid, |x| {
                (0..k).map(|i| weights[i] * gaussian(x, means[i], vars[i])).sum()
            })?
        }
        DensityFamily::SmoothedBump => {
            let half = rng.gen_range(0.5..4.0);
            let sd = rng.gen_range(0.1f64..1.0).sqrt();
            GridFunction::from_fn(*grid, |x| {
                // Φ((|x|+w)/σ) − Φ((|x|−w)/σ) written with upper tails.
                let a = x.abs();
                let upper = |z: f64| 0.5 * erfc(z / SQRT_2);
                (upper((a - half) / sd) - upper((a + half) / sd)).max(0.0) / (2.0 * half)
            })?
        }
        DensityFamily::Skewed => {
            let shape: f64 = rng.gen_range(2.0..8.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let scale = rng.gen_range(0.7..2.0);
            let delta = shape / (1.0 + shape * shape).sqrt();
            let loc = -scale * delta * (2.0 / PI).sqrt();
            GridFunction::from_fn(*grid, |x| {
                let z = (x - loc) / scale;
                2.0 / scale * gaussian(z, 0.0, 1.0) * normal_cdf(shape * z)
            })?
        }
    };
    let mass = crate::grid::integrate(&f);
    if (mass - 1.0).abs() > TRUNCATION_TOL {
        return Err(Error::Truncation(format!(
            "{family:?} density for seed {seed} has mass {mass} on [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    f.normalized()
}

/// Two densities from different families for the given seed.
pub fn random_pair(seed: u64) -> (GridFunction, GridFunction) {
    let (a, b) = pair_families(seed);
    (random_density(seed, a), random_density(seed, b))
}

pub fn random_pair_on(grid: &Grid, seed: u64) -> Result<(GridFunction, GridFunction)> {
    let (a, b) = pair_families(seed);
    Ok((random_density_on(grid, seed, a)?, random_density_on(grid, seed, b)?))
}

fn pair_families(seed: u64) -> (DensityFamily, DensityFamily) {
    let i = (seed % 3) as usize;
    (DensityFamily::ALL[i], DensityFamily::ALL[(i + 1) % 3])
}

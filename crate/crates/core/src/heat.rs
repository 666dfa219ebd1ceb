//! Heat semigroups with arbitrary diffusion rates, self-similar rescaling and time grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{dilate, integrate, Grid, GridFunction, SignedFunction};
use crate::spectral::Spectrum;

/// Relative mass loss above which an evolution is declared truncated.
pub const MASS_LOSS_TOL: f64 = 1e-8;

/// Diffusion rate `α` of `u_t = α u_xx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCoefficient(f64);

impl DiffusionCoefficient {
    pub fn new(value: f64) -> Result<DiffusionCoefficient> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!("diffusion coefficient must be > 0, got {value}")));
        }
        Ok(DiffusionCoefficient(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for DiffusionCoefficient {
    fn default() -> Self {
        DiffusionCoefficient(1.0)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// `f0 * M_{2αt}`, applied as the exact Gaussian multiplier `exp(−αtk²)`.
pub fn evolve(f0: &GridFunction, alpha: DiffusionCoefficient, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(f0.clone());
    }
    let grid = f0.grid();
    let spec = Spectrum::analyze(grid, f0.samples());
    let total = spec.mass();
    let out = GridFunction::from_clamped(*grid, spec.heat(alpha.value() * t).synthesize());
    let kept = integrate(&out);
    if total > 0.0 && ((total - kept) / total).abs() > MASS_LOSS_TOL {
        return Err(Error::Truncation(format!(
            "evolution to t = {t} with α = {} loses {:.3e} of the mass",
            alpha.value(),
            (total - kept) / total
        )));
    }
    Ok(out)
}

/// `U(x) = λ f_t(λx)`, `λ = √(1 + 2αt)`.
pub fn rescale_self_similar(f_t: &GridFunction, t: f64, alpha: DiffusionCoefficient) -> Result<GridFunction> {
    check_time(t)?;
    let lambda = (1.0 + 2.0 * alpha.value() * t).sqrt();
    dilate(f_t, 1.0 / lambda)
}

/// `evolve` at each time; element `k` equals `evolve(f0, alpha, times[k])`.
pub fn heat_trace(f0: &GridFunction, alpha: DiffusionCoefficient, times: &[f64]) -> Result<Vec<GridFunction>> {
    let results: Vec<Result<GridFunction>> = times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| evolve(f0, alpha, t).map_err(|e| e.at_time(k, t)))
        .collect();
    results.into_iter().collect()
}

/// Moving coordinates with `λ(t) = λ0·√(1 + 2·speed·t)`.
///
/// A heat solution `f_t` seen in the frame is `U(x) = λ f_t(λ(x − anchor) + center)`:
/// the point `center` is placed at `anchor` and lengths shrink by `λ`. `U` has
/// the same mass as `f_t` and stays inside a fixed window for all `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub center: f64,
    pub anchor: f64,
    pub lambda0: f64,
    pub speed: f64,
}

impl Frame {
    /// The frame of `rescale_self_similar`.
    pub fn standard(alpha: DiffusionCoefficient) -> Frame {
        Frame {
            center: 0.0,
            anchor: 0.0,
            lambda0: 1.0,
            speed: alpha.value(),
        }
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.lambda0 * (1.0 + 2.0 * self.speed * t).sqrt()
    }
}

/// Heat solution and its spatial derivative, both in frame coordinates.
#[derive(Debug, Clone)]
pub struct FramedSolution {
    pub values: GridFunction,
    pub slope: SignedFunction,
    pub lambda: f64,
}

/// Evolves `f0` with rate `α` to time `t` and samples it in `frame`.
///
/// The derivative is spectral. Negative round-off in the values is clamped;
/// nothing leaves the window because the frame follows the spreading.
pub fn evolve_in_frame(f0: &GridFunction, alpha: DiffusionCoefficient, t: f64, frame: &Frame) -> Result<FramedSolution> {
    check_time(t)?;
    let grid = f0.grid();
    let lambda = frame.lambda(t);
    let offset = frame.center - lambda * frame.anchor;
    let spec = Spectrum::analyze_affine(grid, f0.samples(), lambda, offset)
        .heat(alpha.value() * t / (lambda * lambda));
    let values = GridFunction::from_clamped(*grid, spec.synthesize());
    let slope = SignedFunction::new(*grid, spec.derivative().synthesize())?;
    Ok(FramedSolution { values, slope, lambda })
}

/// `rescale_self_similar(evolve(f0, α, t), t, α)` computed without an
/// intermediate on the original grid, so large `t` never truncates.
pub fn evolve_self_similar(f0: &GridFunction, alpha: DiffusionCoefficient, t: f64) -> Result<GridFunction> {
    Ok(evolve_in_frame(f0, alpha, t, &Frame::standard(alpha))?.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Geometric,
    Linear,
}

/// Strictly ascending, nonnegative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub const DEFAULT_T_MIN: f64 = 1e-3;
    pub const DEFAULT_RATIO: f64 = 1.25;
    pub const DEFAULT_T_MAX: f64 = 200.0;

    pub fn new(times: Vec<f64>) -> Result<TimeGrid> {
        if times.is_empty() {
            return Err(Error::Domain("empty time grid".into()));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Domain("times must be finite and >= 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("times must be strictly ascending".into()));
        }
        Ok(TimeGrid { times })
    }

    /// `t_min·ratio^k` for every `k` with value `≤ t_max`.
    pub fn geometric(t_min: f64, ratio: f64, t_max: f64) -> Result<TimeGrid> {
        if !(t_min > 0.0 && ratio > 1.0 && t_max >= t_min) {
            return Err(Error::Domain(format!(
                "geometric grid needs t_min > 0, ratio > 1, t_max >= t_min; got ({t_min}, {ratio}, {t_max})"
            )));
        }
        let mut times = Vec::new();
        let mut k = 0;
        loop {
            let t = t_min * ratio.powi(k);
            if t > t_max * (1.0 + 1e-12) {
                break;
            }
            times.push(t);
            k += 1;
        }
        TimeGrid::new(times)
    }

    /// `steps` points from `t_min` to `t_max` with a constant ratio.
    pub fn geometric_steps(t_min: f64, t_max: f64, steps: usize) -> Result<TimeGrid> {
        if steps < 2 || !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::Domain(format!(
                "geometric grid needs steps >= 2 and 0 < t_min < t_max; got ({t_min}, {t_max}, {steps})"
            )));
        }
        let ratio = (t_max / t_min).powf(1.0 / (steps - 1) as f64);
        let mut times: Vec<f64> = (0..steps).map(|k| t_min * ratio.powi(k as i32)).collect();
        times[steps - 1] = t_max;
        TimeGrid::new(times)
    }

    /// `steps` equispaced points from `t_min` to `t_max`.
    pub fn linear(t_min: f64, t_max: f64, steps: usize) -> Result<TimeGrid> {
        if steps < 2 || !(t_min >= 0.0 && t_max > t_min) {
            return Err(Error::Domain(format!(
                "linear grid needs steps >= 2 and 0 <= t_min < t_max; got ({t_min}, {t_max}, {steps})"
            )));
        }
        let h = (t_max - t_min) / (steps - 1) as f64;
        TimeGrid::new((0..steps).map(|k| t_min + k as f64 * h).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

impl Default for TimeGrid {
    /// `1e-3 · 1.25^k` up to 200.
    fn default() -> Self {
        TimeGrid::geometric(Self::DEFAULT_T_MIN, Self::DEFAULT_RATIO, Self::DEFAULT_T_MAX)
            .expect("default time grid is valid")
    }
}

/// Grid wide enough to hold `make_gaussian` of the given variance (±6σ) with margin.
pub fn grid_for_variance(variance: f64, n_points: usize) -> Result<Grid> {
    let half = 6.5 * variance.sqrt();
    Grid::new(-half, half, n_points)
}

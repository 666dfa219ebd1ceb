//! Uniform 1D grids and nonnegative sampled functions.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectrum;

/// Floor applied before negative or fractional powers and before quotients.
pub const EPS_FLOOR: f64 = 1e-300;

/// Relative spacing tolerance accepted on CSV import.
pub const CSV_SPACING_TOL: f64 = 1e-9;

/// Equispaced points `x_i = x_min + i·dx`, `i < n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Grid> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 16, got {n_points}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
            dx: (x_max - x_min) / (n_points - 1) as f64,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x_max - self.x_min)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_max + self.x_min)
    }

    /// Same interval with a different resolution.
    pub fn with_points(&self, n_points: usize) -> Result<Grid> {
        Grid::new(self.x_min, self.x_max, n_points)
    }
}

impl Default for Grid {
    /// [-16, 16] with 4096 points.
    fn default() -> Self {
        Grid::new(-16.0, 16.0, 4096).expect("default grid is valid")
    }
}

/// Nonnegative samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<GridFunction> {
        if samples.len() != grid.n_points {
            return Err(Error::Domain(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.n_points
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(format!(
                "sample {i} is {} (must be finite and >= 0)",
                samples[i]
            )));
        }
        Ok(GridFunction { grid, samples })
    }

    /// Clamps negative round-off to zero; used for outputs of spectral operations.
    pub(crate) fn from_clamped(grid: Grid, mut samples: Vec<f64>) -> GridFunction {
        for v in samples.iter_mut() {
            if *v < 0.0 || !v.is_finite() {
                *v = 0.0;
            }
        }
        GridFunction { grid, samples }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        GridFunction::new(grid, grid.points().into_iter().map(f).collect())
    }

    pub fn constant(grid: Grid, value: f64) -> Result<GridFunction> {
        GridFunction::new(grid, vec![value; grid.n_points])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Result<GridFunction> {
        GridFunction::new(self.grid, self.samples.iter().map(|v| v * c).collect())
    }

    /// Scales to unit mass.
    pub fn normalized(&self) -> Result<GridFunction> {
        let m = integrate(self);
        if m <= 0.0 {
            return Err(Error::Domain("cannot normalize a function of zero mass".into()));
        }
        self.scaled(1.0 / m)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        same_grid(&self.grid, &other.grid)?;
        Ok(GridFunction {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn mean(&self) -> f64 {
        let m = integrate(self);
        trapezoid(&self.weighted(|x| x), self.grid.dx) / m
    }

    pub fn variance(&self) -> f64 {
        let m = integrate(self);
        let mu = self.mean();
        trapezoid(&self.weighted(|x| (x - mu) * (x - mu)), self.grid.dx) / m
    }

    fn weighted(&self, w: impl Fn(f64) -> f64) -> Vec<f64> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, v)| v * w(self.grid.x(i)))
            .collect()
    }

    pub fn read_csv_from(reader: impl Read) -> Result<GridFunction> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::Csv(format!(
                "expected header `x,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Csv(format!("row {}: `{s}`: {e}", line + 1)))
            };
            xs.push(parse(&rec[0])?);
            vals.push(parse(&rec[1])?);
        }
        if xs.len() < 2 {
            return Err(Error::Csv("fewer than two rows".into()));
        }
        let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
        for (i, x) in xs.iter().enumerate().skip(1) {
            let step = x - xs[i - 1];
            if ((step - grid.dx) / grid.dx).abs() > CSV_SPACING_TOL {
                return Err(Error::Csv(format!(
                    "non-uniform spacing at row {}: step {step} vs {}",
                    i + 1,
                    grid.dx
                )));
            }
        }
        GridFunction::new(grid, vals)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<GridFunction> {
        GridFunction::read_csv_from(std::fs::File::open(path)?)
    }

    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "value"])?;
        for (i, v) in self.samples.iter().enumerate() {
            w.write_record([format!("{:e}", self.grid.x(i)), format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv_to(std::fs::File::create(path)?)
    }
}

/// Real samples without a sign constraint, e.g. derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedFunction {
    grid: Grid,
    samples: Vec<f64>,
}

impl SignedFunction {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<SignedFunction> {
        if samples.len() != grid.n_points {
            return Err(Error::Domain(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.n_points
            )));
        }
        Ok(SignedFunction { grid, samples })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn integrate(&self) -> f64 {
        trapezoid(&self.samples, self.grid.dx)
    }
}

pub(crate) fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "[{}, {}]x{} vs [{}, {}]x{}",
            a.x_min, a.x_max, a.n_points, b.x_min, b.x_max, b.n_points
        )))
    }
}

pub(crate) fn trapezoid(samples: &[f64], dx: f64) -> f64 {
    let n = samples.len();
    let inner: f64 = samples.iter().sum();
    dx * (inner - 0.5 * (samples[0] + samples[n - 1]))
}

pub fn make_gaussian(grid: &Grid, variance: f64, mean: f64) -> Result<GridFunction> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::Domain(format!("variance must be > 0, got {variance}")));
    }
    let sd = variance.sqrt();
    if mean - 6.0 * sd < grid.x_min || mean + 6.0 * sd > grid.x_max {
        return Err(Error::Truncation(format!(
            "Gaussian N({mean}, {variance}) does not fit ±6σ in [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    let c = 1.0 / (2.0 * std::f64::consts::PI * variance).sqrt();
    GridFunction::from_fn(*grid, |x| {
        let z = x - mean;
        c * (-z * z / (2.0 * variance)).exp()
    })
}

/// Trapezoid rule.
pub fn integrate(f: &GridFunction) -> f64 {
    trapezoid(&f.samples, f.grid.dx)
}

/// `(∫ f^p)^{1/p}`; a quasi-norm for `0 < p < 1`.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be > 0, got {p}")));
    }
    let powed: Vec<f64> = f.samples.iter().map(|v| v.powf(p)).collect();
    Ok(trapezoid(&powed, f.grid.dx).powf(1.0 / p))
}

/// Second-order finite differences, one-sided at the ends.
pub fn derivative(f: &GridFunction) -> SignedFunction {
    SignedFunction {
        grid: f.grid,
        samples: fd_derivative(&f.samples, f.grid.dx),
    }
}

pub(crate) fn fd_derivative(s: &[f64], dx: f64) -> Vec<f64> {
    let n = s.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * dx);
    for i in 1..n - 1 {
        d[i] = (s[i + 1] - s[i - 1]) / (2.0 * dx);
    }
    d
}

/// Spectral derivative on the zero-padded period.
pub(crate) fn spectral_derivative(s: &[f64], grid: &Grid) -> Vec<f64> {
    Spectrum::analyze(grid, s).derivative().synthesize()
}

/// `f_a(x) = f(x/a)/a` resampled onto the same grid.
///
/// Resampling is band-limited (Fourier) with negative round-off clamped to
/// zero. Mass that would land outside the interval raises `Truncation` when it
/// exceeds `1e-8` of the total.
pub fn dilate(f: &GridFunction, a: f64) -> Result<GridFunction> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("dilation factor must be > 0, got {a}")));
    }
    if a == 1.0 {
        return Ok(f.clone());
    }
    let g = f.grid;
    let total = integrate(f);
    let (lo, hi) = (g.x_min / a, g.x_max / a);
    let lost: f64 = f
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let y = g.x(*i);
            y < lo || y > hi
        })
        .map(|(_, v)| v * g.dx)
        .sum();
    if total > 0.0 && lost > 1e-8 * total {
        return Err(Error::Truncation(format!(
            "dilation by {a} moves {:.3e} of the mass outside the grid",
            lost / total
        )));
    }
    let out = Spectrum::analyze_affine(&g, &f.samples, 1.0 / a, 0.0).synthesize();
    Ok(GridFunction::from_clamped(g, out))
}

/// `(f*g)(x_i)` by zero-padded FFT (period `2·n_points`, no wrap-around).
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    same_grid(&f.grid, &g.grid)?;
    let out = convolve_raw(&f.grid, &f.samples, &g.samples);
    Ok(GridFunction::from_clamped(f.grid, out))
}

pub(crate) fn convolve_raw(grid: &Grid, a: &[f64], b: &[f64]) -> Vec<f64> {
    Spectrum::analyze(grid, a)
        .times(&Spectrum::analyze(grid, b))
        .synthesize()
}

/// `max(f, ε)^s` for `s < 1`, `f^s` otherwise.
pub fn pointwise_pow(f: &GridFunction, s: f64) -> GridFunction {
    let samples = if s < 1.0 {
        f.samples.iter().map(|v| v.max(EPS_FLOOR).powf(s)).collect()
    } else if s == 1.0 {
        f.samples.clone()
    } else {
        f.samples.iter().map(|v| v.powf(s)).collect()
    };
    GridFunction::from_clamped(f.grid, samples)
}

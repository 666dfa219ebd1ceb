//! Entropy, Fisher information and the Lyapunov functionals Θ, Φ, Ψ with
//! their derivative formulas, plus the cross-Fisher integrals.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{DiffusionPair, YoungTriple};
use crate::error::{Error, Result};
use crate::grid::{
    convolve, convolve_raw, fd_derivative, integrate, pointwise_pow, same_grid, spectral_derivative,
    trapezoid, Grid, GridFunction, EPS_FLOOR,
};

/// Unit-mass tolerance for operations that require densities.
pub const UNIT_MASS_TOL: f64 = 1e-6;

/// Half-width of the finite-difference stencil used for traces.
pub const FD_STENCIL_HALF_WIDTH: usize = 4;

/// How spatial derivatives of grid functions are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Differentiation {
    /// Second-order central differences (`grid::derivative`).
    #[default]
    FiniteDifference,
    /// Exact differentiation of the band-limited interpolant.
    Spectral,
}

/// Spectral slopes are round-off where `f` is below this fraction of its maximum, and are set to zero there.
pub const SPECTRAL_SLOPE_FLOOR: f64 = 1e-15;

pub(crate) fn slope_of(f: &GridFunction, d: Differentiation) -> Vec<f64> {
    match d {
        Differentiation::FiniteDifference => fd_derivative(f.samples(), f.grid().dx()),
        Differentiation::Spectral => {
            let mut slope = spectral_derivative(f.samples(), f.grid());
            let cut = SPECTRAL_SLOPE_FLOOR * f.max();
            for (s, &v) in slope.iter_mut().zip(f.samples()) {
                if v <= cut {
                    *s = 0.0;
                }
            }
            slope
        }
    }
}

fn floored(v: f64) -> f64 {
    v.max(EPS_FLOOR)
}

/// `−∫ f ln f`, samples below the floor contributing zero.
pub fn shannon_entropy(f: &GridFunction) -> f64 {
    let integrand: Vec<f64> = f
        .samples()
        .iter()
        .map(|&v| if v > EPS_FLOOR { -v * v.ln() } else { 0.0 })
        .collect();
    trapezoid(&integrand, f.grid().dx())
}

/// `exp(2H(f))`.
pub fn entropy_power(f: &GridFunction) -> f64 {
    (2.0 * shannon_entropy(f)).exp()
}

/// `∫ (f′)²/f` with finite-difference `f′`.
pub fn fisher_information(f: &GridFunction) -> f64 {
    fisher_information_with(f, Differentiation::FiniteDifference)
}

pub fn fisher_information_with(f: &GridFunction, d: Differentiation) -> f64 {
    let slope = slope_of(f, d);
    fisher_from(f.samples(), &slope, f.grid().dx())
}

pub(crate) fn fisher_from(values: &[f64], slopes: &[f64], dx: f64) -> f64 {
    let integrand: Vec<f64> = values
        .iter()
        .zip(slopes)
        .map(|(&v, &s)| if v > 0.0 { s * s / floored(v) } else { 0.0 })
        .collect();
    trapezoid(&integrand, dx)
}

fn require_unit_mass(f: &GridFunction, name: &str) -> Result<()> {
    let m = integrate(f);
    if (m - 1.0).abs() > UNIT_MASS_TOL {
        return Err(Error::Domain(format!("{name} must have unit mass, has {m}")));
    }
    Ok(())
}

/// `(N(f) + N(g)) / N(f*g)`.
pub fn stam_ratio(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    same_grid(f.grid(), g.grid())?;
    require_unit_mass(f, "f")?;
    require_unit_mass(g, "g")?;
    let k = convolve(f, g)?;
    Ok((entropy_power(f) + entropy_power(g)) / entropy_power(&k))
}

fn holder_q(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("Hölder exponent must be > 1, got {p}")));
    }
    Ok(p / (p - 1.0))
}

/// `∫ u^{1/p} v^{1/q}`, `q = p′`.
pub fn holder_functional(u: &GridFunction, v: &GridFunction, p: f64) -> Result<f64> {
    same_grid(u.grid(), v.grid())?;
    let q = holder_q(p)?;
    Ok(holder_value_from(u.samples(), v.samples(), p, q, u.grid().dx()))
}

pub(crate) fn holder_value_from(u: &[f64], v: &[f64], p: f64, q: f64, dx: f64) -> f64 {
    let w: Vec<f64> = u
        .iter()
        .zip(v)
        .map(|(&a, &b)| a.powf(1.0 / p) * b.powf(1.0 / q))
        .collect();
    trapezoid(&w, dx)
}

/// `(1/(pq)) ∫ u^{1/p} v^{1/q} (u′/u − v′/v)²` with finite differences.
pub fn holder_derivative(u: &GridFunction, v: &GridFunction, p: f64) -> Result<f64> {
    holder_derivative_with(u, v, p, Differentiation::FiniteDifference)
}

pub fn holder_derivative_with(u: &GridFunction, v: &GridFunction, p: f64, d: Differentiation) -> Result<f64> {
    same_grid(u.grid(), v.grid())?;
    let q = holder_q(p)?;
    let (du, dv) = (slope_of(u, d), slope_of(v, d));
    Ok(holder_derivative_from(u.samples(), &du, v.samples(), &dv, p, q, u.grid().dx()))
}

pub(crate) fn holder_derivative_from(u: &[f64], du: &[f64], v: &[f64], dv: &[f64], p: f64, q: f64, dx: f64) -> f64 {
    let integrand: Vec<f64> = (0..u.len())
        .map(|i| {
            let w = u[i].powf(1.0 / p) * v[i].powf(1.0 / q);
            if w == 0.0 {
                return 0.0;
            }
            let diff = du[i] / floored(u[i]) - dv[i] / floored(v[i]);
            w * diff * diff
        })
        .collect();
    trapezoid(&integrand, dx) / (p * q)
}

/// `h = u^{1/p} * v^{1/q}`.
pub fn young_convolvend(u: &GridFunction, v: &GridFunction, triple: &YoungTriple) -> Result<GridFunction> {
    same_grid(u.grid(), v.grid())?;
    convolve(&pointwise_pow(u, 1.0 / triple.p()), &pointwise_pow(v, 1.0 / triple.q()))
}

/// `Ψ = ‖u^{1/p} * v^{1/q}‖_r`.
pub fn young_functional(u: &GridFunction, v: &GridFunction, triple: &YoungTriple) -> Result<f64> {
    let h = young_convolvend(u, v, triple)?;
    crate::grid::lp_norm(&h, triple.r())
}

/// `A(f,g)(x) = ∫ (f′(x−y))²/f(x−y) g(y) dy`.
pub fn cross_fisher_a(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    cross_fisher_a_with(f, g, Differentiation::FiniteDifference)
}

pub fn cross_fisher_a_with(f: &GridFunction, g: &GridFunction, d: Differentiation) -> Result<GridFunction> {
    same_grid(f.grid(), g.grid())?;
    let factor = fisher_density(f.samples(), &slope_of(f, d));
    Ok(GridFunction::from_clamped(*f.grid(), convolve_raw(f.grid(), &factor, g.samples())))
}

/// `B(f,g)(x) = ∫ f(x−y) (g′(y))²/g(y) dy`.
pub fn cross_fisher_b(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    cross_fisher_b_with(f, g, Differentiation::FiniteDifference)
}

pub fn cross_fisher_b_with(f: &GridFunction, g: &GridFunction, d: Differentiation) -> Result<GridFunction> {
    same_grid(f.grid(), g.grid())?;
    let factor = fisher_density(g.samples(), &slope_of(g, d));
    Ok(GridFunction::from_clamped(*f.grid(), convolve_raw(f.grid(), f.samples(), &factor)))
}

/// `(f′)²/f`, zero where `f` vanishes.
pub(crate) fn fisher_density(values: &[f64], slopes: &[f64]) -> Vec<f64> {
    values
        .iter()
        .zip(slopes)
        .map(|(&v, &s)| if v > 0.0 { s * s / floored(v) } else { 0.0 })
        .collect()
}

/// The integrals entering `(1/r) d/dt ∫h^r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungTerms {
    /// `∫ h^r`
    pub power_integral: f64,
    /// `∫ h^{r−2} (h′)²`
    pub gradient: f64,
    /// `∫ h^{r−1} A(F, G)`
    pub cross_a: f64,
    /// `∫ h^{r−1} B(F, G)`
    pub cross_b: f64,
}

impl YoungTerms {
    /// `−(α+β)(r−1)X + α(p/p′)∫h^{r−1}A + β(q/q′)∫h^{r−1}B`.
    ///
    /// With negative duals this is the bracketed reverse-regime expression
    /// with its overall sign, so one formula serves both regimes.
    pub fn rate(&self, triple: &YoungTriple, pair: &DiffusionPair) -> f64 {
        let (p, q, r) = (triple.p(), triple.q(), triple.r());
        -(pair.alpha + pair.beta) * (r - 1.0) * self.gradient
            + pair.alpha * (p / triple.p_dual()) * self.cross_a
            + pair.beta * (q / triple.q_dual()) * self.cross_b
    }

    pub fn psi(&self, triple: &YoungTriple) -> f64 {
        self.power_integral.powf(1.0 / triple.r())
    }

    /// `dΨ/dt = Ψ^{1−r} · rate`.
    pub fn psi_rate(&self, triple: &YoungTriple, pair: &DiffusionPair) -> f64 {
        self.psi(triple).powf(1.0 - triple.r()) * self.rate(triple, pair)
    }
}

/// Evaluates [`YoungTerms`] from `F = u^{1/p}`, `G = v^{1/q}` and their slopes.
///
/// Points where `h ≤ c·max h` are excluded. Every integrand is `h^r` times a
/// slowly varying factor in the tails, so the truncation error behaves like
/// `K·c^r`; the integrals at `c = h_floor` and `c = 10·h_floor` are combined
/// to cancel it.
pub(crate) fn young_terms_from(
    grid: &Grid,
    f: &[f64],
    df: &[f64],
    g: &[f64],
    dg: &[f64],
    r: f64,
    h_floor: f64,
) -> YoungTerms {
    let h = convolve_raw(grid, f, g);
    let dh = convolve_raw(grid, df, g);
    let a = convolve_raw(grid, &fisher_density(f, df), g);
    let b = convolve_raw(grid, f, &fisher_density(g, dg));
    let hmax = h.iter().copied().fold(0.0, f64::max);
    let at = |c: f64| truncated_terms(grid, &h, &dh, &a, &b, r, (c * hmax).max(EPS_FLOOR));
    let (fine, coarse) = (at(h_floor), at(10.0 * h_floor));
    let k = 1.0 / (10f64.powf(r) - 1.0);
    let extrapolate = |x: f64, y: f64| x + k * (x - y);
    YoungTerms {
        power_integral: extrapolate(fine.power_integral, coarse.power_integral),
        gradient: extrapolate(fine.gradient, coarse.gradient),
        cross_a: extrapolate(fine.cross_a, coarse.cross_a),
        cross_b: extrapolate(fine.cross_b, coarse.cross_b),
    }
}

fn truncated_terms(grid: &Grid, h: &[f64], dh: &[f64], a: &[f64], b: &[f64], r: f64, cut: f64) -> YoungTerms {
    let n = h.len();
    let (mut t_pow, mut t_grad, mut t_a, mut t_b) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        if h[i] > cut {
            let hr1 = h[i].powf(r - 1.0);
            t_pow[i] = hr1 * h[i];
            t_grad[i] = hr1 * dh[i] * dh[i] / h[i];
            t_a[i] = hr1 * a[i].max(0.0);
            t_b[i] = hr1 * b[i].max(0.0);
        }
    }
    let dx = grid.dx();
    YoungTerms {
        power_integral: trapezoid(&t_pow, dx),
        gradient: trapezoid(&t_grad, dx),
        cross_a: trapezoid(&t_a, dx),
        cross_b: trapezoid(&t_b, dx),
    }
}

/// Relative floor below which FFT-convolved `h` is treated as zero.
pub const CONVOLUTION_NOISE_FLOOR: f64 = 1e-14;

/// Powers and their slopes: `F = u^{1/p}`, `F′ = F·u′/(p·u)`.
pub(crate) fn power_with_slope(u: &[f64], du: &[f64], s: f64) -> (Vec<f64>, Vec<f64>) {
    let f: Vec<f64> = u
        .iter()
        .map(|&v| if v > 0.0 { floored(v).powf(s) } else { 0.0 })
        .collect();
    let df = (0..u.len())
        .map(|i| if u[i] > 0.0 { s * f[i] * du[i] / floored(u[i]) } else { 0.0 })
        .collect();
    (f, df)
}

pub fn young_terms(u: &GridFunction, v: &GridFunction, triple: &YoungTriple, d: Differentiation) -> Result<YoungTerms> {
    same_grid(u.grid(), v.grid())?;
    let (f, df) = power_with_slope(u.samples(), &slope_of(u, d), 1.0 / triple.p());
    let (g, dg) = power_with_slope(v.samples(), &slope_of(v, d), 1.0 / triple.q());
    Ok(young_terms_from(u.grid(), &f, &df, &g, &dg, triple.r(), CONVOLUTION_NOISE_FLOOR))
}

/// `(1/r) d/dt ∫h^r` along `u_t = α u_xx`, `v_t = β v_xx`, with finite differences.
pub fn young_derivative(u: &GridFunction, v: &GridFunction, triple: &YoungTriple, pair: &DiffusionPair) -> Result<f64> {
    young_derivative_with(u, v, triple, pair, Differentiation::FiniteDifference)
}

pub fn young_derivative_with(
    u: &GridFunction,
    v: &GridFunction,
    triple: &YoungTriple,
    pair: &DiffusionPair,
    d: Differentiation,
) -> Result<f64> {
    Ok(young_terms(u, v, triple, d)?.rate(triple, pair))
}

/// Values of a functional along a flow with analytic and finite-difference rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub analytic_derivative: Option<Vec<f64>>,
    pub fd_derivative: Option<Vec<f64>>,
}

impl FlowTrace {
    /// Computes `fd_derivative` from `times` and `values` alone.
    pub fn new(times: Vec<f64>, values: Vec<f64>, analytic_derivative: Option<Vec<f64>>) -> Result<FlowTrace> {
        if times.len() != values.len() || analytic_derivative.as_ref().is_some_and(|a| a.len() != times.len()) {
            return Err(Error::Domain("trace arrays differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("trace times must be strictly ascending".into()));
        }
        let fd = (times.len() >= 2).then(|| trace_fd_derivative(&times, &values));
        Ok(FlowTrace {
            times,
            values,
            analytic_derivative,
            fd_derivative: fd,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `values[k+1] − values[k]`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Indices whose finite-difference stencil is fully centered.
    pub fn centered_indices(&self) -> std::ops::Range<usize> {
        let m = FD_STENCIL_HALF_WIDTH.min(self.len().saturating_sub(1) / 2);
        if self.len() < 3 {
            return 0..0;
        }
        m..self.len() - m
    }

    /// Centered-in-time second differences, `h̄·([N₊−N₀]/h₊ − [N₀−N₋]/h₋)`.
    pub fn second_differences(&self) -> Vec<f64> {
        let (t, v) = (&self.times, &self.values);
        (1..self.len().saturating_sub(1))
            .map(|k| {
                let (hp, hm) = (t[k + 1] - t[k], t[k] - t[k - 1]);
                0.5 * (hp + hm) * ((v[k + 1] - v[k]) / hp - (v[k] - v[k - 1]) / hm)
            })
            .collect()
    }

    pub fn write_csv_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "value", "analytic_derivative", "fd_derivative"])?;
        let cell = |col: &Option<Vec<f64>>, k: usize| col.as_ref().map(|c| format!("{:e}", c[k])).unwrap_or_default();
        for k in 0..self.len() {
            w.write_record([
                format!("{:e}", self.times[k]),
                format!("{:e}", self.values[k]),
                cell(&self.analytic_derivative, k),
                cell(&self.fd_derivative, k),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv_to(std::fs::File::create(path)?)
    }
}

/// Derivative of the Lagrange interpolant through the `2m+1` nearest nodes.
///
/// When all times are positive the interpolation variable is `ln t`, which
/// makes geometric grids uniform; otherwise it is `t`.
pub fn trace_fd_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len();
    let log = times[0] > 0.0;
    let s: Vec<f64> = if log { times.iter().map(|t| t.ln()).collect() } else { times.to_vec() };
    let width = (2 * FD_STENCIL_HALF_WIDTH + 1).min(n);
    (0..n)
        .map(|k| {
            let start = k.saturating_sub(width / 2).min(n - width);
            let nodes = &s[start..start + width];
            let w = lagrange_derivative_weights(nodes, k - start);
            let ds: f64 = w.iter().zip(&values[start..start + width]).map(|(a, b)| a * b).sum();
            if log {
                ds / times[k]
            } else {
                ds
            }
        })
        .collect()
}

fn lagrange_derivative_weights(nodes: &[f64], at: usize) -> Vec<f64> {
    let xk = nodes[at];
    (0..nodes.len())
        .map(|j| {
            if j == at {
                (0..nodes.len()).filter(|&l| l != at).map(|l| 1.0 / (xk - nodes[l])).sum()
            } else {
                let prod: f64 = (0..nodes.len())
                    .filter(|&l| l != at && l != j)
                    .map(|l| (xk - nodes[l]) / (nodes[j] - nodes[l]))
                    .product();
                prod / (nodes[j] - xk)
            }
        })
        .collect()
}

//! Lyapunov-functional traces along heat flows, evaluated in self-similar frames.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    gaussian_young_value, on_optimal_line, optimal_diffusion, sharp_young_constant, DiffusionPair, Regime,
    YoungTriple,
};
use crate::error::{Error, Result};
use crate::functionals::{
    fisher_from, holder_derivative_from, holder_value_from, power_with_slope, young_terms_from, FlowTrace,
    CONVOLUTION_NOISE_FLOOR,
};
use crate::grid::{convolve_raw, integrate, trapezoid, Grid, GridFunction, EPS_FLOOR};
use crate::heat::{evolve_in_frame, DiffusionCoefficient, Frame, TimeGrid};

use super::equality::equality_case_detect_with;
use super::report::{EqualityDiagnosis, InputDigest, Tolerances, VerificationReport};

/// Samples of a framed solution below this fraction of its maximum are set to zero.
pub const VALUE_NOISE_FLOOR: f64 = 1e-15;

/// Fraction of the half-width a framed function may occupy.
const FRAME_FILL: f64 = 0.85;

/// Gaussian tail radius, in standard deviations, at which the density drops below 1e-16 of its peak.
const TAIL_SIGMAS: f64 = 8.6;

/// Relative precision for deciding that a pair lies on the optimal half-line.
const OPTIMAL_LINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub tolerances: Tolerances,
    /// Time at which the rescaled limit is read off.
    pub t_limit: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            tolerances: Tolerances::default(),
            t_limit: 200.0,
        }
    }
}

/// Which power of `A_p·A_q·A_{r′}` the rescaled limit of Ψ reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitExponent {
    One,
    Half,
    Neither,
}

impl LimitExponent {
    pub fn label(&self) -> &'static str {
        match self {
            LimitExponent::One => "one",
            LimitExponent::Half => "half",
            LimitExponent::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitResolution {
    pub exponent: LimitExponent,
    /// `Ψ(t_limit) / ((∫u)^{1/p} (∫v)^{1/q})`.
    pub normalized_limit: f64,
    /// `A_p·A_q·A_{r′}`.
    pub constant: f64,
    pub deviation_one: f64,
    pub deviation_half: f64,
}

impl LimitResolution {
    fn classify(normalized_limit: f64, constant: f64, tol: f64) -> LimitResolution {
        let deviation_one = ((normalized_limit - constant) / constant).abs();
        let half = constant.sqrt();
        let deviation_half = ((normalized_limit - half) / half).abs();
        let exponent = if deviation_one <= tol && deviation_one <= deviation_half {
            LimitExponent::One
        } else if deviation_half <= tol {
            LimitExponent::Half
        } else {
            LimitExponent::Neither
        };
        LimitResolution {
            exponent,
            normalized_limit,
            constant,
            deviation_one,
            deviation_half,
        }
    }
}

/// Reports and trace of one flow check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowCheck {
    pub reports: Vec<VerificationReport>,
    pub trace: FlowTrace,
    pub limit: Option<LimitResolution>,
}

impl FlowCheck {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn report(&self, check_name: &str) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.check_name == check_name)
    }
}

fn center_of(f: &GridFunction) -> f64 {
    f.mean()
}

/// Largest distance from `center` of a sample above `rel·max`.
fn radius(f: &[f64], grid: &Grid, center: f64, rel: f64) -> f64 {
    let cut = rel * f.iter().copied().fold(0.0, f64::max);
    f.iter()
        .enumerate()
        .filter(|(_, &v)| v > cut)
        .map(|(i, _)| (grid.x(i) - center).abs())
        .fold(0.0, f64::max)
}

/// Smallest `λ0 ≥ 1` fitting an extent at `t = 0` and a Gaussian of variance
/// `asym_var/λ0²` as `t → ∞` into `room`.
fn lambda0_for(extent: f64, asym_var: f64, room: f64) -> f64 {
    1.0f64
        .max(extent / room)
        .max(TAIL_SIGMAS * asym_var.sqrt() / room)
}

struct Cleaned {
    values: Vec<f64>,
    slope: Vec<f64>,
}

fn framed(f0: &GridFunction, rate: f64, t: f64, frame: &Frame) -> Result<(Cleaned, f64)> {
    let sol = evolve_in_frame(f0, DiffusionCoefficient::new(rate)?, t, frame)?;
    let mut values = sol.values.into_samples();
    let mut slope = sol.slope.samples().to_vec();
    let cut = VALUE_NOISE_FLOOR * values.iter().copied().fold(0.0, f64::max);
    for i in 0..values.len() {
        if values[i] <= cut {
            values[i] = 0.0;
            slope[i] = 0.0;
        }
    }
    Ok((Cleaned { values, slope }, sol.lambda))
}

fn evaluate_all<T: Send>(times: &[f64], eval: impl Fn(f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let results: Vec<Result<T>> = times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| eval(t).map_err(|e| e.at_time(k, t)))
        .collect();
    results.into_iter().collect()
}

fn split(points: Vec<(f64, f64)>) -> (Vec<f64>, Vec<f64>) {
    points.into_iter().unzip()
}

fn diagnose_pair(f: &GridFunction, g: &GridFunction, threshold: f64) -> Option<EqualityDiagnosis> {
    let a = equality_case_detect_with(f, threshold).ok()?;
    let b = equality_case_detect_with(g, threshold).ok()?;
    Some(EqualityDiagnosis {
        is_gaussian: a.is_gaussian && b.is_gaussian,
        fitted_variance: a.fitted_variance,
        fit_residual: a.fit_residual.max(b.fit_residual),
    })
}

fn diagnose_one(f: &GridFunction, threshold: f64) -> Option<EqualityDiagnosis> {
    let a = equality_case_detect_with(f, threshold).ok()?;
    Some(EqualityDiagnosis {
        is_gaussian: a.is_gaussian,
        fitted_variance: a.fitted_variance,
        fit_residual: a.fit_residual,
    })
}

fn monotone_report(
    name: &str,
    digest: String,
    trace: &FlowTrace,
    increasing: bool,
    tol_rel: f64,
    diagnose: impl FnOnce() -> Option<EqualityDiagnosis>,
) -> VerificationReport {
    let sign = if increasing { 1.0 } else { -1.0 };
    let margin = trace
        .increments()
        .iter()
        .map(|d| sign * d)
        .fold(f64::INFINITY, f64::min);
    let margin = if margin.is_finite() { margin } else { 0.0 };
    let first = trace.values[0];
    let last = *trace.values.last().expect("trace is nonempty");
    VerificationReport::new(name, digest, first, last, margin, tol_rel * first.abs(), diagnose)
}

/// Largest relative gap between analytic and finite-difference rates at
/// centered nodes where the analytic rate exceeds `floor` in modulus.
pub fn max_derivative_mismatch(trace: &FlowTrace, floor: f64) -> f64 {
    let (Some(an), Some(fd)) = (&trace.analytic_derivative, &trace.fd_derivative) else {
        return 0.0;
    };
    trace
        .centered_indices()
        .filter(|&k| an[k].abs() > floor)
        .map(|k| ((an[k] - fd[k]) / an[k]).abs())
        .fold(0.0, f64::max)
}

fn derivative_report(name: &str, digest: String, trace: &FlowTrace, tol: &Tolerances) -> VerificationReport {
    let worst = max_derivative_mismatch(trace, tol.derivative_floor);
    VerificationReport::new(name, digest, worst, tol.derivative, tol.derivative - worst, 0.0, || None)
}

fn limit_report(name: &str, digest: String, value: f64, expected: f64, tol_rel: f64) -> VerificationReport {
    VerificationReport::new(
        name,
        digest,
        value,
        expected,
        -(value - expected).abs(),
        tol_rel * expected.abs(),
        || None,
    )
}

/// Φ(t) = ∫ u^{1/p} v^{1/q} with both `u` and `v` under unit diffusion.
///
/// Passes when Φ is nondecreasing within `tol.mono`, the analytic rate
/// matches finite differences and the rescaled value at `t_limit` equals
/// `(∫u)^{1/p} (∫v)^{1/q}`.
pub fn holder_flow_check(
    u0: &GridFunction,
    v0: &GridFunction,
    p: f64,
    times: &TimeGrid,
    opts: &FlowOptions,
) -> Result<FlowCheck> {
    crate::grid::same_grid(u0.grid(), v0.grid())?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("Hölder exponent must be > 1, got {p}")));
    }
    let q = p / (p - 1.0);
    let grid = *u0.grid();
    let (mu, mv) = (integrate(u0), integrate(v0));
    let center = (mu * center_of(u0) + mv * center_of(v0)) / (mu + mv);
    let room = FRAME_FILL * grid.half_width();
    let extent = radius(u0.samples(), &grid, center, 1e-16).max(radius(v0.samples(), &grid, center, 1e-16));
    let frame = Frame {
        center,
        anchor: grid.midpoint(),
        lambda0: lambda0_for(extent, 1.0, room),
        speed: 1.0,
    };
    let dx = grid.dx();
    let eval = |t: f64| -> Result<(f64, f64)> {
        let (u, lam) = framed(u0, 1.0, t, &frame)?;
        let (v, _) = framed(v0, 1.0, t, &frame)?;
        let value = holder_value_from(&u.values, &v.values, p, q, dx);
        let rate = holder_derivative_from(&u.values, &u.slope, &v.values, &v.slope, p, q, dx) / (lam * lam);
        Ok((value, rate))
    };
    let (values, rates) = split(evaluate_all(times.times(), eval)?);
    let trace = FlowTrace::new(times.times().to_vec(), values, Some(rates))?;
    let (limit_value, _) = eval(opts.t_limit).map_err(|e| e.at_time(times.len(), opts.t_limit))?;

    let tol = &opts.tolerances;
    let digest = |name: &str| {
        InputDigest::new(name)
            .function("u0", u0)
            .function("v0", v0)
            .scalar("p", p)
            .times(times.times())
            .scalar("t_limit", opts.t_limit)
            .finish()
    };
    let reports = vec![
        monotone_report("holder_flow_monotone", digest("holder_flow_monotone"), &trace, true, tol.mono, || {
            diagnose_pair(u0, v0, tol.equality)
        }),
        derivative_report("holder_flow_derivative", digest("holder_flow_derivative"), &trace, tol),
        limit_report(
            "holder_flow_limit",
            digest("holder_flow_limit"),
            limit_value,
            mu.powf(1.0 / p) * mv.powf(1.0 / q),
            tol.limit,
        ),
    ];
    Ok(FlowCheck {
        reports,
        trace,
        limit: None,
    })
}

struct YoungFlow<'a> {
    u0: &'a GridFunction,
    v0: &'a GridFunction,
    triple: YoungTriple,
    pair: DiffusionPair,
    frame_u: Frame,
    frame_v: Frame,
}

impl<'a> YoungFlow<'a> {
    fn new(u0: &'a GridFunction, v0: &'a GridFunction, triple: &YoungTriple, pair: &DiffusionPair) -> Result<Self> {
        crate::grid::same_grid(u0.grid(), v0.grid())?;
        let grid = *u0.grid();
        let (p, q) = (triple.p(), triple.q());
        let (cu, cv) = (center_of(u0), center_of(v0));
        let f0: Vec<f64> = u0.samples().iter().map(|v| v.powf(1.0 / p)).collect();
        let g0: Vec<f64> = v0.samples().iter().map(|v| v.powf(1.0 / q)).collect();
        let extent = radius(&f0, &grid, cu, 1e-16) + radius(&g0, &grid, cv, 1e-16);
        let speed = pair.max_rate();
        // h = F*G tends to a Gaussian of variance (pα + qβ)/(speed·λ0²).
        let asym_var = (p * pair.alpha + q * pair.beta) / speed;
        let room = FRAME_FILL * grid.half_width();
        let lambda0 = lambda0_for(extent, asym_var, room);
        // F and G sit at half the midpoint each, so h = F*G sits at the midpoint.
        let anchor = 0.5 * grid.midpoint();
        let frame = |center| Frame {
            center,
            anchor,
            lambda0,
            speed,
        };
        Ok(YoungFlow {
            u0,
            v0,
            triple: *triple,
            pair: *pair,
            frame_u: frame(cu),
            frame_v: frame(cv),
        })
    }

    /// `(Ψ, dΨ/dt)` at time `t`.
    fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let (u, lam) = framed(self.u0, self.pair.alpha, t, &self.frame_u)?;
        let (v, _) = framed(self.v0, self.pair.beta, t, &self.frame_v)?;
        let (f, df) = power_with_slope(&u.values, &u.slope, 1.0 / self.triple.p());
        let (g, dg) = power_with_slope(&v.values, &v.slope, 1.0 / self.triple.q());
        let terms = young_terms_from(
            self.u0.grid(),
            &f,
            &df,
            &g,
            &dg,
            self.triple.r(),
            CONVOLUTION_NOISE_FLOOR,
        );
        Ok((terms.psi(&self.triple), terms.psi_rate(&self.triple, &self.pair) / (lam * lam)))
    }
}

/// Ψ(t) = ‖u_t^{1/p} * v_t^{1/q}‖_r with `u` diffusing at rate α and `v` at rate β.
///
/// Direct triples pass when Ψ is nondecreasing within `tol.mono`, reverse
/// triples when it is nonincreasing. The rescaled value at `t_limit` is
/// compared with the Gaussian value for the pair times the mass powers, and
/// for pairs on the optimal half-line the matching power of `A_p·A_q·A_{r′}`
/// is recorded.
pub fn young_flow_check(
    u0: &GridFunction,
    v0: &GridFunction,
    triple: &YoungTriple,
    pair: &DiffusionPair,
    times: &TimeGrid,
    opts: &FlowOptions,
) -> Result<FlowCheck> {
    let optimal = on_optimal_line(triple, pair, OPTIMAL_LINE_TOL);
    if !optimal {
        log::warn!(
            "diffusion pair ({}, {}) is off the optimal half-line; monotonicity may fail",
            pair.alpha,
            pair.beta
        );
    }
    let flow = YoungFlow::new(u0, v0, triple, pair)?;
    let (values, rates) = split(evaluate_all(times.times(), |t| flow.eval(t))?);
    let trace = FlowTrace::new(times.times().to_vec(), values, Some(rates))?;
    let (limit_value, _) = flow
        .eval(opts.t_limit)
        .map_err(|e| e.at_time(times.len(), opts.t_limit))?;

    let tol = &opts.tolerances;
    let masses = integrate(u0).powf(1.0 / triple.p()) * integrate(v0).powf(1.0 / triple.q());
    let digest = |name: &str| {
        InputDigest::new(name)
            .function("u0", u0)
            .function("v0", v0)
            .scalar("p", triple.p())
            .scalar("q", triple.q())
            .scalar("alpha", pair.alpha)
            .scalar("beta", pair.beta)
            .times(times.times())
            .scalar("t_limit", opts.t_limit)
            .finish()
    };
    let increasing = triple.regime() == Regime::Direct;
    let mut reports = vec![
        monotone_report(
            "young_flow_monotone",
            digest("young_flow_monotone"),
            &trace,
            increasing,
            tol.mono,
            || diagnose_pair(u0, v0, tol.equality),
        ),
        derivative_report("young_flow_derivative", digest("young_flow_derivative"), &trace, tol),
        limit_report(
            "young_flow_limit",
            digest("young_flow_limit"),
            limit_value,
            gaussian_young_value(triple, pair) * masses,
            tol.limit,
        ),
    ];
    let limit = optimal.then(|| {
        let res = LimitResolution::classify(limit_value / masses, sharp_young_constant(triple, 1), tol.limit);
        let power = if res.exponent == LimitExponent::Half { 0.5 } else { 1.0 };
        let name = format!("young_limit_exponent_{}", res.exponent.label());
        reports.push(limit_report(
            &name,
            digest(&name),
            res.normalized_limit,
            res.constant.powf(power),
            tol.limit,
        ));
        res
    });
    Ok(FlowCheck { reports, trace, limit })
}

/// Reads off the rescaled limit of Ψ under the optimal pair and classifies its exponent.
pub fn resolve_limit_exponent(
    u0: &GridFunction,
    v0: &GridFunction,
    triple: &YoungTriple,
    opts: &FlowOptions,
) -> Result<LimitResolution> {
    let pair = optimal_diffusion(triple);
    let flow = YoungFlow::new(u0, v0, triple, &pair)?;
    let (value, _) = flow.eval(opts.t_limit)?;
    let masses = integrate(u0).powf(1.0 / triple.p()) * integrate(v0).powf(1.0 / triple.q());
    Ok(LimitResolution::classify(
        value / masses,
        sharp_young_constant(triple, 1),
        opts.tolerances.limit,
    ))
}

fn entropy_of(values: &[f64], dx: f64) -> f64 {
    let integrand: Vec<f64> = values
        .iter()
        .map(|&v| if v > EPS_FLOOR { -v * v.ln() } else { 0.0 })
        .collect();
    trapezoid(&integrand, dx)
}

/// Θ(t) = (N(f_t) + N(g_t)) / N(f_t * g_t) with both densities under unit diffusion.
///
/// Passes when Θ is nondecreasing within `tol.mono`, never exceeds
/// `1 + tol.stam`, and the rescaled value at `t_limit` is within `tol.limit` of 1.
pub fn stam_flow_check(f0: &GridFunction, g0: &GridFunction, times: &TimeGrid, opts: &FlowOptions) -> Result<FlowCheck> {
    crate::grid::same_grid(f0.grid(), g0.grid())?;
    let grid = *f0.grid();
    let (cf, cg) = (center_of(f0), center_of(g0));
    let room = FRAME_FILL * grid.half_width();
    let extent = radius(f0.samples(), &grid, cf, 1e-16) + radius(g0.samples(), &grid, cg, 1e-16);
    let lambda0 = lambda0_for(extent, 2.0, room);
    let frame = |center| Frame {
        center,
        anchor: 0.5 * grid.midpoint(),
        lambda0,
        speed: 1.0,
    };
    let (frame_f, frame_g) = (frame(cf), frame(cg));
    let dx = grid.dx();
    let eval = |t: f64| -> Result<(f64, f64)> {
        let (f, lam) = framed(f0, 1.0, t, &frame_f)?;
        let (g, _) = framed(g0, 1.0, t, &frame_g)?;
        let mut k = convolve_raw(&grid, &f.values, &g.values);
        let mut dk = convolve_raw(&grid, &f.slope, &g.values);
        let cut = CONVOLUTION_NOISE_FLOOR * k.iter().copied().fold(0.0, f64::max);
        for i in 0..k.len() {
            if k[i] <= cut {
                k[i] = 0.0;
                dk[i] = 0.0;
            }
        }
        let (nf, ng, nk) = (
            (2.0 * entropy_of(&f.values, dx)).exp(),
            (2.0 * entropy_of(&g.values, dx)).exp(),
            (2.0 * entropy_of(&k, dx)).exp(),
        );
        let (i_f, i_g, i_k) = (
            fisher_from(&f.values, &f.slope, dx),
            fisher_from(&g.values, &g.slope, dx),
            fisher_from(&k, &dk, dx),
        );
        let theta = (nf + ng) / nk;
        let rate = 2.0 * ((nf * i_f + ng * i_g) - 2.0 * (nf + ng) * i_k) / nk / (lam * lam);
        Ok((theta, rate))
    };
    let (values, rates) = split(evaluate_all(times.times(), eval)?);
    let trace = FlowTrace::new(times.times().to_vec(), values, Some(rates))?;
    let (limit_value, _) = eval(opts.t_limit).map_err(|e| e.at_time(times.len(), opts.t_limit))?;

    let tol = &opts.tolerances;
    let digest = |name: &str| {
        InputDigest::new(name)
            .function("f0", f0)
            .function("g0", g0)
            .times(times.times())
            .scalar("t_limit", opts.t_limit)
            .finish()
    };
    let peak = trace.values.iter().copied().fold(limit_value, f64::max);
    let reports = vec![
        monotone_report("stam_flow_monotone", digest("stam_flow_monotone"), &trace, true, tol.mono, || {
            diagnose_pair(f0, g0, tol.equality)
        }),
        derivative_report("stam_flow_derivative", digest("stam_flow_derivative"), &trace, tol),
        VerificationReport::new(
            "stam_upper_bound",
            digest("stam_upper_bound"),
            peak,
            1.0,
            1.0 - peak,
            tol.stam,
            || diagnose_pair(f0, g0, tol.equality),
        ),
        limit_report("stam_flow_limit", digest("stam_flow_limit"), limit_value, 1.0, tol.limit),
    ];
    Ok(FlowCheck {
        reports,
        trace,
        limit: None,
    })
}

/// N(f * M_{2t}) along `times`; passes when every second difference is at most `tol.concavity`.
pub fn entropy_power_concavity_check(f0: &GridFunction, times: &TimeGrid, opts: &FlowOptions) -> Result<FlowCheck> {
    if times.len() < 3 {
        return Err(Error::Domain(format!(
            "concavity needs at least 3 times, got {}",
            times.len()
        )));
    }
    let grid = *f0.grid();
    let c = center_of(f0);
    let room = FRAME_FILL * grid.half_width();
    let frame = Frame {
        center: c,
        anchor: grid.midpoint(),
        lambda0: lambda0_for(radius(f0.samples(), &grid, c, 1e-16), 1.0, room),
        speed: 1.0,
    };
    let dx = grid.dx();
    let eval = |t: f64| -> Result<(f64, f64)> {
        let (u, lam) = framed(f0, 1.0, t, &frame)?;
        let n_frame = (2.0 * entropy_of(&u.values, dx)).exp();
        let fisher = fisher_from(&u.values, &u.slope, dx);
        Ok((lam * lam * n_frame, 2.0 * n_frame * fisher))
    };
    let (values, rates) = split(evaluate_all(times.times(), eval)?);
    let trace = FlowTrace::new(times.times().to_vec(), values, Some(rates))?;
    let tol = &opts.tolerances;
    let digest = |name: &str| InputDigest::new(name).function("f0", f0).times(times.times()).finish();
    let worst = trace
        .second_differences()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let reports = vec![
        VerificationReport::new(
            "entropy_power_concavity",
            digest("entropy_power_concavity"),
            worst,
            0.0,
            -worst,
            tol.concavity,
            || diagnose_one(f0, tol.equality),
        ),
        derivative_report("entropy_power_derivative", digest("entropy_power_derivative"), &trace, tol),
    ];
    Ok(FlowCheck {
        reports,
        trace,
        limit: None,
    })
}

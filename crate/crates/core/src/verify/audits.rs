//! Static inequality audits: sharp Young, generalized Blachman and entropy power.

use crate::constants::{sharp_young_constant, Regime, YoungTriple};
use crate::error::{Error, Result};
use crate::functionals::{
    entropy_power, slope_of, young_terms_from, Differentiation, CONVOLUTION_NOISE_FLOOR, UNIT_MASS_TOL,
};
use crate::grid::{convolve_raw, integrate, lp_norm, same_grid, trapezoid, GridFunction};

use super::equality::equality_case_detect_with;
use super::report::{EqualityDiagnosis, InputDigest, Tolerances, VerificationReport};

fn diagnose_pair(f: &GridFunction, g: &GridFunction, threshold: f64) -> Option<EqualityDiagnosis> {
    let a = equality_case_detect_with(f, threshold).ok()?;
    let b = equality_case_detect_with(g, threshold).ok()?;
    Some(EqualityDiagnosis {
        is_gaussian: a.is_gaussian && b.is_gaussian,
        fitted_variance: a.fitted_variance,
        fit_residual: a.fit_residual.max(b.fit_residual),
    })
}

/// `‖f*g‖_r`, with convolution round-off below `1e-14·max` dropped.
fn convolution_norm(f: &GridFunction, g: &GridFunction, r: f64) -> f64 {
    let mut h = convolve_raw(f.grid(), f.samples(), g.samples());
    let cut = CONVOLUTION_NOISE_FLOOR * h.iter().copied().fold(0.0, f64::max);
    for v in h.iter_mut() {
        if *v <= cut {
            *v = 0.0;
        }
    }
    let powed: Vec<f64> = h.iter().map(|v| v.powf(r)).collect();
    trapezoid(&powed, f.grid().dx()).powf(1.0 / r)
}

/// `‖f*g‖_r / (‖f‖_p ‖g‖_q)`.
pub fn young_ratio(f: &GridFunction, g: &GridFunction, triple: &YoungTriple) -> Result<f64> {
    same_grid(f.grid(), g.grid())?;
    let denom = lp_norm(f, triple.p())? * lp_norm(g, triple.q())?;
    if denom <= 0.0 {
        return Err(Error::Domain("Young ratio of a vanishing function".into()));
    }
    Ok(convolution_norm(f, g, triple.r()) / denom)
}

/// `‖f*g‖_r ≤ C‖f‖_p‖g‖_q` (direct) or `≥` (reverse), `C = A_p A_q A_{r′}`.
///
/// `lhs = ‖f*g‖_r`, `rhs = C‖f‖_p‖g‖_q`; the tolerance is `tol.young·rhs`.
pub fn young_check(f: &GridFunction, g: &GridFunction, triple: &YoungTriple, tol: &Tolerances) -> Result<VerificationReport> {
    same_grid(f.grid(), g.grid())?;
    let lhs = convolution_norm(f, g, triple.r());
    let rhs = sharp_young_constant(triple, 1) * lp_norm(f, triple.p())? * lp_norm(g, triple.q())?;
    let margin = match triple.regime() {
        Regime::Direct => rhs - lhs,
        Regime::Reverse => lhs - rhs,
    };
    let digest = InputDigest::new("young")
        .function("f", f)
        .function("g", g)
        .scalar("p", triple.p())
        .scalar("q", triple.q())
        .finish();
    Ok(VerificationReport::new("young", digest, lhs, rhs, margin, tol.young * rhs, || {
        diagnose_pair(f, g, tol.equality)
    }))
}

/// `(a² + b² + 2abr)∫h^{r−2}(h′)² ≤ a²∫h^{r−1}A(f,g) + b²∫h^{r−1}B(f,g)`, `h = f*g`.
///
/// Inputs of any mass are accepted; their masses enter the digest. Slopes
/// are spectral and the tolerance is `tol.blachman·rhs`.
pub fn blachman_lemma_check(
    f: &GridFunction,
    g: &GridFunction,
    a: f64,
    b: f64,
    r: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    same_grid(f.grid(), g.grid())?;
    for (name, v) in [("a", a), ("b", b), ("r", r)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
        }
    }
    let df = slope_of(f, Differentiation::Spectral);
    let dg = slope_of(g, Differentiation::Spectral);
    let terms = young_terms_from(f.grid(), f.samples(), &df, g.samples(), &dg, r, CONVOLUTION_NOISE_FLOOR);
    let lhs = (a * a + b * b + 2.0 * a * b * r) * terms.gradient;
    let rhs = a * a * terms.cross_a + b * b * terms.cross_b;
    let digest = InputDigest::new("blachman")
        .function("f", f)
        .function("g", g)
        .scalar("mass_f", integrate(f))
        .scalar("mass_g", integrate(g))
        .scalar("a", a)
        .scalar("b", b)
        .scalar("r", r)
        .finish();
    Ok(VerificationReport::new(
        "blachman",
        digest,
        lhs,
        rhs,
        rhs - lhs,
        tol.blachman * rhs.abs(),
        || diagnose_pair(f, g, tol.equality),
    ))
}

/// `N(f*g) ≥ N(f) + N(g)` for unit-mass densities.
///
/// `lhs = N(f) + N(g)`, `rhs = N(f*g)`; the tolerance is `tol.epi·lhs`.
pub fn epi_check(f: &GridFunction, g: &GridFunction, tol: &Tolerances) -> Result<VerificationReport> {
    same_grid(f.grid(), g.grid())?;
    for (name, h) in [("f", f), ("g", g)] {
        let m = integrate(h);
        if (m - 1.0).abs() > UNIT_MASS_TOL {
            return Err(Error::Domain(format!("{name} must have unit mass, has {m}")));
        }
    }
    let k = GridFunction::from_clamped(*f.grid(), convolve_raw(f.grid(), f.samples(), g.samples()));
    let lhs = entropy_power(f) + entropy_power(g);
    let rhs = entropy_power(&k);
    let digest = InputDigest::new("epi").function("f", f).function("g", g).finish();
    Ok(VerificationReport::new("epi", digest, lhs, rhs, rhs - lhs, tol.epi * lhs, || {
        diagnose_pair(f, g, tol.equality)
    }))
}

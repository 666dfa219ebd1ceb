//! Exponent bookkeeping, sharp Young constants and the Γ stationarity analysis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum rule `1/p + 1/q = 1 + 1/r` and on `1/p − 1/q′ = 1/r`.
pub const SUM_RULE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `1 < p, q, r < ∞`: `‖f*g‖_r ≤ C‖f‖_p‖g‖_q`.
    Direct,
    /// `0 < p, q, r < 1`: the inequality reverses.
    Reverse,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Direct => "direct",
            Regime::Reverse => "reverse",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Regime> {
        match s {
            "direct" => Ok(Regime::Direct),
            "reverse" => Ok(Regime::Reverse),
            other => Err(Error::Domain(format!(
                "regime must be `direct` or `reverse`, got `{other}`"
            ))),
        }
    }
}

/// `m/(m − 1)`.
pub fn dual_exponent(m: f64) -> Result<f64> {
    if !m.is_finite() || m == 0.0 || m == 1.0 {
        return Err(Error::Domain(format!("no dual exponent for m = {m}")));
    }
    Ok(m / (m - 1.0))
}

/// Exponents with `1/p + 1/q = 1 + 1/r`, all in (1, ∞) or all in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungTriple {
    p: f64,
    q: f64,
    r: f64,
    regime: Regime,
    p_dual: f64,
    q_dual: f64,
    r_dual: f64,
}

impl YoungTriple {
    /// Derives `r` from the sum rule.
    pub fn new(p: f64, q: f64) -> Result<YoungTriple> {
        let s = 1.0 / p + 1.0 / q - 1.0;
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!(
                "(p, q) = ({p}, {q}) admits no r > 0 with 1/p + 1/q = 1 + 1/r"
            )));
        }
        YoungTriple::with_r(p, q, 1.0 / s)
    }

    /// Validates an explicit triple.
    pub fn with_r(p: f64, q: f64, r: f64) -> Result<YoungTriple> {
        for (name, m) in [("p", p), ("q", q), ("r", r)] {
            if !m.is_finite() || m <= 0.0 || m == 1.0 {
                return Err(Error::Domain(format!("{name} = {m} is not in (0, 1) ∪ (1, ∞)")));
            }
        }
        let regime = if p > 1.0 && q > 1.0 && r > 1.0 {
            Regime::Direct
        } else if p < 1.0 && q < 1.0 && r < 1.0 {
            Regime::Reverse
        } else {
            return Err(Error::Domain(format!(
                "mixed regime: (p, q, r) = ({p}, {q}, {r})"
            )));
        };
        let rule = 1.0 / p + 1.0 / q - 1.0 - 1.0 / r;
        if rule.abs() > SUM_RULE_TOL {
            return Err(Error::Domain(format!(
                "1/p + 1/q − 1 − 1/r = {rule:e} violates the sum rule"
            )));
        }
        let t = YoungTriple {
            p,
            q,
            r,
            regime,
            p_dual: dual_exponent(p)?,
            q_dual: dual_exponent(q)?,
            r_dual: dual_exponent(r)?,
        };
        let id1 = (1.0 / p - 1.0 / t.q_dual - 1.0 / r)
            .abs()
            .max((1.0 / q - 1.0 / t.p_dual - 1.0 / r).abs());
        if id1 > SUM_RULE_TOL {
            return Err(Error::Domain(format!("dual identity violated by {id1:e}")));
        }
        Ok(t)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn p_dual(&self) -> f64 {
        self.p_dual
    }
    pub fn q_dual(&self) -> f64 {
        self.q_dual
    }
    pub fn r_dual(&self) -> f64 {
        self.r_dual
    }

    /// The triple with `p` and `q` exchanged.
    pub fn swapped(&self) -> YoungTriple {
        YoungTriple {
            p: self.q,
            q: self.p,
            p_dual: self.q_dual,
            q_dual: self.p_dual,
            ..*self
        }
    }
}

/// Diffusion rates `(α, β)` for the two heat flows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionPair {
    pub alpha: f64,
    pub beta: f64,
}

impl DiffusionPair {
    pub fn new(alpha: f64, beta: f64) -> Result<DiffusionPair> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Domain(format!(
                "diffusion rates must be positive, got ({alpha}, {beta})"
            )));
        }
        Ok(DiffusionPair { alpha, beta })
    }

    /// Representative with `α + β = 1`.
    pub fn normalized(&self) -> DiffusionPair {
        let s = self.alpha + self.beta;
        DiffusionPair {
            alpha: self.alpha / s,
            beta: self.beta / s,
        }
    }

    pub fn scaled(&self, c: f64) -> DiffusionPair {
        DiffusionPair {
            alpha: c * self.alpha,
            beta: c * self.beta,
        }
    }

    pub fn max_rate(&self) -> f64 {
        self.alpha.max(self.beta)
    }
}

/// `A_m² = |m|^{1/m} / |m′|^{1/m′}` for any finite `m ∉ {0, 1}`.
///
/// For `m > 1` this is the classical constant. For `0 < m < 1` and for the
/// negative duals met in the reverse regime the moduli enter only the bases,
/// which is the form Gaussian saturation requires.
pub fn a_constant(m: f64) -> Result<f64> {
    let md = dual_exponent(m)?;
    let log_sq = m.abs().ln() / m - md.abs().ln() / md;
    Ok((0.5 * log_sq).exp())
}

/// `(A_p·A_q·A_{r′})^n`.
pub fn sharp_young_constant(triple: &YoungTriple, n: u32) -> f64 {
    let a = |m: f64| a_constant(m).expect("valid triple has admissible exponents");
    (a(triple.p) * a(triple.q) * a(triple.r_dual)).powi(n as i32)
}

/// `(q′/p, p′/q)`, with moduli of the duals in the reverse regime.
pub fn optimal_diffusion(triple: &YoungTriple) -> DiffusionPair {
    DiffusionPair {
        alpha: triple.q_dual.abs() / triple.p,
        beta: triple.p_dual.abs() / triple.q,
    }
}

/// Slope `β/α` of the half-line of stationary points of Γ.
pub fn optimal_slope(triple: &YoungTriple) -> f64 {
    (triple.p / triple.q_dual.abs()) * (triple.p_dual.abs() / triple.q)
}

/// Whether `β/α` matches the optimal slope to relative precision `tol`.
pub fn on_optimal_line(triple: &YoungTriple, pair: &DiffusionPair, tol: f64) -> bool {
    let slope = optimal_slope(triple);
    ((pair.beta / pair.alpha - slope) / slope).abs() <= tol
}

/// Direct regime: `(α+β)(r−1) − (α p/p′ + β q/q′ + 2√(αβ)·√(pq/(p′q′))·r)`.
/// Reverse regime: `(α+β)(1−r) − (α p/|p′| + β q/|q′| + 2√(αβ)·√(pq/(|p′||q′|))·r)`.
pub fn gamma_function(alpha: f64, beta: f64, triple: &YoungTriple) -> f64 {
    let (p, q, r) = (triple.p, triple.q, triple.r);
    let (pd, qd) = (triple.p_dual.abs(), triple.q_dual.abs());
    let cross = 2.0 * (alpha * beta).sqrt() * (p * q / (pd * qd)).sqrt() * r;
    let lead = match triple.regime {
        Regime::Direct => r - 1.0,
        Regime::Reverse => 1.0 - r,
    };
    (alpha + beta) * lead - (alpha * p / pd + beta * q / qd + cross)
}

/// `‖M_α^{1/p} * M_β^{1/q}‖_r` in closed form.
///
/// `M_σ^{1/p} = (2πσ)^{(1−1/p)/2} √p · M_{pσ}`, Gaussians convolve by adding
/// variances, and `∫M_s^r = (2πs)^{(1−r)/2} / √r`.
pub fn gaussian_young_value(triple: &YoungTriple, pair: &DiffusionPair) -> f64 {
    let (p, q, r) = (triple.p, triple.q, triple.r);
    let (a, b) = (pair.alpha, pair.beta);
    let ln_power = |sigma: f64, m: f64| 0.5 * (1.0 - 1.0 / m) * (2.0 * PI * sigma).ln() + 0.5 * m.ln();
    let s = p * a + q * b;
    let ln_norm = (0.5 * (1.0 - r) * (2.0 * PI * s).ln() - 0.5 * r.ln()) / r;
    (ln_power(a, p) + ln_power(b, q) + ln_norm).exp()
}

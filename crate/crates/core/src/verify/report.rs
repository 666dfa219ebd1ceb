use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Gaussianity diagnosis attached to near-equality reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityDiagnosis {
    pub is_gaussian: bool,
    pub fitted_variance: f64,
    pub fit_residual: f64,
}

/// Pass/fail record of one audit. `margin ≥ 0` means the inequality holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub inputs_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub equality_diagnosis: Option<EqualityDiagnosis>,
}

impl VerificationReport {
    /// `passed ⇔ margin ≥ −tolerance`; `diagnose` runs only when `|margin| ≤ 10·tolerance`.
    pub fn new(
        check_name: impl Into<String>,
        inputs_digest: String,
        lhs: f64,
        rhs: f64,
        margin: f64,
        tolerance: f64,
        diagnose: impl FnOnce() -> Option<EqualityDiagnosis>,
    ) -> VerificationReport {
        let equality_diagnosis = if margin.abs() <= 10.0 * tolerance {
            diagnose()
        } else {
            None
        };
        VerificationReport {
            check_name: check_name.into(),
            inputs_digest,
            lhs,
            rhs,
            margin,
            tolerance,
            passed: margin >= -tolerance,
            equality_diagnosis,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// SHA-256 over a canonical byte encoding of inputs and parameters.
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(check_name: &str) -> InputDigest {
        let mut h = Sha256::new();
        h.update((check_name.len() as u64).to_le_bytes());
        h.update(check_name.as_bytes());
        InputDigest(h)
    }

    pub fn scalar(mut self, label: &str, x: f64) -> InputDigest {
        self.0.update(label.as_bytes());
        self.0.update(x.to_le_bytes());
        self
    }

    pub fn function(mut self, label: &str, f: &GridFunction) -> InputDigest {
        let g = f.grid();
        self.0.update(label.as_bytes());
        self.0.update(g.x_min().to_le_bytes());
        self.0.update(g.x_max().to_le_bytes());
        self.0.update((g.n_points() as u64).to_le_bytes());
        for v in f.samples() {
            self.0.update(v.to_le_bytes());
        }
        self
    }

    pub fn times(mut self, times: &[f64]) -> InputDigest {
        self.0.update(b"times");
        self.0.update((times.len() as u64).to_le_bytes());
        for t in times {
            self.0.update(t.to_le_bytes());
        }
        self
    }

    pub fn finish(self) -> String {
        self.0
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Tolerances for every audit, overridable by key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Per-step monotonicity slack, relative to the initial value.
    pub mono: f64,
    /// Relative error of the rescaled value at `t_limit`.
    pub limit: f64,
    /// Relative disagreement between analytic and finite-difference rates.
    pub derivative: f64,
    /// Rates with smaller modulus are not compared.
    pub derivative_floor: f64,
    /// Relative slack of the Young inequality.
    pub young: f64,
    /// Relative slack of the generalized Blachman inequality.
    pub blachman: f64,
    /// Relative slack of the entropy power inequality.
    pub epi: f64,
    /// Absolute slack of `Θ ≤ 1`.
    pub stam: f64,
    /// Absolute slack on positive second differences of the entropy power.
    pub concavity: f64,
    /// Fit-residual threshold of the Gaussian detector.
    pub equality: f64,
    /// Relative slack of the Hölder bound.
    pub holder: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mono: 1e-8,
            limit: 1e-3,
            derivative: 1e-3,
            derivative_floor: 1e-8,
            young: 1e-9,
            blachman: 1e-6,
            epi: 1e-6,
            stam: 1e-6,
            concavity: 1e-5,
            equality: 1e-4,
            holder: 1e-9,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 11] = [
        "mono",
        "limit",
        "derivative",
        "derivative_floor",
        "young",
        "blachman",
        "epi",
        "stam",
        "concavity",
        "equality",
        "holder",
    ];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!("tolerance {key} must be finite and >= 0, got {value}")));
        }
        let slot = match key {
            "mono" => &mut self.mono,
            "limit" => &mut self.limit,
            "derivative" => &mut self.derivative,
            "derivative_floor" => &mut self.derivative_floor,
            "young" => &mut self.young,
            "blachman" => &mut self.blachman,
            "epi" => &mut self.epi,
            "stam" => &mut self.stam,
            "concavity" => &mut self.concavity,
            "equality" => &mut self.equality,
            "holder" => &mut self.holder,
            other => {
                return Err(Error::Domain(format!(
                    "unknown tolerance `{other}` (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("mono", self.mono),
            ("limit", self.limit),
            ("derivative", self.derivative),
            ("derivative_floor", self.derivative_floor),
            ("young", self.young),
            ("blachman", self.blachman),
            ("epi", self.epi),
            ("stam", self.stam),
            ("concavity", self.concavity),
            ("equality", self.equality),
            ("holder", self.holder),
        ]
    }
}

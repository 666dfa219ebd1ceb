//! Monotonicity checks along heat flows, static inequality audits, Gaussian
//! equality detection and seeded test densities.

mod audits;
mod equality;
mod flows;
mod random;
mod report;

pub use audits::{blachman_lemma_check, epi_check, young_check, young_ratio};
pub use equality::{equality_case_detect, equality_case_detect_with, GaussianFit, MIN_SUPPORT, SUPPORT_FLOOR};
pub use flows::{
    entropy_power_concavity_check, holder_flow_check, max_derivative_mismatch, resolve_limit_exponent,
    stam_flow_check, young_flow_check, FlowCheck, FlowOptions, LimitExponent, LimitResolution, VALUE_NOISE_FLOOR,
};
pub use random::{random_density, random_density_on, random_pair, random_pair_on, DensityFamily};
pub use report::{EqualityDiagnosis, InputDigest, Tolerances, VerificationReport};

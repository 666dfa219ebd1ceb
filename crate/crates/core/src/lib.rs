//! Heat-flow machinery for sharp functional inequalities on the line.
//!
//! Nonnegative functions live on uniform grids ([`grid`]) and evolve under
//! heat semigroups with arbitrary diffusion rates ([`heat`]). The Hölder,
//! Young and Stam functionals and their time derivatives ([`functionals`])
//! are traced along these flows and audited against the sharp constants of
//! [`constants`] by the checks in [`verify`].

pub mod cli;
pub mod constants;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod heat;
mod spectral;
pub mod verify;

pub use constants::{
    a_constant, dual_exponent, gamma_function, gaussian_young_value, on_optimal_line, optimal_diffusion,
    optimal_slope, sharp_young_constant, DiffusionPair, Regime, YoungTriple,
};
pub use error::{Error, Result};
pub use functionals::{Differentiation, FlowTrace, YoungTerms};
pub use grid::{convolve, derivative, dilate, integrate, lp_norm, make_gaussian, pointwise_pow, Grid, GridFunction, SignedFunction};
pub use heat::{evolve, evolve_self_similar, heat_trace, rescale_self_similar, DiffusionCoefficient, TimeGrid};

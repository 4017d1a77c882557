//! Simulation and estimation for the two-star exponential random graph model.
//!
//! The crate covers the model itself ([`model`]), its large-`n` limit
//! constants ([`asymptotics`]), exact MCMC samplers ([`sampler`]), the
//! moment-type estimators of both parameters ([`estimators`]) and a numerical
//! check of the Laplace-method integrals behind the limit theory
//! ([`laplace`]).

pub mod asymptotics;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod fmt;
pub mod laplace;
pub mod model;
pub mod sampler;

pub use error::{Error, Result};
pub use model::{Beta, Graph, Theta};

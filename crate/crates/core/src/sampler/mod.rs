//! Exact MCMC for the two-star model.
//!
//! The auxiliary-variable sampler attaches a Gaussian field `phi` to the
//! vertices so that, given `phi`, all edges are independent; the Glauber
//! sampler resamples one edge at a time and serves as an independent check.

mod chain;
mod run;

pub use chain::{chain_rng, edge_probability, joint_log_weight, log_f, ChainState, InitPolicy, SamplerKind};
pub use run::{run, Regime, SampleRecord, SampleSet, SamplerConfig, CSV_HEADER, DEFAULT_BURN_IN};

//! Graphs, sufficient statistics, the two-star Hamiltonian and a brute-force
//! solution of the model for small `n`.

mod exact;
mod graph;
mod params;

pub use exact::{enumerate_exact, enumerate_uniform, ExactModel, Moments, MAX_EXACT_N};
pub use graph::{pair_count, Graph};
pub use params::{log_weight, log_weight_degrees, Beta, Theta};

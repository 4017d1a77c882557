use serde::Serialize;

use super::graph::{pair_count, Graph};
use super::params::{log_weight, Beta};
use crate::error::{Error, Result};
use crate::fmt::json_real;

/// Largest vertex count accepted by exact enumeration (2^15 graphs).
pub const MAX_EXACT_N: usize = 6;

/// The two-star model solved by brute force over every labeled graph.
#[derive(Clone, Debug)]
pub struct ExactModel {
    n: usize,
    beta: Option<Beta>,
    /// Log weight of graph `mask`, indexed by its pair bitmask.
    log_weights: Vec<f64>,
    log_z: f64,
    edge_pmf: Vec<f64>,
    moments: Moments,
}

/// Exact first and second moments of E and T.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Moments {
    #[serde(serialize_with = "json_real")]
    pub mean_edges: f64,
    #[serde(serialize_with = "json_real")]
    pub var_edges: f64,
    #[serde(serialize_with = "json_real")]
    pub mean_two_stars: f64,
    #[serde(serialize_with = "json_real")]
    pub var_two_stars: f64,
}

fn check_n(n: usize) -> Result<()> {
    if (2..=MAX_EXACT_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::EnumerationRange { n, max: MAX_EXACT_N })
    }
}

fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    (0..1u64 << pair_count(n)).map(move |mask| Graph::from_mask(n, mask))
}

/// Enumerates all `2^{n(n-1)/2}` graphs on `n` vertices under `beta`.
pub fn enumerate_exact(n: usize, beta: Beta) -> Result<ExactModel> {
    check_n(n)?;
    Ok(ExactModel::build(n, Some(beta), all_graphs(n).map(|g| log_weight(&g, beta))))
}

/// Enumeration with every graph weighted equally (the Erdős–Rényi `p = 1/2`
/// law), computed without touching the Hamiltonian.
pub fn enumerate_uniform(n: usize) -> Result<ExactModel> {
    check_n(n)?;
    Ok(ExactModel::build(n, None, std::iter::repeat_n(0.0, 1 << pair_count(n))))
}

impl ExactModel {
    fn build(n: usize, beta: Option<Beta>, log_weights: impl Iterator<Item = f64>) -> Self {
        let log_weights: Vec<f64> = log_weights.collect();
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
        let total: f64 = scaled.iter().sum();
        let log_z = max + total.ln();

        let mut edge_pmf = vec![0.0; pair_count(n) + 1];
        let (mut e1, mut e2, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0);
        for (g, w) in all_graphs(n).zip(&scaled) {
            let p = w / total;
            let e = g.edge_count() as f64;
            let t = g.two_star_count() as f64;
            edge_pmf[e as usize] += p;
            e1 += p * e;
            e2 += p * e * e;
            t1 += p * t;
            t2 += p * t * t;
        }
        let moments = Moments {
            mean_edges: e1,
            var_edges: e2 - e1 * e1,
            mean_two_stars: t1,
            var_two_stars: t2 - t1 * t1,
        };
        ExactModel { n, beta, log_weights, log_z, edge_pmf, moments }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` for the uniform-weight model.
    pub fn beta(&self) -> Option<Beta> {
        self.beta
    }

    /// Unnormalized weight of `g`, `exp(log_weight(g))`.
    pub fn weight(&self, g: &Graph) -> f64 {
        assert_eq!(g.n(), self.n);
        let mut mask = 0u64;
        for (i, j) in g.edges() {
            mask |= 1 << g.pair_index(i, j);
        }
        self.log_weights[mask as usize].exp()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalizing constant `Z_n`.
    pub fn partition(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    /// Probability of each edge count `0..=n(n-1)/2`.
    pub fn edge_pmf(&self) -> &[f64] {
        &self.edge_pmf
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }
}

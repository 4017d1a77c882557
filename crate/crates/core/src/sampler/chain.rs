use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Beta, Graph, Theta};

/// How a chain's first configuration is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "p")]
pub enum InitPolicy {
    /// Every edge present independently with probability 1/2.
    FairCoin,
    /// Complete graph (all spins +1).
    AllPlus,
    /// Empty graph (all spins -1).
    AllMinus,
    /// Every edge present independently with probability `p`.
    ErdosRenyi(f64),
}

impl InitPolicy {
    pub(crate) fn validate(self) -> Result<()> {
        match self {
            InitPolicy::ErdosRenyi(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::Config(format!("erdos-renyi init needs p in [0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }
}

/// Which transition kernel advances the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Auxiliary Gaussian field: draw `phi | y`, then every edge `y | phi`.
    Auxiliary,
    /// Systematic-scan single-edge heat bath on the graph.
    Glauber,
}

/// One MCMC chain.
///
/// Spins are `y_ij = 2 x_ij - 1` where `x` is the stored graph, and
/// `k_i = sum_{j != i} y_ij = 2 d_i - (n - 1)`.
pub struct ChainState {
    theta: Theta,
    beta: Beta,
    graph: Graph,
    k: Vec<i64>,
    phi: Vec<f64>,
    rng: ChaCha8Rng,
    sweeps_done: u64,
}

/// Random stream for chain `stream` under master seed `seed`.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn spin_sums(g: &Graph) -> Vec<i64> {
    let n = g.n() as i64;
    g.degrees().into_iter().map(|d| 2 * d as i64 - (n - 1)).collect()
}

impl ChainState {
    pub fn new(n: usize, theta: Theta, init: InitPolicy, seed: u64, stream: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {n}")));
        }
        init.validate()?;
        let mut rng = chain_rng(seed, stream);
        let graph = match init {
            InitPolicy::AllPlus => Graph::complete(n),
            InitPolicy::AllMinus => Graph::empty(n),
            InitPolicy::FairCoin | InitPolicy::ErdosRenyi(_) => {
                let p = if let InitPolicy::ErdosRenyi(p) = init { p } else { 0.5 };
                let mut g = Graph::empty(n);
                for i in 0..n {
                    for j in i + 1..n {
                        if rng.random::<f64>() < p {
                            g.set_edge(i, j, true);
                        }
                    }
                }
                g
            }
        };
        Ok(Self::from_graph(graph, theta, rng))
    }

    /// Starts a chain at a given graph.
    pub fn from_graph(graph: Graph, theta: Theta, rng: ChaCha8Rng) -> Self {
        let k = spin_sums(&graph);
        let scale = (graph.n() - 1) as f64;
        let phi = k.iter().map(|&ki| ki as f64 / scale).collect();
        ChainState { theta, beta: theta.to_beta(), graph, k, phi, rng, sweeps_done: 0 }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> &[i64] {
        &self.k
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweeps_done
    }

    /// `y_ij` in {-1, +1}; zero on the diagonal.
    pub fn spin(&self, i: usize, j: usize) -> i8 {
        if i == j {
            0
        } else if self.graph.has_edge(i, j) {
            1
        } else {
            -1
        }
    }

    /// Degrees implied by the maintained spin sums.
    pub fn degrees(&self) -> Vec<u64> {
        let n = self.n() as i64;
        self.k.iter().map(|&k| ((k + n - 1) / 2) as u64).collect()
    }

    /// Spin sums recomputed from the graph, for bookkeeping checks.
    pub fn recompute_k(&self) -> Vec<i64> {
        spin_sums(&self.graph)
    }

    /// Overwrites the auxiliary field.
    pub fn set_phi(&mut self, phi: &[f64]) {
        assert_eq!(phi.len(), self.n());
        self.phi.copy_from_slice(phi);
    }

    /// Draws each `phi_i ~ N(k_i/(n-1), 1/((n-1) theta2))` independently.
    pub fn update_phi(&mut self) {
        let scale = (self.n() - 1) as f64;
        let sd = 1.0 / (scale * self.theta.theta2()).sqrt();
        for (p, &k) in self.phi.iter_mut().zip(&self.k) {
            let z: f64 = self.rng.sample(StandardNormal);
            *p = k as f64 / scale + sd * z;
        }
    }

    /// Redraws every edge independently given `phi`:
    /// `P(y_ij = +1) = e^w / (2 cosh w)` with `w = theta2 (phi_i + phi_j) + theta1`.
    pub fn update_y(&mut self) {
        let n = self.n();
        let (t1, t2) = (self.theta.theta1(), self.theta.theta2());
        // 1/P(+1) - 1 = exp(-2w) = r_i r_j
        let r: Vec<f64> = self.phi.iter().map(|&p| (-2.0 * t2 * p - t1).exp()).collect();
        let mut degrees = vec![0i64; n];
        let words = self.graph.words_mut();
        words.fill(0);
        let mut idx = 0usize;
        for i in 0..n {
            let ri = r[i];
            let mut di = 0i64;
            for j in i + 1..n {
                let u: f64 = self.rng.random();
                if u * (1.0 + ri * r[j]) < 1.0 {
                    words[idx >> 6] |= 1u64 << (idx & 63);
                    di += 1;
                    degrees[j] += 1;
                }
                idx += 1;
            }
            degrees[i] += di;
        }
        let m = n as i64 - 1;
        for (k, d) in self.k.iter_mut().zip(degrees) {
            *k = 2 * d - m;
        }
    }

    /// One auxiliary-variable sweep: the `phi` block, then the `y` block.
    pub fn gibbs_sweep(&mut self) {
        self.update_phi();
        self.update_y();
        self.sweeps_done += 1;
    }

    /// One systematic pass over all pairs, each resampled from its exact
    /// conditional. With `d'` the degrees excluding the pair, the log-odds of
    /// the edge are `beta2/(n-1) (d'_i + d'_j) + beta1 + beta2/(n-1)`.
    pub fn glauber_sweep(&mut self) {
        let n = self.n();
        let m = n as i64 - 1;
        let s = self.beta.beta2() / m as f64;
        let base = self.beta.beta1() + s;
        for i in 0..n {
            for j in i + 1..n {
                let present = self.graph.has_edge(i, j);
                let own = i64::from(present);
                let di = (self.k[i] + m) / 2 - own;
                let dj = (self.k[j] + m) / 2 - own;
                let log_odds = s * (di + dj) as f64 + base;
                // P(x = 1) = 1 / (1 + e^{-L})
                let u: f64 = self.rng.random();
                let next = u * (1.0 + (-log_odds).exp()) < 1.0;
                if next != present {
                    self.graph.set_edge(i, j, next);
                    let delta = if next { 2 } else { -2 };
                    self.k[i] += delta;
                    self.k[j] += delta;
                }
            }
        }
        self.sweeps_done += 1;
    }

    pub fn sweep(&mut self, kind: SamplerKind) {
        match kind {
            SamplerKind::Auxiliary => self.gibbs_sweep(),
            SamplerKind::Glauber => self.glauber_sweep(),
        }
    }
}

/// `P(y_ij = +1 | phi)` for the auxiliary sampler.
pub fn edge_probability(phi_i: f64, phi_j: f64, theta: Theta) -> f64 {
    let w = theta.theta2() * (phi_i + phi_j) + theta.theta1();
    1.0 / (1.0 + (-2.0 * w).exp())
}

/// Logarithm of the unnormalized marginal density of the auxiliary field,
/// `-sum_{i<j} p(phi_i, phi_j)` with
/// `p(x, y) = theta2/2 (x^2 + y^2) - log cosh(theta2 (x + y) + theta1)`.
pub fn log_f(phi: &[f64], theta: Theta) -> f64 {
    let (t1, t2) = (theta.theta1(), theta.theta2());
    let mut total = 0.0;
    for (i, &x) in phi.iter().enumerate() {
        for &y in &phi[i + 1..] {
            total -= t2 / 2.0 * (x * x + y * y) - log_cosh(t2 * (x + y) + t1);
        }
    }
    total
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Log of the joint weight of `(graph, phi)`: the model weight times the
/// Gaussian density of `phi` given the spins.
pub fn joint_log_weight(graph: &Graph, phi: &[f64], theta: Theta) -> f64 {
    let n = graph.n();
    assert_eq!(phi.len(), n);
    let scale = (n - 1) as f64;
    let precision = scale * theta.theta2();
    let k = spin_sums(graph);
    let gauss: f64 = phi
        .iter()
        .zip(&k)
        .map(|(&p, &ki)| {
            let z = p - ki as f64 / scale;
            0.5 * (precision / std::f64::consts::TAU).ln() - 0.5 * precision * z * z
        })
        .sum();
    crate::model::log_weight(graph, theta.to_beta()) + gauss
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::pair_count;

    fn th(t1: f64, t2: f64) -> Theta {
        Theta::new(t1, t2).unwrap()
    }

    #[test]
    fn phi_update_matches_conditional_law() {
        let n = 100;
        let mut chain = ChainState::new(n, th(0.0, 0.25), InitPolicy::AllPlus, 3, 0).unwrap();
        assert!(chain.k().iter().all(|&k| k == 99));
        let reps = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..reps {
            chain.update_phi();
            sum += chain.phi()[7];
            sum_sq += chain.phi()[7] * chain.phi()[7];
        }
        let mean = sum / reps as f64;
        let var = sum_sq / reps as f64 - mean * mean;
        let sd = (1.0f64 / 24.75).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * sd / (reps as f64).sqrt(), "{mean}");
        assert!((var / (sd * sd) - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn phi_update_is_deterministic() {
        let mut a = ChainState::new(20, th(0.1, 0.4), InitPolicy::FairCoin, 11, 2).unwrap();
        let mut b = ChainState::new(20, th(0.1, 0.4), InitPolicy::FairCoin, 11, 2).unwrap();
        a.update_phi();
        b.update_phi();
        assert_eq!(a.phi(), b.phi());
        let mut c = ChainState::new(20, th(0.1, 0.4), InitPolicy::FairCoin, 11, 3).unwrap();
        c.update_phi();
        assert_ne!(a.phi(), c.phi());
    }

    #[test]
    fn y_update_probabilities() {
        assert_eq!(edge_probability(0.0, 0.0, th(0.0, 0.7)), 0.5);
        assert!(edge_probability(50.0, 50.0, th(0.0, 1.0)) > 1.0 - 1e-12);
        assert!(edge_probability(-50.0, -50.0, th(0.0, 1.0)) < 1e-12);

        // phi = 0, theta1 = 0: each edge is a fair coin
        let n = 60;
        let mut chain = ChainState::new(n, th(0.0, 0.3), InitPolicy::AllMinus, 5, 0).unwrap();
        chain.set_phi(&vec![0.0; n]);
        let mut edges = 0u64;
        let reps = 200;
        for _ in 0..reps {
            chain.update_y();
            edges += chain.graph().edge_count();
        }
        let trials = (reps * pair_count(n)) as f64;
        let frac = edges as f64 / trials;
        assert!((frac - 0.5).abs() < 3.0 * 0.5 / trials.sqrt(), "{frac}");
    }

    #[test]
    fn bookkeeping_survives_many_sweeps() {
        for kind in [SamplerKind::Auxiliary, SamplerKind::Glauber] {
            let mut chain = ChainState::new(17, th(-0.2, 0.6), InitPolicy::ErdosRenyi(0.3), 9, 1).unwrap();
            for _ in 0..1000 {
                chain.sweep(kind);
            }
            assert_eq!(chain.k(), chain.recompute_k().as_slice());
            assert_eq!(chain.sweeps_done(), 1000);
            let m = 16i64;
            assert!(chain.k().iter().all(|&k| (-m..=m).contains(&k) && (k + m) % 2 == 0));
        }
    }

    #[test]
    fn sweeps_are_reproducible() {
        let run = |kind| {
            let mut chain = ChainState::new(12, th(0.3, 0.2), InitPolicy::FairCoin, 42, 7).unwrap();
            for _ in 0..25 {
                chain.sweep(kind);
            }
            (chain.graph().clone(), chain.phi().to_vec())
        };
        assert_eq!(run(SamplerKind::Auxiliary), run(SamplerKind::Auxiliary));
        assert_eq!(run(SamplerKind::Glauber), run(SamplerKind::Glauber));
    }

    #[test]
    fn glauber_two_vertices() {
        // single edge: the conditional is the marginal with log-odds beta1 + beta2
        let t = th(0.1, 0.2);
        let b = t.to_beta();
        let p = 1.0 / (1.0 + (-(b.beta1() + b.beta2())).exp());
        let mut chain = ChainState::new(2, t, InitPolicy::AllMinus, 1, 0).unwrap();
        let reps = 200_000;
        let mut hits = 0;
        for _ in 0..reps {
            chain.glauber_sweep();
            hits += chain.graph().edge_count();
        }
        let frac = hits as f64 / reps as f64;
        assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / reps as f64).sqrt(), "{frac} vs {p}");
    }

    #[test]
    fn glauber_weak_interaction_is_fair() {
        // beta1 = 0 and tiny beta2: every conditional is within a hair of 1/2
        let t = Beta::new(0.0, 1e-9).unwrap().to_theta();
        let mut chain = ChainState::new(30, t, InitPolicy::AllPlus, 8, 0).unwrap();
        let mut edges = 0;
        let reps = 400;
        for _ in 0..reps {
            chain.glauber_sweep();
            edges += chain.graph().edge_count();
        }
        let trials = (reps * pair_count(30)) as f64;
        assert!((edges as f64 / trials - 0.5).abs() < 0.01);
    }

    #[test]
    fn log_f_examples() {
        assert_eq!(log_f(&[0.0; 6], th(0.0, 0.9)), 0.0);
        assert!((log_f(&[1.0, -1.0], th(0.0, 0.25)) + 0.25).abs() < 1e-15);
        let phi = [0.3, -1.2, 0.8, 0.05, -0.4];
        let flipped: Vec<f64> = phi.iter().map(|x| -x).collect();
        let t = th(0.0, 0.6);
        assert!((log_f(&phi, t) - log_f(&flipped, t)).abs() < 1e-14);
        assert!((log_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs() {
        assert!(ChainState::new(1, th(0.0, 1.0), InitPolicy::FairCoin, 0, 0).is_err());
        assert!(ChainState::new(5, th(0.0, 1.0), InitPolicy::ErdosRenyi(1.5), 0, 0).is_err());
    }
}

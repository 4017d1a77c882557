use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::error::{Error, Result};

/// Natural parameters `(beta1, beta2)` of the two-star model, `beta2 > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beta {
    beta1: f64,
    beta2: f64,
}

/// The centred parametrization `theta1 = (beta1 + beta2) / 2`,
/// `theta2 = beta2 / 4`, `theta2 > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    theta1: f64,
    theta2: f64,
}

fn check(name: &str, first: f64, second: f64) -> Result<()> {
    if !first.is_finite() || !second.is_finite() {
        return Err(Error::Domain(format!("{name} components must be finite, got ({first}, {second})")));
    }
    if second <= 0.0 {
        return Err(Error::Domain(format!("{name}2 must be positive, got {second}")));
    }
    Ok(())
}

impl Beta {
    pub fn new(beta1: f64, beta2: f64) -> Result<Self> {
        check("beta", beta1, beta2)?;
        Ok(Beta { beta1, beta2 })
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn to_theta(self) -> Theta {
        Theta { theta1: (self.beta1 + self.beta2) / 2.0, theta2: self.beta2 / 4.0 }
    }
}

impl Theta {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        check("theta", theta1, theta2)?;
        Ok(Theta { theta1, theta2 })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn to_beta(self) -> Beta {
        Beta { beta1: 2.0 * self.theta1 - 4.0 * self.theta2, beta2: 4.0 * self.theta2 }
    }
}

impl From<Beta> for Theta {
    fn from(b: Beta) -> Self {
        b.to_theta()
    }
}

impl From<Theta> for Beta {
    fn from(t: Theta) -> Self {
        t.to_beta()
    }
}

/// Unnormalized log-probability of `g` in the edge/two-star form:
/// `beta2/(n-1) * T + (beta1 + beta2/(n-1)) * E`.
pub fn log_weight(g: &Graph, b: Beta) -> f64 {
    let scale = b.beta2 / (g.n() - 1) as f64;
    scale * g.two_star_count() as f64 + (b.beta1 + scale) * g.edge_count() as f64
}

/// The same Hamiltonian written through the degrees:
/// `beta2/(2(n-1)) * sum d_i^2 + beta1/2 * sum d_i`. Samplers use this form.
pub fn log_weight_degrees(degrees: &[u64], b: Beta) -> f64 {
    let n = degrees.len();
    let sum: u64 = degrees.iter().sum();
    let sum_sq: u64 = degrees.iter().map(|d| d * d).sum();
    b.beta2 / (2.0 * (n - 1) as f64) * sum_sq as f64 + b.beta1 / 2.0 * sum as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reparametrize_examples() {
        let t = Beta::new(-1.0, 1.0).unwrap().to_theta();
        assert_eq!((t.theta1(), t.theta2()), (0.0, 0.25));
        let t = Beta::new(-2.2, 2.2).unwrap().to_theta();
        assert_eq!(t.theta1(), 0.0);
        assert!((t.theta2() - 0.55).abs() < 1e-15);
    }

    #[test]
    fn dyadic_round_trip_is_exact() {
        for &(b1, b2) in &[(-1.0, 1.0), (0.375, 2.5), (-3.25, 0.125), (1024.5, 0.0625)] {
            let b = Beta::new(b1, b2).unwrap();
            assert_eq!(b.to_theta().to_beta(), b);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(Beta::new(0.0, 0.0).is_err());
        assert!(Beta::new(0.0, -1.0).is_err());
        assert!(Theta::new(0.0, 0.0).is_err());
        assert!(Theta::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let b = Beta::new(0.7, 1.3).unwrap();
        assert_eq!(log_weight(&Graph::empty(6), b), 0.0);

        let tri = Graph::complete(3);
        assert!(log_weight(&tri, Beta::new(-1.0, 1.0).unwrap()).abs() < 1e-15);

        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let b = Beta::new(0.0, 1.0).unwrap();
        assert!((log_weight(&star, b) - 2.0).abs() < 1e-14);
        assert!((log_weight_degrees(&star.degrees(), b) - 2.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn hamiltonian_forms_agree(
            n in 2usize..40,
            bits in proptest::collection::vec(any::<bool>(), 780),
            b1 in -5.0f64..5.0,
            b2 in 0.01f64..5.0,
        ) {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    g.set_edge(i, j, bits[k]);
                    k += 1;
                }
            }
            let b = Beta::new(b1, b2).unwrap();
            let a = log_weight(&g, b);
            let d = log_weight_degrees(&g.degrees(), b);
            prop_assert!((a - d).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn theta_beta_round_trip(t1 in -10.0f64..10.0, t2 in 1e-3f64..10.0) {
            let t = Theta::new(t1, t2).unwrap();
            let back = t.to_beta().to_theta();
            prop_assert!((back.theta1() - t1).abs() <= 1e-14 * t1.abs().max(1.0));
            prop_assert!((back.theta2() - t2).abs() <= 1e-15 * t2);
        }
    }
}

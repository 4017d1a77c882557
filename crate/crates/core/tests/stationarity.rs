use twostar::diagnostics::{mean_var, total_variation};
use twostar::model::{enumerate_exact, pair_count};
use twostar::sampler::{run, InitPolicy, Regime, SamplerConfig, SamplerKind};
use twostar::{Graph, Theta};

fn mask(g: &Graph) -> usize {
    g.edges().map(|(i, j)| 1usize << g.pair_index(i, j)).sum()
}

/// Empirical law over every labeled graph, indexed by pair bitmask.
fn graph_pmf(graphs: &[Graph]) -> Vec<f64> {
    let mut counts = vec![0.0; 1 << pair_count(graphs[0].n())];
    for g in graphs {
        counts[mask(g)] += 1.0;
    }
    counts.iter().map(|c| c / graphs.len() as f64).collect()
}

fn exact_graph_pmf(n: usize, theta: Theta) -> Vec<f64> {
    let model = enumerate_exact(n, theta.to_beta()).unwrap();
    model.log_weights().iter().map(|w| (w - model.log_partition()).exp()).collect()
}

#[test]
fn both_kernels_leave_the_model_invariant_on_three_vertices() {
    for theta in [Theta::new(0.2, 0.3).unwrap(), Theta::new(0.0, 0.9).unwrap(), Theta::new(-0.5, 1.5).unwrap()] {
        let exact = exact_graph_pmf(3, theta);
        for kind in [SamplerKind::Auxiliary, SamplerKind::Glauber] {
            let cfg = SamplerConfig {
                kind,
                burn_in: 20,
                regime: Regime::Thinning { gap: 2 },
                keep_graphs: true,
                ..SamplerConfig::new(3, theta, 60_000, 3)
            };
            let set = run(&cfg).unwrap();
            let tv = total_variation(&graph_pmf(set.graphs.as_ref().unwrap()), &exact);
            assert!(tv < 0.015, "{kind:?} at {theta:?}: tv {tv}");
        }
    }
}

#[test]
fn graph_law_on_four_vertices_from_extreme_starts() {
    let theta = Theta::new(0.1, 0.6).unwrap();
    let exact = exact_graph_pmf(4, theta);
    for init in [InitPolicy::AllPlus, InitPolicy::AllMinus] {
        let cfg = SamplerConfig { init, burn_in: 50, keep_graphs: true, ..SamplerConfig::new(4, theta, 60_000, 8) };
        let set = run(&cfg).unwrap();
        let tv = total_variation(&graph_pmf(set.graphs.as_ref().unwrap()), &exact);
        assert!(tv < 0.03, "{init:?}: tv {tv}");
    }
}

#[test]
fn vertices_are_exchangeable() {
    let theta = Theta::new(0.3, 0.4).unwrap();
    let n = 12;
    let cfg = SamplerConfig { burn_in: 50, keep_graphs: true, ..SamplerConfig::new(n, theta, 4000, 5) };
    let set = run(&cfg).unwrap();
    let graphs = set.graphs.unwrap();
    let mean_degree = |v: usize| mean_var(&graphs.iter().map(|g| g.degrees()[v] as f64).collect::<Vec<_>>());
    let first = mean_degree(0);
    let last = mean_degree(n - 1);
    let se = ((first.var.unwrap() + last.var.unwrap()) / graphs.len() as f64).sqrt();
    assert!((first.mean - last.mean).abs() < 4.0 * se, "{} vs {}", first.mean, last.mean);
}

#[test]
fn zero_field_law_is_sign_symmetric() {
    let theta = Theta::new(0.0, 0.8).unwrap();
    let set = run(&SamplerConfig { burn_in: 100, ..SamplerConfig::new(30, theta, 2000, 9) }).unwrap();
    let s1 = set.s1_values();
    let frac = s1.iter().filter(|&&x| x > 0.0).count() as f64 / s1.len() as f64;
    assert!((frac - 0.5).abs() < 0.05, "positive fraction {frac}");
    let s = mean_var(&s1);
    assert!(s.mean.abs() < 4.0 * (s.var.unwrap() / s1.len() as f64).sqrt(), "mean {}", s.mean);
}

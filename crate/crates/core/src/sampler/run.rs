use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::{ChainState, InitPolicy, SamplerKind};
use crate::error::{Error, Result};
use crate::estimators::DegreeStats;
use crate::fmt::real;
use crate::model::{Graph, Theta};

/// How independent draws are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Regime {
    /// Draw `r` is the state of chain `r` after `burn_in` sweeps.
    FreshChain,
    /// One chain: `burn_in` sweeps, then a record every `gap` sweeps.
    Thinning { gap: u64 },
}

pub const DEFAULT_BURN_IN: u64 = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub theta: Theta,
    pub kind: SamplerKind,
    pub num_samples: usize,
    pub burn_in: u64,
    pub regime: Regime,
    pub init: InitPolicy,
    pub seed: u64,
    /// Keep every sampled graph in the returned set.
    #[serde(default)]
    pub keep_graphs: bool,
}

impl SamplerConfig {
    /// Fresh-chain auxiliary sampler with a fair-coin start and the default burn-in.
    pub fn new(n: usize, theta: Theta, num_samples: usize, seed: u64) -> Self {
        SamplerConfig {
            n,
            theta,
            kind: SamplerKind::Auxiliary,
            num_samples,
            burn_in: DEFAULT_BURN_IN,
            regime: Regime::FreshChain,
            init: InitPolicy::FairCoin,
            seed,
            keep_graphs: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.num_samples == 0 {
            return Err(Error::Config("num_samples must be at least 1".into()));
        }
        if let Regime::Thinning { gap: 0 } = self.regime {
            return Err(Error::Config("thinning gap must be at least 1".into()));
        }
        // re-check theta, which may come from deserialized input
        Theta::new(self.theta.theta1(), self.theta.theta2())?;
        self.init.validate()
    }
}

/// Summary statistics of one draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRecord {
    pub edges: u64,
    pub two_stars: u64,
    pub s1: f64,
    pub s2: f64,
}

impl SampleRecord {
    pub fn from_degrees(degrees: &[u64]) -> Self {
        let stats = DegreeStats::new(degrees);
        SampleRecord { edges: stats.edges(), two_stars: stats.two_stars(), s1: stats.s1(), s2: stats.s2() }
    }

    /// Branch of the draw; `S1 = 0` counts as positive.
    pub fn is_positive(&self) -> bool {
        self.s1 >= 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    /// Known when the set was produced here or read from a file carrying
    /// the config comment.
    pub config: Option<SamplerConfig>,
    pub records: Vec<SampleRecord>,
    pub graphs: Option<Vec<Graph>>,
}

pub const CSV_HEADER: &str = "index,edges,two_stars,s1,s2";
const CONFIG_PREFIX: &str = "# config ";

/// Draws `config.num_samples` records. Chains run in parallel; the output
/// does not depend on scheduling.
pub fn run(config: &SamplerConfig) -> Result<SampleSet> {
    config.validate()?;
    let draws: Vec<(SampleRecord, Option<Graph>)> = match config.regime {
        Regime::FreshChain => (0..config.num_samples)
            .into_par_iter()
            .map(|r| {
                let mut chain = ChainState::new(config.n, config.theta, config.init, config.seed, r as u64)?;
                for _ in 0..config.burn_in {
                    chain.sweep(config.kind);
                }
                Ok(record(&chain, config.keep_graphs))
            })
            .collect::<Result<_>>()?,
        Regime::Thinning { gap } => {
            let mut chain = ChainState::new(config.n, config.theta, config.init, config.seed, 0)?;
            for _ in 0..config.burn_in {
                chain.sweep(config.kind);
            }
            let mut out = Vec::with_capacity(config.num_samples);
            for r in 0..config.num_samples {
                if r > 0 {
                    for _ in 0..gap {
                        chain.sweep(config.kind);
                    }
                }
                out.push(record(&chain, config.keep_graphs));
            }
            out
        }
    };
    let (records, graphs): (Vec<_>, Vec<_>) = draws.into_iter().unzip();
    let graphs = config.keep_graphs.then(|| graphs.into_iter().flatten().collect());
    Ok(SampleSet { config: Some(config.clone()), records, graphs })
}

fn record(chain: &ChainState, keep: bool) -> (SampleRecord, Option<Graph>) {
    (SampleRecord::from_degrees(&chain.degrees()), keep.then(|| chain.graph().clone()))
}

impl SampleSet {
    pub fn from_records(records: Vec<SampleRecord>) -> Self {
        SampleSet { config: None, records, graphs: None }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn s1_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.s1).collect()
    }

    /// CSV with the fixed header; the config, when known, is echoed first as
    /// a `# config {json}` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(cfg) = &self.config {
            out.push_str(CONFIG_PREFIX);
            out.push_str(&serde_json::to_string(cfg).expect("config serializes"));
            out.push('\n');
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (i, r) in self.records.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{},{},{}", r.edges, r.two_stars, real(r.s1), real(r.s2));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut config = None;
        let mut header_seen = false;
        let mut records = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if let Some(json) = line.strip_prefix(CONFIG_PREFIX) {
                    let cfg: SamplerConfig = serde_json::from_str(json)
                        .map_err(|e| Error::Parse { line: line_no, msg: format!("bad config comment: {e}") })?;
                    config = Some(cfg);
                }
                continue;
            }
            if !header_seen {
                if line.trim() != CSV_HEADER {
                    return Err(Error::Parse { line: line_no, msg: format!("expected header `{CSV_HEADER}`") });
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::Parse { line: line_no, msg: format!("expected 5 fields, got {}", fields.len()) });
            }
            let bad = |what: &str| Error::Parse { line: line_no, msg: format!("bad {what}") };
            fields[0].parse::<u64>().map_err(|_| bad("index"))?;
            records.push(SampleRecord {
                edges: fields[1].parse().map_err(|_| bad("edges"))?,
                two_stars: fields[2].parse().map_err(|_| bad("two_stars"))?,
                s1: fields[3].parse().map_err(|_| bad("s1"))?,
                s2: fields[4].parse().map_err(|_| bad("s2"))?,
            });
        }
        if !header_seen {
            return Err(Error::Parse { line: 1, msg: "missing header row".into() });
        }
        Ok(SampleSet { config, records, graphs: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(regime: Regime) -> SamplerConfig {
        SamplerConfig {
            regime,
            burn_in: 20,
            ..SamplerConfig::new(8, Theta::new(0.1, 0.3).unwrap(), 40, 99)
        }
    }

    #[test]
    fn record_counts_and_determinism() {
        for regime in [Regime::FreshChain, Regime::Thinning { gap: 3 }] {
            let cfg = small(regime);
            let a = run(&cfg).unwrap();
            assert_eq!(a.len(), 40);
            assert_eq!(a.to_csv(), run(&cfg).unwrap().to_csv());
        }
    }

    #[test]
    fn kept_graphs_match_records() {
        let cfg = SamplerConfig { keep_graphs: true, ..small(Regime::FreshChain) };
        let set = run(&cfg).unwrap();
        let graphs = set.graphs.as_ref().unwrap();
        assert_eq!(graphs.len(), set.len());
        for (g, r) in graphs.iter().zip(&set.records) {
            assert_eq!(g.edge_count(), r.edges);
            assert_eq!(g.two_star_count(), r.two_stars);
        }
    }

    #[test]
    fn csv_round_trip() {
        let set = run(&small(Regime::FreshChain)).unwrap();
        let text = set.to_csv();
        assert!(text.lines().nth(1) == Some(CSV_HEADER));
        let back = SampleSet::parse_csv(&text).unwrap();
        assert_eq!(back.records, set.records);
        assert_eq!(back.config, set.config);
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn csv_errors() {
        assert!(SampleSet::parse_csv("").is_err());
        assert!(SampleSet::parse_csv("a,b\n").is_err());
        assert!(SampleSet::parse_csv("index,edges,two_stars,s1,s2\n0,1,2,x,0\n").is_err());
        assert!(SampleSet::parse_csv("index,edges,two_stars,s1,s2\n0,1,2,0.5\n").is_err());
        let ok = SampleSet::parse_csv("# hello\nindex,edges,two_stars,s1,s2\n0,3,3,0.0,1.3333333333333333e0\n").unwrap();
        assert_eq!(ok.len(), 1);
        assert!(ok.config.is_none());
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = small(Regime::FreshChain);
        cfg.num_samples = 0;
        assert!(run(&cfg).is_err());
        let cfg = small(Regime::Thinning { gap: 0 });
        assert!(run(&cfg).is_err());
        let mut cfg = small(Regime::FreshChain);
        cfg.n = 1;
        assert!(run(&cfg).is_err());
    }
}

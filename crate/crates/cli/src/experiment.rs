//! The simulation presets: one sample run turned into histogram, QQ and
//! estimate files that share the effective configuration as a header.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use twostar::diagnostics::{histogram, qq_pairs};
use twostar::estimators::{estimate, EstimateReport};
use twostar::fmt::{json_real, real};
use twostar::sampler::{run, InitPolicy, Regime, SampleSet, SamplerConfig, SamplerKind};

use crate::{theta, to_json, usage, Failure, SamplerArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// n = 100, theta = (0, 0.25), 5000 draws, 50 bins.
    Domain1,
    /// n = 100, theta = (0, 0.55), 5000 draws, 80 bins overall and 50 per branch.
    Domain2,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    burnin: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    sampler: Option<SamplerArg>,
    /// Bins of the overall histogram.
    #[arg(long)]
    bins: Option<usize>,
    /// Bins of each per-branch histogram; enables the branch split.
    #[arg(long)]
    branch_bins: Option<usize>,
    /// Directory receiving the output files; created if missing.
    #[arg(long)]
    out_dir: PathBuf,
}

/// The effective settings of one experiment run.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub n: usize,
    #[serde(serialize_with = "json_real")]
    pub theta1: f64,
    #[serde(serialize_with = "json_real")]
    pub theta2: f64,
    pub samples: usize,
    pub burnin: u64,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub bins: usize,
    pub branch_bins: Option<usize>,
}

impl ExperimentConfig {
    fn preset(p: Preset) -> Self {
        let (theta2, bins, branch_bins) = match p {
            Preset::Domain1 => (0.25, 50, None),
            Preset::Domain2 => (0.55, 80, Some(50)),
        };
        ExperimentConfig {
            preset: Some(p),
            n: 100,
            theta1: 0.0,
            theta2,
            samples: 5000,
            burnin: 200,
            seed: 1,
            sampler: SamplerKind::Auxiliary,
            bins,
            branch_bins,
        }
    }

    /// Preset values overridden by any explicit flag. Without a preset every
    /// model flag must be given.
    fn resolve(a: &ExperimentArgs) -> Result<Self, Failure> {
        let mut c = match a.preset {
            Some(p) => Self::preset(p),
            None => {
                let missing: Vec<&str> = [
                    ("--n", a.n.is_none()),
                    ("--theta1", a.theta1.is_none()),
                    ("--theta2", a.theta2.is_none()),
                    ("--samples", a.samples.is_none()),
                ]
                .into_iter()
                .filter_map(|(name, miss)| miss.then_some(name))
                .collect();
                if !missing.is_empty() {
                    return Err(usage(format!("without --preset, {} must be given", missing.join(", "))));
                }
                ExperimentConfig { preset: None, bins: 50, ..Self::preset(Preset::Domain1) }
            }
        };
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = a.$f { c.$f = v; })* };
        }
        take!(n, theta1, theta2, samples, burnin, seed, bins);
        if let Some(s) = a.sampler {
            c.sampler = s.into();
        }
        if a.branch_bins.is_some() {
            c.branch_bins = a.branch_bins;
        }
        if c.bins == 0 || c.branch_bins == Some(0) {
            return Err(usage("bin counts must be positive"));
        }
        Ok(c)
    }

    fn sampler_config(&self) -> Result<SamplerConfig, Failure> {
        let cfg = SamplerConfig {
            n: self.n,
            theta: theta(self.theta1, self.theta2)?,
            kind: self.sampler,
            num_samples: self.samples,
            burn_in: self.burnin,
            regime: Regime::FreshChain,
            init: InitPolicy::FairCoin,
            seed: self.seed,
            keep_graphs: false,
        };
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }

    fn comment(&self) -> String {
        format!("# experiment {}\n", serde_json::to_string(self).expect("serializable"))
    }
}

#[derive(Serialize)]
struct EstimateFile<'a> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    report: &'a EstimateReport,
}

fn histogram_csv(header: &str, values: &[f64], bins: usize) -> String {
    let mut out = String::from(header);
    out.push_str("bin_left,bin_right,count\n");
    for b in histogram(values, bins) {
        let _ = writeln!(out, "{},{},{}", real(b.left), real(b.right), b.count);
    }
    out
}

fn qq_csv(header: &str, values: &[f64]) -> String {
    let mut out = String::from(header);
    out.push_str("prob,empirical,normal\n");
    for p in qq_pairs(values) {
        let _ = writeln!(out, "{},{},{}", real(p.prob), real(p.empirical), real(p.normal));
    }
    out
}

/// Files written by one run, relative to the output directory, with contents.
pub fn render(config: &ExperimentConfig, set: &SampleSet) -> Result<Vec<(String, String)>, Failure> {
    let header = config.comment();
    let s1 = set.s1_values();
    let mut files = vec![
        ("samples.csv".to_string(), format!("{header}{}", set.to_csv())),
        ("histogram.csv".to_string(), histogram_csv(&header, &s1, config.bins)),
        ("qq.csv".to_string(), qq_csv(&header, &s1)),
    ];
    if let Some(bins) = config.branch_bins {
        let (pos, neg): (Vec<f64>, Vec<f64>) = s1.iter().partition(|&&x| x >= 0.0);
        for (name, values) in [("pos", &pos), ("neg", &neg)] {
            files.push((format!("histogram_{name}.csv"), histogram_csv(&header, values, bins)));
            files.push((format!("qq_{name}.csv"), qq_csv(&header, values)));
        }
    }
    let report = estimate(set)?;
    files.push(("estimate.json".to_string(), to_json(&EstimateFile { config, report: &report })));
    Ok(files)
}

pub fn run_experiment(a: &ExperimentArgs) -> Result<(), Failure> {
    let config = ExperimentConfig::resolve(a)?;
    let set = run(&config.sampler_config()?)?;
    let files = render(&config, &set)?;
    fs::create_dir_all(&a.out_dir)?;
    for (name, text) in &files {
        let path = a.out_dir.join(name);
        fs::write(&path, text).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", path.display()) })?;
    }
    eprintln!("wrote {} files to {}", files.len(), a.out_dir.display());
    Ok(())
}

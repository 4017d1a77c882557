mod experiment;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twostar::asymptotics::{constants, Prediction};
use twostar::estimators::estimate;
use twostar::fmt::{json_real, real};
use twostar::laplace::{convergence_check, default_b4};
use twostar::model::enumerate_exact;
use twostar::sampler::{run, InitPolicy, Regime, SampleSet, SamplerConfig, SamplerKind, DEFAULT_BURN_IN};
use twostar::{Beta, Theta};

use experiment::ExperimentArgs;

#[derive(Parser)]
#[command(name = "twostar", version, about = "Simulation and estimation for the two-star random graph model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw graphs and write their summary statistics as CSV.
    Sample(SampleArgs),
    /// Estimate (theta2, theta1) from a sample CSV.
    Estimate {
        /// Sample CSV written by `sample`; `-` reads stdin.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print the domain, fixed point and limit constants at theta.
    Predict {
        #[arg(long, allow_negative_numbers = true)]
        theta1: f64,
        #[arg(long, value_parser = positive)]
        theta2: f64,
    },
    /// Solve a small model exactly by enumerating every graph.
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        beta1: f64,
        #[arg(long, value_parser = positive)]
        beta2: f64,
    },
    /// Compare the Laplace integrals with their large-n asymptotics.
    Laplace(LaplaceArgs),
    /// Run a simulation preset and write samples, histograms, QQ data and estimates.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Auxiliary,
    Glauber,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Auxiliary => SamplerKind::Auxiliary,
            SamplerArg::Glauber => SamplerKind::Glauber,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    FairCoin,
    AllPlus,
    AllMinus,
    ErdosRenyi,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    theta1: f64,
    #[arg(long, value_parser = positive)]
    theta2: f64,
    /// Number of draws.
    #[arg(long)]
    samples: usize,
    /// Sweeps discarded before the first draw of each chain.
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burnin: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "auxiliary")]
    sampler: SamplerArg,
    /// Take every draw from one chain, `gap` sweeps apart, instead of one fresh chain per draw.
    #[arg(long)]
    gap: Option<u64>,
    #[arg(long, value_enum, default_value = "fair-coin")]
    init: InitArg,
    /// Edge probability for `--init erdos-renyi`.
    #[arg(long, default_value_t = 0.5)]
    init_p: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LaplaceArgs {
    /// Take a1 and a3 from the limit constants at (theta1, theta2).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5, conflicts_with_all = ["a1", "a3"])]
    theta1: f64,
    #[arg(long, value_parser = positive, default_value_t = 0.5, conflicts_with_all = ["a1", "a3"])]
    theta2: f64,
    #[arg(long, requires = "a3")]
    a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "a1")]
    a3: Option<f64>,
    /// Quartic coefficient; defaults to max(1, 2 a3^2 / (3 a1)).
    #[arg(long)]
    b4: Option<f64>,
    /// Moment orders.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    l: Vec<u32>,
    /// Increasing grid of n.
    #[arg(long, value_delimiter = ',', default_value = "1e2,1e3,1e4")]
    n: Vec<f64>,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a finite positive number, got {s}"))
    }
}

pub(crate) struct Failure {
    code: u8,
    msg: String,
}

impl From<twostar::Error> for Failure {
    fn from(e: twostar::Error) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

pub(crate) fn theta(t1: f64, t2: f64) -> Result<Theta, Failure> {
    Theta::new(t1, t2).map_err(|e| usage(e.to_string()))
}

pub(crate) fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_sample(a: &SampleArgs) -> Result<(), Failure> {
    let init = match a.init {
        InitArg::FairCoin => InitPolicy::FairCoin,
        InitArg::AllPlus => InitPolicy::AllPlus,
        InitArg::AllMinus => InitPolicy::AllMinus,
        InitArg::ErdosRenyi => InitPolicy::ErdosRenyi(a.init_p),
    };
    let config = SamplerConfig {
        n: a.n,
        theta: theta(a.theta1, a.theta2)?,
        kind: a.sampler.into(),
        num_samples: a.samples,
        burn_in: a.burnin,
        regime: a.gap.map_or(Regime::FreshChain, |gap| Regime::Thinning { gap }),
        init,
        seed: a.seed,
        keep_graphs: false,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    let set = run(&config)?;
    write_out(a.out.as_deref(), &set.to_csv())
}

fn cmd_estimate(input: &Path) -> Result<(), Failure> {
    let text = if input.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        fs::read_to_string(input).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", input.display()) })?
    };
    let set = SampleSet::parse_csv(&text)?;
    write_out(None, &to_json(&estimate(&set)?))
}

fn cmd_predict(t1: f64, t2: f64) -> Result<(), Failure> {
    let c = constants(theta(t1, t2)?)?;
    write_out(None, &to_json(&Prediction::from(&c)))
}

#[derive(Serialize)]
struct ExactOutput {
    n: usize,
    #[serde(serialize_with = "json_real")]
    beta1: f64,
    #[serde(serialize_with = "json_real")]
    beta2: f64,
    #[serde(serialize_with = "json_real")]
    z: f64,
    #[serde(serialize_with = "json_real")]
    log_z: f64,
    /// Probability of each edge count `0..=n(n-1)/2`.
    edge_pmf: Vec<Real>,
    moments: twostar::model::Moments,
}

#[derive(Serialize)]
struct Real(#[serde(serialize_with = "json_real")] f64);

fn cmd_exact(n: usize, b1: f64, b2: f64) -> Result<(), Failure> {
    let beta = Beta::new(b1, b2).map_err(|e| usage(e.to_string()))?;
    let model = enumerate_exact(n, beta)?;
    let out = ExactOutput {
        n,
        beta1: b1,
        beta2: b2,
        z: model.partition(),
        log_z: model.log_partition(),
        edge_pmf: model.edge_pmf().iter().map(|&p| Real(p)).collect(),
        moments: model.moments(),
    };
    write_out(None, &to_json(&out))
}

fn cmd_laplace(a: &LaplaceArgs) -> Result<(), Failure> {
    let (a1, a3) = match (a.a1, a.a3) {
        (Some(a1), Some(a3)) => (a1, a3),
        _ => {
            let c = constants(theta(a.theta1, a.theta2)?)?;
            (c.a1, c.a3)
        }
    };
    let b4 = a.b4.unwrap_or_else(|| default_b4(a1, a3));
    let mut out = String::from("l,n,integral,prediction,ratio\n");
    for &l in &a.l {
        for row in convergence_check(a1, a3, b4, l, &a.n)? {
            let ratio = row.ratio.map(real).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{ratio}", row.l, real(row.n), real(row.integral), real(row.prediction));
        }
    }
    write_out(None, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Estimate { input } => cmd_estimate(input),
        Command::Predict { theta1, theta2 } => cmd_predict(*theta1, *theta2),
        Command::Exact { n, beta1, beta2 } => cmd_exact(*n, *beta1, *beta2),
        Command::Laplace(a) => cmd_laplace(a),
        Command::Experiment(a) => experiment::run_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

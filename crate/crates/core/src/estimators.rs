//! Degree statistics S1 and S2, the moment estimators of `(theta2, theta1)`
//! built from them, and goodness-of-fit diagnostics.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::diagnostics::{mean_var, Summary};
use crate::error::{Error, Result};
use crate::fmt::{json_opt_real, json_real};
use crate::model::Graph;
use crate::sampler::SampleSet;

/// Exact integer summaries of a degree sequence.
#[derive(Clone, Copy, Debug)]
pub struct DegreeStats {
    n: u64,
    sum: u64,
    sum_sq: u64,
    two_stars: u64,
}

impl DegreeStats {
    pub fn new(degrees: &[u64]) -> Self {
        assert!(degrees.len() >= 2, "degree statistics need n >= 2");
        DegreeStats {
            n: degrees.len() as u64,
            sum: degrees.iter().sum(),
            sum_sq: degrees.iter().map(|d| d * d).sum(),
            two_stars: degrees.iter().map(|d| d * d.saturating_sub(1) / 2).sum(),
        }
    }

    pub fn edges(&self) -> u64 {
        self.sum / 2
    }

    pub fn two_stars(&self) -> u64 {
        self.two_stars
    }

    /// `S1 = 4/(n(n-1)) (E - n(n-1)/4)`, exact at the extremes.
    pub fn s1(&self) -> f64 {
        let pairs2 = (self.n * (self.n - 1)) as i128;
        (2 * self.sum as i128 - pairs2) as f64 / pairs2 as f64
    }

    /// `S2 = 4/(n-1)^2 sum_i (d_i - dbar)^2`, exactly zero on regular graphs.
    pub fn s2(&self) -> f64 {
        let n = self.n as u128;
        let centered = n * self.sum_sq as u128 - (self.sum as u128).pow(2);
        let m = (self.n - 1) as f64;
        4.0 * centered as f64 / (n as f64 * m * m)
    }
}

/// Edge statistic recentred to `[-1, 1]`: `(2 dbar - (n-1)) / (n-1)`.
pub fn s1(g: &Graph) -> f64 {
    DegreeStats::new(&g.degrees()).s1()
}

/// Scaled sample variance of the degrees.
pub fn s2(g: &Graph) -> f64 {
    DegreeStats::new(&g.degrees()).s2()
}

/// The estimators `(S3, S4) = (theta2_hat, theta1_hat)`:
/// `S3 = (s1^2 + s2 - 1) / (s2 - s1^2 s2)`, `S4 = atanh(s1) - 2 S3 s1`.
pub fn s3_s4(s1: f64, s2: f64) -> Result<(f64, f64)> {
    if !s1.is_finite() || !s2.is_finite() || s1.abs() > 1.0 || s2 < 0.0 {
        return Err(Error::Input(format!("need |s1| <= 1 and s2 >= 0, got s1 = {s1}, s2 = {s2}")));
    }
    if s2 == 0.0 || s1.abs() == 1.0 {
        return Err(Error::DegenerateSample(format!("s1 = {s1}, s2 = {s2} (empty, complete or regular graph)")));
    }
    let theta2 = (s1 * s1 + s2 - 1.0) / (s2 - s1 * s1 * s2);
    let theta1 = s1.atanh() - 2.0 * theta2 * s1;
    Ok((theta2, theta1))
}

/// S1 statistics of the draws on one side of zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchSummary {
    pub count: usize,
    #[serde(serialize_with = "json_opt_real")]
    pub s1_mean: Option<f64>,
    #[serde(serialize_with = "json_opt_real")]
    pub s1_var: Option<f64>,
    /// KS distance to the Normal fitted by mean and variance.
    #[serde(serialize_with = "json_opt_real")]
    pub ks: Option<f64>,
}

impl BranchSummary {
    fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return BranchSummary { count: 0, s1_mean: None, s1_var: None, ks: None };
        }
        let s = mean_var(values);
        let ks = s.var.and_then(|v| ks_statistic(values, s.mean, v).ok());
        BranchSummary { count: values.len(), s1_mean: Some(s.mean), s1_var: s.var, ks }
    }
}

/// Result of [`estimate`]. The first ten fields form the fixed JSON
/// interface; the remaining ones are supplementary.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    #[serde(serialize_with = "json_real")]
    pub theta2_hat: f64,
    #[serde(serialize_with = "json_real")]
    pub theta1_hat: f64,
    pub n_draws: usize,
    pub n_degenerate: usize,
    #[serde(serialize_with = "json_real")]
    pub frac_positive: f64,
    #[serde(serialize_with = "json_real")]
    pub s1_mean: f64,
    #[serde(serialize_with = "json_real")]
    pub s1_absmean: f64,
    #[serde(serialize_with = "json_real")]
    pub s2_mean: f64,
    #[serde(serialize_with = "json_opt_real")]
    pub ks_pos: Option<f64>,
    #[serde(serialize_with = "json_opt_real")]
    pub ks_neg: Option<f64>,

    #[serde(serialize_with = "json_opt_real")]
    pub s1_var: Option<f64>,
    #[serde(serialize_with = "json_opt_real")]
    pub s2_var: Option<f64>,
    /// Monte Carlo standard errors of `s1_absmean` and `s2_mean`.
    #[serde(serialize_with = "json_opt_real")]
    pub se_s1_absmean: Option<f64>,
    #[serde(serialize_with = "json_opt_real")]
    pub se_s2_mean: Option<f64>,
    pub positive: BranchSummary,
    pub negative: BranchSummary,
    /// Set when the sign split was near-balanced and `theta1_hat` was taken
    /// from the positive branch.
    pub symmetric: bool,
}

/// Lower and upper fraction of positive draws treated as a symmetric split.
pub const BALANCED_SPLIT: (f64, f64) = (0.25, 0.75);

/// Pools the non-degenerate draws of `set` into one estimate.
///
/// `theta2_hat` is `S3` evaluated at `(mean |S1|, mean S2)`. When the share
/// of draws with `S1 >= 0` lies in [`BALANCED_SPLIT`] the data are treated as
/// a symmetric two-phase sample and `theta1_hat` is `S4` on the positive
/// branch, `atanh(mean |S1|) - 2 theta2_hat mean |S1|`; otherwise the signed
/// mean of `S1` is used.
pub fn estimate(set: &SampleSet) -> Result<EstimateReport> {
    if set.is_empty() {
        return Err(Error::Input("empty sample set".into()));
    }
    let valid: Vec<_> = set.records.iter().filter(|r| r.s2 > 0.0 && r.s1.abs() < 1.0).collect();
    let n_degenerate = set.len() - valid.len();
    if valid.is_empty() {
        return Err(Error::DegenerateSample(format!("all {} draws are degenerate", set.len())));
    }

    let s1: Vec<f64> = valid.iter().map(|r| r.s1).collect();
    let abs: Vec<f64> = s1.iter().map(|x| x.abs()).collect();
    let s2: Vec<f64> = valid.iter().map(|r| r.s2).collect();
    let (pos, neg): (Vec<f64>, Vec<f64>) = s1.iter().partition(|&&x| x >= 0.0);

    let s1_stats = mean_var(&s1);
    let abs_stats = mean_var(&abs);
    let s2_stats = mean_var(&s2);
    let frac_positive = pos.len() as f64 / s1.len() as f64;

    let (theta2_hat, branch_theta1) = s3_s4(abs_stats.mean, s2_stats.mean)?;
    let symmetric = (BALANCED_SPLIT.0..=BALANCED_SPLIT.1).contains(&frac_positive);
    let theta1_hat = if symmetric {
        branch_theta1
    } else {
        let m = s1_stats.mean;
        m.atanh() - 2.0 * theta2_hat * m
    };

    let positive = BranchSummary::of(&pos);
    let negative = BranchSummary::of(&neg);
    let se = |s: &Summary| s.var.map(|v| (v / s.count as f64).sqrt());
    Ok(EstimateReport {
        theta2_hat,
        theta1_hat,
        n_draws: set.len(),
        n_degenerate,
        frac_positive,
        s1_mean: s1_stats.mean,
        s1_absmean: abs_stats.mean,
        s2_mean: s2_stats.mean,
        ks_pos: positive.ks,
        ks_neg: negative.ks,
        s1_var: s1_stats.var,
        s2_var: s2_stats.var,
        se_s1_absmean: se(&abs_stats),
        se_s2_mean: se(&s2_stats),
        positive,
        negative,
        symmetric,
    })
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and
/// `N(mean, variance)`.
pub fn ks_statistic(samples: &[f64], mean: f64, variance: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Input(format!("KS needs at least 2 samples, got {}", samples.len())));
    }
    if !(variance > 0.0 && variance.is_finite() && mean.is_finite()) {
        return Err(Error::Input(format!("KS needs a proper Normal, got mean {mean}, variance {variance}")));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("KS samples must be finite".into()));
    }
    let normal = Normal::new(mean, variance.sqrt()).map_err(|e| Error::Input(e.to_string()))?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = normal.cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    });
    Ok(d)
}

/// `max_i |d_i/(n-1) - (1 + s|m|)/2|` with `s` the sign of S1 (zero counts as
/// positive), i.e. the worst vertex deviation from the degree fraction of the
/// phase the graph sits in.
pub fn degree_concentration(g: &Graph, m: f64) -> f64 {
    let stats = DegreeStats::new(&g.degrees());
    let sign = if stats.s1() >= 0.0 { 1.0 } else { -1.0 };
    let target = (1.0 + sign * m.abs()) / 2.0;
    let scale = (g.n() - 1) as f64;
    g.degrees().iter().map(|&d| (d as f64 / scale - target).abs()).fold(0.0, f64::max)
}

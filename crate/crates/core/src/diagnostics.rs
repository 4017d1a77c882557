//! Summaries used by reports and experiments: compensated means and
//! variances, equal-width histograms, Normal QQ pairs, total variation.

use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance; `None` below two values.
    pub var: Option<f64>,
}

/// Neumaier-compensated sum.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut total = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = total + v;
        if total.abs() >= v.abs() {
            comp += (total - t) + v;
        } else {
            comp += (v - t) + total;
        }
        total = t;
    }
    total + comp
}

/// Mean and unbiased variance by two compensated passes. Panics on empty input.
pub fn mean_var(values: &[f64]) -> Summary {
    assert!(!values.is_empty(), "mean of empty slice");
    let n = values.len();
    let mean = sum(values.iter().copied()) / n as f64;
    let var = (n >= 2).then(|| sum(values.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64);
    Summary { count: n, mean, var }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// `bins` equal-width bins spanning `[min, max]` of `values`; the last bin is
/// closed on the right so every value is counted. A constant sample is given
/// a unit-width range centred on its value.
pub fn histogram(values: &[f64], bins: usize) -> Vec<Bin> {
    assert!(bins >= 1, "histogram needs at least one bin");
    if values.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| Bin {
            left: lo + k as f64 * width,
            right: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
            count,
        })
        .collect()
}

/// Number of local maxima in a histogram's counts, treating plateaus as one
/// peak. Peaks smaller than `min_count` are ignored.
pub fn count_modes(bins: &[Bin], min_count: usize) -> usize {
    let c: Vec<usize> = bins.iter().map(|b| b.count).collect();
    let mut modes = 0;
    let mut k = 0;
    while k < c.len() {
        let start = k;
        while k + 1 < c.len() && c[k + 1] == c[start] {
            k += 1;
        }
        let left_ok = start == 0 || c[start - 1] < c[start];
        let right_ok = k + 1 == c.len() || c[k + 1] < c[start];
        if left_ok && right_ok && c[start] >= min_count {
            modes += 1;
        }
        k += 1;
    }
    modes
}

/// One point of a Normal QQ plot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QqPoint {
    pub prob: f64,
    pub empirical: f64,
    pub normal: f64,
}

/// Sorted sample against the quantiles of the Normal fitted by sample mean
/// and standard deviation, at plotting positions `(i - 1/2)/N`.
pub fn qq_pairs(values: &[f64]) -> Vec<QqPoint> {
    if values.len() < 2 {
        return Vec::new();
    }
    let s = mean_var(values);
    let sd = s.var.unwrap_or(0.0).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let prob = (i as f64 + 0.5) / n;
            QqPoint { prob, empirical: x, normal: s.mean + sd * std_normal.inverse_cdf(prob) }
        })
        .collect()
}

/// Half the L1 distance between two pmfs on the same support; the shorter
/// one is padded with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|k| (at(p, k) - at(q, k)).abs()).sum::<f64>()
}

/// Empirical pmf of non-negative integer observations over `0..=max`.
pub fn empirical_pmf(values: impl IntoIterator<Item = u64>, max: usize) -> Vec<f64> {
    let mut counts = vec![0u64; max + 1];
    let mut total = 0u64;
    for v in values {
        counts[v as usize] += 1;
        total += 1;
    }
    counts.into_iter().map(|c| c as f64 / total as f64).collect()
}

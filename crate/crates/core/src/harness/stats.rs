//! Summary statistics, the improvement metric and the Wilcoxon signed-rank test.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Largest number of nonzero differences handled by exact enumeration.
pub const EXACT_LIMIT: usize = 20;
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {MIN_PAIRS} nonzero differences, got {0}")]
    TooFewPairs(usize),
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Sample standard deviation (zero for fewer than two values).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// `(origin − adapted)/(origin − best)` as a percentage; `None` when
/// `origin == best`.
pub fn improvement(origin: f64, adapted: f64, best: f64) -> Option<f64> {
    if origin == best {
        None
    } else {
        Some((origin - adapted) / (origin - best) * 100.0)
    }
}

/// Maps both samples onto [0, 1] using their joint minimum and maximum.
pub fn normalize_pair(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let lo = x.iter().chain(y).copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().chain(y).copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let scale = |v: &f64| if span > 0.0 { (v - lo) / span } else { 0.0 };
    (x.iter().map(scale).collect(), y.iter().map(scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `min(W+, W−)`.
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    /// Rank sum of positive differences `x − y`.
    pub w_plus: f64,
    pub w_minus: f64,
    /// Nonzero differences used.
    pub n: usize,
    pub exact: bool,
}

impl WilcoxonResult {
    /// Whether `x` tends to be smaller than `y`.
    pub fn favors_x(&self) -> bool {
        self.w_minus > self.w_plus
    }
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; the null distribution is enumerated exactly (respecting tied
/// ranks) for up to [`EXACT_LIMIT`] pairs, otherwise the normal
/// approximation with tie and continuity corrections is used.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(StatsError::TooFewPairs(n));
    }
    let ranks = average_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let statistic = w_plus.min(w_minus);

    let (p_value, exact) = if n <= EXACT_LIMIT {
        (exact_p(&ranks, statistic), true)
    } else {
        (normal_p(&ranks, statistic), false)
    };
    Ok(WilcoxonResult {
        statistic,
        p_value,
        w_plus,
        w_minus,
        n,
        exact,
    })
}

/// `2·P(W+ ≤ t)` under the sign-flip null, by dynamic programming over
/// doubled ranks (average ranks are multiples of 1/2).
fn exact_p(ranks: &[f64], t: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let limit = (t * 2.0).round() as usize;
    let tail: f64 = counts[..=limit].iter().sum();
    let total = 2f64.powi(ranks.len() as i32);
    (2.0 * tail / total).min(1.0)
}

fn normal_p(ranks: &[f64], t: f64) -> f64 {
    let n = ranks.len() as f64;
    let mu = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let tj = j as f64;
        tie_term += tj * tj * tj - tj;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((t - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

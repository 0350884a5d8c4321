//! Descriptive statistics and rank tests.

use super::TelemetryError;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Largest non-zero sample size handled by exact enumeration.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    SignedRankExact,
    SignedRankNormal,
    RankSumNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMode {
    Exact,
    Approx,
    /// Exact up to [`EXACT_MAX_N`] non-zero differences, normal beyond.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsResult {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<TestMethod>,
}

/// Mean and sample standard deviation (n - 1 denominator).
pub fn describe(xs: &[f64]) -> Result<StatsResult, TelemetryError> {
    let n = xs.len();
    if n == 0 {
        return Err(TelemetryError::EmptyInput);
    }
    if n < 2 {
        return Err(TelemetryError::InsufficientForSd);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    Ok(StatsResult {
        n,
        mean,
        sd,
        statistic: None,
        p_value: None,
        method: None,
    })
}

/// `"1.95 | 0.99"`.
pub fn format_mean_sd(mean: f64, sd: f64) -> String {
    format!("{mean:.2} | {sd:.2}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedRank {
    /// Non-zero differences used.
    pub n: usize,
    pub zeros_dropped: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// min(W+, W-).
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    /// Every difference was zero; p is 1 by convention.
    pub all_zero: bool,
}

/// Mid-ranks of `v` (1-based), ties averaged.
pub fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn tie_sizes(v: &[f64]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        out.push(j - i + 1);
        i = j + 1;
    }
    out
}

/// Paired signed-rank test on `x - y`, two-sided. Zero differences are dropped.
pub fn wilcoxon_signed_rank(
    x: &[f64],
    y: &[f64],
    mode: WilcoxonMode,
) -> Result<SignedRank, TelemetryError> {
    if x.len() != y.len() {
        return Err(TelemetryError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let d: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let zeros_dropped = x.len() - d.len();
    let n = d.len();
    let exact = match mode {
        WilcoxonMode::Exact if n > EXACT_MAX_N => {
            return Err(TelemetryError::ExactTooLarge {
                n,
                max: EXACT_MAX_N,
            })
        }
        WilcoxonMode::Exact => true,
        WilcoxonMode::Approx => false,
        WilcoxonMode::Auto => n <= EXACT_MAX_N,
    };
    let method = if exact {
        TestMethod::SignedRankExact
    } else {
        TestMethod::SignedRankNormal
    };
    if n == 0 {
        return Ok(SignedRank {
            n,
            zeros_dropped,
            w_plus: 0.0,
            w_minus: 0.0,
            statistic: 0.0,
            p_value: 1.0,
            method,
            all_zero: true,
        });
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = mid_ranks(&abs);
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let p_value = if exact {
        let doubled: Vec<u64> = ranks.iter().map(|r| (r * 2.0).round() as u64).collect();
        exact_p(&doubled, (w_plus * 2.0).round() as u64)
    } else {
        let mean = total / 2.0;
        let ties: f64 = tie_sizes(&abs)
            .iter()
            .map(|&t| (t * t * t - t) as f64)
            .sum();
        let nf = n as f64;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        normal_two_sided((w_plus - mean).abs(), var)
    };
    Ok(SignedRank {
        n,
        zeros_dropped,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        p_value,
        method,
        all_zero: false,
    })
}

/// Two-sided exact p over the 2^n sign assignments, counted by subset sums of
/// the doubled ranks.
fn exact_p(doubled: &[u64], w2: u64) -> f64 {
    let t2: u64 = doubled.iter().sum();
    let mut counts = vec![0u64; t2 as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let obs = (2 * w2 as i64 - t2 as i64).abs();
    let hits: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - t2 as i64).abs() >= obs)
        .map(|(_, c)| c)
        .sum();
    hits as f64 / (1u64 << doubled.len()) as f64
}

fn normal_two_sided(dev: f64, var: f64) -> f64 {
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((dev - 0.5).max(0.0)) / var.sqrt();
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * (1.0 - std.cdf(z))).min(1.0)
}

/// Two-sample rank-sum (Mann-Whitney) test, normal approximation with tie
/// correction and continuity correction, two-sided. `statistic` is U for `x`.
pub fn rank_sum(x: &[f64], y: &[f64]) -> Result<StatsResult, TelemetryError> {
    if x.is_empty() || y.is_empty() {
        return Err(TelemetryError::EmptyInput);
    }
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let all: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = mid_ranks(&all);
    let r1: f64 = ranks[..x.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let n = n1 + n2;
    let ties: f64 = tie_sizes(&all)
        .iter()
        .map(|&t| (t * t * t - t) as f64)
        .sum();
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let p = normal_two_sided((u - n1 * n2 / 2.0).abs(), var);
    let diff = x.iter().sum::<f64>() / n1 - y.iter().sum::<f64>() / n2;
    Ok(StatsResult {
        n: all.len(),
        mean: diff,
        sd: 0.0,
        statistic: Some(u),
        p_value: Some(p),
        method: Some(TestMethod::RankSumNormal),
    })
}

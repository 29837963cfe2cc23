//! Convergence metrics: Kolmogorov-Smirnov distance against an oracle cdf,
//! KL divergence against an oracle pmf, and training MSE.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {predictions} predictions vs {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
}

/// Sup distance between the empirical cdf of `samples` and `cdf`:
/// over sorted points, max of |F(x_i) - (i-1)/n| and |F(x_i) - i/n|.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    ks_sorted(&xs, cdf)
}

pub fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        sup = sup.max((f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs()));
    }
    sup
}

/// KS from a weighted empirical distribution given as ascending
/// (value, count) pairs summing to `n`.
pub fn ks_from_counts(
    counts: impl Iterator<Item = (f64, u64)>,
    n: u64,
    cdf: impl Fn(f64) -> f64,
) -> f64 {
    let nf = n as f64;
    let mut cum = 0u64;
    let mut sup: f64 = 0.0;
    for (value, count) in counts {
        let before = cum as f64 / nf;
        cum += count;
        let after = cum as f64 / nf;
        let f = cdf(value);
        sup = sup.max((f - before).abs().max((f - after).abs()));
    }
    sup
}

/// Relative entropy sum p_emp ln(p_emp / p_oracle) with 0 ln 0 = 0.
/// Empirical mass where the oracle has none yields +inf.
pub fn kl_divergence(empirical: &BTreeMap<i64, f64>, oracle: &BTreeMap<i64, f64>) -> f64 {
    let mut kl = 0.0;
    for (k, &p) in empirical {
        if p == 0.0 {
            continue;
        }
        match oracle.get(k) {
            Some(&q) if q > 0.0 => kl += p * (p / q).ln(),
            _ => return f64::INFINITY,
        }
    }
    kl.max(0.0)
}

/// Mean squared error of per-datapoint probability predictions against
/// 0/1 labels.
pub fn mse(predictions: &[f64], labels: &[f64]) -> Result<f64, MetricError> {
    if predictions.len() != labels.len() {
        return Err(MetricError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    let n = predictions.len() as f64;
    Ok(predictions
        .iter()
        .zip(labels)
        .map(|(p, l)| (p - l) * (p - l))
        .sum::<f64>()
        / n)
}

/// Percentile by linear interpolation between closest ranks; `sorted` must
/// be ascending. Infinite entries are propagated, never mixed into NaN.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty() && (0.0..=1.0).contains(&q));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let t = h - lo as f64;
    if lo == hi || t == 0.0 || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    sorted[lo] + t * (sorted[hi] - sorted[lo])
}

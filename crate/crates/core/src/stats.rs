//! Estimators and two-sample comparisons used to validate the samplers.
//! Weighted samples are pairs `(value, weight)` and are always
//! self-normalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    if lambda < 1.18 {
        // small-argument form converges quickly here
        let x = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in (1..200).step_by(2) {
            let term = (x * (k * k) as f64).exp();
            cdf += term;
            if term < 1e-17 {
                break;
            }
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value for a KS statistic with effective sample size `n_eff`.
pub fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let sq = n_eff.sqrt();
    kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_eff: f64,
}

fn sorted_weighted(sample: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = sample.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Kish effective sample size `(sum w)^2 / sum w^2`.
pub fn effective_size(weights: impl Iterator<Item = f64> + Clone) -> f64 {
    let s: f64 = weights.clone().sum();
    let s2: f64 = weights.map(|w| w * w).sum();
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Two-sample KS test between weighted samples. The p-value uses the Kish
/// effective sizes, which reduce to the sample sizes for unit weights.
pub fn ks_two_sample_weighted(a: &[(f64, f64)], b: &[(f64, f64)]) -> KsResult {
    let a = sorted_weighted(a);
    let b = sorted_weighted(b);
    let ta: f64 = a.iter().map(|p| p.1).sum();
    let tb: f64 = b.iter().map(|p| p.1).sum();
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        d = d.max((fa / ta - fb / tb).abs());
    }
    let na = effective_size(a.iter().map(|p| p.1));
    let nb = effective_size(b.iter().map(|p| p.1));
    let n_eff = na * nb / (na + nb);
    KsResult { statistic: d, p_value: ks_p_value(d, n_eff), n_eff }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let wa: Vec<(f64, f64)> = a.iter().map(|&x| (x, 1.0)).collect();
    let wb: Vec<(f64, f64)> = b.iter().map(|&x| (x, 1.0)).collect();
    ks_two_sample_weighted(&wa, &wb)
}

/// One-sample KS test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    KsResult { statistic: d, p_value: ks_p_value(d, n), n_eff: n }
}

/// `W1` between two weighted one-dimensional samples.
pub fn wasserstein1_weighted(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let a = sorted_weighted(a);
    let b = sorted_weighted(b);
    let ta: f64 = a.iter().map(|p| p.1).sum();
    let tb: f64 = b.iter().map(|p| p.1).sum();
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut prev: Option<f64> = None;
    let mut acc = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        if let Some(px) = prev {
            acc += (fa / ta - fb / tb).abs() * (x - px);
        }
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        prev = Some(x);
    }
    acc
}

/// Weighted mean with the delta-method standard error of a ratio estimator.
pub fn self_normalized_mean(sample: &[(f64, f64)]) -> (f64, f64) {
    let n = sample.len() as f64;
    let sw: f64 = sample.iter().map(|p| p.1).sum();
    let mean = sample.iter().map(|p| p.0 * p.1).sum::<f64>() / sw;
    if sample.len() < 2 {
        return (mean, 0.0);
    }
    let wbar = sw / n;
    let var = sample.iter().map(|p| (p.1 * (p.0 - mean)).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt() / wbar)
}

/// Plain mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Median of block means over `blocks` contiguous blocks, with a one-sigma
/// half-width `sqrt(pi/2) * sd(block means) / sqrt(blocks)`.
pub fn median_of_means(xs: &[f64], blocks: usize) -> Result<(f64, f64)> {
    if blocks < 8 {
        return Err(Error::InsufficientData { have: blocks, need: 8 });
    }
    if xs.len() < 8 * blocks {
        return Err(Error::InsufficientData { have: xs.len(), need: 8 * blocks });
    }
    let base = xs.len() / blocks;
    let extra = xs.len() % blocks;
    let mut means = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        means.push(xs[start..start + len].iter().sum::<f64>() / len as f64);
        start += len;
    }
    let sd = mean_se(&means).1 * (blocks as f64).sqrt();
    means.sort_by(f64::total_cmp);
    let median = if blocks % 2 == 1 { means[blocks / 2] } else { 0.5 * (means[blocks / 2 - 1] + means[blocks / 2]) };
    let half = (std::f64::consts::PI / 2.0).sqrt() * sd / (blocks as f64).sqrt();
    Ok((median, half))
}

/// Hill estimate of the upper tail index of positive values from the top
/// `k = max(10, sqrt(n))` order statistics. `None` if the tail is flat.
pub fn hill_tail_index(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| *x > 0.0).collect();
    if v.len() < 20 {
        return None;
    }
    v.sort_by(|a, b| b.total_cmp(a));
    let k = ((v.len() as f64).sqrt() as usize).max(10).min(v.len() - 1);
    let xk = v[k];
    let s: f64 = v[..k].iter().map(|x| (x / xk).ln()).sum();
    if s > 0.0 {
        Some(k as f64 / s)
    } else {
        None
    }
}

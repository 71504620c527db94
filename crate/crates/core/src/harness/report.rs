use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::SampleRecord;
use crate::stats;

/// Heavy-tail-aware estimate of `E[M_t |V_t|^p]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub estimator: String,
    pub p: f64,
    pub n: usize,
    /// Plain sample mean and its standard error.
    pub mean: f64,
    pub mean_stderr: f64,
    pub blocks: usize,
    pub median_of_means: f64,
    /// One-sigma half-width of the median-of-means estimate.
    pub ci_half_width: f64,
    /// Hill estimate of the tail index of the weights `M_t`; values below 2
    /// suggest `E[M_t^2]` is infinite.
    pub weight_tail_index: Option<f64>,
}

impl MomentReport {
    /// `|median_of_means - target|` in units of the half-width.
    pub fn deviation(&self, target: f64) -> f64 {
        let d = (self.median_of_means - target).abs();
        if self.ci_half_width > 0.0 {
            d / self.ci_half_width
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn estimate_weighted_moment(records: &[SampleRecord], p: f64, blocks: usize) -> Result<MomentReport> {
    if records.is_empty() {
        return Err(Error::InsufficientData { have: 0, need: 8 * blocks.max(8) });
    }
    let xs: Vec<f64> = records.iter().map(|r| if p == 0.0 { r.m } else { r.m * r.v.norm().powf(p) }).collect();
    let (mean, mean_stderr) = stats::mean_se(&xs);
    let (mom, half) = stats::median_of_means(&xs, blocks)?;
    let weights: Vec<f64> = records.iter().map(|r| r.m).collect();
    Ok(MomentReport {
        estimator: format!("E[M |V|^{p}]"),
        p,
        n: records.len(),
        mean,
        mean_stderr,
        blocks,
        median_of_means: mom,
        ci_half_width: half,
        weight_tail_index: stats::hill_tail_index(&weights),
    })
}

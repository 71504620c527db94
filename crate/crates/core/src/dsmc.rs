//! Nanbu-style N-particle simulation of the Boltzmann equation, used only as
//! an independent oracle for the weighted perfect sampler.
//!
//! Each step freezes a snapshot of all velocities. Particle `i` proposes
//! collisions at the majorant rate `kappa * G`, with `G = (2 max|v|)^gamma`,
//! picks a uniform partner `j != i` from the snapshot, and accepts with
//! probability `|v_i - v_j|^gamma / G`. Only `v_i` is updated.

use serde::{Deserialize, Serialize};

use crate::collision::{post_collision, sample_sigma, uniform_sphere, ModelParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::law::VelocityLaw;
use crate::rng::RngStream;
use crate::sampler::SampleRecord;
use crate::stats::{self, KsResult};
use crate::velocity::Velocity;

const BLOCK: usize = 1024;

fn majorant(vs: &[Velocity], gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    let vmax = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    (2.0 * vmax).powf(gamma)
}

/// `0.05 / (kappa * G0)` for the initial majorant `G0` of `velocities`.
pub fn default_dt(velocities: &[Velocity], params: &ModelParams) -> f64 {
    0.05 / (params.kappa() * majorant(velocities, params.gamma).max(f64::MIN_POSITIVE))
}

fn poisson_small(mean: f64, rng: &mut RngStream) -> usize {
    let limit = (-mean).exp();
    let mut k = 0;
    let mut p = rng.uniform();
    while p > limit {
        k += 1;
        p *= rng.uniform();
    }
    k
}

/// Advances `n_particles` velocities drawn from `law` up to time `t` with
/// step `dt` (`None` picks `default_dt`). The final step is shortened to land
/// on `t` exactly.
pub fn run_dsmc(
    n_particles: usize,
    t: f64,
    dt: Option<f64>,
    law: &VelocityLaw,
    params: &ModelParams,
    rng: RngStream,
    exec: Execution,
) -> Result<Vec<Velocity>> {
    if n_particles < 2 || !n_particles.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("n_particles = {n_particles} must be even and >= 2")));
    }
    let mut init = rng.derive(0);
    let mut vs: Vec<Velocity> = (0..n_particles).map(|_| law.sample(&mut init)).collect();
    let dt = dt.unwrap_or_else(|| default_dt(&vs, params));
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt = {dt} must be > 0")));
    }
    let kappa = params.kappa();
    let gamma = params.gamma;
    let mut clock = 0.0;
    let mut step = 0u64;
    while clock < t {
        let h = dt.min(t - clock);
        let g = majorant(&vs, gamma);
        let load = h * kappa * g;
        if load > 0.5 {
            return Err(Error::StabilityViolation(load));
        }
        let snapshot = vs.clone();
        let step_rng = rng.derive(1 + step);
        let n_blocks = n_particles.div_ceil(BLOCK);
        let blocks = exec.map(n_blocks, |b| {
            let mut r = step_rng.derive(b as u64);
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n_particles);
            (lo..hi)
                .map(|i| {
                    let mut v = snapshot[i];
                    for _ in 0..poisson_small(load, &mut r) {
                        let mut j = r.below(n_particles - 1);
                        if j >= i {
                            j += 1;
                        }
                        let w = snapshot[j];
                        let rel = (v - w).norm();
                        let accept = if gamma == 0.0 { 1.0 } else { rel.powf(gamma) / g };
                        if r.uniform() < accept {
                            let sigma = sample_sigma(v, w, &params.kernel, &mut r);
                            v = post_collision(v, w, sigma).0;
                        }
                    }
                    v
                })
                .collect::<Vec<_>>()
        });
        vs = blocks.into_iter().flatten().collect();
        clock += h;
        step += 1;
    }
    Ok(vs)
}

/// Pass/fail thresholds for the oracle comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleThresholds {
    /// Radial KS must have `p > ks_alpha`.
    pub ks_alpha: f64,
    /// Moment differences must be within this many combined standard errors.
    pub moment_sigmas: f64,
    /// Upper bound on the sliced `W1` distance.
    pub sliced_w1_max: f64,
}

impl Default for OracleThresholds {
    fn default() -> Self {
        OracleThresholds { ks_alpha: 1e-3, moment_sigmas: 3.0, sliced_w1_max: 0.02 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub name: String,
    pub weighted: f64,
    pub weighted_stderr: f64,
    pub oracle: f64,
    pub oracle_stderr: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_records: usize,
    pub n_oracle: usize,
    pub radial_ks: KsResult,
    pub moments: Vec<MomentComparison>,
    pub sliced_w1: f64,
    pub n_proj: usize,
    pub thresholds: OracleThresholds,
    pub ks_pass: bool,
    pub moments_pass: bool,
    pub w1_pass: bool,
    pub pass: bool,
}

/// Average over `n_proj` random directions of the `W1` distance between the
/// projected weighted samples.
pub fn sliced_w1(a: &[(Velocity, f64)], b: &[(Velocity, f64)], n_proj: usize, rng: &mut RngStream) -> f64 {
    let mut acc = 0.0;
    for _ in 0..n_proj {
        let dir = uniform_sphere(rng);
        let pa: Vec<(f64, f64)> = a.iter().map(|(v, w)| (v.dot(dir), *w)).collect();
        let pb: Vec<(f64, f64)> = b.iter().map(|(v, w)| (v.dot(dir), *w)).collect();
        acc += stats::wasserstein1_weighted(&pa, &pb);
    }
    acc / n_proj.max(1) as f64
}

/// Compares the self-normalized weighted empirical measure of `records`
/// against the unweighted `oracle` cloud.
pub fn weighted_vs_oracle_report(
    records: &[SampleRecord],
    oracle: &[Velocity],
    n_proj: usize,
    thresholds: OracleThresholds,
    seed: u64,
) -> Result<OracleReport> {
    if records.is_empty() || oracle.is_empty() {
        return Err(Error::InsufficientData { have: records.len().min(oracle.len()), need: 1 });
    }
    let wr: Vec<(f64, f64)> = records.iter().map(|r| (r.v.norm(), r.m)).collect();
    let wo: Vec<(f64, f64)> = oracle.iter().map(|v| (v.norm(), 1.0)).collect();
    let radial_ks = stats::ks_two_sample_weighted(&wr, &wo);

    let mut moments = Vec::new();
    let mut moment = |name: &str, f: &dyn Fn(Velocity) -> f64| {
        let a: Vec<(f64, f64)> = records.iter().map(|r| (f(r.v), r.m)).collect();
        let b: Vec<f64> = oracle.iter().map(|v| f(*v)).collect();
        let (wa, sa) = stats::self_normalized_mean(&a);
        let (ob, sb) = stats::mean_se(&b);
        let sigma = sa.hypot(sb);
        let z = if sigma > 0.0 {
            (wa - ob) / sigma
        } else if wa == ob {
            0.0
        } else {
            f64::INFINITY
        };
        moments.push(MomentComparison {
            name: name.to_string(),
            weighted: wa,
            weighted_stderr: sa,
            oracle: ob,
            oracle_stderr: sb,
            z,
            pass: z.abs() <= thresholds.moment_sigmas,
        });
    };
    moment("mean_speed", &|v| v.norm());
    moment("energy", &|v| v.norm_sq());

    let pa: Vec<(Velocity, f64)> = records.iter().map(|r| (r.v, r.m)).collect();
    let pb: Vec<(Velocity, f64)> = oracle.iter().map(|v| (*v, 1.0)).collect();
    let sliced = sliced_w1(&pa, &pb, n_proj, &mut RngStream::root(seed));

    let ks_pass = radial_ks.p_value > thresholds.ks_alpha;
    let moments_pass = moments.iter().all(|m| m.pass);
    let w1_pass = sliced <= thresholds.sliced_w1_max;
    Ok(OracleReport {
        n_records: records.len(),
        n_oracle: oracle.len(),
        radial_ks,
        moments,
        sliced_w1: sliced,
        n_proj,
        thresholds,
        ks_pass,
        moments_pass,
        w1_pass,
        pass: ks_pass && moments_pass && w1_pass,
    })
}

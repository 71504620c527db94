//! Exact recursive sampler of the weighted dynamics. A replicate returns the
//! weighted state at time `t`, the number of recursive calls, and the
//! realized interaction tree.

use serde::{Deserialize, Serialize};

use crate::collision::{CollisionAux, ModelParams};
use crate::dynamics::{collision_map, lambda_rate, WeightedState};
use crate::engine::{self, JumpProcess};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::law::InitialLaw;
use crate::rng::{derive_id, RngStream};
use crate::tree::OrderedTree;
use crate::velocity::Velocity;

pub const DEFAULT_CAP: u64 = 1_000_000;

/// One replicate of the perfect sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Replicate seed; `RngStream::root(seed)` reproduces the record.
    pub seed: u64,
    pub t: f64,
    pub m: f64,
    pub v: Velocity,
    pub n: u64,
    pub tree: String,
}

impl SampleRecord {
    pub fn tree(&self) -> Result<OrderedTree> {
        OrderedTree::from_code(&self.tree)
    }
}

struct Weighted<'a> {
    f0: &'a InitialLaw,
    params: &'a ModelParams,
    kappa: f64,
}

impl JumpProcess for Weighted<'_> {
    type State = WeightedState;

    fn initial(&self, rng: &mut RngStream) -> WeightedState {
        self.f0.sample(rng)
    }

    fn rate(&self, y: &WeightedState) -> f64 {
        self.kappa * lambda_rate(y.v, self.params)
    }

    fn jump(&self, y: WeightedState, y_star: WeightedState, rng: &mut RngStream) -> WeightedState {
        let z = CollisionAux::sample(y.v, y_star.v, &self.params.kernel, rng);
        collision_map(y, y_star, z, self.params)
    }
}

/// Draws one `(Y_t, N_t)` together with its interaction tree. The record's
/// seed field is the seed of `rng`.
pub fn sample_state(t: f64, f0: &InitialLaw, params: &ModelParams, rng: RngStream, cap: u64) -> Result<SampleRecord> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("t = {t} must be finite and >= 0")));
    }
    if cap == 0 {
        return Err(Error::InvalidParams("cap must be >= 1".into()));
    }
    let seed = rng.seed();
    let process = Weighted { f0, params, kappa: params.kappa() };
    let out = engine::run(&process, t, rng, cap)?;
    Ok(SampleRecord { seed, t, m: out.state.m, v: out.state.v, n: out.n, tree: out.tree.to_string() })
}

/// `exp(kappa (1 + e0)(1 + E^(gamma/2)) t) - 1` where `E` is the initial
/// unweighted energy; bounds the mean number of recursive calls.
pub fn counter_bound(t: f64, params: &ModelParams, e0_energy: f64) -> f64 {
    let rate = params.kappa() * (1.0 + params.e0) * (1.0 + e0_energy.powf(0.5 * params.gamma));
    (rate * t).exp_m1()
}

/// Seed of replicate `i` for a run with `base_seed`.
pub fn replicate_seed(base_seed: u64, i: u64) -> u64 {
    derive_id(base_seed, i)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Batch {
    pub records: Vec<SampleRecord>,
    /// Replicates discarded because they hit the cap.
    pub failures: usize,
}

/// Runs replicates `first..first + n_rep`. Replicate `i` is driven by
/// `RngStream::root(replicate_seed(base_seed, i))`, so the result does not
/// depend on the execution policy.
pub fn batch_sample_range(
    t: f64,
    first: u64,
    n_rep: usize,
    f0: &InitialLaw,
    params: &ModelParams,
    base_seed: u64,
    cap: u64,
    exec: Execution,
) -> Result<Batch> {
    let results = exec.map(n_rep, |i| {
        let seed = replicate_seed(base_seed, first + i as u64);
        sample_state(t, f0, params, RngStream::root(seed), cap)
    });
    let mut batch = Batch::default();
    for r in results {
        match r {
            Ok(rec) => batch.records.push(rec),
            Err(Error::CapExceeded { .. }) => batch.failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(batch)
}

pub fn batch_sample(
    t: f64,
    n_rep: usize,
    f0: &InitialLaw,
    params: &ModelParams,
    base_seed: u64,
    cap: u64,
    exec: Execution,
) -> Result<Batch> {
    batch_sample_range(t, 0, n_rep, f0, params, base_seed, cap, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::AngularKernel;
    use crate::law::VelocityLaw;

    fn hard_spheres(e0: f64) -> ModelParams {
        ModelParams::new(1.0, e0, AngularKernel::normalized()).unwrap()
    }

    #[test]
    fn zero_time_returns_initial_draw() {
        let f0 = InitialLaw::unit(VelocityLaw::Gaussian { mean: Velocity::ZERO, variance: 1.0 });
        let p = hard_spheres(3.0);
        let rec = sample_state(0.0, &f0, &p, RngStream::root(4), 10).unwrap();
        assert_eq!(rec.n, 0);
        assert_eq!(rec.tree, "0");
        assert_eq!(rec.m, 1.0);
        let mut rng = RngStream::root(4);
        assert_eq!(rec.v, f0.sample(&mut rng).v);
    }

    #[test]
    fn counter_matches_tree() {
        let f0 = InitialLaw::unit(VelocityLaw::Shell { radius: 1.0 });
        let p = hard_spheres(1.0);
        let b = batch_sample(0.3, 2000, &f0, &p, 17, DEFAULT_CAP, Execution::Parallel).unwrap();
        assert_eq!(b.failures, 0);
        for r in &b.records {
            let tree = r.tree().unwrap();
            assert_eq!(tree.internal_count() as u64, r.n);
            assert!(r.m > 0.0 && r.m.is_finite());
        }
        assert!(b.records.iter().any(|r| r.n > 1));
    }

    #[test]
    fn cap_exceeded_is_counted() {
        let f0 = InitialLaw::unit(VelocityLaw::Shell { radius: 1.0 });
        let p = hard_spheres(1.0);
        let err = sample_state(5.0, &f0, &p, RngStream::root(1), 3).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 3 }));
        let b = batch_sample(5.0, 20, &f0, &p, 1, 3, Execution::Sequential).unwrap();
        assert_eq!(b.failures + b.records.len(), 20);
        assert!(b.failures > 0);
    }

    #[test]
    fn counter_bound_examples() {
        assert_eq!(counter_bound(0.0, &hard_spheres(1.0), 1.0), 0.0);
        let p0 = ModelParams::new(0.0, 1.0, AngularKernel::normalized()).unwrap();
        assert!((counter_bound(1.0, &p0, 1.0) - (4f64.exp() - 1.0)).abs() < 1e-12);
        assert!((counter_bound(0.5, &hard_spheres(1.0), 1.0) - (2f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn execution_policy_does_not_change_records() {
        let f0 = InitialLaw::unit(VelocityLaw::UniformBall { radius: 2.0 });
        let p = ModelParams::new(0.5, 1.2, AngularKernel::normalized()).unwrap();
        let a = batch_sample(0.2, 500, &f0, &p, 99, DEFAULT_CAP, Execution::Sequential).unwrap();
        let b = batch_sample(0.2, 500, &f0, &p, 99, DEFAULT_CAP, Execution::Parallel).unwrap();
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn ranges_compose() {
        let f0 = InitialLaw::unit(VelocityLaw::Shell { radius: 1.0 });
        let p = hard_spheres(1.0);
        let all = batch_sample(0.2, 300, &f0, &p, 5, DEFAULT_CAP, Execution::Parallel).unwrap();
        let lo = batch_sample_range(0.2, 0, 100, &f0, &p, 5, DEFAULT_CAP, Execution::Parallel).unwrap();
        let hi = batch_sample_range(0.2, 100, 200, &f0, &p, 5, DEFAULT_CAP, Execution::Parallel).unwrap();
        let joined: Vec<_> = lo.records.into_iter().chain(hi.records).collect();
        assert_eq!(all.records, joined);
    }
}

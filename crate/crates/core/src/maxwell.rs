//! Maxwellian molecules (`gamma = 0`): the unweighted recursive sampler, the
//! Wild iterates `Q_n`, and the Wild/McKean weights.

use crate::collision::{post_collision, sample_sigma, AngularKernel};
use crate::engine::{self, JumpProcess};
use crate::error::{Error, Result};
use crate::law::VelocityLaw;
use crate::rng::RngStream;
use crate::tree::OrderedTree;
use crate::velocity::Velocity;

struct Maxwell<'a> {
    law: &'a VelocityLaw,
    kernel: &'a AngularKernel,
    kappa: f64,
}

impl JumpProcess for Maxwell<'_> {
    type State = Velocity;

    fn initial(&self, rng: &mut RngStream) -> Velocity {
        self.law.sample(rng)
    }

    fn rate(&self, _: &Velocity) -> f64 {
        self.kappa
    }

    fn jump(&self, v: Velocity, v_star: Velocity, rng: &mut RngStream) -> Velocity {
        let sigma = sample_sigma(v, v_star, self.kernel, rng);
        post_collision(v, v_star, sigma).0
    }
}

/// Output of the Maxwellian recursive sampler.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellSample {
    pub v: Velocity,
    pub n: u64,
    pub tree: OrderedTree,
}

/// Samples `V_t` for Maxwellian molecules: constant jump rate `kappa`, no
/// weights, no fictitious jumps.
pub fn velocity_sample(
    t: f64,
    law: &VelocityLaw,
    kernel: &AngularKernel,
    rng: RngStream,
    cap: u64,
) -> Result<MaxwellSample> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("t = {t} must be finite and >= 0")));
    }
    let process = Maxwell { law, kernel, kappa: kernel.kappa() };
    let out = engine::run(&process, t, rng, cap)?;
    Ok(MaxwellSample { v: out.state, n: out.n, tree: out.tree })
}

/// `e^{-kappa t} (1 - e^{-kappa t})^{n-1}`.
pub fn wild_weight(n: u64, t: f64, kappa: f64) -> f64 {
    assert!(n >= 1);
    let survive = (-kappa * t).exp();
    survive * (-(-kappa * t).exp_m1()).powi((n - 1) as i32)
}

/// `sum_{n=1}^{order} wild_weight(n, t, kappa)` with compensated summation.
/// Equals `1 - (1 - e^{-kappa t})^order`.
pub fn wild_partial_sum(order: u64, t: f64, kappa: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=order {
        let x = wild_weight(n, t, kappa);
        let s = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - s) + x } else { (x - s) + sum };
        sum = s;
    }
    sum + comp
}

/// Weight of a tree with `l` leaves: `e^{-kappa t}(1 - e^{-kappa t})^{l - 1}`.
pub fn tree_weight(tree: &OrderedTree, t: f64, kappa: f64) -> f64 {
    wild_weight(tree.leaf_count() as u64, t, kappa)
}

/// Draws the Wild order `N` with `P(N = n) = wild_weight(n, t, kappa)` by
/// inversion of `P(N > n) = (1 - e^{-kappa t})^n`.
pub fn sample_wild_order(t: f64, kappa: f64, rng: &mut RngStream) -> u64 {
    let q = -(-kappa * t).exp_m1();
    if q <= 0.0 {
        return 1;
    }
    if q >= 1.0 {
        return u64::MAX;
    }
    let n = (rng.open01().ln() / q.ln()).ceil();
    (n.max(1.0)).min(u64::MAX as f64) as u64
}

fn qn_inner(n: u64, law: &VelocityLaw, kernel: &AngularKernel, rng: &mut RngStream) -> (Velocity, OrderedTree) {
    if n == 1 {
        return (law.sample(rng), OrderedTree::leaf());
    }
    let k = 1 + rng.below((n - 1) as usize) as u64;
    let (v, tl) = qn_inner(k, law, kernel, rng);
    let (w, tr) = qn_inner(n - k, law, kernel, rng);
    let sigma = sample_sigma(v, w, kernel, rng);
    (post_collision(v, w, sigma).0, OrderedTree::join(&tl, &tr))
}

/// Draws from `Q_n(f0)`; `n = 1` is `f0` itself, and for `n >= 2` the left
/// leaf count is uniform in `1..n`.
pub fn sample_from_qn(n: u64, law: &VelocityLaw, kernel: &AngularKernel, rng: &mut RngStream) -> Velocity {
    assert!(n >= 1);
    qn_inner(n, law, kernel, rng).0
}

/// As `sample_from_qn`, also returning the collision tree that was realized.
pub fn sample_from_qn_with_tree(
    n: u64,
    law: &VelocityLaw,
    kernel: &AngularKernel,
    rng: &mut RngStream,
) -> (Velocity, OrderedTree) {
    assert!(n >= 1);
    qn_inner(n, law, kernel, rng)
}

/// One draw of `f_t` through the Wild sum: `N` from the geometric weights,
/// then `Q_N`.
pub fn wild_mixture_sample(
    t: f64,
    law: &VelocityLaw,
    kernel: &AngularKernel,
    rng: &mut RngStream,
) -> (Velocity, OrderedTree) {
    let n = sample_wild_order(t, kernel.kappa(), rng);
    qn_inner(n, law, kernel, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wild_weight_examples() {
        assert_eq!(wild_weight(1, 0.0, 1.0), 1.0);
        assert_eq!(wild_weight(2, 0.0, 1.0), 0.0);
        assert!((wild_weight(2, 2f64.ln(), 1.0) - 0.25).abs() < 1e-15);
        let two = OrderedTree::from_code("100").unwrap();
        assert!((tree_weight(&two, 2f64.ln(), 1.0) - 0.25).abs() < 1e-15);
        assert!((tree_weight(&OrderedTree::leaf(), 0.7, 2.0) - (-1.4f64).exp()).abs() < 1e-15);
        assert_eq!(tree_weight(&two, 0.0, 3.0), 0.0);
    }

    #[test]
    fn order_at_zero_time_is_one() {
        let mut rng = RngStream::root(0);
        assert_eq!(sample_wild_order(0.0, 1.0, &mut rng), 1);
    }

    #[test]
    fn order_distribution_is_geometric() {
        let mut rng = RngStream::root(12);
        let (t, kappa) = (0.8, 1.0);
        let n = 200_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let k = sample_wild_order(t, kappa, &mut rng) as usize;
            if k <= 4 {
                counts[k - 1] += 1;
            }
        }
        for (i, c) in counts.iter().enumerate() {
            let p = wild_weight(i as u64 + 1, t, kappa);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 5.0 * se);
        }
    }

    #[test]
    fn qn_one_is_f0() {
        let law = VelocityLaw::Shell { radius: 2.0 };
        let k = AngularKernel::normalized();
        let mut a = RngStream::root(8);
        let mut b = RngStream::root(8);
        assert_eq!(sample_from_qn(1, &law, &k, &mut a), law.sample(&mut b));
    }

    #[test]
    fn maxwell_zero_time() {
        let law = VelocityLaw::Shell { radius: 2.0 };
        let k = AngularKernel::normalized();
        let s = velocity_sample(0.0, &law, &k, RngStream::root(2), 10).unwrap();
        assert_eq!(s.n, 0);
        assert!((s.v.norm() - 2.0).abs() < 1e-12);
    }
}

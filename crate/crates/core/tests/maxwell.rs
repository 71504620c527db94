use std::collections::HashMap;

use wildtree::maxwell::{sample_from_qn_with_tree, tree_weight, velocity_sample, wild_mixture_sample};
use wildtree::rng::derive_id;
use wildtree::sampler::DEFAULT_CAP;
use wildtree::stats::mean_se;
use wildtree::tree::enumerate_trees;
use wildtree::{AngularKernel, RngStream, VelocityLaw};

fn frequencies(codes: impl Iterator<Item = String>) -> (HashMap<String, usize>, usize) {
    let mut m = HashMap::new();
    let mut n = 0;
    for c in codes {
        *m.entry(c).or_default() += 1;
        n += 1;
    }
    (m, n)
}

// P(tree) = e^{-kt}(1 - e^{-kt})^{l-1} * (probability of the splits).
fn assert_tree_law(counts: &HashMap<String, usize>, n: usize, t: f64, kappa: f64) {
    for tree in enumerate_trees(7) {
        let p = tree_weight(&tree, t, kappa) * tree.split_probability();
        let f = *counts.get(tree.code()).unwrap_or(&0) as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * se + 1e-12, "{}: {f} vs {p}", tree.code());
    }
}

#[test]
fn recursive_sampler_tree_law() {
    let law = VelocityLaw::Shell { radius: 1.0 };
    let kernel = AngularKernel::normalized();
    let t = 0.7;
    let (counts, n) = frequencies((0..100_000u64).map(|i| {
        velocity_sample(t, &law, &kernel, RngStream::root(derive_id(31, i)), DEFAULT_CAP)
            .unwrap()
            .tree
            .code()
            .to_string()
    }));
    assert_tree_law(&counts, n, t, kernel.kappa());
}

#[test]
fn wild_mixture_tree_law() {
    let law = VelocityLaw::Shell { radius: 1.0 };
    let kernel = AngularKernel::normalized();
    let t = 0.7;
    let mut rng = RngStream::root(32);
    let (counts, n) =
        frequencies((0..100_000).map(|_| wild_mixture_sample(t, &law, &kernel, &mut rng).1.code().to_string()));
    assert_tree_law(&counts, n, t, kernel.kappa());
}

#[test]
fn qn_leaf_count_is_n() {
    let law = VelocityLaw::Dirac(wildtree::Velocity::new(1.0, 0.0, 0.0));
    let kernel = AngularKernel::normalized();
    let mut rng = RngStream::root(33);
    for n in 1..40u64 {
        let (_, tree) = sample_from_qn_with_tree(n, &law, &kernel, &mut rng);
        assert_eq!(tree.leaf_count() as u64, n);
    }
}

#[test]
fn energy_is_conserved_on_a_time_grid() {
    let law = VelocityLaw::Gaussian { mean: wildtree::Velocity::new(1.0, 0.0, 0.0), variance: 0.2 };
    let kernel = AngularKernel::truncated_power(2.0, 0.05).unwrap();
    for (k, t) in [0.05, 0.1, 0.25, 0.5].into_iter().enumerate() {
        let es: Vec<f64> = (0..40_000u64)
            .map(|i| {
                velocity_sample(t, &law, &kernel, RngStream::root(derive_id(34 + k as u64, i)), DEFAULT_CAP)
                    .unwrap()
                    .v
                    .norm_sq()
            })
            .collect();
        let (mean, se) = mean_se(&es);
        assert!((mean - law.energy()).abs() <= 4.0 * se, "t={t}: {mean} vs {}", law.energy());
    }
}

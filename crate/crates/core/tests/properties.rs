use proptest::prelude::*;
use wildtree::collision::{post_collision, sample_sigma};
use wildtree::dynamics::{collision_map, lambda_rate};
use wildtree::maxwell::wild_weight;
use wildtree::{AngularKernel, CollisionAux, ModelParams, OrderedTree, RngStream, Velocity, WeightedState};

fn velocity(scale: f64) -> impl Strategy<Value = Velocity> {
    (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| Velocity::new(x, y, z))
}

fn unit() -> impl Strategy<Value = Velocity> {
    velocity(1.0).prop_filter("nonzero", |v| v.norm() > 1e-3).prop_map(|v| v * (1.0 / v.norm()))
}

fn tree() -> impl Strategy<Value = OrderedTree> {
    let leaf = Just(OrderedTree::leaf());
    leaf.prop_recursive(5, 32, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| OrderedTree::join(&a, &b)))
}

proptest! {
    #[test]
    fn collisions_conserve_momentum_and_energy(v in velocity(1e3), w in velocity(1e3), s in unit()) {
        let (a, b) = post_collision(v, w, s);
        prop_assert!(((a + b) - (v + w)).norm() <= 1e-12 * (1.0 + v.norm() + w.norm()));
        prop_assert!((a.norm_sq() + b.norm_sq() - v.norm_sq() - w.norm_sq()).abs() <= 1e-10 * (1.0 + v.norm_sq() + w.norm_sq()));
    }

    #[test]
    fn sampled_sigma_is_a_unit_vector(v in velocity(10.0), w in velocity(10.0), seed in any::<u64>(), p in 0.0f64..6.0) {
        let kernel = AngularKernel::truncated_power(p, 0.02).unwrap();
        let s = sample_sigma(v, w, &kernel, &mut RngStream::root(seed));
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn weights_stay_positive(
        m in 1e-6f64..1e6, ms in 1e-6f64..1e6, v in velocity(50.0), w in velocity(50.0),
        s in unit(), a in 0.0f64..=1.0, gamma in 0.0f64..=1.0, e0 in 0.01f64..10.0,
    ) {
        let params = ModelParams::new(gamma, e0, AngularKernel::normalized()).unwrap();
        let out = collision_map(WeightedState::new(m, v), WeightedState::new(ms, w), CollisionAux::new(s, a).unwrap(), &params);
        prop_assert!(out.m > 0.0 && out.m.is_finite());
        prop_assert!(out.v.is_finite());
        prop_assert!(lambda_rate(out.v, &params) >= 1.0 + e0);
    }

    #[test]
    fn tree_code_round_trips(t in tree()) {
        let back = OrderedTree::from_code(t.code()).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(t.node_count(), 2 * t.leaf_count() - 1);
        if let Some((l, r)) = t.children() {
            prop_assert_eq!(OrderedTree::join(&l, &r), t);
        }
    }

    #[test]
    fn wild_weights_are_a_probability(t in 0.0f64..20.0, kappa in 0.01f64..10.0, n in 1u64..500) {
        let w = wild_weight(n, t, kappa);
        prop_assert!((0.0..=1.0).contains(&w));
    }
}

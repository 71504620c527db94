use wildtree::collision::uniform_sphere;
use wildtree::dynamics::{generator_b, lambda_rate};
use wildtree::{AngularKernel, ModelParams, RngStream, WeightedState};

#[test]
fn lambda_dominates_jump_rate_on_random_pairs() {
    let mut rng = RngStream::root(11);
    for gamma in [0.0, 0.3, 0.5, 1.0] {
        let params = ModelParams::new(gamma, 1.7, AngularKernel::normalized()).unwrap();
        for _ in 0..250_000 {
            let v = uniform_sphere(&mut rng) * (100.0 * rng.uniform());
            let w = uniform_sphere(&mut rng) * (100.0 * rng.uniform());
            let lhs = lambda_rate(v, &params) * (1.0 + w.norm_sq());
            let rhs = (1.0 + params.e0) * (v - w).norm().powf(gamma);
            assert!(lhs >= rhs * (1.0 - 1e-12), "gamma {gamma}: {lhs} < {rhs}");
        }
    }
}

// A(y, y*) = kappa * E[Lambda(h(y, y*, z)) - Lambda(y)] never exceeds
// kappa (1 + e0).
#[test]
fn lambda_drift_is_bounded() {
    let mut rng = RngStream::root(12);
    let params = ModelParams::new(1.0, 1.0, AngularKernel::normalized()).unwrap();
    let bound = params.kappa() * (1.0 + params.e0);
    for _ in 0..200 {
        let v = uniform_sphere(&mut rng) * (5.0 * rng.uniform());
        let w = uniform_sphere(&mut rng) * (5.0 * rng.uniform());
        let y = WeightedState::new(1.0, v);
        let ys = WeightedState::new(1.0, w);
        let lam = lambda_rate(v, &params);
        let est = generator_b(|s| lambda_rate(s.v, &params), y, ys, &params, 4_000, &mut rng);
        let a = est.value / lam;
        let se = est.stderr / lam;
        assert!(a <= bound + 4.0 * se, "A = {a} > {bound} (+-{se}) at v={v:?}, v*={w:?}");
    }
}

// The symmetrized second-moment generator is centred: momentum and energy
// are conserved per collision, so with weights frozen at 1 and gamma = 0
// the pair generator of |v|^2 cancels in expectation.
#[test]
fn symmetrized_energy_generator_cancels_for_maxwell_molecules() {
    let params = ModelParams::new(0.0, 1.0, AngularKernel::normalized()).unwrap();
    let mut rng = RngStream::root(13);
    for _ in 0..20 {
        let v = uniform_sphere(&mut rng) * 2.0 * rng.uniform();
        let w = uniform_sphere(&mut rng) * 2.0 * rng.uniform();
        let y = WeightedState::new(1.0, v);
        let ys = WeightedState::new(1.0, w);
        let phi = |s: WeightedState| s.v.norm_sq();
        let a = generator_b(phi, y, ys, &params, 20_000, &mut rng);
        let b = generator_b(phi, ys, y, &params, 20_000, &mut rng);
        let qa = 2.0 / ((1.0 + w.norm_sq()) * lambda_rate(v, &params));
        let qb = 2.0 / ((1.0 + v.norm_sq()) * lambda_rate(w, &params));
        let sum = a.value / qa + b.value / qb;
        let se = (a.stderr / qa).hypot(b.stderr / qb);
        assert!(sum.abs() <= 4.0 * se + 1e-9, "sum {sum} se {se}");
    }
}

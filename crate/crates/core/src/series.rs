//! Tree-indexed series for the weighted dynamics, realized on weighted
//! particle clouds.
//!
//! A measure on `E` (or on `R+ x E`) is a list of particles carrying a
//! nonnegative weight, a birth time, and a state. Operator applications are
//! importance sampling with the total mass of the result tracked exactly.

use std::collections::HashMap;

use crate::collision::{CollisionAux, ModelParams};
use crate::dynamics::{collision_map, lambda_rate, WeightedState};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::law::InitialLaw;
use crate::rng::RngStream;
use crate::sampler::batch_sample;
use crate::tree::{enumerate_trees, OrderedTree};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub w: f64,
    /// Birth time; zero for measures on `E` alone.
    pub s: f64,
    pub y: WeightedState,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParticleCloud {
    pub particles: Vec<Particle>,
}

impl ParticleCloud {
    pub fn new(particles: Vec<Particle>) -> Self {
        debug_assert!(particles.iter().all(|p| p.w >= 0.0 && p.w.is_finite()));
        ParticleCloud { particles }
    }

    /// `n` draws from `F0`, each of weight `1/n`, born at time 0.
    pub fn from_initial(f0: &InitialLaw, n: usize, rng: &mut RngStream) -> Self {
        let w = 1.0 / n as f64;
        ParticleCloud { particles: (0..n).map(|_| Particle { w, s: 0.0, y: f0.sample(rng) }).collect() }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.w).sum()
    }

    /// `sum w_i phi(y_i)`.
    pub fn integrate(&self, phi: impl Fn(&WeightedState) -> f64) -> f64 {
        self.particles.iter().map(|p| p.w * phi(&p.y)).sum()
    }

    pub fn extend(&mut self, other: ParticleCloud) {
        self.particles.extend(other.particles);
    }
}

// Cumulative weights for inverse-CDF selection.
struct Picker {
    cumulative: Vec<f64>,
}

impl Picker {
    fn new(weights: impl Iterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        Picker {
            cumulative: weights
                .map(|w| {
                    acc += w;
                    acc
                })
                .collect(),
        }
    }

    fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn pick(&self, rng: &mut RngStream) -> usize {
        let target = rng.uniform() * self.total();
        self.cumulative.partition_point(|&c| c <= target).min(self.cumulative.len() - 1)
    }
}

/// Importance-sampled `Q(F, G)`: the first state is drawn proportional to
/// `w Lambda(y)` from `f`, the partner proportional to `w` from `g`, and each
/// of the `n_out` outputs carries `kappa G(E) sum_i w_i Lambda(y_i) / n_out`.
pub fn q_operator(
    f: &ParticleCloud,
    g: &ParticleCloud,
    params: &ModelParams,
    n_out: usize,
    rng: &mut RngStream,
) -> Result<ParticleCloud> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptyCloud);
    }
    assert!(n_out >= 1);
    let pf = Picker::new(f.particles.iter().map(|p| p.w * lambda_rate(p.y.v, params)));
    let pg = Picker::new(g.particles.iter().map(|p| p.w));
    let total = params.kappa() * pg.total() * pf.total();
    if total <= 0.0 {
        return Ok(ParticleCloud::default());
    }
    let w = total / n_out as f64;
    let particles = (0..n_out)
        .map(|_| {
            let y = f.particles[pf.pick(rng)].y;
            let y_star = g.particles[pg.pick(rng)].y;
            let z = CollisionAux::sample(y.v, y_star.v, &params.kernel, rng);
            Particle { w, s: 0.0, y: collision_map(y, y_star, z, params) }
        })
        .collect();
    Ok(ParticleCloud { particles })
}

/// `Gamma_t(J)`: keeps particles born at `s <= t` and damps each weight by
/// `exp(-kappa Lambda(y) (t - s))`. The result lives on `E` (birth time 0).
pub fn gamma_damp(j: &ParticleCloud, t: f64, params: &ModelParams) -> ParticleCloud {
    let kappa = params.kappa();
    ParticleCloud {
        particles: j
            .particles
            .iter()
            .filter(|p| p.s <= t)
            .map(|p| Particle { w: p.w * (-kappa * lambda_rate(p.y.v, params) * (t - p.s)).exp(), s: 0.0, y: p.y })
            .collect(),
    }
}

/// Sizes for the particle representation of the series terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesBudget {
    /// Particles at the root; halved per tree level.
    pub n_particles: usize,
    /// Time strata on `(0, t]`.
    pub n_time: usize,
    /// Smallest particle count at any level.
    pub floor: usize,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        SeriesBudget { n_particles: 2048, n_time: 64, floor: 64 }
    }
}

impl SeriesBudget {
    fn at_depth(&self, depth: usize) -> usize {
        (self.n_particles >> depth.min(63)).max(self.floor).max(1)
    }
}

#[inline]
fn stratum_time(r: usize, h: f64) -> f64 {
    (r as f64 + 0.5) * h
}

// Gamma_s of a stratified J at the stratum midpoint s. Mass born in the same
// stratum is split: half of it lies before s.
fn damp_at_midpoint(j: &ParticleCloud, s: f64, params: &ModelParams) -> ParticleCloud {
    let kappa = params.kappa();
    ParticleCloud {
        particles: j
            .particles
            .iter()
            .filter(|p| p.s <= s)
            .map(|p| {
                let w =
                    if p.s == s { 0.5 * p.w } else { p.w * (-kappa * lambda_rate(p.y.v, params) * (s - p.s)).exp() };
                Particle { w, s: 0.0, y: p.y }
            })
            .collect(),
    }
}

fn build_j(
    tree: &OrderedTree,
    depth: usize,
    t: f64,
    f0: &InitialLaw,
    params: &ModelParams,
    budget: &SeriesBudget,
    rng: RngStream,
    exec: Execution,
) -> Result<ParticleCloud> {
    let n = budget.at_depth(depth);
    let Some((left, right)) = tree.children() else {
        let mut rng = rng;
        return Ok(ParticleCloud::from_initial(f0, n, &mut rng));
    };
    let jl = build_j(&left, depth + 1, t, f0, params, budget, rng.derive(0), exec)?;
    let jr = build_j(&right, depth + 1, t, f0, params, budget, rng.derive(1), exec)?;
    let h = t / budget.n_time as f64;
    let strata = exec.map(budget.n_time, |r| -> Result<Vec<Particle>> {
        let s = stratum_time(r, h);
        let fl = damp_at_midpoint(&jl, s, params);
        let gr = damp_at_midpoint(&jr, s, params);
        let mut stream = rng.derive(2 + r as u64);
        let q = q_operator(&fl, &gr, params, n, &mut stream)?;
        Ok(q.particles.into_iter().map(|p| Particle { w: p.w * h, s, y: p.y }).collect())
    });
    let mut particles = Vec::with_capacity(budget.n_time * n);
    for stratum in strata {
        particles.extend(stratum?);
    }
    Ok(ParticleCloud { particles })
}

/// Particle approximation of `J_tree(F0)` restricted to `[0, t] x E`.
///
/// The trivial tree gives `F0` at time 0. Otherwise the time integral is a
/// midpoint rule over `budget.n_time` strata, and at each midpoint `Q` is
/// applied to the damped subtree measures.
pub fn j_measure(
    tree: &OrderedTree,
    t: f64,
    f0: &InitialLaw,
    params: &ModelParams,
    budget: &SeriesBudget,
    rng: RngStream,
    exec: Execution,
) -> Result<ParticleCloud> {
    assert!(budget.n_time >= 1 && budget.n_particles >= 1);
    build_j(tree, 0, t, f0, params, budget, rng, exec)
}

/// Contribution of one tree to the truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMass {
    pub tree: OrderedTree,
    /// `Gamma_t(J_tree)(E)`.
    pub mass: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SeriesResult {
    pub cloud: ParticleCloud,
    pub per_tree: Vec<TreeMass>,
}

impl SeriesResult {
    pub fn total_mass(&self) -> f64 {
        self.per_tree.iter().map(|m| m.mass).sum()
    }
}

/// Sum of `Gamma_t(J_tree(F0))` over every tree with at most `k` nodes.
pub fn truncated_series(
    t: f64,
    k: usize,
    f0: &InitialLaw,
    params: &ModelParams,
    budget: &SeriesBudget,
    rng: RngStream,
    exec: Execution,
) -> Result<SeriesResult> {
    assert!(k >= 1);
    let trees = enumerate_trees(k);
    let clouds = exec.map(trees.len(), |i| {
        j_measure(&trees[i], t, f0, params, budget, rng.derive(i as u64), exec).map(|j| gamma_damp(&j, t, params))
    });
    let mut out = SeriesResult::default();
    for (tree, cloud) in trees.into_iter().zip(clouds) {
        let cloud = cloud?;
        out.per_tree.push(TreeMass { tree, mass: cloud.total_mass() });
        out.cloud.extend(cloud);
    }
    Ok(out)
}

/// One row of the per-tree mass table.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMassRow {
    pub tree: OrderedTree,
    pub mass: f64,
    pub stderr: f64,
}

/// Per-tree masses averaged over `repeats` independent series evaluations,
/// with the standard error of that average.
pub fn series_mass_table(
    t: f64,
    k: usize,
    f0: &InitialLaw,
    params: &ModelParams,
    budget: &SeriesBudget,
    repeats: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<TreeMassRow>> {
    assert!(repeats >= 1);
    let root = RngStream::root(seed);
    let runs = exec.map(repeats, |r| {
        truncated_series(t, k, f0, params, budget, root.derive(r as u64), exec)
            .map(|res| res.per_tree.into_iter().map(|m| m.mass).collect::<Vec<f64>>())
    });
    let runs: Vec<Vec<f64>> = runs.into_iter().collect::<Result<_>>()?;
    let trees = enumerate_trees(k);
    let n = repeats as f64;
    Ok(trees
        .into_iter()
        .enumerate()
        .map(|(i, tree)| {
            let mean = runs.iter().map(|r| r[i]).sum::<f64>() / n;
            let var =
                if repeats > 1 { runs.iter().map(|r| (r[i] - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
            TreeMassRow { tree, mass: mean, stderr: (var / n).sqrt() }
        })
        .collect())
}

/// Series mass against the empirical frequency of each tree among perfect
/// sampler records.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeCheckRow {
    pub tree: OrderedTree,
    pub series_mass: f64,
    pub series_stderr: f64,
    pub frequency: f64,
    pub frequency_stderr: f64,
    pub flagged: bool,
}

impl TreeCheckRow {
    pub fn combined_sigma(&self) -> f64 {
        self.series_stderr.hypot(self.frequency_stderr)
    }
}

/// Flags trees where the series mass and the sampler frequency differ by
/// more than four combined standard errors.
pub fn compare_tree_frequencies(rows: &[TreeMassRow], codes: &[&str]) -> Vec<TreeCheckRow> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for c in codes {
        *counts.entry(c).or_default() += 1;
    }
    let n = codes.len().max(1) as f64;
    rows.iter()
        .map(|row| {
            let p = *counts.get(row.tree.code()).unwrap_or(&0) as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt();
            let sigma = row.stderr.hypot(se);
            let diff = (row.mass - p).abs();
            TreeCheckRow {
                tree: row.tree.clone(),
                series_mass: row.mass,
                series_stderr: row.stderr,
                frequency: p,
                frequency_stderr: se,
                flagged: diff > 4.0 * sigma && diff > 0.0,
            }
        })
        .collect()
}

/// Runs the series table and `n_rep` perfect-sampler replicates and compares
/// them tree by tree.
pub fn tree_probability_check(
    t: f64,
    k: usize,
    f0: &InitialLaw,
    params: &ModelParams,
    n_rep: usize,
    budget: &SeriesBudget,
    repeats: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<TreeCheckRow>> {
    let rows = series_mass_table(t, k, f0, params, budget, repeats, seed, exec)?;
    let batch = batch_sample(t, n_rep, f0, params, seed ^ 0x005E_ED0F_7EE5, crate::sampler::DEFAULT_CAP, exec)?;
    let codes: Vec<&str> = batch.records.iter().map(|r| r.tree.as_str()).collect();
    Ok(compare_tree_frequencies(&rows, &codes))
}

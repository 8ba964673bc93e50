//! Deterministic generators for the benchmark instance families.
//!
//! # Binary tree convention
//!
//! [`gen_tree`]`(d)` is the complete binary tree with `d` edge levels
//! (`2^(d+1) - 1` nodes). With the root as seed and step limit `d`, exact
//! enumeration gives influence `d + 1` and variance
//! `(d + 1) d (2d + 1) / 12`, i.e. [`tree_influence_formula`] and
//! [`tree_variance_formula`] evaluated at `d + 1`. The closed forms in terms
//! of `t` therefore describe a tree with `t` node levels, counting the seed,
//! and the same convention is used for every depth.
//!
//! # Polysimu gadget
//!
//! [`gen_polysimu`]`(n)` has a source `0`, a hub `1` and `n - 2` hub children.
//! The edge `0 -> 1` is live with probability `99 / (n - 1)` and the hub
//! reaches its children deterministically. Two-step influence of the source
//! is exactly `100`, its variance is `99 (n - 1) - 99^2`.
//!
//! # Two-world mixture
//!
//! [`gen_two_world_mixture`] is a fixed 16-node digraph whose "red" and
//! "blue" edge sets are disjoint and each deterministic; one of them is live
//! with probability one half. Node `0` heads a red and a blue four-hop chain
//! (influence 5 under either world), node `9` fans out to three red and three
//! blue leaves (influence 4). Flipping edges independently with their
//! marginal probability 1/2 rates node `9` above node `0`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact;
use crate::graph::{Edge, Graph, SeedSet};
use crate::model::DiffusionModel;

/// Largest supported tree depth.
pub const MAX_TREE_DEPTH: u32 = 20;

/// Complete directed binary tree of depth `tau`, root 0, `p_e = 1/2`, unit weights.
pub fn gen_tree(tau: u32) -> Result<DiffusionModel> {
    if !(1..=MAX_TREE_DEPTH).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tree depth {tau} not in 1..={MAX_TREE_DEPTH}")));
    }
    let n = (1usize << (tau + 1)) - 1;
    let internal = (1usize << tau) - 1;
    let edges = (0..internal)
        .flat_map(|v| [Edge::new(v, 2 * v + 1, 0.5), Edge::new(v, 2 * v + 2, 0.5)])
        .collect();
    Ok(DiffusionModel::ic(Graph::with_unit_weights(n, edges)?))
}

/// Closed-form root influence for a tree with `t` node levels.
pub fn tree_influence_formula(t: u32) -> f64 {
    f64::from(t)
}

/// Closed-form root variance `t (t - 1) (2t - 1) / 12` for a tree with `t` node levels.
pub fn tree_variance_formula(t: u32) -> f64 {
    let t = f64::from(t);
    t * (t - 1.0) * (2.0 * t - 1.0) / 12.0
}

/// Star with center 0 and `leaves` leaves, `p = 1/2`. When `dependent`, all
/// edges form a single group that is live or dead as a whole.
pub fn gen_star(leaves: usize, dependent: bool) -> Result<DiffusionModel> {
    let n = leaves + 1;
    if dependent {
        let edges = (1..n).map(|v| Edge::grouped(0, v, 0.5, 0)).collect();
        DiffusionModel::bdep(Graph::with_unit_weights(n, edges)?, leaves.max(1))
    } else {
        let edges = (1..n).map(|v| Edge::new(0, v, 0.5)).collect();
        Ok(DiffusionModel::ic(Graph::with_unit_weights(n, edges)?))
    }
}

/// Probability of the source-to-hub edge in [`gen_polysimu`].
pub fn polysimu_hub_probability(n: usize) -> f64 {
    99.0 / (n as f64 - 1.0)
}

/// High-variance gadget: two-step influence 100 and variance close to `100 n`.
pub fn gen_polysimu(n: usize) -> Result<DiffusionModel> {
    if n < 100 {
        return Err(Error::InvalidParameter(format!("polysimu needs n >= 100, got {n}")));
    }
    let mut edges = Vec::with_capacity(n - 1);
    edges.push(Edge::new(0, 1, polysimu_hub_probability(n)));
    edges.extend((2..n).map(|v| Edge::new(1, v, 1.0)));
    Ok(DiffusionModel::ic(Graph::with_unit_weights(n, edges)?))
}

/// Node count of the two-world mixture.
pub const TWO_WORLD_NODES: usize = 16;

fn two_world_edges() -> (Vec<Edge>, Vec<Edge>) {
    let red = vec![
        Edge::new(0, 1, 1.0),
        Edge::new(1, 2, 1.0),
        Edge::new(2, 3, 1.0),
        Edge::new(3, 4, 1.0),
        Edge::new(9, 10, 1.0),
        Edge::new(9, 11, 1.0),
        Edge::new(9, 12, 1.0),
    ];
    let blue = vec![
        Edge::new(0, 5, 1.0),
        Edge::new(5, 6, 1.0),
        Edge::new(6, 7, 1.0),
        Edge::new(7, 8, 1.0),
        Edge::new(9, 13, 1.0),
        Edge::new(9, 14, 1.0),
        Edge::new(9, 15, 1.0),
    ];
    (red, blue)
}

/// Step limit the two-world mixture is designed for.
pub const TWO_WORLD_TAU: u32 = 4;

/// Two degenerate IC worlds mixed 1/2 : 1/2. Construction is checked by exact
/// enumeration: the marginal-probability IC model must rank a different
/// node first than the mixture itself.
pub fn gen_two_world_mixture() -> Result<DiffusionModel> {
    let (red, blue) = two_world_edges();
    let model = DiffusionModel::mixture(vec![
        (DiffusionModel::ic(Graph::with_unit_weights(TWO_WORLD_NODES, red)?), 0.5),
        (DiffusionModel::ic(Graph::with_unit_weights(TWO_WORLD_NODES, blue)?), 0.5),
    ])?;
    let truth = exact::single_node_influences(&model, TWO_WORLD_TAU)?;
    let marginal = exact::single_node_influences(&model.marginal_ic()?, TWO_WORLD_TAU)?;
    let (t, m) = (crate::estimators::argmax_lowest(&truth), crate::estimators::argmax_lowest(&marginal));
    if t == m {
        return Err(Error::InvalidModel("two-world construction does not separate the maximizers".into()));
    }
    Ok(model)
}

fn uniform_in<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

fn random_pairs(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let slots = n * n.saturating_sub(1);
    if m > slots {
        return Err(Error::InvalidParameter(format!("{m} edges do not fit on {n} nodes")));
    }
    let mut picks = sample(rng, slots, m).into_vec();
    picks.sort_unstable();
    Ok(picks
        .into_iter()
        .map(|k| {
            let tail = k / (n - 1);
            let r = k % (n - 1);
            (tail, if r >= tail { r + 1 } else { r })
        })
        .collect())
}

fn check_range(name: &str, (lo, hi): (f64, f64), max: f64) -> Result<()> {
    if !(0.0 <= lo && lo <= hi && hi <= max) {
        return Err(Error::InvalidParameter(format!("{name} range ({lo}, {hi}) invalid")));
    }
    Ok(())
}

/// Reproducible random IC instance: `m` distinct directed pairs without self loops.
pub fn gen_random_ic(
    n: usize,
    m: usize,
    p_range: (f64, f64),
    weight_range: (f64, f64),
    seed: u64,
) -> Result<DiffusionModel> {
    check_range("probability", p_range, 1.0)?;
    check_range("weight", weight_range, f64::MAX)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_pairs(n, m, &mut rng)?;
    let edges = pairs.into_iter().map(|(t, h)| Edge::new(t, h, uniform_in(&mut rng, p_range))).collect();
    let weights = (0..n).map(|_| uniform_in(&mut rng, weight_range)).collect();
    Ok(DiffusionModel::ic(Graph::new(n, edges, weights)?))
}

/// Random LT instance; each node's incoming weights sum to a value in `[0.5, 1]`.
pub fn gen_random_lt(n: usize, m: usize, seed: u64) -> Result<DiffusionModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_pairs(n, m, &mut rng)?;
    let raw: Vec<f64> = pairs.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
    let mut sums = vec![0.0; n];
    for ((_, h), w) in pairs.iter().zip(&raw) {
        sums[*h] += w;
    }
    let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=1.0)).collect();
    let edges = pairs
        .iter()
        .zip(&raw)
        .map(|(&(t, h), w)| Edge::new(t, h, (w / sums[h] * targets[h]).min(1.0)))
        .collect();
    DiffusionModel::lt(Graph::with_unit_weights(n, edges)?)
}

/// Random b-dependence instance: each tail's out-edges are cut into groups of
/// at most `b` edges, each group with its own probability.
pub fn gen_random_bdep(n: usize, m: usize, b: usize, p_range: (f64, f64), seed: u64) -> Result<DiffusionModel> {
    check_range("probability", p_range, 1.0)?;
    if b == 0 {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = random_pairs(n, m, &mut rng)?;
    let mut edges = Vec::with_capacity(m);
    let mut group = 0u64;
    let mut i = 0;
    while i < pairs.len() {
        let tail = pairs[i].0;
        let same_tail = pairs[i..].iter().take_while(|(t, _)| *t == tail).count();
        let size = rng.gen_range(1..=b).min(same_tail);
        let p = uniform_in(&mut rng, p_range);
        for &(t, h) in &pairs[i..i + size] {
            edges.push(Edge::grouped(t, h, p, group));
        }
        group += 1;
        i += size;
    }
    DiffusionModel::bdep(Graph::with_unit_weights(n, edges)?, b)
}

/// Random two-component mixture of IC models; the first weight is in `[0.2, 0.8]`.
pub fn gen_random_mixture(n: usize, m: usize, p_range: (f64, f64), seed: u64) -> Result<DiffusionModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: f64 = rng.gen_range(0.2..=0.8);
    let a = gen_random_ic(n, m, p_range, (1.0, 1.0), rng.gen())?;
    let b = gen_random_ic(n, m, p_range, (1.0, 1.0), rng.gen())?;
    DiffusionModel::mixture(vec![(a, w), (b, 1.0 - w)])
}

/// The deterministic 5-node max-cover fixture: `0 -> {1, 2}`, `3 -> 4`.
pub fn gen_max_cover_fixture() -> Result<DiffusionModel> {
    let edges = vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(3, 4, 1.0)];
    Ok(DiffusionModel::ic(Graph::with_unit_weights(5, edges)?))
}

/// Node ids of the tree root, star center and polysimu source.
pub const ROOT: usize = 0;

/// Convenience: the seed set holding only [`ROOT`].
pub fn root_seed() -> SeedSet {
    SeedSet::single(ROOT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_moments, single_node_influences};
    use crate::model::ModelKind;

    #[test]
    fn tree_sizes() {
        let DiffusionModel::LiveEdge(t1) = gen_tree(1).unwrap() else { panic!() };
        assert_eq!((t1.graph().n(), t1.graph().m()), (3, 2));
        let DiffusionModel::LiveEdge(t3) = gen_tree(3).unwrap() else { panic!() };
        assert_eq!((t3.graph().n(), t3.graph().m()), (15, 14));
        assert!(gen_tree(0).is_err());
        assert!(gen_tree(21).is_err());
    }

    /// Level-by-level brute force over all 2^14 edge states of the depth-3 tree.
    #[test]
    fn tree_three_moments_by_brute_force() {
        let (mut s1, mut s2) = (0.0, 0.0);
        for mask in 0u32..(1 << 14) {
            // edge 2v + c connects v to child 2v + 1 + c
            let mut reached = [false; 15];
            reached[0] = true;
            for v in 0..7 {
                for c in 0..2 {
                    if reached[v] && mask >> (2 * v + c) & 1 == 1 {
                        reached[2 * v + 1 + c] = true;
                    }
                }
            }
            let r = reached.iter().filter(|&&x| x).count() as f64;
            let p = 1.0 / 16384.0;
            s1 += p * r;
            s2 += p * r * r;
        }
        let m = exact_moments(&gen_tree(3).unwrap(), &root_seed(), 3).unwrap();
        assert!((m.influence - s1).abs() < 1e-12);
        assert!((m.variance - (s2 - s1 * s1)).abs() < 1e-12);
        assert_eq!(s1, 4.0);
        assert!((s2 - s1 * s1 - 7.0).abs() < 1e-12);
        // reconciliation: depth d matches the formulas at d + 1
        assert_eq!(tree_influence_formula(4), 4.0);
        assert_eq!(tree_variance_formula(4), 7.0);
        assert_eq!(tree_variance_formula(3), 2.5);
    }

    #[test]
    fn stars() {
        let m = exact_moments(&gen_star(200, true).unwrap(), &root_seed(), 1).unwrap();
        assert_eq!((m.influence, m.variance), (101.0, 10000.0));
        let m = exact_moments(&gen_star(200, false).unwrap(), &root_seed(), 1).unwrap();
        assert_eq!((m.influence, m.variance), (101.0, 50.0));
        let m = exact_moments(&gen_star(0, true).unwrap(), &root_seed(), 1).unwrap();
        assert_eq!(m.influence, 1.0);
    }

    #[test]
    fn polysimu_moments() {
        for n in [1000usize, 10_000] {
            let m = exact_moments(&gen_polysimu(n).unwrap(), &root_seed(), 2).unwrap();
            assert!((m.influence - 100.0).abs() < 1e-9, "n = {n}: {}", m.influence);
            let closed = 99.0 * (n as f64 - 1.0) - 99.0 * 99.0;
            assert!((m.variance - closed).abs() < 1e-6 * closed);
            let ratio = m.variance / (100.0 * n as f64);
            assert!((0.5..=1.5).contains(&ratio), "ratio {ratio}");
        }
        let p = polysimu_hub_probability(1000);
        let one = exact_moments(&gen_polysimu(1000).unwrap(), &root_seed(), 1).unwrap();
        assert!((one.influence - (1.0 + p)).abs() < 1e-12);
        assert!((one.variance - p * (1.0 - p)).abs() < 1e-12);
    }

    #[test]
    fn two_world_mixture_separates_maximizers() {
        let model = gen_two_world_mixture().unwrap();
        let truth = single_node_influences(&model, TWO_WORLD_TAU).unwrap();
        let marginal = single_node_influences(&model.marginal_ic().unwrap(), TWO_WORLD_TAU).unwrap();
        assert_eq!(truth[0], 5.0);
        assert_eq!(truth[9], 4.0);
        assert!((marginal[0] - 2.875).abs() < 1e-12);
        assert_eq!(marginal[9], 4.0);
        for i in 0..200 {
            let sim = model.sample_simulation(17, i);
            let live: Vec<usize> = sim.live_edges().collect();
            assert_eq!(live, (0..7).collect::<Vec<_>>(), "whole world is live");
        }
    }

    #[test]
    fn random_generators_are_deterministic_and_valid() {
        let fixtures = [(6, 10, 1u64), (8, 14, 2), (10, 20, 3)];
        for (n, m, seed) in fixtures {
            let a = gen_random_ic(n, m, (0.1, 0.9), (1.0, 1.0), seed).unwrap();
            let b = gen_random_ic(n, m, (0.1, 0.9), (1.0, 1.0), seed).unwrap();
            assert_eq!(a, b);
            let DiffusionModel::LiveEdge(le) = &a else { panic!() };
            assert_eq!((le.graph().n(), le.graph().m()), (n, m));
            assert!(le.graph().edges().iter().all(|e| e.tail != e.head));
        }
        assert_eq!(gen_random_lt(6, 12, 4).unwrap().kind(), ModelKind::Lt);
        assert_eq!(gen_random_bdep(6, 12, 3, (0.2, 0.8), 4).unwrap().kind(), ModelKind::Bdep { b: 3 });
        assert!(matches!(gen_random_mixture(6, 8, (0.2, 0.8), 4).unwrap().kind(), ModelKind::Mixture { .. }));
        assert!(gen_random_ic(3, 7, (0.1, 0.9), (1.0, 1.0), 0).is_err());
    }
}

//! Combined bottom-k reachability sketches over a pool of simulations.
//!
//! Every (node `u`, simulation `i`) pair with positive weight receives an
//! exponential rank with rate `w(u)`. The sketch of `v` keeps the `k`
//! smallest ranks among pairs `(u, i)` with `u` reachable from `v` in
//! simulation `i` within the step limit. A union of sketches summarizes the
//! combined reachability of a seed set, from which the total reached weight
//! is estimated without bias.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{median_odd, Oracle};
use crate::graph::SeedSet;
use crate::model::{DiffusionModel, Simulation};
use crate::reach::ReachScratch;
use crate::rng::{self, Domain};

/// Smallest supported sketch size.
pub const MIN_SKETCH_SIZE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchEntry {
    pub rank: f64,
    pub node: u32,
    pub sim: u32,
}

impl SketchEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank
            .total_cmp(&other.rank)
            .then(self.node.cmp(&other.node))
            .then(self.sim.cmp(&other.sim))
    }
}

/// Up to `k` smallest-rank reachable pairs of one node, strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeSketch {
    pub owner: usize,
    pub entries: Vec<SketchEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchSet {
    pub k: usize,
    pub rank_seed: u64,
    pub tau: u32,
    pub pool_size: usize,
    pub weights: Vec<f64>,
    pub sketches: Vec<NodeSketch>,
}

/// Rank of pair `(node, sim)`: exponential with rate `weight`.
pub fn pair_rank(rank_seed: u64, node: usize, sim: usize, weight: f64) -> f64 {
    let u = rng::keyed_uniform(rank_seed, Domain::SketchRank, sim as u64, node as u64);
    -(-u).ln_1p() / weight
}

fn merge_bottom_k(mut entries: Vec<SketchEntry>, k: usize) -> Vec<SketchEntry> {
    entries.sort_unstable_by(SketchEntry::cmp);
    entries.dedup_by(|a, b| a.node == b.node && a.sim == b.sim);
    entries.truncate(k);
    entries
}

/// Build per-node sketches over `pool` (one simulation per pool member).
pub fn build_sketches(
    model: &DiffusionModel,
    pool: &[Simulation],
    tau: u32,
    k: usize,
    rank_seed: u64,
) -> Result<SketchSet> {
    if k < MIN_SKETCH_SIZE {
        return Err(Error::InvalidParameter(format!("sketch size k = {k} must be at least {MIN_SKETCH_SIZE}")));
    }
    if pool.is_empty() {
        return Err(Error::InvalidParameter("sketches need at least one simulation".into()));
    }
    let n = model.n();
    let weights = model.weights().to_vec();
    // per-simulation bottom-k sketches, merged afterwards in simulation order
    let per_sim: Vec<Vec<Vec<SketchEntry>>> = pool
        .par_iter()
        .enumerate()
        .map(|(i, sim)| {
            let graph = model.graph_for(sim);
            let mut pairs: Vec<SketchEntry> = (0..n)
                .filter(|&u| weights[u] > 0.0)
                .map(|u| SketchEntry { rank: pair_rank(rank_seed, u, i, weights[u]), node: u as u32, sim: i as u32 })
                .collect();
            pairs.sort_unstable_by(SketchEntry::cmp);
            let mut local: Vec<Vec<SketchEntry>> = vec![Vec::new(); n];
            let mut full = 0;
            let mut scratch = ReachScratch::new(n);
            for entry in pairs {
                if full == n {
                    break;
                }
                scratch.reverse(graph, entry.node as usize, tau, |e| sim.is_live(e), |v, _| {
                    if local[v].len() < k {
                        local[v].push(entry);
                        if local[v].len() == k {
                            full += 1;
                        }
                    }
                });
            }
            local
        })
        .collect();
    let sketches = (0..n)
        .into_par_iter()
        .map(|v| {
            let all: Vec<SketchEntry> = per_sim.iter().flat_map(|s| s[v].iter().copied()).collect();
            NodeSketch { owner: v, entries: merge_bottom_k(all, k) }
        })
        .collect();
    Ok(SketchSet { k, rank_seed, tau, pool_size: pool.len(), weights, sketches })
}

impl SketchSet {
    /// Bottom-k of the union of the seeds' sketches.
    pub fn merged(&self, seeds: &SeedSet) -> Result<Vec<SketchEntry>> {
        seeds.check(self.sketches.len())?;
        let all = seeds
            .as_slice()
            .iter()
            .flat_map(|&v| self.sketches[v].entries.iter().copied())
            .collect();
        Ok(merge_bottom_k(all, self.k))
    }

    /// Estimated average reachability of `seeds` over the pool.
    pub fn query(&self, seeds: &SeedSet) -> Result<f64> {
        sketch_query(self, seeds, self.pool_size)
    }

    pub fn n(&self) -> usize {
        self.sketches.len()
    }
}

/// Estimate of `(1/ell) * sum_i R(E_i, seeds)` from merged sketches. Exact when
/// the union holds fewer than `k` pairs.
pub fn sketch_query(sketches: &SketchSet, seeds: &SeedSet, ell: usize) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter("pool size must be positive".into()));
    }
    let merged = sketches.merged(seeds)?;
    let w = &sketches.weights;
    let total = if merged.len() < sketches.k {
        // per-simulation subtotals in node order, then simulation order, the
        // same association as the averaging oracle
        let mut by_sim = merged.clone();
        by_sim.sort_unstable_by_key(|e| (e.sim, e.node));
        by_sim
            .chunk_by(|a, b| a.sim == b.sim)
            .map(|run| run.iter().map(|e| w[e.node as usize]).sum::<f64>())
            .sum::<f64>()
    } else {
        // Horvitz-Thompson with the k-th rank as threshold; for unit weights
        // this is (k - 1) / u_k with u_k the k-th smallest uniform rank.
        let threshold = merged[sketches.k - 1].rank;
        merged[..sketches.k - 1]
            .iter()
            .map(|e| {
                let wu = w[e.node as usize];
                wu / -(-wu * threshold).exp_m1()
            })
            .sum::<f64>()
    };
    Ok(total / ell as f64)
}

/// Median over pools of per-pool sketch estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchedOracle {
    pub pools: Vec<SketchSet>,
}

impl SketchedOracle {
    /// Sketch every pool of an oracle; pool `j` uses a rank seed derived from `rank_seed` and `j`.
    pub fn from_oracle(oracle: &Oracle<'_>, k: usize, rank_seed: u64) -> Result<Self> {
        let cfg = oracle.config();
        let pools = (0..cfg.pools)
            .map(|j| {
                build_sketches(oracle.model(), oracle.pool(j), cfg.tau, k, rng::derive_seed(rank_seed, j as u64))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SketchedOracle { pools })
    }

    pub fn query(&self, seeds: &SeedSet) -> Result<f64> {
        let estimates = self.pools.iter().map(|p| p.query(seeds)).collect::<Result<Vec<_>>>()?;
        Ok(median_odd(&estimates))
    }

    pub fn n(&self) -> usize {
        self.pools.first().map_or(0, SketchSet::n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{build_oracle, OracleConfig};
    use crate::graph::{Edge, Graph};

    fn det_path() -> DiffusionModel {
        DiffusionModel::ic(Graph::with_unit_weights(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap())
    }

    #[test]
    fn single_simulation_path_sketch() {
        let m = det_path();
        let pool = m.sample_range(0, 0, 1);
        let s = build_sketches(&m, &pool, 2, 3, 5).unwrap();
        let nodes: Vec<u32> = {
            let mut v: Vec<u32> = s.sketches[0].entries.iter().map(|e| e.node).collect();
            v.sort();
            v
        };
        assert_eq!(nodes, vec![0, 1, 2]);
        assert_eq!(s.sketches[2].entries.len(), 1);
        // a full sketch is estimated, one slot more is lossless
        assert!(s.query(&SeedSet::single(0)).unwrap() > 0.0);
        let roomy = build_sketches(&m, &pool, 2, 4, 5).unwrap();
        assert_eq!(roomy.query(&SeedSet::single(0)).unwrap(), 3.0);
    }

    #[test]
    fn two_identical_simulations_give_six_pairs() {
        let m = det_path();
        let pool = m.sample_range(0, 0, 2);
        let s = build_sketches(&m, &pool, 2, 10, 5).unwrap();
        assert_eq!(s.sketches[0].entries.len(), 6);
        assert_eq!(s.query(&SeedSet::single(0)).unwrap(), 3.0);
    }

    #[test]
    fn entries_are_strictly_increasing_and_bounded() {
        let g = Graph::with_unit_weights(
            6,
            vec![Edge::new(0, 1, 0.5), Edge::new(1, 2, 0.5), Edge::new(2, 3, 0.5), Edge::new(0, 4, 0.5), Edge::new(4, 5, 0.5)],
        )
        .unwrap();
        let m = DiffusionModel::ic(g);
        let pool = m.sample_range(3, 0, 20);
        let s = build_sketches(&m, &pool, 3, 4, 9).unwrap();
        for sk in &s.sketches {
            assert!(sk.entries.len() <= 4);
            assert!(sk.entries.windows(2).all(|w| w[0].cmp(&w[1]).is_lt()));
        }
    }

    #[test]
    fn small_k_is_rejected() {
        let m = det_path();
        let pool = m.sample_range(0, 0, 1);
        assert!(build_sketches(&m, &pool, 2, 2, 0).is_err());
    }

    #[test]
    fn lossless_regime_matches_averaging_oracle() {
        let g = Graph::with_unit_weights(
            5,
            vec![Edge::new(0, 1, 0.5), Edge::new(1, 2, 0.6), Edge::new(0, 3, 0.4), Edge::new(3, 4, 0.5), Edge::new(2, 4, 0.3)],
        )
        .unwrap();
        let m = DiffusionModel::ic(g);
        let oracle = build_oracle(&m, OracleConfig::new(1, 30, 3, 2).unwrap()).unwrap();
        let s = build_sketches(&m, oracle.simulations(), 3, 1000, 7).unwrap();
        for seeds in [vec![0], vec![1, 3], vec![2, 4], vec![0, 1, 2, 3, 4]] {
            let seeds = SeedSet::new(seeds, 5).unwrap();
            assert_eq!(s.query(&seeds).unwrap(), oracle.query(&seeds).unwrap());
        }
    }

    #[test]
    fn weighted_lossless_regime_is_bit_exact() {
        let m = crate::families::gen_random_ic(12, 26, (0.1, 0.7), (0.3, 3.0), 11).unwrap();
        let oracle = build_oracle(&m, OracleConfig::new(1, 37, 3, 5).unwrap()).unwrap();
        let s = build_sketches(&m, oracle.simulations(), 3, 12 * 37 + 1, 2).unwrap();
        for v in 0..12 {
            let seeds = SeedSet::new([v, (v + 5) % 12], 12).unwrap();
            assert_eq!(s.query(&seeds).unwrap().to_bits(), oracle.query(&seeds).unwrap().to_bits());
        }
    }

    #[test]
    fn lossless_union_is_subadditive() {
        let g = Graph::with_unit_weights(4, vec![Edge::new(0, 2, 0.5), Edge::new(1, 2, 0.5), Edge::new(2, 3, 0.5)]).unwrap();
        let m = DiffusionModel::ic(g);
        let pool = m.sample_range(1, 0, 25);
        let s = build_sketches(&m, &pool, 2, 500, 3).unwrap();
        let a = s.query(&SeedSet::single(0)).unwrap();
        let b = s.query(&SeedSet::single(1)).unwrap();
        let ab = s.query(&SeedSet::new([0, 1], 4).unwrap()).unwrap();
        assert!(ab <= a + b);
        assert!(ab >= a.max(b));
    }

    #[test]
    fn zero_weight_nodes_never_enter_sketches() {
        let g = Graph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], vec![1.0, 0.0, 2.0]).unwrap();
        let m = DiffusionModel::ic(g);
        let pool = m.sample_range(0, 0, 3);
        let s = build_sketches(&m, &pool, 2, 50, 1).unwrap();
        assert!(s.sketches[0].entries.iter().all(|e| e.node != 1));
        assert_eq!(s.query(&SeedSet::single(0)).unwrap(), 3.0);
    }
}

//! Averaging and median-of-averages influence oracles, their sample sizing,
//! the ε-approximation predicate and reverse-reachability baselines.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graph::SeedSet;
use crate::model::{DiffusionModel, Simulation};
use crate::reach::{reach_value_with, ReachScratch};
use crate::rng::{self, Domain};

/// Pool size factor of the median-of-averages oracle: `l = 4 c / eps^2`.
pub const MOA_POOL_SIZE_FACTOR: f64 = 4.0;
/// Pool count factor of the median-of-averages oracle: `r = 28 ln(1/delta)`.
pub const MOA_POOL_COUNT_FACTOR: f64 = 28.0;
/// Product of the two factors above; total simulations `112 c ln(1/delta) / eps^2`.
pub const MOA_TOTAL_FACTOR: f64 = MOA_POOL_SIZE_FACTOR * MOA_POOL_COUNT_FACTOR;

/// Ceiling that ignores relative rounding noise of order 1e-12.
pub(crate) fn ceil_tol(x: f64) -> usize {
    (x * (1.0 - 1e-12)).ceil().max(0.0) as usize
}

/// Smallest odd integer that is at least `x` (and at least 1).
pub(crate) fn odd_ceil(x: f64) -> usize {
    let r = ceil_tol(x).max(1);
    if r.is_multiple_of(2) {
        r + 1
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    Averaging,
    MedianOfAverages,
}

/// Pool layout and simulation stream of an oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub pools: usize,
    pub pool_size: usize,
    pub tau: u32,
    pub master_seed: u64,
}

impl OracleConfig {
    pub fn new(pools: usize, pool_size: usize, tau: u32, master_seed: u64) -> Result<Self> {
        let cfg = OracleConfig { pools, pool_size, tau, master_seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pools == 0 || (self.pools > 1 && self.pools.is_multiple_of(2)) {
            return Err(Error::InvalidParameter(format!(
                "pool count must be 1 or odd, got {}",
                self.pools
            )));
        }
        if self.pool_size == 0 {
            return Err(Error::InvalidParameter("pool size must be positive".into()));
        }
        Ok(())
    }

    pub fn with_tau(mut self, tau: u32) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn total_simulations(&self) -> usize {
        self.pools * self.pool_size
    }
}

/// Pool layout that gives an (ε, δ) guarantee for a model whose variance
/// satisfies the bound with constant `c`. The returned config has `tau = 0`
/// and seed 0; set both before building.
pub fn size_for_guarantee(epsilon: f64, delta: f64, c: f64, mode: OracleMode) -> Result<OracleConfig> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c {c} must be >= 1")));
    }
    let (pools, pool_size) = match mode {
        OracleMode::Averaging => (1, ceil_tol(c / (epsilon * epsilon * delta))),
        OracleMode::MedianOfAverages => (
            odd_ceil(MOA_POOL_COUNT_FACTOR * (1.0 / delta).ln()),
            ceil_tol(MOA_POOL_SIZE_FACTOR * c / (epsilon * epsilon)),
        ),
    };
    OracleConfig::new(pools, pool_size.max(1), 0, 0)
}

/// `|estimate - truth| <= eps * max(truth, opt1)`.
pub fn check_eps_approx(estimate: f64, truth: f64, opt1: f64, epsilon: f64) -> bool {
    (estimate - truth).abs() <= epsilon * truth.max(opt1)
}

/// One-sided Wilson score upper bound on a failure probability.
pub fn wilson_upper(failures: usize, trials: usize, confidence: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(confidence);
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).min(1.0)
}

/// Median of an odd-length slice (the middle order statistic).
pub fn median_odd(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// An immutable influence oracle: `pools x pool_size` simulations, answering
/// the median over pools of the per-pool average reachability. With one pool
/// it is the plain averaging oracle.
#[derive(Clone, Debug)]
pub struct Oracle<'m> {
    model: &'m DiffusionModel,
    config: OracleConfig,
    sims: Vec<Simulation>,
}

/// Sample `pools * pool_size` simulations at indices `0..r l`; pool `i` owns
/// indices `i l .. (i + 1) l`.
pub fn build_oracle(model: &DiffusionModel, config: OracleConfig) -> Result<Oracle<'_>> {
    config.validate()?;
    let sims = model.sample_range(config.master_seed, 0, config.total_simulations());
    Ok(Oracle { model, config, sims })
}

impl<'m> Oracle<'m> {
    /// An oracle over caller-supplied simulations (length must be `pools * pool_size`).
    pub fn from_simulations(model: &'m DiffusionModel, config: OracleConfig, sims: Vec<Simulation>) -> Result<Self> {
        config.validate()?;
        if sims.len() != config.total_simulations() {
            return Err(Error::InvalidParameter(format!(
                "expected {} simulations, got {}",
                config.total_simulations(),
                sims.len()
            )));
        }
        Ok(Oracle { model, config, sims })
    }

    pub fn model(&self) -> &'m DiffusionModel {
        self.model
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn simulations(&self) -> &[Simulation] {
        &self.sims
    }

    /// Pool `i` as a slice of simulations.
    pub fn pool(&self, i: usize) -> &[Simulation] {
        let l = self.config.pool_size;
        &self.sims[i * l..(i + 1) * l]
    }

    /// Reachability value of `seeds` on every simulation, in index order.
    pub fn reach_values(&self, seeds: &SeedSet) -> Result<Vec<f64>> {
        seeds.check(self.model.n())?;
        let tau = self.config.tau;
        let n = self.model.n();
        Ok(self
            .sims
            .par_iter()
            .map_init(
                || ReachScratch::new(n),
                |scratch, sim| reach_value_with(self.model.graph_for(sim), sim, seeds.as_slice(), tau, scratch),
            )
            .collect())
    }

    /// Average reachability of `seeds` within each pool.
    pub fn pool_averages(&self, seeds: &SeedSet) -> Result<Vec<f64>> {
        let values = self.reach_values(seeds)?;
        Ok(pool_averages_of(&values, self.config.pool_size))
    }

    /// Median over pools of the pool averages.
    pub fn query(&self, seeds: &SeedSet) -> Result<f64> {
        Ok(median_odd(&self.pool_averages(seeds)?))
    }
}

pub(crate) fn pool_averages_of(values: &[f64], pool_size: usize) -> Vec<f64> {
    values
        .chunks(pool_size)
        .map(|c| c.iter().sum::<f64>() / pool_size as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RrsMode {
    /// Each search runs on its own fresh full simulation.
    FullSimulation,
    /// Each encountered edge is flipped with its marginal probability.
    Marginal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RrsEstimate {
    pub mode: RrsMode,
    pub searches: u64,
    pub total_weight: f64,
    /// Number of searches whose reverse-reached set contains each node.
    pub hits: Vec<u64>,
    /// `total_weight * hits[v] / searches`.
    pub estimates: Vec<f64>,
}

impl RrsEstimate {
    /// Lowest-id node with the largest estimate.
    pub fn argmax(&self) -> usize {
        argmax_lowest(&self.estimates)
    }

    /// Binomial standard error of each node's estimate.
    pub fn std_errors(&self) -> Vec<f64> {
        let n = self.searches as f64;
        self.hits
            .iter()
            .map(|&h| {
                let q = h as f64 / n;
                self.total_weight * (q * (1.0 - q) / n).sqrt()
            })
            .collect()
    }
}

pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn pick_weighted(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("nonempty");
    let x = u * total;
    cumulative.partition_point(|&c| c <= x).min(cumulative.len() - 1)
}

const RRS_BLOCK: u64 = 1024;

/// Per-node influence estimates from `num_searches` reverse reachability searches.
pub fn rrs_estimate(
    model: &DiffusionModel,
    mode: RrsMode,
    num_searches: u64,
    tau: u32,
    master_seed: u64,
) -> Result<RrsEstimate> {
    let n = model.n();
    if n == 0 || num_searches == 0 {
        return Err(Error::InvalidParameter("RR searches need nodes and a positive search count".into()));
    }
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &w in model.weights() {
        acc += w;
        cumulative.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::InvalidParameter("total node weight is zero".into()));
    }
    let marginal = match mode {
        RrsMode::Marginal => Some(model.marginal_ic()?),
        RrsMode::FullSimulation => None,
    };
    let blocks = num_searches.div_ceil(RRS_BLOCK);
    let partial: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut hits = vec![0u64; n];
            let mut scratch = ReachScratch::new(n);
            let end = ((b + 1) * RRS_BLOCK).min(num_searches);
            for i in b * RRS_BLOCK..end {
                let mut rng = rng::stream(master_seed, Domain::RrTarget, i);
                let target = pick_weighted(&cumulative, rng.gen::<f64>());
                match &marginal {
                    None => {
                        let sim = model.sample_simulation(master_seed, i);
                        let graph = model.graph_for(&sim);
                        scratch.reverse(graph, target, tau, |e| sim.is_live(e), |v, _| hits[v] += 1);
                    }
                    Some(mic) => {
                        let DiffusionModel::LiveEdge(le) = mic else { unreachable!() };
                        let graph = le.graph();
                        scratch.reverse(
                            graph,
                            target,
                            tau,
                            |e| rng.gen::<f64>() < graph.edge(e).p,
                            |v, _| hits[v] += 1,
                        );
                    }
                }
            }
            hits
        })
        .collect();
    let mut hits = vec![0u64; n];
    for part in partial {
        for (h, p) in hits.iter_mut().zip(part) {
            *h += p;
        }
    }
    let estimates = hits.iter().map(|&h| acc * h as f64 / num_searches as f64).collect();
    Ok(RrsEstimate { mode, searches: num_searches, total_weight: acc, hits, estimates })
}

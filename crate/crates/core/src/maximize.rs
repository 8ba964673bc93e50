//! Seed-set maximization over influence oracles.
//!
//! [`brute_force_max`] and the greedy variants work on any [`SetFunction`].
//! [`greedy_explicit`] keeps the per-simulation reached sets of the current
//! seed set and scores candidates by the weight they add, which is the
//! standard way to run greedy on an averaging or median-of-averages oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::estimators::{
    build_oracle, median_odd, odd_ceil, ceil_tol, size_for_guarantee, Oracle, OracleConfig, OracleMode,
    MOA_POOL_COUNT_FACTOR, MOA_POOL_SIZE_FACTOR,
};
use crate::exact::{c_value, exact_influence};
use crate::graph::SeedSet;
use crate::model::DiffusionModel;
use crate::reach::ReachScratch;
use crate::rng::{derive_seed, Domain};
use crate::sketches::{SketchSet, SketchedOracle};

/// Largest number of candidate sets brute force will evaluate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

/// Memory cap for precomputed per-simulation reach sets.
pub const REACH_TABLE_BYTES: usize = 256 << 20;

/// A set function over node ids `0..n`.
pub trait SetFunction: Sync {
    fn n(&self) -> usize;
    fn value(&self, seeds: &SeedSet) -> Result<f64>;
}

impl SetFunction for Oracle<'_> {
    fn n(&self) -> usize {
        self.model().n()
    }
    fn value(&self, seeds: &SeedSet) -> Result<f64> {
        self.query(seeds)
    }
}

impl SetFunction for SketchSet {
    fn n(&self) -> usize {
        SketchSet::n(self)
    }
    fn value(&self, seeds: &SeedSet) -> Result<f64> {
        self.query(seeds)
    }
}

impl SetFunction for SketchedOracle {
    fn n(&self) -> usize {
        SketchedOracle::n(self)
    }
    fn value(&self, seeds: &SeedSet) -> Result<f64> {
        self.query(seeds)
    }
}

/// Exact influence as a set function.
pub struct ExactOracle<'m> {
    pub model: &'m DiffusionModel,
    pub tau: u32,
}

impl SetFunction for ExactOracle<'_> {
    fn n(&self) -> usize {
        self.model.n()
    }
    fn value(&self, seeds: &SeedSet) -> Result<f64> {
        exact_influence(self.model, seeds, self.tau)
    }
}

/// Wrap a closure as a set function.
pub struct FnSetFunction<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&SeedSet) -> Result<f64> + Sync> SetFunction for FnSetFunction<F> {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, seeds: &SeedSet) -> Result<f64> {
        (self.f)(seeds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Greedy,
    GreedyExplicit,
    GreedySketched,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub node: usize,
    pub gain: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveRound {
    pub round: usize,
    pub optimization_simulations: usize,
    pub candidate: SeedSet,
    pub oracle_value: f64,
    pub validation_simulations: usize,
    pub validated_value: Option<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizerResult {
    pub seeds: SeedSet,
    pub oracle_value: f64,
    pub simulations_used: usize,
    pub method: Method,
    pub trace: Vec<GreedyStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<AdaptiveRound>,
}

impl MaximizerResult {
    fn plain(seeds: SeedSet, oracle_value: f64, method: Method, trace: Vec<GreedyStep>) -> Self {
        MaximizerResult {
            seeds,
            oracle_value,
            simulations_used: 0,
            method,
            trace,
            config: None,
            rounds: Vec::new(),
        }
    }

    /// Simulations spent on optimization oracles (excludes validation).
    pub fn optimization_simulations(&self) -> usize {
        if self.rounds.is_empty() {
            self.simulations_used
        } else {
            self.rounds.iter().map(|r| r.optimization_simulations).sum()
        }
    }

    pub fn validation_simulations(&self) -> usize {
        self.rounds.iter().map(|r| r.validation_simulations).sum()
    }
}

/// Number of nonempty sets of size at most `s` over `n` elements.
pub fn candidate_count(n: usize, s: usize) -> f64 {
    (1..=s.min(n)).map(|j| ln_binomial(n as u64, j as u64).exp()).sum()
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exhaustive argmax over all nonempty sets of size at most `s`; ties go to
/// the lexicographically smallest id list. `s >= n` returns every node.
pub fn brute_force_max<F: SetFunction + ?Sized>(f: &F, s: usize) -> Result<MaximizerResult> {
    let n = f.n();
    if n == 0 || s == 0 {
        return Err(Error::InvalidParameter("brute force needs n >= 1 and s >= 1".into()));
    }
    if s >= n {
        let all = SeedSet::new(0..n, n)?;
        let v = f.value(&all)?;
        return Ok(MaximizerResult::plain(all, v, Method::BruteForce, vec![]));
    }
    let count = candidate_count(n, s);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::BudgetExceeded(format!("{count:.0} candidate sets exceed {BRUTE_FORCE_LIMIT:.0}")));
    }
    let mut sets = Vec::with_capacity(count as usize);
    for k in 1..=s {
        combinations(n, k, &mut sets);
    }
    sets.sort_unstable();
    let values = sets
        .par_iter()
        .map(|ids| f.value(&SeedSet::new(ids.iter().copied(), n)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    Ok(MaximizerResult::plain(
        SeedSet::new(sets[best].iter().copied(), n)?,
        values[best],
        Method::BruteForce,
        vec![],
    ))
}

fn pick_best(gains: &[(usize, f64)]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for &(u, g) in gains {
        if best.is_none_or(|(_, bg)| g > bg) {
            best = Some((u, g));
        }
    }
    best
}

/// Greedy by recomputing `f(S + u)` from scratch for every candidate.
pub fn greedy_max<F: SetFunction + ?Sized>(f: &F, s: usize) -> Result<MaximizerResult> {
    greedy_with_method(f, s, Method::Greedy)
}

fn greedy_with_method<F: SetFunction + ?Sized>(f: &F, s: usize, method: Method) -> Result<MaximizerResult> {
    let n = f.n();
    if s == 0 {
        return Err(Error::InvalidParameter("greedy needs s >= 1".into()));
    }
    let mut current = SeedSet::empty();
    let mut value = 0.0;
    let mut trace = Vec::new();
    for _ in 0..s.min(n) {
        let gains = (0..n)
            .into_par_iter()
            .filter(|&u| !current.contains(u))
            .map(|u| Ok((u, f.value(&current.with(u))? - value)))
            .collect::<Result<Vec<_>>>()?;
        let Some((u, gain)) = pick_best(&gains) else { break };
        current = current.with(u);
        value = f.value(&current)?;
        trace.push(GreedyStep { node: u, gain, value });
    }
    Ok(MaximizerResult::plain(current, value, method, trace))
}

/// Greedy over merged sketches.
pub fn greedy_sketched(oracle: &SketchedOracle, s: usize) -> Result<MaximizerResult> {
    greedy_with_method(oracle, s, Method::GreedySketched)
}

/// Per-simulation reach sets of every single node, as bitsets.
pub struct ReachTable {
    n: usize,
    words: usize,
    pool_size: usize,
    weights: Vec<f64>,
    unit: bool,
    bits: Vec<u64>,
}

impl ReachTable {
    /// Precompute reach sets, or `None` when they would exceed `max_bytes`.
    pub fn build(oracle: &Oracle<'_>, max_bytes: usize) -> Option<Self> {
        let model = oracle.model();
        let n = model.n();
        let words = n.div_ceil(64).max(1);
        let sims = oracle.simulations();
        let bytes = sims.len().checked_mul(n)?.checked_mul(words)?.checked_mul(8)?;
        if bytes > max_bytes {
            return None;
        }
        let tau = oracle.config().tau;
        let bits: Vec<u64> = sims
            .par_iter()
            .map_init(
                || ReachScratch::new(n),
                |scratch, sim| {
                    let graph = model.graph_for(sim);
                    let mut block = vec![0u64; n * words];
                    for u in 0..n {
                        let row = &mut block[u * words..(u + 1) * words];
                        scratch.forward(graph, sim, &[u], tau, |v, _| row[v / 64] |= 1 << (v % 64));
                    }
                    block
                },
            )
            .flatten_iter()
            .collect();
        let weights = model.weights().to_vec();
        let unit = weights.iter().all(|&w| w == 1.0);
        Some(ReachTable { n, words, pool_size: oracle.config().pool_size, weights, unit, bits })
    }

    fn row(&self, sim: usize, u: usize) -> &[u64] {
        let start = (sim * self.n + u) * self.words;
        &self.bits[start..start + self.words]
    }

    fn weight_of(&self, words: impl Iterator<Item = u64>) -> f64 {
        if self.unit {
            words.map(|w| w.count_ones() as u64).sum::<u64>() as f64
        } else {
            let mut total = 0.0;
            for (i, mut w) in words.enumerate() {
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    total += self.weights[i * 64 + b];
                    w &= w - 1;
                }
            }
            total
        }
    }

    fn sims(&self) -> usize {
        self.bits.len() / (self.n * self.words).max(1)
    }

    /// Reachability value of `seeds` in every simulation.
    pub fn values(&self, seeds: &SeedSet) -> Result<Vec<f64>> {
        seeds.check(self.n)?;
        Ok((0..self.sims())
            .into_par_iter()
            .map(|i| {
                let ids = seeds.as_slice();
                self.weight_of((0..self.words).map(|w| ids.iter().fold(0u64, |acc, &u| acc | self.row(i, u)[w])))
            })
            .collect())
    }
}

impl SetFunction for ReachTable {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, seeds: &SeedSet) -> Result<f64> {
        let values = self.values(seeds)?;
        Ok(median_odd(&crate::estimators::pool_averages_of(&values, self.pool_size)))
    }
}

/// Greedy on an oracle that keeps, for every simulation, the set reached by
/// the current seeds and scores a candidate by the weight it adds.
pub fn greedy_explicit(oracle: &Oracle<'_>, s: usize) -> Result<MaximizerResult> {
    let table = ReachTable::build(oracle, REACH_TABLE_BYTES);
    greedy_explicit_with(oracle, table.as_ref(), s)
}

fn greedy_explicit_with(oracle: &Oracle<'_>, table: Option<&ReachTable>, s: usize) -> Result<MaximizerResult> {
    if s == 0 {
        return Err(Error::InvalidParameter("greedy needs s >= 1".into()));
    }
    let model = oracle.model();
    let n = model.n();
    let words = n.div_ceil(64).max(1);
    let sims = oracle.simulations();
    let cfg = *oracle.config();
    let weights = model.weights();
    let mut covered = vec![0u64; sims.len() * words];
    let mut sums = vec![0.0f64; sims.len()];
    let mut current = SeedSet::empty();
    let mut value = 0.0;
    let mut trace = Vec::new();

    let added = |i: usize, u: usize, cov: &[u64], scratch: &mut ReachScratch| -> f64 {
        let mine = &cov[i * words..(i + 1) * words];
        match table {
            Some(t) => t.weight_of(t.row(i, u).iter().zip(mine).map(|(r, c)| r & !c)),
            None => {
                let mut extra = 0.0;
                scratch.forward(model.graph_for(&sims[i]), &sims[i], &[u], cfg.tau, |v, _| {
                    if mine[v / 64] >> (v % 64) & 1 == 0 {
                        extra += weights[v];
                    }
                });
                extra
            }
        }
    };

    for _ in 0..s.min(n) {
        let gains: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .filter(|&u| !current.contains(u))
            .map_init(
                || ReachScratch::new(n),
                |scratch, u| {
                    let totals: Vec<f64> = (0..sims.len()).map(|i| sums[i] + added(i, u, &covered, scratch)).collect();
                    let avg = median_odd(&crate::estimators::pool_averages_of(&totals, cfg.pool_size));
                    (u, avg - value)
                },
            )
            .collect();
        let Some((u, gain)) = pick_best(&gains) else { break };
        let mut scratch = ReachScratch::new(n);
        for i in 0..sims.len() {
            sums[i] += added(i, u, &covered, &mut scratch);
            let mine = &mut covered[i * words..(i + 1) * words];
            match table {
                Some(t) => mine.iter_mut().zip(t.row(i, u)).for_each(|(c, r)| *c |= r),
                None => scratch.forward(model.graph_for(&sims[i]), &sims[i], &[u], cfg.tau, |v, _| {
                    mine[v / 64] |= 1 << (v % 64)
                }),
            }
        }
        current = current.with(u);
        value = median_odd(&crate::estimators::pool_averages_of(&sums, cfg.pool_size));
        trace.push(GreedyStep { node: u, gain, value });
    }
    let mut result = MaximizerResult::plain(current, value, Method::GreedyExplicit, trace);
    result.simulations_used = cfg.total_simulations();
    result.config = Some(cfg);
    Ok(result)
}

/// Median-of-averages layout for maximization over all `C(n, s)` sets:
/// pools of `4 c / eps^2`, `28 ln(C(n, s) / delta)` pools (rounded to odd).
pub fn im_oracle_config(n: usize, s: usize, epsilon: f64, delta: f64, c: f64, tau: u32) -> Result<OracleConfig> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0 && c >= 1.0) {
        return Err(Error::InvalidParameter("need 0 < eps < 1, 0 < delta < 1, c >= 1".into()));
    }
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!("seed budget {s} not in 1..={n}")));
    }
    let ln_inv_delta_ma = ln_binomial(n as u64, s as u64) - delta.ln();
    let pools = odd_ceil(MOA_POOL_COUNT_FACTOR * ln_inv_delta_ma);
    let pool_size = ceil_tol(MOA_POOL_SIZE_FACTOR * c / (epsilon * epsilon)).max(1);
    OracleConfig::new(pools, pool_size, tau, 0)
}

fn run_base<'a>(oracle: &Oracle<'a>, s: usize, brute: bool) -> Result<MaximizerResult> {
    let table = ReachTable::build(oracle, REACH_TABLE_BYTES);
    let mut result = if brute {
        match &table {
            Some(t) => brute_force_max(t, s)?,
            None => brute_force_max(oracle, s)?,
        }
    } else {
        greedy_explicit_with(oracle, table.as_ref(), s)?
    };
    result.simulations_used = oracle.config().total_simulations();
    result.config = Some(*oracle.config());
    Ok(result)
}

/// Brute force over a built oracle, using precomputed reach sets when they fit.
pub fn brute_force_oracle(oracle: &Oracle<'_>, s: usize) -> Result<MaximizerResult> {
    run_base(oracle, s, true)
}

/// Median-of-averages oracle sized for an (ε, δ) maximization guarantee, then
/// brute force when at most [`BRUTE_FORCE_LIMIT`] sets exist, else greedy.
pub fn maximize_im(
    model: &DiffusionModel,
    s: usize,
    tau: u32,
    epsilon: f64,
    delta: f64,
    master_seed: u64,
) -> Result<MaximizerResult> {
    let c = c_value(model, tau)?;
    let cfg = im_oracle_config(model.n(), s, epsilon, delta, c, tau)?.with_seed(master_seed);
    let oracle = build_oracle(model, cfg)?;
    run_base(&oracle, s, candidate_count(model.n(), s) <= BRUTE_FORCE_LIMIT)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseAlgorithm {
    Brute,
    Greedy,
}

/// Confidence spent on the validation of round `i`.
pub fn round_delta(delta: f64, round: usize) -> f64 {
    let k = (round + 1) as f64;
    delta / (2.0 * k * k)
}

/// Doubling wrapper: optimize on an averaging oracle with `n0 * 2^i`
/// simulations, validate the candidate on fresh simulations, accept when the
/// validated estimate is at least `(1 - 2 eps)` times the optimization value.
/// Once the budget reaches the worst-case maximization budget the candidate
/// is returned without validation.
pub fn adaptive_maximize(
    model: &DiffusionModel,
    s: usize,
    tau: u32,
    epsilon: f64,
    delta: f64,
    base: BaseAlgorithm,
    master_seed: u64,
) -> Result<MaximizerResult> {
    let c = c_value(model, tau)?;
    let worst = im_oracle_config(model.n(), s, epsilon, delta, c, tau)?.total_simulations();
    let n0 = size_for_guarantee(epsilon, delta, c, OracleMode::Averaging)?.pool_size;
    let mut rounds = Vec::new();
    let mut round = 0usize;
    loop {
        let budget = n0.saturating_mul(1usize << round.min(60)).min(worst);
        let cfg = OracleConfig::new(1, budget, tau, derive_seed(master_seed, 2 * round as u64))?;
        let oracle = build_oracle(model, cfg)?;
        let candidate = run_base(&oracle, s, base == BaseAlgorithm::Brute)?;
        let last = budget >= worst;
        let mut record = AdaptiveRound {
            round,
            optimization_simulations: budget,
            candidate: candidate.seeds.clone(),
            oracle_value: candidate.oracle_value,
            validation_simulations: 0,
            validated_value: None,
            accepted: false,
        };
        let mut value = candidate.oracle_value;
        if !last {
            let vcfg = size_for_guarantee(epsilon, round_delta(delta, round), c, OracleMode::MedianOfAverages)?
                .with_tau(tau)
                .with_seed(derive_seed(derive_seed(master_seed, Domain::Validation as u64), round as u64));
            let validator = build_oracle(model, vcfg)?;
            let est = validator.query(&candidate.seeds)?;
            record.validation_simulations = vcfg.total_simulations();
            record.validated_value = Some(est);
            record.accepted = est >= (1.0 - 2.0 * epsilon) * candidate.oracle_value;
            if record.accepted {
                value = est;
            }
        }
        let done = record.accepted || last;
        rounds.push(record);
        if done {
            let simulations_used = rounds.iter().map(|r| r.optimization_simulations + r.validation_simulations).sum();
            return Ok(MaximizerResult {
                seeds: candidate.seeds,
                oracle_value: value,
                simulations_used,
                method: Method::Adaptive,
                trace: candidate.trace,
                config: None,
                rounds,
            });
        }
        round += 1;
    }
}

/// Worst-case simulation budget of [`maximize_im`] for these parameters.
pub fn worst_case_budget(model: &DiffusionModel, s: usize, tau: u32, epsilon: f64, delta: f64) -> Result<usize> {
    let c = c_value(model, tau)?;
    Ok(im_oracle_config(model.n(), s, epsilon, delta, c, tau)?.total_simulations())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_max_cover_fixture, gen_random_ic, gen_star};
    use crate::sketches::SketchedOracle;

    #[test]
    fn combinations_are_lexicographic() {
        let mut out = vec![];
        combinations(4, 2, &mut out);
        assert_eq!(out, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!((candidate_count(5, 2) - 15.0).abs() < 1e-9);
    }

    #[test]
    fn brute_force_on_max_cover() {
        let m = gen_max_cover_fixture().unwrap();
        let f = ExactOracle { model: &m, tau: 1 };
        let r = brute_force_max(&f, 2).unwrap();
        assert_eq!(r.seeds.as_slice(), &[0, 3]);
        assert_eq!(r.oracle_value, 5.0);
        let all = brute_force_max(&f, 7).unwrap();
        assert_eq!(all.seeds.as_slice(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn brute_force_budget() {
        let m = gen_star(60, false).unwrap();
        let f = ExactOracle { model: &m, tau: 1 };
        assert!(matches!(brute_force_max(&f, 5), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn brute_force_on_dependent_star() {
        let m = gen_star(200, true).unwrap();
        let f = ExactOracle { model: &m, tau: 1 };
        let r = brute_force_max(&f, 1).unwrap();
        assert_eq!(r.seeds.as_slice(), &[0]);
        assert_eq!(r.oracle_value, 101.0);
    }

    #[test]
    fn greedy_on_max_cover() {
        let m = gen_max_cover_fixture().unwrap();
        let r = greedy_max(&ExactOracle { model: &m, tau: 1 }, 2).unwrap();
        assert_eq!(r.seeds.as_slice(), &[0, 3]);
        assert_eq!(r.trace.iter().map(|t| t.node).collect::<Vec<_>>(), vec![0, 3]);
        assert_eq!(r.trace.iter().map(|t| t.gain).collect::<Vec<_>>(), vec![3.0, 2.0]);
    }

    #[test]
    fn explicit_greedy_matches_naive_and_sketched() {
        let m = gen_random_ic(12, 24, (0.2, 0.7), (1.0, 1.0), 5).unwrap();
        for (pools, size) in [(1, 60), (5, 12)] {
            let oracle = build_oracle(&m, OracleConfig::new(pools, size, 2, 3).unwrap()).unwrap();
            let naive = greedy_max(&oracle, 4).unwrap();
            let explicit = greedy_explicit(&oracle, 4).unwrap();
            let no_table = greedy_explicit_with(&oracle, None, 4).unwrap();
            assert_eq!(naive.trace, explicit.trace);
            assert_eq!(naive.trace, no_table.trace);
            let sketched = SketchedOracle::from_oracle(&oracle, 100_000, 1).unwrap();
            assert_eq!(greedy_sketched(&sketched, 4).unwrap().trace, explicit.trace);
        }
    }

    #[test]
    fn reach_table_agrees_with_bfs_queries() {
        let m = gen_random_ic(9, 16, (0.2, 0.8), (0.5, 2.0), 8).unwrap();
        let oracle = build_oracle(&m, OracleConfig::new(3, 10, 3, 1).unwrap()).unwrap();
        let table = ReachTable::build(&oracle, REACH_TABLE_BYTES).unwrap();
        for seeds in [vec![0], vec![1, 4], vec![2, 3, 8]] {
            let seeds = SeedSet::new(seeds, 9).unwrap();
            let a = table.value(&seeds).unwrap();
            let b = oracle.query(&seeds).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
        assert!(ReachTable::build(&oracle, 16).is_none());
    }

    #[test]
    fn im_budget_arithmetic() {
        let cfg = im_oracle_config(10, 2, 0.5, 0.1, 2.0, 2).unwrap();
        assert_eq!((cfg.pool_size, cfg.pools, cfg.total_simulations()), (32, 173, 5536));
    }

    #[test]
    fn deterministic_model_is_solved_exactly() {
        let m = gen_max_cover_fixture().unwrap();
        let r = maximize_im(&m, 2, 1, 0.5, 0.1, 7).unwrap();
        assert_eq!(r.seeds.as_slice(), &[0, 3]);
        assert_eq!(r.oracle_value, 5.0);
        assert_eq!(r.method, Method::BruteForce);
        assert_eq!(r.simulations_used, r.config.unwrap().total_simulations());
    }

    #[test]
    fn adaptive_accepts_deterministic_model_at_round_zero() {
        let m = gen_max_cover_fixture().unwrap();
        for base in [BaseAlgorithm::Brute, BaseAlgorithm::Greedy] {
            let r = adaptive_maximize(&m, 2, 1, 0.1, 0.1, base, 3).unwrap();
            assert_eq!(r.rounds.len(), 1);
            assert!(r.rounds[0].accepted);
            assert_eq!(r.seeds.as_slice(), &[0, 3]);
            let n0 = size_for_guarantee(0.1, 0.1, 1.0, OracleMode::Averaging).unwrap().pool_size;
            assert_eq!(r.optimization_simulations(), n0);
            assert!(r.oracle_value >= (1.0 - 0.2) * r.rounds[0].oracle_value);
        }
    }

    #[test]
    fn round_deltas_sum_below_delta() {
        let total: f64 = (0..10_000).map(|i| round_delta(0.1, i)).sum();
        assert!(total < 0.1 * std::f64::consts::PI.powi(2) / 12.0 + 1e-12);
        assert!(total < 0.1);
    }
}

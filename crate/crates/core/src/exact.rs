//! Exact influence, variance and activation-depth profiles by weighted
//! enumeration of live-edge outcomes.
//!
//! The enumeration is lazy: a variable is branched on only when the BFS
//! from the seed set first inspects one of its edges toward an unreached
//! node. Variables that never matter for the reached set are summed out, so
//! the number of enumerated outcomes is the number of distinct reached
//! configurations rather than `2^m`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SeedSet;
use crate::model::{DiffusionModel, Family, LiveEdgeModel, ModelKind};

/// Maximum number of enumerated outcomes per exact computation.
pub const OUTCOME_BUDGET: u64 = 1 << 25;

/// Tolerance factor used when deciding whether a variance bound holds.
pub const AUDIT_SLACK: f64 = 1e-9;

const UNSET: u32 = u32::MAX;

/// Exact first and second moments of the reachability utility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub influence: f64,
    pub second_moment: f64,
    pub variance: f64,
    /// `step_probs[v][d]`: probability that `v` is first activated at step `d`.
    pub step_probs: Vec<Vec<f64>>,
    pub enumeration_size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub seeds: SeedSet,
    pub tau: u32,
    pub influence: f64,
    pub variance: f64,
    pub step_probs: Vec<Vec<f64>>,
    pub opt1: f64,
    pub enumeration_size: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub influence: f64,
    pub opt1: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    /// Influence-weighted mean activation depth.
    pub mean_depth: f64,
    /// `influence_by_tau[t]` is the influence with step limit `t`.
    pub influence_by_tau: Vec<f64>,
}

struct Accumulator {
    stride: usize,
    sum: f64,
    sum_sq: f64,
    steps: Vec<f64>,
    leaves: u64,
    over_budget: bool,
}

#[derive(Clone)]
struct State {
    assign: Vec<u32>,
    depth: Vec<u32>,
    queue: Vec<usize>,
    head: usize,
    cursor: usize,
}

struct Enumerator<'a> {
    model: &'a LiveEdgeModel,
    certain: Vec<Option<usize>>,
    tau: u32,
}

impl Enumerator<'_> {
    fn run(&self, mut st: State, prob: f64, acc: &mut Accumulator) {
        if acc.over_budget {
            return;
        }
        let graph = self.model.graph();
        while st.head < st.queue.len() {
            let u = st.queue[st.head];
            let d = st.depth[u];
            let outs = graph.out_edges(u);
            if d >= self.tau {
                st.head += 1;
                st.cursor = 0;
                continue;
            }
            while st.cursor < outs.len() {
                let e = outs[st.cursor];
                let v = graph.edge(e).head;
                if st.depth[v] != UNSET {
                    st.cursor += 1;
                    continue;
                }
                let (var, live_outcome) = self.model.edge_owner[e];
                if st.assign[var] == UNSET {
                    if let Some(c) = self.certain[var] {
                        st.assign[var] = c as u32;
                    } else {
                        let outcomes = &self.model.vars[var].outcomes;
                        let last = outcomes.iter().rposition(|o| o.prob > 0.0).unwrap_or(0);
                        for (i, o) in outcomes.iter().enumerate().take(last) {
                            if o.prob > 0.0 {
                                let mut branch = st.clone();
                                branch.assign[var] = i as u32;
                                self.run(branch, prob * o.prob, acc);
                            }
                        }
                        st.assign[var] = last as u32;
                        self.run(st, prob * outcomes[last].prob, acc);
                        return;
                    }
                }
                if st.assign[var] as usize == live_outcome {
                    st.depth[v] = d + 1;
                    st.queue.push(v);
                }
                st.cursor += 1;
            }
            st.head += 1;
            st.cursor = 0;
        }
        acc.leaves += 1;
        if acc.leaves > OUTCOME_BUDGET {
            acc.over_budget = true;
            return;
        }
        let mut r = 0.0;
        for &v in &st.queue {
            r += graph.weight(v);
            acc.steps[v * acc.stride + st.depth[v] as usize] += prob;
        }
        acc.sum += prob * r;
        acc.sum_sq += prob * r * r;
    }
}

fn effective_tau(n: usize, tau: u32) -> u32 {
    tau.min(n.saturating_sub(1) as u32)
}

/// Lazy enumeration of one live-edge component.
pub(crate) fn enumerate_component(model: &LiveEdgeModel, seeds: &[usize], tau: u32) -> Result<Moments> {
    let n = model.graph().n();
    let tau = effective_tau(n, tau);
    let stride = tau as usize + 1;
    let mut acc = Accumulator {
        stride,
        sum: 0.0,
        sum_sq: 0.0,
        steps: vec![0.0; n * stride],
        leaves: 0,
        over_budget: false,
    };
    let mut depth = vec![UNSET; n];
    for &s in seeds {
        depth[s] = 0;
    }
    let st = State {
        assign: vec![UNSET; model.num_variables()],
        depth,
        queue: seeds.to_vec(),
        head: 0,
        cursor: 0,
    };
    let en = Enumerator {
        model,
        certain: model.vars.iter().map(|v| v.certain()).collect(),
        tau,
    };
    en.run(st, 1.0, &mut acc);
    if acc.over_budget {
        return Err(Error::TooLarge(format!(
            "more than {OUTCOME_BUDGET} reachability outcomes"
        )));
    }
    Ok(finish(acc.sum, acc.sum_sq, acc.steps, stride, acc.leaves))
}

fn finish(sum: f64, sum_sq: f64, steps: Vec<f64>, stride: usize, leaves: u64) -> Moments {
    Moments {
        influence: sum,
        second_moment: sum_sq,
        variance: (sum_sq - sum * sum).max(0.0),
        step_probs: steps.chunks(stride).map(<[f64]>::to_vec).collect(),
        enumeration_size: leaves,
    }
}

/// Closed form for step limits 0 and 1 on IC and LT: activations of distinct
/// non-seed nodes depend on disjoint independent variables.
fn one_step_component(model: &LiveEdgeModel, seeds: &[usize], tau: u32) -> Moments {
    let graph = model.graph();
    let n = graph.n();
    let stride = effective_tau(n, tau) as usize + 1;
    let mut steps = vec![0.0; n * stride];
    let mut in_seed = vec![false; n];
    let mut sum = 0.0;
    for &s in seeds {
        in_seed[s] = true;
        steps[s * stride] = 1.0;
        sum += graph.weight(s);
    }
    let mut var = 0.0;
    if stride > 1 {
        for v in (0..n).filter(|&v| !in_seed[v]) {
            let from_seeds = graph.in_edges(v).iter().map(|&e| graph.edge(e)).filter(|e| in_seed[e.tail]);
            let q = match model.family() {
                Family::Lt => from_seeds.map(|e| e.p).sum::<f64>().min(1.0),
                _ => 1.0 - from_seeds.map(|e| 1.0 - e.p).product::<f64>(),
            };
            steps[v * stride + 1] = q;
            let w = graph.weight(v);
            sum += w * q;
            var += w * w * q * (1.0 - q);
        }
    }
    Moments {
        influence: sum,
        second_moment: var + sum * sum,
        variance: var,
        step_probs: steps.chunks(stride).map(<[f64]>::to_vec).collect(),
        enumeration_size: 1,
    }
}

fn component_moments(model: &LiveEdgeModel, seeds: &[usize], tau: u32) -> Result<Moments> {
    match model.family() {
        Family::Ic | Family::Lt if tau <= 1 => Ok(one_step_component(model, seeds, tau)),
        _ => enumerate_component(model, seeds, tau),
    }
}

/// Exact moments of `R^tau(seeds)` (no single-node maximum).
pub fn exact_moments(model: &DiffusionModel, seeds: &SeedSet, tau: u32) -> Result<Moments> {
    seeds.check(model.n())?;
    let comps = model.components();
    if comps.len() == 1 {
        return component_moments(comps[0].0, seeds.as_slice(), tau);
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut leaves = 0;
    let mut steps: Option<Vec<Vec<f64>>> = None;
    for (m, w) in comps {
        let part = component_moments(m, seeds.as_slice(), tau)?;
        sum += w * part.influence;
        sum_sq += w * part.second_moment;
        leaves += part.enumeration_size;
        match steps.as_mut() {
            None => {
                steps = Some(part.step_probs.iter().map(|r| r.iter().map(|p| w * p).collect()).collect())
            }
            Some(acc) => {
                for (row, prow) in acc.iter_mut().zip(&part.step_probs) {
                    for (a, p) in row.iter_mut().zip(prow) {
                        *a += w * p;
                    }
                }
            }
        }
    }
    Ok(Moments {
        influence: sum,
        second_moment: sum_sq,
        variance: (sum_sq - sum * sum).max(0.0),
        step_probs: steps.unwrap_or_default(),
        enumeration_size: leaves,
    })
}

/// Exact influence `I^tau(seeds)`.
pub fn exact_influence(model: &DiffusionModel, seeds: &SeedSet, tau: u32) -> Result<f64> {
    Ok(exact_moments(model, seeds, tau)?.influence)
}

/// Exact influence of every single node.
pub fn single_node_influences(model: &DiffusionModel, tau: u32) -> Result<Vec<f64>> {
    (0..model.n())
        .into_par_iter()
        .map(|v| exact_influence(model, &SeedSet::single(v), tau))
        .collect()
}

/// `OPT^tau_1`: the largest single-node influence.
pub fn opt1(model: &DiffusionModel, tau: u32) -> Result<f64> {
    Ok(single_node_influences(model, tau)?.into_iter().fold(0.0, f64::max))
}

pub fn exact_report(model: &DiffusionModel, seeds: &SeedSet, tau: u32) -> Result<ExactReport> {
    let m = exact_moments(model, seeds, tau)?;
    let opt1 = opt1(model, tau)?;
    Ok(ExactReport {
        seeds: seeds.clone(),
        tau,
        influence: m.influence,
        variance: m.variance,
        step_probs: m.step_probs,
        opt1,
        enumeration_size: m.enumeration_size,
    })
}

/// Compare the exact variance with `c * I(T) * max(I(T), OPT_1)`.
pub fn audit_variance_bound(model: &DiffusionModel, seeds: &SeedSet, tau: u32, c: f64) -> Result<VarianceAudit> {
    let m = exact_moments(model, seeds, tau)?;
    let opt1 = opt1(model, tau)?;
    Ok(audit_from(m.variance, m.influence, opt1, c))
}

pub(crate) fn audit_from(variance: f64, influence: f64, opt1: f64, c: f64) -> VarianceAudit {
    let rhs = c * influence * influence.max(opt1);
    VarianceAudit {
        lhs: variance,
        rhs,
        holds: variance <= rhs * (1.0 + AUDIT_SLACK),
        influence,
        opt1,
        c,
    }
}

/// Variance-bound constant for a model family: `tau` for IC and LT,
/// `2 b tau` for b-dependence, `(tau + 1) / p_min` for mixtures.
pub fn c_value(model: &DiffusionModel, tau: u32) -> Result<f64> {
    if tau == 0 {
        return Err(Error::InvalidParameter("c value needs tau >= 1".into()));
    }
    let t = f64::from(tau);
    Ok(match model.kind() {
        ModelKind::Ic | ModelKind::Lt => t,
        ModelKind::Bdep { b } => 2.0 * b as f64 * t,
        ModelKind::Mixture { p_min, .. } => (t + 1.0) / p_min,
    })
}

/// Mean activation depth and influence for every step limit up to `tau_max`.
pub fn depth_profile(model: &DiffusionModel, seeds: &SeedSet, tau_max: u32) -> Result<DepthProfile> {
    let m = exact_moments(model, seeds, tau_max)?;
    let weights = model.weights();
    let levels = m.step_probs.first().map_or(1, Vec::len);
    let mut by_level = vec![0.0; levels];
    for (v, row) in m.step_probs.iter().enumerate() {
        for (d, p) in row.iter().enumerate() {
            by_level[d] += weights[v] * p;
        }
    }
    let mut influence_by_tau = Vec::with_capacity(tau_max as usize + 1);
    let mut running = 0.0;
    for t in 0..=tau_max as usize {
        running += by_level.get(t).copied().unwrap_or(0.0);
        influence_by_tau.push(running);
    }
    let weighted_depth: f64 = by_level.iter().enumerate().map(|(d, x)| d as f64 * x).sum();
    let mean_depth = if m.influence > 0.0 { weighted_depth / m.influence } else { 0.0 };
    Ok(DepthProfile { mean_depth, influence_by_tau })
}

/// The step limit `ceil(mean_depth / eps)` that captures a `(1 - eps)` share
/// of unrestricted influence.
pub fn step_horizon(mean_depth: f64, eps: f64) -> u32 {
    // tolerate tiny rounding above an integer ratio
    let ratio = mean_depth / eps;
    let r = ratio.round();
    if (ratio - r).abs() < 1e-9 {
        r as u32
    } else {
        ratio.ceil() as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Graph};

    fn det_path() -> DiffusionModel {
        DiffusionModel::ic(Graph::with_unit_weights(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap())
    }

    /// Brute force over all 2^m edge states of an IC model.
    fn brute_ic(graph: &Graph, seeds: &[usize], tau: u32) -> (f64, f64) {
        let m = graph.m();
        let (mut s1, mut s2) = (0.0, 0.0);
        for mask in 0u64..(1 << m) {
            let mut prob = 1.0;
            let mut live = vec![];
            for e in 0..m {
                let p = graph.edge(e).p;
                if mask >> e & 1 == 1 {
                    prob *= p;
                    live.push(e);
                } else {
                    prob *= 1.0 - p;
                }
            }
            let sim = crate::model::Simulation::from_live_edges(m, &live, 0).unwrap();
            let r = crate::reach::reach_value(graph, &sim, &SeedSet::new(seeds.to_vec(), graph.n()).unwrap(), tau)
                .unwrap();
            s1 += prob * r;
            s2 += prob * r * r;
        }
        (s1, s2 - s1 * s1)
    }

    #[test]
    fn deterministic_path() {
        let r = exact_report(&det_path(), &SeedSet::single(0), 2).unwrap();
        assert_eq!(r.influence, 3.0);
        assert_eq!(r.variance, 0.0);
        assert_eq!(r.opt1, 3.0);
        assert_eq!(r.step_probs[2], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn lazy_enumeration_matches_brute_force() {
        let edges = vec![
            Edge::new(0, 1, 0.3),
            Edge::new(0, 2, 0.6),
            Edge::new(1, 2, 0.5),
            Edge::new(2, 3, 0.9),
            Edge::new(1, 3, 0.2),
            Edge::new(3, 0, 0.4),
            Edge::new(2, 1, 0.7),
        ];
        let g = Graph::new(4, edges, vec![1.0, 0.5, 2.0, 1.5]).unwrap();
        let model = DiffusionModel::ic(g.clone());
        for tau in 0..4 {
            for seeds in [vec![0], vec![1], vec![0, 2]] {
                let (mean, var) = brute_ic(&g, &seeds, tau);
                let DiffusionModel::LiveEdge(le) = &model else { unreachable!() };
                let lazy = enumerate_component(le, &seeds, tau).unwrap();
                assert!((lazy.influence - mean).abs() < 1e-12, "tau {tau} seeds {seeds:?}");
                assert!((lazy.variance - var).abs() < 1e-10);
                let any = exact_moments(&model, &SeedSet::new(seeds.clone(), 4).unwrap(), tau).unwrap();
                assert!((any.influence - mean).abs() < 1e-12);
                assert!((any.variance - var).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn star_two_hundred_leaves() {
        let dep: Vec<Edge> = (1..=200).map(|v| Edge::grouped(0, v, 0.5, 0)).collect();
        let dep = DiffusionModel::bdep(Graph::with_unit_weights(201, dep).unwrap(), 200).unwrap();
        let m = exact_moments(&dep, &SeedSet::single(0), 1).unwrap();
        assert_eq!(m.influence, 101.0);
        assert_eq!(m.variance, 10000.0);

        let ind: Vec<Edge> = (1..=200).map(|v| Edge::new(0, v, 0.5)).collect();
        let ind = DiffusionModel::ic(Graph::with_unit_weights(201, ind).unwrap());
        let m = exact_moments(&ind, &SeedSet::single(0), 1).unwrap();
        assert_eq!(m.influence, 101.0);
        assert_eq!(m.variance, 50.0);
    }

    #[test]
    fn dependent_star_audit_reports_the_pair() {
        let dep: Vec<Edge> = (1..=200).map(|v| Edge::grouped(0, v, 0.5, 0)).collect();
        let dep = DiffusionModel::bdep(Graph::with_unit_weights(201, dep).unwrap(), 200).unwrap();
        let a = audit_variance_bound(&dep, &SeedSet::single(0), 1, 1.0).unwrap();
        assert_eq!(a.lhs, 10000.0);
        assert_eq!(a.rhs, 10201.0);
        assert!(a.holds);
        assert_eq!(c_value(&dep, 1).unwrap(), 400.0);
    }

    #[test]
    fn c_values_by_family() {
        let ic = det_path();
        assert_eq!(c_value(&ic, 4).unwrap(), 4.0);
        assert!(c_value(&ic, 0).is_err());
        let g = Graph::with_unit_weights(4, vec![Edge::grouped(0, 1, 0.5, 0)]).unwrap();
        assert_eq!(c_value(&DiffusionModel::bdep(g, 3).unwrap(), 2).unwrap(), 12.0);
        let mx = DiffusionModel::mixture(vec![(det_path(), 0.25), (det_path(), 0.75)]).unwrap();
        assert_eq!(c_value(&mx, 3).unwrap(), 16.0);
    }

    #[test]
    fn depth_profiles() {
        let p = depth_profile(&det_path(), &SeedSet::single(0), 2).unwrap();
        assert_eq!(p.mean_depth, 1.0);
        assert_eq!(p.influence_by_tau, vec![1.0, 2.0, 3.0]);
        let lone = DiffusionModel::ic(Graph::with_unit_weights(1, vec![]).unwrap());
        let p = depth_profile(&lone, &SeedSet::single(0), 0).unwrap();
        assert_eq!(p.mean_depth, 0.0);
        assert_eq!(p.influence_by_tau, vec![1.0]);
    }

    #[test]
    fn one_step_closed_form_agrees_with_enumeration() {
        let edges = vec![
            Edge::new(0, 2, 0.3),
            Edge::new(1, 2, 0.4),
            Edge::new(0, 3, 0.5),
            Edge::new(1, 3, 0.25),
            Edge::new(2, 3, 0.1),
        ];
        let g = Graph::new(4, edges, vec![1.0, 2.0, 0.5, 3.0]).unwrap();
        for model in [DiffusionModel::ic(g.clone()), DiffusionModel::lt(g.clone()).unwrap()] {
            let DiffusionModel::LiveEdge(le) = &model else { unreachable!() };
            for tau in 0..=1 {
                let closed = one_step_component(le, &[0, 1], tau);
                let en = enumerate_component(le, &[0, 1], tau).unwrap();
                assert!((closed.influence - en.influence).abs() < 1e-12);
                assert!((closed.variance - en.variance).abs() < 1e-12);
                for (a, b) in closed.step_probs.iter().flatten().zip(en.step_probs.iter().flatten()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        // 30 independent two-edge chains hanging off one seed: 3^30 outcomes
        let mut edges = vec![];
        for i in 0..30 {
            let a = 1 + 2 * i;
            edges.push(Edge::new(0, a, 0.5));
            edges.push(Edge::new(a, a + 1, 0.5));
        }
        let model = DiffusionModel::ic(Graph::with_unit_weights(61, edges).unwrap());
        let err = exact_moments(&model, &SeedSet::single(0), 2).unwrap_err();
        assert!(err.is_budget());
        assert!(err.to_string().contains("instance too large for exact enumeration"));
    }

    #[test]
    fn horizon_rounding() {
        assert_eq!(step_horizon(1.0, 0.5), 2);
        assert_eq!(step_horizon(1.1, 0.5), 3);
        assert_eq!(step_horizon(0.0, 0.25), 0);
    }
}

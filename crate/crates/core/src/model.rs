//! Diffusion model families and live-edge simulation sampling.
//!
//! Every supported family is represented by its live-edge form: a list of
//! independent discrete variables, each of which picks one outcome (a set of
//! live edges). IC has one two-outcome variable per edge, b-dependence one per
//! group, and LT one per node choosing at most one incoming edge. Mixtures
//! first pick a component and then sample it.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, SeedSet};
use crate::rng::{self, Domain};

/// Tolerance for LT incoming weight sums and mixture weight sums.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelKind {
    Ic,
    Lt,
    Bdep { b: usize },
    Mixture { components: usize, p_min: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Outcome {
    pub prob: f64,
    pub live: Vec<usize>,
}

/// An independent discrete random choice of live edges.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Variable {
    pub outcomes: Vec<Outcome>,
}

impl Variable {
    fn pick(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, o) in self.outcomes.iter().enumerate() {
            acc += o.prob;
            if u < acc {
                return i;
            }
        }
        // rounding: fall back to the last outcome with positive mass
        self.outcomes.iter().rposition(|o| o.prob > 0.0).unwrap_or(0)
    }

    /// The outcome taken with probability one, if any.
    pub fn certain(&self) -> Option<usize> {
        let mut positive = self.outcomes.iter().enumerate().filter(|(_, o)| o.prob > 0.0);
        match (positive.next(), positive.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

/// The family tag of a single (non-mixture) live-edge model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Ic,
    Lt,
    Bdep { b: usize },
}

/// A non-mixture live-edge model: a graph plus its independent variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LiveEdgeModel {
    family: Family,
    graph: Graph,
    pub(crate) vars: Vec<Variable>,
    /// For each edge: the owning variable and the outcome under which it is live.
    pub(crate) edge_owner: Vec<(usize, usize)>,
}

impl LiveEdgeModel {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_variables(&self) -> usize {
        self.vars.len()
    }

    fn ic(graph: Graph) -> Self {
        let mut vars = Vec::with_capacity(graph.m());
        let mut edge_owner = Vec::with_capacity(graph.m());
        for (id, e) in graph.edges().iter().enumerate() {
            edge_owner.push((vars.len(), 1));
            vars.push(Variable {
                outcomes: vec![
                    Outcome { prob: 1.0 - e.p, live: vec![] },
                    Outcome { prob: e.p, live: vec![id] },
                ],
            });
        }
        LiveEdgeModel { family: Family::Ic, graph, vars, edge_owner }
    }

    fn lt(graph: Graph) -> Result<Self> {
        let mut vars = Vec::new();
        let mut edge_owner = vec![(0, 0); graph.m()];
        for v in 0..graph.n() {
            let incoming = graph.in_edges(v);
            if incoming.is_empty() {
                continue;
            }
            let total: f64 = incoming.iter().map(|&e| graph.edge(e).p).sum();
            if total > 1.0 + SUM_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "LT incoming weights of node {v} sum to {total} > 1"
                )));
            }
            let var = vars.len();
            let mut outcomes = vec![Outcome { prob: (1.0 - total).max(0.0), live: vec![] }];
            for &e in incoming {
                edge_owner[e] = (var, outcomes.len());
                outcomes.push(Outcome { prob: graph.edge(e).p, live: vec![e] });
            }
            vars.push(Variable { outcomes });
        }
        Ok(LiveEdgeModel { family: Family::Lt, graph, vars, edge_owner })
    }

    fn bdep(graph: Graph, b: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidModel("b-dependence requires b >= 1".into()));
        }
        let mut vars = Vec::new();
        let mut edge_owner = vec![(0, 0); graph.m()];
        let mut group_var: BTreeMap<u64, usize> = BTreeMap::new();
        for (id, e) in graph.edges().iter().enumerate() {
            let var = match e.group {
                Some(g) => *group_var.entry(g).or_insert_with(|| {
                    vars.push(Variable {
                        outcomes: vec![
                            Outcome { prob: 1.0 - e.p, live: vec![] },
                            Outcome { prob: e.p, live: vec![] },
                        ],
                    });
                    vars.len() - 1
                }),
                None => {
                    vars.push(Variable {
                        outcomes: vec![
                            Outcome { prob: 1.0 - e.p, live: vec![] },
                            Outcome { prob: e.p, live: vec![] },
                        ],
                    });
                    vars.len() - 1
                }
            };
            vars[var].outcomes[1].live.push(id);
            edge_owner[id] = (var, 1);
        }
        if let Some((g, var)) = group_var.iter().find(|(_, &var)| vars[var].outcomes[1].live.len() > b) {
            return Err(Error::InvalidModel(format!(
                "group {g} has {} edges, more than b = {b}",
                vars[*var].outcomes[1].live.len()
            )));
        }
        Ok(LiveEdgeModel { family: Family::Bdep { b }, graph, vars, edge_owner })
    }

    fn sample_into<R: Rng>(&self, rng: &mut R, live: &mut [u64]) {
        for var in &self.vars {
            let u: f64 = rng.gen();
            for &e in &var.outcomes[var.pick(u)].live {
                live[e / 64] |= 1 << (e % 64);
            }
        }
    }

    /// Probability that at least one edge `tail -> head` is live, per ordered pair.
    fn pair_marginals(&self) -> BTreeMap<(usize, usize), f64> {
        let mut per_var: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
        for (var_id, var) in self.vars.iter().enumerate() {
            for o in &var.outcomes {
                let mut pairs: Vec<(usize, usize)> = o
                    .live
                    .iter()
                    .map(|&e| (self.graph.edge(e).tail, self.graph.edge(e).head))
                    .collect();
                pairs.sort_unstable();
                pairs.dedup();
                for pair in pairs {
                    *per_var.entry(pair).or_default().entry(var_id).or_insert(0.0) += o.prob;
                }
            }
        }
        per_var
            .into_iter()
            .map(|(pair, vars)| {
                let dead: f64 = vars.values().map(|p| 1.0 - p.min(1.0)).product();
                (pair, 1.0 - dead)
            })
            .collect()
    }
}

/// A finite mixture of live-edge models over a common node set.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    components: Vec<(LiveEdgeModel, f64)>,
    p_min: f64,
}

impl Mixture {
    pub fn components(&self) -> &[(LiveEdgeModel, f64)] {
        &self.components
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }
}

/// A stochastic diffusion model in live-edge form.
#[derive(Clone, Debug, PartialEq)]
pub enum DiffusionModel {
    LiveEdge(LiveEdgeModel),
    Mixture(Mixture),
}

/// One i.i.d. draw: the set of live edges of one (component) graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Simulation {
    live: Vec<u64>,
    component: usize,
    master_seed: u64,
    sim_index: u64,
}

impl Simulation {
    /// A simulation with an explicit live-edge list over a graph with `m` edges.
    pub fn from_live_edges(m: usize, live_edges: &[usize], component: usize) -> Result<Self> {
        let mut live = vec![0u64; m.div_ceil(64)];
        for &e in live_edges {
            if e >= m {
                return Err(Error::InvalidParameter(format!("edge {e} out of range for {m} edges")));
            }
            live[e / 64] |= 1 << (e % 64);
        }
        Ok(Simulation { live, component, master_seed: 0, sim_index: 0 })
    }

    #[inline]
    pub fn is_live(&self, edge: usize) -> bool {
        self.live[edge / 64] >> (edge % 64) & 1 == 1
    }

    /// Live edge ids in increasing order.
    pub fn live_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.live.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }

    pub fn live_count(&self) -> usize {
        self.live.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the mixture component that produced this draw (0 otherwise).
    pub fn component(&self) -> usize {
        self.component
    }

    pub fn provenance(&self) -> (u64, u64) {
        (self.master_seed, self.sim_index)
    }
}

/// A model with the nodes of an active set removed, plus the map from new to old ids.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedModel {
    pub model: DiffusionModel,
    pub node_map: Vec<usize>,
}

impl DiffusionModel {
    /// Independent cascade: every edge live independently with its probability.
    pub fn ic(graph: Graph) -> Self {
        DiffusionModel::LiveEdge(LiveEdgeModel::ic(graph))
    }

    /// Linear threshold in live-edge form; edge probabilities are the weights `b_uv`.
    pub fn lt(graph: Graph) -> Result<Self> {
        Ok(DiffusionModel::LiveEdge(LiveEdgeModel::lt(graph)?))
    }

    /// b-dependence: grouped edges are all live or all dead; ungrouped edges are independent.
    pub fn bdep(graph: Graph, b: usize) -> Result<Self> {
        Ok(DiffusionModel::LiveEdge(LiveEdgeModel::bdep(graph, b)?))
    }

    /// Mixture of models; nested mixtures are flattened.
    pub fn mixture(components: Vec<(DiffusionModel, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("mixture needs at least one component".into()));
        }
        if let Some((_, w)) = components.iter().find(|(_, w)| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidModel(format!("mixture weight {w} is not positive")));
        }
        let total: f64 = components.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!("mixture weights sum to {total}, not 1")));
        }
        let mut flat = Vec::new();
        for (model, w) in components {
            match model {
                DiffusionModel::LiveEdge(m) => flat.push((m, w)),
                DiffusionModel::Mixture(inner) => {
                    flat.extend(inner.components.into_iter().map(|(m, iw)| (m, iw * w)));
                }
            }
        }
        let p_min = flat.iter().map(|(_, w)| *w).fold(f64::INFINITY, f64::min);
        let n = flat[0].0.graph.n();
        let weights = flat[0].0.graph.weights().to_vec();
        for (m, _) in &flat[1..] {
            if m.graph.n() != n || m.graph.weights() != weights.as_slice() {
                return Err(Error::InvalidModel(
                    "mixture components must share node count and node weights".into(),
                ));
            }
        }
        Ok(DiffusionModel::Mixture(Mixture { components: flat, p_min }))
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            DiffusionModel::LiveEdge(m) => match m.family {
                Family::Ic => ModelKind::Ic,
                Family::Lt => ModelKind::Lt,
                Family::Bdep { b } => ModelKind::Bdep { b },
            },
            DiffusionModel::Mixture(mx) => {
                ModelKind::Mixture { components: mx.components.len(), p_min: mx.p_min }
            }
        }
    }

    /// The live-edge components with their weights (a single model has weight 1).
    pub fn components(&self) -> Vec<(&LiveEdgeModel, f64)> {
        match self {
            DiffusionModel::LiveEdge(m) => vec![(m, 1.0)],
            DiffusionModel::Mixture(mx) => mx.components.iter().map(|(m, w)| (m, *w)).collect(),
        }
    }

    fn primary(&self) -> &LiveEdgeModel {
        match self {
            DiffusionModel::LiveEdge(m) => m,
            DiffusionModel::Mixture(mx) => &mx.components[0].0,
        }
    }

    pub fn n(&self) -> usize {
        self.primary().graph.n()
    }

    pub fn weights(&self) -> &[f64] {
        self.primary().graph.weights()
    }

    /// The graph of the component that produced `sim`.
    pub fn graph_for(&self, sim: &Simulation) -> &Graph {
        match self {
            DiffusionModel::LiveEdge(m) => &m.graph,
            DiffusionModel::Mixture(mx) => &mx.components[sim.component].0.graph,
        }
    }

    /// Draw simulation `sim_index` of the stream keyed by `master_seed`.
    pub fn sample_simulation(&self, master_seed: u64, sim_index: u64) -> Simulation {
        let mut rng = rng::stream(master_seed, Domain::Simulation, sim_index);
        let (component, model) = match self {
            DiffusionModel::LiveEdge(m) => (0, m),
            DiffusionModel::Mixture(mx) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = mx.components.len() - 1;
                for (i, (_, w)) in mx.components.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                (pick, &mx.components[pick].0)
            }
        };
        let mut live = vec![0u64; model.graph.m().div_ceil(64)];
        model.sample_into(&mut rng, &mut live);
        Simulation { live, component, master_seed, sim_index }
    }

    /// Draw simulations `start..start + count` in parallel.
    pub fn sample_range(&self, master_seed: u64, start: u64, count: usize) -> Vec<Simulation> {
        use rayon::prelude::*;
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample_simulation(master_seed, start + i))
            .collect()
    }

    /// An IC model on the union of all `tail -> head` pairs, each live with its
    /// marginal probability under this model. Dependence is discarded.
    pub fn marginal_ic(&self) -> Result<DiffusionModel> {
        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (m, w) in self.components() {
            for (pair, p) in m.pair_marginals() {
                *pairs.entry(pair).or_insert(0.0) += w * p;
            }
        }
        let edges = pairs
            .into_iter()
            .map(|((t, h), p)| Edge::new(t, h, p.clamp(0.0, 1.0)))
            .collect();
        Ok(DiffusionModel::ic(Graph::new(self.n(), edges, self.weights().to_vec())?))
    }

    /// Condition an IC model on `active` being activated already. The result
    /// lives on the remaining nodes; edges touching `active` are dropped and
    /// all other edge probabilities and node weights are kept.
    pub fn reduce(&self, active: &SeedSet) -> Result<ReducedModel> {
        let graph = match self {
            DiffusionModel::LiveEdge(m) if m.family == Family::Ic => &m.graph,
            _ => return Err(Error::Unsupported("reduction implemented for IC only".into())),
        };
        active.as_slice().iter().try_for_each(|&v| {
            if v >= graph.n() {
                Err(Error::NodeOutOfRange { node: v, n: graph.n() })
            } else {
                Ok(())
            }
        })?;
        let node_map: Vec<usize> = (0..graph.n()).filter(|&v| !active.contains(v)).collect();
        let mut new_id = vec![usize::MAX; graph.n()];
        for (i, &v) in node_map.iter().enumerate() {
            new_id[v] = i;
        }
        let edges = graph
            .edges()
            .iter()
            .filter(|e| new_id[e.tail] != usize::MAX && new_id[e.head] != usize::MAX)
            .map(|e| Edge { tail: new_id[e.tail], head: new_id[e.head], p: e.p, group: e.group })
            .collect();
        let weights = node_map.iter().map(|&v| graph.weight(v)).collect();
        let model = DiffusionModel::ic(Graph::new(node_map.len(), edges, weights)?);
        Ok(ReducedModel { model, node_map })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(p: f64) -> Graph {
        Graph::with_unit_weights(3, vec![Edge::new(0, 1, p), Edge::new(1, 2, p)]).unwrap()
    }

    #[test]
    fn degenerate_ic_probabilities() {
        let all = DiffusionModel::ic(path(1.0));
        let none = DiffusionModel::ic(path(0.0));
        for i in 0..20 {
            assert_eq!(all.sample_simulation(3, i).live_edges().collect::<Vec<_>>(), vec![0, 1]);
            assert_eq!(none.sample_simulation(3, i).live_count(), 0);
        }
    }

    #[test]
    fn sampling_is_a_function_of_seed_and_index() {
        let m = DiffusionModel::ic(path(0.5));
        let seq: Vec<_> = (0..64).map(|i| m.sample_simulation(9, i)).collect();
        let par = m.sample_range(9, 0, 64);
        assert_eq!(seq, par);
        let rev: Vec<_> = (0..64).rev().map(|i| m.sample_simulation(9, i)).collect();
        assert_eq!(seq, rev.into_iter().rev().collect::<Vec<_>>());
        assert_eq!(seq[5].provenance(), (9, 5));
    }

    #[test]
    fn lt_rejects_overweight_nodes() {
        let g = Graph::with_unit_weights(3, vec![Edge::new(0, 2, 0.6), Edge::new(1, 2, 0.5)]).unwrap();
        assert!(DiffusionModel::lt(g).is_err());
        let g = Graph::with_unit_weights(3, vec![Edge::new(0, 2, 0.5), Edge::new(1, 2, 0.5)]).unwrap();
        assert!(DiffusionModel::lt(g).is_ok());
    }

    #[test]
    fn lt_keeps_at_most_one_incoming_edge() {
        let g = Graph::with_unit_weights(
            4,
            vec![Edge::new(0, 3, 0.3), Edge::new(1, 3, 0.3), Edge::new(2, 3, 0.4), Edge::new(0, 1, 0.9)],
        )
        .unwrap();
        let m = DiffusionModel::lt(g.clone()).unwrap();
        let mut counts = [0usize; 3];
        for i in 0..4000 {
            let sim = m.sample_simulation(1, i);
            let into3: Vec<usize> = g.in_edges(3).iter().copied().filter(|&e| sim.is_live(e)).collect();
            assert!(into3.len() <= 1);
            if let Some(&e) = into3.first() {
                counts[e] += 1;
            }
        }
        // each incoming edge is picked near its weight
        for (e, &c) in counts.iter().enumerate() {
            let p = g.edge(e).p;
            let sd = (4000.0 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - 4000.0 * p).abs() < 4.0 * sd, "edge {e}: {c}");
        }
    }

    #[test]
    fn bdep_groups_are_all_or_nothing() {
        let g = Graph::with_unit_weights(
            4,
            vec![
                Edge::grouped(0, 1, 0.5, 1),
                Edge::grouped(0, 2, 0.5, 1),
                Edge::grouped(0, 3, 0.5, 1),
                Edge::new(1, 2, 0.5),
            ],
        )
        .unwrap();
        assert!(DiffusionModel::bdep(g.clone(), 2).is_err());
        let m = DiffusionModel::bdep(g, 3).unwrap();
        for i in 0..200 {
            let s = m.sample_simulation(5, i);
            let states = [s.is_live(0), s.is_live(1), s.is_live(2)];
            assert!(states.iter().all(|&x| x == states[0]));
        }
    }

    #[test]
    fn mixture_validates_weights() {
        let a = DiffusionModel::ic(path(1.0));
        let b = DiffusionModel::ic(path(0.0));
        assert!(DiffusionModel::mixture(vec![(a.clone(), 0.5), (b.clone(), 0.6)]).is_err());
        assert!(DiffusionModel::mixture(vec![(a.clone(), 1.0), (b.clone(), 0.0)]).is_err());
        let mx = DiffusionModel::mixture(vec![(a, 0.25), (b, 0.75)]).unwrap();
        assert_eq!(mx.kind(), ModelKind::Mixture { components: 2, p_min: 0.25 });
    }

    #[test]
    fn marginals_of_a_two_world_mixture() {
        let red = Graph::with_unit_weights(3, vec![Edge::new(0, 1, 1.0)]).unwrap();
        let blue = Graph::with_unit_weights(3, vec![Edge::new(0, 2, 1.0), Edge::new(0, 1, 1.0)]).unwrap();
        let mx = DiffusionModel::mixture(vec![
            (DiffusionModel::ic(red), 0.5),
            (DiffusionModel::ic(blue), 0.5),
        ])
        .unwrap();
        let marginal = mx.marginal_ic().unwrap();
        let DiffusionModel::LiveEdge(m) = &marginal else { panic!() };
        let edges: Vec<(usize, usize, f64)> = m.graph().edges().iter().map(|e| (e.tail, e.head, e.p)).collect();
        assert_eq!(edges, vec![(0, 1, 1.0), (0, 2, 0.5)]);
    }

    #[test]
    fn reduce_triangle_by_source() {
        let g = Graph::with_unit_weights(
            3,
            vec![Edge::new(0, 1, 0.3), Edge::new(0, 2, 0.4), Edge::new(1, 2, 0.7)],
        )
        .unwrap();
        let m = DiffusionModel::ic(g);
        let r = m.reduce(&SeedSet::single(0)).unwrap();
        assert_eq!(r.node_map, vec![1, 2]);
        let DiffusionModel::LiveEdge(inner) = &r.model else { panic!() };
        assert_eq!(inner.graph().edges(), &[Edge::new(0, 1, 0.7)]);

        assert_eq!(m.reduce(&SeedSet::empty()).unwrap().model, m);
        let all = m.reduce(&SeedSet::new(0..3, 3).unwrap()).unwrap();
        assert_eq!(all.model.n(), 0);

        let lt = DiffusionModel::lt(path(0.5)).unwrap();
        assert!(matches!(lt.reduce(&SeedSet::single(0)), Err(Error::Unsupported(_))));
    }
}

//! Step-limited reachability over the live edges of a simulation.

use crate::error::Result;
use crate::graph::{Graph, SeedSet};
use crate::model::Simulation;

/// Reusable BFS buffers. Marks are epoch-stamped so a query never clears
/// the whole array.
#[derive(Clone, Debug, Default)]
pub struct ReachScratch {
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<(usize, u32)>,
    sorted: Vec<usize>,
}

impl ReachScratch {
    pub fn new(n: usize) -> Self {
        ReachScratch { mark: vec![0; n], epoch: 0, queue: Vec::with_capacity(n), sorted: Vec::new() }
    }

    fn begin(&mut self, n: usize) {
        if self.mark.len() < n {
            self.mark.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.queue.clear();
    }

    #[inline]
    fn visit(&mut self, v: usize) -> bool {
        if self.mark[v] == self.epoch {
            false
        } else {
            self.mark[v] = self.epoch;
            true
        }
    }

    /// Forward BFS from `seeds` over live edges, calling `f(node, depth)` once
    /// per node reached within `tau` steps (seeds at depth 0). Seeds are
    /// assumed validated.
    pub fn forward<F: FnMut(usize, u32)>(
        &mut self,
        graph: &Graph,
        sim: &Simulation,
        seeds: &[usize],
        tau: u32,
        mut f: F,
    ) {
        self.begin(graph.n());
        for &s in seeds {
            if self.visit(s) {
                self.queue.push((s, 0));
                f(s, 0);
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let (u, d) = self.queue[head];
            head += 1;
            if d >= tau {
                continue;
            }
            for &e in graph.out_edges(u) {
                if !sim.is_live(e) {
                    continue;
                }
                let v = graph.edge(e).head;
                if self.visit(v) {
                    self.queue.push((v, d + 1));
                    f(v, d + 1);
                }
            }
        }
    }

    /// Reverse BFS from `target`: nodes that reach `target` within `tau` steps.
    /// `live(edge)` decides edge state and is called at most once per edge.
    pub fn reverse<L: FnMut(usize) -> bool, F: FnMut(usize, u32)>(
        &mut self,
        graph: &Graph,
        target: usize,
        tau: u32,
        mut live: L,
        mut f: F,
    ) {
        self.begin(graph.n());
        self.visit(target);
        self.queue.push((target, 0));
        f(target, 0);
        let mut head = 0;
        while head < self.queue.len() {
            let (u, d) = self.queue[head];
            head += 1;
            if d >= tau {
                continue;
            }
            for &e in graph.in_edges(u) {
                let t = graph.edge(e).tail;
                if self.mark[t] == self.epoch {
                    continue;
                }
                if live(e) && self.visit(t) {
                    self.queue.push((t, d + 1));
                    f(t, d + 1);
                }
            }
        }
    }
}

/// Nodes reachable from `seeds` through live edges in at most `tau` steps,
/// sorted by id. Always contains the seeds.
pub fn reach_set(graph: &Graph, sim: &Simulation, seeds: &SeedSet, tau: u32) -> Result<Vec<usize>> {
    seeds.check(graph.n())?;
    let mut scratch = ReachScratch::new(graph.n());
    let mut out = Vec::new();
    scratch.forward(graph, sim, seeds.as_slice(), tau, |v, _| out.push(v));
    out.sort_unstable();
    Ok(out)
}

/// Total node weight of [`reach_set`].
pub fn reach_value(graph: &Graph, sim: &Simulation, seeds: &SeedSet, tau: u32) -> Result<f64> {
    seeds.check(graph.n())?;
    let mut scratch = ReachScratch::new(graph.n());
    Ok(reach_value_with(graph, sim, seeds.as_slice(), tau, &mut scratch))
}

/// [`reach_value`] with caller-owned scratch and unchecked seeds.
///
/// Weights are added in increasing node order, so the value does not depend
/// on the order the search visits nodes.
pub fn reach_value_with(
    graph: &Graph,
    sim: &Simulation,
    seeds: &[usize],
    tau: u32,
    scratch: &mut ReachScratch,
) -> f64 {
    if graph.has_unit_weights() {
        let mut count = 0usize;
        scratch.forward(graph, sim, seeds, tau, |_, _| count += 1);
        return count as f64;
    }
    scratch.forward(graph, sim, seeds, tau, |_, _| {});
    let mut sorted = std::mem::take(&mut scratch.sorted);
    sorted.clear();
    sorted.extend(scratch.queue.iter().map(|&(v, _)| v));
    sorted.sort_unstable();
    let total = sorted.iter().map(|&v| graph.weight(v)).sum();
    scratch.sorted = sorted;
    total
}

//! Sample live-edge simulations of an IC model and inspect step-limited reach.

use im_oracle::reach::reach_set;
use im_oracle::{DiffusionModel, Edge, Graph, Result, SeedSet};

pub fn run_example() -> Result<String> {
    let graph = Graph::with_unit_weights(
        6,
        vec![
            Edge::new(0, 1, 0.8),
            Edge::new(1, 2, 0.5),
            Edge::new(2, 3, 0.5),
            Edge::new(0, 4, 0.3),
            Edge::new(4, 5, 0.9),
        ],
    )?;
    let model = DiffusionModel::ic(graph);
    let seeds = SeedSet::parse("0", model.n())?;
    let mut out = String::new();
    // simulation i is a pure function of (master seed, i)
    for sim in model.sample_range(42, 0, 5) {
        let graph = model.graph_for(&sim);
        let one = reach_set(graph, &sim, &seeds, 1)?;
        let all = reach_set(graph, &sim, &seeds, 5)?;
        out.push_str(&format!(
            "sim {}: {} live edges, 1-step reach {:?}, full reach {:?}\n",
            sim.provenance().1,
            sim.live_count(),
            one,
            all
        ));
    }
    assert_eq!(model.sample_simulation(42, 3), model.sample_range(42, 3, 1)[0]);
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

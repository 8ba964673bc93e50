//! Seed selection: exact brute force, greedy on an oracle, and the end-to-end
//! median-of-averages maximizer.

use im_oracle::estimators::build_oracle;
use im_oracle::exact::{c_value, exact_influence};
use im_oracle::families::gen_random_ic;
use im_oracle::maximize::{brute_force_max, greedy_explicit, im_oracle_config, maximize_im, ExactOracle};
use im_oracle::Result;

pub fn run_example() -> Result<String> {
    let (s, tau, eps, delta) = (2, 2, 0.25, 0.1);
    let model = gen_random_ic(12, 20, (0.1, 0.6), (1.0, 1.0), 5)?;
    let best = brute_force_max(&ExactOracle { model: &model, tau }, s)?;
    let mut out = format!("exact optimum {:?} with I = {:.4}\n", best.seeds.as_slice(), best.oracle_value);

    let found = maximize_im(&model, s, tau, eps, delta, 1)?;
    out.push_str(&format!(
        "median-of-averages brute force: {:?}, oracle {:.4}, exact {:.4}, {} simulations\n",
        found.seeds.as_slice(),
        found.oracle_value,
        exact_influence(&model, &found.seeds, tau)?,
        found.simulations_used
    ));

    let cfg = im_oracle_config(model.n(), s, eps, delta, c_value(&model, tau)?, tau)?.with_seed(2);
    let greedy = greedy_explicit(&build_oracle(&model, cfg)?, s)?;
    for step in &greedy.trace {
        out.push_str(&format!("greedy adds {} (gain {:.4})\n", step.node, step.gain));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

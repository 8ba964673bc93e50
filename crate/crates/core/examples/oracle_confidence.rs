//! Averaging vs median-of-averages oracles: sizing and observed accuracy.

use im_oracle::estimators::{build_oracle, check_eps_approx, size_for_guarantee, wilson_upper, OracleMode};
use im_oracle::exact::{c_value, exact_influence, opt1};
use im_oracle::families::{gen_tree, root_seed};
use im_oracle::rng::derive_seed;
use im_oracle::Result;

pub fn run_example() -> Result<String> {
    let (eps, delta, tau) = (0.5, 0.1, 3);
    let model = gen_tree(3)?;
    let truth = exact_influence(&model, &root_seed(), tau)?;
    let best = opt1(&model, tau)?;
    let c = c_value(&model, tau)?;
    let mut out = String::new();
    for mode in [OracleMode::Averaging, OracleMode::MedianOfAverages] {
        let cfg = size_for_guarantee(eps, delta, c, mode)?.with_tau(tau);
        let trials = 200;
        let mut failures = 0;
        for t in 0..trials {
            let oracle = build_oracle(&model, cfg.with_seed(derive_seed(7, t)))?;
            failures += !check_eps_approx(oracle.query(&root_seed())?, truth, best, eps) as usize;
        }
        out.push_str(&format!(
            "{mode:?}: {} pools x {} simulations, {failures}/{trials} misses, 99% upper bound {:.3}\n",
            cfg.pools,
            cfg.pool_size,
            wilson_upper(failures, trials as usize, 0.99)
        ));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

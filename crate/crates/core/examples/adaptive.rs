//! Doubling sample sizes with independent validation, against the worst-case budget.

use im_oracle::families::gen_star;
use im_oracle::maximize::{adaptive_maximize, worst_case_budget, BaseAlgorithm};
use im_oracle::Result;

pub fn run_example() -> Result<String> {
    let (s, tau, eps, delta) = (1, 1, 0.1, 0.1);
    let star = gen_star(200, false)?;
    let r = adaptive_maximize(&star, s, tau, eps, delta, BaseAlgorithm::Brute, 4)?;
    let mut out = String::new();
    for round in &r.rounds {
        out.push_str(&format!(
            "round {}: {} simulations, candidate {:?} at {:.2}, validated {:?}, accepted {}\n",
            round.round,
            round.optimization_simulations,
            round.candidate.as_slice(),
            round.oracle_value,
            round.validated_value,
            round.accepted
        ));
    }
    out.push_str(&format!(
        "worst-case budget {} simulations, used {} for optimization and {} for validation\n",
        worst_case_budget(&star, s, tau, eps, delta)?,
        r.optimization_simulations(),
        r.validation_simulations()
    ));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

//! Exact influence and variance by enumeration: the binary-tree lower-bound
//! family, the dependent vs independent star, and the variance-bound audit.

use im_oracle::exact::{audit_variance_bound, c_value, exact_moments, exact_report};
use im_oracle::families::{gen_star, gen_tree, root_seed, tree_influence_formula, tree_variance_formula};
use im_oracle::Result;

pub fn run_example() -> Result<String> {
    let mut out = String::new();
    for t in 2..=5 {
        // t node levels including the root
        let m = exact_moments(&gen_tree(t - 1)?, &root_seed(), t - 1)?;
        out.push_str(&format!(
            "tree with {t} levels: I = {} (formula {}), Var = {} (formula {})\n",
            m.influence,
            tree_influence_formula(t),
            m.variance,
            tree_variance_formula(t)
        ));
    }
    for dependent in [false, true] {
        let star = gen_star(200, dependent)?;
        let r = exact_report(&star, &root_seed(), 1)?;
        let audit = audit_variance_bound(&star, &root_seed(), 1, c_value(&star, 1)?)?;
        out.push_str(&format!(
            "star, dependent = {dependent}: I = {}, Var = {}, bound {} holds: {}\n",
            r.influence, r.variance, audit.rhs, audit.holds
        ));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

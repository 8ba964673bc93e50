//! How many steps capture most of the unrestricted influence: the mean
//! activation depth divided by eps.

use im_oracle::exact::{depth_profile, step_horizon};
use im_oracle::families::gen_random_ic;
use im_oracle::{Result, SeedSet};

pub fn run_example() -> Result<String> {
    let model = gen_random_ic(9, 16, (0.3, 0.9), (1.0, 1.0), 21)?;
    let full = (model.n() - 1) as u32;
    let profile = depth_profile(&model, &SeedSet::single(0), full)?;
    let total = profile.influence_by_tau[full as usize];
    let mut out = format!("mean depth {:.3}, unrestricted influence {total:.4}\n", profile.mean_depth);
    for eps in [0.5, 0.25, 0.1] {
        let t = step_horizon(profile.mean_depth, eps).min(full);
        out.push_str(&format!(
            "eps = {eps}: {t} steps capture {:.4} ({:.1}%)\n",
            profile.influence_by_tau[t as usize],
            100.0 * profile.influence_by_tau[t as usize] / total
        ));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

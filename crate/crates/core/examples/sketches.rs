//! Combined reachability sketches: exact below k pairs, estimated above.

use im_oracle::estimators::{build_oracle, OracleConfig};
use im_oracle::families::gen_random_ic;
use im_oracle::sketches::{build_sketches, SketchedOracle};
use im_oracle::{Result, SeedSet};

pub fn run_example() -> Result<String> {
    let model = gen_random_ic(30, 80, (0.05, 0.4), (1.0, 1.0), 11)?;
    let oracle = build_oracle(&model, OracleConfig::new(5, 200, 3, 1)?)?;
    let seeds = SeedSet::new([0, 7, 19], model.n())?;
    let mut out = format!("averaging oracle: {:.4}\n", oracle.query(&seeds)?);
    for k in [16, 64, 256] {
        let sketched = SketchedOracle::from_oracle(&oracle, k, 3)?;
        out.push_str(&format!("sketches with k = {k}: {:.4}\n", sketched.query(&seeds)?));
    }
    // with k above the number of reachable pairs the sketch is a lossless index
    let pool = oracle.pool(0);
    let lossless = build_sketches(&model, pool, 3, 30 * pool.len() + 1, 5)?;
    out.push_str(&format!("lossless first pool: {}\n", lossless.query(&seeds)?));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

//! Write and read model files and edge lists.

use im_oracle::families::{gen_random_bdep, gen_two_world_mixture};
use im_oracle::io::{load_model, save_model};
use im_oracle::Result;

pub fn run_example() -> Result<String> {
    let dir = std::env::temp_dir().join(format!("im-oracle-model-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut out = String::new();
    for (name, model) in [("bdep", gen_random_bdep(6, 10, 3, (0.2, 0.8), 1)?), ("mixture", gen_two_world_mixture()?)] {
        let path = dir.join(format!("{name}.model"));
        let files = save_model(&model, &path)?;
        assert_eq!(load_model(&path)?, model);
        out.push_str(&format!("{name}: {} files\n", files.len()));
        out.push_str(&std::fs::read_to_string(&path)?);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

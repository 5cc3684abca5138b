//! Regenerate the bundled repository artifacts from their in-crate
//! definitions: the four catalog environment files under `envs/` and
//! the reference workload table under `scenarios/`.
//!
//! Run from anywhere in the workspace:
//! `cargo run -p neuroclear --example regen_artifacts`

use neuroclear::cspace::catalog;
use neuroclear::cspace::save_environment;
use neuroclear::tradeoff::{reference_scenarios, write_scenarios};
use std::path::PathBuf;

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root");
    let envs = root.join("envs");
    let scenarios = root.join("scenarios");
    std::fs::create_dir_all(&envs).expect("create envs/");
    std::fs::create_dir_all(&scenarios).expect("create scenarios/");

    for name in catalog::names() {
        let env = catalog::by_name(name).expect("catalog entry");
        let path = envs.join(format!("{name}.json"));
        save_environment(&path, &env).expect("write environment");
        println!("wrote {}", path.display());
    }

    let path = scenarios.join("reference.csv");
    write_scenarios(&path, &reference_scenarios()).expect("write scenarios");
    println!("wrote {}", path.display());
}

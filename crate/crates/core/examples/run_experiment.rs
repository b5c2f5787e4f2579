//! Runs an experiment config and prints the stage verdicts.
//!
//! cargo run --release --example run_experiment -- configs/interval_cylinder.json

use cancov::experiment::{run_experiment, ExperimentConfig};
use cancov::io::read_json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config: ExperimentConfig = match std::env::args().nth(1) {
        Some(path) => read_json(path.as_ref())?,
        None => ExperimentConfig::for_tag("finite_cylinder").expect("known tag"),
    };
    let report = run_experiment(&config)?;
    for s in &report.stages {
        println!("{:<20} {:?}", s.name, s.verdict);
    }
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(())
}

//! Runs the exhaustive and randomized property suite.
//!
//! cargo run --release --example property_suite -- [seed]

use cancov::suite::{verify_suite, SuiteSizes};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let summary = verify_suite(seed, &SuiteSizes::default());
    for c in &summary.checks {
        println!("{:<28} {:>8} instances  {:>3} failures", c.name, c.instances, c.failures);
    }
    println!("all pass: {}", summary.all_pass());
}

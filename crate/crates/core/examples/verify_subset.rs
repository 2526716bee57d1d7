//! Runs a subset of the acceptance criteria programmatically.
//!
//! `cargo run --release --example verify_subset -- 2 5 7`

use fblab::verify::{run_suite, VerifyOptions};

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let opts = VerifyOptions {
        criteria: Some(if ids.is_empty() { vec![2, 5, 7, 9] } else { ids }),
        ..VerifyOptions::default()
    };
    let results = run_suite(&opts);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} pass", results.len() - failed, results.len());
}

//! Runs the twelve acceptance criteria and prints one verdict line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are expected to fail; the target fails if any
//! other criterion fails, or if a known one unexpectedly passes.

use fblab::verify::{run_suite, VerifyOptions, KNOWN_UNATTAINABLE};

fn main() {
    // `cargo test -- --list` and filters: behave like a one-test harness
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    if let Some(filter) = args.iter().find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return;
        }
    }
    let results = run_suite(&VerifyOptions::default());
    let mut unexpected = Vec::new();
    for r in &results {
        println!("{r}");
        let known = KNOWN_UNATTAINABLE.contains(&r.id);
        if r.passed == known {
            unexpected.push(r.id);
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("acceptance: {passed}/{} criteria pass; expected failures: {KNOWN_UNATTAINABLE:?}", results.len());
    if !unexpected.is_empty() {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

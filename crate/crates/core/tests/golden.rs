mod common;

use std::time::{Duration, Instant};

#[test]
fn reference_fragments_reproduce() {
    let start = Instant::now();
    let results = common::golden::all();
    let elapsed = start.elapsed();
    let failures: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

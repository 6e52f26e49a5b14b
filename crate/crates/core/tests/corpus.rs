use falsilab::shell::corpus;
use falsilab::Limits;

#[test]
fn every_corpus_expectation_reproduces() {
    let limits = Limits::default();
    let mut failures = Vec::new();
    for entry in corpus() {
        for o in entry.verify(&limits) {
            if !o.ok {
                failures.push(format!("{} :: {}: expected {}, got {}", o.entry, o.what, o.expected, o.actual));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn corpus_runs_are_repeatable() {
    let limits = Limits::default();
    let entry = corpus().into_iter().find(|e| e.name == "coin-chain").unwrap();
    let first: Vec<String> = entry.verify(&limits).into_iter().map(|o| o.actual).collect();
    let second: Vec<String> = entry.verify(&limits).into_iter().map(|o| o.actual).collect();
    assert_eq!(first, second);
}

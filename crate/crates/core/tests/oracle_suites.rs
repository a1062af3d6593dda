use rigidspec_core::suites::{run_suites, SuiteConfig};

#[test]
fn every_suite_passes_with_default_seed() {
    let outcomes = run_suites(&SuiteConfig::default(), &[]).unwrap();
    let mut failed = Vec::new();
    for o in &outcomes {
        println!("{:<24} {:>5} checks  {}", o.id, o.checks, if o.passed() { "pass" } else { "FAIL" });
        for f in o.failures.iter().take(5) {
            println!("    {f}");
        }
        if !o.passed() {
            failed.push(o.id);
        }
    }
    assert!(failed.is_empty(), "failing suites: {failed:?}");
}

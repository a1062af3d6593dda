use rigidspec_core::suites::{run_suites, SuiteConfig};

use crate::args::VerifyArgs;
use crate::{status, Failure};

pub fn run(a: &VerifyArgs) -> Result<u8, Failure> {
    let config = SuiteConfig {
        seed: a.seed,
        fuzz: a.fuzz,
    };
    let outcomes = run_suites(&config, &a.only).map_err(Failure::config)?;
    println!("seed {}", a.seed);
    for o in &outcomes {
        println!(
            "{:<24} {:>6} checks  {}",
            o.id,
            o.checks,
            if o.passed() { "pass" } else { "FAIL" }
        );
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
        if o.failures.len() > 10 {
            println!("    ... {} more", o.failures.len() - 10);
        }
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id).collect();
    println!("{}/{} suites passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() {
        Ok(status::OK)
    } else {
        println!("failing: {}", failed.join(", "));
        Ok(status::VERIFICATION_FAILED)
    }
}

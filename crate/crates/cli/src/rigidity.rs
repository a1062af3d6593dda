use rigidspec_core::rigidity_verifier::{self as rv, RigidityReport};
use rigidspec_core::theorem_family;

use crate::args::RigidityArgs;
use crate::output;
use crate::{status, Failure};

/// Each deficit is below the previous one, except that zeros may repeat.
pub fn decreasing(reports: &[RigidityReport]) -> bool {
    reports
        .windows(2)
        .all(|w| w[1].deficit < w[0].deficit || (w[0].deficit == 0.0 && w[1].deficit == 0.0))
}

pub fn run(a: &RigidityArgs) -> Result<u8, Failure> {
    if a.ell_max < 2 {
        return Err(Failure::config("--ell-max must be at least 2"));
    }
    if let Some(g) = a.goal.filter(|g| !(*g > 0.0)) {
        return Err(Failure::config(format!("--goal must be positive, got {g}")));
    }
    let family = theorem_family(a.r, a.k_max)?;
    let y = rv::default_test_vector(&family)?;
    let reports = (2..=a.ell_max)
        .map(|ell| rv::rigidity_deficit(&family, &y, ell))
        .collect::<Result<Vec<_>, _>>()?;
    output::ensure_dir(&a.out_dir)?;
    output::write_jsonl(&a.out_dir.join("rigidity.jsonl"), &reports)?;

    println!("test vector: y_k = e_1 / k (a single vector; rigidity needs every vector)");
    println!("{:>4} {:>14} {:>14} {:>10}", "ell", "deficit", "bound^(1/2)", "");
    for rep in &reports {
        println!(
            "{:>4} {:>14.6e} {:>14.6e} {:>10}",
            rep.ell,
            rep.deficit,
            rep.analytic_bound.sqrt(),
            if rep.saturated { "saturated" } else { "" }
        );
    }
    if let Some(bad) = reports.iter().find(|r| !r.bound_holds()) {
        return Err(Failure::internal(format!(
            "deficit^2 = {:e} exceeds the analytic bound {:e} at ell = {}",
            bad.deficit * bad.deficit,
            bad.analytic_bound,
            bad.ell
        )));
    }
    let last = reports.last().expect("ell_max >= 2").deficit;
    let goal = a.goal.unwrap_or(reports[0].deficit / 2.0);
    if !decreasing(&reports) {
        println!("FAIL: deficits are not decreasing");
        return Ok(status::VERIFICATION_FAILED);
    }
    if !(last < goal) {
        println!("FAIL: final deficit {last:.6e} is not below the goal {goal:.6e}");
        return Ok(status::VERIFICATION_FAILED);
    }
    println!("ok: deficits decrease to {last:.6e} < {goal:.6e}");
    Ok(status::OK)
}

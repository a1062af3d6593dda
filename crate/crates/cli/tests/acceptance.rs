//! Acceptance gate: nine criteria, one pass/fail line each.
//!
//! Runs without the libtest harness so the summary is always printed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rigidspec_core::rigidity_verifier::{self as rv, shift_block};
use rigidspec_core::spectrum_analyzer::{self as sa, AnnulusEstimate, Thresholds, VerdictKind};
use rigidspec_core::suites::{run_suite, SuiteConfig};
use rigidspec_core::{theorem_family, Complex64};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn suites(ids: &[&str], fuzz: usize) -> (bool, String) {
    let config = SuiteConfig {
        seed: 0,
        fuzz: Some(fuzz),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ids {
        let o = run_suite(id, &config).expect("known suite");
        ok &= o.passed();
        parts.push(format!("{id} {}/{}", o.checks - o.failures.len().min(o.checks), o.checks));
        for f in o.failures.iter().take(3) {
            parts.push(format!("[{f}]"));
        }
    }
    (ok, parts.join(", "))
}

fn within(limit: Duration, started: Instant) -> (bool, String) {
    let t = started.elapsed();
    (t < limit, format!("{:.2}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

const RADII: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

fn scans() -> Vec<(f64, AnnulusEstimate)> {
    let grid = sa::radial_grid(0.05, 1.5, 0.05).unwrap();
    RADII
        .iter()
        .map(|&r| {
            let f = theorem_family(r, 30).unwrap();
            (r, sa::annulus_scan(&f, &grid, 4, &Thresholds::default()).unwrap())
        })
        .collect()
}

fn formula_vs_oracle() -> Outcome {
    let t = Instant::now();
    let (ok, detail) = suites(&["shift-identities"], 200);
    let (fast, time) = within(Duration::from_secs(60), t);
    outcome(ok && fast, format!("{detail}; {time}"))
}

fn block_operator_suite() -> Outcome {
    let t = Instant::now();
    let (ok, detail) = suites(&["block-norm", "block-inverse", "spectrum-criterion"], 50);
    let (fast, time) = within(Duration::from_secs(30), t);
    outcome(ok && fast, format!("{detail}; {time}"))
}

fn annulus_reproduction(scans: &[(f64, AnnulusEstimate)], elapsed: Duration) -> Outcome {
    let mut ok = elapsed < Duration::from_secs(120);
    let mut parts = Vec::new();
    for (r, e) in scans {
        let good = (e.r_inner - r).abs() <= 0.05 && (e.r_outer - 1.0).abs() <= 0.05;
        ok &= good;
        parts.push(format!("r={r}: [{:.3}, {:.3}]", e.r_inner, e.r_outer));
    }
    let zero = sa::classify(&theorem_family(0.0, 30).unwrap(), Complex64::new(0.0, 0.0), &Thresholds::default());
    ok &= zero.kind == VerdictKind::InSpectrum;
    parts.push(format!("r=0 at 0: {}", zero.kind.as_str()));
    let half = &scans.iter().find(|(r, _)| *r == 0.5).unwrap().1;
    match sa::inverse_spectrum_annulus(half) {
        Ok((a, b)) => {
            // r_inner within 0.05 of 1/2 puts 1/r_inner within 0.23 of 2
            ok &= (a - 1.0).abs() <= 0.06 && (b - 2.0).abs() <= 0.23 && b > 1.0;
            parts.push(format!("inverse annulus [{a:.3}, {b:.3}]"));
        }
        Err(e) => {
            ok = false;
            parts.push(format!("inverse annulus: {e}"));
        }
    }
    parts.push(format!("{:.2}s of 120s", elapsed.as_secs_f64()));
    outcome(ok, parts.join(", "))
}

fn unit_circle_case() -> Outcome {
    let t = Instant::now();
    let f = sa::diagonal_roots_family(500);
    let th = Thresholds::default();
    let angles = sa::sample_angles(16);
    let mut ok = true;
    for rho in [0.5, 0.9] {
        ok &= angles
            .iter()
            .all(|&a| sa::classify(&f, Complex64::from_polar(rho, a), &th).kind == VerdictKind::Resolvent);
    }
    let roots = sa::unit_roots_enumeration(500);
    let roots_ok = roots
        .iter()
        .all(|&z| sa::classify(&f, z, &th).kind == VerdictKind::PointSpectrum);
    // every point of the circle is close to an eigenvalue and never resolvent
    let gap = angles
        .iter()
        .map(|&a| {
            let z = Complex64::from_polar(1.0, a);
            roots.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let circle_ok = angles
        .iter()
        .all(|&a| sa::classify(&f, Complex64::from_polar(1.0, a), &th).kind != VerdictKind::Resolvent);
    let grid = sa::radial_grid(0.05, 1.5, 0.05).unwrap();
    let e = sa::annulus_scan(&f, &grid, 4, &th).unwrap();
    let (fast, time) = within(Duration::from_secs(10), t);
    ok &= roots_ok && circle_ok && gap < 0.05 && e.r_inner >= 0.95 && fast;
    outcome(
        ok,
        format!(
            "rho 0.5, 0.9 resolvent; 500 roots point spectrum: {roots_ok}; circle gap {gap:.4}; r_inner {:.3}; {time}",
            e.r_inner
        ),
    )
}

fn rigidity_suite() -> Outcome {
    let t = Instant::now();
    let f = theorem_family(0.5, 7).unwrap();
    let y = rv::default_test_vector(&f).unwrap();
    let reports: Vec<_> = (2..=6).map(|ell| rv::rigidity_deficit(&f, &y, ell).unwrap()).collect();
    let mut ok = reports.windows(2).all(|w| w[1].deficit < w[0].deficit);
    ok &= reports.iter().all(|r| r.bound_holds());
    ok &= reports[4].deficit < reports[0].deficit / 2.0;
    // oracle: v^m e_1 = beta_1...beta_m e_{m+1}, so each block contributes
    // (P_m^2 + 1) / k^2 unless n(k) divides m
    for rep in &reports {
        let fact = rv::factorial(rep.ell);
        let mut sq = 0.0;
        for k in 2..=7 {
            let b = shift_block(&f, k).unwrap();
            let m = fact % b.n();
            if m != 0 {
                let prod: f64 = (1..=m).map(|j| b.beta(j)).product();
                sq += (prod * prod + 1.0) / (k * k) as f64;
            }
        }
        ok &= (rep.deficit - sq.sqrt()).abs() <= 1e-10 * sq.sqrt().max(1.0);
    }
    let (fast, time) = within(Duration::from_secs(60), t);
    let list: Vec<String> = reports.iter().map(|r| format!("{:.4}", r.deficit)).collect();
    outcome(ok && fast, format!("deficits l=2..6 [{}]; {time}", list.join(", ")))
}

fn cmp_suite() -> Outcome {
    let t = Instant::now();
    let (ok, detail) = suites(&["finite-dim-rigidity"], 100);
    let (fast, time) = within(Duration::from_secs(60), t);
    outcome(ok && fast, format!("{detail}; {time}"))
}

fn annex_suites() -> Outcome {
    let t = Instant::now();
    let (ok, detail) = suites(&["uniform-rigidity-box", "spectral-radius-bound"], 500);
    let (fast, time) = within(Duration::from_secs(60), t);
    outcome(ok && fast, format!("{detail}; {time}"))
}

fn circle_contact(scans: &[(f64, AnnulusEstimate)]) -> Outcome {
    let flags: Vec<String> = scans
        .iter()
        .map(|(r, e)| format!("r={r}: {}", sa::unit_circle_contact(e)))
        .collect();
    outcome(scans.iter().all(|(_, e)| sa::unit_circle_contact(e)), flags.join(", "))
}

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rigidspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn same_files(a: &Path, b: &Path, names: &[&str]) -> bool {
    names
        .iter()
        .all(|n| std::fs::read(a.join(n)).ok().is_some_and(|x| Some(x) == std::fs::read(b.join(n)).ok()))
}

fn determinism() -> Outcome {
    let v1 = run_bin(&["verify", "--seed", "42"]);
    let v2 = run_bin(&["verify", "--seed", "42"]);
    let verify_ok = v1.status.success() && v1.stdout == v2.stdout && v1.status == v2.status;
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("a"), dir.path().join("b"));
    let mut spectrum_ok = true;
    for d in [&d1, &d2] {
        let o = run_bin(&["spectrum", "--r", "0.5", "--k-max", "30", "--out-dir", d.to_str().unwrap()]);
        spectrum_ok &= o.status.success();
    }
    spectrum_ok &= same_files(&d1, &d2, &["annulus.json", "profile.csv"]);
    outcome(
        verify_ok && spectrum_ok,
        format!("verify --seed 42 identical: {verify_ok}; spectrum files identical: {spectrum_ok}"),
    )
}

fn main() {
    let started = Instant::now();
    let scans = scans();
    let scan_time = started.elapsed();
    let results = [
        ("formula vs dense oracle", formula_vs_oracle()),
        ("block-diagonal operator", block_operator_suite()),
        ("annulus reproduction", annulus_reproduction(&scans, scan_time)),
        ("roots-of-unity diagonal", unit_circle_case()),
        ("factorial rigidity", rigidity_suite()),
        ("finite-dimensional rigidity", cmp_suite()),
        ("uniform box and radius bound", annex_suites()),
        ("unit-circle contact", circle_contact(&scans)),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {}: {:<30} {}  ({})",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

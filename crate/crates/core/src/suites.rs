//! Property suites checked against independent oracles.
//!
//! Each suite draws its random inputs from [`fuzz::trial_rng`], so a seed
//! fixes every input and the report does not depend on thread scheduling.

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::block_operator::{self, BlockFamily, BlockVector};
use crate::error::Result;
use crate::fuzz::{self, trial_rng};
use crate::numerics::{self, ComplexMatrix};
use crate::rigidity_verifier::{self as rv, theorem_family};
use crate::spectrum_analyzer::{self as sa, Thresholds, VerdictKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Trial count for every fuzzed suite; `None` keeps each suite's default.
    pub fuzz: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type SuiteFn = fn(&SuiteConfig, u32) -> (usize, Vec<String>);

pub struct Suite {
    pub id: &'static str,
    pub title: &'static str,
    run: SuiteFn,
}

pub const SUITES: &[Suite] = &[
    Suite { id: "shift-identities", title: "weighted shift: power norms, psi identity, roots of unity", run: shift_identities },
    Suite { id: "weight-window", title: "weight windows never exceed prefix products", run: weight_window },
    Suite { id: "s-sum-bracket", title: "S-sum identities and explicit bracket", run: s_sum_bracket },
    Suite { id: "block-norm", title: "block-diagonal norm is the largest block norm", run: block_norm },
    Suite { id: "block-inverse", title: "block-diagonal inverse norm is the largest block inverse norm", run: block_inverse },
    Suite { id: "spectrum-criterion", title: "per-block resolvent norms match direct inversion", run: spectrum_criterion },
    Suite { id: "outside-disk", title: "points outside the closed unit disk are resolvent", run: outside_disk },
    Suite { id: "unbounded-lower", title: "r < |lambda| < 1 lies in the spectrum", run: unbounded_lower },
    Suite { id: "bounded-upper", title: "0 < |lambda| < r is resolvent", run: bounded_upper },
    Suite { id: "point-spectrum", title: "roots of unity of every block are eigenvalues", run: point_spectrum },
    Suite { id: "unit-circle-contact", title: "scanned annuli reach the unit circle", run: unit_circle_contact },
    Suite { id: "factorial-rigidity", title: "u^{l!} y -> y with the proof-chain bound", run: factorial_rigidity },
    Suite { id: "finite-dim-rigidity", title: "rigid iff diagonalizable with unimodular spectrum", run: finite_dim_rigidity },
    Suite { id: "uniform-rigidity-box", title: "||u^n - I|| <= 1/2 confines eigenvalue moduli", run: uniform_rigidity_box },
    Suite { id: "spectral-radius-bound", title: "spectral radius below M^{1/n_k}", run: spectral_radius_bound },
];

pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.id).collect()
}

/// Run the named suites (all when `only` is empty), in table order.
pub fn run_suites(config: &SuiteConfig, only: &[String]) -> std::result::Result<Vec<SuiteOutcome>, String> {
    if let Some(bad) = only.iter().find(|id| !SUITES.iter().any(|s| s.id == id.as_str())) {
        return Err(format!("unknown suite '{bad}'; known: {}", suite_ids().join(", ")));
    }
    Ok(SUITES
        .par_iter()
        .enumerate()
        .filter(|(_, s)| only.is_empty() || only.iter().any(|o| o == s.id))
        .map(|(i, s)| {
            let (checks, failures) = (s.run)(config, i as u32);
            SuiteOutcome {
                id: s.id,
                title: s.title,
                checks,
                failures,
            }
        })
        .collect())
}

pub fn run_suite(id: &str, config: &SuiteConfig) -> Option<SuiteOutcome> {
    run_suites(config, &[id.to_string()]).ok()?.pop()
}

fn trials(config: &SuiteConfig, default: usize) -> usize {
    config.fuzz.unwrap_or(default)
}

/// Run `count` independent trials; each returns its failure messages.
fn fuzzed<F>(config: &SuiteConfig, suite: u32, count: usize, trial: F) -> (usize, Vec<String>)
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Vec<String>> + Sync,
{
    let failures: Vec<String> = (0..count)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(config.seed, suite, t as u32);
            match trial(&mut rng) {
                Ok(msgs) => msgs.into_iter().map(|m| format!("trial {t}: {m}")).collect(),
                Err(e) => vec![format!("trial {t}: error: {e}")],
            }
        })
        .collect::<Vec<Vec<String>>>()
        .concat();
    (count, failures)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn check(fails: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        fails.push(msg());
    }
}

fn shift_identities(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 200), |rng| {
        let b = fuzz::random_block(rng, 32, 2.0);
        let n = b.n() as usize;
        let v = b.to_matrix()?;
        let mut fails = Vec::new();
        let mut power = ComplexMatrix::identity(n);
        for j in 0..n {
            let svd = numerics::op_norm(&power);
            let closed = b.power_norm_log(j as u128)?.exp();
            check(&mut fails, rel_err(closed, svd) <= 1e-8, || {
                format!("n={n} p={} ||v^{j}|| closed {closed} vs svd {svd}", b.p())
            });
            power = power.matmul(&v)?;
        }
        let defect = power.max_abs_diff(&ComplexMatrix::identity(n))?;
        check(&mut fails, defect <= 1e-10 * b.alpha().powi(n as i32), || {
            format!("v^n differs from I by {defect:e}, n={n}")
        });
        let lambda = fuzz::random_point_off_circle(rng, 0.3, 1.7, 0.02);
        let psi = b.psi(lambda)?;
        let lhs = v.shift_diagonal(lambda)?.matmul(&psi)?;
        let rhs = ComplexMatrix::identity(n).scale(Complex64::new(1.0, 0.0) - lambda.powu(n as u32));
        let scale = (numerics::op_norm(&v) + lambda.norm()) * numerics::op_norm(&psi);
        let residual = numerics::op_norm(&lhs.sub(&rhs)?) / scale;
        check(&mut fails, residual <= 1e-9, || format!("psi residual {residual:e} at n={n}"));
        for z in numerics::eigenvalues(&v)? {
            let turns = z.arg() / std::f64::consts::TAU * n as f64;
            let nearest = fuzz::unit(turns.round() / n as f64);
            let d = (z - nearest).norm();
            check(&mut fails, d <= 1e-8, || format!("eigenvalue {z} is {d:e} from a root, n={n}"));
        }
        Ok(fails)
    })
}

fn weight_window(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 200), |rng| {
        use rand::Rng;
        let b = fuzz::random_block(rng, 40, 3.0);
        let mut fails = Vec::new();
        check(&mut fails, b.check_weight_inequality()?, || {
            format!("window exceeds prefix for n={} p={}", b.n(), b.p())
        });
        let logs = b.log_weights()?;
        let n = b.n();
        for _ in 0..10 {
            let start = rng.random_range(0..n);
            let len = rng.random_range(0..3 * n);
            let naive: f64 = (0..len).map(|t| logs[((start + t) % n) as usize]).sum();
            let closed = b.window_log(start, len);
            check(&mut fails, (closed - naive).abs() <= 1e-11 * (1.0 + naive.abs()), || {
                format!("window({start},{len}) closed {closed} vs summed {naive}")
            });
        }
        Ok(fails)
    })
}

fn s_sum_bracket(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 200), |rng| {
        use rand::Rng;
        let b = fuzz::random_block(rng, 32, 2.0);
        let n = b.n() as usize;
        let mut fails = Vec::new();
        let rho: f64 = rng.random_range(0.1..0.97);
        let lambda = Complex64::from_polar(rho, std::f64::consts::TAU * rng.random::<f64>());
        let (psi, scale) = b.psi_scaled(lambda)?;
        let psi_norm_log = scale + numerics::op_norm(&psi).ln();
        let upper = b.s_sum_log(false, rho)?;
        check(&mut fails, psi_norm_log <= upper + 1e-10, || {
            format!("||psi|| above S(beta, rho): {psi_norm_log} > {upper}")
        });
        let col: f64 = (0..n).map(|i| psi.get(i, 0).norm_sqr()).sum();
        let col_log = 2.0 * scale + col.ln();
        let exact = b.s_sum_log(true, rho * rho)?;
        check(&mut fails, (col_log - exact).abs() <= 1e-9 * (1.0 + exact.abs()), || {
            format!("||psi e1||^2 {col_log} vs S(beta^2, rho^2) {exact}")
        });
        for squared in [false, true] {
            let br = b.s_sum_bracket(squared, rho)?;
            check(&mut fails, br.holds(), || format!("bracket fails: {br:?}"));
        }
        Ok(fails)
    })
}

fn assembled_inverse_norm(f: &BlockFamily) -> Result<f64> {
    Ok(numerics::op_norm(&numerics::inverse(&f.assembled_matrix()?)?))
}

fn block_norm(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 50), |rng| {
        let f = fuzz::random_family(rng, 5, 16, 2.0);
        let mut fails = Vec::new();
        let dense = numerics::op_norm(&f.assembled_matrix()?);
        let claimed = block_operator::family_norm(&f);
        check(&mut fails, rel_err(claimed, dense) <= 1e-8, || {
            format!("family norm {claimed} vs assembled {dense}")
        });
        let max_block = f
            .blocks()
            .iter()
            .map(|b| b.to_matrix().map(|m| numerics::op_norm(&m)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        check(&mut fails, rel_err(claimed, max_block) <= 1e-8, || {
            format!("family norm {claimed} vs block SVD max {max_block}")
        });
        let y = BlockVector::new(
            f.dims()
                .iter()
                .map(|&d| (0..d).map(|_| fuzz::unit(rand::Rng::random::<f64>(rng))).collect())
                .collect(),
        );
        let uy = block_operator::apply(&f, &y)?;
        let parts: f64 = f
            .blocks()
            .iter()
            .zip(&y.segments)
            .map(|(b, seg)| {
                b.to_matrix()
                    .and_then(|m| m.matvec(seg))
                    .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
            })
            .collect::<Result<Vec<_>>>()?
            .iter()
            .sum();
        check(&mut fails, rel_err(uy.norm_sq(), parts) <= 1e-12, || {
            format!("||uy||^2 {} vs blockwise sum {parts}", uy.norm_sq())
        });
        check(&mut fails, uy.norm() <= claimed * y.norm() * (1.0 + 1e-12), || {
            "||uy|| exceeds ||u|| ||y||".to_string()
        });
        let (a, b) = (BigUint::from(rand::Rng::random_range(rng, 0..50u32)), BigUint::from(rand::Rng::random_range(rng, 0..50u32)));
        let split = block_operator::apply_power(&f, &a, &block_operator::apply_power(&f, &b, &y)?)?;
        let joint = block_operator::apply_power(&f, &(&a + &b), &y)?;
        let diff = split.sub(&joint).norm();
        check(&mut fails, diff <= 1e-10 * (1.0 + joint.norm()), || {
            format!("semigroup defect {diff:e}")
        });
        Ok(fails)
    })
}

fn block_inverse(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 50), |rng| {
        let f = fuzz::random_family(rng, 5, 16, 2.0);
        let mut fails = Vec::new();
        let dense = assembled_inverse_norm(&f)?;
        let claimed = block_operator::family_inverse_norm(&f);
        check(&mut fails, rel_err(claimed, dense) <= 1e-8, || {
            format!("inverse norm {claimed} vs assembled {dense}")
        });
        Ok(fails)
    })
}

fn spectrum_criterion(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 50), |rng| {
        let f = fuzz::random_family(rng, 5, 16, 2.0);
        let lambda = fuzz::random_point_off_circle(rng, 0.2, 1.8, 0.05);
        let mut fails = Vec::new();
        let profile = block_operator::resolvent_profile(&f, lambda);
        for ((k, b), entry) in f.indexed().zip(&profile) {
            let dense = block_operator::dense_resolvent_norm(b, lambda)?;
            let got = entry.value().unwrap_or(f64::NAN);
            check(&mut fails, rel_err(got, dense) <= 1e-8, || {
                format!("block {k}: resolvent {got} vs direct {dense} at {lambda}")
            });
            let bounds = b.resolvent_log_bounds(lambda);
            let ld = dense.ln();
            check(
                &mut fails,
                bounds.log_lower <= ld + 1e-9 * (1.0 + ld.abs()) && ld <= bounds.log_upper + 1e-9 * (1.0 + ld.abs()),
                || format!("block {k}: {ld} outside [{}, {}]", bounds.log_lower, bounds.log_upper),
            );
        }
        let sup = numerics::op_norm(&numerics::inverse(&f.assembled_matrix()?.shift_diagonal(lambda)?)?);
        let best = profile.iter().map(|e| e.log_upper()).fold(f64::NEG_INFINITY, f64::max).exp();
        check(&mut fails, rel_err(best, sup) <= 1e-8, || {
            format!("sup of profile {best} vs assembled resolvent {sup}")
        });
        Ok(fails)
    })
}

fn theorem_radii() -> [f64; 4] {
    [0.0, 0.25, 0.5, 0.75]
}

fn outside_disk(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    let fams: Vec<BlockFamily> = theorem_radii().iter().map(|&r| theorem_family(r, 30).unwrap()).collect();
    fuzzed(c, s, trials(c, 100), |rng| {
        use rand::Rng;
        let i = rng.random_range(0..fams.len());
        let lambda = Complex64::from_polar(rng.random_range(1.05..4.0), std::f64::consts::TAU * rng.random::<f64>());
        let v = sa::classify(&fams[i], lambda, &Thresholds::default());
        Ok(if v.kind == VerdictKind::Resolvent {
            vec![]
        } else {
            vec![format!("r={} lambda={lambda}: {:?}", theorem_radii()[i], v.kind)]
        })
    })
}

/// Dense oracle: the resolvent bounds bracket the exact norm on small blocks.
fn bounds_bracket_exact(f: &BlockFamily, lambda: Complex64, fails: &mut Vec<String>) -> Result<()> {
    for (k, b) in f.indexed().take(5) {
        let exact = b.resolvent_log_norm(lambda)?;
        let bd = b.resolvent_log_bounds(lambda);
        let tol = 1e-9 * (1.0 + exact.abs());
        check(fails, bd.log_lower <= exact + tol && exact <= bd.log_upper + tol, || {
            format!("block {k} at {lambda}: exact {exact} outside [{}, {}]", bd.log_lower, bd.log_upper)
        });
    }
    Ok(())
}

fn unbounded_lower(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    let fams: Vec<BlockFamily> = theorem_radii().iter().map(|&r| theorem_family(r, 30).unwrap()).collect();
    fuzzed(c, s, trials(c, 100), |rng| {
        use rand::Rng;
        let i = rng.random_range(0..fams.len());
        let r = theorem_radii()[i];
        let rho = rng.random_range((r + 0.03).max(0.02)..0.97);
        let lambda = Complex64::from_polar(rho, std::f64::consts::TAU * rng.random::<f64>());
        let mut fails = Vec::new();
        let v = sa::classify(&fams[i], lambda, &Thresholds::default());
        check(&mut fails, v.kind.in_spectrum(), || format!("r={r} lambda={lambda}: {:?}", v.kind));
        bounds_bracket_exact(&fams[i], lambda, &mut fails)?;
        Ok(fails)
    })
}

fn bounded_upper(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    let radii = [0.25, 0.5, 0.75];
    let fams: Vec<BlockFamily> = radii.iter().map(|&r| theorem_family(r, 30).unwrap()).collect();
    fuzzed(c, s, trials(c, 100), |rng| {
        use rand::Rng;
        let i = rng.random_range(0..fams.len());
        let r = radii[i];
        let rho = rng.random_range(0.01..r - 0.03);
        let lambda = Complex64::from_polar(rho, std::f64::consts::TAU * rng.random::<f64>());
        let mut fails = Vec::new();
        let v = sa::classify(&fams[i], lambda, &Thresholds::default());
        check(&mut fails, v.kind == VerdictKind::Resolvent, || format!("r={r} lambda={lambda}: {:?}", v.kind));
        bounds_bracket_exact(&fams[i], lambda, &mut fails)?;
        Ok(fails)
    })
}

fn point_spectrum(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    let f = theorem_family(0.5, 30).unwrap();
    let small = theorem_family(0.5, 4).unwrap();
    let (count, mut fails) = fuzzed(c, s, trials(c, 100), |rng| {
        use rand::Rng;
        let mut fails = Vec::new();
        let k = rng.random_range(2..=7usize);
        let n = rv::factorial(k) as u64;
        let j = rng.random_range(0..n);
        let lambda = fuzz::unit(j as f64 / n as f64);
        let v = sa::classify(&f, lambda, &Thresholds::default());
        check(&mut fails, v.kind == VerdictKind::PointSpectrum, || {
            format!("root {j}/{n} classified {:?}", v.kind)
        });
        Ok(fails)
    });
    // every eigenvalue of the assembled truncation is spectral
    match f_eigs_not_resolvent(&small) {
        Ok(mut more) => fails.append(&mut more),
        Err(e) => fails.push(format!("dense oracle: {e}")),
    }
    let zero = sa::classify(&theorem_family(0.0, 30).unwrap(), Complex64::new(0.0, 0.0), &Thresholds::default());
    check(&mut fails, zero.kind == VerdictKind::InSpectrum, || {
        format!("r = 0 family at 0: {:?}", zero.kind)
    });
    (count + 2, fails)
}

fn f_eigs_not_resolvent(f: &BlockFamily) -> Result<Vec<String>> {
    let mut fails = Vec::new();
    for z in numerics::eigenvalues(&f.assembled_matrix()?)? {
        let v = sa::classify(f, z, &Thresholds::default());
        check(&mut fails, v.kind != VerdictKind::Resolvent, || format!("eigenvalue {z} classified resolvent"));
    }
    Ok(fails)
}

fn unit_circle_contact(_: &SuiteConfig, _: u32) -> (usize, Vec<String>) {
    let grid = sa::radial_grid(0.05, 1.5, 0.05).unwrap();
    let t = Thresholds::default();
    let fails: Vec<String> = theorem_radii()
        .par_iter()
        .flat_map(|&r| {
            let mut fails = Vec::new();
            let f = theorem_family(r, 30).unwrap();
            match sa::annulus_scan(&f, &grid, 4, &t) {
                Ok(e) => {
                    check(&mut fails, sa::unit_circle_contact(&e), || {
                        format!("r={r}: outer radius {} misses the circle", e.r_outer)
                    });
                    check(&mut fails, (e.r_inner - r).abs() <= 0.05, || {
                        format!("r={r}: inner radius {}", e.r_inner)
                    });
                    match sa::theoretical_r(&f, &sa::RProbe::default()) {
                        Ok(tr) => check(&mut fails, (tr - e.r_inner).abs() <= 2.0 * e.grid_resolution, || {
                            format!("r={r}: theoretical {tr} vs scanned {}", e.r_inner)
                        }),
                        Err(err) => fails.push(format!("r={r}: {err}")),
                    }
                }
                Err(err) => fails.push(format!("r={r}: {err}")),
            }
            fails
        })
        .collect();
    (theorem_radii().len(), fails)
}

fn factorial_rigidity(_: &SuiteConfig, _: u32) -> (usize, Vec<String>) {
    let mut fails = Vec::new();
    let mut checks = 0;
    for r in theorem_radii() {
        let f = theorem_family(r, 7).unwrap();
        let y = rv::default_test_vector(&f).unwrap();
        let reports: Vec<_> = (2..=6).map(|ell| rv::rigidity_deficit(&f, &y, ell).unwrap()).collect();
        for rep in &reports {
            checks += 1;
            check(&mut fails, rep.bound_holds(), || {
                format!("r={r} ell={}: deficit^2 {} above bound {}", rep.ell, rep.deficit.powi(2), rep.analytic_bound)
            });
        }
        check(&mut fails, reports.windows(2).all(|w| w[1].deficit < w[0].deficit), || {
            format!("r={r}: deficits not decreasing")
        });
        let early = BlockVector::first_basis_vectors(&f, |k| if k <= 3 { 1.0 } else { 0.0 }).unwrap();
        let rep = rv::rigidity_deficit(&f, &early, 3).unwrap();
        check(&mut fails, rep.deficit == 0.0, || format!("r={r}: early support moved by {}", rep.deficit));
    }
    (checks, fails)
}

fn finite_dim_rigidity(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 100), |rng| {
        let mut fails = Vec::new();
        let pos = fuzz::cmp_positive(rng);
        let d = rv::cmp_is_rigid(&pos, 1e-8)?;
        check(&mut fails, d.rigid, || format!("rigid matrix rejected: {}", d.reason));
        let eigs: Vec<Complex64> = numerics::eigenvalues(&pos)?.iter().map(|z| z / z.norm()).collect();
        for eps in [0.1, 0.01] {
            let seq = rv::find_rigidity_sequence(&eigs, eps, 100_000)?;
            check(&mut fails, !seq.hits.is_empty(), || format!("no return within 1e5 at eps {eps}"));
        }
        let neg = fuzz::cmp_negative(rng);
        let d = rv::cmp_is_rigid(&neg, 1e-8)?;
        check(&mut fails, !d.rigid, || "non-rigid matrix accepted".to_string());
        Ok(fails)
    })
}

fn uniform_rigidity_box(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 500), |rng| {
        use rand::Rng;
        // redraw until the hypothesis holds, so every trial exercises the claim
        for _ in 0..100 {
            let n = rng.random_range(1..=10u64);
            let m = fuzz::near_periodic(rng, n);
            let b = rv::uniform_rigidity_box(&m, n)?;
            if b.hypothesis {
                return Ok(if b.passed {
                    vec![]
                } else {
                    vec![format!("box violated with ||m^{n} - I|| = {}", b.norm_defect)]
                });
            }
        }
        Ok(vec!["no candidate satisfied the hypothesis".to_string()])
    })
}

fn spectral_radius_bound(c: &SuiteConfig, s: u32) -> (usize, Vec<String>) {
    fuzzed(c, s, trials(c, 500), |rng| {
        let m = fuzz::radius_test_matrix(rng);
        let seq = fuzz::radius_test_sequence(rng);
        let r = rv::spectral_radius_bound(&m, &seq)?;
        Ok(if r.holds {
            vec![]
        } else {
            vec![format!("radius {} above bound {} for {seq:?}", r.spectral_radius, r.bound)]
        })
    })
}

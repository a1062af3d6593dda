//! Rigidity along the factorials, the finite-dimensional rigidity criterion,
//! and the two spectral-radius facts rigid operators obey.

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::Serialize;

use crate::block_operator::{self, Block, BlockFamily, BlockVector, NormCertificate};
use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix};
use crate::shift_block::{BlockParams, ShiftBlock};

/// `34!` no longer fits the block dimension type.
pub const MAX_FAMILY_K: usize = 33;

/// Largest matrix dimension accepted by the finite-dimensional checks.
pub const MATRIX_LIMIT: usize = 64;

/// `k!` exactly.
pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

pub fn factorial_big(k: usize) -> BigUint {
    (1..=k as u64).map(BigUint::from).product()
}

/// Shift family with `n(k) = k!` realizing the spectrum `{r <= |lambda| <= 1}`.
///
/// For `0 < r < 1`: `p(k) = max(k! - k, 1)`, `alpha(k) = 1 + ln(1/r)/(k-1)!`.
/// For `r = 0`: `p(k) = k! - 1`, `alpha(k) = 1 + 1/(k-1)!`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremFamilySpec {
    pub r: f64,
    pub k_max: usize,
}

impl TheoremFamilySpec {
    pub fn new(r: f64, k_max: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidR(r));
        }
        if !(1..=MAX_FAMILY_K).contains(&k_max) {
            return Err(Error::InvalidArgument(format!(
                "k_max = {k_max} outside 1..={MAX_FAMILY_K}"
            )));
        }
        Ok(Self { r, k_max })
    }

    /// `c` in `alpha(k) = 1 + c / (k-1)!`.
    pub fn decay_constant(&self) -> f64 {
        if self.r == 0.0 {
            1.0
        } else {
            -self.r.ln()
        }
    }

    pub fn n(&self, k: usize) -> u128 {
        factorial(k)
    }

    pub fn p(&self, k: usize) -> u128 {
        let n = factorial(k);
        if self.r == 0.0 {
            n - 1
        } else {
            n.saturating_sub(k as u128).max(1)
        }
    }

    pub fn log_alpha(&self, k: usize) -> f64 {
        (self.decay_constant() / factorial(k - 1) as f64).ln_1p()
    }

    pub fn params(&self, k: usize) -> Result<BlockParams> {
        BlockParams::from_log_alpha(self.n(k), self.p(k), self.log_alpha(k))
    }

    pub fn family(&self) -> Result<BlockFamily> {
        let f = BlockFamily::from_params(self.k_max, |k| self.params(k))?;
        for k in 2..=self.k_max {
            let p = self.p(k);
            assert!(factorial(k - 1) <= p && p < factorial(k), "p({k}) out of range");
            if k > 2 {
                assert!(self.log_alpha(k) < self.log_alpha(k - 1), "alpha not decreasing at {k}");
            }
        }
        Ok(f.with_certificate(NormCertificate {
            sup_norm: self.log_alpha(2).exp(),
            factorial_decay_constant: Some(self.decay_constant()),
        }))
    }
}

pub fn theorem_family(r: f64, k_max: usize) -> Result<BlockFamily> {
    TheoremFamilySpec::new(r, k_max)?.family()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigidityReport {
    pub ell: usize,
    /// `||u^{ell!} y - y||`.
    pub deficit: f64,
    /// `4 sup_{k > ell} ||u_k||^{2 ell!} * tail_mass`, an upper bound for the
    /// squared deficit.
    pub analytic_bound: f64,
    /// `sum_{k > ell} ||y_k||^2`.
    pub tail_mass: f64,
    /// `ell >= k_max`: every block's period divides `ell!`.
    pub saturated: bool,
}

impl RigidityReport {
    pub fn bound_holds(&self) -> bool {
        self.deficit * self.deficit <= self.analytic_bound * (1.0 + 1e-6)
    }
}

fn log_block_norm(b: &Block) -> f64 {
    match b {
        Block::Identity => 0.0,
        Block::Scalar(z) => z.norm().ln(),
        Block::Shift(s) => s.log_alpha(),
    }
}

/// Measure `||u^{ell!} y - y||` with exact reduction of `ell!` per block.
pub fn rigidity_deficit(f: &BlockFamily, y: &BlockVector, ell: usize) -> Result<RigidityReport> {
    if ell < 1 {
        return Err(Error::InvalidArgument("ell must be at least 1".into()));
    }
    let moved = block_operator::apply_power(f, &factorial_big(ell), y)?;
    let deficit = moved.sub(y).norm();
    let tail_mass = y.tail_mass(ell + 1);
    let fact = factorial(ell) as f64;
    let log_growth = f
        .blocks()
        .iter()
        .skip(ell)
        .map(|b| fact * log_block_norm(b))
        .fold(f64::NEG_INFINITY, f64::max);
    let analytic_bound = if tail_mass == 0.0 {
        0.0
    } else {
        4.0 * (2.0 * log_growth).exp() * tail_mass
    };
    Ok(RigidityReport {
        ell,
        deficit,
        analytic_bound,
        tail_mass,
        saturated: ell >= f.k_max(),
    })
}

/// `y_k = e_1 / k` in every block.
pub fn default_test_vector(f: &BlockFamily) -> Result<BlockVector> {
    BlockVector::first_basis_vectors(f, |k| 1.0 / k as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmpDiagnosis {
    pub rigid: bool,
    pub diagonalizable: bool,
    pub unimodular: bool,
    /// Condition number of the eigenvector matrix.
    pub condition: f64,
    /// `max | |lambda| - 1 |` over the eigenvalues.
    pub modulus_defect: f64,
    pub reason: String,
}

fn eigen_clusters(eigs: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..eigs.len() {
        let near: Vec<usize> = (0..clusters.len())
            .filter(|&c| clusters[c].iter().any(|&j| (eigs[i] - eigs[j]).norm() < radius))
            .collect();
        match near.as_slice() {
            [] => clusters.push(vec![i]),
            [c, rest @ ..] => {
                let c = *c;
                for &o in rest.iter().rev() {
                    let moved = clusters.remove(o);
                    clusters[c].extend(moved);
                }
                clusters[c].push(i);
            }
        }
    }
    clusters
}

/// Finite-dimensional rigidity: diagonalizable with every eigenvalue on the
/// unit circle.
///
/// Diagonalizability needs a well-conditioned eigenvector matrix
/// (`cond < 1/tol`) and, for every cluster of nearly equal eigenvalues, a
/// kernel of `m - mu` as large as the cluster.
pub fn cmp_is_rigid(m: &ComplexMatrix, tol: f64) -> Result<CmpDiagnosis> {
    m.require_square()?;
    if m.rows() > MATRIX_LIMIT {
        return Err(Error::DimensionGuard {
            n: m.rows() as u128,
            limit: MATRIX_LIMIT as u128,
        });
    }
    let (eigs, vecs) = numerics::eigen_decomposition(m)?;
    let sv = numerics::singular_values(&vecs)?;
    let condition = sv[0] / sv[sv.len() - 1];
    let scale = numerics::op_norm(m).max(1.0);
    let mut defective = None;
    for cluster in eigen_clusters(&eigs, 1e-4 * scale) {
        if cluster.len() < 2 {
            continue;
        }
        let mu = cluster.iter().map(|&i| eigs[i]).sum::<Complex64>() / cluster.len() as f64;
        let s = numerics::singular_values(&m.shift_diagonal(mu)?)?;
        let nullity = s.iter().filter(|&&x| x <= 1e-6 * scale).count();
        if nullity < cluster.len() {
            defective = Some((mu, cluster.len(), nullity));
            break;
        }
    }
    let modulus_defect = eigs.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let well_conditioned = condition.is_finite() && condition < 1.0 / tol;
    let diagonalizable = well_conditioned && defective.is_none();
    let unimodular = modulus_defect < tol;
    let reason = if !well_conditioned {
        format!("eigenvector matrix condition number {condition:.3e} too large")
    } else if let Some((mu, size, nullity)) = defective {
        format!("eigenvalue {mu:.6} has multiplicity {size} but only {nullity} eigenvectors")
    } else if !unimodular {
        format!("eigenvalue modulus off the unit circle by {modulus_defect:.3e}")
    } else {
        "diagonalizable with unimodular spectrum".to_string()
    };
    Ok(CmpDiagnosis {
        rigid: diagonalizable && unimodular,
        diagonalizable,
        unimodular,
        condition,
        modulus_defect,
        reason,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigiditySequence {
    /// Every `n <= n_limit` with `max_i |z_i^n - 1| < epsilon`, increasing.
    pub hits: Vec<u64>,
    pub limit_reached: bool,
}

/// Scan `n = 1..=n_limit` for returns of all eigenvalues near 1, advancing
/// each phase additively (in turns, with compensated summation).
pub fn find_rigidity_sequence(eigs: &[Complex64], epsilon: f64, n_limit: u64) -> Result<RigiditySequence> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    if let Some((index, z)) = eigs.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::NonUnimodular {
            index,
            modulus: z.norm(),
        });
    }
    let steps: Vec<f64> = eigs
        .iter()
        .map(|z| z.arg() / std::f64::consts::TAU)
        .collect();
    let mut acc = vec![0.0f64; eigs.len()];
    let mut carry = vec![0.0f64; eigs.len()];
    let mut hits = Vec::new();
    for n in 1..=n_limit {
        let mut worst = 0.0f64;
        for i in 0..eigs.len() {
            // Kahan step, then wrap into [-1/2, 1/2)
            let y = steps[i] - carry[i];
            let t = acc[i] + y;
            carry[i] = (t - acc[i]) - y;
            acc[i] = t - t.round();
            let defect = 2.0 * (std::f64::consts::PI * acc[i]).sin().abs();
            worst = worst.max(defect);
        }
        if worst < epsilon {
            hits.push(n);
        }
    }
    Ok(RigiditySequence {
        limit_reached: hits.is_empty(),
        hits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxCheck {
    /// `||m^n - I|| <= 1/2`.
    pub hypothesis: bool,
    pub norm_defect: f64,
    /// Eigenvalue moduli within `[(1/2)^{1/n}, (3/2)^{1/n}]` (vacuous when
    /// the hypothesis fails).
    pub passed: bool,
}

/// If `||m^n - I|| <= 1/2` then every eigenvalue obeys
/// `(1/2)^{1/n} <= |z| <= (3/2)^{1/n}`.
pub fn uniform_rigidity_box(m: &ComplexMatrix, n: u64) -> Result<BoxCheck> {
    m.require_square()?;
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if m.rows() > MATRIX_LIMIT {
        return Err(Error::DimensionGuard {
            n: m.rows() as u128,
            limit: MATRIX_LIMIT as u128,
        });
    }
    let norm_defect = numerics::op_norm(&m.pow(n)?.shift_diagonal(Complex64::new(1.0, 0.0))?);
    if norm_defect > 0.5 {
        return Ok(BoxCheck {
            hypothesis: false,
            norm_defect,
            passed: true,
        });
    }
    let (lo, hi) = (0.5f64.powf(1.0 / n as f64), 1.5f64.powf(1.0 / n as f64));
    let passed = numerics::eigenvalues(m)?
        .iter()
        .all(|z| z.norm() >= lo - 1e-8 && z.norm() <= hi + 1e-8);
    Ok(BoxCheck {
        hypothesis: true,
        norm_defect,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusCheck {
    /// `ln max_k ||m^{n_k}||`.
    pub log_m: f64,
    /// `min_k M^{1/n_k}`.
    pub bound: f64,
    pub spectral_radius: f64,
    pub holds: bool,
}

/// With `M = max_k ||m^{n_k}||`, the spectrum lies in the disk of radius
/// `min_k M^{1/n_k}`.
pub fn spectral_radius_bound(m: &ComplexMatrix, seq: &[u64]) -> Result<RadiusCheck> {
    m.require_square()?;
    if seq.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    if seq[0] < 1 || seq.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "sequence must be positive and strictly increasing".into(),
        ));
    }
    let mut log_m = f64::NEG_INFINITY;
    for &e in seq {
        let (scaled, log_scale) = numerics::power_log_scaled(m, e)?;
        let norm = numerics::op_norm(&scaled);
        if norm > 0.0 {
            log_m = log_m.max(log_scale + norm.ln());
        }
    }
    let bound = seq
        .iter()
        .map(|&e| (log_m / e as f64).exp())
        .fold(f64::INFINITY, f64::min);
    let spectral_radius = numerics::spectral_radius(m)?;
    Ok(RadiusCheck {
        log_m,
        bound,
        spectral_radius,
        holds: spectral_radius <= bound + 1e-8 * bound.max(1.0),
    })
}

/// Shift block lookup for callers that know the family is a shift family.
pub fn shift_block(f: &BlockFamily, k: usize) -> Option<&ShiftBlock> {
    match f.block(k) {
        Block::Shift(s) => Some(s),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn family_substitution() {
        let s = TheoremFamilySpec::new(0.5, 7).unwrap();
        assert_eq!((s.n(3), s.p(3)), (6, 3));
        assert_relative_eq!(s.log_alpha(3).exp(), 1.0 + 2f64.ln() / 2.0, max_relative = 1e-15);
        let z = TheoremFamilySpec::new(0.0, 7).unwrap();
        assert_eq!((z.n(4), z.p(4)), (24, 23));
        assert_relative_eq!(z.log_alpha(4).exp(), 1.0 + 1.0 / 6.0, max_relative = 1e-15);
        assert_eq!(s.p(2), 1);
    }

    #[test]
    fn family_rejects_r_at_least_one() {
        assert_eq!(theorem_family(1.0, 5), Err(Error::InvalidR(1.0)));
        assert!(theorem_family(-0.1, 5).is_err());
    }

    #[test]
    fn family_certificate() {
        let f = theorem_family(0.5, 7).unwrap();
        let cert = f.certificate().unwrap();
        assert_relative_eq!(cert.sup_norm, 1.0 + 2f64.ln());
        assert_relative_eq!(block_operator::family_norm(&f), cert.sup_norm);
    }

    #[test]
    fn deficit_zero_for_early_support() {
        let f = theorem_family(0.5, 6).unwrap();
        let y = BlockVector::first_basis_vectors(&f, |k| if k <= 4 { 1.0 } else { 0.0 }).unwrap();
        let rep = rigidity_deficit(&f, &y, 4).unwrap();
        assert_eq!(rep.deficit, 0.0);
        assert_eq!(rep.analytic_bound, 0.0);
    }

    #[test]
    fn deficit_bound_at_three() {
        let f = theorem_family(0.5, 7).unwrap();
        let y = default_test_vector(&f).unwrap();
        let rep = rigidity_deficit(&f, &y, 3).unwrap();
        let a4 = TheoremFamilySpec::new(0.5, 7).unwrap().log_alpha(4);
        let tail: f64 = (4..=7).map(|k| 1.0 / (k * k) as f64).sum();
        assert_relative_eq!(rep.analytic_bound, 4.0 * (12.0 * a4).exp() * tail, max_relative = 1e-12);
        assert!(rep.bound_holds());
        assert!(rep.deficit > 0.0);
    }

    #[test]
    fn saturated_when_ell_reaches_horizon() {
        let f = theorem_family(0.5, 5).unwrap();
        let y = default_test_vector(&f).unwrap();
        let rep = rigidity_deficit(&f, &y, 5).unwrap();
        assert!(rep.saturated);
        assert_eq!(rep.deficit, 0.0);
    }

    #[test]
    fn cmp_examples() {
        let d = ComplexMatrix::diagonal(&[
            Complex64::from_polar(1.0, std::f64::consts::PI / 3.0),
            Complex64::from_polar(1.0, 2f64.sqrt()),
        ])
        .unwrap();
        assert!(cmp_is_rigid(&d, 1e-8).unwrap().rigid);
        let j = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let dj = cmp_is_rigid(&j, 1e-8).unwrap();
        assert!(!dj.rigid && !dj.diagonalizable);
        let s = cmp_is_rigid(&ComplexMatrix::diagonal_real(&[0.9]).unwrap(), 1e-8).unwrap();
        assert!(!s.rigid && s.diagonalizable && !s.unimodular);
        let id = cmp_is_rigid(&ComplexMatrix::identity(3), 1e-8).unwrap();
        assert!(id.rigid, "{}", id.reason);
    }

    #[test]
    fn rigidity_sequence_examples() {
        let roots: Vec<Complex64> = (0..5)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 5.0))
            .collect();
        let s = find_rigidity_sequence(&roots, 1e-9, 30).unwrap();
        assert_eq!(s.hits, vec![5, 10, 15, 20, 25, 30]);
        let two = [
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2),
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3),
        ];
        let s = find_rigidity_sequence(&two, 1e-9, 50).unwrap();
        assert_eq!(s.hits, vec![12, 24, 36, 48]);
        let g = [Complex64::from_polar(1.0, std::f64::consts::TAU * (5f64.sqrt() - 1.0) / 2.0)];
        let s = find_rigidity_sequence(&g, 0.1, 1000).unwrap();
        assert!(!s.hits.is_empty() && !s.limit_reached);
        assert!(matches!(
            find_rigidity_sequence(&[c(0.5, 0.0)], 0.1, 10),
            Err(Error::NonUnimodular { index: 0, .. })
        ));
    }

    #[test]
    fn long_scan_keeps_exact_periods() {
        let z = [Complex64::from_polar(1.0, std::f64::consts::TAU / 7.0)];
        let s = find_rigidity_sequence(&z, 1e-9, 1_000_000).unwrap();
        assert_eq!(s.hits.len(), 1_000_000 / 7);
        assert!(s.hits.iter().all(|n| n % 7 == 0));
    }

    #[test]
    fn box_examples() {
        let m = ComplexMatrix::diagonal(&[Complex64::from_polar(1.0, 0.1)]).unwrap();
        let b = uniform_rigidity_box(&m, 1).unwrap();
        assert!(b.hypothesis && b.passed);
        let b = uniform_rigidity_box(&ComplexMatrix::diagonal_real(&[1.6]).unwrap(), 1).unwrap();
        assert!(!b.hypothesis && b.passed);
        assert_relative_eq!(b.norm_defect, 0.6, max_relative = 1e-12);
    }

    #[test]
    fn radius_examples() {
        let r = spectral_radius_bound(&ComplexMatrix::diagonal_real(&[0.5, 1.0]).unwrap(), &[1, 2, 6]).unwrap();
        assert_relative_eq!(r.bound, 1.0, max_relative = 1e-12);
        assert!(r.holds);
        let seq: Vec<u64> = (1..=10).collect();
        let r = spectral_radius_bound(&ComplexMatrix::diagonal_real(&[1.1]).unwrap(), &seq).unwrap();
        assert_relative_eq!(r.log_m.exp(), 1.1f64.powi(10), max_relative = 1e-12);
        assert_relative_eq!(r.bound, 1.1, max_relative = 1e-12);
        assert!(r.holds);
        let fact: Vec<u64> = (1..=7).map(|k| factorial(k) as u64).collect();
        let u = ComplexMatrix::diagonal(&[Complex64::from_polar(1.0, 0.7), c(-1.0, 0.0)]).unwrap();
        let r = spectral_radius_bound(&u, &fact).unwrap();
        assert!(r.holds && (r.bound - 1.0).abs() < 1e-12);
        assert!(spectral_radius_bound(&u, &[2, 1]).is_err());
    }
}

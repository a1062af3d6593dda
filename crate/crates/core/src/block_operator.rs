//! Block-diagonal operators `u = (u_k)` acting on `l^2 = prod_k C^{n(k)}`.
//!
//! Everything here is measured on an explicit truncation `k <= k_max`. Claims
//! about the full operator are carried separately as [`NormCertificate`] data
//! and never inferred from the numbers.

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix};
use crate::shift_block::{BlockParams, ResolventBounds, ShiftBlock, DENSE_LIMIT};

/// Largest block dimension for which [`resolvent_profile`] evaluates the
/// resolvent norm exactly; larger blocks report formula bounds.
pub const EXACT_PROFILE_LIMIT: u128 = 720;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    /// Identity on `C`.
    Identity,
    /// Multiplication by a scalar on `C` (diagonal-operator entries).
    Scalar(Complex64),
    Shift(ShiftBlock),
}

impl Block {
    pub fn dim(&self) -> u128 {
        match self {
            Block::Identity | Block::Scalar(_) => 1,
            Block::Shift(b) => b.n(),
        }
    }

    /// `||u_k||`; for a shift block this is `beta_1 = alpha`.
    pub fn op_norm(&self) -> f64 {
        match self {
            Block::Identity => 1.0,
            Block::Scalar(z) => z.norm(),
            Block::Shift(b) => b.alpha(),
        }
    }

    /// `ln ||u_k^-1||`, `+inf` when the block is singular. For a shift block
    /// the inverse maps `e_{j+1}` to `e_j / beta_j`, with norm `alpha^{p/q}`.
    pub fn inverse_norm_log(&self) -> f64 {
        match self {
            Block::Identity => 0.0,
            Block::Scalar(z) => -z.norm().ln(),
            Block::Shift(b) => -b.log_low(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        match self {
            Block::Identity => Ok(ComplexMatrix::identity(1)),
            Block::Scalar(z) => ComplexMatrix::diagonal(&[*z]),
            Block::Shift(b) => b.to_matrix(),
        }
    }

    /// Whether `lambda` is an eigenvalue of this block.
    pub fn is_eigenvalue(&self, lambda: Complex64) -> bool {
        match self {
            Block::Identity => (lambda - 1.0).norm() < 1e-12,
            Block::Scalar(z) => (lambda - z).norm() < 1e-12,
            Block::Shift(b) => b.is_eigenvalue(lambda),
        }
    }

    /// Exact `ln ||(u_k - lambda)^-1||` (dense for shift blocks).
    pub fn resolvent_log_norm(&self, lambda: Complex64) -> Result<f64> {
        match self {
            Block::Identity => Ok(-(lambda - 1.0).norm().ln()),
            Block::Scalar(z) => Ok(-(lambda - z).norm().ln()),
            Block::Shift(b) => b.resolvent_log_norm(lambda),
        }
    }

    /// Bounds on `ln ||(u_k - lambda)^-1||`. Upper bounds depend on `lambda`
    /// only through `|lambda|`; lower bounds are exact for the 1x1 blocks.
    pub fn resolvent_log_bounds(&self, lambda: Complex64) -> ResolventBounds {
        match self {
            Block::Identity => {
                let v = -(lambda - 1.0).norm().ln();
                ResolventBounds {
                    log_lower: v,
                    log_upper: v,
                }
            }
            Block::Scalar(z) => ResolventBounds {
                log_lower: -(lambda - z).norm().ln(),
                log_upper: -(z.norm() - lambda.norm()).abs().ln(),
            },
            Block::Shift(b) => b.resolvent_log_bounds(lambda),
        }
    }

    fn apply_reduced(&self, r: &BigUint, y: &[Complex64]) -> Vec<Complex64> {
        match self {
            Block::Identity => y.to_vec(),
            Block::Scalar(z) => {
                let e = r.to_u64_digits();
                let zm = if e.is_empty() {
                    Complex64::new(1.0, 0.0)
                } else {
                    pow_big(*z, r)
                };
                y.iter().map(|w| w * zm).collect()
            }
            Block::Shift(b) => b.apply_power_reduced(b.reduce_exponent(r), y),
        }
    }
}

fn pow_big(z: Complex64, e: &BigUint) -> Complex64 {
    let mut result = Complex64::new(1.0, 0.0);
    let bits = e.bits();
    for i in (0..bits).rev() {
        result = result * result;
        if e.bit(i) {
            result *= z;
        }
    }
    result
}

/// Closed-form facts about the untruncated family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormCertificate {
    /// `sup_k ||u_k||` over all `k`, not just the truncation.
    pub sup_norm: f64,
    /// Constant `c` in `alpha(k + 1) - 1 = c / k!`, when the family has one.
    pub factorial_decay_constant: Option<f64>,
}

/// `u_1 = id` on `C` followed by blocks `u_2, ..., u_{k_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFamily {
    blocks: Vec<Block>,
    certificate: Option<NormCertificate>,
}

impl BlockFamily {
    /// Family whose blocks for `k >= 2` are given in order.
    pub fn new(rest: Vec<Block>) -> Self {
        let mut blocks = Vec::with_capacity(rest.len() + 1);
        blocks.push(Block::Identity);
        blocks.extend(rest);
        Self {
            blocks,
            certificate: None,
        }
    }

    /// Shift-block family `k -> v_{n(k), p(k), alpha(k)}` for `2 <= k <= k_max`.
    pub fn from_params(
        k_max: usize,
        mut params_of: impl FnMut(usize) -> Result<BlockParams>,
    ) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::InvalidArgument("k_max must be positive".into()));
        }
        let rest = (2..=k_max)
            .map(|k| params_of(k).map(|p| Block::Shift(crate::shift_block::make_block(p))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(rest))
    }

    pub fn with_certificate(mut self, certificate: NormCertificate) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn certificate(&self) -> Option<NormCertificate> {
        self.certificate
    }

    pub fn k_max(&self) -> usize {
        self.blocks.len()
    }

    /// Block `k`, 1-based.
    pub fn block(&self, k: usize) -> &Block {
        &self.blocks[k - 1]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `(k, block)` pairs with 1-based `k`.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, &Block)> {
        self.blocks.iter().enumerate().map(|(i, b)| (i + 1, b))
    }

    pub fn dims(&self) -> Vec<u128> {
        self.blocks.iter().map(Block::dim).collect()
    }

    /// Same family cut at a smaller horizon.
    pub fn truncate(&self, k_max: usize) -> Self {
        Self {
            blocks: self.blocks[..k_max.min(self.blocks.len()).max(1)].to_vec(),
            certificate: self.certificate,
        }
    }

    /// Dense block-diagonal matrix of the truncation (oracle use).
    pub fn assembled_matrix(&self) -> Result<ComplexMatrix> {
        let total: u128 = self.dims().iter().sum();
        if total > DENSE_LIMIT {
            return Err(Error::DimensionGuard {
                n: total,
                limit: DENSE_LIMIT,
            });
        }
        let total = total as usize;
        let mut m = ComplexMatrix::zeros(total, total).as_array().clone();
        let mut offset = 0;
        for b in &self.blocks {
            let bm = b.to_matrix()?;
            let d = bm.rows();
            for i in 0..d {
                for j in 0..d {
                    m[(offset + i, offset + j)] = bm.get(i, j);
                }
            }
            offset += d;
        }
        ComplexMatrix::from_array(m)
    }
}

/// A vector of `l^2` cut into the family's blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    pub segments: Vec<Vec<Complex64>>,
}

impl BlockVector {
    pub fn new(segments: Vec<Vec<Complex64>>) -> Self {
        Self { segments }
    }

    pub fn zeros_like(f: &BlockFamily) -> Result<Self> {
        let segments = f
            .dims()
            .into_iter()
            .map(|d| {
                if d > DENSE_LIMIT {
                    Err(Error::DimensionGuard {
                        n: d,
                        limit: DENSE_LIMIT,
                    })
                } else {
                    Ok(vec![Complex64::new(0.0, 0.0); d as usize])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { segments })
    }

    /// `y_k = c(k) e_1` in every block.
    pub fn first_basis_vectors(f: &BlockFamily, mut coeff: impl FnMut(usize) -> f64) -> Result<Self> {
        let mut y = Self::zeros_like(f)?;
        for (i, seg) in y.segments.iter_mut().enumerate() {
            seg[0] = Complex64::new(coeff(i + 1), 0.0);
        }
        Ok(y)
    }

    /// `||y_k||^2` per block.
    pub fn segment_norms_sq(&self) -> Vec<f64> {
        self.segments
            .iter()
            .map(|s| s.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.segment_norms_sq().iter().sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `sum_{k >= from} ||y_k||^2` with 1-based `from`.
    pub fn tail_mass(&self, from: usize) -> f64 {
        self.segment_norms_sq()
            .iter()
            .skip(from.saturating_sub(1))
            .sum()
    }

    pub fn sub(&self, other: &BlockVector) -> BlockVector {
        BlockVector {
            segments: self
                .segments
                .iter()
                .zip(&other.segments)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    fn check_against(&self, f: &BlockFamily) -> Result<()> {
        if self.segments.len() != f.k_max() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} segments, family has {} blocks",
                self.segments.len(),
                f.k_max()
            )));
        }
        for (k, (seg, b)) in self.segments.iter().zip(f.blocks()).enumerate() {
            if seg.len() as u128 != b.dim() {
                return Err(Error::SegmentMismatch {
                    k: k + 1,
                    expected: b.dim(),
                    found: seg.len(),
                });
            }
        }
        Ok(())
    }
}

/// `||u|| = sup_k ||u_k||` over the truncation.
pub fn family_norm(f: &BlockFamily) -> f64 {
    f.blocks().iter().map(Block::op_norm).fold(0.0, f64::max)
}

/// Per-block `ln ||u_k^-1||`.
pub fn inverse_norm_profile_log(f: &BlockFamily) -> Vec<f64> {
    f.blocks().iter().map(Block::inverse_norm_log).collect()
}

/// `sup_k ||u_k^-1||` over the truncation; `+inf` if some block is singular.
pub fn family_inverse_norm(f: &BlockFamily) -> f64 {
    inverse_norm_profile_log(f)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
        .exp()
}

/// One entry of a resolvent profile, as natural logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResolventEntry {
    /// `lambda` is an eigenvalue of the block.
    Pole,
    Exact { log_norm: f64 },
    /// Block too large for the dense path.
    Bounds { log_lower: f64, log_upper: f64 },
}

impl ResolventEntry {
    pub fn log_lower(&self) -> f64 {
        match *self {
            ResolventEntry::Pole => f64::INFINITY,
            ResolventEntry::Exact { log_norm } => log_norm,
            ResolventEntry::Bounds { log_lower, .. } => log_lower,
        }
    }

    pub fn log_upper(&self) -> f64 {
        match *self {
            ResolventEntry::Pole => f64::INFINITY,
            ResolventEntry::Exact { log_norm } => log_norm,
            ResolventEntry::Bounds { log_upper, .. } => log_upper,
        }
    }

    /// The norm itself when known exactly (`+inf` at a pole).
    pub fn value(&self) -> Option<f64> {
        match *self {
            ResolventEntry::Pole => Some(f64::INFINITY),
            ResolventEntry::Exact { log_norm } => Some(log_norm.exp()),
            ResolventEntry::Bounds { .. } => None,
        }
    }
}

/// `||(u_k - lambda)^-1||` for `k = 1..k_max`. Blocks up to
/// [`EXACT_PROFILE_LIMIT`] are evaluated exactly, larger ones by bounds.
pub fn resolvent_profile(f: &BlockFamily, lambda: Complex64) -> Vec<ResolventEntry> {
    resolvent_profile_with_limit(f, lambda, EXACT_PROFILE_LIMIT)
}

pub fn resolvent_profile_with_limit(
    f: &BlockFamily,
    lambda: Complex64,
    exact_limit: u128,
) -> Vec<ResolventEntry> {
    f.blocks()
        .par_iter()
        .map(|b| {
            if b.is_eigenvalue(lambda) {
                return ResolventEntry::Pole;
            }
            if b.dim() <= exact_limit.min(DENSE_LIMIT) {
                if let Ok(log_norm) = b.resolvent_log_norm(lambda) {
                    return if log_norm == f64::INFINITY {
                        ResolventEntry::Pole
                    } else {
                        ResolventEntry::Exact { log_norm }
                    };
                }
            }
            let bounds = b.resolvent_log_bounds(lambda);
            ResolventEntry::Bounds {
                log_lower: bounds.log_lower,
                log_upper: bounds.log_upper,
            }
        })
        .collect()
}

/// `u y = (u_k y_k)_k`.
pub fn apply(f: &BlockFamily, y: &BlockVector) -> Result<BlockVector> {
    apply_power(f, &BigUint::from(1u32), y)
}

/// `u^m y`, each block reducing `m` modulo its own period exactly.
pub fn apply_power(f: &BlockFamily, m: &BigUint, y: &BlockVector) -> Result<BlockVector> {
    y.check_against(f)?;
    let segments = f
        .blocks()
        .par_iter()
        .zip(y.segments.par_iter())
        .map(|(b, seg)| b.apply_reduced(m, seg))
        .collect();
    Ok(BlockVector { segments })
}

/// Dense oracle for a block's resolvent norm: invert `u_k - lambda` directly.
pub fn dense_resolvent_norm(b: &Block, lambda: Complex64) -> Result<f64> {
    let m = b.to_matrix()?.shift_diagonal(lambda)?;
    Ok(numerics::op_norm(&numerics::inverse(&m)?))
}

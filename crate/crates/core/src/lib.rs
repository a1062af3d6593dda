//! Weighted cyclic shifts, block-diagonal operators on `l^2`, and numerical
//! checks of their spectra and rigidity.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block_operator;
pub mod error;
pub mod fuzz;
pub mod logmath;
pub mod numerics;
pub mod rigidity_verifier;
pub mod shift_block;
pub mod spectrum_analyzer;
pub mod suites;
pub mod trend;

pub use block_operator::{Block, BlockFamily, BlockVector, NormCertificate, ResolventEntry};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, Tolerance};
pub use rigidity_verifier::{theorem_family, RigidityReport, TheoremFamilySpec};
pub use shift_block::{BlockParams, ShiftBlock};
pub use spectrum_analyzer::{AnnulusEstimate, SpectrumVerdict, Thresholds, VerdictKind};

pub use num_bigint::BigUint;
pub use num_complex::Complex64;

//! Seeded random inputs for the property suites.
//!
//! Every generator takes the RNG explicitly; [`trial_rng`] derives one
//! independent stream per (suite, trial) pair so results do not depend on
//! scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::block_operator::{Block, BlockFamily};
use crate::error::Result;
use crate::numerics::{self, ComplexMatrix};
use crate::shift_block::{BlockParams, ShiftBlock};

pub fn trial_rng(seed: u64, suite: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 32) | trial as u64);
    rng
}

pub fn unit(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * turns)
}

pub fn random_params(rng: &mut impl Rng, n_max: u128, alpha_max: f64) -> BlockParams {
    let n = rng.random_range(2..=n_max);
    let p = rng.random_range(1..n);
    let alpha = 1.0 + (alpha_max - 1.0) * rng.random_range(0.02..=1.0);
    BlockParams::new(n, p, alpha).expect("generated parameters are valid")
}

pub fn random_block(rng: &mut impl Rng, n_max: u128, alpha_max: f64) -> ShiftBlock {
    crate::shift_block::make_block(random_params(rng, n_max, alpha_max))
}

/// Shift family with `k_max` in `2..=k_max_limit` and blocks of size at most
/// `n_max`.
pub fn random_family(rng: &mut impl Rng, k_max_limit: usize, n_max: u128, alpha_max: f64) -> BlockFamily {
    let k_max = rng.random_range(2..=k_max_limit);
    let blocks = (2..=k_max)
        .map(|_| Block::Shift(random_block(rng, n_max, alpha_max)))
        .collect();
    BlockFamily::new(blocks)
}

/// A point with modulus in `[lo, hi]` at least `gap` away from the unit circle.
pub fn random_point_off_circle(rng: &mut impl Rng, lo: f64, hi: f64, gap: f64) -> Complex64 {
    loop {
        let rho: f64 = rng.random_range(lo..=hi);
        if (rho - 1.0).abs() >= gap {
            return Complex64::from_polar(rho, std::f64::consts::TAU * rng.random::<f64>());
        }
    }
}

pub fn ginibre(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let scale = (2.0 * n as f64).sqrt().recip();
    ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * scale
    })
    .expect("n >= 1")
}

/// Haar unitary via QR of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    numerics::unitary_factor(&ginibre(rng, n)).expect("square input")
}

/// `U diag(s) W` with singular values `s` in `[1/spread, spread]`.
pub fn well_conditioned(rng: &mut impl Rng, n: usize, spread: f64) -> ComplexMatrix {
    let u = random_unitary(rng, n);
    let w = random_unitary(rng, n);
    let s: Vec<f64> = (0..n).map(|_| spread.powf(rng.random_range(-1.0..=1.0))).collect();
    let d = ComplexMatrix::diagonal_real(&s).unwrap();
    u.matmul(&d).unwrap().matmul(&w).unwrap()
}

/// `V J V^-1`.
pub fn similar(v: &ComplexMatrix, j: &ComplexMatrix) -> Result<ComplexMatrix> {
    v.matmul(j)?.matmul(&numerics::inverse(v)?)
}

/// Root of unity of order in `1..=6`, so any mix of them has period dividing 60.
pub fn small_order_root(rng: &mut impl Rng) -> Complex64 {
    let order = rng.random_range(1..=6u32);
    unit(rng.random_range(0..order) as f64 / order as f64)
}

/// Diagonalizable matrix of size `1..=8` with unimodular spectrum: small
/// order roots plus possibly one generic angle kept `1e-3` away from them.
pub fn cmp_positive(rng: &mut impl Rng) -> ComplexMatrix {
    let n = rng.random_range(1..=8);
    let mut eigs: Vec<Complex64> = (0..n).map(|_| small_order_root(rng)).collect();
    if rng.random_bool(0.5) {
        let generic = loop {
            let z = unit(rng.random::<f64>());
            if eigs.iter().all(|w| (z - w).norm() > 1e-3) {
                break z;
            }
        };
        eigs[0] = generic;
    }
    let v = well_conditioned(rng, n, 2.0);
    similar(&v, &ComplexMatrix::diagonal(&eigs).unwrap()).unwrap()
}

/// Non-rigid matrix of size `2..=8`: either a unimodular Jordan block of
/// size 2 or 3 hidden by a similarity, or a diagonalizable matrix with one
/// eigenvalue modulus in `[0.5, 0.95]` or `[1.05, 1.5]`.
pub fn cmp_negative(rng: &mut impl Rng) -> ComplexMatrix {
    let n = rng.random_range(2..=8);
    let mut eigs: Vec<Complex64> = (0..n).map(|_| small_order_root(rng)).collect();
    let v = well_conditioned(rng, n, 2.0);
    let mut j = ComplexMatrix::diagonal(&eigs).unwrap().as_array().clone();
    if rng.random_bool(0.5) {
        let size = rng.random_range(2..=3usize.min(n));
        let mu = eigs[0];
        for i in 0..size {
            j[(i, i)] = mu;
            if i + 1 < size {
                j[(i, i + 1)] = Complex64::new(1.0, 0.0);
            }
        }
    } else {
        let modulus = if rng.random_bool(0.5) {
            rng.random_range(0.5..=0.95)
        } else {
            rng.random_range(1.05..=1.5)
        };
        eigs[0] *= modulus;
        j[(0, 0)] = eigs[0];
    }
    similar(&v, &ComplexMatrix::from_array(j).unwrap()).unwrap()
}

/// Candidate for the uniform-rigidity box: eigenvalues near `n`-th roots of
/// unity with `|z|^n` in `[0.75, 1.3]`, conjugated by a mild similarity.
/// Roughly half are exactly unitary.
pub fn near_periodic(rng: &mut impl Rng, n: u64) -> ComplexMatrix {
    let dim = rng.random_range(1..=6);
    if rng.random_bool(0.5) {
        let q = random_unitary(rng, dim);
        let eigs: Vec<Complex64> = (0..dim)
            .map(|_| {
                let k = rng.random_range(0..n) as f64;
                unit((k + rng.random_range(-0.04..=0.04)) / n as f64)
            })
            .collect();
        return q
            .matmul(&ComplexMatrix::diagonal(&eigs).unwrap())
            .unwrap()
            .matmul(&q.adjoint())
            .unwrap();
    }
    let eigs: Vec<Complex64> = (0..dim)
        .map(|_| {
            let k = rng.random_range(0..n) as f64;
            let r = rng.random_range(0.75f64..=1.3).powf(1.0 / n as f64);
            Complex64::from_polar(r, std::f64::consts::TAU * (k + rng.random_range(-0.02..=0.02)) / n as f64)
        })
        .collect();
    let v = well_conditioned(rng, dim, 1.1);
    similar(&v, &ComplexMatrix::diagonal(&eigs).unwrap()).unwrap()
}

/// Arbitrary test matrix for the spectral-radius bound: Ginibre, unitary,
/// contraction or a scaled similarity.
pub fn radius_test_matrix(rng: &mut impl Rng) -> ComplexMatrix {
    let dim = rng.random_range(1..=6);
    match rng.random_range(0..4) {
        0 => ginibre(rng, dim).scale(Complex64::new(rng.random_range(0.2..=2.0), 0.0)),
        1 => random_unitary(rng, dim),
        2 => random_unitary(rng, dim).scale(Complex64::new(rng.random_range(0.3..=1.0), 0.0)),
        _ => {
            let eigs: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::from_polar(rng.random_range(0.2..=1.2), std::f64::consts::TAU * rng.random::<f64>()))
                .collect();
            let v = well_conditioned(rng, dim, 3.0);
            similar(&v, &ComplexMatrix::diagonal(&eigs).unwrap()).unwrap()
        }
    }
}

/// Increasing positive sequence: factorials, a run `1..=m`, or random gaps.
pub fn radius_test_sequence(rng: &mut impl Rng) -> Vec<u64> {
    match rng.random_range(0..3) {
        0 => (1..=rng.random_range(1..=7u64)).scan(1u64, |f, k| {
            *f *= k;
            Some(*f)
        })
        .collect(),
        1 => (1..=rng.random_range(1..=12u64)).collect(),
        _ => {
            let mut x = 0u64;
            (0..rng.random_range(1..=8))
                .map(|_| {
                    x += rng.random_range(1..=50u64);
                    x
                })
                .collect()
        }
    }
}

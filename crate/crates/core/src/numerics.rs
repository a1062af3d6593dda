//! Dense complex linear algebra: the brute-force oracle layer.
//!
//! Singular values, eigenvalues and inverses go through LAPACK (via
//! `ndarray-linalg`); everything else is plain dense arithmetic.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, QR, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Matrices up to this size get a full SVD in [`op_norm`]; larger ones use
/// power iteration on `A* A`.
pub const SVD_LIMIT: usize = 512;
pub const POWER_ITERATION_TOL: f64 = 1e-12;
pub const POWER_ITERATION_MAX_ITER: usize = 10_000;

/// Hybrid absolute/relative comparison `|a - b| <= atol + rtol * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        atol: 1e-12,
        rtol: 1e-9,
    };

    pub const fn new(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol }
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        (a - b).abs() <= self.atol + self.rtol * a.abs().max(b.abs())
    }

    pub fn eq_c(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.atol + self.rtol * a.norm().max(b.norm())
    }

    /// `a <= b` up to the tolerance.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b || self.eq(a, b)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Dense complex matrix, row-major, finite entries, both dimensions positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<Complex64>,
}

impl ComplexMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                found: entries.len(),
            });
        }
        let data = Array2::from_shape_vec((rows, cols), entries)
            .expect("length checked against shape");
        Self::from_array(data)
    }

    pub fn from_array(data: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if let Some(((row, col), _)) = data
            .indexed_iter()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { row, col });
        }
        // keep row-major storage regardless of how the array was produced
        let data = if data.is_standard_layout() {
            data
        } else {
            data.as_standard_layout().to_owned()
        };
        Ok(Self { data })
    }

    /// Panics on a zero dimension.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "empty matrix");
        Self {
            data: Array2::eye(n),
        }
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Array2::zeros((n, n));
        for (i, &z) in entries.iter().enumerate() {
            data[(i, i)] = z;
        }
        Self::from_array(data)
    }

    pub fn diagonal_real(entries: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&v)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        Self::from_array(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        self.data
            .as_slice()
            .expect("storage is kept in standard layout")
    }

    pub fn count_nonzeros(&self) -> usize {
        self.data.iter().filter(|z| **z != Complex64::new(0.0, 0.0)).count()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self {
            data: self.data.dot(&other.data),
        })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        Self {
            data: self.data.mapv(|z| z * s),
        }
    }

    /// `self - lambda * I`.
    pub fn shift_diagonal(&self, lambda: Complex64) -> Result<ComplexMatrix> {
        self.require_square()?;
        let mut data = self.data.clone();
        for i in 0..self.rows() {
            data[(i, i)] -= lambda;
        }
        Ok(Self { data })
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self {
            data: self.data.t().mapv(|z| z.conj()),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows(),
                self.cols(),
                x.len()
            )));
        }
        let v = Array1::from(x.to_vec());
        Ok(self.data.dot(&v).to_vec())
    }

    /// `self^m` by binary powering.
    pub fn pow(&self, mut m: u64) -> Result<ComplexMatrix> {
        self.require_square()?;
        let mut result = Self::identity(self.rows());
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = result.matmul(&base)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.data.dim() == other.data.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )))
        }
    }
}

fn lapack<E: std::fmt::Display>(e: E) -> Error {
    Error::Lapack(e.to_string())
}

/// All singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (_, s, _) = m.data.svd(false, false).map_err(lapack)?;
    Ok(s.to_vec())
}

/// Largest singular value.
///
/// Full SVD up to [`SVD_LIMIT`], power iteration on `A* A` beyond.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.rows().max(m.cols()) <= SVD_LIMIT {
        if let Ok(s) = singular_values(m) {
            return s.first().copied().unwrap_or(0.0);
        }
    }
    power_iteration_norm(m)
}

/// Largest singular value by power iteration on `A* A`.
pub fn power_iteration_norm(m: &ComplexMatrix) -> f64 {
    let a = &m.data;
    let ah = a.t().mapv(|z| z.conj());
    let n = m.cols();
    // deterministic start vector with no special alignment to the shift structure
    let mut x: Array1<Complex64> = Array1::from_shape_fn(n, |j| {
        let t = j as f64;
        Complex64::new(1.0 + 0.5 * (0.7 * t).sin(), 0.25 * (1.3 * t).cos())
    });
    let norm = |v: &Array1<Complex64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nx = norm(&x);
    x.mapv_inplace(|z| z / nx);
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX_ITER {
        let y = a.dot(&x);
        let z = ah.dot(&y);
        let nz = norm(&z);
        if nz == 0.0 {
            return 0.0;
        }
        // Rayleigh quotient of A*A at unit x is |Ax|^2
        let next = norm(&y).powi(2);
        x = z.mapv(|w| w / nz);
        if (next - estimate).abs() <= POWER_ITERATION_TOL * next {
            return next.sqrt();
        }
        estimate = next;
    }
    estimate.sqrt()
}

/// All eigenvalues with multiplicity (LAPACK `zgeev`).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    m.require_square()?;
    let (vals, _) = m.data.eig().map_err(lapack)?;
    Ok(vals.to_vec())
}

/// Eigenvalues and right eigenvectors (as columns, unit 2-norm).
pub fn eigen_decomposition(m: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    m.require_square()?;
    let (vals, vecs) = m.data.eig().map_err(lapack)?;
    Ok((vals.to_vec(), ComplexMatrix::from_array(vecs)?))
}

pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    use ndarray_linalg::Determinant;
    m.require_square()?;
    m.data.det().map_err(lapack)
}

/// `m^-1`, refusing matrices whose smallest singular value is below
/// `1e-12` times the largest.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.require_square()?;
    let s = singular_values(m)?;
    let largest = s.first().copied().unwrap_or(0.0);
    let smallest = s.last().copied().unwrap_or(0.0);
    if !(smallest > 1e-12 * largest) {
        return Err(Error::Singular {
            smallest_singular_value: smallest,
        });
    }
    let inv = m.data.inv().map_err(lapack)?;
    ComplexMatrix::from_array(inv)
}

/// Unitary factor `Q` of `m = QR`, with column phases fixed so that `R` has
/// a positive real diagonal (Haar-distributed for a Ginibre input).
pub fn unitary_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.require_square()?;
    let (q, r) = m.data.qr().map_err(lapack)?;
    let mut q = q;
    for j in 0..m.cols() {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            q.column_mut(j).mapv_inplace(|z| z * phase);
        }
    }
    ComplexMatrix::from_array(q)
}

/// Spectral radius from the eigensolver.
pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// `m^e` as `exp(log_scale) * scaled`, rescaling after each product so that
/// large exponents of expanding or contracting matrices stay representable.
pub fn power_log_scaled(m: &ComplexMatrix, mut e: u64) -> Result<(ComplexMatrix, f64)> {
    m.require_square()?;
    let n = m.rows();
    let mut result = ComplexMatrix::identity(n);
    let mut result_log = 0.0;
    let (mut base, mut base_log) = rescale(m.clone(), 0.0);
    while e > 0 {
        if e & 1 == 1 {
            let r = result.matmul(&base)?;
            (result, result_log) = rescale(r, result_log + base_log);
        }
        e >>= 1;
        if e > 0 {
            let b = base.matmul(&base)?;
            (base, base_log) = rescale(b, 2.0 * base_log);
        }
    }
    Ok((result, result_log))
}

fn rescale(m: ComplexMatrix, log_scale: f64) -> (ComplexMatrix, f64) {
    let s = m.max_abs();
    if s == 0.0 {
        return (m, f64::NEG_INFINITY);
    }
    (m.scale(Complex64::new(1.0 / s, 0.0)), log_scale + s.ln())
}

/// `|z^n - 1|` for large `n`, reducing `n * arg(z) / 2pi` modulo one with an
/// error-free product so the phase keeps full precision while `n < 2^53`.
pub fn unit_power_defect(z: Complex64, n: u128) -> f64 {
    let rho = z.norm();
    if rho == 0.0 {
        return 1.0;
    }
    let nf = n as f64;
    let log_mag = nf * rho.ln();
    if log_mag > 1.0 {
        // |z^n| > e, so |z^n - 1| > e - 1; the exact value is irrelevant here
        return log_mag.exp() - 1.0;
    }
    let turns = z.arg() / std::f64::consts::TAU;
    let frac = if n < (1u128 << 53) {
        let hi = nf * turns;
        let lo = nf.mul_add(turns, -hi);
        (hi - hi.round()) + lo
    } else {
        let hi = nf * turns;
        hi - hi.round()
    };
    let angle = std::f64::consts::TAU * frac;
    // |e^{x + i y} - 1| with x = log_mag, y = angle
    let re = log_mag.exp_m1() * angle.cos() - 2.0 * (0.5 * angle).sin().powi(2);
    let im = log_mag.exp() * angle.sin();
    re.hypot(im)
}

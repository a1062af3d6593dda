//! A single weighted cyclic shift `v(e_j) = beta_j e_{j+1}` on `C^n`.
//!
//! The first `p` weights equal `alpha`, the remaining `q = n - p` equal
//! `alpha^(-p/q)`, so the full product of weights is one and `v^n = I`.
//! Weight products are handled as log sums; since the weights take only two
//! values, every window product has a closed form in the number of
//! high-weight slots it covers, which lets the formula path run at block
//! dimensions like `30!` where nothing can be materialized.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmath::{
    log_add_exp, log_geometric_sum, ln_one_minus_exp, ln_one_plus_exp,
};
use crate::numerics::{self, ComplexMatrix};

/// Largest block dimension that may be materialized as a dense matrix.
pub const DENSE_LIMIT: u128 = 10_000;

/// Largest supported block dimension (window arithmetic needs `2n` in range).
pub const MAX_DIMENSION: u128 = 1 << 126;

/// Distance to the nearest n-th root of unity below which `lambda` counts as
/// an eigenvalue; tested as `|lambda^n - 1| < n * ROOT_OF_UNITY_TOL`, since a
/// rounded root `lambda` already carries a defect of order `n` ulps.
pub const ROOT_OF_UNITY_TOL: f64 = 1e-12;

/// Cap on the scaled root-of-unity test, so that points far from the unit
/// circle are never mistaken for roots of huge order.
pub const MAX_ROOT_DEFECT: f64 = 1e-6;

/// Phase arithmetic `n * arg(lambda)` is only meaningful while `n` is an
/// exact double.
pub const EXACT_PHASE_LIMIT: u128 = 1 << 53;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    n: u128,
    p: u128,
    log_alpha: f64,
}

impl BlockParams {
    pub fn new(n: u128, p: u128, alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("need alpha > 1, got {alpha}")));
        }
        Self::from_log_alpha(n, p, alpha.ln())
    }

    /// Parameters given by `ln alpha`, which stays representable when
    /// `alpha - 1` is far below machine epsilon.
    pub fn from_log_alpha(n: u128, p: u128, log_alpha: f64) -> Result<Self> {
        if p < 1 || p >= n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= p < n, got n = {n}, p = {p}"
            )));
        }
        if n > MAX_DIMENSION {
            return Err(Error::InvalidParams(format!("n = {n} too large")));
        }
        if !(log_alpha > 0.0) || !log_alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need alpha > 1, got ln alpha = {log_alpha}"
            )));
        }
        Ok(Self { n, p, log_alpha })
    }

    pub fn n(&self) -> u128 {
        self.n
    }

    pub fn p(&self) -> u128 {
        self.p
    }

    pub fn q(&self) -> u128 {
        self.n - self.p
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn log_alpha(&self) -> f64 {
        self.log_alpha
    }

    /// `alpha - 1` without cancellation.
    pub fn alpha_minus_one(&self) -> f64 {
        self.log_alpha.exp_m1()
    }

    /// `p / q`, reduced by the gcd first so that the division is correctly
    /// rounded whenever the reduced terms are exact doubles.
    pub fn p_over_q(&self) -> f64 {
        let q = self.q();
        let g = self.p.gcd(&q);
        let (a, b) = (self.p / g, q / g);
        match (u64::try_from(a), u64::try_from(b)) {
            (Ok(a), Ok(b)) => a as f64 / b as f64,
            _ => a as f64 / b as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftBlock {
    params: BlockParams,
    log_alpha: f64,
    log_low: f64,
    high: f64,
    low: f64,
}

/// Comparison quantity for the S-sum together with the observed ratio and
/// the constants bracketing it, all as natural logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SSumBracket {
    pub log_s: f64,
    pub log_comparison: f64,
    pub log_ratio: f64,
    pub log_ratio_lower: f64,
    pub log_ratio_upper: f64,
}

impl SSumBracket {
    pub fn holds(&self) -> bool {
        let slack = 1e-12 * (1.0 + self.log_s.abs());
        self.log_ratio >= self.log_ratio_lower - slack && self.log_ratio <= self.log_ratio_upper + slack
    }
}

/// Phase-free bounds on `ln ||(v - lambda)^-1||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventBounds {
    pub log_lower: f64,
    pub log_upper: f64,
}

/// Construct the block for valid parameters.
pub fn make_block(params: BlockParams) -> ShiftBlock {
    let log_alpha = params.log_alpha;
    let log_low = -params.p_over_q() * log_alpha;
    ShiftBlock {
        params,
        log_alpha,
        log_low,
        high: log_alpha.exp(),
        low: log_low.exp(),
    }
}

impl ShiftBlock {
    pub fn new(n: u128, p: u128, alpha: f64) -> Result<Self> {
        Ok(make_block(BlockParams::new(n, p, alpha)?))
    }

    pub fn params(&self) -> BlockParams {
        self.params
    }

    pub fn n(&self) -> u128 {
        self.params.n
    }

    pub fn p(&self) -> u128 {
        self.params.p
    }

    pub fn q(&self) -> u128 {
        self.params.q()
    }

    pub fn alpha(&self) -> f64 {
        self.high
    }

    pub fn log_alpha(&self) -> f64 {
        self.log_alpha
    }

    /// `ln` of the low weight, `-(p/q) ln alpha`.
    pub fn log_low(&self) -> f64 {
        self.log_low
    }

    /// `ln beta_j` for 1-based `j`, extended n-periodically.
    pub fn log_beta(&self, j: u128) -> f64 {
        assert!(j >= 1, "weights are 1-indexed");
        if (j - 1) % self.n() < self.p() {
            self.log_alpha
        } else {
            self.log_low
        }
    }

    /// `beta_j` for 1-based `j`, extended n-periodically.
    pub fn beta(&self, j: u128) -> f64 {
        assert!(j >= 1, "weights are 1-indexed");
        if (j - 1) % self.n() < self.p() {
            self.high
        } else {
            self.low
        }
    }

    fn dense_dim(&self) -> Result<usize> {
        if self.n() > DENSE_LIMIT {
            return Err(Error::DimensionGuard {
                n: self.n(),
                limit: DENSE_LIMIT,
            });
        }
        Ok(self.n() as usize)
    }

    /// `(ln beta_1, ..., ln beta_n)`.
    pub fn log_weights(&self) -> Result<Vec<f64>> {
        let n = self.dense_dim()?;
        Ok((1..=n as u128).map(|j| self.log_beta(j)).collect())
    }

    /// Number of high-weight slots among 0-based slots `[0, x)` of the
    /// periodic extension.
    fn high_below(&self, x: u128) -> u128 {
        let (n, p) = (self.n(), self.p());
        (x / n) * p + (x % n).min(p)
    }

    /// `ln(beta_{s+1} ... beta_{s+len})` for 0-based start slot `s`.
    pub fn window_log(&self, start: u128, len: u128) -> f64 {
        let start = start % self.n();
        let len_in_period = len % self.n();
        // whole periods contribute a product of one
        let h = self.high_below(start + len_in_period) - self.high_below(start);
        let low = len_in_period - h;
        h as f64 * self.log_alpha + low as f64 * self.log_low
    }

    /// `ln ||v^j|| = ln(beta_1 ... beta_j)` for `0 <= j <= n - 1`.
    pub fn power_norm_log(&self, j: u128) -> Result<f64> {
        if j >= self.n() {
            return Err(Error::PowerOutOfRange { j, n: self.n() });
        }
        Ok(self.window_log(0, j))
    }

    /// Dense `n x n` matrix with `(j + 1 mod n, j)` entry `beta_{j+1}` (0-based).
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dense_dim()?;
        let mut m = ComplexMatrix::zeros(n, n).as_array().clone();
        for j in 0..n {
            m[((j + 1) % n, j)] = Complex64::new(self.beta(j as u128 + 1), 0.0);
        }
        ComplexMatrix::from_array(m)
    }

    /// `v^r` assembled from window products, `0 <= r < n`.
    fn power_matrix(&self, r: u128) -> Result<ComplexMatrix> {
        let n = self.dense_dim()?;
        if r == 0 {
            return Ok(ComplexMatrix::identity(n));
        }
        let mut m = ComplexMatrix::zeros(n, n).as_array().clone();
        let shift = r as usize;
        for i in 0..n {
            m[((i + shift) % n, i)] = Complex64::new(self.window_log(i as u128, r).exp(), 0.0);
        }
        ComplexMatrix::from_array(m)
    }

    /// `v^m`, reducing the exponent modulo `n` exactly first.
    pub fn block_power(&self, m: &BigUint) -> Result<ComplexMatrix> {
        self.power_matrix(self.reduce_exponent(m))
    }

    pub fn reduce_exponent(&self, m: &BigUint) -> u128 {
        (m % BigUint::from(self.n()))
            .to_u128()
            .expect("remainder is below n")
    }

    /// `v^r y` for a vector of length `n`, `r` already reduced modulo `n`.
    pub fn apply_power_reduced(&self, r: u128, y: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(y.len() as u128, self.n());
        if r == 0 {
            return y.to_vec();
        }
        let n = y.len();
        let shift = (r % self.n()) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &yi) in y.iter().enumerate() {
            if yi != Complex64::new(0.0, 0.0) {
                out[(i + shift) % n] = yi * self.window_log(i as u128, r).exp();
            }
        }
        out
    }

    /// `psi_lambda(v) / exp(log_scale)` with `log_scale` the largest entry
    /// log-magnitude, so entries are at most one in modulus.
    pub fn psi_scaled(&self, lambda: Complex64) -> Result<(ComplexMatrix, f64)> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Err(Error::PsiUndefinedAtZero);
        }
        let n = self.dense_dim()?;
        let log_rho = lambda.norm().ln();
        let theta = lambda.arg();
        // entry for column i, power j: lambda^{n-1-j} * window(i, j);
        // windows never exceed the prefix product, so the prefix bounds the scale
        let scale = (0..n)
            .map(|j| self.window_log(0, j as u128) + (n - 1 - j) as f64 * log_rho)
            .fold(f64::NEG_INFINITY, f64::max);
        let lambda_powers: Vec<(f64, Complex64)> = (0..n)
            .map(|j| {
                let e = (n - 1 - j) as f64;
                (e * log_rho, Complex64::from_polar(1.0, e * theta))
            })
            .collect();
        let mut m = ComplexMatrix::zeros(n, n).as_array().clone();
        for i in 0..n {
            for (j, &(log_mag, phase)) in lambda_powers.iter().enumerate() {
                let w = self.window_log(i as u128, j as u128);
                m[((i + j) % n, i)] = phase * (log_mag + w - scale).exp();
            }
        }
        Ok((ComplexMatrix::from_array(m)?, scale))
    }

    /// `psi_lambda(v) = lambda^{n-1} sum_{j<n} (v / lambda)^j`, assembled column
    /// by column from the shift structure.
    pub fn psi(&self, lambda: Complex64) -> Result<ComplexMatrix> {
        let (scaled, log_scale) = self.psi_scaled(lambda)?;
        if log_scale.abs() > 700.0 {
            return Err(Error::Unrepresentable(log_scale));
        }
        Ok(scaled.scale(Complex64::new(log_scale.exp(), 0.0)))
    }

    /// `ln ||psi_lambda(v)||` without materializing out-of-range entries.
    pub fn psi_log_norm(&self, lambda: Complex64) -> Result<f64> {
        let (scaled, log_scale) = self.psi_scaled(lambda)?;
        Ok(log_scale + numerics::op_norm(&scaled).ln())
    }

    /// Whether `lambda` is an n-th root of unity up to [`ROOT_OF_UNITY_TOL`].
    /// Always false once `n` exceeds [`EXACT_PHASE_LIMIT`].
    pub fn is_eigenvalue(&self, lambda: Complex64) -> bool {
        is_unit_root(lambda, self.n())
    }

    /// `ln ||(v - lambda I)^-1||` by the dense closed form
    /// `||psi_lambda(v)|| / |1 - lambda^n|`; `+inf` at the n-th roots of unity.
    pub fn resolvent_log_norm(&self, lambda: Complex64) -> Result<f64> {
        self.dense_dim()?;
        if self.is_eigenvalue(lambda) {
            return Ok(f64::INFINITY);
        }
        if lambda == Complex64::new(0.0, 0.0) {
            // psi_0(v) = v^{n-1} = v^{-1}
            let inv = self.power_matrix(self.n() - 1)?;
            return Ok(numerics::op_norm(&inv).ln());
        }
        Ok(self.psi_log_norm(lambda)? - ln_abs_unit_power_minus_one(lambda, self.n()))
    }

    pub fn resolvent_norm(&self, lambda: Complex64) -> Result<f64> {
        Ok(self.resolvent_log_norm(lambda)?.exp())
    }

    /// `ln S(beta, t)`, or `ln S(beta^2, t)` when `squared`, where
    /// `S(beta, t) = t^{n-1} sum_{j<n} beta_1...beta_j / t^j`.
    ///
    /// The prefix products are geometric on `[0, p)` and on `[p, n)`, so the
    /// sum is two geometric sums joined by log-sum-exp. Each is anchored at
    /// its largest term, with the integer exponents combined before they
    /// meet a logarithm; at `n = 30!` a bare `(n - 1) ln t` would swamp the
    /// answer in rounding error.
    pub fn s_sum_log(&self, squared: bool, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("t = {t} must be positive")));
        }
        let w = if squared { 2.0 } else { 1.0 };
        let (hi, lo) = (w * self.log_alpha, w * self.log_low);
        let lt = t.ln();
        let (p, q) = (self.p(), self.q());
        let (pf, qf) = (p as f64, q as f64);
        // t^{n-1-j} alpha^j for j < p
        let head = if hi >= lt {
            (p - 1) as f64 * hi + qf * lt + log_geometric_sum(lt - hi, pf)
        } else {
            (self.n() - 1) as f64 * lt + log_geometric_sum(hi - lt, pf)
        };
        // alpha^p low^i t^{q-1-i} for i < q, where alpha^p low^{q-1} = 1/low
        let tail = if lo >= lt {
            -lo + log_geometric_sum(lt - lo, qf)
        } else {
            pf * hi + (q - 1) as f64 * lt + log_geometric_sum(lo - lt, qf)
        };
        Ok(log_add_exp(head, tail))
    }

    /// `ln sum_{j<n} beta_1...beta_j / t^j`, i.e. `ln S - (n - 1) ln t`,
    /// for `t > 1` where that difference is small and `S` is not.
    fn s_sum_inner_log(&self, squared: bool, t: f64) -> f64 {
        debug_assert!(t > 1.0);
        let w = if squared { 2.0 } else { 1.0 };
        let (hi, lo) = (w * self.log_alpha, w * self.log_low);
        let lt = t.ln();
        let (pf, qf) = (self.p() as f64, self.q() as f64);
        let head = if hi >= lt {
            (pf - 1.0) * (hi - lt) + log_geometric_sum(lt - hi, pf)
        } else {
            log_geometric_sum(hi - lt, pf)
        };
        let tail = pf * (hi - lt) + log_geometric_sum(lo - lt, qf);
        log_add_exp(head, tail)
    }

    /// The comparison quantity `alpha^p rho^q sum_{j<q} (rho alpha^{p/q})^{-j}`
    /// (or its squared-weight analogue at `rho^2`) against the S-sum.
    ///
    /// Splitting the S-sum at slot `p`, its tail equals the comparison divided
    /// by `rho`, and its head is at most the comparison times
    /// `1 / (rho (alpha / rho - 1))`; hence
    /// `1/rho <= S / comparison <= 1 / (rho (1 - rho / alpha))`.
    pub fn s_sum_bracket(&self, squared: bool, rho: f64) -> Result<SSumBracket> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::RhoOutOfRange(rho));
        }
        let w = if squared { 2.0 } else { 1.0 };
        let log_rho = w * rho.ln();
        let (hi, lo) = (w * self.log_alpha, w * self.log_low);
        let (p, q) = (self.p() as f64, self.q() as f64);
        let log_comparison = p * hi + q * log_rho + log_geometric_sum(lo - log_rho, q);
        let log_s = self.s_sum_log(squared, log_rho.exp())?;
        Ok(SSumBracket {
            log_s,
            log_comparison,
            log_ratio: log_s - log_comparison,
            log_ratio_lower: -log_rho,
            log_ratio_upper: -log_rho - ln_one_minus_exp(log_rho - hi),
        })
    }

    /// Brute-force check that every periodic window product of length `j` is
    /// at most the prefix product of length `j`.
    pub fn check_weight_inequality(&self) -> Result<bool> {
        let logs = self.log_weights()?;
        let n = logs.len();
        let mut prefix = vec![0.0; n];
        let mut acc = 0.0;
        for j in 1..n {
            acc += logs[j - 1];
            prefix[j] = acc;
        }
        for k in 0..n {
            let mut window = 0.0;
            for j in 1..n {
                window += logs[(k + j - 1) % n];
                if window > prefix[j] + 1e-12 * (1.0 + prefix[j].abs()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Bounds on `ln ||(v - lambda I)^-1||` that depend on `lambda` only
    /// through `|lambda|`, valid at any block dimension.
    ///
    /// Lower: `||psi e_1|| / (1 + rho^n)` with `||psi e_1||^2 = S(beta^2, rho^2)`.
    /// Upper for `rho < 1`: `S(beta, rho) / (1 - rho^n)`; for `rho > 1` the
    /// geometric bound `rho^{n-1} sum_j (alpha / rho)^j / (rho^n - 1)`;
    /// infinite on the unit circle.
    pub fn resolvent_log_bounds(&self, lambda: Complex64) -> ResolventBounds {
        let rho = lambda.norm();
        if rho == 0.0 {
            let v = -self.log_low;
            return ResolventBounds {
                log_lower: v,
                log_upper: v,
            };
        }
        let n = self.n() as f64;
        let log_rho = rho.ln();
        let n_log_rho = n * log_rho;
        if rho < 1.0 {
            let log_lower = 0.5 * self.s_sum_log(true, rho * rho).expect("rho^2 is positive")
                - ln_one_plus_exp(n_log_rho);
            let log_upper =
                self.s_sum_log(false, rho).expect("rho is positive") - ln_one_minus_exp(n_log_rho);
            return ResolventBounds {
                log_lower,
                log_upper,
            };
        }
        if rho == 1.0 {
            return ResolventBounds {
                log_lower: 0.5 * self.s_sum_log(true, 1.0).expect("t = 1") - 2f64.ln(),
                log_upper: f64::INFINITY,
            };
        }
        // rho > 1: divide numerator and denominator by rho^n before taking logs
        let log_lower =
            -log_rho + 0.5 * self.s_sum_inner_log(true, rho * rho) - ln_one_plus_exp(-n_log_rho);
        let log_upper = -log_rho - ln_one_minus_exp(-n_log_rho)
            + log_geometric_sum(self.log_alpha - log_rho, n);
        ResolventBounds {
            log_lower,
            log_upper,
        }
    }
}

/// Whether `lambda^n = 1` up to [`ROOT_OF_UNITY_TOL`] per unit of `n`.
pub fn is_unit_root(lambda: Complex64, n: u128) -> bool {
    n < EXACT_PHASE_LIMIT
        && numerics::unit_power_defect(lambda, n) < (ROOT_OF_UNITY_TOL * n as f64).min(MAX_ROOT_DEFECT)
}

/// `ln |lambda^n - 1|` keeping full relative accuracy for large `|lambda^n|`.
pub fn ln_abs_unit_power_minus_one(lambda: Complex64, n: u128) -> f64 {
    let rho = lambda.norm();
    if rho == 0.0 {
        return 0.0;
    }
    let x = n as f64 * rho.ln();
    if x > 1.0 {
        let turns = lambda.arg() / std::f64::consts::TAU;
        let nf = n as f64;
        let hi = nf * turns;
        let lo = nf.mul_add(turns, -hi);
        let y = std::f64::consts::TAU * ((hi - hi.round()) + lo);
        // |e^{x+iy} - 1| = e^x |1 - e^{-x-iy}|
        let w = Complex64::from_polar((-x).exp(), -y);
        x + (Complex64::new(1.0, 0.0) - w).norm().ln()
    } else {
        numerics::unit_power_defect(lambda, n).ln()
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
    fn params_validation() {
        assert!(BlockParams::new(4, 4, 2.0).is_err());
        assert!(BlockParams::new(4, 0, 2.0).is_err());
        assert!(BlockParams::new(4, 2, 1.0).is_err());
        assert!(BlockParams::new(4, 2, f64::NAN).is_err());
        let bp = BlockParams::new(6, 4, 3.0).unwrap();
        assert_eq!(bp.q(), 2);
        assert_eq!(bp.p_over_q(), 2.0);
    }

    #[test]
    fn weights_of_small_blocks() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        let w: Vec<f64> = (1..=4).map(|j| b.beta(j)).collect();
        assert_eq!(w, vec![2.0, 2.0, 0.5, 0.5]);
        assert_eq!(b.beta(5), 2.0);
        assert_eq!(b.beta(8), 0.5);

        let b = ShiftBlock::new(3, 1, 8.0).unwrap();
        let l = b.log_weights().unwrap();
        let l8 = 8f64.ln();
        assert_relative_eq!(l[0], l8, max_relative = 1e-15);
        assert_relative_eq!(l[1], -0.5 * l8, max_relative = 1e-15);
        assert_relative_eq!(l[2], -0.5 * l8, max_relative = 1e-15);
    }

    #[test]
    fn to_matrix_layout() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        let m = b.to_matrix().unwrap();
        assert_eq!(m.get(1, 0), c(2.0, 0.0));
        assert_eq!(m.get(0, 3), c(0.5, 0.0));
        assert_eq!(m.count_nonzeros(), 4);
        let m4 = m.pow(4).unwrap();
        assert!(m4.max_abs_diff(&ComplexMatrix::identity(4)).unwrap() < 1e-14);
    }

    #[test]
    fn power_norm_log_examples() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        assert_eq!(b.power_norm_log(0).unwrap(), 0.0);
        assert_relative_eq!(b.power_norm_log(2).unwrap(), 4f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(b.power_norm_log(3).unwrap(), 2f64.ln(), max_relative = 1e-14);
        assert_eq!(b.power_norm_log(4), Err(Error::PowerOutOfRange { j: 4, n: 4 }));
    }

    #[test]
    fn block_power_reduces_exponent() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        assert_eq!(b.block_power(&BigUint::from(24u32)).unwrap(), ComplexMatrix::identity(4));
        let v = b.to_matrix().unwrap();
        assert!(b.block_power(&BigUint::from(1u32)).unwrap().max_abs_diff(&v).unwrap() < 1e-15);
    }

    #[test]
    fn psi_at_one_is_geometric_sum_of_powers() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        let v = b.to_matrix().unwrap();
        let mut expect = ComplexMatrix::identity(4);
        for j in 1..4 {
            expect = expect.add(&v.pow(j).unwrap()).unwrap();
        }
        let psi = b.psi(c(1.0, 0.0)).unwrap();
        assert!(psi.max_abs_diff(&expect).unwrap() < 1e-13);
        assert_eq!(b.psi(c(0.0, 0.0)), Err(Error::PsiUndefinedAtZero));
    }

    #[test]
    fn resolvent_examples() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        assert_eq!(b.resolvent_norm(c(0.0, 1.0)).unwrap(), f64::INFINITY);
        assert_relative_eq!(b.resolvent_norm(c(0.0, 0.0)).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn s_sum_small_values() {
        let b = ShiftBlock::new(4, 2, 2.0).unwrap();
        assert_relative_eq!(b.s_sum_log(false, 1.0).unwrap(), 9f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(b.s_sum_log(true, 1.0).unwrap(), 25f64.ln(), max_relative = 1e-14);
        assert!(b.s_sum_log(false, 0.0).is_err());
    }

    #[test]
    fn bracket_degenerate_single_low_slot() {
        // q = 1: comparison collapses to alpha^p rho
        let b = ShiftBlock::new(5, 4, 1.5).unwrap();
        let br = b.s_sum_bracket(false, 0.4).unwrap();
        assert_relative_eq!(br.log_comparison, 4.0 * 1.5f64.ln() + 0.4f64.ln(), max_relative = 1e-14);
        assert!(br.holds());
        assert_eq!(b.s_sum_bracket(false, 1.0), Err(Error::RhoOutOfRange(1.0)));
        assert_eq!(b.s_sum_bracket(true, 0.0), Err(Error::RhoOutOfRange(0.0)));
    }

    #[test]
    fn weight_inequality_examples() {
        assert!(ShiftBlock::new(4, 2, 2.0).unwrap().check_weight_inequality().unwrap());
        assert!(ShiftBlock::new(7, 3, 1.5).unwrap().check_weight_inequality().unwrap());
    }

    #[test]
    fn window_closed_form_matches_running_sum() {
        let b = ShiftBlock::new(9, 4, 1.7).unwrap();
        let logs = b.log_weights().unwrap();
        for s in 0..9u128 {
            for len in 0..20u128 {
                let naive: f64 = (0..len).map(|t| logs[((s + t) % 9) as usize]).sum();
                assert!((b.window_log(s, len) - naive).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dense_guard() {
        let b = ShiftBlock::new(20_000, 10, 1.1).unwrap();
        assert!(matches!(b.to_matrix(), Err(Error::DimensionGuard { .. })));
        assert!(matches!(b.psi(c(0.5, 0.0)), Err(Error::DimensionGuard { .. })));
    }

    #[test]
    fn huge_blocks_stay_finite_on_formula_path() {
        // 30! with p = 30! - 30
        let n: u128 = (1..=30u128).product();
        let log_alpha = (2f64.ln() / (1..=29u128).product::<u128>() as f64).ln_1p();
        let b = make_block(BlockParams::from_log_alpha(n, n - 30, log_alpha).unwrap());
        assert_eq!(b.alpha(), 1.0);
        let s = b.s_sum_log(false, 0.75).unwrap();
        assert!(s.is_finite());
        let bounds = b.resolvent_log_bounds(c(0.75, 0.0));
        assert!(bounds.log_lower.is_finite() && bounds.log_upper.is_finite());
        assert!(bounds.log_lower <= bounds.log_upper);
        assert!(b.power_norm_log(n - 1).unwrap().is_finite());
    }
}

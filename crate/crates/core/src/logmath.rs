//! Log-domain helpers for sums of exponentials and geometric series.
//!
//! Weight products such as `alpha^(k!)` leave double range long before the
//! quantities built from them do, so everything upstream works with natural
//! logarithms and only exponentiates bounded ratios.

/// `ln(e^a + e^b)` without overflow. Either argument may be `-inf`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum_{j=0}^{m-1} e^(j x))` for a (possibly huge) term count `m`.
///
/// Returns `-inf` when `m == 0`.
pub fn log_geometric_sum(x: f64, m: f64) -> f64 {
    if m <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        return m.ln();
    }
    if x > 0.0 {
        // e^{(m-1)x} (1 - e^{-mx}) / (1 - e^{-x})
        (m - 1.0) * x + ln_one_minus_exp(-m * x) - ln_one_minus_exp(-x)
    } else {
        ln_one_minus_exp(m * x) - ln_one_minus_exp(x)
    }
}

/// `ln(1 - e^x)` for `x < 0`, accurate near both ends.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(1 + e^x)`.
pub fn ln_one_plus_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sum_matches_naive() {
        for &x in &[-2.0, -0.3, -1e-9, 0.0, 1e-9, 0.4, 1.7] {
            for &m in &[1.0, 2.0, 7.0, 40.0] {
                let naive: f64 = (0..m as usize).map(|j| (j as f64 * x).exp()).sum();
                let got = log_geometric_sum(x, m).exp();
                assert!((got - naive).abs() <= 1e-12 * naive, "x={x} m={m}: {got} vs {naive}");
            }
        }
    }

    #[test]
    fn geometric_sum_huge_count() {
        // converging ratio: sum -> 1/(1-e^x)
        let v = log_geometric_sum(-0.5, 1e30);
        assert!((v - (-ln_one_minus_exp(-0.5))).abs() < 1e-14);
        // diverging ratio stays finite in log domain
        let w = log_geometric_sum(0.5, 1e30);
        assert!(w.is_finite() && w > 1e29);
    }

    #[test]
    fn log_add_exp_handles_infinities() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 2.0), 2.0);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn exp_helpers() {
        for &x in &[-40.0f64, -1.0] {
            assert!((ln_one_minus_exp(x) - (1.0 - x.exp()).ln()).abs() < 1e-14);
        }
        // 1 - e^{-t} = t - t^2/2 + ... for tiny t
        assert!((ln_one_minus_exp(-1e-12) - (1e-12f64 - 5e-25).ln()).abs() < 1e-14);
        assert!((ln_one_plus_exp(800.0) - 800.0).abs() < 1e-12);
    }
}

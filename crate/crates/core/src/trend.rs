//! Tail behaviour of a finite sequence of log-magnitudes.
//!
//! A truncated profile cannot show that a supremum over infinitely many `k`
//! is finite or infinite. What it can show is how the running maximum moves
//! over the last quarter of the horizon: not at all, by geometrically
//! shrinking steps, or by steps that refuse to shrink.

use serde::Serialize;

/// Default largest step ratio still read as geometric convergence.
pub const DEFAULT_MAX_RATIO: f64 = 0.95;

/// Steps below `STEP_TOL * (1 + |x|)` count as zero.
pub const STEP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// Running maximum does not move over the tail.
    Flat,
    /// Steps shrink at least geometrically with the configured ratio.
    Converging,
    /// Every step is positive and they do not shrink geometrically.
    Growing,
    /// Any other pattern, or an infinite value.
    Irregular,
}

impl Trend {
    pub fn is_bounded(self) -> bool {
        matches!(self, Trend::Flat | Trend::Converging)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSummary {
    pub trend: Trend,
    /// Largest value of the whole sequence.
    pub max: f64,
    /// Mean step of the running maximum over the tail.
    pub slope: f64,
    /// Extrapolated limit of the running maximum; `+inf` unless bounded.
    pub limit: f64,
}

/// Number of trailing entries examined: the last quarter, at least three.
pub fn tail_len(len: usize) -> usize {
    len.div_ceil(4).max(3).min(len)
}

pub fn analyze(values: &[f64], max_ratio: f64) -> TailSummary {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let irregular = TailSummary {
        trend: Trend::Irregular,
        max,
        slope: f64::NAN,
        limit: f64::INFINITY,
    };
    if values.len() < 3 || max == f64::INFINITY || values.iter().any(|v| v.is_nan()) {
        return irregular;
    }
    let mut running = Vec::with_capacity(values.len());
    let mut m = f64::NEG_INFINITY;
    for &v in values {
        m = m.max(v);
        running.push(m);
    }
    let tail = &running[running.len() - tail_len(running.len())..];
    if tail[0] == f64::NEG_INFINITY {
        return TailSummary {
            trend: Trend::Flat,
            max,
            slope: 0.0,
            limit: max,
        };
    }
    let steps: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *tail.last().unwrap();
    let slope = steps.iter().sum::<f64>() / steps.len() as f64;
    let tol = STEP_TOL * (1.0 + last.abs());
    let active = steps.iter().take_while(|&&d| d > tol).count();
    if steps[active..].iter().any(|&d| d > tol) {
        return TailSummary { slope, ..irregular };
    }
    if active == 0 {
        return TailSummary {
            trend: Trend::Flat,
            max,
            slope,
            limit: last,
        };
    }
    let worst = steps[..active]
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    if active == steps.len() && (active < 2 || worst > max_ratio) {
        return TailSummary {
            trend: Trend::Growing,
            max,
            slope,
            limit: f64::INFINITY,
        };
    }
    if worst > max_ratio {
        return TailSummary { slope, ..irregular };
    }
    let d = steps[active - 1];
    let pending = if active == steps.len() {
        d * worst / (1.0 - worst)
    } else {
        0.0
    };
    TailSummary {
        trend: Trend::Converging,
        max,
        slope,
        limit: last + pending,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_flat() {
        let s = analyze(&[1.0; 12], DEFAULT_MAX_RATIO);
        assert_eq!(s.trend, Trend::Flat);
        assert_eq!(s.limit, 1.0);
    }

    #[test]
    fn decreasing_is_flat() {
        let v: Vec<f64> = (0..20).map(|k| -(k as f64)).collect();
        assert_eq!(analyze(&v, DEFAULT_MAX_RATIO).trend, Trend::Flat);
    }

    #[test]
    fn linear_growth() {
        let v: Vec<f64> = (0..30).map(|k| 0.1 * k as f64).collect();
        let s = analyze(&v, DEFAULT_MAX_RATIO);
        assert_eq!(s.trend, Trend::Growing);
        assert!((s.slope - 0.1).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_growth_is_not_bounded() {
        let v: Vec<f64> = (1..30).map(|k| (k as f64).ln()).collect();
        assert_eq!(analyze(&v, DEFAULT_MAX_RATIO).trend, Trend::Growing);
    }

    #[test]
    fn geometric_convergence_extrapolates() {
        let v: Vec<f64> = (0..30).map(|k| 2.0 - 0.8f64.powi(k)).collect();
        let s = analyze(&v, DEFAULT_MAX_RATIO);
        assert_eq!(s.trend, Trend::Converging);
        assert!((s.limit - 2.0).abs() < 1e-9);
    }

    #[test]
    fn convergence_to_machine_precision() {
        let v: Vec<f64> = (0..30).map(|k| 1.0 - 0.3f64.powi(k)).collect();
        let s = analyze(&v, DEFAULT_MAX_RATIO);
        assert!(s.trend.is_bounded());
        assert!((s.limit - 1.0).abs() < 1e-9);
    }

    #[test]
    fn jumps_are_irregular() {
        let v = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 4.0];
        assert_eq!(analyze(&v, DEFAULT_MAX_RATIO).trend, Trend::Irregular);
        assert_eq!(analyze(&[0.0, f64::INFINITY, 1.0], DEFAULT_MAX_RATIO).trend, Trend::Irregular);
    }

    #[test]
    fn all_minus_infinity_is_flat() {
        assert_eq!(analyze(&[f64::NEG_INFINITY; 5], DEFAULT_MAX_RATIO).trend, Trend::Flat);
    }
}

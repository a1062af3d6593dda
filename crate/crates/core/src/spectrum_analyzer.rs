//! Spectrum membership for block-diagonal operators and the annulus scan.
//!
//! `lambda` lies in the spectrum exactly when `sup_k ||(u_k - lambda)^-1||`
//! is infinite. Per-block lower and upper bounds on the log resolvent norm are
//! evaluated in closed form up to `k = 33`, and a verdict needs both a
//! magnitude and a tail trend (see [`crate::trend`]).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::block_operator::{inverse_norm_profile_log, Block, BlockFamily};
use crate::error::{Error, Result};
use crate::trend::{self, TailSummary, Trend};

/// `(sqrt(5) - 1) / 2`, the default angular step in turns.
pub const GOLDEN_TURN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// A lower bound above this proves divergence outright.
    pub divergence: f64,
    /// Upper bounds (and their extrapolated limit) must stay below this.
    pub boundedness: f64,
    /// Largest tail step ratio read as convergence.
    pub max_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            divergence: 1e6,
            boundedness: 1e4,
            max_ratio: trend::DEFAULT_MAX_RATIO,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.divergence > 1.0 && self.boundedness > 1.0) {
            return Err(Error::InvalidArgument(
                "thresholds must exceed 1".into(),
            ));
        }
        if !(self.max_ratio > 0.0 && self.max_ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "max ratio {} must lie in (0, 1)",
                self.max_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VerdictKind {
    Resolvent,
    Undetermined,
    InSpectrum,
    PointSpectrum,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::PointSpectrum => "PointSpectrum",
            VerdictKind::InSpectrum => "InSpectrum",
            VerdictKind::Resolvent => "Resolvent",
            VerdictKind::Undetermined => "Undetermined",
        }
    }

    pub fn in_spectrum(self) -> bool {
        matches!(self, VerdictKind::PointSpectrum | VerdictKind::InSpectrum)
    }
}

/// Which argument settled the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// `lambda^{n(k)} = 1` for some block.
    RootOfUnity,
    /// `|lambda| > 1`: geometric bound on the resolvent.
    OutsideDisk,
    /// Lower bound grows or exceeds the divergence threshold.
    UnboundedLower,
    /// Upper bound settles below the boundedness threshold.
    BoundedUpper,
    /// `lambda = 0`: decided by the inverse norms.
    InverseNorms,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evidence {
    /// Tail summary of the per-block log lower bounds.
    pub lower: TailSummary,
    /// Tail summary of the per-block log upper bounds.
    pub upper: TailSummary,
    /// Block index `k` of the eigenvalue, when one was found.
    pub root_block: Option<usize>,
    pub case: Case,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumVerdict {
    pub point: Complex64,
    pub kind: VerdictKind,
    pub evidence: Evidence,
}

fn empty_summary() -> TailSummary {
    TailSummary {
        trend: Trend::Irregular,
        max: f64::INFINITY,
        slope: f64::NAN,
        limit: f64::INFINITY,
    }
}

/// Classify `lambda` against the truncated family.
pub fn classify(f: &BlockFamily, lambda: Complex64, thresholds: &Thresholds) -> SpectrumVerdict {
    if let Some((k, _)) = f.indexed().find(|(_, b)| b.is_eigenvalue(lambda)) {
        return SpectrumVerdict {
            point: lambda,
            kind: VerdictKind::PointSpectrum,
            evidence: Evidence {
                lower: empty_summary(),
                upper: empty_summary(),
                root_block: Some(k),
                case: Case::RootOfUnity,
            },
        };
    }
    let (log_div, log_bnd) = (thresholds.divergence.ln(), thresholds.boundedness.ln());
    if lambda.norm() == 0.0 {
        let s = trend::analyze(&inverse_norm_profile_log(f), thresholds.max_ratio);
        let kind = if s.trend == Trend::Growing || s.max > log_div {
            VerdictKind::InSpectrum
        } else if s.trend.is_bounded() && s.limit < log_bnd {
            VerdictKind::Resolvent
        } else {
            VerdictKind::Undetermined
        };
        return SpectrumVerdict {
            point: lambda,
            kind,
            evidence: Evidence {
                lower: s,
                upper: s,
                root_block: None,
                case: Case::InverseNorms,
            },
        };
    }
    let (lower, upper): (Vec<f64>, Vec<f64>) = f
        .blocks()
        .iter()
        .map(|b| {
            let r = b.resolvent_log_bounds(lambda);
            (r.log_lower, r.log_upper)
        })
        .unzip();
    let lower = trend::analyze(&lower, thresholds.max_ratio);
    let upper = trend::analyze(&upper, thresholds.max_ratio);
    let (kind, case) = if lower.trend == Trend::Growing || lower.max > log_div {
        (VerdictKind::InSpectrum, Case::UnboundedLower)
    } else if upper.trend.is_bounded() && upper.max < log_bnd && upper.limit < log_bnd {
        let case = if lambda.norm() > 1.0 {
            Case::OutsideDisk
        } else {
            Case::BoundedUpper
        };
        (VerdictKind::Resolvent, case)
    } else {
        (VerdictKind::Undetermined, Case::Inconclusive)
    };
    SpectrumVerdict {
        point: lambda,
        kind,
        evidence: Evidence {
            lower,
            upper,
            root_block: None,
            case,
        },
    }
}

/// Controls for [`theoretical_r`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RProbe {
    /// Largest `k` used in the boundedness test.
    pub horizon: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub max_ratio: f64,
}

impl Default for RProbe {
    fn default() -> Self {
        Self {
            horizon: 30,
            tol: 1e-4,
            max_iter: 40,
            max_ratio: trend::DEFAULT_MAX_RATIO,
        }
    }
}

fn shift_blocks(f: &BlockFamily, horizon: usize) -> Result<Vec<&crate::shift_block::ShiftBlock>> {
    f.blocks()[1..horizon.min(f.k_max())]
        .iter()
        .enumerate()
        .map(|(i, b)| match b {
            Block::Shift(s) => Ok(s),
            _ => Err(Error::HypothesisViolated(format!(
                "block {} is not a weighted shift",
                i + 2
            ))),
        })
        .collect()
}

/// Check the hypotheses under which `r` describes the spectrum: `p(k) < n(k)`,
/// `n(k)` unbounded and `alpha(k) -> 1`, as far as the horizon can show.
pub fn check_family_hypotheses(f: &BlockFamily, horizon: usize) -> Result<()> {
    let blocks = shift_blocks(f, horizon)?;
    if blocks.len() < 3 {
        return Err(Error::HypothesisViolated(
            "need at least three shift blocks".into(),
        ));
    }
    if let Some(b) = blocks.iter().find(|b| b.p() >= b.n()) {
        return Err(Error::HypothesisViolated(format!(
            "p(k) < n(k) fails at n = {}",
            b.n()
        )));
    }
    let half = blocks.len() / 2;
    let early = blocks[..half].iter().map(|b| b.n()).max().unwrap_or(0);
    if blocks.last().unwrap().n() <= early {
        return Err(Error::HypothesisViolated(
            "block dimensions n(k) do not grow".into(),
        ));
    }
    let excess: Vec<f64> = blocks.iter().map(|b| b.params().alpha_minus_one()).collect();
    let tail = &excess[excess.len() - trend::tail_len(excess.len())..];
    if !(*excess.last().unwrap() < excess[0] / 2.0) || tail.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::HypothesisViolated(
            "alpha(k) does not tend to 1".into(),
        ));
    }
    Ok(())
}

/// `sup { s in [0, 1] : alpha(k)^{p(k)} s^{n(k) - p(k)} bounded }` by bisection.
pub fn theoretical_r(f: &BlockFamily, probe: &RProbe) -> Result<f64> {
    check_family_hypotheses(f, probe.horizon)?;
    let blocks = shift_blocks(f, probe.horizon)?;
    let bounded = |s: f64| {
        if s == 0.0 {
            return true;
        }
        let ln_s = s.ln();
        let seq: Vec<f64> = blocks
            .iter()
            .map(|b| b.p() as f64 * b.log_alpha() + b.q() as f64 * ln_s)
            .collect();
        trend::analyze(&seq, probe.max_ratio).trend.is_bounded()
    };
    if bounded(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..probe.max_iter {
        if hi - lo <= probe.tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if bounded(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusSample {
    pub rho: f64,
    pub kind: VerdictKind,
    /// Largest per-block log lower bound over all angles at this radius.
    pub max_log_lower: f64,
    /// Largest per-block log upper bound over all angles at this radius.
    pub max_log_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusEstimate {
    pub r_inner: f64,
    pub r_outer: f64,
    pub grid_resolution: f64,
    pub samples: Vec<RadiusSample>,
    /// Verdict at `lambda = 0`.
    pub origin: VerdictKind,
    pub warning: Option<String>,
}

/// `theta_j = 2 pi frac((j + 1) phi)`: well spread, never a low-order root.
pub fn sample_angles(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| std::f64::consts::TAU * ((j + 1) as f64 * GOLDEN_TURN).fract())
        .collect()
}

fn classify_radius(f: &BlockFamily, rho: f64, angles: &[f64], t: &Thresholds) -> RadiusSample {
    let verdicts: Vec<SpectrumVerdict> = angles
        .iter()
        .map(|&th| classify(f, Complex64::from_polar(rho, th), t))
        .collect();
    let kind = verdicts.iter().map(|v| v.kind).max().unwrap();
    RadiusSample {
        rho,
        kind,
        max_log_lower: verdicts.iter().map(|v| v.evidence.lower.max).fold(f64::NEG_INFINITY, f64::max),
        max_log_upper: verdicts.iter().map(|v| v.evidence.upper.max).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Classify `rho e^{i theta}` over the radial grid and read off the annulus.
///
/// A radius is in the band unless every angle gave `Resolvent`. The inner
/// radius is the midpoint between the smallest band radius and the largest
/// resolvent radius below it (zero if `lambda = 0` is in the spectrum); the
/// outer radius is the midpoint between the largest band radius and the next
/// resolvent radius.
pub fn annulus_scan(
    f: &BlockFamily,
    radial_grid: &[f64],
    angular_samples: usize,
    thresholds: &Thresholds,
) -> Result<AnnulusEstimate> {
    thresholds.validate()?;
    if radial_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if angular_samples == 0 {
        return Err(Error::InvalidGrid("need at least one angle".into()));
    }
    if let Some(bad) = radial_grid.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidGrid(format!("radius {bad} is not positive")));
    }
    let mut grid = radial_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let angles = sample_angles(angular_samples);
    let samples: Vec<RadiusSample> = grid
        .par_iter()
        .map(|&rho| classify_radius(f, rho, &angles, thresholds))
        .collect();
    let origin = classify(f, Complex64::new(0.0, 0.0), thresholds).kind;
    let grid_resolution = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);

    let band: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].kind != VerdictKind::Resolvent)
        .collect();
    let (first, last) = match (band.first(), band.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::NoSpectrumOnGrid),
    };
    let r_inner = if first > 0 {
        0.5 * (grid[first - 1] + grid[first])
    } else if origin.in_spectrum() {
        0.0
    } else {
        0.5 * grid[0]
    };
    let r_outer = if last + 1 < grid.len() {
        0.5 * (grid[last] + grid[last + 1])
    } else {
        grid[last]
    };

    let mut warnings = Vec::new();
    let undetermined = samples
        .iter()
        .filter(|s| s.kind == VerdictKind::Undetermined)
        .count();
    if 2 * undetermined > band.len() {
        warnings.push(format!(
            "{undetermined} of {} band radii are undetermined",
            band.len()
        ));
    }
    if band.len() != last - first + 1 {
        warnings.push("resolvent radii inside the spectral band".to_string());
    }
    Ok(AnnulusEstimate {
        r_inner,
        r_outer,
        grid_resolution,
        samples,
        origin,
        warning: (!warnings.is_empty()).then(|| warnings.join("; ")),
    })
}

/// Whether the estimated spectrum reaches the unit circle.
pub fn unit_circle_contact(e: &AnnulusEstimate) -> bool {
    (e.r_outer - 1.0).abs() <= 2.0 * e.grid_resolution
}

/// Annulus `(1 / r_outer, 1 / r_inner)` carrying the spectrum of `u^-1`.
pub fn inverse_spectrum_annulus(e: &AnnulusEstimate) -> Result<(f64, f64)> {
    if e.r_inner <= 0.0 {
        return Err(Error::NotInvertible);
    }
    Ok((1.0 / e.r_outer, 1.0 / e.r_inner))
}

/// The first `count` points `e^{i pi a / b}`, by increasing denominator `b`
/// and then numerator `a` in `[0, 2b)` coprime to `b`.
pub fn unit_roots_enumeration(count: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    let mut b: u64 = 1;
    while out.len() < count {
        for a in 0..2 * b {
            if num_integer::gcd(a, b) == 1 && out.len() < count {
                let turn = a as f64 / (2 * b) as f64;
                out.push(Complex64::from_polar(1.0, std::f64::consts::TAU * turn));
            }
        }
        b += 1;
    }
    out
}

/// Diagonal operator whose entries after `u_1 = id` enumerate the roots of
/// unity; its spectrum is the whole unit circle.
pub fn diagonal_roots_family(count: usize) -> BlockFamily {
    BlockFamily::new(
        unit_roots_enumeration(count)
            .into_iter()
            .map(Block::Scalar)
            .collect(),
    )
}

/// Evenly spaced radii `start, start + step, ...` up to `end` inclusive
/// within half a step.
pub fn radial_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || !step.is_finite() {
        return Err(Error::InvalidGrid(format!("bad grid {start}:{end}:{step}")));
    }
    if !(start > 0.0) || end < start {
        return Err(Error::InvalidGrid(format!(
            "need 0 < start <= end, got {start}:{end}"
        )));
    }
    let count = ((end - start) / step + 0.5).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::InvalidGrid(format!("{count} radii is too many")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidity_verifier::theorem_family;
    use crate::shift_block::BlockParams;

    fn verdict(f: &BlockFamily, re: f64, im: f64) -> VerdictKind {
        classify(f, Complex64::new(re, im), &Thresholds::default()).kind
    }

    #[test]
    fn half_family_reference_points() {
        let f = theorem_family(0.5, 30).unwrap();
        assert_eq!(verdict(&f, 1.2, 0.0), VerdictKind::Resolvent);
        assert_eq!(verdict(&f, 0.75, 0.0), VerdictKind::InSpectrum);
        assert_eq!(verdict(&f, 0.3, 0.0), VerdictKind::Resolvent);
        assert_eq!(verdict(&f, 0.0, 0.0), VerdictKind::Resolvent);
    }

    #[test]
    fn zero_family_is_not_invertible() {
        let f = theorem_family(0.0, 30).unwrap();
        assert_eq!(verdict(&f, 0.0, 0.0), VerdictKind::InSpectrum);
    }

    #[test]
    fn roots_are_point_spectrum() {
        let f = theorem_family(0.5, 30).unwrap();
        let z = Complex64::from_polar(1.0, std::f64::consts::TAU * 7.0 / 720.0);
        let v = classify(&f, z, &Thresholds::default());
        assert_eq!(v.kind, VerdictKind::PointSpectrum);
        assert_eq!(v.evidence.root_block, Some(6));
    }

    #[test]
    fn theoretical_r_examples() {
        let probe = RProbe::default();
        let r = theoretical_r(&theorem_family(0.5, 30).unwrap(), &probe).unwrap();
        assert!((r - 0.5).abs() < 1e-3, "{r}");
        let r = theoretical_r(&theorem_family(0.0, 30).unwrap(), &probe).unwrap();
        assert!(r.abs() < 1e-3, "{r}");
        let f = BlockFamily::from_params(30, |k| {
            let fact: u128 = (1..=k as u128).product();
            BlockParams::from_log_alpha(k as u128, 1, (1.0 / fact as f64).ln_1p())
        })
        .unwrap();
        assert_eq!(theoretical_r(&f, &probe).unwrap(), 1.0);
    }

    #[test]
    fn theoretical_r_rejects_bounded_dimensions() {
        let f = BlockFamily::from_params(12, |_| BlockParams::new(4, 2, 1.5)).unwrap();
        assert!(matches!(
            theoretical_r(&f, &RProbe::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn identity_family_has_no_spectrum_on_grid() {
        let f = BlockFamily::new(vec![Block::Identity; 9]);
        assert_eq!(verdict(&f, 0.5, 0.2), VerdictKind::Resolvent);
        assert_eq!(verdict(&f, 1.0, 0.0), VerdictKind::PointSpectrum);
        let grid = radial_grid(0.1, 1.5, 0.1).unwrap();
        assert_eq!(
            annulus_scan(&f, &grid, 2, &Thresholds::default()),
            Err(Error::NoSpectrumOnGrid)
        );
    }

    #[test]
    fn annulus_for_half() {
        let f = theorem_family(0.5, 30).unwrap();
        let grid = radial_grid(0.05, 1.5, 0.05).unwrap();
        let e = annulus_scan(&f, &grid, 1, &Thresholds::default()).unwrap();
        assert!((e.r_inner - 0.5).abs() <= 0.05, "{}", e.r_inner);
        assert!((e.r_outer - 1.0).abs() <= 0.05, "{}", e.r_outer);
        assert!(unit_circle_contact(&e));
        let (a, b) = inverse_spectrum_annulus(&e).unwrap();
        assert!((a - 1.0).abs() < 0.06 && (b - 2.0).abs() < 0.25);
    }

    #[test]
    fn inverse_annulus_examples() {
        let est = |r_inner, r_outer| AnnulusEstimate {
            r_inner,
            r_outer,
            grid_resolution: 0.05,
            samples: vec![],
            origin: VerdictKind::Resolvent,
            warning: None,
        };
        assert_eq!(inverse_spectrum_annulus(&est(0.5, 1.0)).unwrap(), (1.0, 2.0));
        assert_eq!(inverse_spectrum_annulus(&est(1.0, 1.0)).unwrap(), (1.0, 1.0));
        assert_eq!(inverse_spectrum_annulus(&est(0.25, 1.0)).unwrap(), (1.0, 4.0));
        assert_eq!(inverse_spectrum_annulus(&est(0.0, 1.0)), Err(Error::NotInvertible));
        assert!(!unit_circle_contact(&est(0.2, 0.6)));
    }

    #[test]
    fn root_enumeration_order() {
        let z = unit_roots_enumeration(8);
        let expect = [0.0, 1.0, 0.5, 1.5, 1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0];
        for (w, t) in z.iter().zip(expect) {
            assert!((w - Complex64::from_polar(1.0, std::f64::consts::PI * t)).norm() < 1e-15);
        }
    }

    #[test]
    fn grid_parsing_is_inclusive() {
        assert_eq!(radial_grid(0.05, 1.5, 0.05).unwrap().len(), 30);
        assert_eq!(radial_grid(0.1, 0.34, 0.1).unwrap().len(), 3);
        assert_eq!(radial_grid(0.1, 0.36, 0.1).unwrap().len(), 4);
        assert!(radial_grid(0.0, 1.0, 0.1).is_err());
        assert!(radial_grid(0.5, 1.0, 0.0).is_err());
    }
}

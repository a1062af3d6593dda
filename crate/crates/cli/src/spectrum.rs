use serde::Serialize;

use rigidspec_core::spectrum_analyzer::{
    self as sa, AnnulusEstimate, RProbe, RadiusSample, Thresholds, VerdictKind,
};
use rigidspec_core::{theorem_family, BlockFamily, Complex64, Error};

use crate::args::SpectrumArgs;
use crate::output::{self, float};
use crate::{status, Failure};

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FamilyInfo {
    FactorialShift { r: f64, k_max: usize },
    DiagonalRoots { blocks: usize },
}

#[derive(Debug, Serialize)]
struct AnnulusFile<'a> {
    family: FamilyInfo,
    thresholds: Thresholds,
    angular_samples: usize,
    r_inner: f64,
    r_outer: f64,
    grid_resolution: f64,
    origin: VerdictKind,
    theoretical_r: Option<f64>,
    unit_circle_contact: bool,
    inverse_annulus: Option<(f64, f64)>,
    warning: Option<&'a str>,
    samples: &'a [RadiusSample],
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::config(format!("grid '{spec}' is not start:end:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sa::radial_grid(nums[0], nums[1], nums[2])?)
}

fn build_family(a: &SpectrumArgs) -> Result<(BlockFamily, FamilyInfo), Failure> {
    if a.diagonal_roots {
        if let Some(r) = a.r.filter(|&r| r != 1.0) {
            return Err(Failure::config(format!(
                "--diagonal-roots realizes r = 1, got --r {r}"
            )));
        }
        if a.blocks == 0 {
            return Err(Failure::config("--blocks must be positive"));
        }
        return Ok((
            sa::diagonal_roots_family(a.blocks),
            FamilyInfo::DiagonalRoots { blocks: a.blocks },
        ));
    }
    let r = a
        .r
        .ok_or_else(|| Failure::config("--r is required unless --diagonal-roots is given"))?;
    if r == 1.0 {
        return Err(Failure::config("r = 1 is realized by --diagonal-roots"));
    }
    Ok((
        theorem_family(r, a.k_max)?,
        FamilyInfo::FactorialShift { r, k_max: a.k_max },
    ))
}

pub fn run(a: &SpectrumArgs) -> Result<u8, Failure> {
    let grid = parse_grid(&a.grid)?;
    let thresholds = Thresholds {
        divergence: a.divergence_threshold,
        boundedness: a.bound_threshold,
        ..Thresholds::default()
    };
    thresholds.validate()?;
    if a.angular_samples == 0 {
        return Err(Failure::config("--angular-samples must be positive"));
    }
    let (family, info) = build_family(a)?;
    let estimate: AnnulusEstimate = match sa::annulus_scan(&family, &grid, a.angular_samples, &thresholds) {
        Err(Error::NoSpectrumOnGrid) => {
            return Err(Failure::config("no grid radius meets the spectrum"));
        }
        other => other?,
    };
    let origin = sa::classify(&family, Complex64::new(0.0, 0.0), &thresholds);
    let theoretical_r = match info {
        FamilyInfo::FactorialShift { .. } => sa::theoretical_r(&family, &RProbe::default()).ok(),
        FamilyInfo::DiagonalRoots { .. } => None,
    };
    let file = AnnulusFile {
        family: info,
        thresholds,
        angular_samples: a.angular_samples,
        r_inner: estimate.r_inner,
        r_outer: estimate.r_outer,
        grid_resolution: estimate.grid_resolution,
        origin: estimate.origin,
        theoretical_r,
        unit_circle_contact: sa::unit_circle_contact(&estimate),
        inverse_annulus: sa::inverse_spectrum_annulus(&estimate).ok(),
        warning: estimate.warning.as_deref(),
        samples: &estimate.samples,
    };
    output::ensure_dir(&a.out_dir)?;
    output::write_json(&a.out_dir.join("annulus.json"), &file)?;

    let mut csv = String::from("rho,log_resolvent_sup,verdict\n");
    csv.push_str(&format!(
        "{},{},{}\n",
        float(0.0),
        float(origin.evidence.lower.max),
        origin.kind.as_str()
    ));
    for s in &estimate.samples {
        csv.push_str(&format!("{},{},{}\n", float(s.rho), float(s.max_log_lower), s.kind.as_str()));
    }
    std::fs::write(a.out_dir.join("profile.csv"), csv)?;

    println!("spectral annulus ~ [{:.4}, {:.4}]", estimate.r_inner, estimate.r_outer);
    println!("lambda = 0: {}", estimate.origin.as_str());
    if let Some(w) = &estimate.warning {
        println!("warning: {w}");
    }
    Ok(status::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
        assert!(parse_grid("0.1:0.3").is_err());
        assert!(parse_grid("a:b:c").is_err());
        assert_eq!(parse_grid("0.5:0.1:0.1").unwrap_err().status, status::CONFIG_ERROR);
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{choi_rafi_estimates, measured_twist_ratio};
use crate::error::{FnsError, Result};
use crate::hyp::BranchThresholds;
use crate::length::{apply_twist, holonomy_build, rho_of, TwistVector};
use crate::surface::{build_family, twisted_dual, SurfaceFamily};

/// Numerical constants the bounds depend on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    /// Upper bound `M` on decomposition lengths.
    pub m_bound: f64,
    pub eps0: f64,
    pub eps1: f64,
    /// Smallest measured `sin θ` between a decomposition curve and its dual.
    pub rho_floor: f64,
    /// Constant of the collar decomposition residual, per crossing.
    pub c_cr: f64,
    /// Defect `D` of the twist lower bound.
    pub d_defect: f64,
    /// Membership constant `N`.
    pub n_member: f64,
    pub thresholds: BranchThresholds<f64>,
    pub calibration: Option<Calibration>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub grid_hash: String,
    pub points: usize,
    pub margin: f64,
    /// Largest defect needed for soundness, before the margin.
    pub d_required: f64,
    /// Largest residual per crossing, before the margin.
    pub residual_per_crossing: f64,
}

impl Default for ConstantsProfile {
    fn default() -> Self {
        ConstantsProfile {
            m_bound: 2.0,
            eps0: 0.2,
            eps1: 0.1,
            rho_floor: 0.5,
            c_cr: 4.0,
            d_defect: 5.0,
            n_member: 1.05,
            thresholds: BranchThresholds::default(),
            calibration: None,
        }
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ConstantsProfile {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.m_bound, self.eps0, self.eps1, self.rho_floor, self.n_member];
        if pos.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !(self.c_cr >= 0.0) || !(self.d_defect >= 0.0) {
            return Err(FnsError::Config("profile constants must be positive and finite".into()));
        }
        if !(self.eps1 < self.eps0 && self.eps0 < 1.0) {
            return Err(FnsError::Config(format!("need eps1 < eps0 < 1, got {} and {}", self.eps1, self.eps0)));
        }
        if self.rho_floor > 1.0 {
            return Err(FnsError::Config("rho_floor above 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, lowercase hex.
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("profile serializes"))
    }
}

/// Twist magnitudes applied to the law-indexed curves `indices`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationGrid {
    pub indices: Vec<usize>,
    pub twists: Vec<f64>,
    /// Twisted duals `|k| <= twist_depth` enter the residual constant.
    pub twist_depth: u32,
}

impl CalibrationGrid {
    pub fn points(&self) -> usize {
        self.indices.len() * self.twists.len()
    }
}

struct PointStats {
    d_required: Option<f64>,
    residual: Option<f64>,
    rho: f64,
}

/// Fits `D`, `C_cr` and `rho_floor` on a grid of single twists, keeping the other constants of `base`.
///
/// Each index `n` uses the depth-`n+1` member of the family and twists its `n`-th law-indexed curve.
pub fn calibrate_constants(
    family: &SurfaceFamily,
    grid: &CalibrationGrid,
    base: &ConstantsProfile,
) -> Result<ConstantsProfile> {
    base.validate()?;
    if grid.points() < 20 {
        return Err(FnsError::Refused(format!("calibration grid has {} points, need at least 20", grid.points())));
    }
    if grid.twists.iter().any(|t| !t.is_finite()) {
        return Err(FnsError::Config("grid twists must be finite".into()));
    }
    let grid_hash = sha256_hex(&serde_json::to_vec(&(family, grid)).expect("grid serializes"));
    let stats: Vec<PointStats> = grid
        .indices
        .par_iter()
        .map(|&n| -> Result<Vec<PointStats>> {
            let (g, x) = build_family(family, n + 1)?;
            let i = g
                .curves
                .iter()
                .position(|c| c.law_index == Some(n) && c.is_interior())
                .ok_or_else(|| FnsError::Config(format!("law index {n} has no interior curve")))?;
            let l = x.length(i);
            let short = l.to_float() <= base.eps1;
            let rho0 = rho_of(&holonomy_build(&g, &x)?, i)?;
            grid.twists
                .iter()
                .map(|&t| {
                    // the fixed dual spirals on y, so the floor is read off the untwisted base
                    let rho = rho0;
                    if !short {
                        return Ok(PointStats { d_required: None, residual: None, rho });
                    }
                    let m = measured_twist_ratio(&g, &x, i, t)?;
                    let two_l = 2.0 * l.ln().abs();
                    let e = (2.0 * m).exp();
                    let d_req = ((two_l + t.abs() - e * two_l) / (1.0 + e)).max(0.0);
                    let y = apply_twist(&g, &x, &TwistVector::single(i, t))?;
                    let mut res: f64 = 0.0;
                    for k in -(grid.twist_depth as i64)..=grid.twist_depth as i64 {
                        let gamma = twisted_dual(&g, i, k)?;
                        let cr = choi_rafi_estimates(&g, &y, i, &gamma, base)?;
                        res = res.max(cr.residual / f64::from(cr.intersection));
                    }
                    Ok(PointStats { d_required: Some(d_req), residual: Some(res), rho })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let margin = 1.05;
    let d_required = stats.iter().filter_map(|s| s.d_required).fold(0.0, f64::max);
    let residual = stats.iter().filter_map(|s| s.residual).fold(0.0, f64::max);
    let rho_floor = stats.iter().map(|s| s.rho).fold(1.0, f64::min);
    Ok(ConstantsProfile {
        m_bound: family.m_bound,
        rho_floor,
        c_cr: residual * margin,
        d_defect: d_required * margin,
        calibration: Some(Calibration {
            grid_hash,
            points: grid.points(),
            margin,
            d_required,
            residual_per_crossing: residual,
        }),
        ..base.clone()
    })
}

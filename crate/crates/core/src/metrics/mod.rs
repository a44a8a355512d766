//! Distance estimates and bounds between marked structures.

mod membership;
mod profile;

pub use membership::{ls_membership, CertificateConfig, DeformationLaw, GrowthCertificate, Membership, Verdict};
pub use profile::{calibrate_constants, Calibration, CalibrationGrid, ConstantsProfile};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};
use crate::hyp;
use crate::length::{apply_twist, dual_length_at, geodesic_lengths, holonomy_build, TwistVector};
use crate::surface::{enumerate_curves, CurveClass, CurveKind, FnPoint, MarkedPair, PantsGraph};
use crate::Ext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

/// A distance bound; `constants` is the hash of the profile it depends on, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub kind: BoundKind,
    pub source: String,
    pub constants: Option<String>,
}

impl Bound {
    fn new(value: f64, kind: BoundKind, source: &str) -> Self {
        Bound { value, kind, source: source.into(), constants: None }
    }

    fn with_profile(mut self, cp: &ConstantsProfile) -> Self {
        self.constants = Some(cp.hash());
        self
    }
}

/// Length of an interior curve; a boundary leg is a domain error.
pub(crate) fn interior_length(g: &PantsGraph, x: &FnPoint, i: usize) -> Result<Ext> {
    match g.curves.get(i) {
        None => Err(FnsError::Range(format!("curve {i} is not in this truncation"))),
        Some(c) if !c.is_interior() => Err(FnsError::Domain(format!("{} is a boundary leg", c.label))),
        Some(_) => Ok(x.length(i)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DlsEstimate {
    pub bound: Bound,
    /// First curve in enumeration order attaining the maximum; `None` when it is 0.
    pub witness: Option<CurveClass>,
    pub family_size: usize,
}

/// `½ max |ln(l_X(γ)/l_Y(γ))|` over the pants curves and twisted duals `|k| <= twist_depth`
/// of the depth-`depth` truncation.
pub fn dls_estimate(pair: &MarkedPair, twist_depth: u32, depth: usize) -> Result<DlsEstimate> {
    let p = if depth == pair.graph.depth() { pair.clone() } else { pair.truncate(depth)? };
    let family = enumerate_curves(&p.graph, twist_depth);
    if family.is_empty() {
        return Err(FnsError::Degenerate("truncation has no interior curves".into()));
    }
    let hx = holonomy_build(&p.graph, &p.base)?;
    let hy = holonomy_build(&p.graph, &p.target)?;
    let (lx, ly) = rayon::join(|| geodesic_lengths(&hx, &family), || geodesic_lengths(&hy, &family));
    let (lx, ly) = (lx?, ly?);
    let mut best = 0.0;
    let mut witness = None;
    for (c, (a, b)) in family.iter().zip(lx.iter().zip(&ly)) {
        let r = (a.ln() - b.ln()).abs();
        if r > best {
            best = r;
            witness = Some(*c);
        }
    }
    Ok(DlsEstimate {
        bound: Bound::new(best / 2.0, BoundKind::Lower, "length-spectrum-sup"),
        witness,
        family_size: family.len(),
    })
}

/// `½ ln(l_{X_t}(β_i)/l_X(β_i))` for a single twist `t` on `C_i`.
pub fn measured_twist_ratio(g: &PantsGraph, x: &FnPoint, i: usize, t: f64) -> Result<f64> {
    interior_length(g, x, i)?;
    let tau = x.twist(i);
    let a = dual_length_at(g, x, i, tau + t)?;
    let b = dual_length_at(g, x, i, tau)?;
    Ok((a.ln() - b.ln()) / 2.0)
}

/// `|t| / (4 w(l_i))`: the collar inequality `l(γ) >= 2 i(γ, C_i) w` bounds every ratio.
pub fn dls_twist_upper(g: &PantsGraph, x: &FnPoint, i: usize, t: f64) -> Result<Bound> {
    let l = interior_length(g, x, i)?;
    if !t.is_finite() {
        return Err(FnsError::Domain(format!("twist {t}")));
    }
    let w = hyp::collar_half_width(l)?;
    let v = if t == 0.0 { 0.0 } else { (Ext::from_float(t.abs()) / w.scale_pow2(2)).to_float() };
    Ok(Bound::new(v, BoundKind::Upper, "twist-collar-upper"))
}

/// `½ ln((2L + |t| - D)/(2L + D))` with `L = |ln l_i|`, clamped at 0.
pub fn dls_twist_lower(g: &PantsGraph, x: &FnPoint, i: usize, t: f64, cp: &ConstantsProfile) -> Result<Bound> {
    let l = interior_length(g, x, i)?;
    if l.to_float() > cp.eps1 {
        return Err(FnsError::Hypothesis(format!(
            "length {} exceeds eps1 = {}",
            l.to_float(),
            cp.eps1
        )));
    }
    let two_l = 2.0 * l.ln().abs();
    let num = two_l + t.abs() - cp.d_defect;
    let v = if num <= 0.0 { 0.0 } else { (0.5 * (num / (two_l + cp.d_defect)).ln()).max(0.0) };
    Ok(Bound::new(v, BoundKind::Lower, "twist-defect-lower").with_profile(cp))
}

fn check_rho(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(FnsError::Domain(format!("angle sine {rho} outside (0, 1]")));
    }
    Ok(rho)
}

fn half_log_h_ratio(ln_k: f64, t: f64, rho: f64) -> Result<f64> {
    let top = hyp::quad_modulus_h(Ext::from_ln(ln_k + t.abs()))?;
    let bottom = hyp::quad_modulus_h(Ext::from_float(hyp::angle_modulus_argument(rho)?))?;
    Ok(0.5 * (top / bottom).ln())
}

/// `½ ln sup_i h(K_i e^{|t_i|}) / h((1+s_i)/(1-s_i))`, `s_i = sqrt(1 - ρ_i^2)`, clamped at 0.
///
/// `rho` lists `(curve, ρ_i)`; every twisted curve needs an entry.
pub fn dqc_lower_multitwist(t: &TwistVector, rho: &[(usize, f64)]) -> Result<Bound> {
    let mut best: f64 = 0.0;
    for &(i, ti) in t.entries() {
        let r = rho
            .iter()
            .find(|e| e.0 == i)
            .ok_or_else(|| FnsError::Domain(format!("no angle for curve {i}")))?;
        let r = check_rho(r.1)?;
        best = best.max(half_log_h_ratio(hyp::k_constant(r)?.ln(), ti, r)?);
    }
    Ok(Bound::new(best, BoundKind::Lower, "qc-multitwist"))
}

/// `(1-s)^2/(1+s)^2`: a lower bound for `K(ρ')` over all `ρ' >= ρ`.
pub fn uniform_constant(rho: f64) -> Result<f64> {
    let r = check_rho(rho)?;
    let s = ((1.0 - r) * (1.0 + r)).sqrt();
    Ok(((1.0 - s) / (1.0 + s)).powi(2))
}

/// `(1-s)^2/(1+s)`, the uniform constant with a single power in the denominator.
/// It exceeds `K(ρ)` for every `ρ < 1`, so it is reported but never used.
pub fn single_power_uniform_constant(rho: f64) -> Result<f64> {
    let r = check_rho(rho)?;
    let s = ((1.0 - r) * (1.0 + r)).sqrt();
    Ok((1.0 - s).powi(2) / (1.0 + s))
}

/// Whether the single-power constant would exceed `K(ρ)`.
pub fn single_power_exceeds_k(rho: f64) -> Result<bool> {
    Ok(single_power_uniform_constant(rho)? > hyp::k_constant(check_rho(rho)?)?)
}

/// Uniform-angle variant: every `ρ_i >= rho`, one constant for all curves.
pub fn dqc_lower_uniform(t: &TwistVector, rho: f64) -> Result<Bound> {
    let c = uniform_constant(rho)?;
    let k = hyp::k_constant(rho)?;
    if c > k {
        return Err(FnsError::Internal(format!("uniform constant {c} exceeds K = {k}")));
    }
    let ln_c = c.ln();
    let best = t
        .entries()
        .iter()
        .map(|&(_, ti)| half_log_h_ratio(ln_c, ti, rho))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Bound::new(best, BoundKind::Lower, "qc-uniform-angle"))
}

/// Annulus / outside / twist decomposition of `l(γ)` for a curve crossing a short `C_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiRafi {
    pub intersection: u8,
    /// `[2 ln(ε0/l) + l |tw|] i(γ, C_i)`.
    pub annulus: f64,
    /// Length outside the collar, from the zero-twist position.
    pub outside: f64,
    /// Normalized twist proxy `τ/l + k`.
    pub twist: f64,
    pub exact: f64,
    pub residual: f64,
}

pub fn choi_rafi_estimates(
    g: &PantsGraph,
    x: &FnPoint,
    i: usize,
    gamma: &CurveClass,
    cp: &ConstantsProfile,
) -> Result<ChoiRafi> {
    let l = interior_length(g, x, i)?;
    let k = match gamma.kind {
        CurveKind::TwistedDual { i: j, k } if j == i => k,
        _ => return Err(FnsError::Hypothesis(format!("{gamma:?} does not cross curve {i}"))),
    };
    if l.to_float() > cp.eps1 {
        return Err(FnsError::Hypothesis(format!("length {} exceeds eps1 = {}", l.to_float(), cp.eps1)));
    }
    let n = f64::from(gamma.intersection(i));
    let lf = l.to_float();
    let shifted = x.twist(i) + k as f64 * lf;
    let exact = dual_length_at(g, x, i, shifted)?.to_float();
    let zero = dual_length_at(g, x, i, 0.0)?.to_float();
    let collar = 2.0 * (cp.eps0.ln() - l.ln());
    let annulus = (collar + shifted.abs()) * n;
    let outside = zero - collar * n;
    Ok(ChoiRafi {
        intersection: gamma.intersection(i),
        annulus,
        outside,
        twist: x.twist(i) / lf + k as f64,
        exact,
        residual: (exact - annulus - outside).abs(),
    })
}

/// Measured `sin θ` per curve of `t`, for feeding `dqc_lower_multitwist`.
pub fn measured_angles(g: &PantsGraph, x: &FnPoint, t: &TwistVector) -> Result<Vec<(usize, f64)>> {
    let h = holonomy_build(g, x)?;
    t.entries()
        .par_iter()
        .map(|&(i, _)| Ok((i, crate::length::rho_of(&h, i)?)))
        .collect()
}

/// Exact `½ |ln|` ratio between `X` and `X_t` on the dual of `C_i`, with the upper and,
/// when the hypothesis holds, the lower twist bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistComparison {
    pub curve: usize,
    pub t: f64,
    pub lower: Option<f64>,
    pub measured: f64,
    pub upper: f64,
}

pub fn twist_comparison(
    g: &PantsGraph,
    x: &FnPoint,
    i: usize,
    t: f64,
    cp: &ConstantsProfile,
) -> Result<TwistComparison> {
    let lower = match dls_twist_lower(g, x, i, t, cp) {
        Ok(b) => Some(b.value),
        Err(FnsError::Hypothesis(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(TwistComparison {
        curve: i,
        t,
        lower,
        measured: measured_twist_ratio(g, x, i, t)?,
        upper: dls_twist_upper(g, x, i, t)?.value,
    })
}

/// Pair `(X, X_t)` for the twist vector `t`.
pub fn twisted_pair(g: &PantsGraph, x: &FnPoint, t: &TwistVector) -> Result<MarkedPair> {
    MarkedPair::new(g.clone(), x.clone(), apply_twist(g, x, t)?)
}


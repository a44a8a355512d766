use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};
use crate::surface::{fn_difference, FnPoint, LengthLaw, MarkedPair, PantsGraph, TwistLaw};
use crate::Ext;

/// Law-level description of a target `X` relative to its base `R`, indexed like the length law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationLaw {
    pub length_law: LengthLaw,
    /// `τ_X - τ_R` on the `n`-th law-indexed curve.
    pub twist_diff: TwistLaw,
    /// `ln(l_X / l_R)` on every law-indexed curve.
    pub log_length_ratio: f64,
}

impl DeformationLaw {
    pub fn twist_only(length_law: LengthLaw, twist_diff: TwistLaw) -> Self {
        DeformationLaw { length_law, twist_diff, log_length_ratio: 0.0 }
    }

    /// Applies the law to every interior law-indexed curve of `(g, r)`.
    pub fn apply(&self, g: &PantsGraph, r: &FnPoint) -> Result<FnPoint> {
        let mut x = r.clone();
        let scale = Ext::from_ln(self.log_length_ratio);
        for (i, c) in g.curves.iter().enumerate() {
            if let (Some(n), true) = (c.law_index, c.is_interior()) {
                x.coords[i].twist += self.twist_diff.value(n, &self.length_law)?;
                x.coords[i].length = x.coords[i].length * scale;
            }
        }
        Ok(x)
    }

    /// `ln` of the membership ratio at law index `n`, in the log domain.
    fn ln_ratio(&self, n: usize) -> Result<f64> {
        let tw = self.twist_diff.ln_abs(n, &self.length_law)? - self.length_law.abs_ln(n)?.max(1.0).ln();
        Ok(tw.max(self.log_length_ratio.abs().ln()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    /// Ratio above which every `N` of interest is exceeded.
    pub cap: f64,
    /// Largest law index probed.
    pub max_index: u64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig { cap: 1e6, max_index: 1 << 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inside,
    Outside,
    UndeterminedAtDepth,
}

/// Probes `(law index, ln ratio)` at `depth * 2^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub probes: Vec<(u64, f64)>,
    pub cap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub verdict: Verdict,
    pub n_const: f64,
    /// First violating curve of the truncation.
    pub witness: Option<usize>,
    /// Largest of `|ln(l_X/l_R)|` and `|Δτ| / max(|ln l_R|, 1)` over the truncation.
    pub worst_ratio: f64,
    pub certificate: Option<GrowthCertificate>,
}

fn certificate(law: &DeformationLaw, depth: usize, cfg: &CertificateConfig) -> Option<GrowthCertificate> {
    let mut probes = Vec::new();
    let mut n = depth.max(1) as u64;
    while n <= cfg.max_index {
        probes.push((n, law.ln_ratio(n as usize).ok()?));
        n *= 2;
    }
    let last = probes.last()?.1;
    let tail = &probes[probes.len().saturating_sub(3)..];
    let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
    (tail.len() >= 2 && increasing && last > cfg.cap.ln()).then_some(GrowthCertificate { probes, cap: cfg.cap })
}

/// Length and twist test on the truncation; `outside` additionally needs a growth certificate from `law`.
pub fn ls_membership(
    pair: &MarkedPair,
    n_const: f64,
    law: Option<&DeformationLaw>,
    cfg: &CertificateConfig,
) -> Result<Membership> {
    if !(n_const > 0.0 && n_const.is_finite()) {
        return Err(FnsError::Domain(format!("membership constant {n_const}")));
    }
    let diff = fn_difference(pair);
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for c in &diff.components {
        let scale = pair.base.length(c.curve).ln().abs().max(1.0);
        let r = c.log_length_ratio.abs().max(c.twist_diff.abs() / scale);
        worst = worst.max(r);
        if witness.is_none() && (c.log_length_ratio.abs() >= n_const || c.twist_diff.abs() >= n_const * scale) {
            witness = Some(c.curve);
        }
    }
    let (verdict, certificate) = match witness {
        None => (Verdict::Inside, None),
        Some(_) => match law.and_then(|l| certificate(l, pair.graph.depth(), cfg)) {
            Some(c) => (Verdict::Outside, Some(c)),
            None => (Verdict::UndeterminedAtDepth, None),
        },
    };
    Ok(Membership { verdict, n_const, witness, worst_ratio: worst, certificate })
}

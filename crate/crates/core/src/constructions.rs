//! Explicit deformations of a base surface: twist sequences, cumulative
//! multi-twists, the length-matching step and the connecting path.

use num_traits::Num;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};
use crate::hyp::collar_half_width;
use crate::length::{apply_twist, TwistVector};
use crate::metrics::{
    dls_estimate, dls_twist_upper, dqc_lower_multitwist, ls_membership, measured_angles, Bound, BoundKind,
    CertificateConfig, ConstantsProfile, DeformationLaw, Membership, Verdict,
};
use crate::surface::{FamilyKind, FnPoint, LengthLaw, MarkedPair, PantsGraph, SurfaceFamily, TwistLaw};
use crate::Ext;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceKind {
    /// Single twist `ln|ln ε_n|` on the `n`-th curve.
    PropInv,
    /// Twists `ln|ln ε_i|` on every selected index.
    BoundaryPoint,
    /// Twists `N |ln ε_i|` on every index.
    Nondense { n_const: f64 },
    /// `Nondense` with `N = 1/k`.
    Zk { k: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    All,
    /// Subsequence with `x_{n_j} >= j` and consecutive `x` at least 1 apart, `x = ln|ln ε|`.
    UnitSpacing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    /// First law index used.
    pub first: usize,
    pub selector: Selector,
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind) -> Self {
        let selector = match kind {
            SequenceKind::BoundaryPoint => Selector::UnitSpacing,
            _ => Selector::All,
        };
        SequenceSpec { kind, first: 1, selector }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SequenceKind::Nondense { n_const } if !(n_const > 0.0 && n_const.is_finite()) => {
                Err(FnsError::Config(format!("nondense constant {n_const} must be positive")))
            }
            SequenceKind::Zk { k: 0 } => Err(FnsError::Config("zk needs k >= 1".into())),
            _ if self.first == 0 => Err(FnsError::Config("law indices start at 1".into())),
            _ => Ok(()),
        }
    }

    /// `N` of the nondense kinds.
    pub fn n_const(&self) -> Option<f64> {
        match self.kind {
            SequenceKind::Nondense { n_const } => Some(n_const),
            SequenceKind::Zk { k } => Some(1.0 / f64::from(k)),
            _ => None,
        }
    }

    /// Law describing the target relative to the base, when the kind has one.
    pub fn deformation_law(&self, law: &LengthLaw) -> Option<DeformationLaw> {
        self.n_const()
            .map(|n| DeformationLaw::twist_only(law.clone(), TwistLaw::LogScaled { factor: n }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub upper_bounded: bool,
    pub short_interior_curves: bool,
    pub lower_bounded: bool,
    pub shiga: bool,
    /// Supremum of all lengths, `None` if unbounded.
    pub sup_length: Option<f64>,
    /// Positive infimum of interior lengths, if any.
    pub inf_interior: Option<f64>,
}

/// Reads the basepoint properties off the family's laws; the truncation only decides custom tables.
pub fn classify_basepoint(family: &SurfaceFamily, depth: usize) -> Result<Classification> {
    family.length_law.validate()?;
    let (law_sup, law_inf, to_zero) = match &family.kind {
        FamilyKind::CustomTable { graph, point } => {
            let n = depth.clamp(1, graph.depth().max(1));
            let (g, x) = crate::surface::truncate(graph, point, n)?;
            let all: Vec<f64> = x.coords.iter().map(|c| c.length.to_float()).collect();
            let inner: Vec<f64> = g.interior_ids().into_iter().map(|i| x.length(i).to_float()).collect();
            let sup = all.iter().copied().fold(0.0, f64::max);
            let inf = inner.iter().copied().fold(f64::INFINITY, f64::min);
            (Some(sup), (inf.is_finite() && inf > 0.0).then_some(inf), false)
        }
        FamilyKind::Flute => (family.length_law.sup(), family.length_law.inf_positive(), family.length_law.tends_to_zero()),
        FamilyKind::TorusChain { frame_length } => (
            family.length_law.sup().map(|s| s.max(*frame_length)),
            family.length_law.inf_positive().map(|s| s.min(*frame_length)),
            family.length_law.tends_to_zero(),
        ),
    };
    let upper_bounded = law_sup.is_some_and(|s| s <= family.m_bound);
    Ok(Classification {
        upper_bounded,
        short_interior_curves: to_zero,
        lower_bounded: law_inf.is_some(),
        shiga: upper_bounded && law_inf.is_some(),
        sup_length: law_sup,
        inf_interior: law_inf,
    })
}

/// Curve id of the interior curve with law index `n`.
pub fn law_curve(g: &PantsGraph, n: usize) -> Result<usize> {
    g.curves
        .iter()
        .position(|c| c.law_index == Some(n) && c.is_interior())
        .ok_or_else(|| FnsError::Range(format!("law index {n} has no interior curve in this truncation")))
}

fn interior_law_indices(g: &PantsGraph) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = g
        .curves
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.law_index.filter(|_| c.is_interior()).map(|n| (n, i)))
        .collect();
    v.sort_unstable();
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceMember {
    pub point: FnPoint,
    pub curve: usize,
    pub twist: f64,
    pub rho: f64,
    pub dls_upper: Bound,
    pub dqc_lower: Bound,
}

/// `X_n`: twist by `ln|ln ε_n|` on the law-indexed curve `n`.
pub fn diverging_sequence(g: &PantsGraph, x: &FnPoint, n: usize) -> Result<SequenceMember> {
    let i = law_curve(g, n)?;
    let ln_abs = x.length(i).ln().abs();
    if !(ln_abs > 1.0) {
        return Err(FnsError::Hypothesis(format!("curve {n} is not short: |ln l| = {ln_abs}")));
    }
    let t = ln_abs.ln();
    let tv = TwistVector::single(i, t);
    let rho = measured_angles(g, x, &tv)?;
    Ok(SequenceMember {
        point: apply_twist(g, x, &tv)?,
        curve: i,
        twist: t,
        rho: rho[0].1,
        dls_upper: dls_twist_upper(g, x, i, t)?,
        dqc_lower: dqc_lower_multitwist(&tv, &rho)?,
    })
}

/// `Σx / Σy` and `Σ(x/y)` for positive tuples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRatio<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: PartialOrd> SumRatio<T> {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

pub fn sum_ratio_lemma<T: Num + PartialOrd + Clone>(xs: &[T], ys: &[T]) -> Result<SumRatio<T>> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(FnsError::Domain(format!("tuples of length {} and {}", xs.len(), ys.len())));
    }
    let zero = T::zero();
    if xs.iter().chain(ys).any(|v| !(*v > zero)) {
        return Err(FnsError::Domain("entries must be positive".into()));
    }
    let sx = xs.iter().cloned().fold(T::zero(), |a, b| a + b);
    let sy = ys.iter().cloned().fold(T::zero(), |a, b| a + b);
    let rhs = xs.iter().zip(ys).fold(T::zero(), |a, (x, y)| a + x.clone() / y.clone());
    Ok(SumRatio { lhs: sx / sy, rhs })
}

/// Largest law index scanned by the spacing selector.
pub const SELECTOR_CAP: usize = 1 << 20;

struct Scan {
    sel: Selector,
    out: Vec<(usize, f64)>,
}

impl Scan {
    fn offer(&mut self, n: usize, x: f64) -> bool {
        let keep = match (self.sel, self.out.last()) {
            (Selector::All, _) => true,
            (Selector::UnitSpacing, None) => x >= 1.0,
            (Selector::UnitSpacing, Some(&(_, prev))) => x >= (self.out.len() as f64 + 1.0).max(prev + 1.0),
        };
        if keep {
            self.out.push((n, x));
        }
        keep
    }
}

/// Indices `first..=last` and `x_n = ln|ln ε_n|` picked by `sel`.
pub fn select_indices(law: &LengthLaw, first: usize, last: usize, sel: Selector) -> Result<Vec<(usize, f64)>> {
    let mut scan = Scan { sel, out: Vec::new() };
    for n in first.max(1)..=last {
        scan.offer(n, law.ln_abs_ln(n)?);
    }
    Ok(scan.out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    /// Selected `(law index, x)` over the scanned range.
    pub selected: Vec<(usize, f64)>,
    /// `tails[j] = Σ_{j' > j} x e^{-x}` over the scanned selection.
    pub tails: Vec<Ext>,
    /// `∫_{x_1 - 1}^∞ x e^{-x} dx = x_1 e^{1 - x_1}`.
    pub integral_bound: f64,
    /// Bound on the terms past the scan, `(x_last + 1) e^{-x_last}`.
    pub remainder_bound: Ext,
    /// `Σt / Σ2w` against `Σ t/(2w)` over the twisted curves.
    pub ratio: SumRatio<f64>,
}

impl TailReport {
    pub fn total(&self) -> Ext {
        self.tails.first().copied().unwrap_or(Ext::zero()) + self.term(0)
    }

    fn term(&self, j: usize) -> Ext {
        self.selected.get(j).map_or(Ext::zero(), |&(_, x)| Ext::from_ln(x.ln() - x))
    }

    /// `Σ x e^{-x}` over selected indices beyond `depth`.
    pub fn beyond(&self, depth: usize) -> Ext {
        match self.selected.iter().position(|&(n, _)| n > depth) {
            Some(0) => self.total(),
            Some(j) => self.tails[j - 1],
            None => Ext::zero(),
        }
    }
}

fn tail_report(law: &LengthLaw, spec: &SequenceSpec, twisted: &[(f64, f64)]) -> Result<TailReport> {
    if !law.tends_to_zero() {
        return Err(FnsError::Config(format!(
            "length law {law:?} does not tend to 0, so no spaced subsequence exists"
        )));
    }
    // scan until terms are negligible against the first one, or the cap
    let mut scan = Scan { sel: spec.selector, out: Vec::new() };
    for n in spec.first.max(1)..=SELECTOR_CAP {
        let x = law.ln_abs_ln(n)?;
        if scan.offer(n, x) && x - x.ln() > scan.out[0].1 - scan.out[0].1.ln() + 60.0 {
            break;
        }
    }
    let selected = scan.out;
    let Some(&(_, x1)) = selected.first() else {
        return Err(FnsError::Config("selector found no index with ln|ln ε| >= 1".into()));
    };
    if spec.selector == Selector::All {
        let spaced = selected.windows(2).all(|w| w[1].1 - w[0].1 >= 1.0);
        if !(x1 >= 1.0 && spaced) {
            return Err(FnsError::Config(
                "raw sequence is not unit-spaced in ln|ln ε|; the tail sum need not converge, use the spacing selector"
                    .into(),
            ));
        }
    }
    let mut tails = vec![Ext::zero(); selected.len()];
    for j in (0..selected.len().saturating_sub(1)).rev() {
        let (_, x) = selected[j + 1];
        tails[j] = tails[j + 1] + Ext::from_ln(x.ln() - x);
    }
    let xl = selected.last().map_or(x1, |s| s.1);
    let (ts, ws): (Vec<f64>, Vec<f64>) = twisted.iter().copied().unzip();
    let ratio = sum_ratio_lemma(&ts, &ws)?;
    if ratio.lhs > ratio.rhs * (1.0 + 1e-12) {
        return Err(FnsError::Internal(format!("sum-ratio inequality failed: {ratio:?}")));
    }
    Ok(TailReport {
        selected,
        tails,
        integral_bound: x1 * (1.0 - x1).exp(),
        remainder_bound: Ext::from_ln((xl + 1.0).ln() - xl),
        ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulativePoint {
    pub point: FnPoint,
    pub twists: TwistVector,
    /// Law indices that received a twist.
    pub indices: Vec<usize>,
    /// `max_i |t_i| / (4 w_i)` over the twisted curves.
    pub dls_upper: Bound,
    /// `min_i 2 w_i / |ln ε_i|` over the twisted curves.
    pub collar_c: f64,
    pub tail: Option<TailReport>,
}

/// Multi-twist on the depth-`depth` member of `family` following `spec`.
pub fn cumulative_point(family: &SurfaceFamily, spec: &SequenceSpec, depth: usize) -> Result<CumulativePoint> {
    spec.validate()?;
    let (g, x) = crate::surface::build_family(family, depth)?;
    let law = &family.length_law;
    let interior = interior_law_indices(&g);
    let last = interior.last().map(|e| e.0).unwrap_or(0);
    let chosen: Vec<(usize, f64)> = match spec.kind {
        SequenceKind::PropInv => {
            return Err(FnsError::Config("prop-inv is a single twist; use diverging_sequence".into()));
        }
        SequenceKind::BoundaryPoint => select_indices(law, spec.first, last, spec.selector)?,
        SequenceKind::Nondense { .. } | SequenceKind::Zk { .. } => {
            let n = spec.n_const().expect("nondense kind");
            select_indices(law, spec.first, last, spec.selector)?
                .into_iter()
                .map(|(m, _)| Ok((m, n * law.abs_ln(m)?)))
                .collect::<Result<_>>()?
        }
    };
    let entries: Vec<(usize, usize, f64)> = chosen
        .iter()
        .filter_map(|&(n, t)| interior.iter().find(|e| e.0 == n).map(|e| (n, e.1, t)))
        .collect();
    if entries.is_empty() {
        return Err(FnsError::Config(format!("no selected index is interior at depth {depth}")));
    }
    let stats: Vec<(f64, f64, f64)> = entries
        .par_iter()
        .map(|&(_, i, t)| {
            let l = x.length(i);
            let w = collar_half_width(l)?.to_float();
            Ok((t, 2.0 * w, 2.0 * w / l.ln().abs()))
        })
        .collect::<Result<_>>()?;
    let upper = stats.iter().map(|s| s.0.abs() / (2.0 * s.1)).fold(0.0, f64::max);
    let collar_c = stats.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let twists = TwistVector::new(entries.iter().map(|e| (e.1, e.2)).collect())?;
    let tail = match spec.kind {
        SequenceKind::BoundaryPoint => {
            let tw: Vec<(f64, f64)> = stats.iter().map(|s| (s.0, s.1)).collect();
            Some(tail_report(law, spec, &tw)?)
        }
        _ => None,
    };
    Ok(CumulativePoint {
        point: apply_twist(&g, &x, &twists)?,
        twists,
        indices: entries.iter().map(|e| e.0).collect(),
        dls_upper: Bound {
            value: upper,
            kind: BoundKind::Upper,
            source: "twist-collar-upper".into(),
            constants: None,
        },
        collar_c,
        tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthMatch {
    pub point: FnPoint,
    pub k: f64,
    /// `2 e^K M`.
    pub window: f64,
    pub max_twist_gap: f64,
}

/// `Y` with the lengths of `X` and the twists of `R`.
///
/// `k` defaults to half the measured estimate at `depth` with `twist_depth` duals.
pub fn bishop_length_match(
    pair: &MarkedPair,
    k: Option<f64>,
    cp: &ConstantsProfile,
    twist_depth: u32,
    depth: usize,
) -> Result<LengthMatch> {
    let m = Ext::from_float(cp.m_bound);
    if pair.base.max_length() > m || pair.target.max_length() > m {
        return Err(FnsError::Hypothesis(format!("lengths exceed M = {}", cp.m_bound)));
    }
    let k = match k {
        Some(k) if k.is_finite() && k > 0.0 => k,
        Some(k) => return Err(FnsError::Domain(format!("K = {k}"))),
        None => (dls_estimate(pair, twist_depth, depth)?.bound.value / 2.0).max(1e-12),
    };
    let mut y = pair.target.clone();
    let mut gap: f64 = 0.0;
    for (i, c) in y.coords.iter_mut().enumerate() {
        let tr = pair.base.twist(i);
        let win = 2.0 * k.exp() * pair.base.length(i).to_float();
        c.twist = tr.clamp(tr - win, tr + win);
        gap = gap.max((c.twist - tr).abs());
    }
    let window = 2.0 * k.exp() * cp.m_bound;
    if gap > window {
        return Err(FnsError::Internal(format!("twist gap {gap} exceeds 2e^K M = {window}")));
    }
    Ok(LengthMatch { point: y, k, window, max_twist_gap: gap })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectingPath {
    /// Start point from [`bishop_length_match`].
    pub start: LengthMatch,
    pub membership: Membership,
    /// `min_i 2 w(l_X(C_i)) / max(|ln l_R(C_i)|, 1)`.
    pub collar_c: f64,
    /// `(N + 2 e^K M) / (2C)`.
    pub lipschitz: f64,
}

impl ConnectingPath {
    /// `Y_t = (l_X, (1-t) τ_Y + t τ_X)`.
    pub fn at(&self, pair: &MarkedPair, t: f64) -> Result<FnPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(FnsError::Domain(format!("path parameter {t} outside [0, 1]")));
        }
        if t == 0.0 {
            return Ok(self.start.point.clone());
        }
        if t == 1.0 {
            return Ok(pair.target.clone());
        }
        let mut y = self.start.point.clone();
        for (i, c) in y.coords.iter_mut().enumerate() {
            c.twist = (1.0 - t) * c.twist + t * pair.target.twist(i);
        }
        Ok(y)
    }
}

/// Path from the length-matched point to `X`; refused when the pair is certified outside.
pub fn connect_path(
    pair: &MarkedPair,
    law: Option<&DeformationLaw>,
    cp: &ConstantsProfile,
    twist_depth: u32,
    depth: usize,
) -> Result<ConnectingPath> {
    let n = cp.n_member;
    let membership = ls_membership(pair, n, law, &CertificateConfig::default())?;
    if membership.verdict == Verdict::Outside {
        let w = membership.witness.map_or("?".into(), |i| pair.graph.curves[i].label.clone());
        return Err(FnsError::Refused(format!("pair is outside the membership window; witness {w}")));
    }
    let start = bishop_length_match(pair, None, cp, twist_depth, depth)?;
    let mut c = f64::INFINITY;
    for i in pair.graph.interior_ids() {
        let w = collar_half_width(pair.target.length(i))?.to_float();
        c = c.min(2.0 * w / pair.base.length(i).ln().abs().max(1.0));
    }
    if !c.is_finite() {
        return Err(FnsError::Degenerate("no interior curves".into()));
    }
    let lipschitz = (n + start.k.exp() * 2.0 * cp.m_bound) / (2.0 * c);
    Ok(ConnectingPath { start, membership, collar_c: c, lipschitz })
}

/// Samples the path on `t_j = j / steps`, checking membership of `(R, Y_t)` at each sample.
pub fn sample_path(pair: &MarkedPair, path: &ConnectingPath, steps: usize, n_const: f64) -> Result<Vec<(f64, FnPoint, Verdict)>> {
    if steps == 0 {
        return Err(FnsError::Domain("need at least one step".into()));
    }
    (0..=steps)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 / steps as f64;
            let y = path.at(pair, t)?;
            let p = MarkedPair::new(pair.graph.clone(), pair.base.clone(), y.clone())?;
            let v = ls_membership(&p, n_const, None, &CertificateConfig::default())?.verdict;
            Ok((t, y, v))
        })
        .collect()
}

/// `d_ls(Y_s, Y_t)` estimates against the Lipschitz bound for every sample pair `s <= t`:
/// `(s, t, estimate, bound)`.
pub fn path_lipschitz_check(
    pair: &MarkedPair,
    path: &ConnectingPath,
    samples: &[(f64, FnPoint, Verdict)],
    twist_depth: u32,
) -> Result<Vec<(f64, f64, f64, f64)>> {
    let depth = pair.graph.depth();
    let pairs: Vec<(usize, usize)> =
        (0..samples.len()).flat_map(|a| (a..samples.len()).map(move |b| (a, b))).collect();
    pairs
        .par_iter()
        .map(|&(a, b)| {
            let (s, ys, _) = &samples[a];
            let (t, yt, _) = &samples[b];
            let p = MarkedPair::new(pair.graph.clone(), ys.clone(), yt.clone())?;
            let est = dls_estimate(&p, twist_depth, depth)?.bound.value;
            Ok((*s, *t, est, path.lipschitz * (t - s).abs()))
        })
        .collect()
}

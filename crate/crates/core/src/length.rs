//! Holonomy of finite truncations and exact lengths of enumerated curves.
//!
//! Every dual curve lives in the one-holed torus or four-holed sphere formed
//! by the pants adjacent to its decomposition curve, so each interior curve
//! carries its own local representation:
//!
//! * `A = diag(e^{l/2}, e^{-l/2})` translates along the imaginary axis;
//! * four-holed sphere: the left pants generator `B1` is conjugated by the
//!   twist `T(τ) = A^{τ/l}` and the dual is `β = B1t B2^{-1}`;
//! * one-holed torus: `β = Q(d) T(-τ)` with `sinh(d/2) = cosh(L/4)/sinh(l/2)`.
//!
//! A positive twist moves the stratum on the negative side of the axis by
//! `z -> e^t z`, which is the left earthquake. Twist zero is the position of
//! minimal dual length. Twisted dual `k` is the dual at twist `τ + k l`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};
use crate::hyp::{self, AngleData, BranchThresholds};
use crate::surface::{CurveClass, CurveKind, FnPoint, PantsGraph};
use crate::{Ext, Mat, SExt};

/// Sparse twist magnitudes per interior curve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TwistVector {
    entries: Vec<(usize, f64)>,
}

impl TwistVector {
    pub fn new(mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(FnsError::Domain("twist vector names a curve twice".into()));
        }
        if entries.iter().any(|e| !e.1.is_finite()) {
            return Err(FnsError::Domain("twist entries must be finite".into()));
        }
        Ok(TwistVector { entries })
    }

    pub fn single(i: usize, t: f64) -> Self {
        TwistVector { entries: vec![(i, t)] }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries.iter().find(|e| e.0 == i).map_or(0.0, |e| e.1)
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1.abs()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.entries.clone();
        for &(i, t) in &other.entries {
            match v.iter_mut().find(|e| e.0 == i) {
                Some(e) => e.1 += t,
                None => v.push((i, t)),
            }
        }
        v.sort_by_key(|e| e.0);
        TwistVector { entries: v }
    }
}

/// `τ_i -> τ_i + t_i`; lengths untouched.
pub fn apply_twist(g: &PantsGraph, x: &FnPoint, t: &TwistVector) -> Result<FnPoint> {
    let mut y = x.clone();
    for &(i, ti) in t.entries() {
        match g.curves.get(i) {
            None => return Err(FnsError::Range(format!("curve {i} is not in this truncation"))),
            Some(c) if !c.is_interior() => {
                return Err(FnsError::Domain(format!("twist on boundary leg {}", c.label)))
            }
            Some(_) => y.coords[i].twist += ti,
        }
    }
    Ok(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceKind {
    /// Curve glued to itself inside one pants; the dual crosses once.
    Handle,
    /// Curve between two distinct pants; the dual crosses twice.
    XPiece,
}

/// Local representation around one interior curve.
#[derive(Clone, Debug)]
pub struct LocalPiece {
    pub curve: usize,
    pub kind: PieceKind,
    pub length: Ext,
    pub twist: f64,
    /// Lengths of the other holes: `[L]` or `[a1, a2, b1, b2]`.
    pub boundary: Vec<Ext>,
    frame: Mat,
    a: Mat,
    left: Mat,
    right: Mat,
}

fn sinh_half(l: Ext) -> Ext {
    let x = l.to_float();
    if x < 1e-150 {
        l.scale_pow2(-1)
    } else {
        Ext::from_float((x / 2.0).sinh())
    }
}

fn diag_exp(t: f64) -> Mat {
    Mat::diag(SExt::pos(Ext::from_ln(t / 2.0)), SExt::pos(Ext::from_ln(-t / 2.0)))
}

fn pants_generator(l: Ext, a1: Ext, a2: Ext, left: bool) -> Result<Mat> {
    let c1 = (a1.to_float() / 2.0).cosh();
    let c2 = (a2.to_float() / 2.0).cosh();
    if !(c1.is_finite() && c2.is_finite()) {
        return Err(FnsError::Range("boundary length too large for the pants generator".into()));
    }
    let em = (-l.to_float() / 2.0).exp();
    let p = Ext::from_float(c2 + c1 * em) / sinh_half(l);
    let s = Ext::from_float(2.0 * c1) + p;
    let g = (p * s + Ext::one()).sqrt();
    let (p, s, g) = (SExt::pos(p), SExt::pos(s), SExt::pos(g));
    Ok(if left { Mat::new(-p, -g, g, s) } else { Mat::new(-p, g, -g, s) })
}

impl LocalPiece {
    fn build(g: &PantsGraph, x: &FnPoint, i: usize) -> Result<Self> {
        g.require_interior(i)?;
        let l = x.length(i);
        if l.is_zero() {
            return Err(FnsError::Domain("degenerate length 0".into()));
        }
        let tau = x.twist(i);
        let ends = &g.curves[i].ends;
        let (p0, s0) = ends[0];
        let (p1, s1) = ends[1];
        let a = diag_exp(l.to_float());
        if p0 == p1 {
            let third = 3 - s0 - s1;
            let big_l = g.slot_length(x, p0, third);
            let c = (big_l.to_float() / 4.0).cosh();
            let sh = Ext::from_float(c) / sinh_half(l);
            let ch = (Ext::one() + sh * sh).sqrt();
            let q = Mat::new(SExt::pos(ch), SExt::pos(sh), SExt::pos(sh), SExt::pos(ch));
            Ok(LocalPiece {
                curve: i,
                kind: PieceKind::Handle,
                length: l,
                twist: tau,
                boundary: vec![big_l],
                frame: Mat::identity(),
                a,
                left: q * diag_exp(-tau),
                right: Mat::identity(),
            })
        } else {
            let a1 = g.slot_length(x, p0, (s0 + 1) % 3);
            let a2 = g.slot_length(x, p0, (s0 + 2) % 3);
            let b1 = g.slot_length(x, p1, (s1 + 1) % 3);
            let b2 = g.slot_length(x, p1, (s1 + 2) % 3);
            let b1m = pants_generator(l, a1, a2, true)?;
            let b2m = pants_generator(l, b1, b2, false)?;
            let t = diag_exp(tau);
            Ok(LocalPiece {
                curve: i,
                kind: PieceKind::XPiece,
                length: l,
                twist: tau,
                boundary: vec![a1, a2, b1, b2],
                frame: Mat::identity(),
                a,
                left: t * b1m * t.inv_sl2(),
                right: b2m,
            })
        }
    }

    /// `T(t) = A^{t/l}` in the current frame.
    fn translation(&self, t: f64) -> Mat {
        diag_exp(t).conj(&self.frame)
    }

    pub fn intersection_number(&self) -> u8 {
        match self.kind {
            PieceKind::Handle => 1,
            PieceKind::XPiece => 2,
        }
    }

    /// Holonomy of `twisted-dual(i, k)`.
    pub fn dual_word(&self, k: i64) -> Mat {
        let shift = k as f64 * self.length.to_float();
        match self.kind {
            PieceKind::Handle => {
                if k == 0 {
                    self.left
                } else {
                    self.left * self.translation(-shift)
                }
            }
            PieceKind::XPiece => {
                let l = if k == 0 {
                    self.left
                } else {
                    let t = self.translation(shift);
                    t * self.left * t.inv_sl2()
                };
                l * self.right.inv_sl2()
            }
        }
    }

    /// Twisted generator of the pants on the left of the curve (`B1t`, or `B` for a handle).
    pub fn left_generator(&self) -> Mat {
        self.left
    }

    /// Generator of the right pants (`B2`); the identity for a handle.
    pub fn right_generator(&self) -> Mat {
        self.right
    }

    /// Holonomy of the pants curve itself.
    pub fn curve_word(&self) -> Mat {
        self.a
    }

    /// `(hole length, |trace| of its holonomy)` for every other hole of the piece.
    pub fn boundary_traces(&self) -> Vec<(Ext, Ext)> {
        match self.kind {
            PieceKind::Handle => {
                let (a, b) = (self.a, self.left);
                let comm = a * b * a.inv_sl2() * b.inv_sl2();
                vec![(self.boundary[0], comm.trace().abs())]
            }
            PieceKind::XPiece => {
                let words = [self.left, self.left * self.a, self.right, self.right * self.a];
                self.boundary.iter().zip(words).map(|(l, w)| (*l, w.trace().abs())).collect()
            }
        }
    }

    /// Angles between the axis of the curve and the axis of its dual, one per crossing.
    ///
    /// With the curve along the imaginary axis, the dual's axis meets it at
    /// `cos θ = -(x1 + x2)/(x2 - x1) = -sgn(c)(a - d)/sqrt(tr^2 - 4)`.
    pub fn crossing_angles(&self) -> Result<Vec<AngleData<f64>>> {
        let finv = self.frame.inv_sl2();
        let words = match self.kind {
            PieceKind::Handle => vec![self.left],
            PieceKind::XPiece => vec![self.left * self.right.inv_sl2(), self.right.inv_sl2() * self.left],
        };
        words
            .into_iter()
            .map(|w| {
                let m = finv * w * self.frame;
                let tr = m.trace().abs();
                let two = Ext::from_float(2.0);
                let disc = tr
                    .checked_sub(two)
                    .filter(|d| !d.is_zero())
                    .ok_or_else(|| FnsError::Internal("dual is not hyperbolic".into()))?;
                let root = (disc * (tr + two)).sqrt();
                // x1 x2 = -b/c, so x1 < 0 < x2 needs b c > 0; sin θ = 2 sqrt(-x1 x2)/(x2 - x1)
                if m.c.is_zero() || m.b.is_zero() || m.b.is_negative() != m.c.is_negative() {
                    return Err(FnsError::Internal("dual axis does not cross the curve".into()));
                }
                let sin = ((m.b.abs() * m.c.abs()).sqrt().scale_pow2(1) / root).to_float().min(1.0);
                if !(sin > 0.0) {
                    return Err(FnsError::Internal("dual axis does not cross the curve".into()));
                }
                let diff = m.a - m.d;
                let sign = if diff.is_negative() { -1.0 } else { 1.0 } * m.c.signum() as f64;
                let mag = if sin > 0.5 {
                    (diff.abs() / root).to_float()
                } else {
                    ((1.0 - sin) * (1.0 + sin)).sqrt()
                };
                Ok(AngleData::from_sin_cos(sin, -sign * mag))
            })
            .collect()
    }

    fn conjugated(&self, g: &Mat) -> Self {
        LocalPiece {
            frame: *g * self.frame,
            a: self.a.conj(g),
            left: self.left.conj(g),
            right: self.right.conj(g),
            boundary: self.boundary.clone(),
            ..*self
        }
    }
}

/// Local representations for every interior curve of a finite truncation.
#[derive(Clone, Debug)]
pub struct Holonomy {
    pieces: Vec<Option<LocalPiece>>,
    thresholds: BranchThresholds<f64>,
}

pub fn holonomy_build(g: &PantsGraph, x: &FnPoint) -> Result<Holonomy> {
    holonomy_build_with(g, x, BranchThresholds::default())
}

pub fn holonomy_build_with(
    g: &PantsGraph,
    x: &FnPoint,
    thresholds: BranchThresholds<f64>,
) -> Result<Holonomy> {
    g.validate()?;
    x.validate(g)?;
    let pieces = (0..g.curves.len())
        .map(|i| if g.is_interior(i) { LocalPiece::build(g, x, i).map(Some) } else { Ok(None) })
        .collect::<Result<Vec<_>>>()?;
    Ok(Holonomy { pieces, thresholds })
}

impl Holonomy {
    pub fn piece(&self, i: usize) -> Result<&LocalPiece> {
        self.pieces
            .get(i)
            .and_then(|p| p.as_ref())
            .ok_or_else(|| FnsError::Range(format!("curve {i} is not an interior curve of this truncation")))
    }

    pub fn pieces(&self) -> impl Iterator<Item = &LocalPiece> {
        self.pieces.iter().flatten()
    }

    /// `|trace|` of the holonomy of `c`.
    pub fn trace(&self, c: &CurveClass) -> Result<Ext> {
        Ok(match c.kind {
            CurveKind::PantsCurve { i } => self.piece(i)?.curve_word().trace().abs(),
            CurveKind::TwistedDual { i, k } => self.piece(i)?.dual_word(k).trace().abs(),
        })
    }

    /// All generators conjugated by a common isometry `g`.
    pub fn conjugate(&self, g: &Mat) -> Holonomy {
        Holonomy {
            pieces: self.pieces.iter().map(|p| p.as_ref().map(|p| p.conjugated(g))).collect(),
            thresholds: self.thresholds,
        }
    }
}

/// Length of the geodesic in the class `c`.
pub fn geodesic_length(h: &Holonomy, c: &CurveClass) -> Result<Ext> {
    match c.kind {
        CurveKind::PantsCurve { i } => Ok(h.piece(i)?.length),
        CurveKind::TwistedDual { .. } => hyp::trace_to_length_with(h.trace(c)?, &h.thresholds),
    }
}

/// Lengths of a family, evaluated in parallel, returned in input order.
pub fn geodesic_lengths(h: &Holonomy, cs: &[CurveClass]) -> Result<Vec<Ext>> {
    cs.par_iter().map(|c| geodesic_length(h, c)).collect()
}

/// Angle(s) between `C_i` and `β_i`.
pub fn intersection_data(h: &Holonomy, i: usize) -> Result<Vec<AngleData<f64>>> {
    h.piece(i)?.crossing_angles()
}

/// Smallest `sin θ` over the crossings of `C_i` and `β_i`.
pub fn rho_of(h: &Holonomy, i: usize) -> Result<f64> {
    Ok(intersection_data(h, i)?.iter().map(|a| a.sin_theta).fold(1.0, f64::min))
}

/// Length of `β_i` with the twist on `C_i` replaced by `tau`; only the local piece is built.
pub fn dual_length_at(g: &PantsGraph, x: &FnPoint, i: usize, tau: f64) -> Result<Ext> {
    let mut y = x.clone();
    y.coords.get_mut(i).ok_or_else(|| FnsError::Range(format!("curve {i}")))?.twist = tau;
    let p = LocalPiece::build(g, &y, i)?;
    hyp::trace_to_length(p.dual_word(0).trace().abs())
}

/// `|dl(β_i)/dτ - Σ cos θ|` with a central difference of the given step.
pub fn wolpert_residual(g: &PantsGraph, x: &FnPoint, i: usize, step: f64) -> Result<f64> {
    let tau = x.twist(i);
    let lp = dual_length_at(g, x, i, tau + step)?.to_float();
    let lm = dual_length_at(g, x, i, tau - step)?.to_float();
    let p = LocalPiece::build(g, x, i)?;
    let cos: f64 = p.crossing_angles()?.iter().map(|a| a.cos_theta).sum();
    Ok(((lp - lm) / (2.0 * step) - cos).abs())
}

use serde::{Deserialize, Serialize};

use super::graph::PantsGraph;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveKind {
    PantsCurve { i: usize },
    /// `T^k_{C_i}(β_i)`.
    TwistedDual { i: usize, k: i64 },
}

/// An enumerable simple closed curve with its intersection numbers against
/// the decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveClass {
    pub kind: CurveKind,
    /// The only decomposition curve met, with its intersection number.
    pub crossing: Option<(usize, u8)>,
}

impl CurveClass {
    pub fn pants_curve(i: usize) -> Self {
        CurveClass { kind: CurveKind::PantsCurve { i }, crossing: None }
    }

    /// `i(self, C_j)`.
    pub fn intersection(&self, j: usize) -> u8 {
        match self.crossing {
            Some((c, n)) if c == j => n,
            _ => 0,
        }
    }

    pub fn curve_index(&self) -> usize {
        match self.kind {
            CurveKind::PantsCurve { i } | CurveKind::TwistedDual { i, .. } => i,
        }
    }

    pub fn with_k(&self, k: i64) -> Self {
        match self.kind {
            CurveKind::PantsCurve { .. } => *self,
            CurveKind::TwistedDual { i, .. } => {
                CurveClass { kind: CurveKind::TwistedDual { i, k }, crossing: self.crossing }
            }
        }
    }
}

/// `i(β_i, C_i)`: 1 when `C_i` is glued to itself inside one pants, 2 otherwise.
pub fn dual_intersection(g: &PantsGraph, i: usize) -> Result<u8> {
    g.require_interior(i)?;
    let e = &g.curves[i].ends;
    Ok(if e[0].0 == e[1].0 { 1 } else { 2 })
}

/// The dual curve `β_i = twisted-dual(i, 0)`.
pub fn dual_curve(g: &PantsGraph, i: usize) -> Result<CurveClass> {
    twisted_dual(g, i, 0)
}

pub fn twisted_dual(g: &PantsGraph, i: usize, k: i64) -> Result<CurveClass> {
    let n = dual_intersection(g, i)?;
    Ok(CurveClass { kind: CurveKind::TwistedDual { i, k }, crossing: Some((i, n)) })
}

/// Pants curves and twisted duals `|k| <= twist_depth`, ordered by curve then `k`.
pub fn enumerate_curves(g: &PantsGraph, twist_depth: u32) -> Vec<CurveClass> {
    let kk = twist_depth as i64;
    let mut out = Vec::new();
    for i in g.interior_ids() {
        out.push(CurveClass::pants_curve(i));
        let n = dual_intersection(g, i).expect("interior curve");
        for k in -kk..=kk {
            out.push(CurveClass { kind: CurveKind::TwistedDual { i, k }, crossing: Some((i, n)) });
        }
    }
    out
}

//! Pants decompositions, Fenchel-Nielsen points, curve families and truncation.

mod curves;
mod family;
mod graph;
mod law;

pub use curves::{dual_curve, dual_intersection, enumerate_curves, twisted_dual, CurveClass, CurveKind};
pub use family::{build_family, four_holed_sphere, one_holed_torus, FamilyKind, SurfaceFamily};
pub use graph::{truncate, Coord, CurveEdge, FnPoint, Pants, PantsGraph, Slot};
pub use law::{LengthLaw, TwistLaw};

use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};

/// Two points on the same pants graph: base `R` and target `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPair {
    pub graph: PantsGraph,
    pub base: FnPoint,
    pub target: FnPoint,
}

impl MarkedPair {
    pub fn new(graph: PantsGraph, base: FnPoint, target: FnPoint) -> Result<Self> {
        graph.validate()?;
        base.validate(&graph)?;
        target.validate(&graph)?;
        Ok(MarkedPair { graph, base, target })
    }

    pub fn identity(graph: PantsGraph, base: FnPoint) -> Result<Self> {
        let target = base.clone();
        Self::new(graph, base, target)
    }

    /// Same pair seen on a truncation.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        let (g, b) = truncate(&self.graph, &self.base, n)?;
        let (_, t) = truncate(&self.graph, &self.target, n)?;
        Self::new(g, b, t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnComponent {
    pub curve: usize,
    pub log_length_ratio: f64,
    pub twist_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnDifference {
    pub components: Vec<FnComponent>,
    pub sup_norm: f64,
}

/// `(log(l_X(C_i)/l_R(C_i)), τ_X(C_i) - τ_R(C_i))` over the interior curves.
pub fn fn_difference(p: &MarkedPair) -> FnDifference {
    let components: Vec<FnComponent> = p
        .graph
        .interior_ids()
        .into_iter()
        .map(|i| FnComponent {
            curve: i,
            log_length_ratio: p.target.length(i).ln() - p.base.length(i).ln(),
            twist_diff: p.target.twist(i) - p.base.twist(i),
        })
        .collect();
    let sup_norm = components
        .iter()
        .map(|c| c.log_length_ratio.abs().max(c.twist_diff.abs()))
        .fold(0.0, f64::max);
    FnDifference { components, sup_norm }
}

/// Copy of `x` with every length multiplied by `factor`.
pub fn scale_lengths(x: &FnPoint, factor: f64) -> Result<FnPoint> {
    if !(factor > 0.0) {
        return Err(FnsError::Domain(format!("scale factor {factor}")));
    }
    let f = crate::Ext::from_float(factor);
    Ok(FnPoint {
        coords: x.coords.iter().map(|c| Coord { length: c.length * f, twist: c.twist }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flute(n: usize) -> (PantsGraph, FnPoint) {
        build_family(&SurfaceFamily::flute(LengthLaw::exp_linear()), n).unwrap()
    }

    #[test]
    fn difference_examples() {
        let (g, x) = flute(6);
        let d = fn_difference(&MarkedPair::identity(g.clone(), x.clone()).unwrap());
        assert!(d.components.iter().all(|c| c.log_length_ratio == 0.0 && c.twist_diff == 0.0));
        assert_eq!(d.sup_norm, 0.0);

        let mut y = x.clone();
        y.coords[0].twist += 0.7;
        let d = fn_difference(&MarkedPair::new(g.clone(), x.clone(), y).unwrap());
        assert_eq!(d.components[0].twist_diff, 0.7);
        assert!(d.components[1..].iter().all(|c| c.twist_diff == 0.0));

        let y = scale_lengths(&x, 2.0).unwrap();
        let d = fn_difference(&MarkedPair::new(g, x, y).unwrap());
        for c in &d.components {
            assert!((c.log_length_ratio - 2f64.ln()).abs() < 1e-15);
        }
    }
}

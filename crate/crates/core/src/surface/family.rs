use serde::{Deserialize, Serialize};

use super::graph::{truncate, Coord, CurveEdge, FnPoint, Pants, PantsGraph, Slot};
use super::law::{LengthLaw, TwistLaw};
use crate::error::{FnsError, Result};
use crate::Ext;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Chain of pants closed by cusps.
    Flute,
    /// Chain whose side holes carry one-holed tori; `frame_length` is the
    /// length of the chain curves `C_k` and of the handle cuffs `D_k`.
    TorusChain { frame_length: f64 },
    /// Explicit graph and coordinates; `depth` truncates by pants level.
    CustomTable { graph: PantsGraph, point: FnPoint },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFamily {
    pub kind: FamilyKind,
    pub length_law: LengthLaw,
    /// Base twists on law-indexed curves.
    pub twist_law: TwistLaw,
    /// Upper bound `M` every length must respect.
    pub m_bound: f64,
}

impl SurfaceFamily {
    pub fn flute(length_law: LengthLaw) -> Self {
        SurfaceFamily { kind: FamilyKind::Flute, length_law, twist_law: TwistLaw::Zero, m_bound: 2.0 }
    }

    pub fn torus_chain(length_law: LengthLaw) -> Self {
        SurfaceFamily {
            kind: FamilyKind::TorusChain { frame_length: 1.0 },
            length_law,
            twist_law: TwistLaw::Zero,
            m_bound: 2.0,
        }
    }

    fn coord(&self, law_index: Option<usize>, interior: bool, frame: f64) -> Result<Coord> {
        let (length, twist) = match law_index {
            Some(n) => {
                let l = self.length_law.length(n)?;
                let t = if interior { self.twist_law.value(n, &self.length_law)? } else { 0.0 };
                (l, t)
            }
            None => (Ext::from_float(frame), 0.0),
        };
        if twist.abs() >= length.to_float() && twist != 0.0 {
            return Err(FnsError::Config(format!(
                "base twist {twist} violates |tau| < l = {}",
                length.to_float()
            )));
        }
        Ok(Coord { length, twist })
    }
}

/// Builds the depth-`n` member of a family.
///
/// Flute: pants `P_1..P_n`, `P_1 = (cusp, cusp, C_1)`, `P_k = (C_{k-1}, C_k, cusp)`,
/// with `C_n` a boundary leg. Torus chain: `P_k = (C_{k-1} | cusp, C_k, D_k)` and
/// handles `Q_k = (D_k, h_k, h_k)`; the handle curves follow the length law.
pub fn build_family(spec: &SurfaceFamily, depth: usize) -> Result<(PantsGraph, FnPoint)> {
    if depth == 0 {
        return Err(FnsError::Config("depth must be at least 1".into()));
    }
    spec.length_law.validate()?;
    let (g, x) = match &spec.kind {
        FamilyKind::Flute => build_flute(spec, depth)?,
        FamilyKind::TorusChain { frame_length } => {
            if !(*frame_length > 0.0) {
                return Err(FnsError::Config("frame_length must be positive".into()));
            }
            build_torus_chain(spec, depth, *frame_length)?
        }
        FamilyKind::CustomTable { graph, point } => {
            graph.validate()?;
            point.validate(graph)?;
            if depth > graph.depth() {
                return Err(FnsError::Range(format!("table has depth {}", graph.depth())));
            }
            truncate(graph, point, depth)?
        }
    };
    g.validate()?;
    x.validate(&g)?;
    let max = x.max_length();
    if max > Ext::from_float(spec.m_bound) {
        return Err(FnsError::Config(format!(
            "length {} exceeds the upper bound M = {}",
            max.to_float(),
            spec.m_bound
        )));
    }
    Ok((g, x))
}

fn build_flute(spec: &SurfaceFamily, n: usize) -> Result<(PantsGraph, FnPoint)> {
    let mut pants = Vec::with_capacity(n);
    let mut curves = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for k in 1..=n {
        let p = k - 1;
        let slots = if k == 1 {
            [Slot::Cusp, Slot::Cusp, Slot::Curve { id: 0 }]
        } else {
            [Slot::Curve { id: k - 2 }, Slot::Curve { id: k - 1 }, Slot::Cusp]
        };
        pants.push(Pants { slots, level: k });
        let own = if k == 1 { (p, 2) } else { (p, 1) };
        let ends = if k < n { vec![own, (p + 1, 0)] } else { vec![own] };
        curves.push(CurveEdge { label: format!("C{k}"), law_index: Some(k), ends });
        coords.push(spec.coord(Some(k), k < n, 0.0)?);
    }
    Ok((PantsGraph { pants, curves }, FnPoint { coords }))
}

fn build_torus_chain(spec: &SurfaceFamily, n: usize, frame: f64) -> Result<(PantsGraph, FnPoint)> {
    let mut pants = Vec::with_capacity(2 * n);
    let mut curves = Vec::with_capacity(3 * n);
    let mut coords = Vec::with_capacity(3 * n);
    // curve ids: C_k = 3(k-1), D_k = 3(k-1)+1, h_k = 3(k-1)+2; pants P_k = 2(k-1), Q_k = 2(k-1)+1
    for k in 1..=n {
        let (pk, qk) = (2 * (k - 1), 2 * (k - 1) + 1);
        let (c, d, h) = (3 * (k - 1), 3 * (k - 1) + 1, 3 * (k - 1) + 2);
        let first = if k == 1 { Slot::Cusp } else { Slot::Curve { id: c - 3 } };
        pants.push(Pants { slots: [first, Slot::Curve { id: c }, Slot::Curve { id: d }], level: k });
        pants.push(Pants {
            slots: [Slot::Curve { id: d }, Slot::Curve { id: h }, Slot::Curve { id: h }],
            level: k,
        });
        let c_ends = if k < n { vec![(pk, 1), (pk + 2, 0)] } else { vec![(pk, 1)] };
        curves.push(CurveEdge { label: format!("C{k}"), law_index: None, ends: c_ends });
        curves.push(CurveEdge { label: format!("D{k}"), law_index: None, ends: vec![(pk, 2), (qk, 0)] });
        curves.push(CurveEdge { label: format!("h{k}"), law_index: Some(k), ends: vec![(qk, 1), (qk, 2)] });
        coords.push(spec.coord(None, k < n, frame)?);
        coords.push(spec.coord(None, true, frame)?);
        coords.push(spec.coord(Some(k), true, frame)?);
    }
    Ok((PantsGraph { pants, curves }, FnPoint { coords }))
}

fn hole(len: f64, curves: &mut Vec<CurveEdge>, coords: &mut Vec<Coord>, at: (usize, usize), label: &str) -> Slot {
    if len == 0.0 {
        return Slot::Cusp;
    }
    curves.push(CurveEdge { label: label.into(), law_index: None, ends: vec![at] });
    coords.push(Coord { length: Ext::from_float(len), twist: 0.0 });
    Slot::Curve { id: curves.len() - 1 }
}

/// One pants glued to itself along `C1`; the third hole has length `boundary`
/// (0 for a cusp).
pub fn one_holed_torus(l: f64, tau: f64, boundary: f64) -> Result<(PantsGraph, FnPoint)> {
    let mut curves =
        vec![CurveEdge { label: "C1".into(), law_index: None, ends: vec![(0, 0), (0, 1)] }];
    let mut coords = vec![Coord { length: Ext::from_float(l), twist: tau }];
    let third = hole(boundary, &mut curves, &mut coords, (0, 2), "L");
    let g = PantsGraph {
        pants: vec![Pants { slots: [Slot::Curve { id: 0 }, Slot::Curve { id: 0 }, third], level: 1 }],
        curves,
    };
    let x = FnPoint { coords };
    g.validate()?;
    x.validate(&g)?;
    Ok((g, x))
}

/// Two pants glued along `C1`; holes `[a1, a2]` on the first, `[b1, b2]` on the
/// second (0 for cusps).
pub fn four_holed_sphere(l: f64, tau: f64, holes: [f64; 4]) -> Result<(PantsGraph, FnPoint)> {
    let mut curves = vec![CurveEdge { label: "C1".into(), law_index: None, ends: vec![(0, 0), (1, 0)] }];
    let mut coords = vec![Coord { length: Ext::from_float(l), twist: tau }];
    let names = ["a1", "a2", "b1", "b2"];
    let mut slots = [Slot::Cusp; 4];
    for (j, &len) in holes.iter().enumerate() {
        slots[j] = hole(len, &mut curves, &mut coords, (j / 2, 1 + j % 2), names[j]);
    }
    let g = PantsGraph {
        pants: vec![
            Pants { slots: [Slot::Curve { id: 0 }, slots[0], slots[1]], level: 1 },
            Pants { slots: [Slot::Curve { id: 0 }, slots[2], slots[3]], level: 1 },
        ],
        curves,
    };
    let x = FnPoint { coords };
    g.validate()?;
    x.validate(&g)?;
    Ok((g, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flute_depth_five() {
        let (g, x) = build_family(&SurfaceFamily::flute(LengthLaw::exp_linear()), 5).unwrap();
        assert_eq!(g.pants.len(), 5);
        assert_eq!(g.interior_ids(), vec![0, 1, 2, 3]);
        for i in 0..4 {
            assert!((x.length(i).ln() + (i + 1) as f64).abs() < 1e-14);
        }
        assert!(!g.is_interior(4));
        assert_eq!(g.pants[0].slots[..2], [Slot::Cusp, Slot::Cusp]);
        assert_eq!(g.pants[4].slots.iter().filter(|s| **s == Slot::Cusp).count(), 1);
    }

    #[test]
    fn fast_flute_depth_forty() {
        let (_, x) = build_family(&SurfaceFamily::flute(LengthLaw::ExpDouble), 40).unwrap();
        let c39 = x.length(38);
        let expect = -(2f64.powi(39)) / std::f64::consts::LN_2;
        assert!((c39.exponent() as f64 - expect).abs() < 2.0);
    }

    #[test]
    fn torus_chain_shape() {
        let (g, _) = build_family(&SurfaceFamily::torus_chain(LengthLaw::exp_linear()), 3).unwrap();
        assert_eq!(g.pants.len(), 6);
        assert_eq!(g.interior_ids().len(), 8);
        let h2 = g.find("h2").unwrap();
        assert_eq!(g.curves[h2].ends[0].0, g.curves[h2].ends[1].0);
    }

    #[test]
    fn errors() {
        let f = SurfaceFamily::flute(LengthLaw::exp_linear());
        assert!(build_family(&f, 0).is_err());
        let unbounded = SurfaceFamily::flute(LengthLaw::Linear { slope: 1.0 });
        assert!(matches!(build_family(&unbounded, 5), Err(FnsError::Config(_))));
        let bad_twist = SurfaceFamily { twist_law: TwistLaw::Linear { slope: 1.0 }, ..f };
        assert!(build_family(&bad_twist, 3).is_err());
    }

    #[test]
    fn truncation_nests() {
        let f = SurfaceFamily::flute(LengthLaw::exp_linear());
        let (g, x) = build_family(&f, 10).unwrap();
        let (g4, x4) = truncate(&g, &x, 4).unwrap();
        let (b4, y4) = build_family(&f, 4).unwrap();
        assert_eq!((g4, x4), (b4, y4));
        let (g3, _) = truncate(&g, &x, 3).unwrap();
        let (g5, _) = truncate(&g, &x, 5).unwrap();
        for (i, c) in g3.curves.iter().enumerate() {
            assert_eq!(c.label, g5.curves[i].label);
        }
        assert!(truncate(&g, &x, 11).is_err());
    }
}

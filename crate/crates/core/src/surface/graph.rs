use serde::{Deserialize, Serialize};

use crate::error::{FnsError, Result};
use crate::Ext;

/// A hole of a pair of pants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Slot {
    /// Interior curve or boundary leg, by position in [`PantsGraph::curves`].
    Curve { id: usize },
    Cusp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pants {
    pub slots: [Slot; 3],
    /// Exhaustion level; truncation at `n` keeps the pants with `level <= n`.
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveEdge {
    pub label: String,
    /// Index into the family's length law, when the curve follows it.
    pub law_index: Option<usize>,
    /// `(pants, slot)` attachments: two for interior curves, one for boundary legs.
    pub ends: Vec<(usize, usize)>,
}

impl CurveEdge {
    pub fn is_interior(&self) -> bool {
        self.ends.len() == 2
    }
}

/// Combinatorial pants decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PantsGraph {
    pub pants: Vec<Pants>,
    pub curves: Vec<CurveEdge>,
}

impl PantsGraph {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(FnsError::Config(m));
        if self.pants.is_empty() {
            return bad("no pants".into());
        }
        let mut seen = vec![[false; 3]; self.pants.len()];
        for (id, c) in self.curves.iter().enumerate() {
            if c.ends.is_empty() || c.ends.len() > 2 {
                return bad(format!("curve {} has {} attachments", c.label, c.ends.len()));
            }
            for &(p, s) in &c.ends {
                if p >= self.pants.len() || s >= 3 {
                    return bad(format!("curve {} attaches to missing slot ({p},{s})", c.label));
                }
                if seen[p][s] {
                    return bad(format!("slot ({p},{s}) used twice"));
                }
                seen[p][s] = true;
                if self.pants[p].slots[s] != (Slot::Curve { id }) {
                    return bad(format!("slot ({p},{s}) does not point back to {}", c.label));
                }
            }
        }
        for (p, pants) in self.pants.iter().enumerate() {
            for (s, slot) in pants.slots.iter().enumerate() {
                if let Slot::Curve { id } = slot {
                    if *id >= self.curves.len() || !seen[p][s] {
                        return bad(format!("slot ({p},{s}) names curve {id} without attachment"));
                    }
                }
            }
        }
        // connectivity over interior curves
        let mut reach = vec![false; self.pants.len()];
        let mut stack = vec![0];
        reach[0] = true;
        while let Some(p) = stack.pop() {
            for c in self.curves.iter().filter(|c| c.is_interior()) {
                let (a, b) = (c.ends[0].0, c.ends[1].0);
                for (x, y) in [(a, b), (b, a)] {
                    if x == p && !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if reach.iter().any(|r| !r) {
            return bad("pants graph is not connected".into());
        }
        Ok(())
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.curves.get(id).is_some_and(|c| c.is_interior())
    }

    pub fn interior_ids(&self) -> Vec<usize> {
        (0..self.curves.len()).filter(|&i| self.is_interior(i)).collect()
    }

    pub fn depth(&self) -> usize {
        self.pants.iter().map(|p| p.level).max().unwrap_or(0)
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.label == label)
    }

    pub(crate) fn require_interior(&self, id: usize) -> Result<()> {
        match self.curves.get(id) {
            None => Err(FnsError::Range(format!("curve {id} is not in this truncation"))),
            Some(c) if !c.is_interior() => {
                Err(FnsError::Domain(format!("curve {} is a boundary leg", c.label)))
            }
            Some(_) => Ok(()),
        }
    }

    /// Length of whatever fills a slot: the curve length, or 0 for a cusp.
    pub(crate) fn slot_length(&self, x: &FnPoint, p: usize, s: usize) -> Ext {
        match self.pants[p].slots[s] {
            Slot::Curve { id } => x.coords[id].length,
            Slot::Cusp => Ext::zero(),
        }
    }
}

/// Per-curve Fenchel-Nielsen coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub length: Ext,
    /// Twist in length units; always 0 on boundary legs.
    pub twist: f64,
}

/// Fenchel-Nielsen coordinates, aligned with [`PantsGraph::curves`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnPoint {
    pub coords: Vec<Coord>,
}

impl FnPoint {
    pub fn validate(&self, g: &PantsGraph) -> Result<()> {
        if self.coords.len() != g.curves.len() {
            return Err(FnsError::Config(format!(
                "{} coordinates for {} curves",
                self.coords.len(),
                g.curves.len()
            )));
        }
        for (c, e) in self.coords.iter().zip(&g.curves) {
            if c.length.is_zero() {
                return Err(FnsError::Domain(format!("curve {} has length 0", e.label)));
            }
            if !c.twist.is_finite() {
                return Err(FnsError::Domain(format!("curve {} has twist {}", e.label, c.twist)));
            }
            if !e.is_interior() && c.twist != 0.0 {
                return Err(FnsError::Domain(format!("boundary leg {} carries a twist", e.label)));
            }
        }
        Ok(())
    }

    pub fn length(&self, id: usize) -> Ext {
        self.coords[id].length
    }

    pub fn twist(&self, id: usize) -> f64 {
        self.coords[id].twist
    }

    pub fn max_length(&self) -> Ext {
        self.coords.iter().map(|c| c.length).max().unwrap_or(Ext::zero())
    }
}

/// Keeps the pants of level `<= n`; curves cut by the truncation become boundary legs.
pub fn truncate(g: &PantsGraph, x: &FnPoint, n: usize) -> Result<(PantsGraph, FnPoint)> {
    if n == 0 || n > g.depth() {
        return Err(FnsError::Range(format!("truncation level {n} outside 1..={}", g.depth())));
    }
    let keep: Vec<Option<usize>> = {
        let mut next = 0;
        g.pants
            .iter()
            .map(|p| {
                (p.level <= n).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let mut curves = Vec::new();
    let mut coords = Vec::new();
    let mut new_id = vec![None; g.curves.len()];
    for (id, c) in g.curves.iter().enumerate() {
        let ends: Vec<(usize, usize)> =
            c.ends.iter().filter_map(|&(p, s)| keep[p].map(|q| (q, s))).collect();
        if ends.is_empty() {
            continue;
        }
        let twist = if ends.len() == 2 { x.coords[id].twist } else { 0.0 };
        new_id[id] = Some(curves.len());
        curves.push(CurveEdge { label: c.label.clone(), law_index: c.law_index, ends });
        coords.push(Coord { length: x.coords[id].length, twist });
    }
    let pants = g
        .pants
        .iter()
        .filter(|p| p.level <= n)
        .map(|p| Pants {
            slots: p.slots.map(|s| match s {
                Slot::Curve { id } => Slot::Curve { id: new_id[id].expect("attached curve kept") },
                Slot::Cusp => Slot::Cusp,
            }),
            level: p.level,
        })
        .collect();
    let out = PantsGraph { pants, curves };
    out.validate()?;
    Ok((out, FnPoint { coords }))
}

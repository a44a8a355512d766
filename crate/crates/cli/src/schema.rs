//! JSON files: surfaces and constants profiles, schema `fns-1`.

use std::path::Path;

use fns_core::metrics::ConstantsProfile;
use fns_core::surface::{build_family, Coord, CurveEdge, FnPoint, Pants, PantsGraph, SurfaceFamily};
use fns_core::Ext;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub const FORMAT: &str = "fns-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    pub id: usize,
    pub label: String,
    pub law_index: Option<usize>,
    /// `{mantissa, exp2}`, bit-exact.
    pub length: Ext,
    pub twist: f64,
    pub boundary: bool,
    pub ends: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub version: String,
    pub family: SurfaceFamily,
    pub depth: usize,
    pub pants: Vec<Pants>,
    pub curves: Vec<CurveRecord>,
}

fn check_version(v: &str) -> CliResult<()> {
    if v != FORMAT {
        return Err(CliError::Usage(format!("schema version '{v}', expected '{FORMAT}'")));
    }
    Ok(())
}

impl SurfaceFile {
    pub fn build(family: &SurfaceFamily, depth: usize) -> CliResult<Self> {
        let (g, x) = build_family(family, depth)?;
        Ok(Self::from_surface(family, depth, &g, &x))
    }

    pub fn from_surface(family: &SurfaceFamily, depth: usize, g: &PantsGraph, x: &FnPoint) -> Self {
        let curves = g
            .curves
            .iter()
            .zip(&x.coords)
            .enumerate()
            .map(|(id, (c, k))| CurveRecord {
                id,
                label: c.label.clone(),
                law_index: c.law_index,
                length: k.length,
                twist: k.twist,
                boundary: !c.is_interior(),
                ends: c.ends.clone(),
            })
            .collect();
        SurfaceFile { version: FORMAT.into(), family: family.clone(), depth, pants: g.pants.clone(), curves }
    }

    pub fn to_surface(&self) -> CliResult<(PantsGraph, FnPoint)> {
        check_version(&self.version)?;
        let mut curves = Vec::with_capacity(self.curves.len());
        let mut coords = Vec::with_capacity(self.curves.len());
        for (pos, c) in self.curves.iter().enumerate() {
            if c.id != pos {
                return Err(CliError::Usage(format!("curve id {} at position {pos}", c.id)));
            }
            let edge = CurveEdge { label: c.label.clone(), law_index: c.law_index, ends: c.ends.clone() };
            if edge.is_interior() == c.boundary {
                return Err(CliError::Usage(format!("curve {} boundary flag disagrees with its ends", c.label)));
            }
            curves.push(edge);
            coords.push(Coord { length: c.length, twist: c.twist });
        }
        let g = PantsGraph { pants: self.pants.clone(), curves };
        let x = FnPoint { coords };
        g.validate()?;
        x.validate(&g)?;
        Ok((g, x))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("surface serializes") + "\n"
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        let f: SurfaceFile =
            serde_json::from_str(s).map_err(|e| CliError::Usage(format!("surface file: {e}")))?;
        check_version(&f.version)?;
        Ok(f)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub version: String,
    /// SHA-256 of the profile's JSON form.
    pub hash: String,
    pub profile: ConstantsProfile,
}

impl ProfileFile {
    pub fn new(profile: ConstantsProfile) -> Self {
        ProfileFile { version: FORMAT.into(), hash: profile.hash(), profile }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes") + "\n"
    }

    /// Parses and checks the recorded hash; a mismatch is a verification failure.
    pub fn from_json(s: &str) -> CliResult<ConstantsProfile> {
        let f: ProfileFile =
            serde_json::from_str(s).map_err(|e| CliError::Usage(format!("profile file: {e}")))?;
        check_version(&f.version)?;
        let actual = f.profile.hash();
        if actual != f.hash {
            return Err(CliError::Failed(format!("profile hash mismatch: file says {}, contents hash to {actual}", f.hash)));
        }
        f.profile.validate()?;
        Ok(f.profile)
    }

    pub fn load(path: &Path) -> CliResult<ConstantsProfile> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

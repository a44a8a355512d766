//! Grid scans written as CSV.

use std::io::Write;

use fns_core::constructions::law_curve;
use fns_core::length::{apply_twist, holonomy_build, rho_of, TwistVector};
use fns_core::metrics::{dls_estimate, dls_twist_lower, dls_twist_upper, dqc_lower_multitwist, ConstantsProfile};
use fns_core::surface::{build_family, LengthLaw, MarkedPair, SurfaceFamily, TwistLaw};

use crate::numfmt::sig12;
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    DlsUpper,
    DlsLower,
    DqcLower,
    DlsEstimate,
    MembershipRatio,
}

pub struct ScanSpec {
    pub quantity: Quantity,
    pub family: SurfaceFamily,
    /// Law indices.
    pub n: Vec<usize>,
    /// Twist magnitudes; `None` uses `ln|ln ε_n|`.
    pub t: Option<Vec<f64>>,
    pub tau_law: TwistLaw,
    pub twist_depth: u32,
    pub profile: ConstantsProfile,
}

fn ratio_row(n: usize, law: &LengthLaw, tau: &TwistLaw) -> CliResult<Vec<String>> {
    let ln_ratio = tau.ln_abs(n, law)? - law.abs_ln(n)?.max(1.0).ln();
    Ok(vec![n.to_string(), sig12(ln_ratio), sig12(ln_ratio.exp())])
}

/// Header and rows in grid order.
pub fn scan_rows(spec: &ScanSpec) -> CliResult<(Vec<String>, Vec<Vec<String>>)> {
    if spec.n.is_empty() || spec.t.as_ref().is_some_and(|t| t.is_empty()) {
        return Err(CliError::Usage("empty grid".into()));
    }
    if spec.n.contains(&0) {
        return Err(CliError::Usage("law indices start at 1".into()));
    }
    if spec.quantity == Quantity::MembershipRatio {
        let header = ["n", "ln_ratio", "ratio"].map(String::from).to_vec();
        let rows = spec.n.iter().map(|&n| ratio_row(n, &spec.family.length_law, &spec.tau_law)).collect::<CliResult<_>>()?;
        return Ok((header, rows));
    }
    let name = match spec.quantity {
        Quantity::DlsUpper => "dls_upper",
        Quantity::DlsLower => "dls_lower",
        Quantity::DqcLower => "dqc_lower",
        Quantity::DlsEstimate => "dls_estimate",
        Quantity::MembershipRatio => unreachable!("handled above"),
    };
    let header = vec!["n".into(), "t".into(), name.into()];
    let mut rows = Vec::new();
    for &n in &spec.n {
        let (g, x) = build_family(&spec.family, n + 1)?;
        let i = law_curve(&g, n)?;
        let ts = match &spec.t {
            Some(t) => t.clone(),
            None => vec![x.length(i).ln().abs().ln()],
        };
        let rho = match spec.quantity {
            Quantity::DqcLower => Some(rho_of(&holonomy_build(&g, &x)?, i)?),
            _ => None,
        };
        for t in ts {
            let v = match spec.quantity {
                Quantity::DlsUpper => dls_twist_upper(&g, &x, i, t)?.value,
                Quantity::DlsLower => dls_twist_lower(&g, &x, i, t, &spec.profile)?.value,
                Quantity::DqcLower => {
                    dqc_lower_multitwist(&TwistVector::single(i, t), &[(i, rho.expect("angle measured"))])?.value
                }
                Quantity::DlsEstimate => {
                    let y = apply_twist(&g, &x, &TwistVector::single(i, t))?;
                    let pair = MarkedPair::new(g.clone(), x.clone(), y)?;
                    dls_estimate(&pair, spec.twist_depth, n + 1)?.bound.value
                }
                Quantity::MembershipRatio => unreachable!("handled above"),
            };
            rows.push(vec![n.to_string(), sig12(t), sig12(v)]);
        }
    }
    Ok((header, rows))
}

/// Writes UTF-8 CSV with LF line endings.
pub fn write_csv<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| CliError::Usage(format!("writing csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

use crate::{CliError, CliResult};

/// Parses `a:b` (unit step), `a:b:step` or a comma list.
pub fn parse_f64(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("cannot parse grid '{spec}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    let v = match parts.as_slice() {
        [a, b] | [a, b, _] => {
            let (a, b) = (num(a)?, num(b)?);
            let step = if parts.len() == 3 { num(parts[2])? } else { 1.0 };
            if !(step > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            let n = ((b - a) / step + 1e-9).floor();
            if n < 0.0 {
                Vec::new()
            } else {
                (0..=n as usize).map(|k| a + k as f64 * step).collect()
            }
        }
        [list] if !list.trim().is_empty() => list.split(',').map(num).collect::<CliResult<_>>()?,
        _ => return Err(bad()),
    };
    if v.is_empty() {
        return Err(CliError::Usage(format!("grid '{spec}' is empty")));
    }
    Ok(v)
}

pub fn parse_usize(spec: &str) -> CliResult<Vec<usize>> {
    parse_f64(spec)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Usage(format!("grid '{spec}' needs non-negative integers")))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_usize("5:8").unwrap(), vec![5, 6, 7, 8]);
        assert_eq!(parse_f64("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_f64("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_f64("3:1").is_err());
        assert!(parse_f64("").is_err());
        assert!(parse_usize("1.5").is_err());
    }
}

//! Number, angle and grid parsing for command-line values.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Parses decimal radians or a rational multiple of pi such as `pi/4`,
/// `-3pi/4`, `2*pi/3` or `0.5*pi`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim().to_ascii_lowercase();
    let bad = || Error::InvalidParameter(format!("cannot parse angle '{text}'"));
    let Some(pos) = s.find("pi") else {
        return parse_finite(&s).map_err(|_| bad());
    };
    let (head, tail) = (s[..pos].trim(), s[pos + 2..].trim());
    let head = head.strip_suffix('*').unwrap_or(head).trim();
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => parse_finite(h).map_err(|_| bad())?,
    };
    let denom = match tail {
        "" => 1.0,
        t => {
            let d = parse_finite(t.strip_prefix('/').ok_or_else(bad)?.trim()).map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            d
        }
    };
    Ok(coeff * PI / denom)
}

fn parse_finite(s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::InvalidParameter(format!(
            "cannot parse number '{s}'"
        ))),
    }
}

/// Parses a comma list `a,b,c` or an inclusive linspace `lo:hi:n` whose
/// entries may be angle expressions.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let (lo, hi) = (parse_angle(lo)?, parse_angle(hi)?);
            let n: usize =
                n.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
                    Error::InvalidParameter(format!("bad point count in '{text}'"))
                })?;
            if n == 1 {
                return Ok(vec![lo]);
            }
            let step = (hi - lo) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                .collect())
        }
        [_] => text.split(',').map(parse_angle).collect(),
        _ => Err(Error::InvalidParameter(format!(
            "cannot parse grid '{text}'"
        ))),
    }
}

/// Comma list of non-negative integers.
pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse integer '{p}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle(" PI ").unwrap(), PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        for bad in ["", "pi/0", "x", "pi/", "nan", "inf", "pipi"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("0:1:5").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_grid("1,2, pi").unwrap(), vec![1.0, 2.0, PI]);
        assert_eq!(parse_grid("0:pi/2:1").unwrap(), vec![0.0]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }
}

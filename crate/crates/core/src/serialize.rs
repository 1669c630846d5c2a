//! Text round-trip helpers shared by the CSV and JSON emitters.

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits so a parse recovers the exact
/// bit pattern. Non-finite values map to "inf", "-inf", "nan".
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// Parses a float written by [`fmt_f64`] (or any standard decimal form).
pub fn parse_f64(s: &str, location: &str) -> Result<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        t => t.parse::<f64>().map_err(|e| Error::Parse {
            location: location.to_string(),
            message: format!("bad float {t:?}: {e}"),
        }),
    }
}

/// Splits one CSV record into exactly `n` fields.
pub fn split_fields<'a>(line: &'a str, n: usize, location: &str) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != n {
        return Err(Error::Parse {
            location: location.to_string(),
            message: format!("expected {n} fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_fmt_round_trips_exactly() {
        for &x in &[
            0.0,
            -0.0,
            1.0,
            std::f64::consts::PI,
            1e-300,
            -2.2250738585072014e-308,
            6.02214076e23,
            0.1 + 0.2,
        ] {
            let s = fmt_f64(x);
            let back = parse_f64(&s, "test").unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} via {s}");
        }
    }

    #[test]
    fn test_fmt_non_finite() {
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert!(parse_f64("nan", "t").unwrap().is_nan());
        assert_eq!(parse_f64("inf", "t").unwrap(), f64::INFINITY);
    }

    #[test]
    fn test_split_fields_arity_check() {
        assert!(split_fields("a,b,c", 3, "row 1").is_ok());
        assert!(split_fields("a,b", 3, "row 1").is_err());
    }
}

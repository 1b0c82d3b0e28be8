//! Text formats shared by the library and the CLI: round-trip float
//! formatting and the six-coefficient matrix encodings.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Coefficients, SymPosDef3};
use crate::scalar::Real;

/// 17 significant digits in scientific notation; parses back to the same
/// `f64`.
pub fn format_real<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

/// Parses `a,b,c,d,e,f` (whitespace tolerated).
pub fn parse_coefficients_csv(s: &str) -> Result<[f64; 6]> {
    let vals: Vec<f64> = s
        .trim()
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("matrix coefficient `{}`: {e}", p.trim()))))
        .collect::<Result<_>>()?;
    vals.try_into()
        .map_err(|v: Vec<f64>| Error::Parse(format!("expected 6 comma-separated coefficients, found {}", v.len())))
}

pub fn matrix_from_csv_row(s: &str) -> Result<SymPosDef3<f64>> {
    SymPosDef3::from_array(parse_coefficients_csv(s)?)
}

pub fn matrix_to_csv_row<T: Real>(a: &SymPosDef3<T>) -> String {
    a.coefficients().to_array().map(format_real).join(",")
}

pub fn matrix_from_json(s: &str) -> Result<SymPosDef3<f64>> {
    let c: Coefficients<f64> = serde_json::from_str(s).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    SymPosDef3::try_from(c)
}

pub fn matrix_to_json<T: Real + serde::Serialize>(a: &SymPosDef3<T>) -> String {
    serde_json::to_string(&a.coefficients()).expect("coefficients serialise")
}

/// Reads a matrix file: a JSON object, or a single CSV row (an optional
/// `a,b,c,d,e,f` header line is skipped).
pub fn read_matrix_file(path: &Path) -> Result<SymPosDef3<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        return matrix_from_json(trimmed);
    }
    let row = trimmed
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('a'))
        .ok_or_else(|| Error::Parse(format!("{}: no matrix row", path.display())))?;
    matrix_from_csv_row(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses;

    #[test]
    fn formatted_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_and_json_round_trip() {
        let a = witnesses::a3::<f64>();
        assert_eq!(matrix_from_csv_row(&matrix_to_csv_row(&a)).unwrap(), a);
        assert_eq!(matrix_from_json(&matrix_to_json(&a)).unwrap(), a);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(matches!(parse_coefficients_csv("1,2,3"), Err(Error::Parse(_))));
        assert!(matches!(parse_coefficients_csv("1,0,0,1,0,x"), Err(Error::Parse(_))));
        assert!(matches!(matrix_from_csv_row("1,2,0,1,0,1"), Err(Error::NotPositiveDefinite { index: 2, .. })));
        assert!(matrix_from_json(r#"{"a":1,"b":0,"c":0,"d":1,"e":0,"f":1,"g":2}"#).is_err());
    }
}

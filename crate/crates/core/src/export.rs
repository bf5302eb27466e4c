//! Text layouts shared by the CLI: CSV readers and writers.
//!
//! Every float is written with 17 significant digits in scientific notation
//! (`{:.16e}`), columns are comma-separated and lines end with `\n`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::risk::RiskProfile;
use crate::transform::WaveletDecomposition;

/// 17-significant-digit representation; round-trips every `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(e: std::io::Error) -> Error {
    Error::Input(format!("I/O error: {e}"))
}

/// Writes a header and rows of floats.
pub fn write_table<W: Write>(mut out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(out, "{}", header.join(",")).map_err(io_err)?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(format_float).collect();
        writeln!(out, "{}", line.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// `level,index,value` rows; level −1 is the smooth part.
pub fn write_coefficients_csv<W: Write>(mut out: W, decomposition: &WaveletDecomposition) -> Result<()> {
    writeln!(out, "level,index,value").map_err(io_err)?;
    for (level, index, value) in decomposition.rows() {
        writeln!(out, "{level},{index},{}", format_float(value)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// `d,delta` rows.
pub fn write_rule_curve_csv<W: Write>(out: W, curve: &[(f64, f64)]) -> Result<()> {
    write_table(out, &["d", "delta"], curve.iter().map(|&(d, v)| vec![d, v]))
}

pub fn write_risk_profile_csv<W: Write>(out: W, profile: &RiskProfile) -> Result<()> {
    write_table(
        out,
        &["theta", "squared_bias", "variance", "frequentist_risk"],
        profile.rows().map(|(t, b, v, r)| vec![t, b, v, r]),
    )
}

/// `replication,<label…>` matrix, one row per replication.
pub fn write_matrix_csv<W: Write>(mut out: W, labels: &[String], matrix: &[Vec<f64>]) -> Result<()> {
    let mut header = vec!["replication".to_string()];
    header.extend(labels.iter().cloned());
    writeln!(out, "{}", header.join(",")).map_err(io_err)?;
    for (r, row) in matrix.iter().enumerate() {
        let cells: Vec<String> = row.iter().copied().map(format_float).collect();
        writeln!(out, "{r},{}", cells.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// A signal read from CSV: values plus the `x` column when one was given.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTable {
    pub x: Option<Vec<f64>>,
    pub values: Vec<f64>,
    pub header: Option<Vec<String>>,
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split([',', ';', '\t', ' '])
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .collect()
}

/// Reads one value column, or `(x, y)` pairs. An optional non-numeric
/// header is accepted on the first non-blank line only.
pub fn read_signal_csv<R: BufRead>(input: R) -> Result<SignalTable> {
    let mut x = Vec::new();
    let mut values = Vec::new();
    let mut header = None;
    let mut width = None;
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let fields = split_fields(&line);
        if fields.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if width.is_none() && header.is_none() => {
                header = Some(fields.iter().map(|s| s.to_string()).collect());
                continue;
            }
            Err(_) => {
                return Err(Error::input(format!("line {}: non-numeric value in {line:?}", lineno + 1)));
            }
        };
        if row.len() > 2 {
            return Err(Error::input(format!(
                "line {}: expected 1 or 2 columns, found {}",
                lineno + 1,
                row.len()
            )));
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::input(format!("line {}: inconsistent column count", lineno + 1)));
            }
            _ => {}
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::input(format!("line {}: value {bad} is not finite", lineno + 1)));
        }
        if row.len() == 2 {
            x.push(row[0]);
            values.push(row[1]);
        } else {
            values.push(row[0]);
        }
    }
    Ok(SignalTable {
        x: (width == Some(2)).then_some(x),
        values,
        header,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_single_column_with_header() {
        let t = read_signal_csv("value\n1.5\n\n-2\n3e-1\n".as_bytes()).unwrap();
        assert_eq!(t.values, vec![1.5, -2.0, 0.3]);
        assert!(t.x.is_none());
        assert_eq!(t.header.unwrap(), vec!["value"]);
    }

    #[test]
    fn reads_pairs() {
        let t = read_signal_csv("x,y\n0,1\n1,2\n".as_bytes()).unwrap();
        assert_eq!(t.values, vec![1.0, 2.0]);
        assert_eq!(t.x.unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_signal_csv("1\nabc\n".as_bytes()).is_err());
        assert!(read_signal_csv("1\n1,2\n".as_bytes()).is_err());
        assert!(read_signal_csv("1,2,3\n".as_bytes()).is_err());
        assert!(read_signal_csv("1\nNaN\n".as_bytes()).is_err());
    }

    #[test]
    fn table_layout() {
        let mut buf = Vec::new();
        write_rule_curve_csv(&mut buf, &[(0.0, -0.5)]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "d,delta\n0.0000000000000000e0,-5.0000000000000000e-1\n"
        );
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &["a".into()], &[vec![1.0]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "replication,a\n0,1.0000000000000000e0\n");
    }

    #[test]
    fn coefficient_rows() {
        let w = WaveletDecomposition::from_parts(vec![2.0], vec![vec![0.5], vec![1.0, -1.0]], 0).unwrap();
        let mut buf = Vec::new();
        write_coefficients_csv(&mut buf, &w).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "level,index,value");
        assert!(lines[1].starts_with("-1,0,"));
        assert!(lines[4].starts_with("1,1,-1."));
        assert_eq!(lines.len(), 5);
    }

    proptest! {
        #[test]
        fn float_format_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_float(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}

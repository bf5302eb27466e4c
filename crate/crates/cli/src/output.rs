use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Buffered writer on `path`, or stdout.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut out = sink(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

/// `points` equispaced values from `min` to `max`; one point sits at `min`.
pub fn linear_grid(min: f64, max: f64, points: usize) -> CliResult<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(CliError::usage(format!("grid bounds must satisfy min <= max, got [{min}, {max}]")));
    }
    Ok(match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (points - 1) as f64;
            let mut g: Vec<f64> = (0..points).map(|i| min + i as f64 * step).collect();
            g[points - 1] = max;
            g
        }
    })
}

//! Time-series export as CSV or JSON.
//!
//! Floating-point columns are written with 17 significant digits (`%.17g`),
//! enough to round-trip every `f64` exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::engine::TimeSeries;

/// Column header of the CSV export.
pub const CSV_HEADER: [&str; 7] = ["t_hours", "current_a", "soc", "fec", "mode", "day", "mission"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}', expected csv or json")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("writing {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Stream(#[from] io::Error),
}

/// Formats `x` like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    const DIGITS: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // The exponent after rounding to 17 digits decides the notation.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the series to `writer`. CSV rows and JSON records appear in series
/// order.
pub fn write_timeseries<W: Write>(series: &TimeSeries, format: Format, writer: W) -> Result<(), ExportError> {
    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(writer);
            wtr.write_record(CSV_HEADER)?;
            for s in &series.samples {
                wtr.write_record([
                    format_g17(s.t_hours),
                    format_g17(s.current_a),
                    format_g17(s.soc),
                    format_g17(s.fec),
                    s.mode.to_string(),
                    s.day.to_string(),
                    s.mission.to_string(),
                ])?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, &series.samples)?;
            writer.write_all(b"\n")?;
            writer.flush()?;
        }
    }
    Ok(())
}

/// Writes the series to a file, attaching the path to I/O failures.
pub fn write_timeseries_file(series: &TimeSeries, format: Format, path: &Path) -> Result<(), ExportError> {
    let io_err = |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    match write_timeseries(series, format, BufWriter::new(file)) {
        Err(ExportError::Stream(source)) => Err(io_err(source)),
        Err(ExportError::Csv(e)) if e.is_io_error() => match e.into_kind() {
            csv::ErrorKind::Io(source) => Err(io_err(source)),
            _ => unreachable!("checked is_io_error"),
        },
        other => other,
    }
}

//! File formats: observed-curve CSV input, CSV/JSON result output, SVG plots.

pub mod csv;
pub mod json;
pub mod svg;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::{
    BeamConfig, ComplementarityMetrics, DensityProfile, FitResult, GasParameters, ObservedCurve,
    RotationCurve, WireScanResult,
};

pub use self::csv::load_observed_csv;
pub use self::svg::{emit_svg_plot, Axes, Scale, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Format(format!("unknown output format `{other}` (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Anything `write_results` can serialize.
#[derive(Debug, Clone, Copy)]
pub enum Payload<'a> {
    Profile {
        params: &'a GasParameters,
        profile: &'a DensityProfile,
        curve: &'a RotationCurve,
    },
    Observed(&'a ObservedCurve),
    Scan {
        config: &'a BeamConfig,
        wire_width: f64,
        scan: &'a WireScanResult,
    },
    Fit {
        template: &'a GasParameters,
        points: usize,
        fit: &'a FitResult,
    },
    Metrics(&'a [ComplementarityMetrics]),
    Intensity {
        config: &'a BeamConfig,
        samples: &'a [(f64, f64)],
    },
    WaveSpeed {
        params: &'a GasParameters,
        speed_kms: f64,
    },
}

/// Serializes `payload` in `format`.
pub fn render(format: Format, payload: &Payload<'_>) -> Result<String> {
    match format {
        Format::Csv => Ok(self::csv::render(payload)),
        Format::Json => json::render(payload),
    }
}

/// Writes `payload` to `path`. Output is a pure function of the payload.
pub fn write_results(path: &Path, format: Format, payload: &Payload<'_>) -> Result<()> {
    let text = render(format, payload)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Shortest round-trip decimal; exponent form outside a readable range.
pub(crate) fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

//! Artifact writers. Every file opens with a header naming the experiment,
//! the config hash and the column schema.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::OutputFormat;
use crate::error::{Error, Result};
use crate::series::ConvergenceSeries;

pub const POINT_SCHEMA: &str = "experiment,nx,dx,quantity,value";
pub const SERIES_SCHEMA: &str = "label,dx,error";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub nx: usize,
    pub dx: f64,
    pub quantity: String,
    pub value: f64,
}

/// 17 significant digits, enough for a lossless round trip.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fit_line(series: &ConvergenceSeries) -> String {
    match series.fit {
        Some(f) => format!(
            "# fit nu={:.6} c={:.6e} rms={:.3e}",
            f.exponent, f.prefactor, f.rms_log_residual
        ),
        None => "# fit none".to_string(),
    }
}

fn header(experiment: &str, config_hash: &str, schema: &str) -> String {
    format!("# experiment={experiment}\n# config_hash={config_hash}\n# schema={schema}\n")
}

fn write(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn render_points(experiment: &str, config_hash: &str, rows: &[Row], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut out = header(experiment, config_hash, POINT_SCHEMA);
            out.push_str(POINT_SCHEMA);
            out.push('\n');
            for r in rows {
                let _ = writeln!(out, "{},{},{},{},{}", r.experiment, r.nx, fmt17(r.dx), r.quantity, fmt17(r.value));
            }
            Ok(out)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                experiment: &'a str,
                config_hash: &'a str,
                schema: &'a str,
                rows: &'a [Row],
            }
            let doc = Doc {
                experiment,
                config_hash,
                schema: POINT_SCHEMA,
                rows,
            };
            serde_json::to_string_pretty(&doc)
                .map(|s| s + "\n")
                .map_err(|e| Error::Config(e.to_string()))
        }
    }
}

pub fn render_series(
    experiment: &str,
    config_hash: &str,
    series: &ConvergenceSeries,
    format: OutputFormat,
) -> Result<String> {
    if series.samples.is_empty() {
        return Err(Error::contract(format!("series '{}' is empty", series.label)));
    }
    match format {
        OutputFormat::Csv => {
            let mut out = header(experiment, config_hash, SERIES_SCHEMA);
            out.push_str(SERIES_SCHEMA);
            out.push('\n');
            for &(dx, err) in &series.samples {
                let _ = writeln!(out, "{},{},{}", series.label, fmt17(dx), fmt17(err));
            }
            out.push_str(&fit_line(series));
            out.push('\n');
            Ok(out)
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Sample {
                dx: f64,
                error: f64,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                experiment: &'a str,
                config_hash: &'a str,
                schema: &'a str,
                label: &'a str,
                samples: Vec<Sample>,
                fit: Option<crate::fit::PowerLawFit>,
            }
            let doc = Doc {
                experiment,
                config_hash,
                schema: SERIES_SCHEMA,
                label: &series.label,
                samples: series.samples.iter().map(|&(dx, error)| Sample { dx, error }).collect(),
                fit: series.fit,
            };
            serde_json::to_string_pretty(&doc)
                .map(|s| s + "\n")
                .map_err(|e| Error::Config(e.to_string()))
        }
    }
}

pub fn emit_points(
    dir: &Path,
    experiment: &str,
    config_hash: &str,
    rows: &[Row],
    format: OutputFormat,
) -> Result<PathBuf> {
    let text = render_points(experiment, config_hash, rows, format)?;
    write(&dir.join(format!("{experiment}.{}", format.extension())), &text)
}

/// Writes `<dir>/series/<label>.<ext>`.
pub fn emit_series(
    dir: &Path,
    experiment: &str,
    config_hash: &str,
    series: &ConvergenceSeries,
    format: OutputFormat,
) -> Result<PathBuf> {
    let text = render_series(experiment, config_hash, series, format)?;
    write(
        &dir.join("series").join(format!("{}.{}", series.label, format.extension())),
        &text,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fit_line() {
        let s = ConvergenceSeries::new("q", vec![(0.1, 0.02), (0.05, 0.005)]).unwrap();
        let text = render_series("x", "h", &s, OutputFormat::Csv).unwrap();
        let last = text.lines().last().unwrap();
        assert!(last.starts_with("# fit nu=2.000000 "), "{last}");
        assert!(text.lines().any(|l| l == SERIES_SCHEMA));
    }

    #[test]
    fn empty_series_refused() {
        let s = ConvergenceSeries::unfitted("e", vec![]);
        assert!(render_series("x", "h", &s, OutputFormat::Csv).is_err());
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_series(dir.path(), "x", "h", &s, OutputFormat::Json).is_err());
        assert!(!dir.path().join("series").exists());
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-9, -2.5e300] {
            assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn points_header_and_json() {
        let rows = vec![Row {
            experiment: "spectrum".into(),
            nx: 8,
            dx: 0.125,
            quantity: "p_1".into(),
            value: 2.0,
        }];
        let csv = render_points("spectrum", "abc", &rows, OutputFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment=spectrum");
        assert_eq!(lines[1], "# config_hash=abc");
        assert_eq!(lines[3], POINT_SCHEMA);
        assert!(lines[4].starts_with("spectrum,8,1.2500000000000000e-1,p_1,"));
        let json = render_points("spectrum", "abc", &rows, OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["rows"][0]["value"], 2.0);
    }

    #[test]
    fn unwritable_output_is_io_error() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let bad = file.path().join("sub");
        let err = emit_points(&bad, "x", "h", &[], OutputFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}

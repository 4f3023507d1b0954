//! End-to-end experiment runner behind the command-line front end.
//!
//! Each experiment produces point rows (`experiment,nx,dx,quantity,value`),
//! convergence series (`label,dx,error` plus a fit line) and a list of band
//! checks. The exit status is 0 exactly when every executed check passes.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use serde::Serialize;

pub use config::{resolve, Experiment, ExperimentConfig, OutputFormat, Overrides};
pub use output::Row;

use crate::error::{Error, Result};
use crate::series::ConvergenceSeries;
use crate::well::{solve_grids, PotentialSpec, WellSpectrum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ACCEPTANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub passed: bool,
}

impl Check {
    pub fn band(label: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            label: label.into(),
            value,
            lo,
            hi,
            passed: (lo..=hi).contains(&value),
        }
    }

    pub fn at_most(label: impl Into<String>, value: f64, max: f64) -> Self {
        Self::band(label, value, f64::NEG_INFINITY, max)
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        Self::band(label, if ok { 1.0 } else { 0.0 }, 1.0, 1.0)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub rows: Vec<Row>,
    pub series: Vec<ConvergenceSeries>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    fn from_parts(experiment: Experiment, per_grid: Vec<(Vec<Row>, Vec<Check>)>, series: Vec<ConvergenceSeries>) -> Self {
        let mut rows = Vec::new();
        let mut checks = Vec::new();
        for (r, c) in per_grid {
            rows.extend(r);
            checks.extend(c);
        }
        Self {
            experiment,
            rows,
            series,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config_hash: String,
    pub reports: Vec<ExperimentReport>,
    pub artifacts: Vec<PathBuf>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(ExperimentReport::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_ACCEPTANCE
        }
    }

    /// One line per fit, then one per failed check.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for r in &self.reports {
            for s in &r.series {
                if let Some(f) = s.fit {
                    lines.push(format!(
                        "fit {} {} nu={:.6} c={:.6e} rms={:.3e}",
                        r.experiment, s.label, f.exponent, f.prefactor, f.rms_log_residual
                    ));
                }
            }
        }
        for r in &self.reports {
            for c in r.failures() {
                lines.push(format!(
                    "FAIL {} {}: value={:e} band=[{:e}, {:e}]",
                    r.experiment, c.label, c.value, c.lo, c.hi
                ));
            }
        }
        lines
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Well spectra for every configured grid, solved concurrently.
pub fn solve_config_spectra(cfg: &ExperimentConfig) -> Result<Vec<WellSpectrum>> {
    let pot = PotentialSpec::with_wall(cfg.wall_height);
    solve_grids(&cfg.grids()?, &pot, cfg.mass, cfg.hbar)
}

/// Runs the configured experiments without touching the file system.
/// `spectra`, when given, must belong to the same configuration.
pub fn compute(cfg: &ExperimentConfig, spectra: Option<&[WellSpectrum]>) -> Result<Vec<ExperimentReport>> {
    cfg.validate()?;
    let grids = cfg.grids()?;
    let selected: Vec<Experiment> = match cfg.experiment {
        Experiment::All => Experiment::SINGLE.to_vec(),
        e => vec![e],
    };
    let needs_well = selected.iter().any(|e| matches!(e, Experiment::Well | Experiment::Moments));
    let owned;
    let spectra: &[WellSpectrum] = match spectra {
        Some(s) => s,
        None if needs_well => {
            owned = solve_config_spectra(cfg)?;
            &owned
        }
        None => &[],
    };
    selected
        .into_iter()
        .map(|e| match e {
            Experiment::SbpCheck => experiments::sbp_check(cfg, &grids),
            Experiment::Spectrum => experiments::spectrum(cfg, &grids),
            Experiment::Leakage => experiments::leakage(cfg, &grids),
            Experiment::Well => experiments::well(cfg, spectra),
            Experiment::Moments => experiments::moments(cfg, spectra),
            Experiment::Commutator => experiments::commutator(cfg, &grids),
            Experiment::Dispersion => experiments::dispersion(cfg, &grids),
            Experiment::All => unreachable!("expanded above"),
        })
        .collect()
}

/// Writes the artifacts of computed reports. Files are written even when
/// checks fail.
pub fn write_artifacts(cfg: &ExperimentConfig, reports: &[ExperimentReport]) -> Result<Vec<PathBuf>> {
    let hash = cfg.hash();
    let mut paths = Vec::new();
    for r in reports {
        let name = r.experiment.name();
        paths.push(output::emit_points(&cfg.output_dir, name, &hash, &r.rows, cfg.format)?);
        for s in &r.series {
            paths.push(output::emit_series(&cfg.output_dir, name, &hash, s, cfg.format)?);
        }
    }
    Ok(paths)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let reports = compute(cfg, None)?;
    let artifacts = write_artifacts(cfg, &reports)?;
    Ok(RunSummary {
        config_hash: cfg.hash(),
        reports,
        artifacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(experiment: Experiment, grids: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig {
            grid_sizes: grids,
            ..ExperimentConfig::defaults(experiment)
        }
    }

    #[test]
    fn checks() {
        assert!(Check::band("x", 1.0, 0.5, 1.5).passed);
        assert!(!Check::band("x", f64::NAN, 0.5, 1.5).passed);
        assert!(Check::at_most("x", 0.0, 0.0).passed);
        assert!(!Check::flag("x", false).passed);
    }

    #[test]
    fn spectrum_at_32() {
        let cfg = small(Experiment::Spectrum, vec![32]);
        let reports = compute(&cfg, None).unwrap();
        let r = &reports[0];
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let zero = r.rows.iter().find(|row| row.quantity == "zero_modes").unwrap();
        assert_eq!(zero.value, 2.0);
        assert_eq!(r.rows.iter().filter(|row| row.quantity.starts_with("p_")).count(), 30);
        assert!(r.rows.iter().any(|row| row.quantity == "quarter_wave"));
    }

    #[test]
    fn spectrum_oracle_scale() {
        let cfg = small(Experiment::Spectrum, vec![5, 8, 11, 12]);
        let r = &compute(&cfg, None).unwrap()[0];
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn well_at_64_with_four_levels() {
        let cfg = small(Experiment::Well, vec![64]);
        let r = &compute(&cfg, None).unwrap()[0];
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        for n in 1..=4 {
            assert!(r.rows.iter().any(|row| row.quantity == format!("continuum_overlap_n{n}")));
        }
    }

    #[test]
    fn sbp_commutator_dispersion_pass() {
        for e in [Experiment::SbpCheck, Experiment::Commutator, Experiment::Dispersion] {
            let cfg = small(e, vec![32, 64, 128]);
            let r = &compute(&cfg, None).unwrap()[0];
            assert!(r.passed(), "{e}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn run_writes_headed_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            output_dir: dir.path().to_path_buf(),
            ..small(Experiment::Commutator, vec![16, 32])
        };
        let summary = run_experiment(&cfg).unwrap();
        assert_eq!(summary.artifacts.len(), 2);
        for path in &summary.artifacts {
            let text = std::fs::read_to_string(path).unwrap();
            assert!(text.starts_with("# experiment=commutator\n# config_hash="));
        }
        assert!(summary.summary_lines()[0].starts_with("fit commutator commutator_interior nu="));
    }

    #[test]
    fn io_errors_map_to_exit_three() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let cfg = ExperimentConfig {
            output_dir: file.path().join("x"),
            ..small(Experiment::Dispersion, vec![8])
        };
        let err = run_experiment(&cfg).unwrap_err();
        assert_eq!(exit_code_for(&err), EXIT_IO);
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use num_complex::Complex64;

use super::config::{Experiment, ExperimentConfig};
use super::output::Row;
use super::{Check, ExperimentReport};
use crate::error::Result;
use crate::grid::Grid;
use crate::linalg::ComplexVector;
use crate::momentum::{
    analytic_eigenvalues, analytic_eigenvector, boundary_determinant_at, boundary_flux, commutator_defect,
    count_zero_modes, dispersion_interior, lowest_modes, numerical_spectrum, plane_wave_stencil_defect,
    quarter_wave_defect, MomentumOperator,
};
use crate::observables::{moment_record, MomentRecord};
use crate::oracle::ORACLE_CAP;
use crate::sbp::build_sbp21;
use crate::series::ConvergenceSeries;
use crate::well::{continuum_energy, StateLabel, WellSpectrum, PAIR_TOLERANCE};

pub const SBP_RANDOM_PAIRS: usize = 100;
pub const LEAKAGE_MODES: usize = 3;
pub const DISPERSION_SAMPLES: usize = 20;

struct Rows {
    experiment: &'static str,
    grid: Grid,
    rows: Vec<Row>,
}

impl Rows {
    fn new(experiment: Experiment, grid: &Grid) -> Self {
        Self {
            experiment: experiment.name(),
            grid: *grid,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, quantity: impl Into<String>, value: f64) {
        self.rows.push(Row {
            experiment: self.experiment.to_string(),
            nx: self.grid.n_points(),
            dx: self.grid.dx(),
            quantity: quantity.into(),
            value,
        });
    }
}

fn fitted_band(series: &ConvergenceSeries, lo: f64, hi: f64) -> Option<Check> {
    series
        .exponent()
        .map(|nu| Check::band(format!("{} nu", series.label), nu, lo, hi))
}

fn tag(check: Check, grid: &Grid) -> Check {
    Check {
        label: format!("{} nx={}", check.label, grid.n_points()),
        ..check
    }
}

pub fn sbp_check(_cfg: &ExperimentConfig, grids: &[Grid]) -> Result<ExperimentReport> {
    let per_grid: Vec<(Vec<Row>, Vec<Check>)> = grids
        .par_iter()
        .map(|grid| -> Result<_> {
            let sbp = build_sbp21(grid)?;
            let n = grid.n_points();
            let q = sbp.q_matrix();
            let mut qtq = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let b = match (i, j) {
                        (0, 0) => -1.0,
                        _ if i == n - 1 && j == n - 1 => 1.0,
                        _ => 0.0,
                    };
                    qtq = qtq.max((q[(i, j)] + q[(j, i)] - b).abs());
                }
            }
            let constant = sbp
                .apply_derivative_real(&vec![1.0; n])?
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let linear = sbp
                .apply_derivative_real(&grid.points())?
                .iter()
                .fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let mut random = || -> ComplexVector {
                (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            };
            let mut sbp_defect = 0.0f64;
            for _ in 0..SBP_RANDOM_PAIRS {
                let (u, v) = (random(), random());
                sbp_defect = sbp_defect.max(sbp.verify_sbp_identity(&u, &v)?);
            }
            let mut rows = Rows::new(Experiment::SbpCheck, grid);
            rows.push("qtq_defect", qtq);
            rows.push("constant_defect", constant);
            rows.push("linear_defect", linear);
            rows.push("sbp_identity_defect", sbp_defect);
            let checks = vec![
                tag(Check::at_most("Q^T+Q - B", qtq, 0.0), grid),
                tag(Check::at_most("D 1", constant, 0.0), grid),
                tag(Check::at_most("D x - 1", linear, 1e-12), grid),
                tag(Check::at_most("sbp identity", sbp_defect, 1e-12), grid),
            ];
            Ok((rows.rows, checks))
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentReport::from_parts(Experiment::SbpCheck, per_grid, Vec::new()))
}

pub fn spectrum(cfg: &ExperimentConfig, grids: &[Grid]) -> Result<ExperimentReport> {
    let hbar = cfg.hbar;
    let per_grid: Vec<(Vec<Row>, Vec<Check>)> = grids
        .par_iter()
        .map(|grid| -> Result<_> {
            let n = grid.n_points();
            let scale = hbar / grid.dx();
            let mut rows = Rows::new(Experiment::Spectrum, grid);
            let mut checks = Vec::new();
            let oracle = if n <= ORACLE_CAP {
                Some(numerical_spectrum(grid, hbar)?)
            } else {
                None
            };
            if !grid.is_even() {
                let spec = oracle.expect("odd sizes are oracle scale");
                for (i, z) in spec.iter().enumerate() {
                    rows.push(format!("oracle_re_{i}"), z.re);
                    rows.push(format!("oracle_im_{i}"), z.im);
                }
                let zeros = count_zero_modes(&spec, 1e-8 * scale);
                rows.push("zero_modes", zeros as f64);
                checks.push(tag(Check::band("zero modes", zeros as f64, 3.0, 3.0), grid));
                return Ok((rows.rows, checks));
            }

            let p = analytic_eigenvalues(grid, hbar)?;
            let op = MomentumOperator::on_grid(grid, hbar)?;
            let mut max_residual = 0.0f64;
            let mut max_det = 0.0f64;
            for l in 1..=n - 2 {
                rows.push(format!("p_{l}"), p[l - 1]);
                let e = analytic_eigenvector(grid, l, hbar)?;
                let pv = op.apply(&e.vector)?;
                let res = pv.max_abs_diff(&e.vector.scaled(Complex64::new(e.eigenvalue, 0.0))) / e.vector.max_abs();
                max_residual = max_residual.max(res);
                max_det = max_det.max(boundary_determinant_at(l, n)?.norm());
            }
            let p_min = p.iter().filter(|v| **v != 0.0).fold(f64::INFINITY, |m, v| m.min(v.abs()));
            let mut sorted = p.clone();
            sorted.sort_by(f64::total_cmp);
            let mut negated: Vec<f64> = p.iter().map(|v| -v + 0.0).collect();
            negated.sort_by(f64::total_cmp);
            let symmetric = sorted == negated;
            let zeros = match &oracle {
                Some(spec) => count_zero_modes(spec, 1e-8 * scale),
                None => p.iter().filter(|v| **v == 0.0).count(),
            };
            rows.push("quarter_wave", p_min);
            rows.push("quarter_wave_defect", quarter_wave_defect(grid, hbar)?);
            rows.push("zero_modes", zeros as f64);
            rows.push("max_residual", max_residual);
            rows.push("max_boundary_determinant", max_det);
            rows.push("hermiticity_defect", op.hermiticity_defect());
            rows.push("normality_defect", op.normality_defect());
            checks.push(tag(Check::at_most("eigenpair residual", max_residual, 1e-9), grid));
            checks.push(tag(Check::at_most("boundary determinant", max_det, 1e-8), grid));
            checks.push(tag(Check::flag("spectrum symmetric under negation", symmetric), grid));
            checks.push(tag(Check::band("zero modes", zeros as f64, 2.0, 2.0), grid));
            if let Some(spec) = &oracle {
                let mut re: Vec<f64> = spec.iter().map(|z| z.re).collect();
                re.sort_by(f64::total_cmp);
                let dev = re
                    .iter()
                    .zip(&sorted)
                    .zip(spec)
                    .map(|((a, b), z)| (a - b).abs().max(z.im.abs()))
                    .fold(0.0f64, f64::max);
                rows.push("oracle_max_deviation", dev);
                checks.push(tag(Check::at_most("oracle agreement", dev, 1e-8 * scale), grid));
            }
            Ok((rows.rows, checks))
        })
        .collect::<Result<_>>()?;

    let quarter: Vec<(f64, f64)> = grids
        .iter()
        .filter(|g| g.is_even())
        .map(|g| Ok((g.dx(), quarter_wave_defect(g, hbar)?)))
        .collect::<Result<_>>()?;
    let mut series = Vec::new();
    if quarter.len() >= 2 {
        series.push(ConvergenceSeries::new("quarter_wave", quarter)?);
    }
    let mut report = ExperimentReport::from_parts(Experiment::Spectrum, per_grid, series);
    let bands: Vec<Check> = report.series.iter().filter_map(|s| fitted_band(s, 1.9, 2.1)).collect();
    report.checks.extend(bands);
    Ok(report)
}

pub fn leakage(cfg: &ExperimentConfig, grids: &[Grid]) -> Result<ExperimentReport> {
    let hbar = cfg.hbar;
    let per_grid: Vec<(Vec<Row>, Vec<f64>)> = grids
        .par_iter()
        .map(|grid| -> Result<_> {
            let op = MomentumOperator::on_grid(grid, hbar)?;
            let mut rows = Rows::new(Experiment::Leakage, grid);
            let mut leaks = Vec::new();
            for (m, mode) in lowest_modes(grid, LEAKAGE_MODES, hbar)?.iter().enumerate() {
                let (left, right) = boundary_flux(&op, &mode.vector)?;
                let leak = left.abs().max(right.abs());
                rows.push(format!("p_mode{}", m + 1), mode.eigenvalue);
                rows.push(format!("j_left_mode{}", m + 1), left);
                rows.push(format!("j_right_mode{}", m + 1), right);
                rows.push(format!("leakage_mode{}", m + 1), leak);
                leaks.push(leak);
            }
            Ok((rows.rows, leaks))
        })
        .collect::<Result<_>>()?;

    let mut series = Vec::new();
    for m in 0..LEAKAGE_MODES {
        let samples = grids.iter().zip(&per_grid).map(|(g, (_, l))| (g.dx(), l[m])).collect();
        series.push(ConvergenceSeries::new(format!("leakage_mode{}", m + 1), samples)?);
    }
    let checks = series.iter().filter_map(|s| fitted_band(s, 1.7, 2.3)).collect();
    let rows = per_grid.into_iter().flat_map(|(r, _)| r).collect();
    Ok(ExperimentReport {
        experiment: Experiment::Leakage,
        rows,
        series,
        checks,
    })
}

pub fn well(cfg: &ExperimentConfig, spectra: &[WellSpectrum]) -> Result<ExperimentReport> {
    let mut rows_all = Vec::new();
    let mut checks = Vec::new();
    let mut energy_samples: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cfg.levels];
    for s in spectra {
        let grid = &s.grid;
        let mut rows = Rows::new(Experiment::Well, grid);
        let sbp = build_sbp21(grid)?;
        let n_phys = s.count(StateLabel::Physical);
        let n_unphys = s.count(StateLabel::Unphysical);
        let n_wall = s.count(StateLabel::Wall);
        rows.push("count_physical", n_phys as f64);
        rows.push("count_unphysical", n_unphys as f64);
        rows.push("count_wall", n_wall as f64);
        rows.push("count_anomalies", s.anomalies.len() as f64);
        let cross = s.max_cross_overlap();
        rows.push("max_cross_overlap", cross);
        let max_gap = s
            .pairs
            .iter()
            .map(|p| p.relative_gap(&s.eigenvalues))
            .fold(0.0f64, f64::max);
        rows.push("max_pair_gap", max_gap);
        rows.push("residual_bound", s.residual_bound);
        for n in 1..=cfg.levels {
            let i = s.physical_index(n)?;
            let j = s.unphysical_partner(n)?;
            let exact = continuum_energy(n, grid.length(), s.mass, s.hbar)?;
            let e = s.energies[i];
            let gap = s
                .pairs
                .iter()
                .find(|p| p.index_a == i || p.index_b == i)
                .map_or(f64::NAN, |p| p.relative_gap(&s.eigenvalues));
            let psi = s.state(i);
            rows.push(format!("energy_n{n}"), e);
            rows.push(format!("energy_unphysical_n{n}"), s.energies[j]);
            rows.push(format!("continuum_energy_n{n}"), exact);
            rows.push(format!("energy_deviation_n{n}"), (e - exact).abs());
            rows.push(format!("pair_gap_n{n}"), gap);
            rows.push(format!("continuum_overlap_n{n}"), s.continuum_overlap(n)?);
            rows.push(format!("doubler_similarity_n{n}"), s.doubler_similarity(n)?);
            rows.push(format!("h_norm_n{n}"), sbp.h_norm_real(&psi)?);
            rows.push(format!("euclidean_norm_n{n}"), crate::linalg::norm2(&psi));
            energy_samples[n - 1].push((grid.dx(), (e - exact).abs()));
        }
        checks.push(tag(Check::at_most("phys/unphys overlap", cross, 1e-8), grid));
        checks.push(tag(Check::at_most("pair gap", max_gap, PAIR_TOLERANCE), grid));
        checks.push(tag(
            Check::band("doubler similarity n=1", s.doubler_similarity(1)?, 1.0 - 1e-3, 1.0 + 1e-12),
            grid,
        ));
        checks.push(tag(
            Check::flag(
                "count conservation",
                n_phys + n_unphys + n_wall + s.count(StateLabel::Unpaired) == grid.n_points(),
            ),
            grid,
        ));
        rows_all.extend(rows.rows);
    }
    let mut series = Vec::new();
    for (n, samples) in energy_samples.into_iter().enumerate() {
        let s = ConvergenceSeries::new(format!("energy_n{}", n + 1), samples)?;
        if let Some(c) = fitted_band(&s, 0.7, 1.3) {
            checks.push(c);
            checks.push(Check::flag(format!("{} strictly decreasing", s.label), s.strictly_decreasing()));
        }
        series.push(s);
    }
    Ok(ExperimentReport {
        experiment: Experiment::Well,
        rows: rows_all,
        series,
        checks,
    })
}

pub fn moments(cfg: &ExperimentConfig, spectra: &[WellSpectrum]) -> Result<ExperimentReport> {
    let levels = cfg.levels;
    let records: Vec<Vec<MomentRecord>> = spectra
        .par_iter()
        .map(|s| {
            (1..=levels)
                .flat_map(|n| (1..=4u32).map(move |p| (n, p)))
                .map(|(n, p)| moment_record(s, n, p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut rows_all = Vec::new();
    let mut checks = Vec::new();
    let mut odd_worst = 0.0f64;
    for (s, recs) in spectra.iter().zip(&records) {
        let mut rows = Rows::new(Experiment::Moments, &s.grid);
        for r in recs {
            let key = format!("p{}_n{}", r.power, r.state_index);
            rows.push(format!("moment_re_{key}"), r.discrete_re);
            rows.push(format!("moment_im_{key}"), r.discrete_im);
            rows.push(format!("continuum_{key}"), r.continuum_value);
            rows.push(format!("deviation_{key}"), r.deviation);
            if let Some(g) = r.gram_value {
                rows.push(format!("gram_{key}"), g);
            }
            if r.power % 2 == 1 {
                odd_worst = odd_worst.max(r.deviation / (s.hbar / s.grid.dx()));
            }
        }
        rows_all.extend(rows.rows);
    }
    checks.push(Check::at_most("odd moments / (hbar/dx)", odd_worst, 1e-8));

    let mut series = Vec::new();
    for n in 1..=levels {
        for p in 1..=4u32 {
            let samples: Vec<(f64, f64)> = spectra
                .iter()
                .zip(&records)
                .map(|(s, recs)| {
                    let r = recs
                        .iter()
                        .find(|r| r.state_index == n && r.power == p)
                        .expect("record computed above");
                    (s.grid.dx(), r.deviation)
                })
                .collect();
            let label = format!("moment_p{p}_n{n}");
            if p % 2 == 1 {
                series.push(ConvergenceSeries::unfitted(label, samples));
            } else {
                let s = ConvergenceSeries::new(label, samples)?;
                checks.extend(fitted_band(&s, 0.7, 1.3));
                series.push(s);
            }
        }
    }
    Ok(ExperimentReport {
        experiment: Experiment::Moments,
        rows: rows_all,
        series,
        checks,
    })
}

/// Gaussian bump centred in the domain, width `0.1 L`.
pub fn gaussian_state(grid: &Grid) -> ComplexVector {
    let c = 0.5 * (grid.a() + grid.b());
    let w = 0.02 * grid.length() * grid.length();
    ComplexVector::from_real(&grid.points().iter().map(|x| (-(x - c).powi(2) / w).exp()).collect::<Vec<_>>())
}

pub fn commutator(cfg: &ExperimentConfig, grids: &[Grid]) -> Result<ExperimentReport> {
    let hbar = cfg.hbar;
    let per_grid: Vec<(Vec<Row>, Vec<Check>, f64)> = grids
        .par_iter()
        .map(|grid| -> Result<_> {
            let op = MomentumOperator::on_grid(grid, hbar)?;
            let r = commutator_defect(&op, grid, &gaussian_state(grid))?;
            let mut rows = Rows::new(Experiment::Commutator, grid);
            rows.push("interior_deviation", r.interior_deviation);
            rows.push("structure_defect", r.structure_defect);
            let checks = vec![tag(
                Check::at_most("commutator structure", r.structure_defect, 1e-12 * hbar.max(1.0)),
                grid,
            )];
            Ok((rows.rows, checks, r.interior_deviation))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<(f64, f64)> = grids.iter().zip(&per_grid).map(|(g, p)| (g.dx(), p.2)).collect();
    let series = ConvergenceSeries::new("commutator_interior", samples)?;
    let mut report = ExperimentReport::from_parts(
        Experiment::Commutator,
        per_grid.into_iter().map(|(r, c, _)| (r, c)).collect(),
        Vec::new(),
    );
    report.checks.extend(fitted_band(&series, 1.9, 2.1));
    report.series.push(series);
    Ok(report)
}

/// `kappa_j = (-0.95 + 0.1 j) pi / dx`, `j = 0..20`.
pub fn dispersion_wavenumbers(dx: f64) -> Vec<f64> {
    (0..DISPERSION_SAMPLES)
        .map(|j| (-0.95 + 0.1 * j as f64) * std::f64::consts::PI / dx)
        .collect()
}

pub fn dispersion(cfg: &ExperimentConfig, grids: &[Grid]) -> Result<ExperimentReport> {
    let hbar = cfg.hbar;
    let per_grid: Vec<(Vec<Row>, Vec<Check>)> = grids
        .par_iter()
        .map(|grid| -> Result<_> {
            let dx = grid.dx();
            let mut rows = Rows::new(Experiment::Dispersion, grid);
            let mut worst = 0.0f64;
            for (j, kappa) in dispersion_wavenumbers(dx).into_iter().enumerate() {
                let p = dispersion_interior(kappa, dx, hbar)?;
                let defect = plane_wave_stencil_defect(kappa, dx, hbar, grid.n_points())?;
                rows.push(format!("kappa_{j}"), kappa);
                rows.push(format!("p_{j}"), p);
                rows.push(format!("stencil_defect_{j}"), defect);
                worst = worst.max(defect);
            }
            let checks = vec![tag(Check::at_most("plane-wave stencil", worst, 1e-12 * hbar.max(1.0)), grid)];
            Ok((rows.rows, checks))
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentReport::from_parts(Experiment::Dispersion, per_grid, Vec::new()))
}

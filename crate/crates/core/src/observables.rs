//! H-weighted momentum moments `<psi | P^n | psi>` of well eigenstates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::grid::Grid;
use crate::linalg::ComplexVector;
use crate::momentum::MomentumOperator;
use crate::series::ConvergenceSeries;
use crate::well::{check_refining, solve_grids, PotentialSpec, WellSpectrum};

pub const MAX_POWER: u32 = 8;

/// Allowed deviation of `||psi||_H` from one.
pub const NORM_TOLERANCE: f64 = 1e-8;

fn check_normalized(op: &MomentumOperator, psi: &ComplexVector) -> Result<()> {
    check_len(op.sbp().len(), psi.len())?;
    let norm = op.sbp().h_norm(psi)?;
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// `<psi, P^power psi>_H` for an H-normalized `psi`, `1 <= power <= 8`.
pub fn moment(op: &MomentumOperator, psi: &ComplexVector, power: u32) -> Result<Complex64> {
    if !(1..=MAX_POWER).contains(&power) {
        return Err(Error::contract(format!("moment power must lie in 1..={MAX_POWER}, got {power}")));
    }
    check_normalized(op, psi)?;
    let p = op.apply_power(psi, power)?;
    op.sbp().inner_product(psi, &p)
}

/// `<psi, (P^† P)^k psi>_H` with the plain conjugate transpose.
pub fn gram_moment(op: &MomentumOperator, psi: &ComplexVector, k: u32) -> Result<Complex64> {
    if k < 1 || 2 * k > MAX_POWER {
        return Err(Error::contract(format!(
            "gram moment order must lie in 1..={}, got {k}",
            MAX_POWER / 2
        )));
    }
    check_normalized(op, psi)?;
    let mut v = psi.clone();
    for _ in 0..k {
        v = op.apply_adjoint(&op.apply(&v)?)?;
    }
    op.sbp().inner_product(psi, &v)
}

/// `(n pi hbar / L)^power` for `power` in {2, 4}.
pub fn continuum_moment(n: usize, power: u32, length: f64, hbar: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::contract("continuum levels are numbered from 1"));
    }
    if power != 2 && power != 4 {
        return Err(Error::contract(format!(
            "continuum moments are tabulated for powers 2 and 4, got {power}"
        )));
    }
    Ok((n as f64 * PI * hbar / length).powi(power as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRecord {
    pub state_index: usize,
    pub power: u32,
    pub discrete_re: f64,
    pub discrete_im: f64,
    /// Zero for odd powers.
    pub continuum_value: f64,
    /// `|discrete - continuum|`, complex modulus.
    pub deviation: f64,
    /// `<(P^† P)^{power/2}>` for even powers.
    pub gram_value: Option<f64>,
}

/// Moment of the `n`-th physical level of a solved well.
pub fn moment_record(spectrum: &WellSpectrum, n: usize, power: u32) -> Result<MomentRecord> {
    let (_, state) = spectrum.physical_level(n)?;
    let op = MomentumOperator::on_grid(&spectrum.grid, spectrum.hbar)?;
    let psi = ComplexVector::from_real(&state);
    let value = moment(&op, &psi, power)?;
    let continuum_value = if power % 2 == 0 && power <= 4 {
        continuum_moment(n, power, spectrum.grid.length(), spectrum.hbar)?
    } else if power % 2 == 1 {
        0.0
    } else {
        (n as f64 * PI * spectrum.hbar / spectrum.grid.length()).powi(power as i32)
    };
    let gram_value = if power % 2 == 0 {
        Some(gram_moment(&op, &psi, power / 2)?.re)
    } else {
        None
    };
    Ok(MomentRecord {
        state_index: n,
        power,
        discrete_re: value.re,
        discrete_im: value.im,
        continuum_value,
        deviation: (value - continuum_value).norm(),
        gram_value,
    })
}

pub fn moment_deviation_series(
    n: usize,
    power: u32,
    grids: &[Grid],
    pot: &PotentialSpec,
    mass: f64,
    hbar: f64,
) -> Result<ConvergenceSeries> {
    check_refining(grids)?;
    let spectra = solve_grids(grids, pot, mass, hbar)?;
    moment_deviation_from_spectra(n, power, &spectra)
}

/// Odd powers are recorded without a fit.
pub fn moment_deviation_from_spectra(n: usize, power: u32, spectra: &[WellSpectrum]) -> Result<ConvergenceSeries> {
    let grids: Vec<Grid> = spectra.iter().map(|s| s.grid).collect();
    check_refining(&grids)?;
    let samples = spectra
        .iter()
        .map(|s| Ok((s.grid.dx(), moment_record(s, n, power)?.deviation)))
        .collect::<Result<Vec<_>>>()?;
    let label = format!("moment_p{power}_n{n}");
    if power % 2 == 1 {
        Ok(ConvergenceSeries::unfitted(label, samples))
    } else {
        ConvergenceSeries::new(label, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::well::solve_well;

    fn op(n: usize) -> MomentumOperator {
        MomentumOperator::on_grid(&Grid::unit(n).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn rejects_unnormalized_and_bad_powers() {
        let op = op(8);
        let psi = ComplexVector::from_real(&[2.0; 8]);
        assert!(matches!(moment(&op, &psi, 2), Err(Error::NotNormalized(_))));
        let unit = ComplexVector::from_real(&[1.0; 8]);
        assert!(moment(&op, &unit, 0).is_err());
        assert!(moment(&op, &unit, 9).is_err());
        assert!(gram_moment(&op, &unit, 5).is_err());
        assert!(moment(&op, &ComplexVector::zeros(5), 1).is_err());
    }

    #[test]
    fn constant_state_has_zero_moments() {
        // the constant of unit H-norm on [0, 1] is 1
        let op = op(12);
        let psi = ComplexVector::from_real(&[1.0; 12]);
        for power in 1..=8 {
            assert_eq!(moment(&op, &psi, power).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn momentum_eigenvector_moments() {
        let grid = Grid::unit(16).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let e = crate::momentum::analytic_eigenvector(&grid, 6, 1.0).unwrap();
        for power in 1..=4 {
            let m = moment(&op, &e.vector, power).unwrap();
            let expect = e.eigenvalue.powi(power as i32);
            assert!((m - expect).norm() <= 1e-9 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn continuum_values() {
        let p2 = continuum_moment(1, 2, 1.0, 1.0).unwrap();
        assert!((p2 - PI * PI).abs() < 1e-14);
        assert!((continuum_moment(2, 2, 1.0, 1.0).unwrap() - 4.0 * p2).abs() < 1e-12);
        assert!((continuum_moment(1, 4, 1.0, 1.0).unwrap() - PI.powi(4)).abs() < 1e-12);
        assert!(continuum_moment(1, 3, 1.0, 1.0).is_err());
        assert!(continuum_moment(0, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn well_state_moments() {
        let s = solve_well(&Grid::unit(64).unwrap(), &PotentialSpec::default(), 1.0, 1.0).unwrap();
        let scale = 1.0 / s.grid.dx();
        for n in 1..=4 {
            let odd = moment_record(&s, n, 1).unwrap();
            assert!(odd.deviation <= 1e-8 * scale);
            let even = moment_record(&s, n, 2).unwrap();
            assert!(even.discrete_im.abs() <= 1e-10 * even.discrete_re.abs());
            assert!(even.discrete_re >= 0.0);
            assert!(even.gram_value.unwrap() >= 0.0);
        }
        let ground = moment_record(&s, 1, 2).unwrap();
        assert!((ground.discrete_re / (PI * PI) - 1.0).abs() < 0.1);
    }

    #[test]
    fn odd_series_is_unfitted() {
        let grids: Vec<Grid> = [16, 32].iter().map(|&n| Grid::unit(n).unwrap()).collect();
        let s = moment_deviation_series(1, 3, &grids, &PotentialSpec::default(), 1.0, 1.0).unwrap();
        assert!(s.fit.is_none());
        assert_eq!(s.samples.len(), 2);
        let even = moment_deviation_series(1, 2, &grids, &PotentialSpec::default(), 1.0, 1.0).unwrap();
        assert!(even.fit.is_some());
    }
}

//! The discrete momentum operator `P = -i hbar D` built on SBP21.
//!
//! `P` is not hermitian (the boundary rows of `D` break antisymmetry) but its
//! spectrum is real. For even `N_x` the nonzero eigenvalues are
//!
//! ```text
//! p_l = (hbar / dx) * cos(l pi / (N_x - 1)),   l = 1, ..., N_x - 2
//! ```
//!
//! plus a doubly degenerate zero whose right eigenspace is the constant
//! vector. Eigenvectors follow from the two-root ansatz
//! `psi_k = c1 r1^k + c2 r2^k` of the interior recurrence, with the
//! coefficients fixed by the left boundary row. No closed form is used for
//! odd `N_x`; those grids go through the characteristic-polynomial oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::eigen::symmetric_eigensolve;
use crate::error::{check_len, Error, Result};
use crate::grid::Grid;
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::oracle::{general_eigen_oracle, ORACLE_CAP};
use crate::sbp::{build_sbp21, pi_mode, SbpOperator};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct MomentumOperator {
    sbp: SbpOperator,
    hbar: f64,
}

impl MomentumOperator {
    pub fn new(sbp: SbpOperator, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::contract(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { sbp, hbar })
    }

    pub fn on_grid(grid: &Grid, hbar: f64) -> Result<Self> {
        Self::new(build_sbp21(grid)?, hbar)
    }

    pub fn sbp(&self) -> &SbpOperator {
        &self.sbp
    }

    pub fn grid(&self) -> &Grid {
        self.sbp.grid()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn apply(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        let d = self.sbp.apply_derivative(psi)?;
        Ok(d.scaled(-I * self.hbar))
    }

    /// `P^n psi`.
    pub fn apply_power(&self, psi: &ComplexVector, power: u32) -> Result<ComplexVector> {
        let mut out = psi.clone();
        for _ in 0..power {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// `P^† psi` with the plain conjugate transpose: `P^† = i hbar D^T`.
    pub fn apply_adjoint(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        let d = self.sbp.d_matrix();
        check_len(d.rows(), psi.len())?;
        let n = psi.len();
        let mut out = ComplexVector::zeros(n);
        for j in 0..n {
            let lo = j.saturating_sub(1);
            let hi = (j + 2).min(n);
            out[j] = (lo..hi).map(|k| psi[k] * d[(k, j)]).sum::<Complex64>() * (I * self.hbar);
        }
        Ok(out)
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.sbp.d_matrix().to_complex().scaled(-I * self.hbar)
    }

    /// `||P^† - P||_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let p = self.matrix();
        p.adjoint().sub(&p).map(|m| m.frobenius_norm()).unwrap_or(f64::NAN)
    }

    /// `||P^† P - P P^†||_F`.
    pub fn normality_defect(&self) -> f64 {
        let p = self.matrix();
        let ph = p.adjoint();
        match (ph.matmul(&p), p.matmul(&ph)) {
            (Ok(a), Ok(b)) => a.sub(&b).map(|m| m.frobenius_norm()).unwrap_or(f64::NAN),
            _ => f64::NAN,
        }
    }
}

/// Closed-form eigenpair of `P` with the data of the two-root ansatz.
#[derive(Debug, Clone)]
pub struct MomentumEigenpair {
    pub index_l: usize,
    pub eigenvalue: f64,
    /// Dimensionless eigenvalue: `dx D psi = i xi psi`.
    pub xi: f64,
    pub r1: Complex64,
    pub r2: Complex64,
    /// Left-boundary coefficients for `psi_0 = 1`, before normalization.
    pub c1: Complex64,
    pub c2: Complex64,
    /// H-normalized, phase fixed so the first significant entry is real and positive.
    pub vector: ComplexVector,
}

fn require_even(grid: &Grid) -> Result<()> {
    if grid.is_even() {
        Ok(())
    } else {
        Err(Error::OddGrid(grid.n_points()))
    }
}

/// `xi_l = cos(l pi / (N_x - 1))` for `l = 1..=N_x-2`, with the pairing
/// `xi_{N_x-1-l} = -xi_l` imposed exactly.
fn xi_values(n: usize) -> Vec<f64> {
    let m = n - 1;
    let mut xi = vec![0.0; n - 2];
    for l in 1..=(n - 2) / 2 {
        let v = (l as f64 * PI / m as f64).cos();
        xi[l - 1] = v;
        xi[m - l - 1] = -v;
    }
    xi
}

/// All `N_x` eigenvalues of `P` on an even grid: `p_1, ..., p_{N_x-2}`
/// followed by the two zeros.
pub fn analytic_eigenvalues(grid: &Grid, hbar: f64) -> Result<Vec<f64>> {
    require_even(grid)?;
    let scale = hbar / grid.dx();
    let mut p: Vec<f64> = xi_values(grid.n_points()).into_iter().map(|x| x * scale).collect();
    p.extend([0.0, 0.0]);
    Ok(p)
}

/// Roots `r_{1,2} = i xi +- sqrt(1 - xi^2)` of `r^2 - 2 i xi r - 1 = 0`.
pub fn ansatz_roots(xi: f64) -> (Complex64, Complex64) {
    let s = (1.0 - xi * xi).max(0.0).sqrt();
    (Complex64::new(s, xi), Complex64::new(-s, xi))
}

/// `r^k` for a unimodular root, evaluated through its phase.
fn unit_power(r: Complex64, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, r.arg() * k as f64)
}

/// The ansatz at the eigenvalue `xi_l = cos(phi_l)`, `phi_l = l pi / (N_x-1)`,
/// evaluated from the angle. Then `r1 = i e^{-i phi}` and `r2 = i e^{i phi}`,
/// so `r^k = i^k e^{-+ i k phi}` with `k l` reduced exactly modulo `2(N_x-1)`.
/// This avoids the cancellation in `1 - xi^2` near `|xi| = 1` and the phase
/// drift of `k * arg(r)` on fine grids.
#[derive(Debug, Clone, Copy)]
struct ExactAnsatz {
    l: usize,
    m: usize,
    xi: f64,
}

impl ExactAnsatz {
    fn new(l: usize, n: usize) -> Self {
        Self {
            l,
            m: n - 1,
            xi: xi_values(n)[l - 1],
        }
    }

    /// `e^{i j pi / m}`, using symmetry so the argument stays in `[0, pi/2]`.
    fn unit(&self, j: usize) -> Complex64 {
        let two_m = 2 * self.m;
        let j = j % two_m;
        let (j, conj) = if j > self.m { (two_m - j, true) } else { (j, false) };
        let (j, neg_re) = if 2 * j > self.m { (self.m - j, true) } else { (j, false) };
        let angle = j as f64 * PI / self.m as f64;
        let mut z = Complex64::new(angle.cos(), angle.sin());
        if neg_re {
            z.re = -z.re;
        }
        if conj {
            z.im = -z.im;
        }
        z
    }

    fn i_power(k: usize) -> Complex64 {
        match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    fn powers(&self, k: usize) -> (Complex64, Complex64) {
        let two_m = 2 * self.m;
        let j = (k % two_m) * self.l % two_m;
        let ik = Self::i_power(k);
        (ik * self.unit(two_m - j), ik * self.unit(j))
    }

    fn roots(&self) -> (Complex64, Complex64) {
        self.powers(1)
    }
}

fn left_from(xi: f64, r1: Complex64, r2: Complex64) -> (Complex64, Complex64) {
    let x2 = Complex64::new(2.0 * xi * xi, 0.0);
    let c1 = -(x2 + I * xi * (r2 - 2.0) + r2 - 1.0) / (r1 * (r1 - r2));
    let c2 = (x2 + I * xi * (r1 - 2.0) + r1 - 1.0) / (r2 * (r1 - r2));
    (c1, c2)
}

fn right_from(xi: f64, r1: Complex64, r2: Complex64, r1e: Complex64, r2e: Complex64) -> (Complex64, Complex64) {
    let x2 = 2.0 * xi * xi;
    let c1 = (r2 * x2 + I * xi * (r2 * 2.0 - 1.0) - r2 + 1.0) / (r1e * (r1 - r2));
    let c2 = (r1 * x2 + I * xi * (r1 * 2.0 - 1.0) - r1 + 1.0) / (r2e * (r2 - r1));
    (c1, c2)
}

/// Ansatz coefficients fixed by the left boundary row, per unit `psi_0`.
pub fn left_coefficients(xi: f64) -> (Complex64, Complex64) {
    let (r1, r2) = ansatz_roots(xi);
    left_from(xi, r1, r2)
}

/// Ansatz coefficients fixed by the right boundary row, per unit value of
/// the last entry `psi_{N_x-1}`.
pub fn right_coefficients(xi: f64, n_points: usize) -> (Complex64, Complex64) {
    let (r1, r2) = ansatz_roots(xi);
    let e = n_points - 3;
    right_from(xi, r1, r2, unit_power(r1, e), unit_power(r2, e))
}

/// `det [[c1^L, c2^L], [c1^R, c2^R]]`; vanishes exactly when both boundary
/// rows admit the same ansatz vector, i.e. at an eigenvalue.
pub fn boundary_determinant(xi: f64, n_points: usize) -> Complex64 {
    let (l1, l2) = left_coefficients(xi);
    let (r1, r2) = right_coefficients(xi, n_points);
    l1 * r2 - l2 * r1
}

/// [`boundary_determinant`] at the `l`-th closed-form eigenvalue, with the
/// roots and their powers taken from the exact angle.
pub fn boundary_determinant_at(l: usize, n_points: usize) -> Result<Complex64> {
    if n_points % 2 != 0 {
        return Err(Error::OddGrid(n_points));
    }
    if l < 1 || l > n_points - 2 {
        return Err(Error::contract(format!("index l = {l} outside [1, {}]", n_points - 2)));
    }
    let a = ExactAnsatz::new(l, n_points);
    let (r1, r2) = a.roots();
    let (l1, l2) = left_from(a.xi, r1, r2);
    let (r1e, r2e) = a.powers(n_points - 3);
    let (rc1, rc2) = right_from(a.xi, r1, r2, r1e, r2e);
    Ok(l1 * rc2 - l2 * rc1)
}

pub fn analytic_eigenvector(grid: &Grid, l: usize, hbar: f64) -> Result<MomentumEigenpair> {
    require_even(grid)?;
    let n = grid.n_points();
    if l < 1 || l > n - 2 {
        return Err(Error::contract(format!(
            "eigenvector index l = {l} outside [1, {}]",
            n - 2
        )));
    }
    let a = ExactAnsatz::new(l, n);
    let xi = a.xi;
    if (xi.abs() - 1.0).abs() < 1e-14 {
        return Err(Error::DegenerateAnsatz(xi));
    }
    let (r1, r2) = a.roots();
    let (c1, c2) = left_from(xi, r1, r2);
    let raw: ComplexVector = (0..n)
        .map(|k| {
            let (p1, p2) = a.powers(k);
            c1 * p1 + c2 * p2
        })
        .collect();
    let sbp = build_sbp21(grid)?;
    let vector = normalize_with_phase(&sbp, &raw)?;
    Ok(MomentumEigenpair {
        index_l: l,
        eigenvalue: xi * hbar / grid.dx(),
        xi,
        r1,
        r2,
        c1,
        c2,
        vector,
    })
}

/// H-normalize and rotate the phase so the first entry whose magnitude
/// exceeds `1e-12 * max|psi|` is real and positive.
pub fn normalize_with_phase(sbp: &SbpOperator, psi: &ComplexVector) -> Result<ComplexVector> {
    let norm = sbp.h_norm(psi)?;
    if norm == 0.0 {
        return Err(Error::contract("cannot normalize the zero vector"));
    }
    let cutoff = 1e-12 * psi.max_abs();
    let pivot = psi.iter().find(|z| z.norm() > cutoff).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    Ok(psi.scaled(phase / norm))
}

/// The `count` lowest nonzero-momentum eigenpairs on the positive branch,
/// `l = N_x/2 - 1, N_x/2 - 2, ...` (quarter wave first).
pub fn lowest_modes(grid: &Grid, count: usize, hbar: f64) -> Result<Vec<MomentumEigenpair>> {
    require_even(grid)?;
    let half = grid.n_points() / 2;
    if count > half - 1 {
        return Err(Error::contract(format!(
            "only {} positive modes exist on N_x = {}",
            half - 1,
            grid.n_points()
        )));
    }
    (0..count).map(|j| analytic_eigenvector(grid, half - 1 - j, hbar)).collect()
}

/// `| |p_min| * 2L / (pi hbar) - 1 |`: distance of the quarter-wave momentum
/// from its continuum value `pi hbar / (2L)`.
pub fn quarter_wave_defect(grid: &Grid, hbar: f64) -> Result<f64> {
    let p = analytic_eigenvalues(grid, hbar)?;
    let p_min = p
        .iter()
        .filter(|v| **v != 0.0)
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok((p_min * 2.0 * grid.length() / (PI * hbar) - 1.0).abs())
}

/// Full complex spectrum of `P` from the characteristic-polynomial oracle.
///
/// The oracle runs on the dimensionless `dx * D`, whose entries lie in
/// `{0, +-1/2, +-1}`; the result is rescaled by `-i hbar / dx`.
pub fn numerical_spectrum(grid: &Grid, hbar: f64) -> Result<Vec<Complex64>> {
    let n = grid.n_points();
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { dim: n, cap: ORACLE_CAP });
    }
    let sbp = build_sbp21(grid)?;
    let dimless = sbp.d_matrix().scaled(grid.dx()).to_complex();
    let lambdas = general_eigen_oracle(&dimless, ORACLE_CAP)?;
    let factor = -I * hbar / grid.dx();
    let mut p: Vec<Complex64> = lambdas.into_iter().map(|z| z * factor).collect();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(p)
}

pub fn count_zero_modes(spectrum: &[Complex64], tol: f64) -> usize {
    spectrum.iter().filter(|z| z.norm() <= tol).count()
}

/// Orthonormal basis of the right null space of `D`, from the eigenvectors
/// of `D^T D` below `tol * ||D^T D||_F`.
pub fn right_null_space(sbp: &SbpOperator, tol: f64) -> Result<Vec<Vec<f64>>> {
    let d = sbp.d_matrix();
    let dtd = d.transpose().matmul(d)?;
    let scale = dtd.frobenius_norm();
    let e = symmetric_eigensolve(&dtd)?;
    Ok((0..e.len())
        .filter(|&i| e.eigenvalues[i].abs() <= tol * scale)
        .map(|i| e.vector(i))
        .collect())
}

/// `w = H * pi_mode`, which satisfies `w^T D = 0`.
pub fn left_null_vector(sbp: &SbpOperator) -> Vec<f64> {
    pi_mode(sbp.len())
        .into_iter()
        .zip(sbp.norm_diag())
        .map(|(s, h)| s * h)
        .collect()
}

/// Probability flux `j = (psi* o D psi - (D psi)* o psi) / (2 m i)`.
///
/// Returned as a complex vector; the imaginary parts are rounding noise.
pub fn probability_flux(op: &MomentumOperator, psi: &ComplexVector, mass: f64) -> Result<ComplexVector> {
    if !(mass > 0.0) {
        return Err(Error::contract(format!("mass must be positive, got {mass}")));
    }
    let dpsi = op.sbp().apply_derivative(psi)?;
    let denom = I * (2.0 * mass);
    Ok(psi
        .iter()
        .zip(dpsi.iter())
        .map(|(p, d)| (p.conj() * d - d.conj() * p) / denom)
        .collect())
}

/// Flux at the left and right endpoints, with `m = 1`.
pub fn boundary_flux(op: &MomentumOperator, psi: &ComplexVector) -> Result<(f64, f64)> {
    let j = probability_flux(op, psi, 1.0)?;
    Ok((j[0].re, j[j.len() - 1].re))
}

/// `max(|j_0|, |j_{N_x-1}|)` with `m = 1`.
pub fn boundary_leakage(op: &MomentumOperator, psi: &ComplexVector) -> Result<f64> {
    let (left, right) = boundary_flux(op, psi)?;
    Ok(left.abs().max(right.abs()))
}

#[derive(Debug, Clone)]
pub struct CommutatorReport {
    /// `(P X - X P) psi`.
    pub applied: ComplexVector,
    /// `max_k |applied_k + i hbar psi_k|` over interior `k`.
    pub interior_deviation: f64,
    /// Entrywise distance from `-i hbar (psi_1, (psi_0+psi_2)/2, ..., psi_{N-2})`.
    pub structure_defect: f64,
}

pub fn commutator_defect(op: &MomentumOperator, grid: &Grid, psi: &ComplexVector) -> Result<CommutatorReport> {
    check_len(grid.n_points(), psi.len())?;
    check_len(op.sbp().len(), psi.len())?;
    let n = psi.len();
    let x = grid.points();
    let xpsi: ComplexVector = psi.iter().zip(&x).map(|(p, &xk)| p * xk).collect();
    let pxpsi = op.apply(&xpsi)?;
    let ppsi = op.apply(psi)?;
    let applied: ComplexVector = (0..n).map(|k| pxpsi[k] - ppsi[k] * x[k]).collect();

    let factor = -I * op.hbar();
    let mut structure_defect = 0.0f64;
    for k in 0..n {
        let expect = if k == 0 {
            psi[1]
        } else if k == n - 1 {
            psi[n - 2]
        } else {
            (psi[k - 1] + psi[k + 1]) * 0.5
        };
        structure_defect = structure_defect.max((applied[k] - factor * expect).norm());
    }
    let interior_deviation = (1..n - 1)
        .map(|k| (applied[k] - factor * psi[k]).norm())
        .fold(0.0, f64::max);
    Ok(CommutatorReport {
        applied,
        interior_deviation,
        structure_defect,
    })
}

/// Infinite-domain dispersion of the interior stencil, `hbar sin(kappa dx) / dx`.
pub fn dispersion_interior(kappa: f64, dx: f64, hbar: f64) -> Result<f64> {
    if !(dx > 0.0) {
        return Err(Error::contract(format!("dx must be positive, got {dx}")));
    }
    if !(kappa.abs() < PI / dx) {
        return Err(Error::contract(format!(
            "kappa = {kappa} outside the Brillouin zone |kappa| < pi/dx = {}",
            PI / dx
        )));
    }
    Ok(hbar * (kappa * dx).sin() / dx)
}

/// Applies `P` to the sampled plane wave `exp(i kappa dx k)` on `n` points and
/// returns the largest interior deviation from `p(kappa) psi_k`, in units of
/// the stencil scale `hbar / dx`. The samples themselves carry phase rounding
/// of order `k eps`, so the absolute defect grows like `n eps hbar / dx`.
pub fn plane_wave_stencil_defect(kappa: f64, dx: f64, hbar: f64, n: usize) -> Result<f64> {
    let p = dispersion_interior(kappa, dx, hbar)?;
    let grid = Grid::new(0.0, dx * (n.max(3) - 1) as f64, n.max(3))?;
    let op = MomentumOperator::on_grid(&grid, hbar)?;
    let psi: ComplexVector = (0..grid.n_points())
        .map(|k| Complex64::from_polar(1.0, kappa * dx * k as f64))
        .collect();
    let ppsi = op.apply(&psi)?;
    Ok((1..grid.n_points() - 1)
        .map(|k| (ppsi[k] - psi[k] * p).norm())
        .fold(0.0, f64::max)
        * dx
        / hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::fit_power_law;
    use crate::linalg::cosine_similarity;

    #[test]
    fn four_point_spectrum() {
        let grid = Grid::new(0.0, 3.0, 4).unwrap();
        let p = analytic_eigenvalues(&grid, 1.0).unwrap();
        assert_eq!(p.len(), 4);
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[1] + 0.5).abs() < 1e-15);
        assert_eq!(&p[2..], &[0.0, 0.0]);
    }

    #[test]
    fn closed_form_matches_sine_form() {
        let grid = Grid::unit(20).unwrap();
        let p = analytic_eigenvalues(&grid, 1.0).unwrap();
        for l in 1..=18 {
            let s = ((l as f64 / 19.0 + 0.5) * PI).sin() / grid.dx();
            assert!((p[l - 1] - s).abs() < 1e-12);
        }
    }

    #[test]
    fn pairs_are_exact_negatives() {
        let grid = Grid::unit(64).unwrap();
        let mut p = analytic_eigenvalues(&grid, 1.3).unwrap();
        let mut neg: Vec<f64> = p.iter().map(|v| -v).collect();
        p.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        for (a, b) in p.iter().zip(&neg) {
            assert_eq!(a, &(b + 0.0));
        }
    }

    #[test]
    fn odd_grid_has_no_closed_form() {
        let grid = Grid::unit(7).unwrap();
        assert!(matches!(analytic_eigenvalues(&grid, 1.0), Err(Error::OddGrid(7))));
        assert!(matches!(analytic_eigenvector(&grid, 2, 1.0), Err(Error::OddGrid(7))));
    }

    #[test]
    fn eigenvector_invariants() {
        let grid = Grid::unit(32).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        for l in 1..=30 {
            let e = analytic_eigenvector(&grid, l, 1.0).unwrap();
            assert!((e.r1 * e.r2 + 1.0).norm() < 1e-12);
            let s = (1.0 - e.xi * e.xi).sqrt();
            assert!((e.r1 - Complex64::new(s, e.xi)).norm() < 1e-12);
            assert!((e.r2 - Complex64::new(-s, e.xi)).norm() < 1e-12);
            let pv = op.apply(&e.vector).unwrap();
            let res = pv.max_abs_diff(&e.vector.scaled(Complex64::new(e.eigenvalue, 0.0)));
            assert!(res <= 1e-9 * e.vector.max_abs(), "l = {l}, residual {res}");
            assert!((op.sbp().h_norm(&e.vector).unwrap() - 1.0).abs() < 1e-12);
            let first = e.vector[0];
            assert!(first.re >= 0.0 && first.im.abs() < 1e-12);
        }
    }

    #[test]
    fn fine_grid_eigenvectors() {
        let grid = Grid::unit(512).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        for l in [1, 2, 100, 255, 256, 400, 509, 510] {
            let e = analytic_eigenvector(&grid, l, 1.0).unwrap();
            let pv = op.apply(&e.vector).unwrap();
            let res = pv.max_abs_diff(&e.vector.scaled(Complex64::new(e.eigenvalue, 0.0)));
            assert!(res <= 1e-9 * e.vector.max_abs(), "l = {l}, residual {res}");
        }
    }

    #[test]
    fn index_out_of_range() {
        let grid = Grid::unit(8).unwrap();
        assert!(analytic_eigenvector(&grid, 0, 1.0).is_err());
        assert!(analytic_eigenvector(&grid, 7, 1.0).is_err());
    }

    #[test]
    fn determinant_vanishes_only_at_eigenvalues() {
        for n in [8usize, 16, 32, 64] {
            for l in 1..n - 1 {
                let xi = xi_values(n)[l - 1];
                assert!(boundary_determinant(xi, n).norm() <= 1e-8, "n = {n}, l = {l}");
            }
        }
        for n in [128usize, 512, 1024] {
            for l in 1..n - 1 {
                assert!(boundary_determinant_at(l, n).unwrap().norm() <= 1e-8, "n = {n}, l = {l}");
            }
        }
        assert!(boundary_determinant_at(0, 8).is_err());
        assert!(boundary_determinant_at(2, 9).is_err());
        // half way between two eigenvalues the rows are independent
        let n = 16;
        let mid = ((1.5 * PI) / 15.0).cos();
        assert!(boundary_determinant(mid, n).norm() > 1e-3);
    }

    #[test]
    fn constant_is_a_zero_mode() {
        let grid = Grid::unit(10).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let c = ComplexVector::from_real(&[0.3; 10]);
        assert!(op.apply(&c).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn oracle_agrees_with_closed_form_at_four_points() {
        let grid = Grid::new(0.0, 3.0, 4).unwrap();
        let num = numerical_spectrum(&grid, 1.0).unwrap();
        let mut re: Vec<f64> = num.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 0.5).abs() < 1e-12);
        assert!(re[1].abs() < 1e-12 && re[2].abs() < 1e-12);
        assert!((re[3] - 0.5).abs() < 1e-12);
        assert!(num.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn oracle_zero_modes() {
        let even = numerical_spectrum(&Grid::unit(8).unwrap(), 1.0).unwrap();
        assert_eq!(count_zero_modes(&even, 1e-8), 2);
        assert!(even.iter().all(|z| z.im.abs() <= 1e-8 * 7.0));
        let odd = numerical_spectrum(&Grid::unit(7).unwrap(), 1.0).unwrap();
        assert_eq!(count_zero_modes(&odd, 1e-8), 3);
        assert!(numerical_spectrum(&Grid::unit(13).unwrap(), 1.0).is_err());
    }

    #[test]
    fn null_spaces() {
        for n in [5, 8, 12] {
            let sbp = build_sbp21(&Grid::unit(n).unwrap()).unwrap();
            let right = right_null_space(&sbp, 1e-10).unwrap();
            assert_eq!(right.len(), 1);
            assert!(cosine_similarity(&right[0], &vec![1.0; n]) >= 1.0 - 1e-6);
            let w = left_null_vector(&sbp);
            let wd = sbp.d_matrix().transpose().matvec(&w).unwrap();
            assert!(wd.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn non_hermitian_and_non_normal() {
        for n in [3, 4, 9, 16] {
            let op = MomentumOperator::on_grid(&Grid::unit(n).unwrap(), 1.0).unwrap();
            assert!(op.hermiticity_defect() > 0.0);
            assert!(op.normality_defect() > 0.0);
        }
    }

    #[test]
    fn adjoint_matches_matrix() {
        let grid = Grid::unit(9).unwrap();
        let op = MomentumOperator::on_grid(&grid, 0.7).unwrap();
        let psi: ComplexVector = (0..9).map(|k| Complex64::new(k as f64, 1.0 - k as f64 * 0.3)).collect();
        let a = op.apply_adjoint(&psi).unwrap();
        let m = op.matrix().adjoint();
        let b: ComplexVector = (0..9).map(|i| (0..9).map(|j| m[(i, j)] * psi[j]).sum()).collect();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn flux_of_real_state_vanishes() {
        let grid = Grid::unit(16).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let psi = ComplexVector::from_real(&grid.points().iter().map(|x| (3.0 * x).sin()).collect::<Vec<_>>());
        let j = probability_flux(&op, &psi, 1.0).unwrap();
        assert!(j.iter().all(|z| z.norm() == 0.0));
        assert!(probability_flux(&op, &psi, 0.0).is_err());
    }

    #[test]
    fn flux_of_plane_wave() {
        let grid = Grid::unit(40).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let kappa = 7.0;
        let mass = 2.0;
        let psi: ComplexVector = grid.points().iter().map(|&x| Complex64::from_polar(1.0, kappa * x)).collect();
        let j = probability_flux(&op, &psi, mass).unwrap();
        let expect = (kappa * grid.dx()).sin() / (mass * grid.dx());
        for k in 1..39 {
            assert!((j[k].re - expect).abs() < 1e-12);
            assert!(j[k].im.abs() < 1e-12);
        }
    }

    #[test]
    fn flux_of_eigenvector_tracks_density() {
        // D psi = i (p / hbar) psi makes j_k = p |psi_k|^2 at every site
        let grid = Grid::unit(32).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let e = analytic_eigenvector(&grid, 15, 1.0).unwrap();
        let j = probability_flux(&op, &e.vector, 1.0).unwrap();
        for (jk, psi) in j.iter().zip(e.vector.iter()) {
            assert!((jk.re - e.eigenvalue * psi.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn leakage_of_confined_states() {
        let grid = Grid::unit(16).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let c = ComplexVector::from_real(&[1.0; 16]);
        assert_eq!(boundary_leakage(&op, &c).unwrap(), 0.0);
        // zero at both ends and flat next to them
        let mut psi = ComplexVector::zeros(16);
        for k in 2..14 {
            psi[k] = Complex64::new((k as f64).sin(), (k as f64 * 0.5).cos());
        }
        assert!(boundary_leakage(&op, &psi).unwrap() < 1e-12);
    }

    #[test]
    fn commutator_structure() {
        let grid = Grid::unit(17).unwrap();
        let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
        let c = ComplexVector::from_real(&[2.0; 17]);
        let r = commutator_defect(&op, &grid, &c).unwrap();
        let expect = c.scaled(-I);
        assert_eq!(r.applied, expect);
        assert_eq!(r.interior_deviation, 0.0);

        let x = ComplexVector::from_real(&grid.points());
        let r = commutator_defect(&op, &grid, &x).unwrap();
        assert!(r.interior_deviation < 1e-12);
        assert!(r.structure_defect < 1e-12);

        let short = ComplexVector::zeros(5);
        assert!(commutator_defect(&op, &grid, &short).is_err());
    }

    #[test]
    fn commutator_converges_quadratically_in_interior() {
        let samples: Vec<(f64, f64)> = [32usize, 64, 128, 256]
            .iter()
            .map(|&n| {
                let grid = Grid::unit(n).unwrap();
                let op = MomentumOperator::on_grid(&grid, 1.0).unwrap();
                let psi = ComplexVector::from_real(
                    &grid.points().iter().map(|x| (-(x - 0.5f64).powi(2) / 0.02).exp()).collect::<Vec<_>>(),
                );
                let r = commutator_defect(&op, &grid, &psi).unwrap();
                assert!(r.structure_defect < 1e-12);
                (grid.dx(), r.interior_deviation)
            })
            .collect();
        let nu = fit_power_law(&samples).unwrap().exponent;
        assert!((1.9..=2.1).contains(&nu), "nu = {nu}");
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion_interior(0.0, 0.1, 1.0).unwrap(), 0.0);
        let dx = 0.1;
        let v = dispersion_interior(PI / (2.0 * dx), dx, 1.0).unwrap();
        assert!((v - 1.0 / dx).abs() < 1e-12);
        assert!(dispersion_interior(PI / dx, dx, 1.0).is_err());
        assert!(dispersion_interior(-PI / dx - 1.0, dx, 1.0).is_err());
        // Taylor: hbar kappa (1 - (kappa dx)^2 / 6) + O((kappa dx)^4 kappa)
        let kappa = 0.3;
        for dx in [0.1, 0.05, 0.025] {
            let v = dispersion_interior(kappa, dx, 1.0).unwrap();
            let taylor = kappa * (1.0 - (kappa * dx).powi(2) / 6.0);
            assert!((v - taylor).abs() <= kappa * (kappa * dx).powi(4) / 100.0);
        }
    }

    #[test]
    fn plane_wave_stencil() {
        let dx = 1.0 / 31.0;
        for j in -9..=9 {
            let kappa = j as f64 * 0.1 * PI / dx;
            assert!(plane_wave_stencil_defect(kappa, dx, 1.0, 32).unwrap() < 1e-12);
        }
    }

    #[test]
    fn quarter_wave_momentum() {
        let grid = Grid::unit(128).unwrap();
        let p = analytic_eigenvalues(&grid, 1.0).unwrap();
        let p_min = p.iter().filter(|v| **v != 0.0).fold(f64::INFINITY, |m, v| m.min(v.abs()));
        assert!((p_min / (PI / 2.0) - 1.0).abs() < 1e-3);
        assert!(quarter_wave_defect(&grid, 1.0).unwrap() < 1e-3);
    }
}

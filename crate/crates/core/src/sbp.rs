//! Diagonal-norm summation-by-parts first-derivative operator (SBP21).
//!
//! The norm matrix is the trapezoidal rule, `H = dx * diag(1/2, 1, ..., 1, 1/2)`,
//! and `D = H^{-1} Q` with
//!
//! ```text
//! Q = [ -1/2  1/2                ]
//!     [ -1/2   0   1/2           ]
//!     [         ...              ]
//!     [            -1/2  0  1/2  ]
//!     [                -1/2 1/2  ]
//! ```
//!
//! so that `Q + Q^T = diag(-1, 0, ..., 0, 1)` holds bit for bit and
//! `(D u, v)_H + (u, D v)_H = conj(u_N) v_N - conj(u_0) v_0` for all vectors.

use num_complex::Complex64;

use crate::error::{check_len, Result};
use crate::grid::Grid;
use crate::linalg::{ComplexVector, RealMatrix};

#[derive(Debug, Clone)]
pub struct SbpOperator {
    grid: Grid,
    norm_diag: Vec<f64>,
    q_matrix: RealMatrix,
    d_matrix: RealMatrix,
    order: u32,
}

pub fn build_sbp21(grid: &Grid) -> Result<SbpOperator> {
    // Grid::new already refuses N_x < 3.
    let n = grid.n_points();
    let dx = grid.dx();

    let mut norm_diag = vec![dx; n];
    norm_diag[0] = 0.5 * dx;
    norm_diag[n - 1] = 0.5 * dx;

    let mut q = RealMatrix::zeros(n, n);
    q[(0, 0)] = -0.5;
    q[(0, 1)] = 0.5;
    for k in 1..n - 1 {
        q[(k, k - 1)] = -0.5;
        q[(k, k + 1)] = 0.5;
    }
    q[(n - 1, n - 2)] = -0.5;
    q[(n - 1, n - 1)] = 0.5;

    let mut d = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in i.saturating_sub(1)..(i + 2).min(n) {
            d[(i, j)] = q[(i, j)] / norm_diag[i];
        }
    }

    Ok(SbpOperator {
        grid: *grid,
        norm_diag,
        q_matrix: q,
        d_matrix: d,
        order: 2,
    })
}

impl SbpOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.n_points()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Diagonal of the norm matrix `H`.
    pub fn norm_diag(&self) -> &[f64] {
        &self.norm_diag
    }

    pub fn q_matrix(&self) -> &RealMatrix {
        &self.q_matrix
    }

    pub fn d_matrix(&self) -> &RealMatrix {
        &self.d_matrix
    }

    /// Interior accuracy order (2 for SBP21; the boundary closure is first order).
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `D psi`, applied as `(Q psi)_k / h_k` using the three-point structure.
    pub fn apply_derivative(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        check_len(self.len(), psi.len())?;
        Ok(self.stencil(psi))
    }

    pub fn apply_derivative_real(&self, psi: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), psi.len())?;
        let n = self.len();
        let h = &self.norm_diag;
        let mut out = vec![0.0; n];
        out[0] = (0.5 * psi[1] - 0.5 * psi[0]) / h[0];
        for k in 1..n - 1 {
            out[k] = (0.5 * psi[k + 1] - 0.5 * psi[k - 1]) / h[k];
        }
        out[n - 1] = (0.5 * psi[n - 1] - 0.5 * psi[n - 2]) / h[n - 1];
        Ok(out)
    }

    fn stencil(&self, psi: &[Complex64]) -> ComplexVector {
        let n = self.len();
        let h = &self.norm_diag;
        let mut out = ComplexVector::zeros(n);
        out[0] = (psi[1] * 0.5 - psi[0] * 0.5) / h[0];
        for k in 1..n - 1 {
            out[k] = (psi[k + 1] * 0.5 - psi[k - 1] * 0.5) / h[k];
        }
        out[n - 1] = (psi[n - 1] * 0.5 - psi[n - 2] * 0.5) / h[n - 1];
        out
    }

    /// Discrete inner product `psi^† H chi`.
    pub fn inner_product(&self, psi: &ComplexVector, chi: &ComplexVector) -> Result<Complex64> {
        check_len(self.len(), psi.len())?;
        check_len(self.len(), chi.len())?;
        Ok(psi
            .iter()
            .zip(chi.iter())
            .zip(&self.norm_diag)
            .map(|((a, b), &h)| a.conj() * b * h)
            .sum())
    }

    pub fn inner_product_real(&self, psi: &[f64], chi: &[f64]) -> Result<f64> {
        check_len(self.len(), psi.len())?;
        check_len(self.len(), chi.len())?;
        Ok(psi
            .iter()
            .zip(chi)
            .zip(&self.norm_diag)
            .map(|((a, b), h)| a * b * h)
            .sum())
    }

    /// `sqrt((psi, psi)_H)`.
    pub fn h_norm(&self, psi: &ComplexVector) -> Result<f64> {
        Ok(self.inner_product(psi, psi)?.re.max(0.0).sqrt())
    }

    pub fn h_norm_real(&self, psi: &[f64]) -> Result<f64> {
        Ok(self.inner_product_real(psi, psi)?.max(0.0).sqrt())
    }

    /// Defect of the discrete integration-by-parts identity
    /// `|(D psi, chi) + (psi, D chi) - (conj(psi_N) chi_N - conj(psi_0) chi_0)|`.
    pub fn verify_sbp_identity(&self, psi: &ComplexVector, chi: &ComplexVector) -> Result<f64> {
        check_len(self.len(), psi.len())?;
        check_len(self.len(), chi.len())?;
        let dpsi = self.stencil(psi);
        let dchi = self.stencil(chi);
        let lhs = self.inner_product(&dpsi, chi)? + self.inner_product(psi, &dchi)?;
        let last = self.len() - 1;
        let boundary = psi[last].conj() * chi[last] - psi[0].conj() * chi[0];
        Ok((lhs - boundary).norm())
    }
}

/// The maximally oscillating grid vector `((-1)^k)_k`.
pub fn pi_mode(n: usize) -> Vec<f64> {
    (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

//! Real-symmetric eigensolver based on cyclic Jacobi rotations.
//!
//! All arithmetic is 64-bit. For the well Hamiltonian the matrix norm is
//! dominated by the 1e7 wall entries; the solver is backward stable, so the
//! absolute eigenvalue error is about `eps * ||A||`, i.e. ~1e-9, far below
//! the level spacings the experiments resolve.

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// Sweeps before the solver gives up.
pub const MAX_SWEEPS: usize = 100;

/// Relative asymmetry (against `||A||_F`) tolerated on input.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` belongs to `eigenvalues[i]`; columns are orthonormal.
    pub eigenvectors: RealMatrix,
    /// `max_i ||A v_i - lambda_i v_i||_2 / ||A||_F`, measured after the solve.
    pub residual_bound: f64,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i)
    }
}

pub fn symmetric_eigensolve(a: &RealMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::contract(format!(
            "symmetric_eigensolve needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let fro = a.frobenius_norm();
    if a.asymmetry() > SYMMETRY_TOL * fro {
        return Err(Error::contract(format!(
            "matrix is not symmetric: max |a_ij - a_ji| = {:e} > {:e} * ||A||_F",
            a.asymmetry(),
            SYMMETRY_TOL
        )));
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: RealMatrix::zeros(0, 0),
            residual_bound: 0.0,
        });
    }

    let (values, vectors_by_row) = jacobi(a)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = RealMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(values[src]);
        let v = &vectors_by_row[src * n..(src + 1) * n];
        eigenvectors.set_column(col, v);
    }

    let residual_bound = residual(a, &eigenvalues, &eigenvectors, fro);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        residual_bound,
    })
}

/// Threshold cyclic Jacobi. Only the strict upper triangle of the working
/// copy is referenced. Eigenvectors are accumulated as rows so each rotation
/// touches two contiguous slices.
fn jacobi(input: &RealMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = input.rows();
    let mut a = input.as_slice().to_vec();
    let mut v = RealMatrix::identity(n).as_slice().to_vec();
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let idx = |i: usize, j: usize| i * n + j;
    let mut off_norm = f64::INFINITY;

    for sweep in 1..=MAX_SWEEPS {
        off_norm = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off_norm += a[idx(p, q)].abs();
            }
        }
        if off_norm == 0.0 {
            return Ok((d, v));
        }
        let threshold = if sweep < 4 {
            0.2 * off_norm / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                let g = 100.0 * apq.abs();
                if sweep > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[idx(p, q)] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[idx(p, q)] = 0.0;

                let rotate = |a: &mut [f64], i1: usize, i2: usize| {
                    let g = a[i1];
                    let h = a[i2];
                    a[i1] = g - s * (h + g * tau);
                    a[i2] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, idx(j, p), idx(j, q));
                }
                for j in p + 1..q {
                    rotate(&mut a, idx(p, j), idx(j, q));
                }
                for j in q + 1..n {
                    rotate(&mut a, idx(p, j), idx(q, j));
                }
                let (head, tail) = v.split_at_mut(q * n);
                let vp = &mut head[p * n..(p + 1) * n];
                let vq = &mut tail[..n];
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let g = *x;
                    let h = *y;
                    *x = g - s * (h + g * tau);
                    *y = h + s * (g - h * tau);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    Err(Error::NoConvergence {
        cap: MAX_SWEEPS,
        off_norm,
    })
}

fn residual(a: &RealMatrix, values: &[f64], vectors: &RealMatrix, fro: f64) -> f64 {
    if fro == 0.0 {
        return 0.0;
    }
    let n = a.rows();
    let mut worst = 0.0f64;
    for (i, &lambda) in values.iter().enumerate() {
        let v = vectors.column(i);
        let mut acc = 0.0;
        for r in 0..n {
            let av: f64 = a.row(r).iter().zip(&v).map(|(x, y)| x * y).sum();
            let e = av - lambda * v[r];
            acc += e * e;
        }
        worst = worst.max(acc.sqrt());
    }
    worst / fro
}

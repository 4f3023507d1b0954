//! Brute-force eigenvalue oracle for small general complex matrices.
//!
//! The matrix is brought to upper Hessenberg form with Householder
//! reflections, the characteristic polynomial is expanded with the Hessenberg
//! determinant recurrence, and its roots are found simultaneously with
//! Durand-Kerner iteration followed by Newton polishing, first on the
//! polynomial and then on `det(H - lambda I)` evaluated by pivoted LU, which
//! stays accurate when the matrix norm is large. Coefficients that
//! are exactly zero at the low end are deflated as exact zero roots; for
//! matrices with dyadic entries (such as `dx * D`) the whole expansion is
//! exact, so defective zero eigenvalues are recovered exactly instead of at
//! `eps^(1/m)`.
//!
//! The oracle exists to cross-check the symmetric solver and the closed-form
//! momentum spectrum. It refuses matrices above [`ORACLE_CAP`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

pub const ORACLE_CAP: usize = 12;

const MAX_ITER: usize = 2000;

pub fn general_eigen_oracle(a: &ComplexMatrix, max_dim: usize) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::contract(format!(
            "oracle needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let cap = max_dim.min(ORACLE_CAP);
    if a.rows() > cap {
        return Err(Error::OracleCap { dim: a.rows(), cap });
    }
    let h = hessenberg(a);
    let coeffs = characteristic_polynomial(&h);
    let mut roots = polynomial_roots(&coeffs);
    for root in roots.iter_mut().filter(|z| **z != Complex64::new(0.0, 0.0)) {
        *root = polish_on_determinant(&h, *root);
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(roots)
}

/// `|det(A - lambda I)|`, evaluated through the Hessenberg form.
pub fn characteristic_value(a: &ComplexMatrix, lambda: Complex64) -> Complex64 {
    let h = hessenberg(a);
    let coeffs = characteristic_polynomial(&h);
    let sign = if a.rows() % 2 == 0 { 1.0 } else { -1.0 };
    horner(&coeffs, lambda) * sign
}

/// Unitary similarity to upper Hessenberg form. Columns whose entries below
/// the subdiagonal already vanish are left untouched, so tridiagonal input
/// passes through bit-for-bit.
pub fn hessenberg(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2 v v^†) H
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * s * 2.0;
            }
        }
        // H <- H (I - 2 v v^†)
        for i in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(c, vc)| h[(i, k + 1 + c)] * vc)
                .sum();
            for (c, vc) in v.iter().enumerate() {
                h[(i, k + 1 + c)] -= s * vc.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Coefficients (ascending powers) of the monic `det(z I - H)` for upper
/// Hessenberg `H`.
pub fn characteristic_polynomial(h: &ComplexMatrix) -> Vec<Complex64> {
    let n = h.rows();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    // polys[k] = det(z I - H[0..k, 0..k])
    let mut polys: Vec<Vec<Complex64>> = vec![vec![one]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        let mut p = vec![zero; k + 1];
        let diag = h[(k - 1, k - 1)];
        for (i, &c) in prev.iter().enumerate() {
            p[i + 1] += c;
            p[i] -= diag * c;
        }
        let mut sub_product = one;
        for i in (1..k).rev() {
            sub_product *= h[(i, i - 1)];
            let factor = h[(i - 1, k - 1)] * sub_product;
            if factor == zero {
                continue;
            }
            for (j, &c) in polys[i - 1].iter().enumerate() {
                p[j] -= factor * c;
            }
        }
        polys.push(p);
    }
    polys.pop().unwrap()
}

/// LU of `H - lambda I` with partial pivoting: returns `|det|` and
/// `tr((H - lambda I)^{-1})`, or `None` when a pivot vanishes.
fn shifted_lu(h: &ComplexMatrix, lambda: Complex64) -> Option<(f64, Complex64)> {
    let n = h.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| h[(i, j)]).collect()).collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))?;
        if a[p][k].norm() == 0.0 {
            return None;
        }
        a.swap(k, p);
        perm.swap(k, p);
        det *= a[k][k].norm();
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            a[i][k] = f;
            for j in k + 1..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    // trace of the inverse: solve for each unit vector, keep the diagonal entry
    let mut trace = Complex64::new(0.0, 0.0);
    for col in 0..n {
        let mut x: Vec<Complex64> = perm.iter().map(|&p| if p == col { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect();
        for i in 0..n {
            for j in 0..i {
                let t = a[i][j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = a[i][j] * x[j];
                x[i] -= t;
            }
            x[i] /= a[i][i];
        }
        trace += x[col];
    }
    Some((det, trace))
}

/// Newton on `det(H - lambda I)`, accepted only while `|det|` decreases.
fn polish_on_determinant(h: &ComplexMatrix, mut root: Complex64) -> Complex64 {
    let Some((mut det, mut trace)) = shifted_lu(h, root) else {
        return root;
    };
    for _ in 0..4 {
        if trace.norm() == 0.0 {
            break;
        }
        let candidate = root + trace.inv();
        match shifted_lu(h, candidate) {
            Some((d, t)) if d < det => {
                root = candidate;
                det = d;
                trace = t;
            }
            Some(_) => break,
            None => return candidate,
        }
    }
    root
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * z + c, dp * z + p))
}

fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut roots = Vec::with_capacity(degree);

    let mut start = 0;
    while start < degree && coeffs[start] == zero {
        roots.push(zero);
        start += 1;
    }
    let reduced = &coeffs[start..];
    let m = reduced.len() - 1;
    if m == 0 {
        return roots;
    }

    // Fujiwara bound on the root radius of the monic polynomial.
    let radius = (0..m)
        .map(|k| {
            let c = reduced[k].norm();
            let e = 1.0 / (m - k) as f64;
            if k == 0 {
                (c / 2.0).powf(e)
            } else {
                c.powf(e)
            }
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };

    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step = 0.0f64;
        for i in 0..m {
            let num = horner(reduced, z[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = num / den;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-16 * radius {
            break;
        }
    }

    for root in &mut z {
        for _ in 0..5 {
            let (p, dp) = horner_with_derivative(reduced, *root);
            if dp.norm() == 0.0 {
                break;
            }
            let candidate = *root - p / dp;
            if horner(reduced, candidate).norm() < p.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
    }
    roots.extend(z);
    roots
}

//! Infinite square well, approximated by finite walls on the two endpoints.
//!
//! The Hamiltonian is `(hbar^2 / 2m) D^T D + V`, with `P^†` taken as the plain
//! conjugate transpose so the matrix is real symmetric. Because the interior
//! stencil of `D` couples only next-nearest neighbours, `D^T D` nearly
//! decouples the even and odd sublattices and the low spectrum comes in
//! near-degenerate pairs. Each pair is split into a smooth physical state and
//! its alternating doubler by minimizing the Dirichlet energy inside the pair.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::symmetric_eigensolve;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::RealMatrix;
use crate::sbp::{build_sbp21, pi_mode, SbpOperator};
use crate::series::ConvergenceSeries;

pub const DEFAULT_WALL_HEIGHT: f64 = 1e7;

/// Relative gap below which adjacent non-wall levels are partners.
pub const PAIR_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    InfiniteWellApprox,
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "infinite_well_approx" | "infinite-well-approx" => Ok(Self::InfiniteWellApprox),
            other => Err(Error::contract(format!("unknown potential kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub wall_height: f64,
    pub interior_value: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            kind: PotentialKind::InfiniteWellApprox,
            wall_height: DEFAULT_WALL_HEIGHT,
            interior_value: 0.0,
        }
    }
}

impl PotentialSpec {
    pub fn with_wall(wall_height: f64) -> Self {
        Self {
            wall_height,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wall_height > 0.0) || !self.wall_height.is_finite() {
            return Err(Error::contract(format!(
                "wall height must be positive and finite, got {}",
                self.wall_height
            )));
        }
        if !self.interior_value.is_finite() {
            return Err(Error::contract("interior potential must be finite"));
        }
        Ok(())
    }

    pub fn diagonal(&self, n: usize) -> Vec<f64> {
        let mut v = vec![self.interior_value; n];
        v[0] = self.wall_height;
        v[n - 1] = self.wall_height;
        v
    }
}

fn check_physical(mass: f64, hbar: f64) -> Result<()> {
    if !(mass > 0.0) {
        return Err(Error::contract(format!("mass must be positive, got {mass}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::contract(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

/// `D^T D` assembled from the three-point band, symmetric by construction.
fn gram(sbp: &SbpOperator) -> RealMatrix {
    let d = sbp.d_matrix();
    let n = d.rows();
    let mut g = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..(i + 3).min(n) {
            let lo = j.saturating_sub(1);
            let hi = (i + 2).min(n);
            let v: f64 = (lo..hi).map(|k| d[(k, i)] * d[(k, j)]).sum();
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

pub fn build_hamiltonian(grid: &Grid, pot: &PotentialSpec, mass: f64, hbar: f64) -> Result<RealMatrix> {
    pot.validate()?;
    check_physical(mass, hbar)?;
    let sbp = build_sbp21(grid)?;
    let kinetic = hbar * hbar / (2.0 * mass);
    let mut h = gram(&sbp).scaled(kinetic);
    for (i, v) in pot.diagonal(grid.n_points()).into_iter().enumerate() {
        h[(i, i)] += v;
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Physical,
    Unphysical,
    Wall,
    Unpaired,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Physical => "physical",
            Self::Unphysical => "unphysical",
            Self::Wall => "wall",
            Self::Unpaired => "unpaired",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelPair {
    pub index_a: usize,
    pub index_b: usize,
    /// `|E_b - E_a|` of the raw eigenvalues.
    pub gap: f64,
}

impl LevelPair {
    pub fn relative_gap(&self, energies: &[f64]) -> f64 {
        self.gap / energies[self.index_a].abs().max(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct WellSpectrum {
    pub grid: Grid,
    pub mass: f64,
    pub hbar: f64,
    pub potential: PotentialSpec,
    pub hamiltonian: RealMatrix,
    /// Ascending eigenvalues straight from the solver.
    pub eigenvalues: Vec<f64>,
    /// Rayleigh quotient of each stored state; equals `eigenvalues` outside
    /// split pairs.
    pub energies: Vec<f64>,
    /// Columns, H-normalized, first significant entry positive.
    pub states: RealMatrix,
    pub pairs: Vec<LevelPair>,
    pub labels: Vec<StateLabel>,
    pub anomalies: Vec<String>,
    pub residual_bound: f64,
}

impl WellSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn state(&self, i: usize) -> Vec<f64> {
        self.states.column(i)
    }

    pub fn count(&self, label: StateLabel) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }

    pub fn indices(&self, label: StateLabel) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Index of the `n`-th physical level (`n >= 1`), ordered by energy.
    pub fn physical_index(&self, n: usize) -> Result<usize> {
        if n < 1 {
            return Err(Error::contract("physical levels are numbered from 1"));
        }
        let mut phys = self.indices(StateLabel::Physical);
        phys.sort_by(|&i, &j| self.energies[i].total_cmp(&self.energies[j]).then(i.cmp(&j)));
        phys.get(n - 1).copied().ok_or_else(|| {
            Error::contract(format!(
                "grid N_x = {} has only {} physical levels, level {n} requested",
                self.grid.n_points(),
                phys.len()
            ))
        })
    }

    pub fn physical_level(&self, n: usize) -> Result<(f64, Vec<f64>)> {
        let i = self.physical_index(n)?;
        Ok((self.energies[i], self.state(i)))
    }

    /// Doubler partner of the `n`-th physical level.
    pub fn unphysical_partner(&self, n: usize) -> Result<usize> {
        let i = self.physical_index(n)?;
        self.pairs
            .iter()
            .find_map(|p| match (p.index_a == i, p.index_b == i) {
                (true, _) => Some(p.index_b),
                (_, true) => Some(p.index_a),
                _ => None,
            })
            .ok_or_else(|| Error::contract(format!("state {i} has no partner")))
    }

    /// `max |<phys, unphys>|` in the Euclidean product over every labeled
    /// physical/unphysical combination, for unit Euclidean vectors.
    pub fn max_cross_overlap(&self) -> f64 {
        let unit = |i: usize| {
            let v = self.state(i);
            let n = crate::linalg::norm2(&v);
            v.into_iter().map(|x| x / n).collect::<Vec<_>>()
        };
        let phys: Vec<Vec<f64>> = self.indices(StateLabel::Physical).into_iter().map(unit).collect();
        let unphys: Vec<Vec<f64>> = self.indices(StateLabel::Unphysical).into_iter().map(unit).collect();
        let mut worst = 0.0f64;
        for p in &phys {
            for u in &unphys {
                worst = worst.max(crate::linalg::dot(p, u).abs());
            }
        }
        worst
    }

    /// Cosine similarity between the doubler partner of level `n` and the
    /// pi-mode modulation of the physical state.
    pub fn doubler_similarity(&self, n: usize) -> Result<f64> {
        let i = self.physical_index(n)?;
        let j = self.unphysical_partner(n)?;
        let modulated: Vec<f64> = self
            .state(i)
            .iter()
            .zip(pi_mode(self.len()))
            .map(|(v, s)| v * s)
            .collect();
        Ok(crate::linalg::cosine_similarity(&self.state(j), &modulated))
    }

    /// H-weighted overlap `|<psi_n, sqrt(2/L) sin(n pi (x-a)/L)>|` with the
    /// continuum eigenfunction.
    pub fn continuum_overlap(&self, n: usize) -> Result<f64> {
        let (_, psi) = self.physical_level(n)?;
        let sbp = build_sbp21(&self.grid)?;
        let phi = continuum_state(&self.grid, n);
        Ok(sbp.inner_product_real(&psi, &phi)?.abs())
    }

    /// Fraction of H-weighted probability on the two endpoints.
    pub fn endpoint_weight(&self, i: usize) -> f64 {
        let v = self.state(i);
        let h = quadrature(&self.grid);
        let total: f64 = v.iter().zip(&h).map(|(x, w)| w * x * x).sum();
        let n = v.len();
        (h[0] * v[0] * v[0] + h[n - 1] * v[n - 1] * v[n - 1]) / total
    }
}

fn quadrature(grid: &Grid) -> Vec<f64> {
    let n = grid.n_points();
    let mut h = vec![grid.dx(); n];
    h[0] *= 0.5;
    h[n - 1] *= 0.5;
    h
}

/// `sqrt(2/L) sin(n pi (x - a) / L)` sampled on the grid.
pub fn continuum_state(grid: &Grid, n: usize) -> Vec<f64> {
    let l = grid.length();
    let amp = (2.0 / l).sqrt();
    grid.points()
        .into_iter()
        .map(|x| amp * (n as f64 * PI * (x - grid.a()) / l).sin())
        .collect()
}

/// Flip the sign so the first entry above `1e-12 * max|v|` is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let cutoff = 1e-12 * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > cutoff) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn h_normalize(sbp: &SbpOperator, v: &mut [f64]) -> Result<()> {
    let norm = sbp.h_norm_real(v)?;
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(())
}

fn rayleigh(m: &RealMatrix, v: &[f64]) -> Result<f64> {
    let mv = m.matvec(v)?;
    Ok(crate::linalg::dot(v, &mv) / crate::linalg::dot(v, v))
}

fn dirichlet_cross(a: &[f64], b: &[f64]) -> f64 {
    a.windows(2)
        .zip(b.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[1] - y[0]))
        .sum()
}

pub fn solve_well(grid: &Grid, pot: &PotentialSpec, mass: f64, hbar: f64) -> Result<WellSpectrum> {
    let hamiltonian = build_hamiltonian(grid, pot, mass, hbar)?;
    let decomposition = symmetric_eigensolve(&hamiltonian)?;
    let sbp = build_sbp21(grid)?;
    let n = grid.n_points();

    let eigenvalues = decomposition.eigenvalues.clone();
    let mut states = RealMatrix::zeros(n, n);
    for i in 0..n {
        let mut v = decomposition.vector(i);
        h_normalize(&sbp, &mut v)?;
        fix_sign(&mut v);
        states.set_column(i, &v);
    }

    let wall_cut = 0.5 * pot.wall_height;
    let mut labels: Vec<StateLabel> = eigenvalues
        .iter()
        .map(|&e| if e >= wall_cut { StateLabel::Wall } else { StateLabel::Unpaired })
        .collect();

    let mut pairs = Vec::new();
    let mut anomalies = Vec::new();
    let below: Vec<usize> = (0..n).filter(|&i| labels[i] != StateLabel::Wall).collect();
    let mut k = 0;
    while k < below.len() {
        let i = below[k];
        let paired = below.get(k + 1).and_then(|&j| {
            let gap = (eigenvalues[j] - eigenvalues[i]).abs();
            let close = gap <= PAIR_TOLERANCE * eigenvalues[i].abs().max(1.0);
            let isolated = below
                .get(k + 2)
                .map_or(true, |&next| gap < eigenvalues[next] - eigenvalues[j]);
            (close && isolated).then_some(LevelPair { index_a: i, index_b: j, gap })
        });
        match paired {
            Some(p) => {
                labels[p.index_a] = StateLabel::Physical;
                labels[p.index_b] = StateLabel::Unphysical;
                pairs.push(p);
                k += 2;
            }
            None => {
                anomalies.push(format!(
                    "N_x = {n}: level {i} (E = {:.6e}) has no degenerate partner",
                    eigenvalues[i]
                ));
                k += 1;
            }
        }
    }

    let energies = eigenvalues.clone();
    let spectrum = WellSpectrum {
        grid: *grid,
        mass,
        hbar,
        potential: *pot,
        hamiltonian,
        eigenvalues,
        energies,
        states,
        pairs,
        labels,
        anomalies,
        residual_bound: decomposition.residual_bound,
    };
    split_physical(spectrum)
}

/// Rotates every pair into `{w_phys, w_unphys}`, where `w_phys` minimizes the
/// Dirichlet energy `sum (w_{k+1} - w_k)^2` over unit combinations.
pub fn split_physical(mut spectrum: WellSpectrum) -> Result<WellSpectrum> {
    let sbp = build_sbp21(&spectrum.grid)?;
    for pair in spectrum.pairs.clone() {
        let (a, b) = (pair.index_a, pair.index_b);
        let (phys, unphys) = separate_pair(&spectrum.state(a), &spectrum.state(b))?;
        for (slot, mut v, label) in [(a, phys, StateLabel::Physical), (b, unphys, StateLabel::Unphysical)] {
            h_normalize(&sbp, &mut v)?;
            fix_sign(&mut v);
            spectrum.energies[slot] = rayleigh(&spectrum.hamiltonian, &v)?;
            spectrum.states.set_column(slot, &v);
            spectrum.labels[slot] = label;
        }
    }
    Ok(spectrum)
}

/// Smooth and alternating combinations of two vectors spanning a pair,
/// returned with unit Euclidean norm.
pub fn separate_pair(va: &[f64], vb: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    use crate::linalg::{dot, norm2};
    if va.len() != vb.len() {
        return Err(Error::Dimension {
            expected: va.len(),
            actual: vb.len(),
        });
    }
    let na = norm2(va);
    let e1: Vec<f64> = va.iter().map(|x| x / na).collect();
    let proj = dot(&e1, vb);
    let rest: Vec<f64> = vb.iter().zip(&e1).map(|(x, y)| x - proj * y).collect();
    let nr = norm2(&rest);
    if na == 0.0 || nr <= 1e-12 * norm2(vb) {
        return Err(Error::contract("pair vectors are linearly dependent"));
    }
    let e2: Vec<f64> = rest.iter().map(|x| x / nr).collect();

    let g11 = dirichlet_cross(&e1, &e1);
    let g12 = dirichlet_cross(&e1, &e2);
    let g22 = dirichlet_cross(&e2, &e2);
    let g = RealMatrix::from_rows(&[vec![g11, g12], vec![g12, g22]])?;
    let eig = symmetric_eigensolve(&g)?;
    let combine = |u: Vec<f64>| -> Vec<f64> { e1.iter().zip(&e2).map(|(x, y)| u[0] * x + u[1] * y).collect() };
    Ok((combine(eig.vector(0)), combine(eig.vector(1))))
}

/// `n^2 pi^2 hbar^2 / (2 m L^2)`.
pub fn continuum_energy(n: usize, length: f64, mass: f64, hbar: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::contract("continuum levels are numbered from 1"));
    }
    if !(length > 0.0) {
        return Err(Error::contract(format!("length must be positive, got {length}")));
    }
    check_physical(mass, hbar)?;
    let k = n as f64 * PI * hbar / length;
    Ok(k * k / (2.0 * mass))
}

pub(crate) fn check_refining(grids: &[Grid]) -> Result<()> {
    if grids.is_empty() {
        return Err(Error::contract("no grids given"));
    }
    if grids.windows(2).any(|w| !(w[1].dx() < w[0].dx())) {
        return Err(Error::contract("grids must be strictly refining (dx decreasing)"));
    }
    Ok(())
}

/// Solves every grid concurrently; results keep the input order.
pub fn solve_grids(grids: &[Grid], pot: &PotentialSpec, mass: f64, hbar: f64) -> Result<Vec<WellSpectrum>> {
    grids.par_iter().map(|g| solve_well(g, pot, mass, hbar)).collect()
}

pub fn energy_deviation_series(
    n: usize,
    grids: &[Grid],
    pot: &PotentialSpec,
    mass: f64,
    hbar: f64,
) -> Result<ConvergenceSeries> {
    check_refining(grids)?;
    let spectra = solve_grids(grids, pot, mass, hbar)?;
    energy_deviation_from_spectra(n, &spectra)
}

/// `|E_n - E_n^continuum|` per precomputed spectrum.
pub fn energy_deviation_from_spectra(n: usize, spectra: &[WellSpectrum]) -> Result<ConvergenceSeries> {
    let grids: Vec<Grid> = spectra.iter().map(|s| s.grid).collect();
    check_refining(&grids)?;
    let samples = spectra
        .iter()
        .map(|s| {
            let (e, _) = s.physical_level(n)?;
            let exact = continuum_energy(n, s.grid.length(), s.mass, s.hbar)?;
            Ok((s.grid.dx(), (e - exact).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceSeries::new(format!("energy_n{n}"), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::general_eigen_oracle;

    fn default_well(n: usize) -> WellSpectrum {
        solve_well(&Grid::unit(n).unwrap(), &PotentialSpec::default(), 1.0, 1.0).unwrap()
    }

    #[test]
    fn three_point_entries() {
        let grid = Grid::unit(3).unwrap();
        let pot = PotentialSpec::with_wall(0.0);
        assert!(build_hamiltonian(&grid, &pot, 1.0, 1.0).is_err());
        let pot = PotentialSpec {
            wall_height: 1e-300,
            ..PotentialSpec::default()
        };
        let h = build_hamiltonian(&grid, &pot, 1.0, 1.0).unwrap();
        assert_eq!(h[(0, 0)], 2.5);
        // independent product of the dense matrices
        let sbp = build_sbp21(&grid).unwrap();
        let d = sbp.d_matrix();
        let dtd = d.transpose().matmul(d).unwrap().scaled(0.5);
        for i in 0..3 {
            for j in 0..3 {
                let wall = if i == j && i != 1 { 1e-300 } else { 0.0 };
                assert_eq!(h[(i, j)], dtd[(i, j)] + wall);
            }
        }
    }

    #[test]
    fn walls_on_endpoints_only() {
        let grid = Grid::unit(10).unwrap();
        let free = build_hamiltonian(&grid, &PotentialSpec::with_wall(1e-300), 1.0, 1.0).unwrap();
        let h = build_hamiltonian(&grid, &PotentialSpec::default(), 1.0, 1.0).unwrap();
        for i in 0..10 {
            let extra = h[(i, i)] - free[(i, i)];
            let expect = if i == 0 || i == 9 { 1e7 } else { 0.0 };
            assert!((extra - expect).abs() < 1e-6, "site {i}");
        }
        assert_eq!(h.asymmetry(), 0.0);
    }

    #[test]
    fn free_kinetic_term_is_positive_semidefinite() {
        for n in [5, 16, 33] {
            let h = build_hamiltonian(&Grid::unit(n).unwrap(), &PotentialSpec::with_wall(1e-300), 1.0, 1.0).unwrap();
            let e = symmetric_eigensolve(&h).unwrap();
            assert!(e.eigenvalues[0] >= -1e-10);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let grid = Grid::unit(8).unwrap();
        assert!(build_hamiltonian(&grid, &PotentialSpec::default(), 0.0, 1.0).is_err());
        assert!(build_hamiltonian(&grid, &PotentialSpec::default(), 1.0, -1.0).is_err());
        assert!("square".parse::<PotentialKind>().is_err());
        assert_eq!(
            "infinite_well_approx".parse::<PotentialKind>().unwrap(),
            PotentialKind::InfiniteWellApprox
        );
    }

    #[test]
    fn eight_point_spectrum_matches_characteristic_roots() {
        let grid = Grid::unit(8).unwrap();
        let h = build_hamiltonian(&grid, &PotentialSpec::default(), 1.0, 1.0).unwrap();
        let jac = symmetric_eigensolve(&h).unwrap();
        let mut roots: Vec<f64> = general_eigen_oracle(&h.to_complex(), 12)
            .unwrap()
            .into_iter()
            .map(|z| z.re)
            .collect();
        roots.sort_by(f64::total_cmp);
        for (a, b) in jac.eigenvalues.iter().zip(&roots) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn structure_at_32_points() {
        let s = default_well(32);
        assert_eq!(s.count(StateLabel::Physical), 15);
        assert_eq!(s.count(StateLabel::Unphysical), 15);
        assert_eq!(s.count(StateLabel::Wall), 2);
        assert!(s.anomalies.is_empty());
        for p in &s.pairs {
            assert!(p.relative_gap(&s.eigenvalues) < 1e-3);
        }
        assert!(s.max_cross_overlap() <= 1e-8);
        assert!(s.doubler_similarity(1).unwrap() >= 1.0 - 1e-4);
        assert!(s.continuum_overlap(1).unwrap() >= 0.999);
        for i in s.indices(StateLabel::Wall) {
            assert!(s.eigenvalues[i] >= 0.5e7);
            assert!(s.endpoint_weight(i) >= 0.99);
        }
        assert!(s.energies.iter().zip(&s.eigenvalues).all(|(e, l)| (e - l).abs() <= 1e-3 * l.abs().max(1.0)));
    }

    #[test]
    fn structure_at_64_points() {
        let s = default_well(64);
        assert!(s.continuum_overlap(1).unwrap() >= 0.999);
        for n in 1..=4 {
            assert!(s.doubler_similarity(n).unwrap() >= 1.0 - 1e-3);
        }
        let (e1, _) = s.physical_level(1).unwrap();
        let (e2, _) = s.physical_level(2).unwrap();
        assert!(e1 < e2);
        assert!(s.physical_level(0).is_err());
        assert!(s.physical_level(40).is_err());
    }

    #[test]
    fn states_are_h_normalized_and_signed() {
        let s = default_well(16);
        let sbp = build_sbp21(&s.grid).unwrap();
        for i in 0..16 {
            let v = s.state(i);
            assert!((sbp.h_norm_real(&v).unwrap() - 1.0).abs() < 1e-12);
            let first = v.iter().find(|x| x.abs() > 1e-12 * 10.0).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn separate_smooth_from_alternating() {
        let n = 20;
        let s: Vec<f64> = (0..n).map(|k| (PI * k as f64 / (n - 1) as f64).sin()).collect();
        let a: Vec<f64> = s.iter().zip(pi_mode(n)).map(|(x, p)| x * p).collect();
        // feed rotated combinations
        let (c, d) = (0.6, 0.8);
        let va: Vec<f64> = s.iter().zip(&a).map(|(x, y)| c * x + d * y).collect();
        let vb: Vec<f64> = s.iter().zip(&a).map(|(x, y)| -d * x + c * y).collect();
        let (phys, unphys) = separate_pair(&va, &vb).unwrap();
        assert!(crate::linalg::cosine_similarity(&phys, &s) > 1.0 - 1e-12);
        assert!(crate::linalg::cosine_similarity(&unphys, &a) > 1.0 - 1e-12);
        assert!(separate_pair(&va, &va).is_err());
    }

    #[test]
    fn continuum_energies() {
        let e1 = continuum_energy(1, 1.0, 1.0, 1.0).unwrap();
        assert!((e1 - 4.934802200544679).abs() < 1e-14);
        assert!((continuum_energy(2, 1.0, 1.0, 1.0).unwrap() - 4.0 * e1).abs() < 1e-12);
        assert!(continuum_energy(0, 1.0, 1.0, 1.0).is_err());
        assert!((1..10).all(|n| continuum_energy(n, 2.0, 3.0, 0.5).unwrap() > 0.0));
    }

    #[test]
    fn ground_energy_converges() {
        let grids: Vec<Grid> = [32, 64, 128].iter().map(|&n| Grid::unit(n).unwrap()).collect();
        let series = energy_deviation_series(1, &grids, &PotentialSpec::default(), 1.0, 1.0).unwrap();
        assert!(series.strictly_decreasing());
        let nu = series.exponent().unwrap();
        assert!((0.7..=1.3).contains(&nu), "nu = {nu}");
        assert!(series.samples[0].1 / series.samples[2].1 >= 3.5);
    }

    #[test]
    fn series_requires_refinement() {
        let grids: Vec<Grid> = [64, 32].iter().map(|&n| Grid::unit(n).unwrap()).collect();
        assert!(energy_deviation_series(1, &grids, &PotentialSpec::default(), 1.0, 1.0).is_err());
        let few = [Grid::unit(8).unwrap(), Grid::unit(16).unwrap()];
        assert!(energy_deviation_series(5, &few, &PotentialSpec::default(), 1.0, 1.0).is_err());
    }
}

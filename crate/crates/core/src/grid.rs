use crate::error::{Error, Result};

/// Uniform one-dimensional grid on `[a, b]` with `n_points` nodes, both
/// endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::contract(format!(
                "grid needs finite a < b, got [{a}, {b}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::contract(format!(
                "grid needs N_x >= 3 so the boundary stencils do not overlap, got {n_points}"
            )));
        }
        let dx = (b - a) / (n_points - 1) as f64;
        Ok(Self { a, b, n_points, dx })
    }

    /// `[0, 1]` with `n_points` nodes.
    pub fn unit(n_points: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_points)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// `L = (N_x - 1) dx`.
    pub fn length(&self) -> f64 {
        (self.n_points - 1) as f64 * self.dx
    }

    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k < self.n_points);
        self.a + k as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    pub fn is_even(&self) -> bool {
        self.n_points % 2 == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_length() {
        let g = Grid::new(-1.0, 2.0, 7).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.length(), 3.0);
        assert_eq!(g.point(6), 2.0);
    }

    #[test]
    fn length_matches_interval() {
        for n in [3, 8, 31, 64, 257, 1000] {
            let g = Grid::new(0.3, 1.7, n).unwrap();
            assert!((g.length() - 1.4).abs() <= 1e-14 * 1.4, "n = {n}");
            assert!((g.point(n - 1) - 1.7).abs() <= f64::EPSILON * 2.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Grid::unit(2).is_err());
        assert!(Grid::new(1.0, 1.0, 8).is_err());
        assert!(Grid::new(1.0, 0.0, 8).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 8).is_err());
    }
}

//! Summation-by-parts momentum operator for a particle in a box.
//!
//! The crate builds the second-order SBP derivative `D = H^{-1} Q` on a
//! uniform grid, the momentum operator `P = -i hbar D`, its closed-form
//! spectrum and eigenvectors, the approximate infinite-well Hamiltonian
//! `P^† P / 2m + V` with its physical/doubler splitting, momentum moments,
//! and a harness that runs grid-refinement studies and fits power laws.

pub mod eigen;
pub mod error;
pub mod fit;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod momentum;
pub mod observables;
pub mod oracle;
pub mod sbp;
pub mod series;
pub mod well;

pub use error::{Error, Result};
pub use fit::{fit_power_law, PowerLawFit};
pub use grid::Grid;
pub use linalg::{ComplexMatrix, ComplexVector, RealMatrix};
pub use momentum::{MomentumEigenpair, MomentumOperator};
pub use sbp::{build_sbp21, SbpOperator};
pub use series::ConvergenceSeries;
pub use well::{solve_well, PotentialSpec, StateLabel, WellSpectrum};

//! Helmholtz forward model: fundamental solutions, the discrete volume
//! potential, the Lippmann–Schwinger solve and the boundary measurement map.

pub mod bessel;
pub mod cache;
pub mod fft;
pub mod grid;
pub mod kernel;
pub mod krylov;
pub mod measurement;
pub mod potential;

pub use grid::{Grid, Medium, Point, ReceiverSet};
pub use kernel::{fundamental_solution, self_cell_integral};
pub use measurement::{assemble_vb, ls_solve, source_to_measurement, ForwardModel, ASSEMBLY_TOL, DATA_TOL};
pub use potential::VolumePotential;

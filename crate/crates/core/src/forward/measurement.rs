//! Source-to-measurement map and assembly of the realified boundary operator.

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{distance, Grid, Medium, Point, ReceiverSet};
use super::kernel::fundamental_solution_unchecked;
use super::krylov::{gmres, GmresOptions};
use super::potential::VolumePotential;
use crate::error::{Error, Result};
use crate::realfield::{derealify, realify, RealifiedMatrix, RealifiedVector};

/// Tolerance used when solving for synthetic data.
pub const DATA_TOL: f64 = 1e-10;
/// Tolerance used for the per-receiver solves of operator assembly.
pub const ASSEMBLY_TOL: f64 = 1e-8;

/// Grid, medium and the FFT-backed volume potential bundled for repeated solves.
pub struct ForwardModel {
    grid: Grid,
    medium: Medium,
    potential: VolumePotential,
    gmres: GmresOptions,
}

impl ForwardModel {
    pub fn new(grid: &Grid, medium: &Medium) -> Result<Self> {
        if medium.q().len() != grid.len() {
            return Err(Error::Dimension("medium does not match grid".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            medium: medium.clone(),
            potential: VolumePotential::new(grid, medium.k())?,
            gmres: GmresOptions::default(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn potential(&self) -> &VolumePotential {
        &self.potential
    }

    /// Solves `(I - V_k q) w = rhs` to relative residual `tol`.
    pub fn ls_solve(&self, rhs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        if rhs.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "right-hand side has {} samples, grid has {} nodes",
                rhs.len(),
                self.grid.len()
            )));
        }
        if self.medium.is_homogeneous() {
            return Ok(rhs.to_vec());
        }
        let opts = GmresOptions { tol, ..self.gmres };
        let out = gmres(|w| self.ls_apply(w), rhs, &opts)?;
        Ok(out.solution)
    }

    /// `(I - V_k q) w`.
    pub fn ls_apply(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        let q = self.medium.q();
        let qw: Vec<Complex64> = w.iter().zip(q).map(|(a, b)| a * b).collect();
        let vqw = self.potential.apply_fft(&qw)?;
        Ok(w.iter().zip(vqw).map(|(a, b)| a - b).collect())
    }

    /// Trace weights `ρ_r(y_j) = h^d Φ(x_r, y_j)`, the homogeneous row for receiver `x_r`.
    pub fn trace_row(&self, receiver: &Point) -> Vec<Complex64> {
        let k = self.medium.k();
        let dim = self.grid.dim();
        let w = self.grid.cell_volume();
        self.grid
            .nodes()
            .map(|y| w * fundamental_solution_unchecked(k, distance(receiver, &y), dim))
            .collect()
    }

    /// Complex boundary data `u_b^s = T_r (1/k²) V_k (I + q (I - V_k q)^{-1} V_k) μ`.
    pub fn measure_complex(&self, receivers: &ReceiverSet, mu: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        if mu.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "source has {} samples, grid has {} nodes",
                mu.len(),
                self.grid.len()
            )));
        }
        let density: Vec<Complex64> = if self.medium.is_homogeneous() {
            mu.to_vec()
        } else {
            let v_mu = self.potential.apply_fft(mu)?;
            let t = self.ls_solve(&v_mu, tol)?;
            mu.iter()
                .zip(&t)
                .zip(self.medium.q())
                .map(|((m, t), q)| m + q * t)
                .collect()
        };
        Ok(receivers
            .points()
            .par_iter()
            .map(|p| self.trace_row(p).iter().zip(&density).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn source_to_measurement(&self, receivers: &ReceiverSet, mu: &RealifiedVector, tol: f64) -> Result<RealifiedVector> {
        Ok(realify(&self.measure_complex(receivers, &derealify(mu), tol)?))
    }

    /// Complex rows of the measurement map, one adjoint solve per receiver.
    ///
    /// By reciprocity of the Green's function for a real index, the row for
    /// receiver `x_r` is `(I - V_k q)^{-1} ρ_r`.
    pub fn assemble_rows(&self, receivers: &ReceiverSet, tol: f64) -> Result<Vec<Vec<Complex64>>> {
        receivers
            .points()
            .par_iter()
            .map(|p| self.ls_solve(&self.trace_row(p), tol))
            .collect()
    }

    pub fn assemble_vb(&self, receivers: &ReceiverSet, tol: f64) -> Result<RealifiedMatrix> {
        let rows = self.assemble_rows(receivers, tol)?;
        RealifiedMatrix::from_complex_rows(&rows)
    }
}

pub fn ls_solve(grid: &Grid, medium: &Medium, rhs: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    ForwardModel::new(grid, medium)?.ls_solve(rhs, tol)
}

pub fn source_to_measurement(
    grid: &Grid,
    medium: &Medium,
    receivers: &ReceiverSet,
    mu: &RealifiedVector,
) -> Result<RealifiedVector> {
    ForwardModel::new(grid, medium)?.source_to_measurement(receivers, mu, DATA_TOL)
}

pub fn assemble_vb(grid: &Grid, medium: &Medium, receivers: &ReceiverSet) -> Result<RealifiedMatrix> {
    ForwardModel::new(grid, medium)?.assemble_vb(receivers, ASSEMBLY_TOL)
}

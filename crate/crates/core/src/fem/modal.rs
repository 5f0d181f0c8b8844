use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use super::structure::SystemMatrices;
use crate::error::{Error, Result};

/// Frequencies below this (Hz) are classified as rigid-body motion.
pub const RIGID_BODY_TOLERANCE_HZ: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct ModalData {
    /// Ascending natural frequencies in Hz.
    pub frequencies_hz: Vec<f64>,
    /// Mass-normalised mode shapes, one column per frequency.
    pub mode_shapes: DMatrix<f64>,
    /// Generalized eigenvalues ω² before clamping at zero.
    pub eigenvalues: Vec<f64>,
}

impl ModalData {
    pub fn n_modes(&self) -> usize {
        self.frequencies_hz.len()
    }

    pub fn rigid_body_count(&self) -> usize {
        self.frequencies_hz
            .iter()
            .filter(|&&f| f < RIGID_BODY_TOLERANCE_HZ)
            .count()
    }

    /// Frequency of a 1-based global mode number (rigid-body modes included).
    pub fn frequency(&self, mode_index: usize) -> Option<f64> {
        mode_index
            .checked_sub(1)
            .and_then(|i| self.frequencies_hz.get(i).copied())
    }
}

/// Lowest `n_modes` solutions of `K φ = ω² M φ`.
///
/// The pencil is reduced with the Cholesky factor of `M` (`A = L⁻¹ K L⁻ᵀ`) and
/// solved as a dense symmetric eigenproblem.
pub fn solve_modal(sys: &SystemMatrices, n_modes: usize) -> Result<ModalData> {
    let n = sys.n_dof();
    if n_modes > n {
        return Err(Error::InvalidArgument(format!(
            "requested {n_modes} modes from a system with {n} DOFs"
        )));
    }
    let chol = sys.mass.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    // L⁻¹ K, then (L⁻¹ (L⁻¹ K)ᵀ) = L⁻¹ K L⁻ᵀ since K is symmetric
    let lk = l
        .solve_lower_triangular(&sys.stiffness)
        .ok_or(Error::NotPositiveDefinite)?;
    let mut a = l
        .solve_lower_triangular(&lk.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    a = (&a + a.transpose()) * 0.5;

    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order.truncate(n_modes);

    let lt = l.transpose();
    let mut shapes = DMatrix::<f64>::zeros(n, n_modes);
    let mut eigenvalues = Vec::with_capacity(n_modes);
    let mut frequencies_hz = Vec::with_capacity(n_modes);
    for (col, &i) in order.iter().enumerate() {
        let y = eig.eigenvectors.column(i).into_owned();
        let phi = lt.solve_upper_triangular(&y).ok_or(Error::NotPositiveDefinite)?;
        // fix the sign so results do not depend on solver internals
        let pivot = phi
            .iter()
            .copied()
            .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        let phi = if pivot < 0.0 { -phi } else { phi };
        shapes.set_column(col, &phi);
        let lambda = eig.eigenvalues[i];
        eigenvalues.push(lambda);
        frequencies_hz.push(lambda.max(0.0).sqrt() / (2.0 * PI));
    }
    Ok(ModalData {
        frequencies_hz,
        mode_shapes: shapes,
        eigenvalues,
    })
}

//! Hermitian observables and matrix hygiene checks.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::space::{joint_dim, SpaceLabel};
use crate::{tol, C64};

/// Max entry of `|M[i,j] - conj(M[j,i])|`.
pub fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Max entry of `|U'U - 1|`.
pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            };
            let d = (prod[(i, j)] - expected).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub(crate) fn check_square(m: &DMatrix<C64>, dim: usize) -> Result<(), Error> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows().max(m.ncols()),
        });
    }
    Ok(())
}

pub(crate) fn check_unitary(u: &DMatrix<C64>) -> Result<(), Error> {
    let dev = unitarity_deviation(u);
    if dev > tol::UNITARITY {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

pub(crate) fn check_hermitian(m: &DMatrix<C64>) -> Result<(), Error> {
    let dev = hermiticity_deviation(m);
    if dev > tol::HERMITICITY {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// A Hermitian operator over an ordered list of labeled factors.
#[derive(Clone, Debug)]
pub struct Observable {
    factors: Vec<SpaceLabel>,
    matrix: DMatrix<C64>,
}

impl Observable {
    /// Validates shape and Hermitian symmetry.
    pub fn new(factors: Vec<SpaceLabel>, matrix: DMatrix<C64>) -> Result<Self, Error> {
        let dim = joint_dim(&factors)?;
        check_square(&matrix, dim)?;
        check_hermitian(&matrix)?;
        Ok(Observable { factors, matrix })
    }

    pub fn factors(&self) -> &[SpaceLabel] {
        &self.factors
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

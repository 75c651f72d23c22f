//! Idealized premeasurement: a pointer apparatus whose resting state is
//! shifted to a distinct reading for each basis state of the measured
//! system, without any collapse. The defining map only fixes how the
//! resting pointer moves; two different unitary completions of that map
//! are provided to show that nothing downstream depends on the choice.

use nalgebra::DMatrix;

use crate::density::DensityOperator;
use crate::error::Error;
use crate::space::SpaceLabel;
use crate::state::StateVector;
use crate::C64;

pub const SYSTEM: &str = "system";
pub const APPARATUS: &str = "apparatus";

/// How to extend the defining pointer shift `|s_k, a_0> -> |s_k, a_{k+1}>`
/// to a full unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completion {
    /// Shift every pointer state cyclically by `k + 1` readings.
    Cyclic,
    /// Swap the resting state with reading `k + 1`, fix the rest.
    Swap,
}

/// A system of `n` basis states with amplitudes `coefficients`, coupled to
/// a pointer with `n + 1` positions (one resting state plus one reading
/// per system state).
#[derive(Clone, Debug)]
pub struct PointerChain {
    coefficients: Vec<C64>,
    system: SpaceLabel,
    apparatus: SpaceLabel,
}

impl PointerChain {
    pub fn new(coefficients: &[C64]) -> Result<Self, Error> {
        Self::with_names(coefficients, SYSTEM, APPARATUS)
    }

    /// Same, with caller-chosen factor names (needed when chaining
    /// devices so the labels stay distinct).
    pub fn with_names(
        coefficients: &[C64],
        system_name: &str,
        apparatus_name: &str,
    ) -> Result<Self, Error> {
        if coefficients.len() < 2 || coefficients.len() > 64 {
            return Err(Error::BadCoefficientCount {
                min: 2,
                max: 64,
                got: coefficients.len(),
            });
        }
        let norm_sqr: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = C64::new(norm_sqr.sqrt(), 0.0);
        Ok(PointerChain {
            coefficients: coefficients.iter().map(|c| c / scale).collect(),
            system: SpaceLabel::new(system_name, coefficients.len())?,
            apparatus: SpaceLabel::new(apparatus_name, coefficients.len() + 1)?,
        })
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn system(&self) -> &SpaceLabel {
        &self.system
    }

    pub fn apparatus(&self) -> &SpaceLabel {
        &self.apparatus
    }

    /// `(sum_k c_k |s_k>) (x) |a_0>`: superposed system, resting pointer.
    pub fn initial_state(&self) -> StateVector {
        let n = self.system.dim();
        let a_dim = self.apparatus.dim();
        let mut amplitudes = nalgebra::DVector::from_element(n * a_dim, C64::default());
        for (k, c) in self.coefficients.iter().enumerate() {
            amplitudes[k * a_dim] = *c;
        }
        StateVector::new(
            vec![self.system.clone(), self.apparatus.clone()],
            amplitudes,
        )
        .expect("constructor checked the dimensions")
    }

    /// The permutation unitary over `(system, apparatus)` extending the
    /// defining pointer shift via the chosen completion.
    pub fn unitary(&self, completion: Completion) -> DMatrix<C64> {
        let n = self.system.dim();
        let a_dim = self.apparatus.dim();
        let dim = n * a_dim;
        let mut u = DMatrix::from_element(dim, dim, C64::default());
        for k in 0..n {
            for j in 0..a_dim {
                let target = match completion {
                    Completion::Cyclic => (j + k + 1) % a_dim,
                    Completion::Swap => {
                        if j == 0 {
                            k + 1
                        } else if j == k + 1 {
                            0
                        } else {
                            j
                        }
                    }
                };
                u[(k * a_dim + target, k * a_dim + j)] = C64::new(1.0, 0.0);
            }
        }
        u
    }

    /// Joint state after the pointer shift: `sum_k c_k |s_k, a_{k+1}>`,
    /// identical for both completions because the initial pointer rests.
    pub fn premeasure(&self, completion: Completion) -> Result<StateVector, Error> {
        self.initial_state().apply_unitary(
            &self.unitary(completion),
            &[self.system.name(), self.apparatus.name()],
        )
    }

    /// Reduced pointer state after premeasurement: a classical mixture
    /// `diag(0, |c_0|^2, ..., |c_{n-1}|^2)` with no coherence between
    /// readings.
    pub fn apparatus_state(&self, completion: Completion) -> Result<DensityOperator, Error> {
        self.premeasure(completion)?
            .to_density()?
            .partial_trace(&[self.apparatus.name()])
    }
}

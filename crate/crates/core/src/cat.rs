//! Exponential decay of a two-level emitter entangled with a two-state
//! target, and the reductions that show when the target's superposition
//! survives.
//!
//! The joint state follows the prescribed amplitude law
//! `exp(-lambda t / 2) |0,0> + sqrt(1 - exp(-lambda t)) |1,1>` over the
//! factors `(nucleus, cat)`, with index 0 meaning undecayed/alive and
//! index 1 meaning decayed/dead. The law is taken as given; no Hamiltonian
//! generates it here.

use nalgebra::{DMatrix, DVector};

use crate::density::DensityOperator;
use crate::error::Error;
use crate::space::SpaceLabel;
use crate::state::StateVector;
use crate::C64;

pub const NUCLEUS: &str = "nucleus";
pub const CAT: &str = "cat";

/// Decay rate and elapsed time, both in reciprocal/plain seconds.
#[derive(Clone, Copy, Debug)]
pub struct DecayParams {
    pub lambda: f64,
    pub t: f64,
}

impl DecayParams {
    pub fn new(lambda: f64, t: f64) -> Result<Self, Error> {
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::BadDecayRate(lambda));
        }
        if t < 0.0 || !t.is_finite() {
            return Err(Error::BadTime(t));
        }
        Ok(DecayParams { lambda, t })
    }

    /// Rate with a half-life of one hour.
    pub fn hour_half_life(t: f64) -> Result<Self, Error> {
        Self::new(std::f64::consts::LN_2 / 3600.0, t)
    }
}

pub fn nucleus_label() -> SpaceLabel {
    SpaceLabel::new(NUCLEUS, 2).expect("static label")
}

pub fn cat_label() -> SpaceLabel {
    SpaceLabel::new(CAT, 2).expect("static label")
}

/// `|undecayed, alive>`, the joint state at `t = 0`.
pub fn initial_state() -> StateVector {
    StateVector::basis_state(vec![nucleus_label(), cat_label()], &[0, 0]).expect("static state")
}

/// Amplitudes `(survive, decay)` of the joint `|0,0>` / `|1,1>` branches
/// after `t` seconds: `exp(-lambda t / 2)` and `sqrt(1 - exp(-lambda t))`.
pub fn decay_amplitudes(params: &DecayParams) -> (f64, f64) {
    let survival = (-params.lambda * params.t).exp();
    (
        (-params.lambda * params.t / 2.0).exp(),
        (1.0 - survival).sqrt(),
    )
}

/// Joint state after `t` seconds of decay. Only the `|0,0>` and `|1,1>`
/// amplitudes are populated; the norm is one by construction.
pub fn evolve_decay(params: &DecayParams) -> Result<StateVector, Error> {
    let (survive, decay) = decay_amplitudes(params);
    let mut amplitudes = DVector::from_element(4, C64::default());
    amplitudes[0] = C64::new(survive, 0.0);
    amplitudes[3] = C64::new(decay, 0.0);
    StateVector::new(vec![nucleus_label(), cat_label()], amplitudes)
}

/// Reduced state of the target after tracing out the emitter:
/// `diag(exp(-lambda t), 1 - exp(-lambda t))`.
pub fn reduced_cat(params: &DecayParams) -> Result<DensityOperator, Error> {
    evolve_decay(params)?.to_density()?.partial_trace(&[CAT])
}

/// Performs the reduction twice: once with the emitter rotated into the
/// `(|0> +- |1>)/sqrt(2)` basis before tracing, once directly. Returns
/// `(rotated_basis_reduction, direct_reduction)`; partial-trace basis
/// independence makes them equal.
pub fn rotated_basis_check(
    params: &DecayParams,
) -> Result<(DensityOperator, DensityOperator), Error> {
    let psi = evolve_decay(params)?;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(inv_sqrt2, 0.0),
            C64::new(inv_sqrt2, 0.0),
            C64::new(inv_sqrt2, 0.0),
            C64::new(-inv_sqrt2, 0.0),
        ],
    );
    let rotated = psi.apply_unitary(&hadamard, &[NUCLEUS])?;
    let in_plus_minus = rotated.to_density()?.partial_trace(&[CAT])?;
    let direct = psi.to_density()?.partial_trace(&[CAT])?;
    Ok((in_plus_minus, direct))
}

/// Populations that `reduced_cat` must show at time `t`.
pub fn expected_populations(params: &DecayParams) -> (f64, f64) {
    let survival = (-params.lambda * params.t).exp();
    (survival, 1.0 - survival)
}

/// Purity of the reduced target state, `p^2 + (1-p)^2` with
/// `p = exp(-lambda t)`; minimal (1/2) at one half-life.
pub fn reduced_purity(params: &DecayParams) -> f64 {
    let (alive, dead) = expected_populations(params);
    alive * alive + dead * dead
}

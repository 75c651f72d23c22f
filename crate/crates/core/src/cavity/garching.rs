//! Resonant-cavity protocol: an excited atom deposits a photon through
//! timed photon exchange, entangling its level with the photon number.
//! The field's off-diagonals vanish while that which-path record exists;
//! merging the atomic levels into a third state erases the record and the
//! field coherence reappears.

use crate::cavity::atom::{AtomSpace, DetectionRecord};
use crate::cavity::fock::FockSpace;
use crate::error::Error;
use crate::report::{emit_row, CurrentRef, ReportItem, ReportRow};
use crate::state::StateVector;
use crate::tol;

pub const FIELD: &str = "f";
pub const ATOM: &str = "atom";

#[derive(Clone, Debug)]
pub struct GarchingConfig {
    /// Atom-field coupling rate.
    pub coupling: f64,
    /// Interaction time; the exchange angle is `coupling * duration`.
    pub duration: f64,
    /// Photon-number cutoff of the simulated field.
    pub cutoff: usize,
    /// Merge the atomic levels into the sink state after the exchange.
    pub with_erasure: bool,
}

impl GarchingConfig {
    /// Balanced superposition (quarter-cycle exchange) with erasure.
    pub fn erased() -> Self {
        GarchingConfig {
            coupling: 1.0,
            duration: std::f64::consts::FRAC_PI_4,
            cutoff: 1,
            with_erasure: true,
        }
    }

    /// Same exchange, but the atom is detected instead of erased.
    pub fn unerased() -> Self {
        GarchingConfig {
            with_erasure: false,
            ..Self::erased()
        }
    }
}

pub fn garching_protocol(config: &GarchingConfig) -> Result<Vec<ReportRow>, Error> {
    if !config.coupling.is_finite() {
        return Err(Error::Unsupported(format!(
            "non-finite coupling {}",
            config.coupling
        )));
    }
    if !config.duration.is_finite() || config.duration < 0.0 {
        return Err(Error::BadTime(config.duration));
    }
    let field = FockSpace::new(FIELD, config.cutoff)?;
    let atom = if config.with_erasure {
        AtomSpace::three_level(ATOM)?
    } else {
        AtomSpace::two_level(ATOM)?
    };

    let mut psi = atom.basis_state("e")?.tensor(&field.vacuum())?;
    psi = atom.jc_evolve(&psi, FIELD, config.coupling * config.duration)?;

    let mut rows = Vec::new();
    rows.push(emit_row(
        CurrentRef::Pure(&psi),
        &[],
        1.0,
        Some("after_jc"),
        Some(FIELD),
        &[ReportItem::Populations, ReportItem::OffdiagMax],
    )?);

    let survivors = |state: &StateVector| -> Result<Vec<DetectionRecord>, Error> {
        Ok(atom
            .detect(state)?
            .into_iter()
            .filter(|r| r.probability > tol::BRANCH_PRUNE && r.post_state.is_some())
            .collect())
    };

    if config.with_erasure {
        // After the merge the atom sits in the sink level, so detection
        // has a single branch of unit probability.
        let (erased, _weight) = atom.erase_which_path(&psi)?;
        let branches = survivors(&erased)?;
        for record in &branches {
            rows.push(emit_row(
                CurrentRef::Pure(record.post_state.as_ref().expect("filtered")),
                &[(ATOM.to_string(), record.outcome.clone())],
                record.probability,
                None,
                None,
                &[ReportItem::Prob],
            )?);
        }
        for record in &branches {
            rows.push(emit_row(
                CurrentRef::Pure(record.post_state.as_ref().expect("filtered")),
                &[(ATOM.to_string(), record.outcome.clone())],
                record.probability,
                Some("after_erase"),
                Some(FIELD),
                &[
                    ReportItem::Populations,
                    ReportItem::Coherence(0, 1),
                    ReportItem::OffdiagMax,
                    ReportItem::Purity,
                ],
            )?);
        }
    } else {
        let branches = survivors(&psi)?;
        for record in &branches {
            rows.push(emit_row(
                CurrentRef::Pure(record.post_state.as_ref().expect("filtered")),
                &[(ATOM.to_string(), record.outcome.clone())],
                record.probability,
                None,
                None,
                &[ReportItem::Prob],
            )?);
        }
        for record in &branches {
            rows.push(emit_row(
                CurrentRef::Pure(record.post_state.as_ref().expect("filtered")),
                &[(ATOM.to_string(), record.outcome.clone())],
                record.probability,
                Some("after_detect"),
                Some(FIELD),
                &[ReportItem::Populations, ReportItem::OffdiagMax],
            )?);
        }
    }
    Ok(rows)
}

//! Dispersive-cavity protocol: a marker atom writes which-path information
//! into the phase of a coherent field, a second pulse plus detection erases
//! it, and a probe atom then reads out the restored interference. Skipping
//! the erasure steps leaves the which-path record in place and kills the
//! outcome correlation.

use crate::cavity::atom::AtomSpace;
use crate::cavity::fock::{default_cutoff, FockSpace};
use crate::error::Error;
use crate::report::{correlation, emit_row, CurrentRef, NamedValue, ReportItem, ReportRow};
use crate::state::StateVector;
use crate::{tol, C64};

pub const FIELD: &str = "f";
pub const MARKER_ATOM: &str = "a1";
pub const PROBE_ATOM: &str = "a2";

/// Protocol variant and field size.
#[derive(Clone, Debug)]
pub struct ParisConfig {
    /// Coherent amplitude injected into the cavity.
    pub alpha: C64,
    /// Photon-number cutoff of the simulated field.
    pub cutoff: usize,
    /// Apply the second balanced pulse to the marker atom.
    pub with_second_pulse: bool,
    /// Detect the marker atom before the probe runs.
    pub with_marker_detection: bool,
}

impl ParisConfig {
    /// The complete protocol: which-path information is erased before the
    /// probe, so marker and probe outcomes correlate perfectly.
    pub fn full(alpha: C64) -> Self {
        ParisConfig {
            alpha,
            cutoff: default_cutoff(alpha),
            with_second_pulse: true,
            with_marker_detection: true,
        }
    }

    /// The stripped variant: no second pulse, marker detected only at the
    /// very end. Which-path information survives and the correlation
    /// vanishes.
    pub fn modified(alpha: C64) -> Self {
        ParisConfig {
            alpha,
            cutoff: default_cutoff(alpha),
            with_second_pulse: false,
            with_marker_detection: false,
        }
    }
}

struct Branch {
    psi: StateVector,
    probability: f64,
    outcomes: Vec<(String, String)>,
}

fn detect_into_branches(atom: &AtomSpace, branch: &Branch) -> Result<Vec<Branch>, Error> {
    let mut out = Vec::new();
    for record in atom.detect(&branch.psi)? {
        let joint = branch.probability * record.probability;
        if joint <= tol::BRANCH_PRUNE {
            continue;
        }
        let Some(post) = record.post_state else {
            continue;
        };
        let mut outcomes = branch.outcomes.clone();
        outcomes.push((atom.name().to_string(), record.outcome));
        out.push(Branch {
            psi: post,
            probability: joint,
            outcomes,
        });
    }
    Ok(out)
}

pub fn paris_protocol(config: &ParisConfig) -> Result<Vec<ReportRow>, Error> {
    let field = FockSpace::new(FIELD, config.cutoff)?;
    let marker = AtomSpace::two_level(MARKER_ATOM)?;
    let probe = AtomSpace::two_level(PROBE_ATOM)?;
    let pi = std::f64::consts::PI;
    let fringe = [ReportItem::Fringe(config.alpha)];
    let prob = [ReportItem::Prob];
    let phase_kick = marker.dispersive_shift(&[pi, 0.0], field.dim())?;

    let mut psi = marker
        .basis_state("e")?
        .tensor(&field.coherent_state(config.alpha)?)?
        .tensor(&probe.basis_state("e")?)?;
    let mut rows = Vec::new();

    // Marker atom: balanced pulse, then a pi phase kick per photon on its
    // excited branch. The field now carries opposite-phase branches tied
    // to the atom's level.
    psi = psi.apply_unitary(&marker.ramsey_pulse(), &[MARKER_ATOM])?;
    psi = psi.apply_unitary(&phase_kick, &[MARKER_ATOM, FIELD])?;
    rows.push(emit_row(
        CurrentRef::Pure(&psi),
        &[],
        1.0,
        Some("after_c1"),
        Some(FIELD),
        &fringe,
    )?);

    if config.with_second_pulse {
        psi = psi.apply_unitary(&marker.ramsey_pulse(), &[MARKER_ATOM])?;
        rows.push(emit_row(
            CurrentRef::Pure(&psi),
            &[],
            1.0,
            Some("after_r2"),
            Some(FIELD),
            &fringe,
        )?);
    }

    let root = Branch {
        psi,
        probability: 1.0,
        outcomes: Vec::new(),
    };
    let mut branches = if config.with_marker_detection {
        let split = detect_into_branches(&marker, &root)?;
        for branch in &split {
            rows.push(emit_row(
                CurrentRef::Pure(&branch.psi),
                &branch.outcomes,
                branch.probability,
                None,
                None,
                &prob,
            )?);
        }
        for branch in &split {
            rows.push(emit_row(
                CurrentRef::Pure(&branch.psi),
                &branch.outcomes,
                branch.probability,
                Some("after_detect"),
                Some(FIELD),
                &fringe,
            )?);
        }
        split
    } else {
        vec![root]
    };

    // Probe atom: identical pulse and phase kick. Conditioned on the
    // branch, the probe picks up the field's photon-number parity.
    let probe_kick = probe.dispersive_shift(&[pi, 0.0], field.dim())?;
    for branch in &mut branches {
        branch.psi = branch
            .psi
            .apply_unitary(&probe.ramsey_pulse(), &[PROBE_ATOM])?;
        branch.psi = branch
            .psi
            .apply_unitary(&probe_kick, &[PROBE_ATOM, FIELD])?;
    }
    for branch in &branches {
        rows.push(emit_row(
            CurrentRef::Pure(&branch.psi),
            &branch.outcomes,
            branch.probability,
            Some("probe_c"),
            Some(FIELD),
            &fringe,
        )?);
    }
    for branch in &mut branches {
        branch.psi = branch
            .psi
            .apply_unitary(&probe.ramsey_pulse(), &[PROBE_ATOM])?;
    }

    let mut leaves = Vec::new();
    for branch in &branches {
        leaves.extend(detect_into_branches(&probe, branch)?);
    }

    // In the stripped variant the marker atom is detected last, after the
    // probe has already committed to an outcome.
    if !config.with_marker_detection {
        let mut deeper = Vec::new();
        for leaf in &leaves {
            rows.push(emit_row(
                CurrentRef::Pure(&leaf.psi),
                &leaf.outcomes,
                leaf.probability,
                None,
                None,
                &prob,
            )?);
            deeper.extend(detect_into_branches(&marker, leaf)?);
        }
        leaves = deeper;
    }

    for leaf in &leaves {
        rows.push(emit_row(
            CurrentRef::Pure(&leaf.psi),
            &leaf.outcomes,
            leaf.probability,
            None,
            None,
            &prob,
        )?);
    }

    let pairs: Vec<_> = leaves
        .iter()
        .map(|l| (l.outcomes.clone(), l.probability))
        .collect();
    let (corr, total) = correlation(&pairs, MARKER_ATOM, PROBE_ATOM)?;
    rows.push(ReportRow {
        branch: String::new(),
        outcomes: Vec::new(),
        probability: total,
        values: vec![NamedValue {
            name: "corr".to_string(),
            value: corr,
        }],
        matrices: Vec::new(),
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Overlap of the two opposite-phase field branches at |alpha| = 2.
    const BRANCH_OVERLAP: f64 = 3.3546262790251185e-4;

    fn value<'a>(rows: &'a [ReportRow], branch: &str, name: &str) -> &'a NamedValue {
        rows.iter()
            .filter(|r| r.branch == branch)
            .flat_map(|r| r.values.iter())
            .find(|v| v.name == name)
            .unwrap_or_else(|| panic!("no value `{name}` on branch `{branch}`"))
    }

    fn row<'a>(rows: &'a [ReportRow], branch: &str, name: &str) -> &'a ReportRow {
        rows.iter()
            .find(|r| r.branch == branch && r.values.iter().any(|v| v.name == name))
            .unwrap_or_else(|| panic!("no row `{branch}`/`{name}`"))
    }

    #[test]
    fn full_protocol_recovers_perfect_correlation() {
        let rows = paris_protocol(&ParisConfig::full(C64::new(2.0, 0.0))).unwrap();
        let corr = value(&rows, "", "corr");
        assert!((corr.value - 1.0).abs() < 1e-10, "corr = {}", corr.value);
        // All probability is accounted for by the surviving leaves.
        let corr_row = row(&rows, "", "corr");
        assert!((corr_row.probability - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unconditioned_field_shows_no_fringe() {
        let rows = paris_protocol(&ParisConfig::full(C64::new(2.0, 0.0))).unwrap();
        let before = value(&rows, "", "after_c1.fringe");
        assert!((before.value - BRANCH_OVERLAP).abs() < 1e-12);
        let still = value(&rows, "", "after_r2.fringe");
        assert!((still.value - BRANCH_OVERLAP).abs() < 1e-12);
    }

    #[test]
    fn marker_detection_produces_opposite_cats() {
        let rows = paris_protocol(&ParisConfig::full(C64::new(2.0, 0.0))).unwrap();
        let p_e = row(&rows, "e", "prob").probability;
        let p_g = row(&rows, "g", "prob").probability;
        assert!((p_e - (1.0 - BRANCH_OVERLAP) / 2.0).abs() < 1e-12);
        assert!((p_g - (1.0 + BRANCH_OVERLAP) / 2.0).abs() < 1e-12);
        assert!((value(&rows, "e", "after_detect.fringe").value + 1.0).abs() < 1e-12);
        assert!((value(&rows, "g", "after_detect.fringe").value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_protocol_prunes_to_matching_leaves() {
        let rows = paris_protocol(&ParisConfig::full(C64::new(2.0, 0.0))).unwrap();
        let leaves: Vec<_> = rows
            .iter()
            .filter(|r| r.outcomes.len() == 2)
            .map(|r| r.branch.clone())
            .collect();
        assert_eq!(leaves, ["e/e", "g/g"]);
    }

    #[test]
    fn stripped_variant_kills_the_correlation() {
        let rows = paris_protocol(&ParisConfig::modified(C64::new(2.0, 0.0))).unwrap();
        let corr = value(&rows, "", "corr");
        assert!(corr.value.abs() < 1e-12, "corr = {}", corr.value);
        // Four leaves survive: the probe outcome says nothing about the
        // marker.
        let leaf_count = rows.iter().filter(|r| r.outcomes.len() == 2).count();
        assert_eq!(leaf_count, 4);
        for (pair, weight) in [
            ("e/e", (1.0 - BRANCH_OVERLAP) / 4.0),
            ("e/g", (1.0 - BRANCH_OVERLAP) / 4.0),
            ("g/e", (1.0 + BRANCH_OVERLAP) / 4.0),
            ("g/g", (1.0 + BRANCH_OVERLAP) / 4.0),
        ] {
            assert!((row(&rows, pair, "prob").probability - weight).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_sees_the_cat_only_in_the_full_protocol() {
        let full = paris_protocol(&ParisConfig::full(C64::new(2.0, 0.0))).unwrap();
        assert!((value(&full, "e", "probe_c.fringe").value + 1.0).abs() < 1e-10);
        assert!((value(&full, "g", "probe_c.fringe").value - 1.0).abs() < 1e-10);

        let stripped = paris_protocol(&ParisConfig::modified(C64::new(2.0, 0.0))).unwrap();
        let fringe = value(&stripped, "", "probe_c.fringe");
        assert!((fringe.value - BRANCH_OVERLAP).abs() < 1e-10);
    }
}

//! Tabular output shared by the built-in scenarios and the script
//! interpreter: one row per (branch, observation point), carrying named
//! scalar values and optional matrix dumps.

use serde::Serialize;

use crate::cavity::fock::FockSpace;
use crate::density::DensityOperator;
use crate::error::Error;
use crate::state::StateVector;
use crate::C64;

/// A named scalar observation.
#[derive(Clone, Debug, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// A dumped operator, row-major with interleaved real/imaginary parts.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixDump {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

/// One observation row. `branch` is the detection outcomes seen so far
/// joined with `/` (empty before any detection); `probability` is the
/// joint probability of that branch.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub branch: String,
    pub outcomes: Vec<String>,
    pub probability: f64,
    pub values: Vec<NamedValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixDump>,
}

/// What to compute at an observation point.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportItem {
    /// Diagonal of the reduced state: `pop[k]`.
    Populations,
    /// One off-diagonal entry: `coh[i,j].re`, `.im`, `.abs`.
    Coherence(usize, usize),
    /// `purity`.
    Purity,
    /// Largest off-diagonal magnitude: `offdiag_max`.
    OffdiagMax,
    /// Full matrix dump named `rho`.
    Matrix,
    /// Even-minus-odd cat population of a single field factor: `fringe`.
    Fringe(C64),
    /// The branch probability itself: `prob`.
    Prob,
}

/// The state a row is computed from, by reference.
#[derive(Clone, Copy)]
pub enum CurrentRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityOperator),
}

impl CurrentRef<'_> {
    /// Density operator of the full state, or of one retained factor.
    pub fn reduced(&self, space: Option<&str>) -> Result<DensityOperator, Error> {
        let rho = match self {
            CurrentRef::Pure(psi) => psi.to_density()?,
            CurrentRef::Mixed(rho) => (*rho).clone(),
        };
        match space {
            Some(name) => rho.partial_trace(&[name]),
            None => Ok(rho),
        }
    }
}

fn prefixed(label: Option<&str>, name: &str) -> String {
    match label {
        Some(l) => format!("{l}.{name}"),
        None => name.to_string(),
    }
}

/// Computes one row. `outcomes` are `(space, outcome)` pairs in detection
/// order; `space` restricts the observation to one factor's reduced state.
pub fn emit_row(
    current: CurrentRef<'_>,
    outcomes: &[(String, String)],
    probability: f64,
    label: Option<&str>,
    space: Option<&str>,
    items: &[ReportItem],
) -> Result<ReportRow, Error> {
    let needs_density = items.iter().any(|i| !matches!(i, ReportItem::Prob));
    let reduced = if needs_density {
        Some(current.reduced(space)?)
    } else {
        None
    };
    let mut values = Vec::new();
    let mut matrices = Vec::new();
    for item in items {
        match item {
            ReportItem::Prob => values.push(NamedValue {
                name: prefixed(label, "prob"),
                value: probability,
            }),
            ReportItem::Populations => {
                let rho = reduced.as_ref().expect("density computed");
                for (k, p) in rho.populations().iter().enumerate() {
                    values.push(NamedValue {
                        name: prefixed(label, &format!("pop[{k}]")),
                        value: *p,
                    });
                }
            }
            ReportItem::Coherence(i, j) => {
                let rho = reduced.as_ref().expect("density computed");
                if *i >= rho.dim() || *j >= rho.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: rho.dim(),
                        got: (*i).max(*j) + 1,
                    });
                }
                let entry = rho.matrix()[(*i, *j)];
                for (suffix, value) in [("re", entry.re), ("im", entry.im), ("abs", entry.norm())] {
                    values.push(NamedValue {
                        name: prefixed(label, &format!("coh[{i},{j}].{suffix}")),
                        value,
                    });
                }
            }
            ReportItem::Purity => values.push(NamedValue {
                name: prefixed(label, "purity"),
                value: reduced.as_ref().expect("density computed").purity(),
            }),
            ReportItem::OffdiagMax => values.push(NamedValue {
                name: prefixed(label, "offdiag_max"),
                value: reduced
                    .as_ref()
                    .expect("density computed")
                    .max_offdiagonal(),
            }),
            ReportItem::Matrix => {
                let rho = reduced.as_ref().expect("density computed");
                let mut data = Vec::with_capacity(2 * rho.dim() * rho.dim());
                for r in 0..rho.dim() {
                    for c in 0..rho.dim() {
                        data.push(rho.matrix()[(r, c)].re);
                        data.push(rho.matrix()[(r, c)].im);
                    }
                }
                matrices.push(MatrixDump {
                    name: prefixed(label, "rho"),
                    rows: rho.dim(),
                    cols: rho.dim(),
                    data,
                });
            }
            ReportItem::Fringe(alpha) => {
                let rho = reduced.as_ref().expect("density computed");
                if rho.factors().len() != 1 {
                    return Err(Error::Unsupported(
                        "fringe needs a single-factor reduced state".to_string(),
                    ));
                }
                let factor = &rho.factors()[0];
                let fock = FockSpace::new(factor.name(), factor.dim() - 1)?;
                values.push(NamedValue {
                    name: prefixed(label, "fringe"),
                    value: fock.cat_fringe_signal(rho, *alpha)?,
                });
            }
        }
    }
    Ok(ReportRow {
        branch: outcomes
            .iter()
            .map(|(_, o)| o.as_str())
            .collect::<Vec<_>>()
            .join("/"),
        outcomes: outcomes.iter().map(|(_, o)| o.clone()).collect(),
        probability,
        values,
        matrices,
    })
}

/// Outcome agreement between two detected spaces, averaged over leaves:
/// `sum p * (+1 if equal, -1 if not) / sum p`. Returns the correlation and
/// the total probability covered by the leaves.
pub fn correlation(
    leaves: &[(Vec<(String, String)>, f64)],
    space_a: &str,
    space_b: &str,
) -> Result<(f64, f64), Error> {
    let mut signed = 0.0;
    let mut total = 0.0;
    for (outcomes, probability) in leaves {
        let find = |space: &str| {
            outcomes
                .iter()
                .find(|(s, _)| s == space)
                .map(|(_, o)| o.as_str())
                .ok_or_else(|| Error::Unsupported(format!("no recorded outcome for `{space}`")))
        };
        let a = find(space_a)?;
        let b = find(space_b)?;
        signed += if a == b { *probability } else { -probability };
        total += probability;
    }
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((signed / total, total))
}

/// Largest absolute difference between two row lists, or a description of
/// the first structural mismatch. Used to check that a built-in scenario
/// and its script twin produce identical output.
pub fn rows_max_diff(a: &[ReportRow], b: &[ReportRow]) -> Result<f64, String> {
    if a.len() != b.len() {
        return Err(format!("row count {} vs {}", a.len(), b.len()));
    }
    let mut max = 0.0f64;
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        if ra.branch != rb.branch {
            return Err(format!(
                "row {i}: branch `{}` vs `{}`",
                ra.branch, rb.branch
            ));
        }
        max = max.max((ra.probability - rb.probability).abs());
        if ra.values.len() != rb.values.len() {
            return Err(format!(
                "row {i}: {} values vs {}",
                ra.values.len(),
                rb.values.len()
            ));
        }
        for (va, vb) in ra.values.iter().zip(&rb.values) {
            if va.name != vb.name {
                return Err(format!("row {i}: value `{}` vs `{}`", va.name, vb.name));
            }
            max = max.max((va.value - vb.value).abs());
        }
        if ra.matrices.len() != rb.matrices.len() {
            return Err(format!(
                "row {i}: {} matrices vs {}",
                ra.matrices.len(),
                rb.matrices.len()
            ));
        }
        for (ma, mb) in ra.matrices.iter().zip(&rb.matrices) {
            if ma.name != mb.name || ma.rows != mb.rows || ma.cols != mb.cols {
                return Err(format!("row {i}: matrix shape/name mismatch"));
            }
            for (xa, xb) in ma.data.iter().zip(&mb.data) {
                max = max.max((xa - xb).abs());
            }
        }
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::atom::AtomSpace;
    use crate::cavity::fock::FockSpace;

    #[test]
    fn row_carries_prefixed_values_in_item_order() {
        let atom = AtomSpace::two_level("p").unwrap();
        let psi = atom
            .basis_state("e")
            .unwrap()
            .apply_unitary(&atom.ramsey_pulse(), &["p"])
            .unwrap();
        let row = emit_row(
            CurrentRef::Pure(&psi),
            &[],
            1.0,
            Some("stage"),
            None,
            &[
                ReportItem::Populations,
                ReportItem::Purity,
                ReportItem::Prob,
            ],
        )
        .unwrap();
        let names: Vec<_> = row.values.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(
            names,
            ["stage.pop[0]", "stage.pop[1]", "stage.purity", "stage.prob"]
        );
        assert!((row.values[0].value - 0.5).abs() < 1e-14);
        assert!((row.values[2].value - 1.0).abs() < 1e-12);
        assert_eq!(row.branch, "");
    }

    #[test]
    fn space_reduction_and_fringe() {
        let alpha = C64::new(2.0, 0.0);
        let atom = AtomSpace::two_level("p").unwrap();
        let field = FockSpace::for_amplitude("f", alpha).unwrap();
        let (even, _) = field.cat_pair(alpha).unwrap();
        let psi = atom.basis_state("g").unwrap().tensor(&even).unwrap();
        let row = emit_row(
            CurrentRef::Pure(&psi),
            &[("p".to_string(), "g".to_string())],
            0.25,
            None,
            Some("f"),
            &[ReportItem::Fringe(alpha)],
        )
        .unwrap();
        assert_eq!(row.branch, "g");
        assert_eq!(row.values[0].name, "fringe");
        assert!((row.values[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_dump_is_row_major_interleaved() {
        let atom = AtomSpace::two_level("p").unwrap();
        let psi = atom.basis_state("g").unwrap();
        let row = emit_row(
            CurrentRef::Pure(&psi),
            &[],
            1.0,
            None,
            None,
            &[ReportItem::Matrix],
        )
        .unwrap();
        let dump = &row.matrices[0];
        assert_eq!(dump.name, "rho");
        assert_eq!((dump.rows, dump.cols), (2, 2));
        assert_eq!(dump.data, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn correlation_weighs_agreement_by_probability() {
        let leaf = |o1: &str, o2: &str, p: f64| {
            (
                vec![
                    ("a".to_string(), o1.to_string()),
                    ("b".to_string(), o2.to_string()),
                ],
                p,
            )
        };
        let leaves = vec![
            leaf("e", "e", 0.4),
            leaf("g", "g", 0.4),
            leaf("e", "g", 0.2),
        ];
        let (corr, total) = correlation(&leaves, "a", "b").unwrap();
        assert!((corr - 0.6).abs() < 1e-15);
        assert!((total - 1.0).abs() < 1e-15);

        let missing = vec![(vec![("a".to_string(), "e".to_string())], 1.0)];
        assert!(correlation(&missing, "a", "b").is_err());
    }

    #[test]
    fn rows_diff_detects_structure_and_value_changes() {
        let row = ReportRow {
            branch: "e".to_string(),
            outcomes: vec!["e".to_string()],
            probability: 0.5,
            values: vec![NamedValue {
                name: "prob".to_string(),
                value: 0.5,
            }],
            matrices: vec![],
        };
        let mut shifted = row.clone();
        shifted.values[0].value = 0.5 + 1e-9;
        let d = rows_max_diff(std::slice::from_ref(&row), &[shifted]).unwrap();
        assert!(d > 0.9e-9 && d < 1.1e-9, "d = {d}");

        let mut renamed = row.clone();
        renamed.values[0].name = "p".to_string();
        assert!(rows_max_diff(&[row], &[renamed]).is_err());
    }
}

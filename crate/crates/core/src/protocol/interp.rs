//! Executes parsed protocol scripts.
//!
//! The machine holds a list of branches, each a (possibly mixed) state
//! with the detection outcomes recorded so far and their joint
//! probability. Evolution instructions apply to every branch, `DETECT`
//! forks them (or samples a single outcome when a seed is given), and
//! `REPORT` emits one output row per branch at that point — so a report
//! after a detection produces one row per outcome, grouped by
//! instruction, not by branch.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cat::{decay_amplitudes, DecayParams};
use crate::cavity::atom::AtomSpace;
use crate::cavity::fock::FockSpace;
use crate::density::DensityOperator;
use crate::error::Error;
use crate::protocol::parse::{InitSpec, InitValue, Instruction, Protocol, ReportSpec, SpaceKind};
use crate::report::{correlation, emit_row, CurrentRef, NamedValue, ReportItem, ReportRow};
use crate::space::SpaceLabel;
use crate::state::StateVector;
use crate::{tol, C64};

/// Execution options.
#[derive(Clone, Debug, Default)]
pub struct InterpretOptions {
    /// When set, `DETECT` draws a single outcome per branch (seeded, so
    /// runs are reproducible) instead of enumerating every branch.
    pub sample_seed: Option<u64>,
}

/// A runtime failure, tagged with the 1-based line of the instruction
/// that raised it.
#[derive(Debug)]
pub struct ScriptError {
    pub line: usize,
    pub error: Error,
}

impl std::fmt::Display for ScriptError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

impl std::error::Error for ScriptError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Runs a parsed protocol and returns its report rows.
pub fn interpret(
    protocol: &Protocol,
    options: &InterpretOptions,
) -> Result<Vec<ReportRow>, ScriptError> {
    let mut machine = Machine {
        spaces: Vec::new(),
        branches: Vec::new(),
        rng: options.sample_seed.map(ChaCha8Rng::seed_from_u64),
        rows: Vec::new(),
    };
    for instruction in &protocol.instructions {
        machine
            .step(&instruction.node)
            .map_err(|error| ScriptError {
                line: instruction.line,
                error,
            })?;
    }
    Ok(machine.rows)
}

enum Declared {
    Atom(AtomSpace),
    Fock(FockSpace),
    Plain(SpaceLabel),
}

impl Declared {
    fn name(&self) -> &str {
        match self {
            Declared::Atom(a) => a.name(),
            Declared::Fock(f) => f.name(),
            Declared::Plain(l) => l.name(),
        }
    }

    fn label(&self) -> SpaceLabel {
        match self {
            Declared::Atom(a) => a.label().clone(),
            Declared::Fock(f) => f.label().clone(),
            Declared::Plain(l) => l.clone(),
        }
    }
}

enum Current {
    Pure(StateVector),
    Mixed(DensityOperator),
}

struct Branch {
    current: Current,
    probability: f64,
    outcomes: Vec<(String, String)>,
}

struct Machine {
    spaces: Vec<Declared>,
    branches: Vec<Branch>,
    rng: Option<ChaCha8Rng>,
    rows: Vec<ReportRow>,
}

impl Machine {
    fn initialized(&self) -> bool {
        !self.branches.is_empty()
    }

    fn require_init(&self) -> Result<(), Error> {
        if self.initialized() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "no state yet: INIT must come first".to_string(),
            ))
        }
    }

    fn find(&self, name: &str) -> Result<&Declared, Error> {
        self.spaces
            .iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    fn atom(&self, name: &str) -> Result<&AtomSpace, Error> {
        match self.find(name)? {
            Declared::Atom(atom) => Ok(atom),
            _ => Err(Error::Unsupported(format!(
                "space `{name}` has no named levels"
            ))),
        }
    }

    fn fock(&self, name: &str) -> Result<&FockSpace, Error> {
        match self.find(name)? {
            Declared::Fock(fock) => Ok(fock),
            _ => Err(Error::Unsupported(format!(
                "space `{name}` is not a photon-number space"
            ))),
        }
    }

    /// Resolves an optional atom argument; when omitted there must be
    /// exactly one level space declared.
    fn infer_atom(&self, given: Option<&String>) -> Result<&AtomSpace, Error> {
        match given {
            Some(name) => self.atom(name),
            None => {
                let candidates: Vec<&AtomSpace> = self
                    .spaces
                    .iter()
                    .filter_map(|d| match d {
                        Declared::Atom(a) => Some(a),
                        _ => None,
                    })
                    .collect();
                match candidates.as_slice() {
                    [one] => Ok(one),
                    _ => Err(Error::Unsupported(format!(
                        "atom= is required here ({} level spaces are declared)",
                        candidates.len()
                    ))),
                }
            }
        }
    }

    /// Resolves an optional field argument; when omitted there must be
    /// exactly one photon-number space declared.
    fn infer_fock(&self, given: Option<&String>) -> Result<&FockSpace, Error> {
        match given {
            Some(name) => self.fock(name),
            None => {
                let candidates: Vec<&FockSpace> = self
                    .spaces
                    .iter()
                    .filter_map(|d| match d {
                        Declared::Fock(f) => Some(f),
                        _ => None,
                    })
                    .collect();
                match candidates.as_slice() {
                    [one] => Ok(one),
                    _ => Err(Error::AmbiguousFockFactor(candidates.len())),
                }
            }
        }
    }

    /// Applies a pure-state map to every branch.
    fn for_each_pure<F>(&mut self, opcode: &str, f: F) -> Result<(), Error>
    where
        F: Fn(&StateVector) -> Result<StateVector, Error>,
    {
        self.require_init()?;
        for branch in &mut self.branches {
            match &mut branch.current {
                Current::Pure(psi) => *psi = f(psi)?,
                Current::Mixed(_) => {
                    return Err(Error::Unsupported(format!(
                        "`{opcode}` needs a pure state, but TRACE has made it mixed"
                    )))
                }
            }
        }
        Ok(())
    }

    fn step(&mut self, instruction: &Instruction) -> Result<(), Error> {
        match instruction {
            Instruction::Space { name, kind } => self.declare(name, kind),
            Instruction::Init(spec) => self.init(spec),
            Instruction::Pulse { atom, area } => {
                let (u, name) = {
                    let atom = self.atom(atom)?;
                    (atom.pulse(*area), atom.name().to_string())
                };
                self.for_each_pure("PULSE", |psi| psi.apply_unitary(&u, &[&name]))
            }
            Instruction::Disperse {
                atom,
                field,
                phases,
            } => {
                let (u, atom_name, field_name) = {
                    let atom = self.infer_atom(atom.as_ref())?;
                    let fock = self.infer_fock(field.as_ref())?;
                    let mut shifts = vec![0.0; atom.dim()];
                    for (level, phase) in phases {
                        shifts[atom.level_index(level)?] = *phase;
                    }
                    (
                        atom.dispersive_shift(&shifts, fock.dim())?,
                        atom.name().to_string(),
                        fock.name().to_string(),
                    )
                };
                self.for_each_pure("DISPERSE", |psi| {
                    psi.apply_unitary(&u, &[&atom_name, &field_name])
                })
            }
            Instruction::Jc {
                atom,
                field,
                coupling,
                time,
            } => {
                if !time.is_finite() || *time < 0.0 {
                    return Err(Error::BadTime(*time));
                }
                let (atom, field_name) = {
                    let a = self.infer_atom(atom.as_ref())?.clone();
                    let f = self.infer_fock(field.as_ref())?;
                    (a, f.name().to_string())
                };
                let angle = coupling * time;
                self.for_each_pure("JC", |psi| atom.jc_evolve(psi, &field_name, angle))
            }
            Instruction::Erase { atom } => {
                let atom = self.atom(atom)?.clone();
                self.for_each_pure("ERASE", |psi| {
                    atom.erase_which_path(psi).map(|(state, _weight)| state)
                })
            }
            Instruction::Detect { atom } => self.detect(atom),
            Instruction::Decay { rate, time } => {
                let params = DecayParams::new(*rate, *time)?;
                let (survive, decay) = decay_amplitudes(&params);
                self.for_each_pure("DECAY", |psi| {
                    if psi.factors().len() != 2 || psi.factors().iter().any(|f| f.dim() != 2) {
                        return Err(Error::Unsupported(
                            "DECAY needs exactly two two-dimensional spaces".to_string(),
                        ));
                    }
                    if (psi.amplitudes()[0] - C64::new(1.0, 0.0)).norm() > 1e-9 {
                        return Err(Error::Unsupported(
                            "DECAY starts from the joint ground state |0,0>".to_string(),
                        ));
                    }
                    let mut amplitudes = DVector::from_element(4, C64::default());
                    amplitudes[0] = C64::new(survive, 0.0);
                    amplitudes[3] = C64::new(decay, 0.0);
                    StateVector::new(psi.factors().to_vec(), amplitudes)
                })
            }
            Instruction::Trace { keep } => {
                self.require_init()?;
                let names: Vec<&str> = keep.iter().map(|s| s.as_str()).collect();
                for branch in &mut self.branches {
                    let reduced = match &branch.current {
                        Current::Pure(psi) => psi.to_density()?.partial_trace(&names)?,
                        Current::Mixed(rho) => rho.partial_trace(&names)?,
                    };
                    branch.current = Current::Mixed(reduced);
                }
                Ok(())
            }
            Instruction::Report {
                label,
                space,
                items,
            } => self.report(label.as_deref(), space.as_deref(), items),
        }
    }

    fn declare(&mut self, name: &str, kind: &SpaceKind) -> Result<(), Error> {
        if self.initialized() {
            return Err(Error::Unsupported(
                "SPACE must come before INIT".to_string(),
            ));
        }
        if self.spaces.iter().any(|d| d.name() == name) {
            return Err(Error::DuplicateLabel(name.to_string()));
        }
        let declared = match kind {
            SpaceKind::Levels(levels) => {
                let refs: Vec<&str> = levels.iter().map(|s| s.as_str()).collect();
                Declared::Atom(AtomSpace::with_levels(name, &refs)?)
            }
            SpaceKind::Fock(cutoff) => Declared::Fock(FockSpace::new(name, *cutoff)?),
            SpaceKind::Dim(dim) => Declared::Plain(SpaceLabel::new(name, *dim)?),
        };
        self.spaces.push(declared);
        Ok(())
    }

    fn init(&mut self, spec: &InitSpec) -> Result<(), Error> {
        if self.initialized() {
            return Err(Error::Unsupported(
                "the state is already initialized".to_string(),
            ));
        }
        if self.spaces.is_empty() {
            return Err(Error::Unsupported(
                "INIT needs at least one SPACE declaration".to_string(),
            ));
        }
        let psi = match spec {
            InitSpec::Product(pairs) => {
                for (i, (name, _)) in pairs.iter().enumerate() {
                    self.find(name)?;
                    if pairs[..i].iter().any(|(other, _)| other == name) {
                        return Err(Error::DuplicateLabel(name.clone()));
                    }
                }
                let mut joint: Option<StateVector> = None;
                for declared in &self.spaces {
                    let value = pairs
                        .iter()
                        .find(|(name, _)| name == declared.name())
                        .map(|(_, value)| value)
                        .ok_or_else(|| {
                            Error::Unsupported(format!("INIT must set space `{}`", declared.name()))
                        })?;
                    let single = self.single_state(declared, value)?;
                    joint = Some(match joint {
                        Some(so_far) => so_far.tensor(&single)?,
                        None => single,
                    });
                }
                joint.expect("at least one space")
            }
            InitSpec::Joint { spaces, amplitudes } => {
                let declared: Vec<&str> = self.spaces.iter().map(|d| d.name()).collect();
                if spaces != &declared {
                    return Err(Error::Unsupported(format!(
                        "spaces= must list every declared space in declaration order ({})",
                        declared.join(",")
                    )));
                }
                let labels: Vec<SpaceLabel> = self.spaces.iter().map(|d| d.label()).collect();
                StateVector::new(labels, DVector::from_vec(amplitudes.clone()))?.normalized()?
            }
        };
        self.branches.push(Branch {
            current: Current::Pure(psi),
            probability: 1.0,
            outcomes: Vec::new(),
        });
        Ok(())
    }

    fn single_state(&self, declared: &Declared, value: &InitValue) -> Result<StateVector, Error> {
        match (declared, value) {
            (Declared::Atom(atom), InitValue::Named(level)) => atom.basis_state(level),
            (Declared::Atom(atom), InitValue::Index(index)) => {
                if *index < atom.dim() {
                    StateVector::basis_state(vec![atom.label().clone()], &[*index])
                } else {
                    Err(Error::DimensionMismatch {
                        expected: atom.dim(),
                        got: *index,
                    })
                }
            }
            (Declared::Atom(_), InitValue::Coherent(_)) => Err(Error::Unsupported(
                "coherent amplitudes need a photon-number space".to_string(),
            )),
            (Declared::Fock(fock), InitValue::Named(name)) if name == "vac" => Ok(fock.vacuum()),
            (Declared::Fock(fock), InitValue::Named(name)) => Err(Error::Unsupported(format!(
                "unknown state `{name}` for photon-number space `{}` (use vac, an integer, or coherent:RE+IMi)",
                fock.name()
            ))),
            (Declared::Fock(fock), InitValue::Index(n)) => fock.fock_state(*n),
            (Declared::Fock(fock), InitValue::Coherent(alpha)) => fock.coherent_state(*alpha),
            (Declared::Plain(label), InitValue::Index(index)) => {
                if *index < label.dim() {
                    StateVector::basis_state(vec![label.clone()], &[*index])
                } else {
                    Err(Error::DimensionMismatch {
                        expected: label.dim(),
                        got: *index,
                    })
                }
            }
            (Declared::Plain(label), _) => Err(Error::Unsupported(format!(
                "space `{}` takes a basis index",
                label.name()
            ))),
        }
    }

    fn detect(&mut self, atom: &str) -> Result<(), Error> {
        self.require_init()?;
        let atom = self.atom(atom)?.clone();
        let mut rng = self.rng.take();
        let mut next = Vec::new();
        for branch in &self.branches {
            let psi = match &branch.current {
                Current::Pure(psi) => psi,
                Current::Mixed(_) => {
                    return Err(Error::Unsupported(
                        "`DETECT` needs a pure state, but TRACE has made it mixed".to_string(),
                    ))
                }
            };
            let records = atom.detect(psi)?;
            if let Some(rng) = rng.as_mut() {
                let u: f64 = rng.gen();
                let mut chosen = None;
                let mut acc = 0.0;
                for record in records {
                    if record.post_state.is_none() {
                        continue;
                    }
                    acc += record.probability;
                    chosen = Some(record);
                    if u < acc {
                        break;
                    }
                }
                let record = chosen.ok_or(Error::ZeroNorm)?;
                let mut outcomes = branch.outcomes.clone();
                outcomes.push((atom.name().to_string(), record.outcome));
                next.push(Branch {
                    current: Current::Pure(record.post_state.expect("filtered")),
                    probability: branch.probability * record.probability,
                    outcomes,
                });
            } else {
                for record in records {
                    let joint = branch.probability * record.probability;
                    if joint <= tol::BRANCH_PRUNE {
                        continue;
                    }
                    let Some(post) = record.post_state else {
                        continue;
                    };
                    let mut outcomes = branch.outcomes.clone();
                    outcomes.push((atom.name().to_string(), record.outcome));
                    next.push(Branch {
                        current: Current::Pure(post),
                        probability: joint,
                        outcomes,
                    });
                }
            }
        }
        if next.is_empty() {
            return Err(Error::ZeroNorm);
        }
        self.rng = rng;
        self.branches = next;
        Ok(())
    }

    fn report(
        &mut self,
        label: Option<&str>,
        space: Option<&str>,
        items: &[ReportSpec],
    ) -> Result<(), Error> {
        self.require_init()?;
        if let [ReportSpec::Corr(a, b)] = items {
            let leaves: Vec<(Vec<(String, String)>, f64)> = self
                .branches
                .iter()
                .map(|branch| (branch.outcomes.clone(), branch.probability))
                .collect();
            let (corr, total) = correlation(&leaves, a, b)?;
            let name = match label {
                Some(prefix) => format!("{prefix}.corr"),
                None => "corr".to_string(),
            };
            self.rows.push(ReportRow {
                branch: String::new(),
                outcomes: Vec::new(),
                probability: total,
                values: vec![NamedValue { name, value: corr }],
                matrices: Vec::new(),
            });
            return Ok(());
        }
        let items: Vec<ReportItem> = items.iter().map(spec_to_item).collect::<Result<_, _>>()?;
        for branch in &self.branches {
            let current = match &branch.current {
                Current::Pure(psi) => CurrentRef::Pure(psi),
                Current::Mixed(rho) => CurrentRef::Mixed(rho),
            };
            self.rows.push(emit_row(
                current,
                &branch.outcomes,
                branch.probability,
                label,
                space,
                &items,
            )?);
        }
        Ok(())
    }
}

fn spec_to_item(spec: &ReportSpec) -> Result<ReportItem, Error> {
    Ok(match spec {
        ReportSpec::Pops => ReportItem::Populations,
        ReportSpec::Purity => ReportItem::Purity,
        ReportSpec::Offdiag => ReportItem::OffdiagMax,
        ReportSpec::Matrix => ReportItem::Matrix,
        ReportSpec::Prob => ReportItem::Prob,
        ReportSpec::Coherence(i, j) => ReportItem::Coherence(*i, *j),
        ReportSpec::Fringe(alpha) => ReportItem::Fringe(*alpha),
        ReportSpec::Corr(..) => {
            return Err(Error::Unsupported(
                "corr must be the only report item".to_string(),
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::parse::parse;

    fn run(source: &str) -> Vec<ReportRow> {
        let (protocol, diagnostics) = parse(source);
        assert!(diagnostics.is_empty(), "parse: {diagnostics:?}");
        interpret(&protocol, &InterpretOptions::default()).unwrap()
    }

    fn run_err(source: &str) -> ScriptError {
        let (protocol, diagnostics) = parse(source);
        assert!(diagnostics.is_empty(), "parse: {diagnostics:?}");
        interpret(&protocol, &InterpretOptions::default()).unwrap_err()
    }

    fn value(rows: &[ReportRow], branch: &str, name: &str) -> f64 {
        rows.iter()
            .filter(|r| r.branch == branch)
            .flat_map(|r| r.values.iter())
            .find(|v| v.name == name)
            .unwrap_or_else(|| panic!("no value `{name}` on branch `{branch}`"))
            .value
    }

    #[test]
    fn exchange_then_erase_restores_field_coherence() {
        let rows = run("VERSION 1\n\
             SPACE atom levels=e,g,a\n\
             SPACE field fock=12\n\
             INIT atom=e field=vac\n\
             JC g=1 t=0.7853981633974483\n\
             ERASE atom\n\
             DETECT atom\n\
             TRACE keep=field\n\
             REPORT coherence=0,1\n");
        // One branch (`a`) with probability 1; the field coherence has
        // magnitude cos * sin = 1/2 at the quarter cycle.
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].branch, "a");
        assert!((rows[0].probability - 1.0).abs() < 1e-12);
        assert!((value(&rows, "a", "coh[0,1].abs") - 0.5).abs() < 1e-12);
        assert!(value(&rows, "a", "coh[0,1].re").abs() < 1e-12);
        assert!((value(&rows, "a", "coh[0,1].im") + 0.5).abs() < 1e-12);
    }

    #[test]
    fn detect_forks_branches_and_report_groups_by_instruction() {
        let rows = run("SPACE a levels=e,g\n\
             SPACE f fock=1\n\
             INIT a=e f=vac\n\
             JC g=1 t=0.7853981633974483\n\
             DETECT a\n\
             REPORT prob\n\
             REPORT label=post space=f pops\n");
        assert_eq!(rows.len(), 4);
        // First instruction's rows for both branches, then the second's.
        assert_eq!(rows[0].branch, "e");
        assert_eq!(rows[1].branch, "g");
        assert_eq!(rows[2].branch, "e");
        assert_eq!(rows[3].branch, "g");
        assert!((rows[0].probability - 0.5).abs() < 1e-12);
        assert!((value(&rows, "e", "post.pop[0]") - 1.0).abs() < 1e-12);
        assert!((value(&rows, "g", "post.pop[1]") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_init_is_normalized_and_order_checked() {
        let rows = run("SPACE s dim=2\n\
             SPACE t dim=2\n\
             INIT spaces=s,t amps=1+0i,0,0,1+0i\n\
             REPORT space=t pops\n");
        assert!((value(&rows, "", "pop[0]") - 0.5).abs() < 1e-12);
        let err = run_err(
            "SPACE s dim=2\n\
             SPACE t dim=2\n\
             INIT spaces=t,s amps=1+0i,0,0,1+0i\n",
        );
        assert_eq!(err.line, 3);
        assert!(err.to_string().contains("declaration order"));
    }

    #[test]
    fn decay_matches_the_halflife_populations() {
        let rows = run("SPACE nucleus dim=2\n\
             SPACE cat dim=2\n\
             INIT nucleus=0 cat=0\n\
             DECAY lambda=0.0001925408834888737 t=3600\n\
             REPORT label=cat space=cat pops offdiag\n");
        assert!((value(&rows, "", "cat.pop[0]") - 0.5).abs() < 1e-12);
        assert!((value(&rows, "", "cat.pop[1]") - 0.5).abs() < 1e-12);
        assert_eq!(value(&rows, "", "cat.offdiag_max"), 0.0);
    }

    #[test]
    fn runtime_errors_carry_the_line_number() {
        let err = run_err("SPACE a levels=e,g\nINIT a=e\nPULSE b area=1\n");
        assert_eq!(err.line, 3);
        assert!(matches!(err.error, Error::UnknownLabel(_)));

        let err = run_err("SPACE a levels=e,g\nPULSE a area=1\n");
        assert_eq!(err.line, 2);
        assert!(err.to_string().contains("INIT"));

        let err = run_err("SPACE a levels=e,g\nINIT a=e\nINIT a=g\n");
        assert_eq!(err.line, 3);
        assert!(err.to_string().contains("already initialized"));

        let err = run_err(
            "SPACE a levels=e,g\nSPACE f fock=1\nINIT a=e f=vac\nTRACE keep=f\nJC g=1 t=1\n",
        );
        assert_eq!(err.line, 5);
        assert!(err.to_string().contains("mixed"));
    }

    #[test]
    fn inference_needs_a_unique_candidate() {
        let err = run_err(
            "SPACE a levels=e,g\n\
             SPACE b levels=e,g\n\
             SPACE f fock=1\n\
             INIT a=e b=e f=vac\n\
             JC g=1 t=1\n",
        );
        assert_eq!(err.line, 5);
        assert!(err.to_string().contains("atom="));

        let err = run_err(
            "SPACE a levels=e,g\n\
             SPACE f fock=1\n\
             SPACE h fock=1\n\
             INIT a=e f=vac h=vac\n\
             JC atom=a g=1 t=1\n",
        );
        assert_eq!(err.line, 5);
        assert!(matches!(err.error, Error::AmbiguousFockFactor(2)));
    }

    #[test]
    fn sampled_detection_follows_one_trajectory() {
        let source = "SPACE a levels=e,g\n\
                      SPACE f fock=1\n\
                      INIT a=e f=vac\n\
                      JC g=1 t=0.7853981633974483\n\
                      DETECT a\n\
                      REPORT prob\n";
        let (protocol, _) = parse(source);
        let options = InterpretOptions {
            sample_seed: Some(11),
        };
        let rows = interpret(&protocol, &options).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].probability - 0.5).abs() < 1e-12);
        // Same seed, same trajectory.
        let again = interpret(&protocol, &options).unwrap();
        assert_eq!(rows[0].branch, again[0].branch);
        // Different seeds eventually take the other branch.
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..32u64 {
            let rows = interpret(
                &protocol,
                &InterpretOptions {
                    sample_seed: Some(seed),
                },
            )
            .unwrap();
            seen.insert(rows[0].branch.clone());
        }
        assert_eq!(seen.len(), 2, "both outcomes should appear: {seen:?}");
    }

    #[test]
    fn corr_reports_outcome_agreement() {
        // Two detections of perfectly correlated qubits.
        let rows = run("SPACE s levels=u,d\n\
             SPACE t levels=u,d\n\
             INIT spaces=s,t amps=0.7071067811865476+0i,0,0,0.7071067811865476+0i\n\
             DETECT s\n\
             DETECT t\n\
             REPORT corr=s,t\n");
        let last = rows.last().unwrap();
        assert_eq!(last.branch, "");
        assert!((last.values[0].value - 1.0).abs() < 1e-12);
        assert!((last.probability - 1.0).abs() < 1e-12);

        let err = run_err(
            "SPACE s levels=u,d\n\
             SPACE t levels=u,d\n\
             INIT s=u t=u\n\
             DETECT s\n\
             REPORT corr=s,t\n",
        );
        assert_eq!(err.line, 5);
        assert!(err.to_string().contains("no recorded outcome"));
    }
}

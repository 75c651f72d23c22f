//! Built-in experiments, each available two ways: a native run over the
//! core operators and a generated protocol script that the interpreter
//! executes to the same report rows. The twin scripts double as living
//! documentation of the script language and as a cross-check that the
//! interpreter and the native code paths agree.

use std::collections::BTreeMap;

use crate::cat::{self, DecayParams};
use crate::cavity::fock::default_cutoff;
use crate::cavity::garching::{garching_protocol, GarchingConfig};
use crate::cavity::paris::{paris_protocol, ParisConfig};
use crate::error::Error;
use crate::measurement::{Completion, PointerChain};
use crate::protocol::parse::{format_complex, parse};
use crate::protocol::{interpret, InterpretOptions};
use crate::report::{emit_row, CurrentRef, ReportItem, ReportRow};
use crate::C64;

/// Parameters of one built-in experiment.
#[derive(Clone, Debug)]
pub enum ScenarioConfig {
    /// Exponential decay entangling an emitter with a two-state target.
    Decay(DecayParams),
    /// Dispersive which-path protocol with a marker and a probe atom.
    Paris(ParisConfig),
    /// Resonant photon exchange with optional which-path erasure.
    Garching(GarchingConfig),
    /// Pointer-chain premeasurement with the given system coefficients.
    Pointer { coefficients: Vec<C64> },
}

/// A named built-in experiment with its current parameters.
#[derive(Clone, Debug)]
pub struct Scenario {
    name: &'static str,
    pub config: ScenarioConfig,
}

const NAMES: [&str; 6] = [
    "cat",
    "paris",
    "paris-modified",
    "garching",
    "garching-noerase",
    "vonneumann",
];

impl Scenario {
    /// Names of every built-in, in listing order.
    pub fn names() -> &'static [&'static str] {
        &NAMES
    }

    /// Looks a built-in up by name.
    pub fn builtin(name: &str) -> Option<Scenario> {
        let config = match name {
            "cat" => ScenarioConfig::Decay(
                DecayParams::hour_half_life(3600.0).expect("static parameters"),
            ),
            "paris" => ScenarioConfig::Paris(ParisConfig::full(C64::new(2.0, 0.0))),
            "paris-modified" => ScenarioConfig::Paris(ParisConfig::modified(C64::new(2.0, 0.0))),
            "garching" => ScenarioConfig::Garching(GarchingConfig::erased()),
            "garching-noerase" => ScenarioConfig::Garching(GarchingConfig::unerased()),
            "vonneumann" => ScenarioConfig::Pointer {
                coefficients: vec![
                    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ],
            },
            _ => return None,
        };
        let name = NAMES.iter().find(|n| **n == name).expect("matched above");
        Some(Scenario { name, config })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// One-line summary for listings.
    pub fn description(&self) -> &'static str {
        match self.name {
            "cat" => {
                "exponential decay entangles an emitter with a target; the reduced \
                 target is a classical mixture with no off-diagonals"
            }
            "paris" => {
                "dispersive which-path protocol with erasure: a second balanced pulse \
                 wipes the marker's record, so marker and probe outcomes correlate"
            }
            "paris-modified" => {
                "dispersive which-path protocol without erasure: the marker keeps its \
                 record past the probe and the outcome correlation vanishes"
            }
            "garching" => {
                "resonant photon exchange writes a which-path record; merging the \
                 atomic levels erases it and the field coherence returns"
            }
            "garching-noerase" => {
                "resonant photon exchange with the record kept: detecting the atom \
                 projects the field onto a photon-number state"
            }
            "vonneumann" => {
                "pointer-chain premeasurement correlates a system with a multi-reading \
                 apparatus; both reduced states are diagonal mixtures"
            }
            _ => unreachable!("constructor restricts the name"),
        }
    }

    /// Current parameters as sorted key/value text, for run manifests.
    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        match &self.config {
            ScenarioConfig::Decay(params) => {
                map.insert("lambda".to_string(), params.lambda.to_string());
                map.insert("t".to_string(), params.t.to_string());
            }
            ScenarioConfig::Paris(config) => {
                map.insert("alpha".to_string(), format_complex(config.alpha));
                map.insert("fock_cutoff".to_string(), config.cutoff.to_string());
                map.insert(
                    "second_pulse".to_string(),
                    config.with_second_pulse.to_string(),
                );
                map.insert(
                    "marker_detection".to_string(),
                    config.with_marker_detection.to_string(),
                );
            }
            ScenarioConfig::Garching(config) => {
                map.insert("g".to_string(), config.coupling.to_string());
                map.insert("t".to_string(), config.duration.to_string());
                map.insert("fock_cutoff".to_string(), config.cutoff.to_string());
                map.insert("erasure".to_string(), config.with_erasure.to_string());
            }
            ScenarioConfig::Pointer { coefficients } => {
                let rendered: Vec<String> =
                    coefficients.iter().copied().map(format_complex).collect();
                map.insert("coeffs".to_string(), rendered.join(","));
                map.insert("dim".to_string(), coefficients.len().to_string());
            }
        }
        map
    }

    /// Runs the native implementation.
    pub fn run(&self) -> Result<Vec<ReportRow>, Error> {
        match &self.config {
            ScenarioConfig::Decay(params) => run_decay(params),
            ScenarioConfig::Paris(config) => paris_protocol(config),
            ScenarioConfig::Garching(config) => garching_protocol(config),
            ScenarioConfig::Pointer { coefficients } => run_pointer(coefficients),
        }
    }

    /// The protocol-script twin of this scenario. Interpreting it yields
    /// the same rows as [`Scenario::run`].
    pub fn script(&self) -> String {
        match &self.config {
            ScenarioConfig::Decay(params) => decay_script(self.name, params),
            ScenarioConfig::Paris(config) => paris_script(self.name, config),
            ScenarioConfig::Garching(config) => garching_script(self.name, config),
            ScenarioConfig::Pointer { coefficients } => pointer_script(self.name, coefficients),
        }
    }

    /// Runs the script twin through the interpreter (all branches kept).
    pub fn run_script(&self) -> Result<Vec<ReportRow>, Error> {
        self.interpret_script(&InterpretOptions::default())
    }

    /// Runs the script twin with seeded single-outcome detections.
    pub fn sampled(&self, seed: u64) -> Result<Vec<ReportRow>, Error> {
        self.interpret_script(&InterpretOptions {
            sample_seed: Some(seed),
        })
    }

    fn interpret_script(&self, options: &InterpretOptions) -> Result<Vec<ReportRow>, Error> {
        let source = self.script();
        let (protocol, diagnostics) = parse(&source);
        if let Some(diagnostic) = diagnostics.first() {
            return Err(Error::Unsupported(format!(
                "generated script failed to parse: {diagnostic}"
            )));
        }
        interpret(&protocol, options).map_err(|e| e.error)
    }
}

fn run_decay(params: &DecayParams) -> Result<Vec<ReportRow>, Error> {
    let psi = cat::evolve_decay(params)?;
    let current = CurrentRef::Pure(&psi);
    Ok(vec![
        emit_row(
            current,
            &[],
            1.0,
            Some("joint"),
            None,
            &[ReportItem::Purity],
        )?,
        emit_row(
            current,
            &[],
            1.0,
            Some("cat"),
            Some(cat::CAT),
            &[
                ReportItem::Populations,
                ReportItem::OffdiagMax,
                ReportItem::Purity,
            ],
        )?,
        emit_row(
            current,
            &[],
            1.0,
            Some("nucleus"),
            Some(cat::NUCLEUS),
            &[ReportItem::Populations, ReportItem::OffdiagMax],
        )?,
    ])
}

fn run_pointer(coefficients: &[C64]) -> Result<Vec<ReportRow>, Error> {
    let chain = PointerChain::new(coefficients)?;
    let psi = chain.premeasure(Completion::Cyclic)?;
    let current = CurrentRef::Pure(&psi);
    Ok(vec![
        emit_row(
            current,
            &[],
            1.0,
            Some("joint"),
            None,
            &[ReportItem::Purity],
        )?,
        emit_row(
            current,
            &[],
            1.0,
            Some("apparatus"),
            Some(chain.apparatus().name()),
            &[
                ReportItem::Populations,
                ReportItem::OffdiagMax,
                ReportItem::Purity,
            ],
        )?,
        emit_row(
            current,
            &[],
            1.0,
            Some("system"),
            Some(chain.system().name()),
            &[ReportItem::Populations, ReportItem::OffdiagMax],
        )?,
    ])
}

fn header(name: &str, description: &str) -> String {
    format!("# name: {name}\n# desc: {description}\nVERSION 1\n")
}

fn decay_script(name: &str, params: &DecayParams) -> String {
    let mut s = header(name, "decay entangles an emitter with a target");
    s.push_str("SPACE nucleus dim=2\n");
    s.push_str("SPACE cat dim=2\n");
    s.push_str("INIT nucleus=0 cat=0\n");
    s.push_str(&format!("DECAY lambda={} t={}\n", params.lambda, params.t));
    s.push_str("REPORT label=joint purity\n");
    s.push_str("REPORT label=cat space=cat pops offdiag purity\n");
    s.push_str("REPORT label=nucleus space=nucleus pops offdiag\n");
    s
}

fn paris_script(name: &str, config: &ParisConfig) -> String {
    use crate::cavity::paris::{FIELD, MARKER_ATOM, PROBE_ATOM};
    let half_pi = std::f64::consts::FRAC_PI_2;
    let pi = std::f64::consts::PI;
    let alpha = format_complex(config.alpha);
    let mut s = header(name, "which-path marking and erasure in a shared cavity");
    s.push_str(&format!("SPACE {MARKER_ATOM} levels=e,g\n"));
    s.push_str(&format!("SPACE {FIELD} fock={}\n", config.cutoff));
    s.push_str(&format!("SPACE {PROBE_ATOM} levels=e,g\n"));
    s.push_str(&format!(
        "INIT {MARKER_ATOM}=e {FIELD}=coherent:{alpha} {PROBE_ATOM}=e\n"
    ));
    s.push_str(&format!("PULSE {MARKER_ATOM} area={half_pi}\n"));
    s.push_str(&format!(
        "DISPERSE atom={MARKER_ATOM} field={FIELD} phi_e={pi} phi_g=0\n"
    ));
    s.push_str(&format!(
        "REPORT label=after_c1 space={FIELD} fringe={alpha}\n"
    ));
    if config.with_second_pulse {
        s.push_str(&format!("PULSE {MARKER_ATOM} area={half_pi}\n"));
        s.push_str(&format!(
            "REPORT label=after_r2 space={FIELD} fringe={alpha}\n"
        ));
    }
    if config.with_marker_detection {
        s.push_str(&format!("DETECT {MARKER_ATOM}\n"));
        s.push_str("REPORT prob\n");
        s.push_str(&format!(
            "REPORT label=after_detect space={FIELD} fringe={alpha}\n"
        ));
    }
    s.push_str(&format!("PULSE {PROBE_ATOM} area={half_pi}\n"));
    s.push_str(&format!(
        "DISPERSE atom={PROBE_ATOM} field={FIELD} phi_e={pi} phi_g=0\n"
    ));
    s.push_str(&format!(
        "REPORT label=probe_c space={FIELD} fringe={alpha}\n"
    ));
    s.push_str(&format!("PULSE {PROBE_ATOM} area={half_pi}\n"));
    s.push_str(&format!("DETECT {PROBE_ATOM}\n"));
    s.push_str("REPORT prob\n");
    if !config.with_marker_detection {
        s.push_str(&format!("DETECT {MARKER_ATOM}\n"));
        s.push_str("REPORT prob\n");
    }
    s.push_str(&format!("REPORT corr={MARKER_ATOM},{PROBE_ATOM}\n"));
    s
}

fn garching_script(name: &str, config: &GarchingConfig) -> String {
    use crate::cavity::garching::{ATOM, FIELD};
    let mut s = header(name, "photon exchange with optional which-path erasure");
    if config.with_erasure {
        s.push_str(&format!("SPACE {ATOM} levels=e,g,a\n"));
    } else {
        s.push_str(&format!("SPACE {ATOM} levels=e,g\n"));
    }
    s.push_str(&format!("SPACE {FIELD} fock={}\n", config.cutoff));
    s.push_str(&format!("INIT {ATOM}=e {FIELD}=vac\n"));
    s.push_str(&format!(
        "JC atom={ATOM} field={FIELD} g={} t={}\n",
        config.coupling, config.duration
    ));
    s.push_str(&format!(
        "REPORT label=after_jc space={FIELD} pops offdiag\n"
    ));
    if config.with_erasure {
        s.push_str(&format!("ERASE {ATOM}\n"));
        s.push_str(&format!("DETECT {ATOM}\n"));
        s.push_str("REPORT prob\n");
        s.push_str(&format!(
            "REPORT label=after_erase space={FIELD} pops coherence=0,1 offdiag purity\n"
        ));
    } else {
        s.push_str(&format!("DETECT {ATOM}\n"));
        s.push_str("REPORT prob\n");
        s.push_str(&format!(
            "REPORT label=after_detect space={FIELD} pops offdiag\n"
        ));
    }
    s
}

fn pointer_script(name: &str, coefficients: &[C64]) -> String {
    use crate::measurement::{APPARATUS, SYSTEM};
    let n = coefficients.len();
    let mut amplitudes = vec!["0".to_string(); n * (n + 1)];
    for (k, c) in coefficients.iter().enumerate() {
        amplitudes[k * (n + 1) + k + 1] = format_complex(*c);
    }
    let mut s = header(name, "pointer-chain premeasurement");
    s.push_str(&format!("SPACE {SYSTEM} dim={n}\n"));
    s.push_str(&format!("SPACE {APPARATUS} dim={}\n", n + 1));
    s.push_str(&format!(
        "INIT spaces={SYSTEM},{APPARATUS} amps={}\n",
        amplitudes.join(",")
    ));
    s.push_str("REPORT label=joint purity\n");
    s.push_str(&format!(
        "REPORT label=apparatus space={APPARATUS} pops offdiag purity\n"
    ));
    s.push_str(&format!(
        "REPORT label=system space={SYSTEM} pops offdiag\n"
    ));
    s
}

/// Default photon-number cutoff used when sizing a field for a coherent
/// amplitude on the command line.
pub fn cutoff_for(alpha: C64) -> usize {
    default_cutoff(alpha)
}

//! Command line front end: run built-in scenarios or `.qproto` scripts
//! and emit deterministic JSON or CSV reports.
//!
//! Exit codes: 0 on success, 1 when a run fails (script diagnostics,
//! runtime errors), 2 on usage errors (unknown scenario, unreadable
//! script, invalid or inapplicable override).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use catbox_core::cat::DecayParams;
use catbox_core::cavity::default_cutoff;
use catbox_core::protocol::parse::parse_complex;
use catbox_core::protocol::{interpret, parse, unparse, InterpretOptions};
use catbox_core::report::ReportRow;
use catbox_core::scenario::{Scenario, ScenarioConfig};
use catbox_core::C64;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const FOCK_DIM_ENV: &str = "CATBOX_FOCK_DIM";

#[derive(Parser)]
#[command(
    name = "catbox",
    version,
    about = "Deterministic simulator for entangled composite systems: decay \
             cascades, cavity which-path protocols, and pointer premeasurement."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run built-in scenarios or `.qproto` scripts and emit a report.
    Run(RunArgs),
    /// List the built-in scenarios.
    List,
    /// Parse scripts and report diagnostics without running them.
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario names or paths to `.qproto` scripts.
    #[arg(required = true)]
    sources: Vec<String>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Include matrix dumps (`REPORT matrix`) in the report.
    #[arg(long)]
    dump_matrices: bool,

    /// Worker threads when several sources are given.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Sample one detection outcome per branch with this seed instead of
    /// keeping every branch.
    #[arg(long)]
    sample: Option<u64>,

    /// [cat] Elapsed time in seconds.
    #[arg(long)]
    t: Option<f64>,

    /// [cat] Decay rate per second.
    #[arg(long)]
    lambda: Option<f64>,

    /// [paris] Coherent amplitude as `RE,IM` (or a bare real).
    #[arg(long)]
    alpha: Option<String>,

    /// [paris] Apply the second balanced pulse to the marker atom.
    #[arg(long)]
    with_r2: Option<bool>,

    /// [paris] Detect the marker atom before the probe runs.
    #[arg(long)]
    with_detection: Option<bool>,

    /// [garching] Atom-field coupling rate.
    #[arg(long)]
    g: Option<f64>,

    /// [garching] Interaction time.
    #[arg(long)]
    t_prime: Option<f64>,

    /// [garching] Merge the atomic levels after the exchange.
    #[arg(long)]
    with_erasure: Option<bool>,

    /// [vonneumann] System coefficients, comma-separated complex numbers
    /// (`RE`, `IMi`, or `RE+IMi` each).
    #[arg(long, conflicts_with = "dim")]
    coeffs: Option<String>,

    /// [vonneumann] Balanced superposition over this many readings.
    #[arg(long)]
    dim: Option<usize>,

    /// [paris/garching] Photon-number levels to simulate (cutoff + 1).
    #[arg(long)]
    fock_dim: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    /// Script paths to parse.
    #[arg(required = true)]
    scripts: Vec<PathBuf>,

    /// Print the canonical form of each valid script to stdout.
    #[arg(long)]
    canonical: bool,
}

#[derive(Serialize)]
struct Document {
    version: u32,
    runs: Vec<RunEntry>,
}

#[derive(Serialize)]
struct RunEntry {
    scenario: String,
    parameters: BTreeMap<String, String>,
    rows: Vec<ReportRow>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Check(args) => check(&args),
        Command::Run(args) => run(&args),
    }
}

fn list() {
    for name in Scenario::names() {
        let scenario = Scenario::builtin(name).expect("listed name resolves");
        println!("{name:<18} {}", scenario.description());
    }
}

fn check(args: &CheckArgs) -> ExitCode {
    let mut clean = true;
    for path in &args.scripts {
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(error) => {
                eprintln!("cannot read {}: {error}", path.display());
                return ExitCode::from(2);
            }
        };
        let (protocol, diagnostics) = parse(&text);
        if diagnostics.is_empty() {
            if args.canonical {
                print!("{}", unparse(&protocol));
            } else {
                println!(
                    "{}: ok ({} instructions)",
                    path.display(),
                    protocol.instructions.len()
                );
            }
        } else {
            clean = false;
            for diagnostic in &diagnostics {
                eprintln!(
                    "{}:{}:{}: {}",
                    path.display(),
                    diagnostic.line,
                    diagnostic.col,
                    diagnostic.message
                );
            }
        }
    }
    if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(args: &RunArgs) -> ExitCode {
    let plans = match build_plans(args) {
        Ok(plans) => plans,
        Err(message) => {
            eprintln!("{message}");
            return ExitCode::from(2);
        }
    };

    let results = execute_all(&plans, args.sample, args.jobs);
    let mut entries = Vec::with_capacity(results.len());
    let mut failed = false;
    for result in results {
        match result {
            Ok(entry) => entries.push(entry),
            Err(message) => {
                eprintln!("{message}");
                failed = true;
            }
        }
    }
    if failed {
        return ExitCode::FAILURE;
    }

    if !args.dump_matrices {
        for entry in &mut entries {
            for row in &mut entry.rows {
                row.matrices.clear();
            }
        }
    }

    let document = Document {
        version: 1,
        runs: entries,
    };
    let bytes = match args.format {
        Format::Json => render_json(&document),
        Format::Csv => render_csv(&document),
    };
    let written = match &args.output {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| format!("cannot write report: {e}")),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::FAILURE
        }
    }
}

// ---------------------------------------------------------------------
// Planning: resolve sources and apply overrides.

enum Plan {
    Builtin(Scenario),
    Script { text: String },
}

fn build_plans(args: &RunArgs) -> Result<Vec<(String, Plan)>, String> {
    if args.jobs == 0 {
        return Err("--jobs must be at least 1".to_string());
    }
    let env_fock = fock_dim_from_env()?;
    let mut plans = Vec::with_capacity(args.sources.len());
    for source in &args.sources {
        let plan = if Scenario::names().contains(&source.as_str()) {
            let mut scenario = Scenario::builtin(source).expect("known name");
            apply_overrides(&mut scenario, args, env_fock)?;
            Plan::Builtin(scenario)
        } else if std::path::Path::new(source).exists() {
            reject_overrides_for_script(source, args)?;
            let text = std::fs::read_to_string(source)
                .map_err(|e| format!("cannot read {source}: {e}"))?;
            Plan::Script { text }
        } else {
            return Err(format!(
                "unknown scenario or missing script `{source}` (built-ins: {})",
                Scenario::names().join(", ")
            ));
        };
        plans.push((source.clone(), plan));
    }
    Ok(plans)
}

fn fock_dim_from_env() -> Result<Option<usize>, String> {
    match std::env::var(FOCK_DIM_ENV) {
        Ok(raw) => {
            let dim: usize = raw
                .trim()
                .parse()
                .map_err(|_| format!("{FOCK_DIM_ENV} must be an integer >= 2, got `{raw}`"))?;
            if dim < 2 {
                return Err(format!("{FOCK_DIM_ENV} must be at least 2, got {dim}"));
            }
            Ok(Some(dim))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(error) => Err(format!("{FOCK_DIM_ENV}: {error}")),
    }
}

/// Physics override flags present on the command line, by flag name.
fn provided_physics_flags(args: &RunArgs) -> Vec<&'static str> {
    let mut flags = Vec::new();
    if args.t.is_some() {
        flags.push("--t");
    }
    if args.lambda.is_some() {
        flags.push("--lambda");
    }
    if args.alpha.is_some() {
        flags.push("--alpha");
    }
    if args.with_r2.is_some() {
        flags.push("--with-r2");
    }
    if args.with_detection.is_some() {
        flags.push("--with-detection");
    }
    if args.g.is_some() {
        flags.push("--g");
    }
    if args.t_prime.is_some() {
        flags.push("--t-prime");
    }
    if args.with_erasure.is_some() {
        flags.push("--with-erasure");
    }
    if args.coeffs.is_some() {
        flags.push("--coeffs");
    }
    if args.dim.is_some() {
        flags.push("--dim");
    }
    if args.fock_dim.is_some() {
        flags.push("--fock-dim");
    }
    flags
}

fn reject_overrides_for_script(source: &str, args: &RunArgs) -> Result<(), String> {
    let flags = provided_physics_flags(args);
    if flags.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "{} appl{} to built-in scenarios, not to script `{source}`",
            flags.join(", "),
            if flags.len() == 1 { "ies" } else { "y" }
        ))
    }
}

fn apply_overrides(
    scenario: &mut Scenario,
    args: &RunArgs,
    env_fock: Option<usize>,
) -> Result<(), String> {
    let allowed: &[&str] = match &scenario.config {
        ScenarioConfig::Decay(_) => &["--t", "--lambda"],
        ScenarioConfig::Paris(_) => &["--alpha", "--with-r2", "--with-detection", "--fock-dim"],
        ScenarioConfig::Garching(_) => &["--g", "--t-prime", "--with-erasure", "--fock-dim"],
        ScenarioConfig::Pointer { .. } => &["--coeffs", "--dim"],
    };
    for flag in provided_physics_flags(args) {
        if !allowed.contains(&flag) {
            return Err(format!(
                "{flag} does not apply to scenario `{}`",
                scenario.name()
            ));
        }
    }
    match &mut scenario.config {
        ScenarioConfig::Decay(params) => {
            let lambda = args.lambda.unwrap_or(params.lambda);
            let t = args.t.unwrap_or(params.t);
            *params = DecayParams::new(lambda, t).map_err(|e| format!("invalid override: {e}"))?;
        }
        ScenarioConfig::Paris(config) => {
            if let Some(raw) = &args.alpha {
                config.alpha = parse_alpha(raw)?;
                config.cutoff = default_cutoff(config.alpha);
            }
            if let Some(second_pulse) = args.with_r2 {
                config.with_second_pulse = second_pulse;
            }
            if let Some(detection) = args.with_detection {
                config.with_marker_detection = detection;
            }
            if let Some(dim) = fock_dim_for(args, env_fock) {
                config.cutoff = cutoff_from_dim(dim)?;
            }
        }
        ScenarioConfig::Garching(config) => {
            if let Some(coupling) = args.g {
                if !coupling.is_finite() {
                    return Err(format!("invalid override: --g {coupling} is not finite"));
                }
                config.coupling = coupling;
            }
            if let Some(duration) = args.t_prime {
                if !duration.is_finite() || duration < 0.0 {
                    return Err(format!(
                        "invalid override: --t-prime must be a finite time >= 0, got {duration}"
                    ));
                }
                config.duration = duration;
            }
            if let Some(erasure) = args.with_erasure {
                config.with_erasure = erasure;
            }
            if let Some(dim) = fock_dim_for(args, env_fock) {
                config.cutoff = cutoff_from_dim(dim)?;
            }
        }
        ScenarioConfig::Pointer { coefficients } => {
            if let Some(raw) = &args.coeffs {
                *coefficients = parse_coeffs(raw)?;
            } else if let Some(dim) = args.dim {
                if !(2..=64).contains(&dim) {
                    return Err(format!("invalid override: --dim must be 2..=64, got {dim}"));
                }
                let amplitude = 1.0 / (dim as f64).sqrt();
                *coefficients = vec![C64::new(amplitude, 0.0); dim];
            }
        }
    }
    Ok(())
}

/// Explicit `--fock-dim` wins; otherwise the environment default applies.
fn fock_dim_for(args: &RunArgs, env_fock: Option<usize>) -> Option<usize> {
    args.fock_dim.or(env_fock)
}

fn cutoff_from_dim(dim: usize) -> Result<usize, String> {
    if dim < 2 {
        return Err(format!(
            "invalid override: a photon-number space needs at least 2 levels, got {dim}"
        ));
    }
    Ok(dim - 1)
}

fn parse_alpha(raw: &str) -> Result<C64, String> {
    let parsed = match raw.split_once(',') {
        Some((re, im)) => {
            let re: f64 = re
                .trim()
                .parse()
                .map_err(|_| format!("invalid override: --alpha real part `{re}`"))?;
            let im: f64 = im
                .trim()
                .parse()
                .map_err(|_| format!("invalid override: --alpha imaginary part `{im}`"))?;
            C64::new(re, im)
        }
        None => parse_complex(raw).map_err(|e| format!("invalid override: --alpha {e}"))?,
    };
    if !parsed.re.is_finite() || !parsed.im.is_finite() {
        return Err(format!("invalid override: --alpha `{raw}` is not finite"));
    }
    Ok(parsed)
}

fn parse_coeffs(raw: &str) -> Result<Vec<C64>, String> {
    let coefficients: Vec<C64> = raw
        .split(',')
        .map(|part| parse_complex(part.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| format!("invalid override: --coeffs {e}"))?;
    if !(2..=64).contains(&coefficients.len()) {
        return Err(format!(
            "invalid override: --coeffs needs 2..=64 entries, got {}",
            coefficients.len()
        ));
    }
    Ok(coefficients)
}

// ---------------------------------------------------------------------
// Execution.

fn execute_all(
    plans: &[(String, Plan)],
    sample: Option<u64>,
    jobs: usize,
) -> Vec<Result<RunEntry, String>> {
    let workers = jobs.min(plans.len()).max(1);
    if workers == 1 {
        return plans
            .iter()
            .map(|(source, plan)| execute(source, plan, sample))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RunEntry, String>>>> =
        plans.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= plans.len() {
                    break;
                }
                let (source, plan) = &plans[index];
                let result = execute(source, plan, sample);
                *slots[index].lock().expect("result slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("result slot").expect("worker ran"))
        .collect()
}

fn execute(source: &str, plan: &Plan, sample: Option<u64>) -> Result<RunEntry, String> {
    let mut parameters = BTreeMap::new();
    if let Some(seed) = sample {
        parameters.insert("sample".to_string(), seed.to_string());
    }
    let rows = match plan {
        Plan::Builtin(scenario) => {
            parameters.extend(scenario.parameters());
            let run = match sample {
                Some(seed) => scenario.sampled(seed),
                None => scenario.run(),
            };
            run.map_err(|e| format!("{source}: {e}"))?
        }
        Plan::Script { text } => {
            let (protocol, diagnostics) = parse(text);
            if !diagnostics.is_empty() {
                let rendered: Vec<String> = diagnostics
                    .iter()
                    .map(|d| format!("{source}:{}:{}: {}", d.line, d.col, d.message))
                    .collect();
                return Err(rendered.join("\n"));
            }
            let options = InterpretOptions {
                sample_seed: sample,
            };
            interpret(&protocol, &options)
                .map_err(|e| format!("{source}:{}: {}", e.line, e.error))?
        }
    };
    Ok(RunEntry {
        scenario: source.to_string(),
        parameters,
        rows,
    })
}

// ---------------------------------------------------------------------
// Serialization: fixed float formatting for golden-file stability.

/// 15 significant digits, lowercase `e` exponent, negative zero
/// normalized. Shared by the JSON and CSV writers so both formats carry
/// identical numeric content.
fn fmt_float(value: f64) -> String {
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value:.14e}")
}

struct GoldenFormatter;

impl serde_json::ser::Formatter for GoldenFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(fmt_float(value).as_bytes())
    }
}

fn render_json(document: &Document) -> Vec<u8> {
    let mut bytes = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut bytes, GoldenFormatter);
    document
        .serialize(&mut serializer)
        .expect("in-memory serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

fn render_csv(document: &Document) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["scenario", "branch", "probability", "name", "value"])
        .expect("in-memory csv");
    for run in &document.runs {
        for row in &run.rows {
            let probability = fmt_float(row.probability);
            for value in &row.values {
                writer
                    .write_record([
                        run.scenario.as_str(),
                        row.branch.as_str(),
                        probability.as_str(),
                        value.name.as_str(),
                        fmt_float(value.value).as_str(),
                    ])
                    .expect("in-memory csv");
            }
            for matrix in &row.matrices {
                for i in 0..matrix.rows {
                    for j in 0..matrix.cols {
                        let at = 2 * (i * matrix.cols + j);
                        for (part, offset) in [("re", 0), ("im", 1)] {
                            writer
                                .write_record([
                                    run.scenario.as_str(),
                                    row.branch.as_str(),
                                    probability.as_str(),
                                    format!("{}[{i},{j}].{part}", matrix.name).as_str(),
                                    fmt_float(matrix.data[at + offset]).as_str(),
                                ])
                                .expect("in-memory csv");
                        }
                    }
                }
            }
        }
    }
    writer.into_inner().expect("in-memory csv")
}

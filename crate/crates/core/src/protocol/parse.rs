//! Text format for protocol scripts.
//!
//! A script is a sequence of lines, one instruction per line:
//!
//! ```text
//! # name: example
//! VERSION 1
//! SPACE atom levels=e,g,a
//! SPACE field fock=12
//! INIT atom=e field=vac
//! JC g=1 t=0.7853981633974483
//! ERASE atom
//! DETECT atom
//! TRACE keep=field
//! REPORT coherence=0,1
//! ```
//!
//! `#` starts a comment; full-line comments of the form `# name: ...` and
//! `# desc: ...` are scooped into the protocol's metadata. Parsing is
//! total: every problem becomes a positioned [`Diagnostic`], the offending
//! line is dropped, and the remaining lines still parse.

use crate::C64;

/// A problem found while parsing; `line` and `col` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, col {}: {}", self.line, self.col, self.message)
    }
}

/// An instruction together with the 1-based source line it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Located<T> {
    pub line: usize,
    pub node: T,
}

/// A parsed script.
#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub version: u32,
    pub name: Option<String>,
    pub description: Option<String>,
    pub instructions: Vec<Located<Instruction>>,
}

impl Protocol {
    /// The instruction sequence without source positions, for comparing
    /// programs independently of formatting.
    pub fn body(&self) -> Vec<&Instruction> {
        self.instructions.iter().map(|l| &l.node).collect()
    }
}

/// How a `SPACE` declaration sizes its factor.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    /// Named levels (two or three): detection outcomes use these names and
    /// the third level, when present, is the erasure sink.
    Levels(Vec<String>),
    /// Photon-number space truncated at this cutoff (dimension `cutoff+1`).
    Fock(usize),
    /// A plain space of the given dimension, addressed by basis index.
    Dim(usize),
}

/// The initial-state clause of an `INIT` instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum InitSpec {
    /// One value per space; the joint state is their tensor product taken
    /// in declaration order regardless of the order written here.
    Product(Vec<(String, InitValue)>),
    /// Raw amplitudes over the joint basis of all declared spaces (listed
    /// in declaration order); they are normalized before use.
    Joint {
        spaces: Vec<String>,
        amplitudes: Vec<C64>,
    },
}

/// A single-space initializer.
#[derive(Clone, Debug, PartialEq)]
pub enum InitValue {
    /// A level name (for level spaces) or `vac` (for photon spaces).
    Named(String),
    /// A basis index.
    Index(usize),
    /// `coherent:RE+IMi` (photon spaces only).
    Coherent(C64),
}

/// One item of a `REPORT` instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportSpec {
    /// `pops`: diagonal of the (reduced) state.
    Pops,
    /// `purity`.
    Purity,
    /// `offdiag`: largest off-diagonal magnitude.
    Offdiag,
    /// `matrix`: full density-matrix dump.
    Matrix,
    /// `prob`: the branch probability.
    Prob,
    /// `coherence=i,j`: one off-diagonal entry.
    Coherence(usize, usize),
    /// `fringe=RE+IMi`: even-minus-odd cat population at that amplitude.
    Fringe(C64),
    /// `corr=a,b`: outcome agreement between two detected spaces. Must be
    /// the only item of its instruction and emits a single summary row.
    Corr(String, String),
}

/// One executable instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    /// `SPACE <name> levels=..|fock=N|dim=K`
    Space { name: String, kind: SpaceKind },
    /// `INIT <space>=<value> ...` or `INIT spaces=.. amps=..`
    Init(InitSpec),
    /// `PULSE <atom> area=F`: rotation by `area` in the `(e, g)` plane.
    Pulse { atom: String, area: f64 },
    /// `DISPERSE [atom=A] [field=F] phi_<level>=F ...`: per-photon phase
    /// shift conditioned on the atom level (unlisted levels shift by 0).
    Disperse {
        atom: Option<String>,
        field: Option<String>,
        phases: Vec<(String, f64)>,
    },
    /// `JC [atom=A] [field=F] g=F t=F`: resonant photon exchange for a
    /// total angle `g * t`.
    Jc {
        atom: Option<String>,
        field: Option<String>,
        coupling: f64,
        time: f64,
    },
    /// `ERASE <atom>`: merge the first two levels into the sink level.
    Erase { atom: String },
    /// `DETECT <atom>`: fork one branch per level.
    Detect { atom: String },
    /// `DECAY lambda=F t=F`: two-qubit decay from the joint ground state.
    Decay { rate: f64, time: f64 },
    /// `TRACE keep=a,b`: reduce to the kept factors (state becomes mixed).
    Trace { keep: Vec<String> },
    /// `REPORT [label=L] [space=S] <item> ...`
    Report {
        label: Option<String>,
        space: Option<String>,
        items: Vec<ReportSpec>,
    },
}

/// Parses a script. Never fails: lines that do not parse are reported in
/// the diagnostics list and skipped.
pub fn parse(source: &str) -> (Protocol, Vec<Diagnostic>) {
    let mut protocol = Protocol {
        version: 1,
        name: None,
        description: None,
        instructions: Vec::new(),
    };
    let mut diagnostics = Vec::new();
    let mut saw_version = false;
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_start();
        if let Some(comment) = trimmed.strip_prefix('#') {
            let body = comment.trim_start();
            if let Some(value) = body.strip_prefix("name:") {
                if protocol.name.is_none() {
                    protocol.name = Some(value.trim().to_string());
                }
            } else if let Some(value) = body.strip_prefix("desc:") {
                if protocol.description.is_none() {
                    protocol.description = Some(value.trim().to_string());
                }
            }
            continue;
        }
        let code = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut tokens = tokenize(code);
        if tokens.is_empty() {
            continue;
        }
        let opcode = tokens.remove(0);
        if opcode.text == "VERSION" {
            match parse_version(line, &opcode, &tokens) {
                Ok(_) if saw_version => diagnostics.push(Diagnostic {
                    line,
                    col: opcode.col,
                    message: "duplicate VERSION".to_string(),
                }),
                Ok(version) if !protocol.instructions.is_empty() => diagnostics.push(Diagnostic {
                    line,
                    col: opcode.col,
                    message: format!("VERSION {version} must come before other instructions"),
                }),
                Ok(version) => {
                    protocol.version = version;
                    saw_version = true;
                }
                Err(d) => diagnostics.push(d),
            }
            continue;
        }
        match parse_instruction(line, &opcode, tokens) {
            Ok(node) => protocol.instructions.push(Located { line, node }),
            Err(d) => diagnostics.push(d),
        }
    }
    (protocol, diagnostics)
}

/// Renders a protocol back to canonical text: metadata comments first,
/// then `VERSION`, then one instruction per line with `{}`-formatted
/// (shortest round-trip) numbers. Reparsing the result reproduces the
/// same program.
pub fn unparse(protocol: &Protocol) -> String {
    let mut out = String::new();
    if let Some(name) = &protocol.name {
        out.push_str(&format!("# name: {name}\n"));
    }
    if let Some(desc) = &protocol.description {
        out.push_str(&format!("# desc: {desc}\n"));
    }
    out.push_str(&format!("VERSION {}\n", protocol.version));
    for inst in &protocol.instructions {
        out.push_str(&render(&inst.node));
        out.push('\n');
    }
    out
}

/// Formats a complex number as `RE+IMi` / `RE-IMi` with `{}` parts;
/// negative zeros are normalized away so the text is canonical.
pub fn format_complex(z: C64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Parses `RE`, `IMi`, or `RE+IMi` (signs and exponents allowed).
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let err = || format!("`{text}` is not a complex number (use RE, IMi, or RE+IMi)");
    if text.is_empty() {
        return Err(err());
    }
    // The last top-level +/- (one not directly after an exponent marker)
    // separates the real and imaginary parts.
    let mut split = None;
    for (i, ch) in text.char_indices().skip(1) {
        if ch == '+' || ch == '-' {
            let prev = text[..i]
                .chars()
                .next_back()
                .expect("skip(1) guarantees a prior char");
            if prev != 'e' && prev != 'E' {
                split = Some(i);
            }
        }
    }
    match split {
        Some(i) => {
            let re = parse_finite_f64(&text[..i]).map_err(|_| err())?;
            let tail = text[i..].strip_suffix('i').ok_or_else(err)?;
            let im = parse_finite_f64(tail).map_err(|_| err())?;
            Ok(C64::new(re, im))
        }
        None => match text.strip_suffix('i') {
            Some(body) => Ok(C64::new(0.0, parse_finite_f64(body).map_err(|_| err())?)),
            None => Ok(C64::new(parse_finite_f64(text).map_err(|_| err())?, 0.0)),
        },
    }
}

// ---------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Token<'a> {
    /// 1-based character column of the token start.
    col: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut end = 0;
    for (col0, (byte, ch)) in line.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push(Token {
                    col: c,
                    text: &line[b..byte],
                });
            }
        } else if start.is_none() {
            start = Some((byte, col0 + 1));
        }
        end = byte + ch.len_utf8();
    }
    if let Some((b, c)) = start {
        out.push(Token {
            col: c,
            text: &line[b..end],
        });
    }
    out
}

// ---------------------------------------------------------------------
// Shared value parsers (message only; the caller attaches the position)
// ---------------------------------------------------------------------

fn is_ident(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_ident(text: &str) -> Result<String, String> {
    if is_ident(text) {
        Ok(text.to_string())
    } else {
        Err(format!("`{text}` is not a valid name"))
    }
}

fn parse_finite_f64(text: &str) -> Result<f64, String> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{text}` is not a finite number"));
    }
    Ok(value)
}

fn parse_usize(text: &str) -> Result<usize, String> {
    text.parse()
        .map_err(|_| format!("`{text}` is not a non-negative integer"))
}

fn parse_ident_list(text: &str) -> Result<Vec<String>, String> {
    if text.is_empty() {
        return Err("empty list".to_string());
    }
    text.split(',').map(parse_ident).collect()
}

fn parse_complex_list(text: &str) -> Result<Vec<C64>, String> {
    if text.is_empty() {
        return Err("empty list".to_string());
    }
    text.split(',').map(parse_complex).collect()
}

fn parse_usize_pair(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("`{text}` is not an index pair `i,j`"))?;
    Ok((parse_usize(a)?, parse_usize(b)?))
}

fn parse_ident_pair(text: &str) -> Result<(String, String), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("`{text}` is not a name pair `a,b`"))?;
    Ok((parse_ident(a)?, parse_ident(b)?))
}

fn strip_ket(text: &str) -> Option<&str> {
    let body = text.strip_prefix('|')?;
    body.strip_suffix('>')
        .or_else(|| body.strip_suffix('\u{27e9}'))
}

fn parse_init_value(text: &str) -> Result<InitValue, String> {
    if let Some(rest) = text.strip_prefix("coherent:") {
        return Ok(InitValue::Coherent(parse_complex(rest)?));
    }
    let core = strip_ket(text).unwrap_or(text);
    if !core.is_empty() && core.chars().all(|c| c.is_ascii_digit()) {
        return core
            .parse()
            .map(InitValue::Index)
            .map_err(|_| format!("`{core}` is out of range"));
    }
    if is_ident(core) {
        Ok(InitValue::Named(core.to_string()))
    } else {
        Err(format!(
            "`{text}` is not a level, basis index, or coherent:RE+IMi"
        ))
    }
}

// ---------------------------------------------------------------------
// Argument list handling
// ---------------------------------------------------------------------

struct KeyVal<'a> {
    key_col: usize,
    key: &'a str,
    value_col: usize,
    value: &'a str,
    used: bool,
}

struct Args<'a> {
    line: usize,
    opcode_col: usize,
    positional: Vec<(usize, &'a str, bool)>,
    keyed: Vec<KeyVal<'a>>,
}

impl<'a> Args<'a> {
    fn new(line: usize, opcode_col: usize, tokens: Vec<Token<'a>>) -> Result<Self, Diagnostic> {
        let mut positional = Vec::new();
        let mut keyed: Vec<KeyVal<'a>> = Vec::new();
        for token in tokens {
            match token.text.split_once('=') {
                Some((key, value)) => {
                    if !is_ident(key) {
                        return Err(Diagnostic {
                            line,
                            col: token.col,
                            message: format!("`{key}` is not a valid key"),
                        });
                    }
                    if keyed.iter().any(|kv| kv.key == key) {
                        return Err(Diagnostic {
                            line,
                            col: token.col,
                            message: format!("duplicate key `{key}`"),
                        });
                    }
                    keyed.push(KeyVal {
                        key_col: token.col,
                        key,
                        value_col: token.col + key.chars().count() + 1,
                        value,
                        used: false,
                    });
                }
                None => positional.push((token.col, token.text, false)),
            }
        }
        Ok(Args {
            line,
            opcode_col,
            positional,
            keyed,
        })
    }

    fn diag(&self, col: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line: self.line,
            col,
            message: message.into(),
        }
    }

    fn has_key(&self, key: &str) -> bool {
        self.keyed.iter().any(|kv| kv.key == key)
    }

    /// Consumes a key if present; returns (value column, value text).
    fn take_key(&mut self, key: &str) -> Option<(usize, &'a str)> {
        let kv = self.keyed.iter_mut().find(|kv| kv.key == key)?;
        kv.used = true;
        Some((kv.value_col, kv.value))
    }

    fn require_key(&mut self, opcode: &str, key: &str) -> Result<(usize, &'a str), Diagnostic> {
        self.take_key(key)
            .ok_or_else(|| self.diag(self.opcode_col, format!("{opcode} needs {key}=")))
    }

    /// Consumes every unused `prefix_*` key; returns (value col, suffix, value).
    fn drain_prefixed(&mut self, prefix: &str) -> Vec<(usize, String, &'a str)> {
        let mut out = Vec::new();
        for kv in &mut self.keyed {
            if !kv.used {
                if let Some(suffix) = kv.key.strip_prefix(prefix) {
                    kv.used = true;
                    out.push((kv.value_col, suffix.to_string(), kv.value));
                }
            }
        }
        out
    }

    fn take_positional(&mut self) -> Option<(usize, &'a str)> {
        let slot = self.positional.iter_mut().find(|p| !p.2)?;
        slot.2 = true;
        Some((slot.0, slot.1))
    }

    fn require_positional(
        &mut self,
        opcode: &str,
        what: &str,
    ) -> Result<(usize, &'a str), Diagnostic> {
        self.take_positional()
            .ok_or_else(|| self.diag(self.opcode_col, format!("{opcode} needs {what}")))
    }

    /// Rejects any argument no rule consumed.
    fn finish(&self, opcode: &str) -> Result<(), Diagnostic> {
        if let Some((col, text, _)) = self.positional.iter().find(|p| !p.2) {
            return Err(self.diag(*col, format!("unexpected argument `{text}` for {opcode}")));
        }
        if let Some(kv) = self.keyed.iter().find(|kv| !kv.used) {
            return Err(self.diag(
                kv.key_col,
                format!("unexpected key `{}` for {opcode}", kv.key),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Per-instruction rules
// ---------------------------------------------------------------------

fn parse_version(line: usize, opcode: &Token<'_>, tokens: &[Token<'_>]) -> Result<u32, Diagnostic> {
    let diag = |col: usize, message: String| Diagnostic { line, col, message };
    match tokens {
        [value] => {
            let version: u32 = value.text.parse().map_err(|_| {
                diag(
                    value.col,
                    format!("`{}` is not a version number", value.text),
                )
            })?;
            if version != 1 {
                return Err(diag(
                    value.col,
                    format!("unsupported version `{version}` (this tool reads version 1)"),
                ));
            }
            Ok(version)
        }
        [] => Err(diag(opcode.col, "VERSION needs a number".to_string())),
        [_, extra, ..] => Err(diag(
            extra.col,
            format!("unexpected argument `{}` for VERSION", extra.text),
        )),
    }
}

fn parse_instruction(
    line: usize,
    opcode: &Token<'_>,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    match opcode.text {
        "SPACE" => parse_space(line, opcode.col, tokens),
        "INIT" => parse_init(line, opcode.col, tokens),
        "PULSE" => parse_pulse(line, opcode.col, tokens),
        "DISPERSE" => parse_disperse(line, opcode.col, tokens),
        "JC" => parse_jc(line, opcode.col, tokens),
        "ERASE" => parse_single_space(line, opcode.col, tokens, "ERASE")
            .map(|atom| Instruction::Erase { atom }),
        "DETECT" => parse_single_space(line, opcode.col, tokens, "DETECT")
            .map(|atom| Instruction::Detect { atom }),
        "DECAY" => parse_decay(line, opcode.col, tokens),
        "TRACE" => parse_trace(line, opcode.col, tokens),
        "REPORT" => parse_report(line, opcode.col, tokens),
        other => Err(Diagnostic {
            line,
            col: opcode.col,
            message: format!("unknown instruction `{other}`"),
        }),
    }
}

fn parse_space(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let (name_col, name_text) = args.require_positional("SPACE", "a space name")?;
    let name = parse_ident(name_text).map_err(|m| args.diag(name_col, m))?;
    let mut kinds: Vec<(usize, SpaceKind)> = Vec::new();
    if let Some((col, value)) = args.take_key("levels") {
        let levels = parse_ident_list(value).map_err(|m| args.diag(col, m))?;
        if !(2..=3).contains(&levels.len()) {
            return Err(args.diag(col, "levels expects 2 or 3 comma-separated names"));
        }
        for (i, level) in levels.iter().enumerate() {
            if levels[..i].contains(level) {
                return Err(args.diag(col, format!("duplicate level `{level}`")));
            }
        }
        kinds.push((col, SpaceKind::Levels(levels)));
    }
    if let Some((col, value)) = args.take_key("fock") {
        let cutoff = parse_usize(value).map_err(|m| args.diag(col, m))?;
        if cutoff == 0 {
            return Err(args.diag(col, "the photon cutoff must be at least 1"));
        }
        kinds.push((col, SpaceKind::Fock(cutoff)));
    }
    if let Some((col, value)) = args.take_key("dim") {
        let dim = parse_usize(value).map_err(|m| args.diag(col, m))?;
        if dim == 0 {
            return Err(args.diag(col, "the dimension must be positive"));
        }
        kinds.push((col, SpaceKind::Dim(dim)));
    }
    args.finish("SPACE")?;
    match kinds.len() {
        0 => Err(args.diag(opcode_col, "SPACE needs one of levels=, fock=, dim=")),
        1 => Ok(Instruction::Space {
            name,
            kind: kinds.pop().expect("checked length").1,
        }),
        _ => Err(args.diag(
            kinds[1].0,
            "SPACE takes exactly one of levels=, fock=, dim=",
        )),
    }
}

fn parse_init(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    if args.has_key("spaces") || args.has_key("amps") {
        let (s_col, s_val) = args.require_key("INIT", "spaces")?;
        let (a_col, a_val) = args.require_key("INIT", "amps")?;
        let spaces = parse_ident_list(s_val).map_err(|m| args.diag(s_col, m))?;
        let amplitudes = parse_complex_list(a_val).map_err(|m| args.diag(a_col, m))?;
        args.finish("INIT")?;
        return Ok(Instruction::Init(InitSpec::Joint { spaces, amplitudes }));
    }
    if args.keyed.is_empty() {
        return Err(args.diag(opcode_col, "INIT needs space=value pairs or spaces=/amps="));
    }
    let mut pairs = Vec::new();
    for i in 0..args.keyed.len() {
        let (key, value, value_col) = (
            args.keyed[i].key,
            args.keyed[i].value,
            args.keyed[i].value_col,
        );
        let parsed = parse_init_value(value).map_err(|m| args.diag(value_col, m))?;
        pairs.push((key.to_string(), parsed));
        args.keyed[i].used = true;
    }
    args.finish("INIT")?;
    Ok(Instruction::Init(InitSpec::Product(pairs)))
}

fn parse_pulse(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let (atom_col, atom_text) = args.require_positional("PULSE", "an atom name")?;
    let atom = parse_ident(atom_text).map_err(|m| args.diag(atom_col, m))?;
    let (area_col, area_text) = args.require_key("PULSE", "area")?;
    let area = parse_finite_f64(area_text).map_err(|m| args.diag(area_col, m))?;
    args.finish("PULSE")?;
    Ok(Instruction::Pulse { atom, area })
}

fn parse_disperse(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let atom = match args.take_key("atom") {
        Some((col, value)) => Some(parse_ident(value).map_err(|m| args.diag(col, m))?),
        None => None,
    };
    let field = match args.take_key("field") {
        Some((col, value)) => Some(parse_ident(value).map_err(|m| args.diag(col, m))?),
        None => None,
    };
    let mut phases = Vec::new();
    for (col, level, value) in args.drain_prefixed("phi_") {
        if level.is_empty() {
            return Err(args.diag(col, "phi_ needs a level name (for example phi_e=)"));
        }
        let phase = parse_finite_f64(value).map_err(|m| args.diag(col, m))?;
        phases.push((level, phase));
    }
    args.finish("DISPERSE")?;
    Ok(Instruction::Disperse {
        atom,
        field,
        phases,
    })
}

fn parse_jc(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let atom = match args.take_key("atom") {
        Some((col, value)) => Some(parse_ident(value).map_err(|m| args.diag(col, m))?),
        None => None,
    };
    let field = match args.take_key("field") {
        Some((col, value)) => Some(parse_ident(value).map_err(|m| args.diag(col, m))?),
        None => None,
    };
    let (g_col, g_text) = args.require_key("JC", "g")?;
    let coupling = parse_finite_f64(g_text).map_err(|m| args.diag(g_col, m))?;
    let (t_col, t_text) = args.require_key("JC", "t")?;
    let time = parse_finite_f64(t_text).map_err(|m| args.diag(t_col, m))?;
    args.finish("JC")?;
    Ok(Instruction::Jc {
        atom,
        field,
        coupling,
        time,
    })
}

fn parse_single_space(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
    opcode: &str,
) -> Result<String, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let (col, text) = args.require_positional(opcode, "a space name")?;
    let name = parse_ident(text).map_err(|m| args.diag(col, m))?;
    args.finish(opcode)?;
    Ok(name)
}

fn parse_decay(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let (l_col, l_text) = args.require_key("DECAY", "lambda")?;
    let rate = parse_finite_f64(l_text).map_err(|m| args.diag(l_col, m))?;
    let (t_col, t_text) = args.require_key("DECAY", "t")?;
    let time = parse_finite_f64(t_text).map_err(|m| args.diag(t_col, m))?;
    args.finish("DECAY")?;
    Ok(Instruction::Decay { rate, time })
}

fn parse_trace(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let mut args = Args::new(line, opcode_col, tokens)?;
    let (col, value) = args.require_key("TRACE", "keep")?;
    let keep = parse_ident_list(value).map_err(|m| args.diag(col, m))?;
    args.finish("TRACE")?;
    Ok(Instruction::Trace { keep })
}

fn parse_report(
    line: usize,
    opcode_col: usize,
    tokens: Vec<Token<'_>>,
) -> Result<Instruction, Diagnostic> {
    let diag = |col: usize, message: String| Diagnostic { line, col, message };
    let mut label = None;
    let mut space = None;
    let mut items = Vec::new();
    let mut corr_col = None;
    for token in &tokens {
        match token.text.split_once('=') {
            Some((key, value)) => {
                let value_col = token.col + key.chars().count() + 1;
                match key {
                    "label" => {
                        if label.is_some() {
                            return Err(diag(token.col, "duplicate key `label`".to_string()));
                        }
                        label = Some(parse_ident(value).map_err(|m| diag(value_col, m))?);
                    }
                    "space" => {
                        if space.is_some() {
                            return Err(diag(token.col, "duplicate key `space`".to_string()));
                        }
                        space = Some(parse_ident(value).map_err(|m| diag(value_col, m))?);
                    }
                    "coherence" => {
                        let (i, j) = parse_usize_pair(value).map_err(|m| diag(value_col, m))?;
                        items.push(ReportSpec::Coherence(i, j));
                    }
                    "fringe" => {
                        let alpha = parse_complex(value).map_err(|m| diag(value_col, m))?;
                        items.push(ReportSpec::Fringe(alpha));
                    }
                    "corr" => {
                        let (a, b) = parse_ident_pair(value).map_err(|m| diag(value_col, m))?;
                        corr_col = Some(token.col);
                        items.push(ReportSpec::Corr(a, b));
                    }
                    other => return Err(diag(token.col, format!("unknown report item `{other}`"))),
                }
            }
            None => match token.text {
                "pops" => items.push(ReportSpec::Pops),
                "purity" => items.push(ReportSpec::Purity),
                "offdiag" => items.push(ReportSpec::Offdiag),
                "matrix" => items.push(ReportSpec::Matrix),
                "prob" => items.push(ReportSpec::Prob),
                other => return Err(diag(token.col, format!("unknown report item `{other}`"))),
            },
        }
    }
    if items.is_empty() {
        return Err(diag(
            opcode_col,
            "REPORT needs at least one item".to_string(),
        ));
    }
    if let Some(col) = corr_col {
        if items.len() > 1 {
            return Err(diag(col, "corr must be the only report item".to_string()));
        }
    }
    Ok(Instruction::Report {
        label,
        space,
        items,
    })
}

// ---------------------------------------------------------------------
// Canonical rendering
// ---------------------------------------------------------------------

fn render(instruction: &Instruction) -> String {
    match instruction {
        Instruction::Space { name, kind } => match kind {
            SpaceKind::Levels(levels) => format!("SPACE {name} levels={}", levels.join(",")),
            SpaceKind::Fock(cutoff) => format!("SPACE {name} fock={cutoff}"),
            SpaceKind::Dim(dim) => format!("SPACE {name} dim={dim}"),
        },
        Instruction::Init(InitSpec::Product(pairs)) => {
            let body: Vec<String> = pairs
                .iter()
                .map(|(name, value)| format!("{name}={}", render_init_value(value)))
                .collect();
            format!("INIT {}", body.join(" "))
        }
        Instruction::Init(InitSpec::Joint { spaces, amplitudes }) => {
            let amps: Vec<String> = amplitudes.iter().map(|z| format_complex(*z)).collect();
            format!("INIT spaces={} amps={}", spaces.join(","), amps.join(","))
        }
        Instruction::Pulse { atom, area } => format!("PULSE {atom} area={area}"),
        Instruction::Disperse {
            atom,
            field,
            phases,
        } => {
            let mut out = "DISPERSE".to_string();
            if let Some(atom) = atom {
                out.push_str(&format!(" atom={atom}"));
            }
            if let Some(field) = field {
                out.push_str(&format!(" field={field}"));
            }
            for (level, phase) in phases {
                out.push_str(&format!(" phi_{level}={phase}"));
            }
            out
        }
        Instruction::Jc {
            atom,
            field,
            coupling,
            time,
        } => {
            let mut out = "JC".to_string();
            if let Some(atom) = atom {
                out.push_str(&format!(" atom={atom}"));
            }
            if let Some(field) = field {
                out.push_str(&format!(" field={field}"));
            }
            out.push_str(&format!(" g={coupling} t={time}"));
            out
        }
        Instruction::Erase { atom } => format!("ERASE {atom}"),
        Instruction::Detect { atom } => format!("DETECT {atom}"),
        Instruction::Decay { rate, time } => format!("DECAY lambda={rate} t={time}"),
        Instruction::Trace { keep } => format!("TRACE keep={}", keep.join(",")),
        Instruction::Report {
            label,
            space,
            items,
        } => {
            let mut out = "REPORT".to_string();
            if let Some(label) = label {
                out.push_str(&format!(" label={label}"));
            }
            if let Some(space) = space {
                out.push_str(&format!(" space={space}"));
            }
            for item in items {
                out.push(' ');
                out.push_str(&render_item(item));
            }
            out
        }
    }
}

fn render_init_value(value: &InitValue) -> String {
    match value {
        InitValue::Named(name) => name.clone(),
        InitValue::Index(index) => index.to_string(),
        InitValue::Coherent(z) => format!("coherent:{}", format_complex(*z)),
    }
}

fn render_item(item: &ReportSpec) -> String {
    match item {
        ReportSpec::Pops => "pops".to_string(),
        ReportSpec::Purity => "purity".to_string(),
        ReportSpec::Offdiag => "offdiag".to_string(),
        ReportSpec::Matrix => "matrix".to_string(),
        ReportSpec::Prob => "prob".to_string(),
        ReportSpec::Coherence(i, j) => format!("coherence={i},{j}"),
        ReportSpec::Fringe(alpha) => format!("fringe={}", format_complex(*alpha)),
        ReportSpec::Corr(a, b) => format!("corr={a},{b}"),
    }
}

//! Round-trip and end-to-end checks for the script front end: printing a
//! parsed program must preserve it exactly, the generated built-in scripts
//! must survive the same trip, and a small worked example must produce the
//! coherence value it is constructed to show.

use catbox_core::protocol::{interpret, parse, unparse, InterpretOptions};
use catbox_core::scenario::Scenario;

/// Parses and requires a clean parse.
fn parse_clean(source: &str) -> catbox_core::protocol::Protocol {
    let (protocol, diagnostics) = parse(source);
    assert!(
        diagnostics.is_empty(),
        "unexpected diagnostics: {diagnostics:?}"
    );
    protocol
}

/// Checks that printing and reparsing preserves the instruction sequence
/// and that printing is idempotent.
fn assert_roundtrips(source: &str) {
    let first = parse_clean(source);
    let printed = unparse(&first);
    let second = parse_clean(&printed);
    assert_eq!(first.version, second.version);
    assert_eq!(first.name, second.name);
    assert_eq!(first.description, second.description);
    assert_eq!(first.body(), second.body(), "printed program differs");
    assert_eq!(printed, unparse(&second), "printer is not idempotent");
}

#[test]
fn printing_and_reparsing_preserves_programs() {
    // Every instruction form and every report item except the joint INIT,
    // which is exercised separately because INIT may appear only once.
    let source = "\
# name: kitchen sink
# desc: every instruction form in one program
VERSION 1

SPACE a1 levels=e,g
SPACE probe levels=e,g,a
SPACE f fock=6
SPACE reg dim=5
INIT a1=e probe=g f=coherent:1.5-0.25i reg=3
PULSE a1 area=1.5707963267948966
DISPERSE atom=a1 field=f phi_e=3.141592653589793 phi_g=0
DISPERSE phi_e=0.5
JC atom=probe field=f g=1 t=0.7853981633974483
JC g=0.25 t=2
ERASE probe
DETECT a1
DECAY lambda=0.0001925408834888737 t=3600
TRACE keep=f,reg
REPORT label=stage space=f pops purity offdiag coherence=0,1 fringe=2+0i prob
REPORT matrix
REPORT corr=a1,probe
";
    assert_roundtrips(source);

    let joint = "\
VERSION 1
SPACE left dim=2
SPACE right dim=3
INIT spaces=left,right amps=0.5,0,0.5,0,0.5,0.5
REPORT pops
";
    assert_roundtrips(joint);
}

#[test]
fn builtin_scripts_roundtrip_through_the_printer() {
    for name in Scenario::names() {
        let scenario = Scenario::builtin(name).unwrap();
        let script = scenario.script();
        let protocol = parse_clean(&script);
        assert_eq!(protocol.name.as_deref(), Some(*name));
        assert!(protocol.description.is_some());
        assert_roundtrips(&script);
    }
}

#[test]
fn erased_exchange_example_reports_the_field_coherence() {
    // A half-quantum exchange writes (|e,0> + i|g,1>)/sqrt(2); erasing the
    // atomic record and detecting the sink level leaves the field in the
    // pure superposition (|0> + i|1>)/sqrt(2), whose off-diagonal entry
    // is -i/2.
    let source = "\
VERSION 1
SPACE atom levels=e,g,a
SPACE field fock=12
INIT atom=e field=vac
JC atom=atom field=field g=1 t=0.7853981633974483
ERASE atom
DETECT atom
TRACE keep=field
REPORT coherence=0,1
";
    let protocol = parse_clean(source);
    let rows = interpret(&protocol, &InterpretOptions::default()).unwrap();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row.branch, "a");
    assert!((row.probability - 1.0).abs() < 1e-12);
    let value = |name: &str| -> f64 {
        row.values
            .iter()
            .find(|v| v.name == name)
            .unwrap_or_else(|| panic!("missing value `{name}`"))
            .value
    };
    assert!(value("coh[0,1].re").abs() < 1e-12);
    assert!((value("coh[0,1].im") + 0.5).abs() < 1e-12);
    assert!((value("coh[0,1].abs") - 0.5).abs() < 1e-12);
}

#[test]
fn evolution_after_trace_is_rejected_with_the_line_number() {
    let source = "\
VERSION 1
SPACE a levels=e,g
SPACE f fock=1
INIT a=e f=vac
TRACE keep=a
PULSE a area=1
";
    let protocol = parse_clean(source);
    let err = interpret(&protocol, &InterpretOptions::default()).unwrap_err();
    assert_eq!(err.line, 6);
    assert_eq!(
        err.to_string(),
        "line 6: `PULSE` needs a pure state, but TRACE has made it mixed"
    );
}

#[test]
fn correlation_requires_recorded_outcomes_for_both_spaces() {
    let source = "\
VERSION 1
SPACE a levels=e,g
SPACE b levels=e,g
INIT a=e b=e
DETECT a
REPORT corr=a,b
";
    let protocol = parse_clean(source);
    let err = interpret(&protocol, &InterpretOptions::default()).unwrap_err();
    assert_eq!(err.line, 6);
    assert!(err.to_string().contains("no recorded outcome for `b`"));
}

#[test]
fn init_must_cover_every_declared_space() {
    let source = "\
VERSION 1
SPACE a levels=e,g
SPACE f fock=2
INIT a=e
";
    let protocol = parse_clean(source);
    let err = interpret(&protocol, &InterpretOptions::default()).unwrap_err();
    assert_eq!(err.line, 4);
    assert!(err.to_string().contains("INIT must set space `f`"));
}

#[test]
fn declarations_after_init_are_rejected() {
    let source = "\
VERSION 1
SPACE a levels=e,g
INIT a=e
SPACE late dim=2
";
    let protocol = parse_clean(source);
    let err = interpret(&protocol, &InterpretOptions::default()).unwrap_err();
    assert_eq!(err.line, 4);
    assert!(err.to_string().contains("SPACE must come before INIT"));
}

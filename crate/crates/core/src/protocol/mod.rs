//! A small line-oriented script language for composite-system
//! experiments: declare spaces, prepare a state, evolve it, detect,
//! and report reduced-state quantities.
//!
//! [`parse`] turns source text into a [`Protocol`] plus diagnostics,
//! [`unparse`] renders the canonical form, and [`interpret`] executes
//! the instructions and returns report rows.

pub mod interp;
pub mod parse;

pub use interp::{interpret, InterpretOptions, ScriptError};
pub use parse::{
    parse, unparse, Diagnostic, InitSpec, InitValue, Instruction, Located, Protocol, ReportSpec,
    SpaceKind,
};

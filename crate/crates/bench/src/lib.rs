//! Benchmark-only crate; see `benches/simulator.rs`. Kept as a library so
//! `cargo test --workspace` has a target here even though all content
//! lives in the bench harness.

//! Cavity-QED building blocks and the two interference-recovery protocols
//! built from them.

pub mod atom;
pub mod fock;
pub mod garching;
pub mod paris;

pub use atom::{AtomSpace, DetectionRecord};
pub use fock::{coherent_overlap, default_cutoff, required_cutoff, FockSpace};
pub use garching::{garching_protocol, GarchingConfig};
pub use paris::{paris_protocol, ParisConfig};

//! File formats, a seeded noisy channel and report rendering for
//! [`unimod_core`]. The `unimod` binary wires these into a CLI.

pub mod channel;
pub mod format;
pub mod report;

pub use unimod_core as core;

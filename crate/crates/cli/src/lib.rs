//! Library side of the `dimkit` command-line tool: argument helpers, run
//! manifests, and the reproduction suites that exercise every module end to
//! end. The binary in `main.rs` is a thin dispatcher over these.

pub mod manifest;
pub mod refspec;
pub mod repro;

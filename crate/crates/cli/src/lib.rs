//! Library surface of the ccinterp command-line driver; the binary in
//! main.rs is a thin clap wrapper over these modules.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

//! Library side of the `bianchi` command: run configuration, the Hecke matrix
//! cache, report documents and the subcommands.

pub mod cache;
pub mod commands;
pub mod config;
pub mod report;

pub use cache::MatrixCache;
pub use commands::{cmd_cf, cmd_dim, cmd_eigsys, cmd_hecke, cmd_p1, cmd_verify, Outcome};
pub use config::{Format, RunConfig};
pub use report::Report;

use std::fmt;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const MISMATCH: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INTERNAL: i32 = 3;
}

/// A problem with the command line or its arguments.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Exit code for an error that aborted a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use bianchi::Error as E;
    if err.downcast_ref::<Usage>().is_some() {
        return exit::USAGE;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::Parse(_)
            | E::InvalidInput(_)
            | E::PrimeExcluded { .. }
            | E::Torsion(_)
            | E::UnknownFixture(_)
            | E::NotCoprime(..)
            | E::Field(_),
        ) => exit::USAGE,
        _ => exit::INTERNAL,
    }
}

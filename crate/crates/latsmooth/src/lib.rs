//! Basis files, reports, transcripts, a threaded Monte Carlo executor and
//! the command-line front end for `latsmooth-core`.

pub mod basis_io;
pub mod cli;
pub mod executor;
pub mod report;
pub mod transcript_io;

pub use basis_io::{format_basis, parse_basis, ParseError};
pub use executor::ThreadedExecutor;
pub use report::{emit_report, Format, Record, Report};
pub use transcript_io::{parse_transcript, write_transcript};

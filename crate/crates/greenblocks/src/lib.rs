//! File formats, output tables, the verification suite and the command-line
//! front end for [`greenblocks_core`].

pub mod cli;
pub mod error;
pub mod matrix_file;
pub mod table;
pub mod verify;

pub use error::{Error, FormatError};
pub use greenblocks_core as core;

//! Command-line front end for `qufem-core`: configuration files, masks, output formats
//! and the verification suite.

pub mod commands;
pub mod config;
pub mod io;
pub mod verify;

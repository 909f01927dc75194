//! Command-line front end: scenario files, artifacts and the `hypflow` subcommands.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod io;
pub mod summary;
pub mod svg;

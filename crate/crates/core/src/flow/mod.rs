//! Time integration of the nonlocal flow.

pub mod config;
pub mod engine;
pub mod recenter;
pub mod run;

//! Command-line laboratory on top of `shrinker-core`: check orchestration, reports and
//! CSV/JSON/SVG artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod config;
pub mod model_io;
pub mod output;
pub mod report;

/// Bad input; maps to exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

//! Command implementations behind the `satmatch` binary.

pub mod commands;
pub mod error;
pub mod market;
pub mod report;
pub mod verify;

pub use commands::{analyze_market, match_market, Outcome};
pub use error::CliError;
pub use market::{Market, MarketFile};
pub use report::Report;

/// Runs the verification harness; exits 1 if any criterion fails.
pub fn cmd_verify(config: &verify::VerifyConfig) -> Outcome {
    let report = verify::run(config);
    let passed = report.passed;
    Outcome { report: Report::Verify(report), exit_code: if passed { 0 } else { 1 }, emitted: None }
}

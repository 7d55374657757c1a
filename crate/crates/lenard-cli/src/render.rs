//! Output formats and small rendering helpers shared by the subcommands.

use clap::ValueEnum;
use lenard_core::quadrature::Branch;
use lenard_core::Rat;
use serde_json::{json, Value};

use crate::CliError;

/// Expression output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable one-line expressions.
    Plain,
    /// LaTeX source.
    Latex,
    /// Canonical JSON (deterministic: identical invocations are
    /// byte-identical).
    Json,
}

/// Solution output format for `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveOutput {
    /// One JSON document with metadata and sample arrays.
    Json,
    /// CSV with header `x,psi1,psi2,residual1,residual2`.
    Csv,
}

/// Resolve a format flag against the config file (`key`), with a default.
pub fn resolve_format(
    flag: Option<Format>,
    cfg: &crate::FileConfig,
    default: Format,
) -> Result<Format, CliError> {
    resolve_value_enum(flag, cfg, "format", default)
}

/// Resolve the solve output flag against the config file.
pub fn resolve_output(
    flag: Option<SolveOutput>,
    cfg: &crate::FileConfig,
    default: SolveOutput,
) -> Result<SolveOutput, CliError> {
    resolve_value_enum(flag, cfg, "output", default)
}

fn resolve_value_enum<E: ValueEnum>(
    flag: Option<E>,
    cfg: &crate::FileConfig,
    key: &str,
    default: E,
) -> Result<E, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => match cfg.get(key) {
            Some(s) => E::from_str(s, true)
                .map_err(|_| CliError::Usage(format!("config key {key}: bad value {s:?}"))),
            None => Ok(default),
        },
    }
}

/// Canonical rational rendering for JSON payloads and reports.
pub fn rat_str(r: &Rat) -> String {
    r.to_string()
}

/// Print a JSON value in the canonical pretty form used everywhere.
pub fn print_json(value: &Value) {
    println!("{}", render_json(value));
}

/// The canonical textual form of a JSON value (sorted keys come from the
/// underlying map type, so this is deterministic).
pub fn render_json(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON serialization cannot fail")
}

/// JSON form of a solution branch: a tag plus the rate where one exists.
pub fn branch_json(branch: &Branch) -> Value {
    match branch {
        Branch::Linear => json!({ "kind": "linear" }),
        Branch::Oscillatory { rate } => json!({ "kind": "oscillatory", "rate": rate }),
        Branch::Hyperbolic { rate } => json!({ "kind": "hyperbolic", "rate": rate }),
    }
}

/// A domain endpoint for JSON: finite number or null for ±∞.
pub fn endpoint_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_rendering_round_trips_the_rate() {
        let b = Branch::Hyperbolic { rate: 1.5 };
        assert_eq!(branch_json(&b)["kind"], json!("hyperbolic"));
        assert_eq!(branch_json(&b)["rate"], json!(1.5));
        assert_eq!(branch_json(&Branch::Linear)["kind"], json!("linear"));
    }

    #[test]
    fn infinite_endpoints_become_null() {
        assert_eq!(endpoint_json(f64::INFINITY), Value::Null);
        assert_eq!(endpoint_json(2.5), json!(2.5));
    }
}

//! `lenard catalog`: list, show, and re-verify the built-in potentials.

use lenard_core::catalog::{self as core_catalog, CatalogEntry, CatalogError};
use serde_json::{json, Value};

use crate::render::{endpoint_json, print_json, rat_str, resolve_format, Format};
use crate::{CatalogAction, CatalogArgs, CliError, FileConfig};

fn endpoint_str(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn entry_json(entry: &CatalogEntry) -> Value {
    let domain = entry.potential.domain();
    json!({
        "name": entry.name,
        "potential": entry.potential.name(),
        "domain": [endpoint_json(domain.lo), endpoint_json(domain.hi)],
        "membership": entry
            .membership
            .iter()
            .map(|c| {
                json!({
                    "family": c.family,
                    "level": c.level,
                    "kappa": rat_str(&c.kappa),
                    "constants": c.constants.iter().map(rat_str).collect::<Vec<_>>(),
                    "provenance": c.provenance,
                })
            })
            .collect::<Vec<_>>(),
        "notes": entry.notes,
    })
}

fn show_plain(entry: &CatalogEntry) {
    let domain = entry.potential.domain();
    println!("name: {}", entry.name);
    println!("potential: {}", entry.potential.name());
    println!(
        "domain: ({}, {})",
        endpoint_str(domain.lo),
        endpoint_str(domain.hi)
    );
    if entry.membership.is_empty() {
        println!("claims: none");
    } else {
        println!("claims:");
        for c in &entry.membership {
            println!(
                "  - family={} level={} kappa={} constants=[{}]  ({})",
                c.family,
                c.level,
                rat_str(&c.kappa),
                c.constants.iter().map(rat_str).collect::<Vec<_>>().join(", "),
                c.provenance
            );
        }
    }
    if !entry.notes.is_empty() {
        println!("notes: {}", entry.notes);
    }
}

pub fn run(args: &CatalogArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    match &args.action {
        CatalogAction::List => {
            for name in core_catalog::list() {
                println!("{name}");
            }
            Ok(0)
        }
        CatalogAction::Show { name, format } => {
            let entry = core_catalog::get(name).map_err(|e| CliError::Usage(e.to_string()))?;
            match resolve_format(*format, cfg, Format::Plain)? {
                Format::Json => print_json(&entry_json(entry)),
                Format::Plain => show_plain(entry),
                Format::Latex => {
                    return Err(CliError::Usage(
                        "catalog show supports --format plain or json".into(),
                    ))
                }
            }
            Ok(0)
        }
        CatalogAction::Verify { name } => {
            let outcome = match name {
                Some(n) => {
                    let entry =
                        core_catalog::get(n).map_err(|e| CliError::Usage(e.to_string()))?;
                    core_catalog::verify_entry(entry)
                }
                None => core_catalog::verify_all(),
            };
            match outcome {
                Ok(()) => {
                    println!("PASS all membership claims verified");
                    Ok(0)
                }
                Err(e @ CatalogError::ClaimFailed { .. }) => {
                    println!("FAIL {e}");
                    Ok(1)
                }
                Err(e) => Err(CliError::Failed(e.to_string())),
            }
        }
    }
}

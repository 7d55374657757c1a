//! `lenard hierarchy`: print one level of the hierarchy.

use lenard_core::hierarchy::{lenard_f, lenard_u};
use lenard_core::ring::poly_to_json;
use serde_json::json;

use crate::render::{print_json, resolve_format, Format};
use crate::{checked_level, CliError, FileConfig, HierarchyArgs};

pub fn run(args: &HierarchyArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    let level = checked_level(args.level)?;
    let format = resolve_format(args.format, cfg, Format::Plain)?;

    let cached = crate::config::prime_hierarchy_cache();
    let f = lenard_f(level);
    let u = lenard_u(level as i64);
    crate::config::persist_hierarchy_cache(level.max(cached));

    match format {
        Format::Plain => {
            println!("F_{level} = {f}");
            println!("U_{level} = {u}");
        }
        Format::Latex => {
            println!("F_{{{level}}} = {}", f.latex());
            println!("U_{{{level}}} = {}", u.latex());
        }
        Format::Json => print_json(&json!({
            "level": level,
            "f": poly_to_json(&f),
            "u": poly_to_json(&u),
        })),
    }
    Ok(0)
}

//! `lenard constraint`: print the stationary constraint polynomial.

use lenard_core::hierarchy::ConstraintSpec;
use lenard_core::ring::poly_to_json;
use lenard_core::Rat;
use num_traits::Zero;
use serde_json::json;

use crate::render::{print_json, rat_str, resolve_format, Format};
use crate::{checked_level, resolve_rat, resolve_rat_list, CliError, ConstraintArgs, FileConfig};

/// Build a `ConstraintSpec` from resolved flag values, defaulting absent
/// constants to zeros of the right length.
pub fn spec_from_flags(
    level: u32,
    kappa_family: Rat,
    constants: Option<Vec<Rat>>,
) -> Result<ConstraintSpec, CliError> {
    let constants = constants.unwrap_or_else(|| vec![Rat::zero(); level as usize]);
    ConstraintSpec::new(level, kappa_family, constants)
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(args: &ConstraintArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    let level = checked_level(args.level)?;
    let kappa = resolve_rat(&args.kappa, "kappa", cfg, Rat::zero())?;
    let constants = resolve_rat_list(&args.constants, "constants", cfg)?;
    let format = resolve_format(args.format, cfg, Format::Plain)?;
    let spec = spec_from_flags(level, kappa, constants)?;

    let cached = crate::config::prime_hierarchy_cache();
    let g = spec.residual();
    crate::config::persist_hierarchy_cache(level.max(cached));

    match format {
        Format::Plain => println!("G = {g}"),
        Format::Latex => println!("G = {}", g.latex()),
        Format::Json => print_json(&json!({
            "level": spec.level(),
            "kappa": rat_str(spec.kappa()),
            "constants": spec.c().iter().map(rat_str).collect::<Vec<_>>(),
            "constraint": poly_to_json(&g),
        })),
    }
    Ok(0)
}

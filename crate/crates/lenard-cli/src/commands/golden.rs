//! `lenard golden write`: regenerate the golden regression files.
//!
//! The files freeze the flows and densities up to level 5 plus two fixed
//! symmetry operators (order 3 with κ = 0, order 5 with κ = 1), chosen to
//! exercise both registered builders. Continuous integration compares the
//! checked-in copies byte-for-byte; regeneration only happens through an
//! explicit invocation of this command.

use lenard_core::hierarchy::{lenard_f, lenard_u};
use lenard_core::operator::op_to_json;
use lenard_core::ring::{poly_to_json, rat, rat_int};
use lenard_core::Rat;
use num_traits::Zero;
use serde_json::{json, Value};

use super::symmetry::build_symmetry;
use crate::render::{rat_str, render_json};
use crate::{CliError, GoldenAction, GoldenArgs};

/// The two frozen operator fixtures: `(order, κ_com, constants)`.
fn operator_fixtures() -> Vec<(i64, Rat, Vec<Rat>)> {
    vec![
        (3, Rat::zero(), vec![rat(5, 3)]),
        (5, rat_int(1), vec![rat(2, 7), rat_int(-3)]),
    ]
}

/// Compute all golden documents as `(file name, JSON value)` pairs.
pub fn golden_documents() -> Result<Vec<(String, Value)>, CliError> {
    let mut docs = Vec::new();
    for j in 0..=5u32 {
        docs.push((
            format!("f{j}.json"),
            json!({ "kind": "flow", "level": j, "poly": poly_to_json(&lenard_f(j)) }),
        ));
        docs.push((
            format!("u{j}.json"),
            json!({ "kind": "density", "level": j, "poly": poly_to_json(&lenard_u(j as i64)) }),
        ));
    }
    for (order, kappa, constants) in operator_fixtures() {
        let built = build_symmetry(order, kappa.clone(), Some(constants.clone()), None)?;
        docs.push((
            format!("q{order}.json"),
            json!({
                "order": built.sym.order(),
                "kappa": rat_str(&kappa),
                "constants": constants.iter().map(rat_str).collect::<Vec<_>>(),
                "builder": built.builder,
                "q": op_to_json(built.sym.q()),
                "constraint": poly_to_json(built.sym.constraint()),
            }),
        ));
    }
    Ok(docs)
}

pub fn run(args: &GoldenArgs) -> Result<i32, CliError> {
    let GoldenAction::Write { dir } = &args.action;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", dir.display())))?;
    let cached = crate::config::prime_hierarchy_cache();
    let docs = golden_documents()?;
    crate::config::persist_hierarchy_cache(5.max(cached));
    for (name, value) in &docs {
        let path = dir.join(name);
        let mut text = render_json(value);
        text.push('\n');
        std::fs::write(&path, text)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

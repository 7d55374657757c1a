//! `lenard symmetry`: build a higher-order symmetry operator, plus the
//! shared construction used by `verify` and `golden`.

use lenard_core::operator::DiffOperator;
use lenard_core::ring::poly_to_json;
use lenard_core::symmetry::{
    builders, dilation_symmetry, kappa_family, SymmetryError, SymmetryOperator,
};
use lenard_core::{DiffPoly, Rat};
use num_traits::Zero;
use serde_json::json;

use super::{resolve_potential_flag, ResolvedPotential};
use crate::commands::constraint::spec_from_flags;
use crate::render::{print_json, rat_str, resolve_format, Format};
use crate::{checked_order, resolve_rat, resolve_rat_list, CliError, FileConfig, SymmetryArgs};

/// A constructed symmetry operator plus the request that produced it.
pub struct BuiltSymmetry {
    pub sym: SymmetryOperator,
    /// Registered builder that produced the operator.
    pub builder: &'static str,
    pub level: u32,
    /// Commutator κ of `[Q, H] = κH`.
    pub kappa_com: Rat,
    pub constants: Vec<Rat>,
    pub bconstants: Option<Vec<Rat>>,
}

/// Build the order-`2N+1` symmetry operator for the given commutator κ and
/// family constants, walking the registered builders in order and using
/// the first that supports the request.
///
/// Order 1 with κ ≠ 0 is the dilation special case `Q = −κx/2·d + c`
/// (level-0 families carry no hierarchy constants, so the single optional
/// constant is the translation parameter `c`).
pub fn build_symmetry(
    order: i64,
    kappa_com: Rat,
    constants: Option<Vec<Rat>>,
    bconstants: Option<Vec<Rat>>,
) -> Result<BuiltSymmetry, CliError> {
    let level = checked_order(order)?;

    if level == 0 && !kappa_com.is_zero() {
        let c = match &constants {
            None => Rat::zero(),
            Some(v) if v.len() <= 1 => v.first().cloned().unwrap_or_else(Rat::zero),
            Some(v) => {
                return Err(CliError::Usage(format!(
                    "order 1 takes at most one constant (the translation parameter c), got {}",
                    v.len()
                )))
            }
        };
        if bconstants.as_ref().is_some_and(|b| !b.is_empty()) {
            return Err(CliError::Usage(
                "the order-1 scaling symmetry takes no --bconstants".into(),
            ));
        }
        let sym = dilation_symmetry(&kappa_com, &c)
            .map_err(|e| CliError::Failed(format!("dilation construction failed: {e}")))?;
        return Ok(BuiltSymmetry {
            sym,
            builder: "dilation",
            level,
            kappa_com,
            constants: vec![c],
            bconstants: None,
        });
    }

    let mut spec = spec_from_flags(level, kappa_family(level, &kappa_com), constants)?;
    if let Some(b) = &bconstants {
        spec = spec
            .with_b(b.clone())
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut skipped = Vec::new();
    for builder in builders() {
        match builder.build(&spec) {
            Ok(sym) => {
                return Ok(BuiltSymmetry {
                    sym,
                    builder: builder.name(),
                    level,
                    kappa_com,
                    constants: spec.c().to_vec(),
                    bconstants,
                })
            }
            Err(SymmetryError::KappaUnsupported { .. }) => skipped.push(builder.name()),
            Err(e) => {
                return Err(CliError::Failed(format!(
                    "builder {} failed: {e}",
                    builder.name()
                )))
            }
        }
    }
    Err(CliError::Failed(format!(
        "no registered builder supports order {order} with kappa {kappa_com} \
         (skipped: {})",
        skipped.join(", ")
    )))
}

/// [`build_symmetry`] with flags resolved against the config file.
pub fn build_from_flags(
    order: i64,
    kappa: &Option<String>,
    constants: &Option<String>,
    bconstants: &Option<String>,
    cfg: &FileConfig,
) -> Result<BuiltSymmetry, CliError> {
    let kappa_com = resolve_rat(kappa, "kappa", cfg, Rat::zero())?;
    let constants = resolve_rat_list(constants, "constants", cfg)?;
    let bconstants = resolve_rat_list(bconstants, "bconstants", cfg)?;
    build_symmetry(order, kappa_com, constants, bconstants)
}

/// Substitute an exact potential into a jet polynomial, turning it into a
/// pure function of `x`.
pub fn specialize_poly(p: &DiffPoly, v: &DiffPoly) -> DiffPoly {
    DiffOperator::multiplication_by(p.clone()).specialize(v).coeff(0)
}

/// The exact polynomial form of a resolved potential, or a usage error
/// directing the caller to numeric mode.
pub fn ring_form(rp: &ResolvedPotential, context: &str) -> Result<DiffPoly, CliError> {
    rp.potential().as_ring_element().ok_or_else(|| {
        CliError::Usage(format!(
            "potential {:?} has no exact polynomial form; {context}",
            rp.entry().name
        ))
    })
}

pub fn run(args: &SymmetryArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    let format = resolve_format(args.format, cfg, Format::Plain)?;
    let pot = resolve_potential_flag(&args.potential, cfg)?;

    let cached = crate::config::prime_hierarchy_cache();
    let built = build_from_flags(args.order, &args.kappa, &args.constants, &args.bconstants, cfg)?;
    crate::config::persist_hierarchy_cache(built.level.max(cached));

    // With a potential: substitute it into the operator coefficients and
    // the constraint (the latter shows the membership defect directly).
    let specialized = pot
        .as_ref()
        .map(|rp| {
            let v = ring_form(rp, "coefficients can only be specialized on power-sum forms")?;
            Ok::<_, CliError>((
                built.sym.q().specialize(&v),
                specialize_poly(built.sym.constraint(), &v),
                rp.entry().name.clone(),
            ))
        })
        .transpose()?;

    let (q, constraint) = match &specialized {
        Some((q, g, _)) => (q.clone(), g.clone()),
        None => (built.sym.q().clone(), built.sym.constraint().clone()),
    };

    match format {
        Format::Plain => {
            println!("Q = {q}");
            println!("kappa = {}", rat_str(&built.kappa_com));
            println!("G = {constraint}");
        }
        Format::Latex => {
            println!("Q = {}", q.latex());
            println!("\\kappa = {}", rat_str(&built.kappa_com));
            println!("G = {}", constraint.latex());
        }
        Format::Json => {
            let mut doc = json!({
                "order": built.sym.order(),
                "kappa": rat_str(&built.kappa_com),
                "constants": built.constants.iter().map(rat_str).collect::<Vec<_>>(),
                "builder": built.builder,
                "q": lenard_core::operator::op_to_json(&q),
                "constraint": poly_to_json(&constraint),
            });
            if let Some(b) = &built.bconstants {
                doc["bconstants"] = json!(b.iter().map(rat_str).collect::<Vec<_>>());
            }
            if let Some((_, _, name)) = &specialized {
                doc["potential"] = json!(name);
            }
            print_json(&doc);
        }
    }
    Ok(0)
}

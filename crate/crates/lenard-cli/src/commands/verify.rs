//! `lenard verify`: check the commutator identity `[Q, H] = κH`.

use lenard_core::catalog::probe_points;
use lenard_core::numeric::{numeric_commutator_check, standard_test_functions};
use lenard_core::operator::{commutator, DiffOperator};
use lenard_core::symmetry::verify_commutator;

use super::{resolve_potential_flag, symmetry};
use crate::{resolve_tol, CliError, FileConfig, VerifyArgs};

pub fn run(args: &VerifyArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    let tol = resolve_tol(args.tol, cfg, 1e-8)?;
    let pot = resolve_potential_flag(&args.potential, cfg)?;
    let numeric = if args.numeric {
        true
    } else if args.symbolic {
        false
    } else {
        pot.is_some()
    };

    let cached = crate::config::prime_hierarchy_cache();
    let built =
        symmetry::build_from_flags(args.order, &args.kappa, &args.constants, &args.bconstants, cfg)?;
    crate::config::persist_hierarchy_cache(built.level.max(cached));

    if numeric {
        let Some(rp) = &pot else {
            return Err(CliError::Usage(
                "--numeric verification needs --potential".into(),
            ));
        };
        let xs = probe_points(rp.potential());
        let check =
            numeric_commutator_check(&built.sym, rp.potential(), &xs, &standard_test_functions())
                .map_err(|e| CliError::Failed(format!("numeric commutator check failed: {e}")))?;
        return if check.max_residual < tol {
            println!("PASS residual {:.1e}", check.max_residual);
            Ok(0)
        } else {
            println!(
                "FAIL residual {:.1e} (tol {:.1e})",
                check.max_residual, tol
            );
            Ok(1)
        };
    }

    match &pot {
        // Family mode: [Q,H] − κH must reduce to zero modulo the
        // constraint ideal, exactly.
        None => {
            let defect = verify_commutator(&built.sym);
            if defect.is_zero() {
                println!("PASS residual 0 (reduced commutator vanishes exactly)");
                Ok(0)
            } else {
                println!("FAIL reduced commutator defect: {defect}");
                Ok(1)
            }
        }
        // Exact mode on a concrete potential: expand [Q,H] − κH with the
        // potential substituted; no reduction, no tolerance.
        Some(rp) => {
            let v = symmetry::ring_form(rp, "use --numeric instead")?;
            let q = built.sym.q().specialize(&v);
            let h = DiffOperator::schrodinger(&v);
            let defect = &commutator(&q, &h) - &h.scale(&built.kappa_com);
            if defect.is_zero() {
                println!(
                    "PASS residual 0 (exact commutator identity on {})",
                    rp.entry().name
                );
                Ok(0)
            } else {
                println!("FAIL commutator defect: {defect}");
                Ok(1)
            }
        }
    }
}

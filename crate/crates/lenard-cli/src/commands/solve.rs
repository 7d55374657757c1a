//! `lenard solve`: quadrature solution of `Hψ = 0` on an interval.

use std::str::FromStr;

use lenard_core::potential::{Potential, PowerSum};
use lenard_core::quadrature::{
    self, QuadratureError, QuadratureSolution, ScalarFunction, SCHRODINGER_RESIDUAL_TOL,
};
use lenard_core::symmetry::coefficients_a;
use serde_json::json;

use super::{resolve_potential_flag, symmetry::specialize_poly, ResolvedPotential};
use crate::render::{branch_json, print_json, resolve_output, SolveOutput};
use crate::{resolve_tol, CliError, FileConfig, SolveArgs};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Parse an explicit ξ expression: a power sum that is a Laurent
/// polynomial in `x`.
fn parse_xi(expr: &str) -> Result<ScalarFunction, CliError> {
    let sum =
        PowerSum::from_str(expr).map_err(|e| CliError::Usage(format!("--xi: {e}")))?;
    let p = sum.as_ring_element().ok_or_else(|| {
        CliError::Usage(
            "--xi must be a Laurent polynomial in x (shifted negative powers \
             are not supported here)"
                .into(),
        )
    })?;
    ScalarFunction::exact(p).map_err(|e| CliError::Usage(format!("--xi: {e}")))
}

/// Exact automatic ξ: the leading first-order coefficient `a₀` of a
/// commuting membership claim, specialized on the potential's polynomial
/// form. `None` when the potential has no such claim or no such form, or
/// when `a₀` degenerates to zero.
fn exact_auto_xi(rp: &ResolvedPotential) -> Option<(ScalarFunction, String)> {
    let v = rp.potential().as_ring_element()?;
    let claim = rp
        .entry()
        .membership
        .iter()
        .find(|c| c.family == "commuting")?;
    let spec = claim.constraint().ok()?;
    let a = coefficients_a(&spec).ok()?;
    let xi = specialize_poly(a.first()?, &v);
    if xi.is_zero() {
        return None;
    }
    let desc = format!("exact: a_0 = {xi}");
    ScalarFunction::exact(xi).ok().map(|s| (s, desc))
}

/// Numeric automatic ξ: integrate `ξ‴ = 2V′ξ + 4Vξ′` from `(1, 0, 0)` at
/// the interval midpoint.
fn numeric_auto_xi(
    rp: &ResolvedPotential,
    x0: f64,
    x1: f64,
    n: usize,
) -> Result<(ScalarFunction, String), CliError> {
    let xs = linspace(x0, x1, n.max(33));
    let mid = 0.5 * (x0 + x1);
    let xi = quadrature::find_xi(rp.potential(), mid, [1.0, 0.0, 0.0], &xs).map_err(|e| {
        CliError::Failed(format!(
            "could not integrate the symmetry-coefficient equation: {e}"
        ))
    })?;
    Ok((xi, format!("numeric: integrated from (1, 0, 0) at x = {mid}")))
}

fn solve_failed(e: QuadratureError) -> CliError {
    CliError::Failed(format!("quadrature failed: {e}"))
}

pub fn run(args: &SolveArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    let Some(rp) = resolve_potential_flag(&args.potential, cfg)? else {
        return Err(CliError::Usage("--potential is required".into()));
    };
    if !args.x0.is_finite() || !args.x1.is_finite() || args.x0 >= args.x1 {
        return Err(CliError::Usage(format!(
            "need finite --x0 < --x1, got {} and {}",
            args.x0, args.x1
        )));
    }
    let n = match args.samples {
        Some(n) => n,
        None => match cfg.get("samples") {
            Some(s) => s.parse::<usize>().map_err(|e| {
                CliError::Usage(format!("config key samples: bad count {s:?}: {e}"))
            })?,
            None => 201,
        },
    };
    if n < 5 {
        return Err(CliError::Usage(format!("--samples must be at least 5, got {n}")));
    }
    let tol = resolve_tol(args.tol, cfg, SCHRODINGER_RESIDUAL_TOL)?;
    let output = resolve_output(args.output, cfg, SolveOutput::Json)?;
    let interval = (args.x0, args.x1);
    let pot = rp.potential();

    let (solution, xi_desc) = if args.xi == "auto" {
        match exact_auto_xi(&rp) {
            Some((xi, desc)) => {
                match quadrature::solve_with_tol(&xi, pot, interval, n, tol) {
                    Ok(sol) => (sol, desc),
                    // The exact coefficient may vanish inside the window
                    // even when a numerically integrated one does not.
                    Err(QuadratureError::XiVanishes { x }) => {
                        eprintln!(
                            "note: exact symmetry coefficient vanishes at x = {x}; \
                             integrating one numerically instead"
                        );
                        let (xi, desc) = numeric_auto_xi(&rp, args.x0, args.x1, n)?;
                        let sol = quadrature::solve_with_tol(&xi, pot, interval, n, tol)
                            .map_err(solve_failed)?;
                        (sol, desc)
                    }
                    Err(e) => return Err(solve_failed(e)),
                }
            }
            None => {
                let (xi, desc) = numeric_auto_xi(&rp, args.x0, args.x1, n)?;
                let sol = quadrature::solve_with_tol(&xi, pot, interval, n, tol)
                    .map_err(solve_failed)?;
                (sol, desc)
            }
        }
    } else {
        let xi = parse_xi(&args.xi)?;
        let sol =
            quadrature::solve_with_tol(&xi, pot, interval, n, tol).map_err(solve_failed)?;
        (sol, format!("expression: {}", args.xi.trim()))
    };

    emit(&solution, &xi_desc, &rp, output);
    Ok(0)
}

fn emit(sol: &QuadratureSolution, xi_desc: &str, rp: &ResolvedPotential, output: SolveOutput) {
    match output {
        SolveOutput::Csv => {
            println!("x,psi1,psi2,residual1,residual2");
            for i in 0..sol.xs.len() {
                println!(
                    "{},{},{},{},{}",
                    sol.xs[i], sol.psi1[i], sol.psi2[i], sol.residual1[i], sol.residual2[i]
                );
            }
        }
        SolveOutput::Json => print_json(&json!({
            "potential": rp.entry().name,
            "xi": xi_desc,
            "interval": [sol.interval.0, sol.interval.1],
            "alpha": sol.alpha,
            "branch": branch_json(&sol.branch),
            "f": sol.f_description,
            "max_residual": sol.max_residual(),
            "x": sol.xs,
            "psi1": sol.psi1,
            "psi2": sol.psi2,
            "residual1": sol.residual1,
            "residual2": sol.residual2,
        })),
    }
}

//! `lenard check`: test a potential (catalog entry, expression, or CSV
//! samples) against a stationary constraint, directly or by fitting.

use std::path::Path;

use lenard_core::catalog::probe_points;
use lenard_core::numeric::{
    constraint_residual_on_grid, eval_diffpoly, fit_constants, FitResult,
};
use lenard_core::potential::SampledGrid;
use lenard_core::Rat;
use num_traits::{ToPrimitive, Zero};

use super::resolve_potential_flag;
use crate::commands::constraint::spec_from_flags;
use crate::{checked_level, parse_rat, resolve_rat_list, resolve_tol, CheckArgs, CliError, FileConfig};

fn rat_f64(r: &Rat) -> Result<f64, CliError> {
    r.to_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("kappa {r} does not fit in a float")))
}

/// Read a samples CSV: header `x,V` or `x,V,V1,...,Vk`, then float rows.
/// Returns the abscissae and the data columns `V, V′, …` as supplied.
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("cannot read samples file {}: {e}", path.display()))
    })?;
    parse_samples(&text).map_err(|e| {
        CliError::Usage(format!("samples file {}: {e}", path.display()))
    })
}

fn parse_samples(text: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or("empty file")?
        .split(',')
        .map(str::trim)
        .collect();
    if header.len() < 2 || header[0] != "x" || header[1] != "V" {
        return Err(format!(
            "header must be `x,V` or `x,V,V1,...,Vk`, got {:?}",
            header.join(",")
        ));
    }
    for (i, name) in header.iter().enumerate().skip(2) {
        if *name != format!("V{}", i - 1) {
            return Err(format!(
                "derivative column {i} must be named V{}, got {name:?}",
                i - 1
            ));
        }
    }
    let mut xs = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 1];
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(format!(
                "data line {}: expected {} fields, got {}",
                lineno + 2,
                header.len(),
                fields.len()
            ));
        }
        let mut row = Vec::with_capacity(fields.len());
        for f in &fields {
            row.push(
                f.parse::<f64>()
                    .map_err(|e| format!("data line {}: bad float {f:?}: {e}", lineno + 2))?,
            );
        }
        xs.push(row[0]);
        for (c, &v) in cols.iter_mut().zip(&row[1..]) {
            c.push(v);
        }
    }
    Ok((xs, cols))
}

fn report_fit(fit: &FitResult, kappa_fixed: Option<&Rat>, tol: f64) -> i32 {
    for (j, c) in fit.constants.iter().enumerate() {
        println!("C_{j} = {c}");
    }
    match (kappa_fixed, fit.kappa) {
        (Some(k), _) => println!("kappa = {k} (fixed)"),
        (None, Some(k)) => println!("kappa = {k} (fitted)"),
        (None, None) => {}
    }
    println!("residual rms = {:.1e}", fit.residual_rms);
    println!("conditioning = {:.1e}", fit.conditioning);
    if fit.ill_conditioned {
        eprintln!(
            "warning: design matrix is ill-conditioned; the fitted values \
             are not individually trustworthy"
        );
    }
    if fit.residual_rms < tol {
        println!("PASS residual {:.1e}", fit.residual_rms);
        0
    } else {
        println!("FAIL residual {:.1e} (tol {:.1e})", fit.residual_rms, tol);
        1
    }
}

fn report_direct(max: f64, tol: f64) -> i32 {
    if max < tol {
        println!("PASS residual {max:.1e}");
        0
    } else {
        println!("FAIL residual {max:.1e} (tol {tol:.1e})");
        1
    }
}

pub fn run(args: &CheckArgs, cfg: &FileConfig) -> Result<i32, CliError> {
    let level = checked_level(args.level)?;
    let tol = resolve_tol(args.tol, cfg, 1e-8)?;
    let kappa = match args.kappa.as_deref().or_else(|| cfg.get("kappa")) {
        Some(s) => Some(parse_rat("kappa", s)?),
        None => None,
    };
    let constants = resolve_rat_list(&args.constants, "constants", cfg)?;

    let cached = crate::config::prime_hierarchy_cache();
    let code = if let Some(path) = &args.samples {
        // Sampled data: build the grid, finite-differencing any missing
        // derivative columns up to the constraint's top order.
        let (xs, cols) = read_samples(path)?;
        let grid = SampledGrid::new("samples", xs, cols, 2 * level + 1)
            .map_err(CliError::Usage)?;
        if args.fit {
            // Skip the boundary points whose one-sided difference stencils
            // carry a larger error constant.
            let pts = grid.points();
            if pts.len() < 9 {
                return Err(CliError::Usage(
                    "need at least 9 samples to fit on interior points".into(),
                ));
            }
            let interior = pts[2..pts.len() - 2].to_vec();
            let kappa_f = kappa.as_ref().map(rat_f64).transpose()?;
            let fit = fit_constants(level, kappa_f, &grid, &interior)
                .map_err(|e| CliError::Failed(format!("fit failed: {e}")))?;
            report_fit(&fit, kappa.as_ref(), tol)
        } else {
            let spec =
                spec_from_flags(level, kappa.unwrap_or_else(Rat::zero), constants)?;
            let max = constraint_residual_on_grid(&spec, &grid)
                .map_err(|e| CliError::Failed(format!("residual evaluation failed: {e}")))?;
            report_direct(max, tol)
        }
    } else {
        let Some(rp) = resolve_potential_flag(&args.potential, cfg)? else {
            return Err(CliError::Usage("need --potential or --samples".into()));
        };
        let pot = rp.potential();
        let xs = probe_points(pot);
        if args.fit {
            let kappa_f = kappa.as_ref().map(rat_f64).transpose()?;
            let fit = fit_constants(level, kappa_f, pot, &xs)
                .map_err(|e| CliError::Failed(format!("fit failed: {e}")))?;
            report_fit(&fit, kappa.as_ref(), tol)
        } else {
            let spec =
                spec_from_flags(level, kappa.unwrap_or_else(Rat::zero), constants)?;
            let vals = eval_diffpoly(&spec.residual(), pot, &xs)
                .map_err(|e| CliError::Failed(format!("residual evaluation failed: {e}")))?;
            let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            report_direct(max, tol)
        }
    };
    crate::config::persist_hierarchy_cache(level.max(cached));
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parsing_accepts_both_headers() {
        let (xs, cols) = parse_samples("x,V\n0,1\n0.5,2\n1,3\n").unwrap();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        assert_eq!(cols, vec![vec![1.0, 2.0, 3.0]]);
        let (_, cols) =
            parse_samples("x,V,V1,V2\n0,1,0,0\n1,2,1,0\n").unwrap();
        assert_eq!(cols.len(), 3);
        assert_eq!(cols[2], vec![0.0, 0.0]);
    }

    #[test]
    fn csv_parsing_rejects_malformed_input() {
        for bad in [
            "",
            "t,V\n0,1\n",
            "x,V,W\n0,1,2\n",
            "x,V,V2\n0,1,2\n",
            "x,V\n0\n",
            "x,V\n0,one\n",
        ] {
            assert!(parse_samples(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn kappa_conversion_guards_against_overflow() {
        assert_eq!(rat_f64(&Rat::from_integer(3.into())).unwrap(), 3.0);
    }
}

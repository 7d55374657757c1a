//! End-to-end tests of the `lenard` binary: exit codes, output schemas,
//! JSON determinism, config/cache plumbing, and golden-file agreement.

use std::path::Path;
use std::process::{Command, Output};

use lenard_core::operator::op_from_json;
use lenard_core::ring::poly_from_json;

fn lenard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lenard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn lenard_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lenard"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// The residual from a `PASS residual 3.2e-12`-shaped line.
fn residual_of(line: &str) -> f64 {
    line.rsplit(' ')
        .next()
        .and_then(|w| w.parse::<f64>().ok())
        .unwrap_or_else(|| panic!("no residual in {line:?}"))
}

#[test]
fn hierarchy_level_one_plain_matches_frozen_strings() {
    let out = lenard(&["hierarchy", "--level", "1"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("F_1 = 1/8 V''' - 3/4 V V'"), "got {text:?}");
    assert!(text.contains("U_1 = 1/8 V'' - 3/8 V^2"), "got {text:?}");
}

#[test]
fn negative_level_is_a_usage_error() {
    let out = lenard(&["hierarchy", "--level", "-1"]);
    assert_eq!(code_of(&out), 2);
    assert!(stdout_of(&out).is_empty());
    assert!(stderr_of(&out).contains("nonnegative"));
}

#[test]
fn more_usage_errors_exit_two_before_computing() {
    for args in [
        &["verify", "--order", "4"][..],
        &["symmetry", "--order", "3", "--constants", "1,2"][..],
        &["solve", "--xi", "x", "--x0", "1", "--x1", "0.5", "--potential", "conformal"][..],
        &["solve", "--xi", "(x+1)^-1", "--x0", "0.5", "--x1", "4", "--potential", "conformal"][..],
        &["check", "--level", "1", "--fit"][..],
        &["verify", "--order", "3", "--numeric"][..],
        &["hierarchy", "--level", "1", "--format", "yaml"][..],
        &["hierarchy"][..],
    ] {
        let out = lenard(args);
        assert_eq!(code_of(&out), 2, "args {args:?}: {}", stderr_of(&out));
        assert!(!stderr_of(&out).is_empty(), "args {args:?}");
    }
}

#[test]
fn json_output_is_bit_identical_and_round_trips() {
    let a = lenard(&["hierarchy", "--level", "3", "--format", "json"]);
    let b = lenard(&["hierarchy", "--level", "3", "--format", "json"]);
    assert_eq!(code_of(&a), 0);
    assert_eq!(a.stdout, b.stdout, "identical invocations must be byte-identical");
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&a)).unwrap();
    assert_eq!(doc["level"], 3);
    let f = poly_from_json(&doc["f"]).unwrap();
    let u = poly_from_json(&doc["u"]).unwrap();
    assert_eq!(f, lenard_core::hierarchy::lenard_f(3));
    assert_eq!(u, lenard_core::hierarchy::lenard_u(3));
}

#[test]
fn verify_example_passes_on_conformal() {
    let out = lenard(&[
        "verify", "--order", "3", "--kappa", "-1", "--potential", "conformal", "--numeric",
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let line = stdout_of(&out);
    assert!(line.starts_with("PASS residual "), "got {line:?}");
    assert!(residual_of(line.trim()) < 1e-8);
}

#[test]
fn verify_fails_on_the_mirror_potential() {
    let numeric = lenard(&[
        "verify", "--order", "3", "--kappa", "-1", "--potential", "conformal-mirror", "--numeric",
    ]);
    assert_eq!(code_of(&numeric), 1);
    assert!(stdout_of(&numeric).starts_with("FAIL"));
    // The exact mode pins the defect operator itself.
    let symbolic = lenard(&[
        "verify", "--order", "3", "--kappa", "-1", "--potential", "conformal-mirror", "--symbolic",
    ]);
    assert_eq!(code_of(&symbolic), 1);
    assert!(stdout_of(&symbolic).contains("24 x^-5"), "got {}", stdout_of(&symbolic));
}

#[test]
fn symbolic_verify_reduces_family_commutators() {
    for args in [
        &["verify", "--order", "3", "--symbolic"][..],
        &["verify", "--order", "3", "--constants", "5/3", "--symbolic"][..],
        &["verify", "--order", "5", "--constants", "1/3,-2", "--symbolic"][..],
        &["verify", "--order", "5", "--kappa", "1", "--constants", "2/7,-3", "--symbolic"][..],
    ] {
        let out = lenard(args);
        assert_eq!(code_of(&out), 0, "args {args:?}: {}", stderr_of(&out));
        assert!(stdout_of(&out).starts_with("PASS residual 0"), "args {args:?}");
    }
}

#[test]
fn solve_emits_the_documented_csv_schema() {
    let out = lenard(&[
        "solve", "--potential", "conformal", "--xi", "x", "--x0", "0.5", "--x1", "4",
        "--output", "csv",
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,psi1,psi2,residual1,residual2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 201, "default sample count");
    let mut max_psi = 0.0f64;
    let mut max_res = 0.0f64;
    for row in &rows {
        assert_eq!(row.len(), 5);
        max_psi = max_psi.max(row[1].abs()).max(row[2].abs());
        max_res = max_res.max(row[3].abs()).max(row[4].abs());
    }
    assert!(max_res < 1e-8 * (1.0 + max_psi), "residuals {max_res:.3e}");
    // ξ = x splits the grid as x_i = 0.5 + 3.5 i/200.
    assert!((rows[0][0] - 0.5).abs() < 1e-12 && (rows[200][0] - 4.0).abs() < 1e-12);
}

#[test]
fn solve_auto_picks_the_exact_route_on_conformal() {
    let out = lenard(&[
        "solve", "--potential", "conformal", "--xi", "auto", "--x0", "0.5", "--x1", "4",
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["branch"]["kind"], "linear");
    assert!(doc["alpha"].as_f64().unwrap().abs() < 1e-12);
    assert!(doc["xi"].as_str().unwrap().starts_with("exact: a_0"));
    assert!(doc["max_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(doc["x"].as_array().unwrap().len(), 201);
}

#[test]
fn solve_auto_falls_back_to_numeric_for_sampled_potentials() {
    let out = lenard(&[
        "solve", "--potential", "soliton1", "--xi", "auto", "--x0", "-1", "--x1", "1",
        "--samples", "101",
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(doc["xi"].as_str().unwrap().starts_with("numeric:"));
    // ξξ'' − ξ'²/2 − 2Vξ² at the initial data (1,0,0) with V(0) = −2 is 4,
    // so the separation constant is 4/2 = 2: oscillatory at rate √2.
    assert!((doc["alpha"].as_f64().unwrap() - 2.0).abs() < 1e-7);
    assert_eq!(doc["branch"]["kind"], "oscillatory");
    let rate = doc["branch"]["rate"].as_f64().unwrap();
    assert!((rate - 2.0f64.sqrt()).abs() < 1e-7);
}

#[test]
fn solve_refuses_a_vanishing_xi() {
    let out = lenard(&[
        "solve", "--potential", "conformal", "--xi", "1-x", "--x0", "0.5", "--x1", "4",
    ]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("vanishes"), "got {}", stderr_of(&out));
}

#[test]
fn check_fits_constants_from_csv_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("soliton.csv");
    // Exact derivative columns from the catalog potential.
    let pot = &lenard_core::catalog::get("soliton1").unwrap().potential;
    let mut text = String::from("x,V,V1,V2,V3\n");
    let n = 241;
    for i in 0..n {
        let x = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
        let jet = pot.jet(x, 3).unwrap();
        text.push_str(&format!("{x},{},{},{},{}\n", jet[0], jet[1], jet[2], jet[3]));
    }
    std::fs::write(&path, text).unwrap();

    let out = lenard(&[
        "check", "--samples", path.to_str().unwrap(), "--level", "1", "--kappa", "0", "--fit",
    ]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let c0_line = text.lines().find(|l| l.starts_with("C_0 = ")).unwrap();
    let c0: f64 = c0_line.trim_start_matches("C_0 = ").parse().unwrap();
    assert!((c0 - 1.0).abs() < 1e-6, "fitted C_0 = {c0}");
    assert!(text.lines().any(|l| l.starts_with("PASS residual ")));

    // The same file read directly with the claimed constants.
    let direct = lenard(&[
        "check", "--samples", path.to_str().unwrap(), "--level", "1", "--kappa", "0",
        "--constants", "1",
    ]);
    assert_eq!(code_of(&direct), 0, "stderr: {}", stderr_of(&direct));
}

#[test]
fn check_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "x,W\n0,1\n1,2\n").unwrap();
    let out = lenard(&["check", "--samples", path.to_str().unwrap(), "--level", "1"]);
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("header"));
}

#[test]
fn check_passes_and_fails_on_catalog_fixtures() {
    let pass = lenard(&[
        "check", "--potential", "conformal", "--level", "1", "--kappa", "-1", "--tol", "1e-12",
    ]);
    assert_eq!(code_of(&pass), 0);
    assert!(residual_of(stdout_of(&pass).trim()) < 1e-12);
    let fail = lenard(&["check", "--potential", "conformal-mirror", "--level", "1", "--kappa", "-1"]);
    assert_eq!(code_of(&fail), 1);
    assert!(stdout_of(&fail).starts_with("FAIL"));
}

#[test]
fn catalog_list_show_and_verify() {
    let list = lenard(&["catalog", "list"]);
    assert_eq!(code_of(&list), 0);
    let listing = stdout_of(&list);
    let names: Vec<&str> = listing.lines().map(str::trim).collect();
    assert_eq!(
        names,
        ["zero", "constant", "soliton1", "soliton1-mirror", "conformal",
         "conformal-mirror", "conformal-shifted", "oscillator-centrifugal"],
        "manifest order"
    );

    let show = lenard(&["catalog", "show", "conformal", "--format", "json"]);
    assert_eq!(code_of(&show), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&show)).unwrap();
    assert_eq!(doc["name"], "conformal");
    assert_eq!(doc["domain"][0], 0.0);
    assert!(!doc["membership"].as_array().unwrap().is_empty());

    let unknown = lenard(&["catalog", "show", "nonesuch"]);
    assert_eq!(code_of(&unknown), 2);

    let verify = lenard(&["catalog", "verify"]);
    assert_eq!(code_of(&verify), 0);
    assert!(stdout_of(&verify).starts_with("PASS"));
}

#[test]
fn symmetry_output_parses_in_every_format() {
    let plain = lenard(&["symmetry", "--order", "3", "--kappa", "0", "--constants", "1"]);
    assert_eq!(code_of(&plain), 0);
    let text = stdout_of(&plain);
    assert!(text.lines().next().unwrap().starts_with("Q = d^3"), "got {text}");
    assert!(text.lines().any(|l| l.starts_with("G = ")));

    let json = lenard(&[
        "symmetry", "--order", "3", "--kappa", "0", "--constants", "1", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&json)).unwrap();
    assert_eq!(doc["order"], 3);
    assert_eq!(doc["builder"], "eps-elimination");
    let q = op_from_json(&doc["q"]).unwrap();
    assert_eq!(q.order(), Some(3));

    let latex = lenard(&[
        "symmetry", "--order", "3", "--kappa", "-1", "--potential", "conformal",
        "--format", "latex",
    ]);
    assert_eq!(code_of(&latex), 0);
    assert!(stdout_of(&latex).contains("\\frac{d^{3}}{dx^{3}}"));
}

#[test]
fn golden_files_match_the_checked_in_copies() {
    let dir = tempfile::tempdir().unwrap();
    let out = lenard(&["golden", "write", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(code_of(&out), 0, "stderr: {}", stderr_of(&out));
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut compared = 0;
    for entry in std::fs::read_dir(&golden_dir).unwrap() {
        let name = entry.unwrap().file_name();
        let stored = std::fs::read(golden_dir.join(&name)).unwrap();
        let fresh = std::fs::read(dir.path().join(&name))
            .unwrap_or_else(|_| panic!("missing regenerated {name:?}"));
        assert_eq!(
            stored, fresh,
            "{name:?} drifted; regenerate explicitly with `lenard golden write` \
             only when a change is intended"
        );
        compared += 1;
    }
    assert_eq!(compared, 14, "flows/densities 0..=5 plus q3, q5");
}

#[test]
fn config_file_supplies_defaults_and_argv_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lenard.conf");
    std::fs::write(&cfg, "# defaults\nformat = json\n").unwrap();
    let json = lenard(&["hierarchy", "--level", "0", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code_of(&json), 0);
    assert!(stdout_of(&json).starts_with('{'), "config format applies");
    let plain = lenard(&[
        "hierarchy", "--level", "0", "--config", cfg.to_str().unwrap(), "--format", "plain",
    ]);
    assert!(stdout_of(&plain).starts_with("F_0"), "argv overrides config");

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "level = 3\n").unwrap();
    let rejected = lenard(&["hierarchy", "--level", "0", "--config", bad.to_str().unwrap()]);
    assert_eq!(code_of(&rejected), 2);
}

#[test]
fn cache_env_persists_validates_and_never_shrinks() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let first = lenard_env(&["hierarchy", "--level", "3"], &[("LENARD_CACHE_DIR", cache)]);
    assert_eq!(code_of(&first), 0);
    let cache_file = dir.path().join("hierarchy.json");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cache_file).unwrap()).unwrap();
    assert_eq!(doc["f"].as_array().unwrap().len(), 4, "flows 0..=3");

    // A lower-level run must not shrink the cache.
    let second = lenard_env(&["hierarchy", "--level", "1"], &[("LENARD_CACHE_DIR", cache)]);
    assert_eq!(code_of(&second), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cache_file).unwrap()).unwrap();
    assert_eq!(doc["f"].as_array().unwrap().len(), 4);

    // A corrupt cache is reported, ignored, and rebuilt — never trusted.
    std::fs::write(&cache_file, "{\"u\": [], \"f\": []}").unwrap();
    let third = lenard_env(&["hierarchy", "--level", "2"], &[("LENARD_CACHE_DIR", cache)]);
    assert_eq!(code_of(&third), 0);
    assert!(stderr_of(&third).contains("ignoring hierarchy cache"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cache_file).unwrap()).unwrap();
    assert_eq!(doc["f"].as_array().unwrap().len(), 3, "rebuilt up to level 2");
}

#[test]
fn inline_power_sum_potentials_work_everywhere() {
    let check = lenard(&["check", "--potential", "2*x^-2", "--level", "1", "--kappa", "-1"]);
    assert_eq!(code_of(&check), 0, "stderr: {}", stderr_of(&check));
    let verify = lenard(&["verify", "--order", "3", "--potential", "2*x^-2", "--symbolic"]);
    // κ defaults to 0 and C₀ to 0; 2/x² is a member of that family too.
    assert_eq!(code_of(&verify), 0, "stderr: {}", stderr_of(&verify));
    assert!(stdout_of(&verify).starts_with("PASS residual 0"));
}

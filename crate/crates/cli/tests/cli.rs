use std::process::{Command, Output};

fn poly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn normalize_swap_twice() {
    let o = poly(&[
        "normalize",
        "--theory",
        "rds.poly",
        "--circuit",
        "tau ; tau",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("normal form: id(2)"));
}

#[test]
fn normalize_out_of_fuel() {
    let o = poly(&[
        "normalize",
        "--theory",
        "rds",
        "--circuit",
        "tau ; tau ; tau ; tau",
        "--fuel",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_circuit_reports_location() {
    let o = poly(&["normalize", "--theory", "rds", "--circuit", "tau ; (tau"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1, column"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    let o = poly(&["normalize", "--circuit", "tau", "--strategy", "random"]);
    assert_eq!(o.status.code(), Some(1));
    let o = poly(&["normalize", "--circuit", "tau", "--fuel", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn random_strategy_logs_seed() {
    let o = poly(&[
        "normalize",
        "--circuit",
        "delta ; tau",
        "--strategy",
        "random",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("seed: 7"));
    assert!(out.contains("normal form: delta"));
}

#[test]
fn check_term_exit_codes() {
    let certified = poly(&[
        "check-term",
        "--theory",
        "rds",
        "--interp",
        "f1",
        "--interp",
        "g",
    ]);
    assert_eq!(certified.status.code(), Some(0), "{}", stderr(&certified));
    let lz2 = poly(&["check-term", "--theory", "lz2", "--interp", "lz2"]);
    assert_eq!(lz2.status.code(), Some(0), "{}", stderr(&lz2));
    for trs in ["r1.trs", "r2.trs"] {
        let o = poly(&[
            "check-term",
            "--trs",
            trs,
            "--interp",
            "f1",
            "--interp",
            "g",
        ]);
        assert_eq!(o.status.code(), Some(3));
        assert!(stdout(&o).contains("Phi(C)"));
    }
}

#[test]
fn check_term_json_certificate() {
    let o = poly(&[
        "check-term",
        "--theory",
        "rds",
        "--interp",
        "f1",
        "--interp",
        "g",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified"], true);
    let entries = v["certificate"]["entries"].as_array().unwrap();
    let alpha = entries.iter().find(|e| e["rule"] == "alpha").unwrap();
    assert_eq!(alpha["layer"], 2);
    assert!(entries
        .iter()
        .filter(|e| e["rule"] != "alpha")
        .all(|e| e["layer"] == 1));
}

#[test]
fn unknown_interpretation_is_an_error() {
    let o = poly(&["check-term", "--theory", "rds", "--interp", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn translate_lists_provenance_and_round_trips() {
    let o = poly(&["translate", "--trs", "r2.trs"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for r in ["A", "L", "R", "C", "S"] {
        assert!(out.contains(&format!("# Phi({r}): Phi(R) from {r}")), "{r}");
    }
    assert!(out.contains("not left-linear"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r2c.poly");
    std::fs::write(&path, &out).unwrap();
    let again = poly(&["translate", "--trs", "r2.trs", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    let reparsed =
        poly_core::rewrite::parse_polygraph(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(
        poly_core::rewrite::write_polygraph(&reparsed),
        v["polygraph"].as_str().unwrap()
    );
    let o = poly(&[
        "check-term",
        "--theory",
        path.to_str().unwrap(),
        "--interp",
        "f1",
        "--interp",
        "g",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn commutation_alone_runs_out_of_fuel() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.trs");
    std::fs::write(&path, "op mu : 2 -> 1\nC: mu(x1,x2) => mu(x2,x1)\n").unwrap();
    let o = poly(&[
        "normalize",
        "--trs",
        path.to_str().unwrap(),
        "--circuit",
        "mu",
        "--fuel",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn semantics_of_counit() {
    let o = poly(&["semantics", "--circuit", "delta ; (epsilon * id(1))"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[1] -> [1]: 1->1 (identity)"));
    let o = poly(&[
        "semantics",
        "--theory",
        "lz2",
        "--circuit",
        "kappa",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["gf2"], "[11 10]");
}

#[test]
fn cps_on_resource_rules() {
    let o = poly(&[
        "cps",
        "--theory",
        "rds.poly",
        "--max-nodes",
        "6",
        "--fuel",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("critical pairs joined"));
}

#[test]
fn verify_preset_reports() {
    let o = poly(&["verify-preset", "R1c"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not certified by [f1, g] (expected): Phi(A), Phi(C)"));
    let o = poly(&["verify-preset", "nothing"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn interpretation_files_are_accepted() {
    let rds = poly_core::load_preset("RDS").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["check-term".to_string(), "--theory".into(), "rds".into()];
    for (k, layer) in rds.layers.iter().enumerate() {
        let path = dir.path().join(format!("layer{k}.interp"));
        std::fs::write(&path, layer.write()).unwrap();
        args.push("--interp".into());
        args.push(path.to_str().unwrap().into());
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = poly(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = poly(&["check-term", "--theory", "rds", "--interp", args[4]]);
    assert_eq!(o.status.code(), Some(3), "f1 alone leaves alpha unplaced");
}

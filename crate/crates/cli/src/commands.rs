use poly_core::heat::{layered_termination, TerminationFailure};
use poly_core::presets::{gf2_semantics, verify_loaded, VerifyOptions};
use poly_core::rewrite::{check_local_confluence, critical_pairs, write_polygraph, PairStatus};
use poly_core::term::{finset_semantics, project_pi};
use poly_core::translate::{DELTA, EPSILON, TAU};
use poly_core::{load_preset, normalize as run_normalize, Strategy};
use serde_json::json;

use crate::load::{self, Error};
use crate::{Status, TheoryArgs};

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("values serialize")
    );
}

pub fn normalize(
    args: &TheoryArgs,
    text: &str,
    fuel: usize,
    strategy: Strategy,
    json: bool,
) -> Result<Status, Error> {
    let theory = load::theory(args)?;
    let c = theory.polygraph.circuit(text)?;
    let trace = run_normalize(&theory.polygraph, &c, fuel, strategy);
    let report = trace.report();
    if json {
        print_json(&json!({ "strategy": strategy, "fuel": fuel, "trace": report }));
    } else {
        if let Strategy::Random(seed) = strategy {
            println!("seed: {seed}");
        }
        println!("start: {}", report.start);
        for (k, s) in report.steps.iter().enumerate() {
            println!("{:>4}. {:<20} {}", k + 1, s.rule, s.result);
        }
        if trace.is_normal() {
            println!("normal form: {}", report.result);
        } else {
            println!(
                "fuel exhausted after {} steps: {}",
                report.steps.len(),
                report.result
            );
        }
    }
    Ok(if trace.is_normal() {
        Status::Ok
    } else {
        Status::FuelExhausted
    })
}

pub fn translate(trs: &str, json: bool) -> Result<Status, Error> {
    let theory = load::theory(&TheoryArgs {
        theory: None,
        trs: Some(trs.to_string()),
    })?;
    let tr = theory
        .translation
        .expect("term systems always carry a translation");
    let text = write_polygraph(&tr.polygraph);
    if json {
        print_json(&json!({ "polygraph": text, "manifest": tr.manifest }));
    } else {
        for m in &tr.manifest {
            let source = m
                .source
                .as_deref()
                .map(|s| format!(" from {s}"))
                .unwrap_or_default();
            let linear = match m.left_linear {
                Some(true) => ", left-linear",
                Some(false) => ", not left-linear",
                None => "",
            };
            println!(
                "# {}: {}{source}{linear}",
                m.rule,
                serde_json::to_value(m.provenance)?.as_str().unwrap_or("?")
            );
        }
        print!("{text}");
    }
    Ok(Status::Ok)
}

pub fn check_term(args: &TheoryArgs, interp: &[String], json: bool) -> Result<Status, Error> {
    let theory = load::theory(args)?;
    let layers = load::layers(&theory, interp)?;
    let result = layered_termination(&theory.polygraph, &layers);
    if json {
        let value = match &result {
            Ok(cert) => json!({ "certified": true, "certificate": cert }),
            Err(failure) => json!({ "certified": false, "failure": failure }),
        };
        print_json(&value);
    }
    match result {
        Ok(cert) => {
            if !json {
                println!("certified by [{}]", cert.layers.join(", "));
                for e in &cert.entries {
                    let layer = e.layer.expect("certified rules have a layer");
                    println!(
                        "  {:<24} layer {layer} ({})",
                        e.rule,
                        cert.layers[layer - 1]
                    );
                }
            }
            Ok(Status::Ok)
        }
        Err(TerminationFailure::Interpretation { message }) => Err(message.into()),
        Err(TerminationFailure::Rules {
            offending, entries, ..
        }) => {
            if !json {
                println!("not certified; offending rules: {}", offending.join(", "));
                for e in entries.iter().filter(|e| e.layer.is_none()) {
                    for v in &e.verdicts {
                        println!(
                            "  {:<24} {}: {:?}, heat {} vs {}",
                            e.rule, v.interpretation, v.verdict, v.lhs_heat, v.rhs_heat
                        );
                    }
                }
            }
            Ok(Status::NotCertified)
        }
    }
}

pub fn cps(args: &TheoryArgs, max_nodes: usize, fuel: usize, json: bool) -> Result<Status, Error> {
    let theory = load::theory(args)?;
    let pairs = critical_pairs(&theory.polygraph, max_nodes);
    let report = check_local_confluence(&theory.polygraph, &pairs, fuel);
    if json {
        print_json(&json!({ "max_nodes": max_nodes, "fuel": fuel, "report": report }));
    } else {
        for p in &report.pairs {
            let status = match p.status {
                PairStatus::Joinable => "joined",
                PairStatus::NotJoinedWithinFuel => "NOT JOINED",
            };
            println!(
                "{:>4}. {} / {} on {}: {status}",
                p.index + 1,
                p.left_rule,
                p.right_rule,
                p.source
            );
            if p.status != PairStatus::Joinable {
                println!("      {} vs {}", p.left_normal, p.right_normal);
            }
        }
        let joined = report
            .pairs
            .iter()
            .filter(|p| p.status == PairStatus::Joinable)
            .count();
        println!(
            "{joined}/{} critical pairs joined (max {max_nodes} nodes, fuel {fuel})",
            report.pairs.len()
        );
    }
    Ok(if report.all_joinable {
        Status::Ok
    } else {
        Status::NotCertified
    })
}

pub fn semantics(args: &TheoryArgs, text: &str, json: bool) -> Result<Status, Error> {
    let theory = load::theory(args)?;
    let c = theory.polygraph.circuit(text)?;
    let pi = project_pi(&c).ok();
    let finset = if c.uses_only(&[TAU, DELTA, EPSILON]) {
        Some(finset_semantics(&c)?)
    } else {
        None
    };
    let linear = if theory.polygraph.signature().contains("kappa") {
        Some(gf2_semantics(&c)?)
    } else {
        None
    };
    if pi.is_none() && finset.is_none() && linear.is_none() {
        return Err(format!("no semantics applies to `{text}`").into());
    }
    if json {
        print_json(&json!({
            "circuit": c.to_expr(),
            "pi": pi.as_ref().map(|p| p.to_string()),
            "finset": finset.as_ref().map(|f| json!({ "function": f, "identity": f.is_identity() })),
            "gf2": linear.as_ref().map(|m| m.to_string()),
        }));
    } else {
        println!("circuit: {}", c.to_expr());
        if let Some(p) = &pi {
            println!("pi:      {p}");
        }
        if let Some(f) = &finset {
            println!(
                "finset:  {f}{}",
                if f.is_identity() { " (identity)" } else { "" }
            );
        }
        if let Some(m) = &linear {
            println!("gf2:     {m}");
        }
    }
    Ok(Status::Ok)
}

pub fn verify_preset(
    name: &str,
    max_nodes: usize,
    fuel: usize,
    seed: u64,
    json: bool,
) -> Result<Status, Error> {
    let preset = load_preset(name)?;
    let opts = VerifyOptions {
        max_nodes,
        fuel,
        seed,
        ..VerifyOptions::default()
    };
    let report = verify_loaded(&preset, &opts)?;
    if json {
        print_json(&json!({ "report": report, "passed": report.passed() }));
    } else {
        println!("{} (seed {seed})", report.preset);
        for c in &report.checks {
            println!(
                "  [{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.check,
                c.detail
            );
        }
    }
    Ok(if report.passed() {
        Status::Ok
    } else {
        Status::NotCertified
    })
}

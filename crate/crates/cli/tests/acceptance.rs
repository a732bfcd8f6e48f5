//! One check per acceptance criterion; each prints a single pass/fail line.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use poly_core::circuit::random::random_circuit;
use poly_core::heat::sampled::{sample_polygraph, LongestPath};
use poly_core::heat::{
    check_rule, compare_multiset, f1, g, layered_termination, lz2, Cmp, Heat, MultisetExpr, Poly,
    RuleVerdict,
};
use poly_core::presets::{check_compatibility, Duality};
use poly_core::rewrite::{check_local_confluence, critical_pairs};
use poly_core::term::{apply_rule_at, finset_semantics, project_pi, term_universe, TermFamily};
use poly_core::translate::{resource_signature, simulate_step, DELTA, EPSILON, TAU};
use poly_core::{load_preset, normalize, Circuit, Polygraph, Signature, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn c(n: i128) -> Poly {
    Poly::constant(n)
}

fn d(i: usize) -> Poly {
    Poly::down(i)
}

fn u(i: usize) -> Poly {
    Poly::up(i)
}

fn multiset_chain() -> Outcome {
    let start = Instant::now();
    let cfg = f1(&resource_signature())
        .map_err(|e| e.to_string())?
        .config()
        .to_owned();
    let chain = [
        MultisetExpr::zero(),
        MultisetExpr::ul(c(1)).scale(&c(127)),
        MultisetExpr::ul(c(2)),
        MultisetExpr::ul(c(1))
            .scale(&c(4))
            .add(&MultisetExpr::ul(c(3)).scale(&c(2))),
        MultisetExpr::ul(c(4)),
    ];
    for w in chain.windows(2) {
        let verdict = compare_multiset(&w[1], &w[0], &cfg);
        ensure(verdict == Cmp::Gt, || {
            format!("{} > {} gave {verdict:?}", w[1], w[0])
        })?;
        ensure(compare_multiset(&w[0], &w[1], &cfg) != Cmp::Gt, || {
            "order is not strict".into()
        })?;
    }
    within(start, Duration::from_secs(1))?;
    Ok("0 < 127ul(1) < ul(2) < 4ul(1)+2ul(3) < ul(4)".into())
}

fn rds() -> Result<poly_core::Preset, String> {
    load_preset("RDS").map_err(|e| e.to_string())
}

fn coassociativity() -> Outcome {
    let p = rds()?;
    let it = f1(p.polygraph.signature()).map_err(|e| e.to_string())?;
    let rule = p.polygraph.rule("coassoc").ok_or("no coassoc rule")?;
    let expect = p
        .polygraph
        .circuit("delta ; (id(1) * delta)")
        .map_err(|e| e.to_string())?;
    ensure(rule.lhs().equivalent(&expect), || {
        "coassoc LHS is not (1⊗δ)∘δ".into()
    })?;
    let check = check_rule(&it, rule).map_err(|e| e.to_string())?;
    ensure(check.verdict == RuleVerdict::Strict, || {
        format!("verdict {:?}", check.verdict)
    })?;
    let con = &check.lhs.con;
    ensure(
        con.len() == 1 && con[0] == u(0) + u(1) + u(2) + c(2),
        || format!("LHS contravariant {con:?}"),
    )?;
    Ok(format!(
        "Strict, LHS contravariant {}",
        check.lhs.display_named()
    ))
}

fn alpha_layering() -> Outcome {
    let p = rds()?;
    let sig = p.polygraph.signature();
    let rule = p.polygraph.rule("alpha").ok_or("no alpha rule")?;
    let in_f1 =
        check_rule(&f1(sig).map_err(|e| e.to_string())?, rule).map_err(|e| e.to_string())?;
    ensure(in_f1.verdict == RuleVerdict::Invariant, || {
        format!("F1 verdict {:?}", in_f1.verdict)
    })?;
    let in_g = check_rule(&g(sig).map_err(|e| e.to_string())?, rule).map_err(|e| e.to_string())?;
    ensure(in_g.verdict == RuleVerdict::Strict, || {
        format!("G verdict {:?}", in_g.verdict)
    })?;
    let sum = (d(0) + d(1) + d(2)).scale(2);
    ensure(in_g.lhs.heat == Heat::Nat(&sum + &c(2)), || {
        format!("G LHS heat {}", in_g.lhs.heat)
    })?;
    ensure(in_g.rhs.heat == Heat::Nat(&sum + &c(1)), || {
        format!("G RHS heat {}", in_g.rhs.heat)
    })?;
    Ok("Invariant under F1; Strict under G with heats 2i+2j+2k+2 > 2i+2j+2k+1".into())
}

fn layered_certificate() -> Outcome {
    let start = Instant::now();
    let p = rds()?;
    let sig = p.polygraph.signature();
    let layers = [
        f1(sig).map_err(|e| e.to_string())?,
        g(sig).map_err(|e| e.to_string())?,
    ];
    let cert = layered_termination(&p.polygraph, &layers).map_err(|e| format!("{e:?}"))?;
    for e in &cert.entries {
        let want = if e.rule == "alpha" { 2 } else { 1 };
        ensure(e.layer == Some(want), || {
            format!("{} placed in {:?}", e.rule, e.layer)
        })?;
        if e.rule == "alpha" {
            ensure(e.verdicts[0].verdict == RuleVerdict::Invariant, || {
                "alpha not invariant under F1".into()
            })?;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "{} rules certified, alpha in layer 2",
        cert.entries.len()
    ))
}

fn linear_polygraph() -> Outcome {
    let p = load_preset("LZ2").map_err(|e| e.to_string())?;
    let it = lz2();
    let cov = |text: &str| -> Result<Vec<Poly>, String> {
        let circuit = p.polygraph.circuit(text).map_err(|e| e.to_string())?;
        Ok(it.interpret(&circuit).map_err(|e| e.to_string())?.cov)
    };
    let lhs = cov("kappa ; kappa")?;
    ensure(lhs == vec![d(0).scale(2) + d(1), d(0) + d(1)], || {
        format!("κ∘κ covariant {lhs:?}")
    })?;
    let rhs = cov("(id(1) * delta) ; (tau * id(1)) ; (id(1) * mu)")?;
    ensure(rhs == vec![d(0) + d(1), d(0) + d(1)], || {
        format!("RHS covariant {rhs:?}")
    })?;
    for rule in p.polygraph.rules() {
        let v = check_rule(&it, rule).map_err(|e| e.to_string())?.verdict;
        ensure(v == RuleVerdict::Strict, || {
            format!("{} is {v:?}", rule.name())
        })?;
    }
    let duality = Duality::lz2();
    check_compatibility(&it, &duality).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..200 {
        let circuit = random_circuit(p.polygraph.signature(), k % 3, 1 + k % 10, 4, &mut rng);
        let dual = duality.dualize(&circuit).map_err(|e| e.to_string())?;
        let (a, b) = (
            it.interpret(&dual),
            it.interpret(&circuit).map(|t| t.dual()),
        );
        ensure(a.is_ok() && a == b, || {
            format!("duality mismatch on {circuit}")
        })?;
    }
    ensure(it.get(TAU) == it.get("kappa"), || {
        "τ and κ interpreted differently".into()
    })?;
    Ok(format!(
        "κ∘κ covariant (2i+j, i+j) vs (i+j, i+j); {} rules Strict; 200 duals agree",
        p.polygraph.rules().len()
    ))
}

/// Follows a trace, checking that every step preserves the term projection
/// and, for resource-only circuits, the finite-set semantics.
fn check_trace(p: &Polygraph, start: &Circuit, strategy: Strategy) -> Result<Circuit, String> {
    let trace = normalize(p, start, 10_000, strategy);
    ensure(trace.is_normal(), || {
        format!("{start} did not normalize under {strategy:?}")
    })?;
    let pi = project_pi(start).map_err(|e| e.to_string())?;
    let resource_only = start.uses_only(&[TAU, DELTA, EPSILON]);
    let finset = if resource_only {
        Some(finset_semantics(start).map_err(|e| e.to_string())?)
    } else {
        None
    };
    for s in &trace.steps {
        ensure(project_pi(&s.result).as_ref() == Ok(&pi), || {
            format!("{} changed π at {}", s.rule, s.result)
        })?;
        if let Some(f) = &finset {
            ensure(finset_semantics(&s.result).as_ref() == Ok(f), || {
                format!(
                    "{} changed the finite-set semantics at {}",
                    s.rule, s.result
                )
            })?;
        }
    }
    Ok(trace.last().clone())
}

fn convergence() -> Outcome {
    let start = Instant::now();
    let p = rds()?;
    let sig = p.polygraph.signature().clone();
    let resource = resource_signature();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let circuits: Vec<Circuit> = (0..500)
        .map(|k| {
            let s: &Signature = if k % 3 == 0 { &resource } else { &sig };
            random_circuit(s, 1 + k % 3, 1 + k % 12, 4, &mut rng)
        })
        .collect();
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = circuits.len().div_ceil(workers);
    let results: Vec<Result<(), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = circuits
            .chunks(chunk)
            .map(|part| {
                let p = &p;
                scope.spawn(move || {
                    for circuit in part {
                        let nf = check_trace(&p.polygraph, circuit, Strategy::Leftmost)?;
                        for seed in 0..10 {
                            let other = check_trace(&p.polygraph, circuit, Strategy::Random(seed))?;
                            ensure(other == nf, || {
                                format!("{circuit}: seed {seed} gives {other}, leftmost {nf}")
                            })?;
                        }
                    }
                    Ok(())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker"))
            .collect()
    });
    results.into_iter().collect::<Result<Vec<()>, String>>()?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "500 circuits × 11 strategies agree, π preserved ({:?})",
        start.elapsed()
    ))
}

fn translation_correctness() -> Outcome {
    let p = load_preset("R0c").map_err(|e| e.to_string())?;
    let tr = p.translation.as_ref().ok_or("R0c has no translation")?;
    let universe = term_universe(tr.trs.signature(), 3, 3);
    for t in &universe {
        for n in t.sharp()..=3 {
            let circuit = tr.phi(t, n).map_err(|e| e.to_string())?;
            let fam = project_pi(&circuit).map_err(|e| e.to_string())?;
            let want = TermFamily::new(n, vec![t.clone()]).map_err(|e| e.to_string())?;
            ensure(fam == want, || format!("π(Φ^{n}({t})) = {fam}"))?;
            ensure(
                poly_core::rewrite::is_normal(&tr.resource, &circuit),
                || format!("Φ^{n}({t}) is not normal"),
            )?;
        }
    }
    Ok(format!("{} terms, every arity up to 3", universe.len()))
}

fn simulation() -> Outcome {
    let mut count = 0;
    for name in ["R0c", "R1c", "R2c"] {
        let p = load_preset(name).map_err(|e| e.to_string())?;
        let tr = p.translation.as_ref().ok_or("no translation")?;
        let universe = term_universe(tr.trs.signature(), 3, 3);
        for rule in tr.trs.rules().iter().filter(|r| r.is_left_linear()) {
            for t in &universe {
                for pos in t.positions() {
                    let Some(v) = apply_rule_at(rule, t, &pos) else {
                        continue;
                    };
                    let n = t.sharp().max(v.sharp()).max(1);
                    simulate_step(tr, rule, t, &v, n)
                        .map_err(|e| format!("{name} {}: {t} -> {v}: {e}", rule.name()))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} redex occurrences simulated"))
}

fn poly_bin(args: &[&str]) -> Result<(Option<i32>, String), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_poly"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        o.status.code(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
    ))
}

fn negative_controls() -> Outcome {
    for trs in ["R1c", "R2c"] {
        let args = [
            "check-term",
            "--trs",
            trs,
            "--interp",
            "f1",
            "--interp",
            "g",
        ];
        let first = poly_bin(&args)?;
        ensure(first.0 == Some(3), || format!("{trs}: exit {:?}", first.0))?;
        ensure(first.1.contains("Phi(C)"), || {
            format!("{trs}: Phi(C) not listed")
        })?;
        ensure(poly_bin(&args)? == first, || {
            format!("{trs}: output differs between runs")
        })?;
    }
    let dir = std::env::temp_dir().join(format!("poly-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("c.trs");
    std::fs::write(&path, "op mu : 2 -> 1\nC: mu(x1,x2) => mu(x2,x1)\n")
        .map_err(|e| e.to_string())?;
    let args = [
        "normalize",
        "--trs",
        path.to_str().unwrap(),
        "--circuit",
        "mu",
        "--fuel",
        "100",
    ];
    let first = poly_bin(&args)?;
    let again = poly_bin(&args)?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure(first.0 == Some(2), || {
        format!("commutation: exit {:?}", first.0)
    })?;
    ensure(again == first, || {
        "commutation: output differs between runs".into()
    })?;
    Ok("R1c, R2c exit 3 listing Phi(C); commutation alone exhausts fuel".into())
}

fn critical_pairs_join() -> Outcome {
    let p = rds()?;
    let pairs = critical_pairs(&p.polygraph, 6);
    let report = check_local_confluence(&p.polygraph, &pairs, 200);
    let open: Vec<String> = report
        .pairs
        .iter()
        .filter(|v| v.status != poly_core::rewrite::PairStatus::Joinable)
        .map(|v| format!("{}/{} on {}", v.left_rule, v.right_rule, v.source))
        .collect();
    ensure(!pairs.is_empty() && open.is_empty(), || {
        format!("not joined: {}", open.join("; "))
    })?;
    Ok(format!("{} critical pairs, all joinable", pairs.len()))
}

fn sampled_interpretation() -> Outcome {
    let p = load_preset("R0c").map_err(|e| e.to_string())?;
    let tr = p.translation.as_ref().ok_or("no translation")?;
    let universe = term_universe(tr.trs.signature(), 3, 3);
    let measure = LongestPath::monoid(&tr.trs).map_err(|e| e.to_string())?;
    let report =
        sample_polygraph(&tr.polygraph, &measure, &universe, 100, 11).map_err(|e| e.to_string())?;
    for r in &report {
        let translated = r.rule.starts_with("Phi(");
        if translated {
            ensure(r.heat_strict == r.points, || {
                format!("{}: strict at {}/{}", r.rule, r.heat_strict, r.points)
            })?;
        } else {
            ensure(r.heat_nonincreasing == r.points, || {
                format!(
                    "{}: non-increasing at {}/{}",
                    r.rule, r.heat_nonincreasing, r.points
                )
            })?;
        }
    }
    Ok(format!("{} rules at 100 points each", report.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("multiset order chain", multiset_chain),
        ("coassociativity certification", coassociativity),
        ("alpha layering", alpha_layering),
        (
            "layered termination of the resource rules",
            layered_certificate,
        ),
        ("Z/2Z vector spaces", linear_polygraph),
        ("convergence evidence", convergence),
        ("translation correctness", translation_correctness),
        ("simulation of left-linear rules", simulation),
        ("negative controls", negative_controls),
        ("bounded critical pairs", critical_pairs_join),
        (
            "sampled term-indexed interpretation",
            sampled_interpretation,
        ),
    ];
    // Written to the raw handle so the lines survive output capture.
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = match check() {
            Ok(detail) => format!(
                "criterion {:>2} PASS  {name}: {detail} [{:?}]",
                k + 1,
                start.elapsed()
            ),
            Err(why) => {
                failed.push(k + 1);
                format!("criterion {:>2} FAIL  {name}: {why}", k + 1)
            }
        };
        writeln!(out, "{line}").expect("stdout");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Translation of term rewriting systems into polygraphs with explicit
//! duplication, erasure and permutation.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Operator, Signature};
use crate::rewrite::{
    normalize, parse_polygraph, Polygraph, ReductionTrace, RewriteError, Rule, Strategy, TraceStep,
};
use crate::term::{apply_rule_at, uniformize, Term, TermError, Trs, TrsRule};

pub const TAU: &str = "tau";
pub const DELTA: &str = "delta";
pub const EPSILON: &str = "epsilon";

/// Normalization budget used when building translated circuits.
pub const PHI_FUEL: usize = 10_000;

const RDELTA_SOURCE: &str = include_str!("../../data/rdelta.poly");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("operator `{0}` is not algebraic")]
    NotAlgebraic(String),
    #[error("operator name `{0}` clashes with a resource operator")]
    NameClash(String),
    #[error("Phi^{n} undefined: term uses x{sharp}")]
    ArityTooSmall { n: usize, sharp: usize },
    #[error("rule `{0}` is not left-linear")]
    NotLeftLinear(String),
    #[error("{0}")]
    Premise(String),
    #[error("normalization ran out of fuel")]
    FuelExhausted,
    #[error("no simulating reduction found for rule `{0}`")]
    NoWitness(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Term(#[from] TermError),
}

pub fn tau() -> Operator {
    Operator::new(TAU, 2, 2)
}

pub fn delta() -> Operator {
    Operator::new(DELTA, 1, 2)
}

pub fn epsilon() -> Operator {
    Operator::new(EPSILON, 1, 0)
}

/// The resource operators alone.
pub fn resource_signature() -> Signature {
    Signature::from_operators([tau(), delta(), epsilon()]).expect("distinct names")
}

/// `sig` extended with the resource operators.
pub fn build_sigma_c(sig: &Signature) -> Result<Signature, TranslateError> {
    let mut out = Signature::new();
    for op in sig.operators() {
        if !op.is_algebraic() {
            return Err(TranslateError::NotAlgebraic(op.name().to_string()));
        }
        if [TAU, DELTA, EPSILON].contains(&op.name()) {
            return Err(TranslateError::NameClash(op.name().to_string()));
        }
        out.add(op.clone())?;
    }
    for op in resource_signature().operators() {
        out.add(op.clone())?;
    }
    Ok(out)
}

/// `delta_n : n -> 2n`, copying a block of `n` wires.
pub fn delta_n(n: usize) -> Circuit {
    let d = Circuit::generator(delta());
    let mut c = Circuit::identity(0);
    for k in 0..n {
        c = c
            .tensor(&d)
            .compose(
                &Circuit::identity(k)
                    .tensor(&tau_n1(k))
                    .tensor(&Circuit::identity(1)),
            )
            .expect("arity by construction");
    }
    c
}

/// `tau_{n,1} : n+1 -> n+1`, moving the last wire to the front.
pub fn tau_n1(n: usize) -> Circuit {
    let t = Circuit::generator(tau());
    let mut c = Circuit::identity(1);
    for k in 0..n {
        c = Circuit::identity(1)
            .tensor(&c)
            .compose(&t.tensor(&Circuit::identity(k)))
            .expect("arity by construction");
    }
    c
}

/// `tau_{1,n} : 1+n -> 1+n`, moving the first wire to the end.
pub fn tau_1n(n: usize) -> Circuit {
    let t = Circuit::generator(tau());
    let mut c = Circuit::identity(1);
    for k in 0..n {
        c = c
            .tensor(&Circuit::identity(1))
            .compose(&Circuit::identity(k).tensor(&t))
            .expect("arity by construction");
    }
    c
}

/// The rules on `tau`, `delta`, `epsilon` shipped with the crate.
pub fn rdelta_rules() -> Polygraph {
    parse_polygraph(RDELTA_SOURCE).expect("bundled rule file is valid")
}

/// Rules pushing resource operators through the algebraic operator `phi`.
pub fn rsigma_rules(phi: &Operator) -> Vec<Rule> {
    let n = phi.inputs();
    let f = Circuit::generator(phi.clone());
    let d = Circuit::generator(delta());
    let e = Circuit::generator(epsilon());
    let t = Circuit::generator(tau());
    let id = Circuit::identity;
    let name = phi.name();
    let seq = |a: &Circuit, b: &Circuit| a.compose(b).expect("arity by construction");
    let erase_all = Circuit::tensor_all(std::iter::repeat_n(&e, n));
    vec![
        Rule::new(
            format!("{name}-duplicate"),
            seq(&f, &d),
            seq(&delta_n(n), &f.tensor(&f)),
        ),
        Rule::new(format!("{name}-erase"), seq(&f, &e), erase_all),
        Rule::new(
            format!("{name}-permute-left"),
            seq(&f.tensor(&id(1)), &t),
            seq(&tau_n1(n), &id(1).tensor(&f)),
        ),
        Rule::new(
            format!("{name}-permute-right"),
            seq(&id(1).tensor(&f), &t),
            seq(&tau_1n(n), &f.tensor(&id(1))),
        ),
    ]
    .into_iter()
    .map(|r| r.expect("parallel sides with a non-empty left side"))
    .collect()
}

/// R_Δ ∪ R_Σ over `sig` extended with the resource operators.
pub fn build_rdelta_sigma(sig: &Signature) -> Result<Polygraph, TranslateError> {
    let sigma_c = build_sigma_c(sig)?;
    let mut rules: Vec<Rule> = rdelta_rules().rules().to_vec();
    for op in sig.operators() {
        rules.extend(rsigma_rules(op));
    }
    Ok(Polygraph::new(sigma_c, rules)?)
}

/// The tree part of `u`: one input per variable occurrence.
fn tree(u: &Term, sig: &Signature) -> Result<Circuit, TranslateError> {
    match u {
        Term::Var(_) => Ok(Circuit::identity(1)),
        Term::App(f, args) => {
            let op = sig
                .get(f)
                .ok_or_else(|| TermError::UnknownOperator(f.clone()))?;
            let mut below = Circuit::identity(0);
            for a in args {
                below = below.tensor(&tree(a, sig)?);
            }
            Ok(below.compose(&Circuit::generator(op.clone()))?)
        }
    }
}

/// Routing `n -> k` sending input `occ[j]-1` to output `j`.
pub fn routing(occ: &[usize], n: usize) -> Circuit {
    let d = Circuit::generator(delta());
    let mut blocks = Vec::with_capacity(n);
    let mut offset = vec![0; n + 1];
    for v in 1..=n {
        let count = occ.iter().filter(|&&x| x == v).count();
        let block = match count {
            0 => Circuit::generator(epsilon()),
            _ => {
                let mut comb = Circuit::identity(1);
                for k in 1..count {
                    comb = comb
                        .compose(&d.tensor(&Circuit::identity(k - 1)))
                        .expect("arity by construction");
                }
                comb
            }
        };
        offset[v] = offset[v - 1] + count;
        blocks.push(block);
    }
    let copies = Circuit::tensor_all(blocks.iter());
    let mut seen = vec![0; n + 1];
    let perm: Vec<usize> = occ
        .iter()
        .map(|&v| {
            let i = offset[v - 1] + seen[v];
            seen[v] += 1;
            i
        })
        .collect();
    copies
        .compose(&Circuit::permutation(&perm, &tau()))
        .expect("arity by construction")
}

/// `Phi^n(u)`: the normal circuit `n -> 1` whose projection is `u`.
pub fn phi(u: &Term, n: usize, rds: &Polygraph) -> Result<Circuit, TranslateError> {
    let sharp = u.sharp();
    if n < sharp {
        return Err(TranslateError::ArityTooSmall { n, sharp });
    }
    let naive = routing(&u.occurrences(), n).compose(&tree(u, rds.signature())?)?;
    let trace = normalize(rds, &naive, PHI_FUEL, Strategy::Leftmost);
    if !trace.is_normal() {
        return Err(TranslateError::FuelExhausted);
    }
    Ok(trace.last().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    #[serde(rename = "R_Delta")]
    RDelta,
    #[serde(rename = "R_Sigma")]
    RSigma,
    #[serde(rename = "Phi(R)")]
    PhiR,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub rule: String,
    pub provenance: Provenance,
    /// Term rule a translated rule comes from.
    pub source: Option<String>,
    pub left_linear: Option<bool>,
    pub right_linear: Option<bool>,
}

/// A translated system together with where each rule comes from.
#[derive(Clone, Debug)]
pub struct Translation {
    pub trs: Trs,
    pub resource: Polygraph,
    pub polygraph: Polygraph,
    pub manifest: Vec<ManifestEntry>,
}

impl Translation {
    /// Name of the translated rule for term rule `name`.
    pub fn phi_rule_name(name: &str) -> String {
        format!("Phi({name})")
    }

    pub fn phi_rule(&self, term_rule: &str) -> Option<&Rule> {
        self.polygraph.rule(&Self::phi_rule_name(term_rule))
    }

    pub fn phi(&self, u: &Term, n: usize) -> Result<Circuit, TranslateError> {
        phi(u, n, &self.resource)
    }
}

/// R^c: the resource rules plus `Phi(lhs) => Phi^{#lhs}(rhs)` for every
/// (uniformized) rule.
pub fn translate_trs(trs: &Trs) -> Result<Translation, TranslateError> {
    let resource = build_rdelta_sigma(trs.signature())?;
    let rdelta_names: Vec<String> = rdelta_rules()
        .rules()
        .iter()
        .map(|r| r.name().to_string())
        .collect();
    let mut manifest: Vec<ManifestEntry> = resource
        .rules()
        .iter()
        .map(|r| ManifestEntry {
            rule: r.name().to_string(),
            provenance: if rdelta_names.iter().any(|n| n == r.name()) {
                Provenance::RDelta
            } else {
                Provenance::RSigma
            },
            source: None,
            left_linear: None,
            right_linear: None,
        })
        .collect();
    let mut polygraph = resource.clone();
    for r in trs.rules() {
        let u = uniformize(r);
        let n = u.lhs().sharp();
        let lhs = phi(u.lhs(), n, &resource)?;
        let rhs = phi(u.rhs(), n, &resource)?;
        let name = Translation::phi_rule_name(r.name());
        polygraph.push(Rule::new(name.clone(), lhs, rhs)?)?;
        manifest.push(ManifestEntry {
            rule: name,
            provenance: Provenance::PhiR,
            source: Some(r.name().to_string()),
            left_linear: Some(r.is_left_linear()),
            right_linear: Some(r.is_right_linear()),
        });
    }
    Ok(Translation {
        trs: trs.clone(),
        resource,
        polygraph,
        manifest,
    })
}

/// Exhibits `Phi^n(u) -> f ->> Phi^n(v)` where the first step uses the
/// translation of `alpha` and the rest uses resource rules only.
pub fn simulate_step(
    tr: &Translation,
    alpha: &TrsRule,
    u: &Term,
    v: &Term,
    n: usize,
) -> Result<ReductionTrace, TranslateError> {
    if !alpha.is_left_linear() {
        return Err(TranslateError::NotLeftLinear(alpha.name().to_string()));
    }
    let premise = u
        .positions()
        .iter()
        .any(|p| apply_rule_at(alpha, u, p).as_ref() == Some(v));
    if !premise {
        return Err(TranslateError::Premise(format!(
            "{u} does not rewrite to {v} with rule `{}`",
            alpha.name()
        )));
    }
    let rule = tr.phi_rule(alpha.name()).ok_or_else(|| {
        TranslateError::Premise(format!("no translated rule for `{}`", alpha.name()))
    })?;
    let start = tr.phi(u, n)?;
    let target = tr.phi(v, n)?;
    let single = Polygraph::new(tr.polygraph.signature().clone(), vec![rule.clone()])?;
    for step in crate::rewrite::rewrite_step(&single, &start, Strategy::All) {
        let tail = normalize(&tr.resource, &step.result, PHI_FUEL, Strategy::Leftmost);
        if tail.is_normal() && tail.last().equivalent(&target) {
            let mut steps = vec![TraceStep {
                rule: rule.name().to_string(),
                context: step.context,
                result: step.result,
            }];
            steps.extend(tail.steps);
            return Ok(ReductionTrace {
                start,
                steps,
                status: tail.status,
            });
        }
    }
    Err(TranslateError::NoWitness(alpha.name().to_string()))
}

//! Polygraphs as rewriting systems on circuits.

mod critical;
pub(crate) mod parse;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{apply_context, find_matches, Circuit, CircuitError, Context, Signature, Src};

pub use critical::{
    check_local_confluence, critical_pairs, ConfluenceReport, CriticalPair, PairStatus, PairVerdict,
};
pub use parse::{parse_polygraph, write_polygraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(
        "rule `{rule}`: sides are not parallel ({lhs_in} -> {lhs_out} vs {rhs_in} -> {rhs_out})"
    )]
    NotParallel {
        rule: String,
        lhs_in: usize,
        lhs_out: usize,
        rhs_in: usize,
        rhs_out: usize,
    },
    #[error("rule `{0}`: left side has no operator")]
    EmptyLhs(String),
    #[error("rule `{0}`: left side routes an input straight to an output")]
    BareWireLhs(String),
    #[error("duplicate rule `{0}`")]
    DuplicateRule(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A pair of parallel circuits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    name: String,
    lhs: Circuit,
    rhs: Circuit,
}

impl Rule {
    pub fn new(name: impl Into<String>, lhs: Circuit, rhs: Circuit) -> Result<Self, RewriteError> {
        let name = name.into();
        if lhs.inputs() != rhs.inputs() || lhs.outputs() != rhs.outputs() {
            return Err(RewriteError::NotParallel {
                rule: name,
                lhs_in: lhs.inputs(),
                lhs_out: lhs.outputs(),
                rhs_in: rhs.inputs(),
                rhs_out: rhs.outputs(),
            });
        }
        if lhs.node_count() == 0 {
            return Err(RewriteError::EmptyLhs(name));
        }
        if lhs.output_srcs().iter().any(|s| matches!(s, Src::Input(_))) {
            return Err(RewriteError::BareWireLhs(name));
        }
        Ok(Rule {
            name,
            lhs: lhs.canonical(),
            rhs: rhs.canonical(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Circuit {
        &self.lhs
    }

    pub fn rhs(&self) -> &Circuit {
        &self.rhs
    }

    /// The same rule with sides exchanged. Fails if the right side would be an
    /// invalid left side.
    pub fn reversed(&self) -> Result<Rule, RewriteError> {
        Rule::new(self.name.clone(), self.rhs.clone(), self.lhs.clone())
    }
}

/// A signature together with an ordered list of rules.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polygraph {
    signature: Signature,
    rules: Vec<Rule>,
}

impl Polygraph {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Self, RewriteError> {
        let mut p = Polygraph {
            signature,
            rules: Vec::new(),
        };
        for r in rules {
            p.push(r)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, rule: Rule) -> Result<(), RewriteError> {
        if self.rule(rule.name()).is_some() {
            return Err(RewriteError::DuplicateRule(rule.name().to_string()));
        }
        rule.lhs.check_signature(&self.signature)?;
        rule.rhs.check_signature(&self.signature)?;
        self.rules.push(rule);
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    /// Polygraph restricted to the rules whose names satisfy `keep`.
    pub fn filter(&self, keep: impl Fn(&str) -> bool) -> Polygraph {
        Polygraph {
            signature: self.signature.clone(),
            rules: self
                .rules
                .iter()
                .filter(|r| keep(r.name()))
                .cloned()
                .collect(),
        }
    }

    /// Parses a circuit over this polygraph's signature.
    pub fn circuit(&self, text: &str) -> Result<Circuit, CircuitError> {
        crate::circuit::parse_circuit(text, &self.signature)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "seed")]
pub enum Strategy {
    /// First rule in declaration order, first match in canonical order.
    Leftmost,
    /// Uniform choice among all redexes, from a seeded generator.
    Random(u64),
    /// Every one-step reduct. Normalization follows the first one.
    All,
}

/// One rewrite: the rule used, where, and the resulting circuit.
#[derive(Clone, Debug)]
pub struct Step {
    pub rule: usize,
    pub rule_name: String,
    pub context: Context,
    pub result: Circuit,
}

fn all_steps(p: &Polygraph, c: &Circuit) -> Vec<Step> {
    let host = c.canonical();
    let mut steps = Vec::new();
    for (i, rule) in p.rules.iter().enumerate() {
        for ctx in find_matches(&rule.lhs, &host) {
            steps.push(make_step(i, rule, ctx));
        }
    }
    steps
}

fn make_step(i: usize, rule: &Rule, ctx: Context) -> Step {
    let result = apply_context(&ctx, &rule.rhs)
        .expect("rule sides are parallel")
        .canonical();
    Step {
        rule: i,
        rule_name: rule.name.clone(),
        context: ctx,
        result,
    }
}

fn leftmost_step(p: &Polygraph, host: &Circuit) -> Option<Step> {
    p.rules.iter().enumerate().find_map(|(i, rule)| {
        find_matches(&rule.lhs, host)
            .into_iter()
            .next()
            .map(|ctx| make_step(i, rule, ctx))
    })
}

/// One-step reducts of `c` under `strategy`; empty when `c` is irreducible.
pub fn rewrite_step(p: &Polygraph, c: &Circuit, strategy: Strategy) -> Vec<Step> {
    match strategy {
        Strategy::Leftmost => leftmost_step(p, &c.canonical()).into_iter().collect(),
        Strategy::All => all_steps(p, c),
        Strategy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_step(p, c, &mut rng).into_iter().collect()
        }
    }
}

fn random_step(p: &Polygraph, c: &Circuit, rng: &mut ChaCha8Rng) -> Option<Step> {
    let mut steps = all_steps(p, c);
    if steps.is_empty() {
        return None;
    }
    let i = (0..steps.len()).collect::<Vec<_>>().choose(rng).copied()?;
    Some(steps.swap_remove(i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStatus {
    NormalForm,
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: String,
    pub context: Context,
    pub result: Circuit,
}

/// A reduction path `start -> … -> last`.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub start: Circuit,
    pub steps: Vec<TraceStep>,
    pub status: TraceStatus,
}

impl ReductionTrace {
    pub fn last(&self) -> &Circuit {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn is_normal(&self) -> bool {
        self.status == TraceStatus::NormalForm
    }

    pub fn report(&self) -> TraceReport {
        TraceReport {
            start: self.start.to_expr(),
            steps: self
                .steps
                .iter()
                .map(|s| StepReport {
                    rule: s.rule.clone(),
                    context_path: s.context.matched().to_vec(),
                    result: s.result.to_expr(),
                })
                .collect(),
            result: self.last().to_expr(),
            status: self.status,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub rule: String,
    /// Nodes of the canonical host covered by the redex.
    pub context_path: Vec<usize>,
    pub result: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub start: String,
    pub steps: Vec<StepReport>,
    pub result: String,
    pub status: TraceStatus,
}

/// Rewrites until no rule applies or `fuel` steps have been taken.
pub fn normalize(p: &Polygraph, c: &Circuit, fuel: usize, strategy: Strategy) -> ReductionTrace {
    let start = c.canonical();
    let mut current = start.clone();
    let mut steps = Vec::new();
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    loop {
        let next = match rng.as_mut() {
            Some(rng) => random_step(p, &current, rng),
            None => leftmost_step(p, &current),
        };
        let Some(step) = next else {
            return ReductionTrace {
                start,
                steps,
                status: TraceStatus::NormalForm,
            };
        };
        if steps.len() == fuel {
            return ReductionTrace {
                start,
                steps,
                status: TraceStatus::FuelExhausted,
            };
        }
        current = step.result.clone();
        steps.push(TraceStep {
            rule: step.rule_name,
            context: step.context,
            result: step.result,
        });
    }
}

/// Whether no rule of `p` applies to `c`.
pub fn is_normal(p: &Polygraph, c: &Circuit) -> bool {
    let host = c.canonical();
    p.rules
        .iter()
        .all(|r| find_matches(&r.lhs, &host).is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Operator;

    fn delta_sig() -> Signature {
        Signature::from_operators([
            Operator::new("tau", 2, 2),
            Operator::new("delta", 1, 2),
            Operator::new("epsilon", 1, 0),
            Operator::new("mu", 2, 1),
        ])
        .unwrap()
    }

    fn poly(rules: &[(&str, &str, &str)]) -> Polygraph {
        let sig = delta_sig();
        let rules = rules
            .iter()
            .map(|(n, l, r)| {
                Rule::new(
                    *n,
                    crate::parse_circuit(l, &sig).unwrap(),
                    crate::parse_circuit(r, &sig).unwrap(),
                )
                .unwrap()
            })
            .collect();
        Polygraph::new(sig, rules).unwrap()
    }

    #[test]
    fn rule_invariants() {
        let sig = delta_sig();
        let c = |t| crate::parse_circuit(t, &sig).unwrap();
        assert!(matches!(
            Rule::new("x", c("delta"), c("id(1)")),
            Err(RewriteError::NotParallel { .. })
        ));
        assert!(matches!(
            Rule::new("x", c("id(1)"), c("id(1)")),
            Err(RewriteError::EmptyLhs(_))
        ));
        assert!(matches!(
            Rule::new("x", c("tau * id(1)"), c("tau * id(1)")),
            Err(RewriteError::BareWireLhs(_))
        ));
    }

    #[test]
    fn involution_normalizes() {
        let p = poly(&[("inv", "tau ; tau", "id(2)")]);
        let t = normalize(
            &p,
            &p.circuit("tau ; tau ; tau").unwrap(),
            10,
            Strategy::Leftmost,
        );
        assert!(t.is_normal());
        assert_eq!(t.steps.len(), 1);
        assert!(t.last().equivalent(&p.circuit("tau").unwrap()));
    }

    #[test]
    fn identity_irreducible() {
        let p = poly(&[("inv", "tau ; tau", "id(2)")]);
        for n in 0..4 {
            assert!(rewrite_step(&p, &Circuit::identity(n), Strategy::All).is_empty());
        }
    }

    #[test]
    fn looping_rule_exhausts_fuel() {
        let p = poly(&[("C", "mu", "tau ; mu")]);
        let t = normalize(&p, &p.circuit("mu").unwrap(), 5, Strategy::Leftmost);
        assert_eq!(t.status, TraceStatus::FuelExhausted);
        assert_eq!(t.steps.len(), 5);
    }

    #[test]
    fn random_is_deterministic() {
        let p = poly(&[
            ("inv", "tau ; tau", "id(2)"),
            ("cocomm", "delta ; tau", "delta"),
        ]);
        let c = p
            .circuit("(delta * delta) ; (tau * tau) ; (tau * tau)")
            .unwrap();
        let a = normalize(&p, &c, 50, Strategy::Random(7));
        let b = normalize(&p, &c, 50, Strategy::Random(7));
        assert_eq!(
            a.steps.iter().map(|s| &s.result).collect::<Vec<_>>(),
            b.steps.iter().map(|s| &s.result).collect::<Vec<_>>()
        );
    }
}

//! The term-indexed interpretation used to lift termination of a term
//! rewriting system to its translation. Descending currents are pairs
//! `(term, weight)`, ascending currents are trivial and heats are concrete
//! multisets `Σ weight · ul(|term|)` for a measure `|·|` that decreases along
//! reductions. Comparisons are only made at concrete sample points.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::Node;
use crate::rewrite::{Polygraph, Rule};
use crate::term::{Term, Trs};
use crate::translate::{DELTA, EPSILON, TAU};

use super::multiset::Multiset;
use super::{evaluate, NodeSemantics};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("the measure ran out of fuel on {0}")]
    Fuel(Term),
    #[error("reduction from {0} loops; the system does not terminate")]
    Loop(Term),
    #[error("operator `{0}` has no term-indexed reading")]
    Operator(String),
    #[error("not exactly the monoid rules: {0}")]
    NotMonoid(String),
}

/// `|u| = 1 + length of the longest reduction path from u`.
pub struct LongestPath<'a> {
    trs: &'a Trs,
    fuel: usize,
    memo: RefCell<HashMap<Term, i128>>,
    /// `(mu, eta)` when the system is exactly associativity and units.
    monoid: Option<(String, String)>,
}

impl<'a> LongestPath<'a> {
    /// Exhaustive search; `fuel` bounds the number of distinct terms
    /// explored.
    pub fn new(trs: &'a Trs, fuel: usize) -> Self {
        LongestPath {
            trs,
            fuel,
            memo: RefCell::new(HashMap::new()),
            monoid: None,
        }
    }

    /// Closed form for `mu(mu(x,y),z) -> mu(x,mu(y,z))`, `mu(eta,x) -> x`,
    /// `mu(x,eta) -> x`, where search is hopeless: associativity alone
    /// reaches Catalan-many terms.
    ///
    /// Every associativity step lowers `P = Σ_nodes #mu(left child)` by at
    /// least one, unit steps never raise it, and some step lowers it by
    /// exactly one until the term is a right comb; unit steps always remove
    /// `#mu(u) - #mu(nf(u))` nodes. So the longest path has length
    /// `P + #mu(u) - #mu(nf(u))`.
    pub fn monoid(trs: &'a Trs) -> Result<Self, SampleError> {
        let ops = trs.signature().operators();
        let (Some(mu), Some(eta)) = (
            ops.iter().find(|o| o.inputs() == 2 && o.outputs() == 1),
            ops.iter().find(|o| o.inputs() == 0 && o.outputs() == 1),
        ) else {
            return Err(SampleError::NotMonoid(
                "needs a binary operator and a constant".into(),
            ));
        };
        let (m, e) = (mu.name(), eta.name());
        let x = Term::Var;
        let expected = [
            (
                Term::app(m, vec![Term::app(m, vec![x(1), x(2)]), x(3)]),
                Term::app(m, vec![x(1), Term::app(m, vec![x(2), x(3)])]),
            ),
            (Term::app(m, vec![Term::constant(e), x(1)]), x(1)),
            (Term::app(m, vec![x(1), Term::constant(e)]), x(1)),
        ];
        let mut rules: Vec<(Term, Term)> = trs
            .rules()
            .iter()
            .map(|r| {
                let u = crate::term::uniformize(r);
                (u.lhs().clone(), u.rhs().clone())
            })
            .collect();
        rules.sort();
        let mut want = expected.to_vec();
        want.sort();
        if ops.len() != 2 || rules != want {
            return Err(SampleError::NotMonoid(format!(
                "{} rules over {} operators",
                rules.len(),
                ops.len()
            )));
        }
        Ok(LongestPath {
            monoid: Some((m.to_string(), e.to_string())),
            ..LongestPath::new(trs, 0)
        })
    }

    pub fn measure(&self, t: &Term) -> Result<i128, SampleError> {
        if let Some((mu, eta)) = &self.monoid {
            return Ok(monoid_longest(t, mu, eta) + 1);
        }
        let mut stack = HashSet::new();
        self.longest(t, &mut stack).map(|n| n + 1)
    }

    fn longest(&self, t: &Term, stack: &mut HashSet<Term>) -> Result<i128, SampleError> {
        if let Some(&n) = self.memo.borrow().get(t) {
            return Ok(n);
        }
        if self.memo.borrow().len() >= self.fuel {
            return Err(SampleError::Fuel(t.clone()));
        }
        if !stack.insert(t.clone()) {
            return Err(SampleError::Loop(t.clone()));
        }
        let mut best = 0;
        for r in self.trs.redexes(t) {
            best = best.max(1 + self.longest(&r.result, stack)?);
        }
        stack.remove(t);
        self.memo.borrow_mut().insert(t.clone(), best);
        Ok(best)
    }
}

/// `(#mu, leaves, non-unit leaves, P)` bottom-up.
fn monoid_longest(t: &Term, mu: &str, eta: &str) -> i128 {
    fn walk(t: &Term, mu: &str, eta: &str) -> (i128, i128, i128, i128) {
        match t {
            Term::App(f, args) if f == mu => {
                let l = walk(&args[0], mu, eta);
                let r = walk(&args[1], mu, eta);
                (l.0 + r.0 + 1, l.1 + r.1, l.2 + r.2, l.3 + r.3 + l.0)
            }
            Term::App(f, _) if f == eta => (0, 1, 0, 0),
            _ => (0, 1, 1, 0),
        }
    }
    let (nodes, _, plain, p) = walk(t, mu, eta);
    p + nodes - (plain - 1).max(0)
}

/// A current `(u, i)`.
pub type Weighted = (Term, i128);

struct Sampled<'m, 'a> {
    measure: &'m LongestPath<'a>,
}

impl NodeSemantics for Sampled<'_, '_> {
    type Down = Weighted;
    type Up = ();
    type Heat = Multiset;
    type Error = SampleError;

    fn cov(&self, node: &Node, ins: &[Weighted]) -> Result<Vec<Weighted>, SampleError> {
        let op = &node.op;
        Ok(match op.name() {
            TAU => vec![ins[1].clone(), ins[0].clone()],
            DELTA => vec![ins[0].clone(), ins[0].clone()],
            EPSILON => vec![],
            name if op.is_algebraic() => {
                let t = Term::App(
                    name.to_string(),
                    ins.iter().map(|(u, _)| u.clone()).collect(),
                );
                let w = if ins.is_empty() {
                    1
                } else {
                    2 * ins.iter().map(|(_, i)| i).sum::<i128>()
                };
                vec![(t, w)]
            }
            name => return Err(SampleError::Operator(name.to_string())),
        })
    }

    fn con(&self, node: &Node, _outs: &[()]) -> Result<Vec<()>, SampleError> {
        Ok(vec![(); node.op.inputs()])
    }

    fn heat(&self, node: &Node, ins: &[Weighted], _outs: &[()]) -> Result<Multiset, SampleError> {
        let op = &node.op;
        Ok(match op.name() {
            TAU | EPSILON => Multiset::default(),
            DELTA => Multiset::from_pairs([(self.measure.measure(&ins[0].0)?, ins[0].1)]),
            name if op.is_algebraic() => {
                let t = Term::App(
                    name.to_string(),
                    ins.iter().map(|(u, _)| u.clone()).collect(),
                );
                let w = if ins.is_empty() {
                    1
                } else {
                    ins.iter().map(|(_, i)| i).sum::<i128>()
                };
                Multiset::from_pairs([(self.measure.measure(&t)?, w)])
            }
            name => return Err(SampleError::Operator(name.to_string())),
        })
    }

    fn add(&self, a: Multiset, b: Multiset) -> Result<Multiset, SampleError> {
        Ok(a.add(&b))
    }

    fn zero(&self) -> Multiset {
        Multiset::default()
    }
}

/// Image of a circuit at a concrete point.
pub fn evaluate_at(
    measure: &LongestPath<'_>,
    c: &crate::circuit::Circuit,
    point: Vec<Weighted>,
) -> Result<(Vec<Weighted>, Multiset), SampleError> {
    let ev = evaluate(&Sampled { measure }, c, point, vec![(); c.outputs()])?;
    Ok((ev.outputs, ev.heat))
}

/// Approximates the term order `u > v` ("`|c[u]| > |c[v]|` for every
/// context `c`") with the empty context and every one-operator context whose
/// other arguments are `filler`.
pub fn term_greater(
    measure: &LongestPath<'_>,
    u: &Term,
    v: &Term,
    filler: &Term,
) -> Result<bool, SampleError> {
    type Plug = Box<dyn Fn(&Term) -> Term>;
    let mut contexts: Vec<Plug> = vec![Box::new(|t: &Term| t.clone())];
    for op in measure.trs.signature().operators() {
        for k in 0..op.inputs() {
            let (name, n, filler) = (op.name().to_string(), op.inputs(), filler.clone());
            contexts.push(Box::new(move |t: &Term| {
                let args = (0..n)
                    .map(|p| if p == k { t.clone() } else { filler.clone() })
                    .collect();
                Term::App(name.clone(), args)
            }));
        }
    }
    for c in &contexts {
        if measure.measure(&c(u))? <= measure.measure(&c(v))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lexicographic comparison of weighted currents, componentwise; `None`
/// when some component is not `≥`.
fn compare_currents(
    measure: &LongestPath<'_>,
    a: &[Weighted],
    b: &[Weighted],
    filler: &Term,
) -> Result<Option<Ordering>, SampleError> {
    let mut strict = false;
    for ((u, i), (v, j)) in a.iter().zip(b) {
        if u == v {
            if i < j {
                return Ok(None);
            }
            strict |= i > j;
        } else if term_greater(measure, u, v, filler)? {
            strict = true;
        } else {
            return Ok(None);
        }
    }
    Ok(Some(if strict {
        Ordering::Greater
    } else {
        Ordering::Equal
    }))
}

/// Sampled behaviour of one rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledRule {
    pub rule: String,
    pub points: usize,
    /// Points where the heat strictly decreases.
    pub heat_strict: usize,
    /// Points where the heat does not increase.
    pub heat_nonincreasing: usize,
    /// Points where the descending currents do not increase (under the
    /// approximated term order).
    pub currents_nonincreasing: usize,
}

/// Evaluates both sides of every rule at `samples` random points drawn
/// from `universe` with weights in `1..=4`.
pub fn sample_rules(
    rules: &[Rule],
    measure: &LongestPath<'_>,
    universe: &[Term],
    samples: usize,
    seed: u64,
) -> Result<Vec<SampledRule>, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = universe.first().cloned().unwrap_or(Term::Var(1));
    let mut out = Vec::with_capacity(rules.len());
    for rule in rules {
        let mut report = SampledRule {
            rule: rule.name().to_string(),
            points: samples,
            heat_strict: 0,
            heat_nonincreasing: 0,
            currents_nonincreasing: 0,
        };
        for _ in 0..samples {
            let point: Vec<Weighted> = (0..rule.lhs().inputs())
                .map(|_| {
                    (
                        universe.choose(&mut rng).cloned().unwrap_or(Term::Var(1)),
                        rng.gen_range(1..=4),
                    )
                })
                .collect();
            let (lc, lh) = evaluate_at(measure, rule.lhs(), point.clone())?;
            let (rc, rh) = evaluate_at(measure, rule.rhs(), point)?;
            match lh.cmp_multiset(&rh) {
                Ordering::Greater => {
                    report.heat_strict += 1;
                    report.heat_nonincreasing += 1;
                }
                Ordering::Equal => report.heat_nonincreasing += 1,
                Ordering::Less => {}
            }
            if compare_currents(measure, &lc, &rc, &filler)?.is_some() {
                report.currents_nonincreasing += 1;
            }
        }
        out.push(report);
    }
    Ok(out)
}

/// Convenience wrapper over all rules of a polygraph.
pub fn sample_polygraph(
    p: &Polygraph,
    measure: &LongestPath<'_>,
    universe: &[Term],
    samples: usize,
    seed: u64,
) -> Result<Vec<SampledRule>, SampleError> {
    sample_rules(p.rules(), measure, universe, samples, seed)
}

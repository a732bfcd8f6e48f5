//! Classical terms, term families and term rewriting.

mod parse;
mod semantics;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::circuit::{Operator, Signature};

pub use parse::{parse_term, parse_trs, write_trs};
pub use semantics::{finset_semantics, project_pi, FinFun};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("operator `{0}` is not algebraic")]
    NotAlgebraic(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{name}` expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("rule `{0}`: left side is a variable")]
    VariableLhs(String),
    #[error("rule `{rule}`: variable x{var} of the right side does not occur on the left")]
    UnboundVariable { rule: String, var: usize },
    #[error("term uses x{sharp} but the family has only {inputs} inputs")]
    SharpExceedsSource { sharp: usize, inputs: usize },
    #[error("arity mismatch: {left} terms cannot feed {right} inputs")]
    FamilyMismatch { left: usize, right: usize },
    #[error("operator `{0}` has no term semantics")]
    NoSemantics(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A variable `x_i` (1-based) or an operator applied to arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        assert!(i >= 1, "variables are 1-based");
        Term::Var(i)
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    /// Largest variable index occurring, 0 for ground terms.
    pub fn sharp(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::App(_, args) => args.iter().map(Term::sharp).max().unwrap_or(0),
        }
    }

    /// Variable occurrences from left to right.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Term::Var(i) => out.push(*i),
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.occurrences().into_iter().collect()
    }

    pub fn is_linear(&self) -> bool {
        let occ = self.occurrences();
        occ.len() == occ.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Operator applications, counted with multiplicity.
    pub fn operator_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::operator_count).sum::<usize>(),
        }
    }

    /// Simultaneous substitution `x_j := sub[j-1]`.
    pub fn substitute(&self, sub: &[Term]) -> Term {
        match self {
            Term::Var(i) => sub[*i - 1].clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(sub)).collect())
            }
        }
    }

    /// Renames variables through `f`.
    pub fn rename(&self, f: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Var(i) => Term::Var(f(*i)),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.rename(f)).collect()),
        }
    }

    pub fn at(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::App(_, args) => args.get(i)?.at(rest),
                Term::Var(_) => None,
            },
        }
    }

    pub fn replace_at(&self, pos: &[usize], by: Term) -> Term {
        match pos.split_first() {
            None => by,
            Some((&i, rest)) => match self {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, by);
                    Term::App(f.clone(), args)
                }
                Term::Var(_) => panic!("position below a variable"),
            },
        }
    }

    /// All positions, in pre-order.
    pub fn positions(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                for mut p in a.positions() {
                    p.insert(0, i);
                    out.push(p);
                }
            }
        }
        out
    }

    /// Checks every operator against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let op = sig
                    .get(f)
                    .ok_or_else(|| TermError::UnknownOperator(f.clone()))?;
                if !op.is_algebraic() {
                    return Err(TermError::NotAlgebraic(f.clone()));
                }
                if op.inputs() != args.len() {
                    return Err(TermError::Arity {
                        name: f.clone(),
                        expected: op.inputs(),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(g, args) if args.is_empty() => f.write_str(g),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Matches `pattern` against `t`, extending `sub` (indexed by variable).
/// Repeated pattern variables must match equal subterms.
pub fn match_term(pattern: &Term, t: &Term, sub: &mut Vec<Option<Term>>) -> bool {
    match pattern {
        Term::Var(i) => {
            if sub.len() < *i {
                sub.resize(*i, None);
            }
            match &sub[*i - 1] {
                Some(bound) => bound == t,
                None => {
                    sub[*i - 1] = Some(t.clone());
                    true
                }
            }
        }
        Term::App(f, pargs) => match t {
            Term::App(g, targs) if f == g && pargs.len() == targs.len() => {
                pargs.iter().zip(targs).all(|(p, a)| match_term(p, a, sub))
            }
            _ => false,
        },
    }
}

/// An arrow `m -> n` of the cartesian category of terms: `n` terms over the
/// variables `x1..xm`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermFamily {
    source: usize,
    terms: Vec<Term>,
}

impl TermFamily {
    pub fn new(source: usize, terms: Vec<Term>) -> Result<Self, TermError> {
        if let Some(sharp) = terms.iter().map(Term::sharp).max() {
            if sharp > source {
                return Err(TermError::SharpExceedsSource {
                    sharp,
                    inputs: source,
                });
            }
        }
        Ok(TermFamily { source, terms })
    }

    pub fn identity(n: usize) -> Self {
        TermFamily {
            source: n,
            terms: (1..=n).map(Term::Var).collect(),
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `self` then `other`: each `x_j` of `other` is replaced by the `j`-th
    /// term of `self`.
    pub fn compose(&self, other: &TermFamily) -> Result<TermFamily, TermError> {
        if self.target() != other.source {
            return Err(TermError::FamilyMismatch {
                left: self.target(),
                right: other.source,
            });
        }
        Ok(TermFamily {
            source: self.source,
            terms: other
                .terms
                .iter()
                .map(|t| t.substitute(&self.terms))
                .collect(),
        })
    }

    pub fn tensor(&self, other: &TermFamily) -> TermFamily {
        let m = self.source;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| t.rename(&|j| j + m)));
        TermFamily {
            source: m + other.source,
            terms,
        }
    }
}

impl fmt::Display for TermFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> (", self.source)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrsRule {
    name: String,
    lhs: Term,
    rhs: Term,
}

impl TrsRule {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Result<Self, TermError> {
        let name = name.into();
        if matches!(lhs, Term::Var(_)) {
            return Err(TermError::VariableLhs(name));
        }
        let bound = lhs.vars();
        if let Some(&var) = rhs.vars().iter().find(|v| !bound.contains(v)) {
            return Err(TermError::UnboundVariable { rule: name, var });
        }
        Ok(TrsRule { name, lhs, rhs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    pub fn is_right_linear(&self) -> bool {
        self.rhs.is_linear()
    }

    /// Whether the first occurrences of variables in the left side read
    /// `x1, x2, …` from left to right.
    pub fn is_uniform(&self) -> bool {
        *self == uniformize(self)
    }
}

impl fmt::Display for TrsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} => {}", self.name, self.lhs, self.rhs)
    }
}

/// Renames variables so that their first occurrences in the left side are
/// `x1, x2, …` in order.
pub fn uniformize(r: &TrsRule) -> TrsRule {
    let mut order: Vec<usize> = Vec::new();
    for v in r.lhs.occurrences() {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let rename = |i: usize| order.iter().position(|&v| v == i).expect("bound variable") + 1;
    TrsRule {
        name: r.name.clone(),
        lhs: r.lhs.rename(&rename),
        rhs: r.rhs.rename(&rename),
    }
}

/// A term rewriting system over an algebraic signature.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Trs {
    signature: Signature,
    rules: Vec<TrsRule>,
}

impl Trs {
    pub fn new(signature: Signature, rules: Vec<TrsRule>) -> Result<Self, TermError> {
        if let Some(op) = signature.operators().iter().find(|o| !o.is_algebraic()) {
            return Err(TermError::NotAlgebraic(op.name().to_string()));
        }
        for r in &rules {
            r.lhs.check(&signature)?;
            r.rhs.check(&signature)?;
        }
        Ok(Trs { signature, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[TrsRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&TrsRule> {
        self.rules.iter().find(|r| r.name() == name)
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(TrsRule::is_left_linear)
    }

    /// One-step reducts with the rule and position used.
    pub fn redexes(&self, u: &Term) -> Vec<Redex> {
        let mut out = Vec::new();
        for pos in u.positions() {
            let sub_term = u.at(&pos).expect("valid position");
            for (i, r) in self.rules.iter().enumerate() {
                if let Some(result) = rewrite_at(r, u, &pos, sub_term) {
                    out.push(Redex {
                        rule: i,
                        position: pos.clone(),
                        result,
                    });
                }
            }
        }
        out
    }
}

fn rewrite_at(r: &TrsRule, u: &Term, pos: &[usize], sub_term: &Term) -> Option<Term> {
    let mut sub = Vec::new();
    if !match_term(&r.lhs, sub_term, &mut sub) {
        return None;
    }
    let filled: Vec<Term> = sub
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.unwrap_or(Term::Var(i + 1)))
        .collect();
    Some(u.replace_at(pos, r.rhs.substitute(&filled)))
}

/// Applies `rule` at `pos` in `u`, if it matches there.
pub fn apply_rule_at(rule: &TrsRule, u: &Term, pos: &[usize]) -> Option<Term> {
    rewrite_at(rule, u, pos, u.at(pos)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub rule: usize,
    pub position: Vec<usize>,
    pub result: Term,
}

/// All one-step reducts of `u`.
pub fn trs_step(trs: &Trs, u: &Term) -> Vec<Term> {
    trs.redexes(u).into_iter().map(|r| r.result).collect()
}

/// Every term over the algebraic operators of `sig` and variables
/// `x1..x_vars` with depth at most `depth` (variables and constants have
/// depth 1), sorted by depth then structure.
pub fn term_universe(sig: &Signature, depth: usize, vars: usize) -> Vec<Term> {
    let ops: Vec<&Operator> = sig
        .operators()
        .iter()
        .filter(|o| o.is_algebraic())
        .collect();
    let mut levels: Vec<Vec<Term>> = Vec::new();
    let mut all: Vec<Term> = Vec::new();
    for d in 1..=depth {
        let mut fresh = Vec::new();
        if d == 1 {
            fresh.extend((1..=vars).map(Term::Var));
        }
        for op in &ops {
            if op.inputs() == 0 {
                if d == 1 {
                    fresh.push(Term::constant(op.name()));
                }
                continue;
            }
            // Arguments of depth < d with at least one of depth d-1.
            let args_pool = &all;
            let prev: &[Term] = levels.last().map_or(&[], |v| v.as_slice());
            for combo in itertools::Itertools::multi_cartesian_product(
                (0..op.inputs()).map(|_| args_pool.iter().cloned()),
            ) {
                if combo.iter().any(|t| prev.contains(t)) {
                    fresh.push(Term::app(op.name(), combo));
                }
            }
        }
        all.extend(fresh.iter().cloned());
        levels.push(fresh);
    }
    all
}

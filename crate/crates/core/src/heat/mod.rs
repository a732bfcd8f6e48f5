//! Termination orders from interpretations of circuits as triples
//! `(f_*, f^*, [f])`: a descending-current map, an ascending-current map and
//! a heat in a commutative monoid.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Dst, Node, Src};

mod check;
pub(crate) use check::check_rule_with;
pub mod compare;
mod interp;
pub mod multiset;
pub mod poly;
pub mod sampled;
mod tables;

pub use check::{
    check_rule, layered_termination, Certificate, CertificateEntry, LayerVerdict, RuleCheck,
    RuleVerdict, TerminationFailure,
};
pub use compare::{
    compare_multiset, compare_sym, refute_sym, Carrier, CarrierConfig, Cmp, HeatKind,
};
pub use interp::{
    monotonicity_check, parse_heat, parse_interpretation, parse_poly, Interpretation, Monotonicity,
};
pub use multiset::{Multiset, MultisetExpr};
pub use poly::{Poly, Var};
pub use tables::{builtin_interpretation, f1, g, lz2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeatError {
    #[error("cannot compose triples {left} and {right}")]
    ArityMismatch { left: String, right: String },
    #[error("operator `{0}` is not interpreted")]
    MissingOperator(String),
    #[error("heat kinds differ")]
    KindMismatch,
    #[error("triple for `{op}` has the wrong shape: {message}")]
    BadTriple { op: String, message: String },
    #[error("interpretation `{name}` does not cover the signature: missing {missing}")]
    Coverage { name: String, missing: String },
    #[error("unknown interpretation `{0}`")]
    UnknownInterpretation(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A heat: a natural-number polynomial or a symbolic multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Heat {
    Nat(Poly),
    Multiset(MultisetExpr),
}

impl Heat {
    pub fn zero(kind: HeatKind) -> Heat {
        match kind {
            HeatKind::Nat => Heat::Nat(Poly::zero()),
            HeatKind::Multiset => Heat::Multiset(MultisetExpr::zero()),
        }
    }

    pub fn kind(&self) -> HeatKind {
        match self {
            Heat::Nat(_) => HeatKind::Nat,
            Heat::Multiset(_) => HeatKind::Multiset,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Heat::Nat(p) => p.is_zero(),
            Heat::Multiset(m) => m.is_zero(),
        }
    }

    pub fn add(&self, other: &Heat) -> Result<Heat, HeatError> {
        match (self, other) {
            (Heat::Nat(a), Heat::Nat(b)) => Ok(Heat::Nat(a + b)),
            (Heat::Multiset(a), Heat::Multiset(b)) => Ok(Heat::Multiset(a.add(b))),
            _ => Err(HeatError::KindMismatch),
        }
    }

    pub fn substitute(&self, f: &impl Fn(Var) -> Option<Poly>) -> Heat {
        match self {
            Heat::Nat(p) => Heat::Nat(p.substitute(f)),
            Heat::Multiset(m) => Heat::Multiset(m.substitute(f)),
        }
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Heat {
        self.substitute(&|v| Some(Poly::var(f(v))))
    }

    pub fn compare(&self, other: &Heat, cfg: &CarrierConfig) -> Cmp {
        match (self, other) {
            (Heat::Nat(a), Heat::Nat(b)) => compare_sym(a, b, cfg),
            (Heat::Multiset(a), Heat::Multiset(b)) => compare_multiset(a, b, cfg),
            _ => Cmp::Unknown,
        }
    }

    pub fn eval(&self, f: &impl Fn(Var) -> i128) -> HeatValue {
        match self {
            Heat::Nat(p) => HeatValue::Nat(p.eval(f)),
            Heat::Multiset(m) => HeatValue::Multiset(m.eval(f)),
        }
    }

    pub fn display_with(&self, name: &impl Fn(Var) -> String) -> String {
        match self {
            Heat::Nat(p) => p.display_with(name),
            Heat::Multiset(m) => m.display_with(name),
        }
    }
}

impl fmt::Display for Heat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|v| v.to_string()))
    }
}

impl Serialize for Heat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A concrete heat.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum HeatValue {
    Nat(i128),
    Multiset(Multiset),
}

impl HeatValue {
    pub fn cmp_value(&self, other: &HeatValue) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (HeatValue::Nat(a), HeatValue::Nat(b)) => Some(a.cmp(b)),
            (HeatValue::Multiset(a), HeatValue::Multiset(b)) => Some(a.cmp_multiset(b)),
            _ => None,
        }
    }
}

/// An arrow `m -> n` of the interpretation category.
///
/// `cov[j]` is a polynomial in `Down(0..m)`, `con[i]` a polynomial in
/// `Up(0..n)` and `heat` may mention both.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InterpTriple {
    pub inputs: usize,
    pub outputs: usize,
    pub cov: Vec<Poly>,
    pub con: Vec<Poly>,
    pub heat: Heat,
}

impl InterpTriple {
    pub fn new(cov: Vec<Poly>, con: Vec<Poly>, heat: Heat) -> Self {
        InterpTriple {
            inputs: con.len(),
            outputs: cov.len(),
            cov,
            con,
            heat,
        }
    }

    pub fn identity(n: usize, kind: HeatKind) -> Self {
        InterpTriple::new(
            (0..n).map(Poly::down).collect(),
            (0..n).map(Poly::up).collect(),
            Heat::zero(kind),
        )
    }

    fn label(&self) -> String {
        format!("{} -> {}", self.inputs, self.outputs)
    }

    /// `self` followed by `g`.
    pub fn o_compose(&self, g: &InterpTriple) -> Result<InterpTriple, HeatError> {
        if self.outputs != g.inputs {
            return Err(HeatError::ArityMismatch {
                left: self.label(),
                right: g.label(),
            });
        }
        let via_f = |v: Var| match v {
            Var::Down(i) => Some(self.cov[i].clone()),
            Var::Up(_) => None,
        };
        let via_g = |v: Var| match v {
            Var::Up(j) => Some(g.con[j].clone()),
            Var::Down(_) => None,
        };
        let cov = g.cov.iter().map(|p| p.substitute(&via_f)).collect();
        let con = self.con.iter().map(|p| p.substitute(&via_g)).collect();
        let heat = self
            .heat
            .substitute(&via_g)
            .add(&g.heat.substitute(&via_f))?;
        Ok(InterpTriple::new(cov, con, heat))
    }

    pub fn o_tensor(&self, g: &InterpTriple) -> Result<InterpTriple, HeatError> {
        let (m, n) = (self.inputs, self.outputs);
        let shift = |v: Var| match v {
            Var::Down(i) => Var::Down(i + m),
            Var::Up(j) => Var::Up(j + n),
        };
        let mut cov = self.cov.clone();
        cov.extend(g.cov.iter().map(|p| p.rename(&shift)));
        let mut con = self.con.clone();
        con.extend(g.con.iter().map(|p| p.rename(&shift)));
        let heat = self.heat.add(&g.heat.rename(&shift))?;
        Ok(InterpTriple::new(cov, con, heat))
    }

    /// The mirror image `(f^*, f_*, [f]^o)`, an arrow `n -> m`.
    pub fn dual(&self) -> InterpTriple {
        let sw = |v: Var| v.swapped();
        InterpTriple::new(
            self.con.iter().map(|p| p.rename(&sw)).collect(),
            self.cov.iter().map(|p| p.rename(&sw)).collect(),
            self.heat.rename(&sw),
        )
    }

    /// Readable rendering with `i, j, …` for inputs and the following
    /// letters for outputs.
    pub fn display_named(&self) -> String {
        let name = |v: Var| var_name(v, self.inputs);
        let list = |ps: &[Poly]| {
            ps.iter()
                .map(|p| p.display_with(&name))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "cov = ({}); con = ({}); heat = {}",
            list(&self.cov),
            list(&self.con),
            self.heat.display_with(&name)
        )
    }
}

/// Letters `i, j, k, …` for the descending variables followed by the
/// ascending ones, as in hand computations.
pub fn var_name(v: Var, inputs: usize) -> String {
    const LETTERS: &str = "ijklmnpqrstuvwabcdefgh";
    let idx = match v {
        Var::Down(i) => i,
        Var::Up(j) => inputs + j,
    };
    LETTERS
        .chars()
        .nth(idx)
        .map(String::from)
        .unwrap_or_else(|| v.to_string())
}

/// Local semantics of operators for [`evaluate`]: descending values flow
/// forward, ascending values backward, and every node contributes a heat.
pub trait NodeSemantics {
    type Down: Clone;
    type Up: Clone;
    type Heat;
    type Error;

    fn cov(&self, node: &Node, ins: &[Self::Down]) -> Result<Vec<Self::Down>, Self::Error>;
    fn con(&self, node: &Node, outs: &[Self::Up]) -> Result<Vec<Self::Up>, Self::Error>;
    fn heat(
        &self,
        node: &Node,
        ins: &[Self::Down],
        outs: &[Self::Up],
    ) -> Result<Self::Heat, Self::Error>;
    fn add(&self, a: Self::Heat, b: Self::Heat) -> Result<Self::Heat, Self::Error>;
    fn zero(&self) -> Self::Heat;
}

/// Result of evaluating a circuit wire by wire.
pub struct Evaluation<D, U, H> {
    pub outputs: Vec<D>,
    pub inputs: Vec<U>,
    pub heat: H,
}

pub type EvaluationOf<S> =
    Evaluation<<S as NodeSemantics>::Down, <S as NodeSemantics>::Up, <S as NodeSemantics>::Heat>;

/// Evaluates `c` on every wire; this is the functorial extension of the
/// operator semantics, independent of any layering of `c`.
pub fn evaluate<S: NodeSemantics>(
    sem: &S,
    c: &Circuit,
    down: Vec<S::Down>,
    up: Vec<S::Up>,
) -> Result<EvaluationOf<S>, S::Error> {
    assert_eq!(down.len(), c.inputs());
    assert_eq!(up.len(), c.outputs());
    let mut fwd: Vec<Vec<S::Down>> = Vec::with_capacity(c.node_count());
    let get = |fwd: &Vec<Vec<S::Down>>, s: &Src| match *s {
        Src::Input(i) => down[i].clone(),
        Src::Node { node, port } => fwd[node][port].clone(),
    };
    let mut node_ins = Vec::with_capacity(c.node_count());
    for node in c.nodes() {
        let ins: Vec<S::Down> = node.srcs.iter().map(|s| get(&fwd, s)).collect();
        fwd.push(sem.cov(node, &ins)?);
        node_ins.push(ins);
    }
    let outputs = c.output_srcs().iter().map(|s| get(&fwd, s)).collect();

    let (input_dsts, node_dsts) = c.targets();
    let mut bwd: Vec<Option<Vec<S::Up>>> = vec![None; c.node_count()];
    let getb = |bwd: &Vec<Option<Vec<S::Up>>>, d: &Dst| match *d {
        Dst::Output(j) => up[j].clone(),
        Dst::Node { node, port } => bwd[node].as_ref().expect("topological order")[port].clone(),
    };
    let mut heat = sem.zero();
    for (k, node) in c.nodes().iter().enumerate().rev() {
        let outs: Vec<S::Up> = node_dsts[k].iter().map(|d| getb(&bwd, d)).collect();
        let h = sem.heat(node, &node_ins[k], &outs)?;
        heat = sem.add(h, heat)?;
        bwd[k] = Some(sem.con(node, &outs)?);
    }
    let inputs = input_dsts.iter().map(|d| getb(&bwd, d)).collect();
    Ok(Evaluation {
        outputs,
        inputs,
        heat,
    })
}

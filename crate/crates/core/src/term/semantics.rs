//! The two semantic oracles for circuits: projection to term families and
//! finite-set functions for resource-only circuits.

use std::fmt;

use serde::Serialize;

use crate::circuit::{Circuit, Src};
use crate::translate::{DELTA, EPSILON, TAU};

use super::{Term, TermError, TermFamily};

/// Evaluates `c` by sending `tau` to `(x2,x1)`, `delta` to `(x1,x1)`,
/// `epsilon` to the empty family and an algebraic `phi` to `phi(x1..xn)`.
pub fn project_pi(c: &Circuit) -> Result<TermFamily, TermError> {
    let mut values: Vec<Vec<Term>> = Vec::with_capacity(c.node_count());
    let value = |values: &Vec<Vec<Term>>, s: &Src| match *s {
        Src::Input(i) => Term::Var(i + 1),
        Src::Node { node, port } => values[node][port].clone(),
    };
    for node in c.nodes() {
        let args: Vec<Term> = node.srcs.iter().map(|s| value(&values, s)).collect();
        let op = &node.op;
        let outs = match op.name() {
            TAU if op.inputs() == 2 && op.outputs() == 2 => vec![args[1].clone(), args[0].clone()],
            DELTA if op.inputs() == 1 && op.outputs() == 2 => {
                vec![args[0].clone(), args[0].clone()]
            }
            EPSILON if op.inputs() == 1 && op.outputs() == 0 => Vec::new(),
            name if op.is_algebraic() => vec![Term::app(name, args)],
            name => return Err(TermError::NoSemantics(name.to_string())),
        };
        values.push(outs);
    }
    let terms = c.output_srcs().iter().map(|s| value(&values, s)).collect();
    TermFamily::new(c.inputs(), terms)
}

/// A function `[n] -> [m]`, the finite-set reading of an arrow `m -> n`.
///
/// `map[j]` is the (0-based) input feeding output `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FinFun {
    pub m: usize,
    pub n: usize,
    pub map: Vec<usize>,
}

impl FinFun {
    pub fn new(m: usize, map: Vec<usize>) -> Self {
        assert!(map.iter().all(|&i| i < m), "image out of range");
        FinFun {
            m,
            n: map.len(),
            map,
        }
    }

    pub fn identity(n: usize) -> Self {
        FinFun::new(n, (0..n).collect())
    }

    pub fn swap() -> Self {
        FinFun::new(2, vec![1, 0])
    }

    pub fn duplicate() -> Self {
        FinFun::new(1, vec![0, 0])
    }

    pub fn erase() -> Self {
        FinFun::new(1, Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.m == self.n && self.map.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// Arrow composition `self` then `g`; as functions, `self.map ∘ g.map`.
    pub fn then(&self, g: &FinFun) -> FinFun {
        assert_eq!(self.n, g.m, "interface mismatch");
        FinFun::new(self.m, g.map.iter().map(|&j| self.map[j]).collect())
    }

    pub fn tensor(&self, g: &FinFun) -> FinFun {
        let mut map = self.map.clone();
        map.extend(g.map.iter().map(|&j| j + self.m));
        FinFun::new(self.m + g.m, map)
    }

    /// The family of variables `(x_{f(1)}, …, x_{f(n)})`.
    pub fn to_family(&self) -> TermFamily {
        TermFamily::new(self.m, self.map.iter().map(|&i| Term::Var(i + 1)).collect())
            .expect("variables in range")
    }

    /// Inverse of [`FinFun::to_family`] on variable-only families.
    pub fn from_family(f: &TermFamily) -> Option<FinFun> {
        let map = f
            .terms()
            .iter()
            .map(|t| match t {
                Term::Var(i) => Some(i - 1),
                Term::App(..) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(FinFun::new(f.source(), map))
    }
}

impl fmt::Display for FinFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] -> [{}]:", self.n, self.m)?;
        for (j, i) in self.map.iter().enumerate() {
            write!(f, " {}->{}", j + 1, i + 1)?;
        }
        Ok(())
    }
}

/// Finite-set semantics of a circuit built from `tau`, `delta`, `epsilon`:
/// each wire is traced back to the circuit input it copies.
pub fn finset_semantics(c: &Circuit) -> Result<FinFun, TermError> {
    // Wire-level evaluation: every open wire carries the input it copies.
    let mut values: Vec<Vec<usize>> = Vec::with_capacity(c.node_count());
    let get = |values: &Vec<Vec<usize>>, s: &Src| match *s {
        Src::Input(i) => i,
        Src::Node { node, port } => values[node][port],
    };
    for node in c.nodes() {
        let gen = match (node.op.name(), node.op.inputs(), node.op.outputs()) {
            (TAU, 2, 2) => FinFun::swap(),
            (DELTA, 1, 2) => FinFun::duplicate(),
            (EPSILON, 1, 0) => FinFun::erase(),
            (name, ..) => return Err(TermError::NoSemantics(name.to_string())),
        };
        let ins: Vec<usize> = node.srcs.iter().map(|s| get(&values, s)).collect();
        values.push(gen.map.iter().map(|&k| ins[k]).collect());
    }
    let map = c.output_srcs().iter().map(|s| get(&values, s)).collect();
    Ok(FinFun::new(c.inputs(), map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Operator, Signature};

    fn sig() -> Signature {
        Signature::from_operators([
            Operator::new("mu", 2, 1),
            Operator::new("eta", 0, 1),
            Operator::new(TAU, 2, 2),
            Operator::new(DELTA, 1, 2),
            Operator::new(EPSILON, 1, 0),
        ])
        .unwrap()
    }

    #[test]
    fn pi_examples() {
        let s = sig();
        let c = |t| parse_circuit(t, &s).unwrap();
        assert_eq!(
            project_pi(&c("tau")).unwrap(),
            TermFamily::new(2, vec![Term::Var(2), Term::Var(1)]).unwrap()
        );
        assert_eq!(project_pi(&c("id(3)")).unwrap(), TermFamily::identity(3));
        assert_eq!(
            project_pi(&c("delta ; mu")).unwrap(),
            TermFamily::new(1, vec![Term::app("mu", vec![Term::Var(1), Term::Var(1)])]).unwrap()
        );
    }

    #[test]
    fn finset_examples() {
        let s = sig();
        let c = |t| parse_circuit(t, &s).unwrap();
        assert_eq!(finset_semantics(&c("tau")).unwrap(), FinFun::swap());
        assert_eq!(finset_semantics(&c("delta")).unwrap(), FinFun::duplicate());
        assert_eq!(finset_semantics(&c("id(4)")).unwrap(), FinFun::identity(4));
        assert_eq!(
            finset_semantics(&c("delta ; (epsilon * id(1))")).unwrap(),
            FinFun::identity(1)
        );
        assert!(finset_semantics(&c("mu")).is_err());
    }

    #[test]
    fn family_round_trip() {
        let f = FinFun::new(3, vec![2, 0, 0, 1]);
        assert_eq!(FinFun::from_family(&f.to_family()), Some(f.clone()));
        assert_eq!(f.then(&FinFun::identity(4)), f);
        assert_eq!(FinFun::swap().then(&FinFun::swap()), FinFun::identity(2));
    }
}

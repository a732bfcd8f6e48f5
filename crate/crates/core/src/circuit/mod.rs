//! Circuits: arrows of the free product category generated by a signature.
//!
//! A [`Circuit`] is stored as a port graph. Every node is an instance of an
//! [`Operator`]; every input port of a node, and every output of the circuit,
//! records the unique [`Src`] it is wired to. Since each wire has exactly one
//! source and one target, recording the source of every target port is enough
//! to describe the whole wiring.
//!
//! Nodes are always kept in a topological order: the inputs of node `k` are
//! fed by circuit inputs or by nodes with an index smaller than `k`.
//!
//! Circuits are compared modulo the exchange and unit laws through
//! [`Circuit::canonical`].

mod canonical;
mod matching;
mod parse;
pub mod random;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use matching::{apply_context, find_matches, Context};
pub use parse::{parse_circuit, CircuitExpr};

/// Name reserved for the hole node of a [`Context`].
pub const HOLE: &str = "[]";

/// A generator with a fixed number of inputs and outputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Operator {
    name: Arc<str>,
    inputs: usize,
    outputs: usize,
}

impl Operator {
    pub fn new(name: &str, inputs: usize, outputs: usize) -> Self {
        Operator {
            name: Arc::from(name),
            inputs,
            outputs,
        }
    }

    pub(crate) fn hole(inputs: usize, outputs: usize) -> Self {
        Operator::new(HOLE, inputs, outputs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// An operator with exactly one output.
    pub fn is_algebraic(&self) -> bool {
        self.outputs == 1
    }

    pub fn is_hole(&self) -> bool {
        &*self.name == HOLE
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self.name, self.inputs, self.outputs)
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Operator", 3)?;
        st.serialize_field("name", &*self.name)?;
        st.serialize_field("inputs", &self.inputs)?;
        st.serialize_field("outputs", &self.outputs)?;
        st.end()
    }
}

/// An ordered collection of operators with pairwise distinct names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    operators: Vec<Operator>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_operators(ops: impl IntoIterator<Item = Operator>) -> Result<Self, CircuitError> {
        let mut sig = Signature::new();
        for op in ops {
            sig.add(op)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, op: Operator) -> Result<(), CircuitError> {
        if op.is_hole() {
            return Err(CircuitError::ReservedName(op.name().to_string()));
        }
        if self.get(op.name()).is_some() {
            return Err(CircuitError::DuplicateOperator(op.name().to_string()));
        }
        self.operators.push(op);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Operator> {
        self.operators.iter().find(|op| op.name() == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn is_algebraic(&self) -> bool {
        self.operators.iter().all(Operator::is_algebraic)
    }

    /// Generator circuit for the named operator.
    pub fn generator(&self, name: &str) -> Result<Circuit, CircuitError> {
        self.get(name)
            .map(|op| Circuit::generator(op.clone()))
            .ok_or_else(|| CircuitError::UnknownOperator(name.to_string()))
    }
}

/// Source end of a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Src {
    /// The `i`-th input of the circuit.
    Input(usize),
    /// Output port `port` of node `node`.
    Node { node: usize, port: usize },
}

/// Target end of a wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dst {
    /// The `j`-th output of the circuit.
    Output(usize),
    /// Input port `port` of node `node`.
    Node { node: usize, port: usize },
}

/// An operator instance together with the sources of its input ports.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub op: Operator,
    pub srcs: Vec<Src>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("interface mismatch: {left} outputs cannot feed {right} inputs")]
    InterfaceMismatch { left: usize, right: usize },
    #[error("hole expects {expected_in} -> {expected_out}, got {found_in} -> {found_out}")]
    HoleArity {
        expected_in: usize,
        expected_out: usize,
        found_in: usize,
        found_out: usize,
    },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("duplicate operator `{0}`")]
    DuplicateOperator(String),
    #[error("operator name `{0}` is reserved")]
    ReservedName(String),
    #[error("operator `{name}` used with arity {found_in} -> {found_out}, declared {inputs} -> {outputs}")]
    ArityMismatch {
        name: String,
        inputs: usize,
        outputs: usize,
        found_in: usize,
        found_out: usize,
    },
    #[error("malformed circuit: {0}")]
    Malformed(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// An arrow `m -> n` of the free product category over some signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    inputs: usize,
    nodes: Vec<Node>,
    outputs: Vec<Src>,
}

impl Circuit {
    /// `n` parallel wires.
    pub fn identity(n: usize) -> Self {
        Circuit {
            inputs: n,
            nodes: Vec::new(),
            outputs: (0..n).map(Src::Input).collect(),
        }
    }

    /// The circuit made of a single operator.
    pub fn generator(op: Operator) -> Self {
        let srcs = (0..op.inputs()).map(Src::Input).collect();
        let outputs = (0..op.outputs())
            .map(|port| Src::Node { node: 0, port })
            .collect();
        Circuit {
            inputs: op.inputs(),
            nodes: vec![Node { op, srcs }],
            outputs,
        }
    }

    /// Wire-only circuit sending input `perm[j]` to output `j`.
    ///
    /// Built from adjacent transpositions of `tau`, which must be a `2 -> 2`
    /// operator.
    pub fn permutation(perm: &[usize], tau: &Operator) -> Self {
        let n = perm.len();
        let swap = Circuit::generator(tau.clone());
        let mut current: Vec<usize> = (0..n).collect();
        let mut circuit = Circuit::identity(n);
        // Bubble sort the wire contents towards `perm`.
        for (target, &wire) in perm.iter().enumerate() {
            let mut pos = current
                .iter()
                .position(|&w| w == wire)
                .expect("perm must be a permutation");
            while pos > target {
                let layer = Circuit::identity(pos - 1)
                    .tensor(&swap)
                    .tensor(&Circuit::identity(n - pos - 1));
                circuit = circuit.compose(&layer).expect("arity preserved");
                current.swap(pos - 1, pos);
                pos -= 1;
            }
        }
        circuit
    }

    /// Builds a circuit from raw parts, checking every invariant and putting
    /// nodes into a topological order.
    pub fn from_parts(
        inputs: usize,
        nodes: Vec<Node>,
        outputs: Vec<Src>,
    ) -> Result<Self, CircuitError> {
        let circuit = Self::toposorted(inputs, nodes, outputs)?;
        circuit.validate()?;
        Ok(circuit)
    }

    /// Like [`Circuit::from_parts`], also returning the new position of
    /// every given node.
    pub fn from_parts_tracked(
        inputs: usize,
        nodes: Vec<Node>,
        outputs: Vec<Src>,
    ) -> Result<(Self, Vec<usize>), CircuitError> {
        let order = topological_order(&nodes, |k| k)?;
        let circuit = Self::reordered(inputs, &nodes, &outputs, &order);
        circuit.validate()?;
        let mut position = vec![0; order.len()];
        for (k, &old) in order.iter().enumerate() {
            position[old] = k;
        }
        Ok((circuit, position))
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn output_srcs(&self) -> &[Src] {
        &self.outputs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_identity(&self) -> bool {
        self.nodes.is_empty()
            && self
                .outputs
                .iter()
                .enumerate()
                .all(|(j, s)| *s == Src::Input(j))
    }

    /// Set of operators occurring in the circuit.
    pub fn operators(&self) -> BTreeSet<Operator> {
        self.nodes.iter().map(|n| n.op.clone()).collect()
    }

    pub fn uses_only(&self, names: &[&str]) -> bool {
        self.nodes.iter().all(|n| names.contains(&n.op.name()))
    }

    /// `self` above `other`: outputs of `self` feed the inputs of `other`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.outputs() != other.inputs() {
            return Err(CircuitError::InterfaceMismatch {
                left: self.outputs(),
                right: other.inputs(),
            });
        }
        let offset = self.nodes.len();
        let remap = |s: &Src| match *s {
            Src::Input(i) => self.outputs[i],
            Src::Node { node, port } => Src::Node {
                node: node + offset,
                port,
            },
        };
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().map(|n| Node {
            op: n.op.clone(),
            srcs: n.srcs.iter().map(remap).collect(),
        }));
        Ok(Circuit {
            inputs: self.inputs,
            nodes,
            outputs: other.outputs.iter().map(remap).collect(),
        })
    }

    /// `self` and `other` side by side, `self` on the left.
    pub fn tensor(&self, other: &Circuit) -> Circuit {
        let offset = self.nodes.len();
        let shift = |s: &Src| match *s {
            Src::Input(i) => Src::Input(i + self.inputs),
            Src::Node { node, port } => Src::Node {
                node: node + offset,
                port,
            },
        };
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().map(|n| Node {
            op: n.op.clone(),
            srcs: n.srcs.iter().map(shift).collect(),
        }));
        let mut outputs = self.outputs.clone();
        outputs.extend(other.outputs.iter().map(shift));
        Circuit {
            inputs: self.inputs + other.inputs,
            nodes,
            outputs,
        }
    }

    /// Tensor product of a sequence of circuits, `identity(0)` when empty.
    pub fn tensor_all<'a>(parts: impl IntoIterator<Item = &'a Circuit>) -> Circuit {
        parts
            .into_iter()
            .fold(Circuit::identity(0), |acc, c| acc.tensor(c))
    }

    /// Target of every wire, indexed by source.
    ///
    /// Returns the targets of the circuit inputs and, for each node, of each
    /// of its output ports.
    pub fn targets(&self) -> (Vec<Dst>, Vec<Vec<Dst>>) {
        let mut from_inputs = vec![Dst::Output(usize::MAX); self.inputs];
        let mut from_nodes: Vec<Vec<Dst>> = self
            .nodes
            .iter()
            .map(|n| vec![Dst::Output(usize::MAX); n.op.outputs()])
            .collect();
        let mut set = |src: Src, dst: Dst| match src {
            Src::Input(i) => from_inputs[i] = dst,
            Src::Node { node, port } => from_nodes[node][port] = dst,
        };
        for (k, node) in self.nodes.iter().enumerate() {
            for (port, &s) in node.srcs.iter().enumerate() {
                set(s, Dst::Node { node: k, port });
            }
        }
        for (j, &s) in self.outputs.iter().enumerate() {
            set(s, Dst::Output(j));
        }
        (from_inputs, from_nodes)
    }

    /// Checks linearity, acyclicity (via topological indices) and arities.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut used_inputs = vec![false; self.inputs];
        let mut used_ports: Vec<Vec<bool>> = self
            .nodes
            .iter()
            .map(|n| vec![false; n.op.outputs()])
            .collect();
        let mut claim = |src: Src, at: usize| -> Result<(), CircuitError> {
            let slot = match src {
                Src::Input(i) => used_inputs.get_mut(i),
                Src::Node { node, port } => {
                    if node >= at {
                        return Err(CircuitError::Malformed(format!(
                            "node {node} feeds an earlier position {at}"
                        )));
                    }
                    used_ports.get_mut(node).and_then(|p| p.get_mut(port))
                }
            };
            match slot {
                None => Err(CircuitError::Malformed(format!("dangling source {src:?}"))),
                Some(true) => Err(CircuitError::Malformed(format!(
                    "source {src:?} used twice"
                ))),
                Some(flag) => {
                    *flag = true;
                    Ok(())
                }
            }
        };
        for (k, node) in self.nodes.iter().enumerate() {
            if node.srcs.len() != node.op.inputs() {
                return Err(CircuitError::Malformed(format!(
                    "node {k} has {} sources for {} inputs",
                    node.srcs.len(),
                    node.op.inputs()
                )));
            }
            for &s in &node.srcs {
                claim(s, k)?;
            }
        }
        for &s in &self.outputs {
            claim(s, self.nodes.len())?;
        }
        if used_inputs.iter().any(|u| !u) || used_ports.iter().flatten().any(|u| !u) {
            return Err(CircuitError::Malformed("unconnected port".into()));
        }
        Ok(())
    }

    /// Checks that every operator is declared in `sig` with the same arity.
    pub fn check_signature(&self, sig: &Signature) -> Result<(), CircuitError> {
        for node in &self.nodes {
            let op = &node.op;
            match sig.get(op.name()) {
                None => return Err(CircuitError::UnknownOperator(op.name().to_string())),
                Some(decl) if decl != op => {
                    return Err(CircuitError::ArityMismatch {
                        name: op.name().to_string(),
                        inputs: decl.inputs(),
                        outputs: decl.outputs(),
                        found_in: op.inputs(),
                        found_out: op.outputs(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Reorders arbitrary nodes topologically (stable with respect to the
    /// given order) and remaps the wiring accordingly.
    pub(crate) fn toposorted(
        inputs: usize,
        nodes: Vec<Node>,
        outputs: Vec<Src>,
    ) -> Result<Circuit, CircuitError> {
        let order = topological_order(&nodes, |k| k)?;
        Ok(Self::reordered(inputs, &nodes, &outputs, &order))
    }

    /// Rebuilds the circuit with node `order[k]` placed at position `k`.
    pub(crate) fn reordered(
        inputs: usize,
        nodes: &[Node],
        outputs: &[Src],
        order: &[usize],
    ) -> Circuit {
        let mut position = vec![usize::MAX; nodes.len()];
        for (k, &old) in order.iter().enumerate() {
            position[old] = k;
        }
        let remap = |s: &Src| match *s {
            Src::Input(i) => Src::Input(i),
            Src::Node { node, port } => Src::Node {
                node: position[node],
                port,
            },
        };
        Circuit {
            inputs,
            nodes: order
                .iter()
                .map(|&old| Node {
                    op: nodes[old].op.clone(),
                    srcs: nodes[old].srcs.iter().map(remap).collect(),
                })
                .collect(),
            outputs: outputs.iter().map(remap).collect(),
        }
    }

    /// Nodes grouped by depth: layer `d` holds the nodes whose longest path
    /// from the circuit inputs has `d` edges between nodes.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut depth = vec![0usize; self.nodes.len()];
        for (k, node) in self.nodes.iter().enumerate() {
            depth[k] = node
                .srcs
                .iter()
                .filter_map(|s| match s {
                    Src::Node { node, .. } => Some(depth[*node] + 1),
                    Src::Input(_) => None,
                })
                .max()
                .unwrap_or(0);
        }
        let height = depth.iter().copied().max().map_or(0, |d| d + 1);
        let mut layers = vec![Vec::new(); height];
        for (k, d) in depth.into_iter().enumerate() {
            layers[d].push(k);
        }
        layers
    }

    /// Plain-text dump of the layering, one line per layer.
    pub fn layer_dump(&self) -> String {
        let mut out = format!("{} -> {}\n", self.inputs, self.outputs());
        for (d, layer) in self.layers().iter().enumerate() {
            let items: Vec<String> = layer
                .iter()
                .map(|&k| {
                    let n = &self.nodes[k];
                    let srcs: Vec<String> = n.srcs.iter().map(src_label).collect();
                    format!("#{k} {}({})", n.op.name(), srcs.join(","))
                })
                .collect();
            out.push_str(&format!("layer {d}: {}\n", items.join("  ")));
        }
        let outs: Vec<String> = self.outputs.iter().map(src_label).collect();
        out.push_str(&format!("out: {}\n", outs.join(",")));
        out
    }

    /// Canonical representative modulo exchange and unit laws.
    pub fn canonical(&self) -> Circuit {
        canonical::canonical_form(self)
    }

    /// Equality of arrows in the free product category.
    pub fn equivalent(&self, other: &Circuit) -> bool {
        self.inputs == other.inputs
            && self.outputs() == other.outputs()
            && self.nodes.len() == other.nodes.len()
            && self.canonical() == other.canonical()
    }

    /// True when the circuit can be drawn without crossing wires, i.e. it
    /// is an arrow of the free (non-symmetric) product category.
    pub fn is_planar(&self) -> bool {
        crate::circuit::parse::try_print(self).is_some()
    }

    /// Writes the circuit in the textual grammar accepted by
    /// [`parse_circuit`], as a vertical sequence of layers.
    pub fn to_expr(&self) -> String {
        crate::circuit::parse::print_circuit(self)
    }
}

fn src_label(s: &Src) -> String {
    match s {
        Src::Input(i) => format!("in{i}"),
        Src::Node { node, port } => format!("#{node}.{port}"),
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

/// Kahn's algorithm, picking the ready node with the smallest `rank` first.
pub(crate) fn topological_order(
    nodes: &[Node],
    rank: impl Fn(usize) -> usize,
) -> Result<Vec<usize>, CircuitError> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut pending: Vec<usize> = nodes
        .iter()
        .map(|n| {
            n.srcs
                .iter()
                .filter(|s| matches!(s, Src::Node { .. }))
                .count()
        })
        .collect();
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (k, node) in nodes.iter().enumerate() {
        for s in &node.srcs {
            if let Src::Node { node: from, .. } = *s {
                if from >= nodes.len() {
                    return Err(CircuitError::Malformed(format!("dangling node {from}")));
                }
                users[from].push(k);
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = pending
        .iter()
        .enumerate()
        .filter(|(_, &p)| p == 0)
        .map(|(k, _)| Reverse((rank(k), k)))
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(Reverse((_, k))) = ready.pop() {
        order.push(k);
        for &u in &users[k] {
            pending[u] -= 1;
            if pending[u] == 0 {
                ready.push(Reverse((rank(u), u)));
            }
        }
    }
    if order.len() != nodes.len() {
        return Err(CircuitError::Malformed("cyclic wiring".into()));
    }
    Ok(order)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn op(name: &str, i: usize, o: usize) -> Circuit {
        Circuit::generator(Operator::new(name, i, o))
    }

    pub fn delta() -> Circuit {
        op("delta", 1, 2)
    }

    #[test]
    fn identity_zero_is_empty() {
        let c = Circuit::identity(0);
        assert_eq!(c.inputs(), 0);
        assert_eq!(c.outputs(), 0);
        assert_eq!(c.node_count(), 0);
        assert!(c.is_identity());
    }

    #[test]
    fn identity_three_wires() {
        let c = Circuit::identity(3);
        assert_eq!((c.inputs(), c.outputs()), (3, 3));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn compose_arities() {
        let d = delta();
        let c = d.compose(&Circuit::identity(1).tensor(&d)).unwrap();
        assert_eq!((c.inputs(), c.outputs()), (1, 3));
        c.validate().unwrap();
    }

    #[test]
    fn compose_mismatch() {
        let d = delta();
        assert_eq!(
            d.compose(&d),
            Err(CircuitError::InterfaceMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn unit_laws() {
        let eps = op("epsilon", 1, 0);
        assert!(Circuit::identity(1).compose(&eps).unwrap().equivalent(&eps));
        let mu = op("mu", 2, 1);
        assert!(Circuit::identity(2).compose(&mu).unwrap().equivalent(&mu));
        assert!(mu.tensor(&Circuit::identity(0)).equivalent(&mu));
        assert!(Circuit::identity(0).tensor(&mu).equivalent(&mu));
    }

    #[test]
    fn tensor_arities() {
        let c = op("eta", 0, 1).tensor(&op("epsilon", 1, 0));
        assert_eq!((c.inputs(), c.outputs()), (1, 1));
    }

    #[test]
    fn permutation_realizes_perm() {
        let tau = Operator::new("tau", 2, 2);
        let perm = [2, 0, 3, 1];
        let c = Circuit::permutation(&perm, &tau);
        c.validate().unwrap();
        // Track wires through the swaps.
        let mut wires: Vec<usize> = (0..4).collect();
        let mut vals: Vec<Vec<usize>> = Vec::new();
        for node in c.nodes() {
            let ins: Vec<usize> = node
                .srcs
                .iter()
                .map(|s| match s {
                    Src::Input(i) => wires[*i],
                    Src::Node { node, port } => vals[*node][*port],
                })
                .collect();
            vals.push(vec![ins[1], ins[0]]);
        }
        wires = c
            .output_srcs()
            .iter()
            .map(|s| match s {
                Src::Input(i) => *i,
                Src::Node { node, port } => vals[*node][*port],
            })
            .collect();
        assert_eq!(wires, perm);
    }

    #[test]
    fn validate_rejects_double_use() {
        let bad = Circuit {
            inputs: 1,
            nodes: vec![],
            outputs: vec![Src::Input(0), Src::Input(0)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn signature_rejects_duplicates() {
        let mut sig = Signature::new();
        sig.add(Operator::new("mu", 2, 1)).unwrap();
        assert!(matches!(
            sig.add(Operator::new("mu", 2, 1)),
            Err(CircuitError::DuplicateOperator(_))
        ));
        assert!(sig.add(Operator::new(HOLE, 1, 1)).is_err());
    }
}

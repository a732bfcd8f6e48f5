//! Canonical numbering of circuit nodes.
//!
//! Nodes connected to the interface are ranked by a breadth-first traversal
//! seeded from the interface in order (input 0, 1, …, then output 0, 1, …),
//! visiting each node's input ports then output ports in port order. Ports
//! are ordered, so the ranking only depends on the graph, never on how the
//! circuit was assembled. Components touching no interface wire (closed
//! `0 -> 0` pieces) are ranked by the smallest encoding among all possible
//! roots and then sorted. A topological sort that always emits the ready node
//! of smallest rank fixes the final order.

use std::collections::VecDeque;

use super::{topological_order, Circuit, Dst, Src};

/// Node adjacency in port order: sources feeding each node, then targets of
/// its outputs.
struct Adjacency {
    neighbours: Vec<Vec<usize>>,
}

impl Adjacency {
    fn new(c: &Circuit) -> Self {
        let (_, from_nodes) = c.targets();
        let neighbours = c
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, node)| {
                let ins = node.srcs.iter().filter_map(|s| match s {
                    Src::Node { node, .. } => Some(*node),
                    Src::Input(_) => None,
                });
                let outs = from_nodes[k].iter().filter_map(|d| match d {
                    Dst::Node { node, .. } => Some(*node),
                    Dst::Output(_) => None,
                });
                ins.chain(outs).collect()
            })
            .collect();
        Adjacency { neighbours }
    }

    /// Breadth-first ranking from `seeds`, writing into `rank` starting at
    /// `next`. Returns the nodes in discovery order.
    fn bfs(&self, seeds: &[usize], rank: &mut [usize], next: &mut usize) -> Vec<usize> {
        let mut queue = VecDeque::new();
        let mut order = Vec::new();
        let mut visit = |k: usize, queue: &mut VecDeque<usize>, rank: &mut [usize]| {
            if rank[k] == usize::MAX {
                rank[k] = *next;
                *next += 1;
                queue.push_back(k);
                order.push(k);
            }
        };
        for &s in seeds {
            visit(s, &mut queue, rank);
        }
        while let Some(k) = queue.pop_front() {
            for &n in &self.neighbours[k] {
                visit(n, &mut queue, rank);
            }
        }
        order
    }
}

type Encoding = Vec<(String, usize, usize, Vec<(usize, usize)>)>;

/// Structure of a closed component listed in rank order.
fn encode(c: &Circuit, members: &[usize], rank: &[usize], base: usize) -> Encoding {
    let mut sorted: Vec<usize> = members.to_vec();
    sorted.sort_by_key(|&k| rank[k]);
    sorted
        .iter()
        .map(|&k| {
            let node = &c.nodes()[k];
            let srcs = node
                .srcs
                .iter()
                .map(|s| match *s {
                    Src::Node { node, port } => (rank[node] - base, port),
                    Src::Input(i) => (usize::MAX, i),
                })
                .collect();
            (
                node.op.name().to_string(),
                node.op.inputs(),
                node.op.outputs(),
                srcs,
            )
        })
        .collect()
}

pub(super) fn canonical_form(c: &Circuit) -> Circuit {
    let n = c.node_count();
    let adj = Adjacency::new(c);
    let (from_inputs, _) = c.targets();
    let mut seeds = Vec::new();
    for d in &from_inputs {
        if let Dst::Node { node, .. } = d {
            seeds.push(*node);
        }
    }
    for s in c.output_srcs() {
        if let Src::Node { node, .. } = s {
            seeds.push(*node);
        }
    }
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    adj.bfs(&seeds, &mut rank, &mut next);

    if next < n {
        // Closed components: collect them, then pick a canonical root each.
        let mut components: Vec<Vec<usize>> = Vec::new();
        let mut scratch = rank.clone();
        for k in 0..n {
            if scratch[k] == usize::MAX {
                let mut dummy = 0;
                components.push(adj.bfs(&[k], &mut scratch, &mut dummy));
            }
        }
        let mut encoded: Vec<(Encoding, Vec<usize>)> = components
            .into_iter()
            .map(|members| {
                let mut best: Option<(Encoding, Vec<usize>)> = None;
                for &root in &members {
                    let mut local = vec![usize::MAX; n];
                    let mut count = 0;
                    let order = adj.bfs(&[root], &mut local, &mut count);
                    let enc = encode(c, &members, &local, 0);
                    if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                        best = Some((enc, order));
                    }
                }
                best.expect("component is non-empty")
            })
            .collect();
        encoded.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, order) in encoded {
            for k in order {
                rank[k] = next;
                next += 1;
            }
        }
    }

    let order = topological_order(c.nodes(), |k| rank[k]).expect("valid circuit is acyclic");
    Circuit::reordered(c.inputs(), c.nodes(), c.output_srcs(), &order)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{delta, op};
    use super::super::Circuit;

    #[test]
    fn identity_is_canonical() {
        for n in 0..4 {
            assert_eq!(Circuit::identity(n).canonical(), Circuit::identity(n));
        }
    }

    #[test]
    fn exchange_law() {
        let f = delta();
        let g = op("mu", 2, 1);
        let lhs = f
            .tensor(&Circuit::identity(2))
            .compose(&Circuit::identity(2).tensor(&g))
            .unwrap();
        let rhs = Circuit::identity(1)
            .tensor(&g)
            .compose(&f.tensor(&Circuit::identity(1)))
            .unwrap();
        assert_eq!(lhs.canonical(), f.tensor(&g).canonical());
        assert_eq!(rhs.canonical(), f.tensor(&g).canonical());
    }

    #[test]
    fn distinguishes_port_order() {
        let d = delta();
        let tau = op("tau", 2, 2);
        let a = d.compose(&tau).unwrap();
        assert!(!a.equivalent(&d));
    }

    #[test]
    fn floating_components_commute() {
        let a = op("eta", 0, 1).compose(&op("epsilon", 1, 0)).unwrap();
        let b = op("eta", 0, 1)
            .compose(&delta())
            .unwrap()
            .compose(&op("mu", 2, 1))
            .unwrap()
            .compose(&op("epsilon", 1, 0))
            .unwrap();
        let x = a.tensor(&b).tensor(&Circuit::identity(1));
        let y = Circuit::identity(1).tensor(&b).tensor(&a);
        assert_eq!(x.canonical(), y.canonical());
        assert_eq!(x.canonical().canonical(), x.canonical());
    }
}

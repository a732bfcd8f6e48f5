//! Subcircuit matching and contexts.

use serde::Serialize;

use super::{Circuit, CircuitError, Dst, Node, Operator, Src};

/// A circuit with a single hole node.
///
/// Produced by [`find_matches`]: `matched[p]` is the host node that pattern
/// node `p` was mapped to. Pasting a circuit with the hole's arities back in
/// with [`apply_context`] yields `c[f]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    host: Circuit,
    hole: usize,
    matched: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContextSummary {
    pub hole_inputs: usize,
    pub hole_outputs: usize,
    pub matched_nodes: Vec<usize>,
}

impl Context {
    /// The context whose hole is the whole circuit.
    pub fn trivial(inputs: usize, outputs: usize) -> Self {
        let hole = Node {
            op: Operator::hole(inputs, outputs),
            srcs: (0..inputs).map(Src::Input).collect(),
        };
        let outs = (0..outputs)
            .map(|port| Src::Node { node: 0, port })
            .collect();
        Context {
            host: Circuit {
                inputs,
                nodes: vec![hole],
                outputs: outs,
            },
            hole: 0,
            matched: Vec::new(),
        }
    }

    pub fn host(&self) -> &Circuit {
        &self.host
    }

    pub fn hole_index(&self) -> usize {
        self.hole
    }

    pub fn hole_inputs(&self) -> usize {
        self.host.nodes[self.hole].op.inputs()
    }

    pub fn hole_outputs(&self) -> usize {
        self.host.nodes[self.hole].op.outputs()
    }

    /// Host node indices covered by the hole, in pattern node order.
    pub fn matched(&self) -> &[usize] {
        &self.matched
    }

    pub fn summary(&self) -> ContextSummary {
        ContextSummary {
            hole_inputs: self.hole_inputs(),
            hole_outputs: self.hole_outputs(),
            matched_nodes: self.matched.clone(),
        }
    }

    /// Nodes of the context outside the hole.
    pub fn surrounding_nodes(&self) -> usize {
        self.host.node_count() - 1
    }
}

/// Pastes `f` into the hole of `ctx`.
pub fn apply_context(ctx: &Context, f: &Circuit) -> Result<Circuit, CircuitError> {
    let (hi, ho) = (ctx.hole_inputs(), ctx.hole_outputs());
    if f.inputs() != hi || f.outputs() != ho {
        return Err(CircuitError::HoleArity {
            expected_in: hi,
            expected_out: ho,
            found_in: f.inputs(),
            found_out: f.outputs(),
        });
    }
    let host = &ctx.host;
    let h = ctx.hole;
    let index = |k: usize| if k < h { k } else { k - 1 };
    let offset = host.node_count() - 1;
    let hole_srcs = &host.nodes[h].srcs;

    // Sources inside the context never point at the hole's own inputs.
    let outer = |s: Src| match s {
        Src::Input(i) => Src::Input(i),
        Src::Node { node, port } => {
            debug_assert_ne!(node, h);
            Src::Node {
                node: index(node),
                port,
            }
        }
    };
    let inner = |s: Src| match s {
        Src::Input(i) => outer(hole_srcs[i]),
        Src::Node { node, port } => Src::Node {
            node: node + offset,
            port,
        },
    };
    let resolve = |s: Src| match s {
        Src::Node { node, port } if node == h => inner(f.outputs[port]),
        other => outer(other),
    };

    let mut nodes: Vec<Node> = host
        .nodes
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != h)
        .map(|(_, n)| Node {
            op: n.op.clone(),
            srcs: n.srcs.iter().map(|&s| resolve(s)).collect(),
        })
        .collect();
    nodes.extend(f.nodes.iter().map(|n| Node {
        op: n.op.clone(),
        srcs: n.srcs.iter().map(|&s| inner(s)).collect(),
    }));
    let outputs = host.outputs.iter().map(|&s| resolve(s)).collect();
    Circuit::toposorted(host.inputs, nodes, outputs)
}

/// Every context `c` with `c[pattern] = host`.
///
/// Matches are convex and ordered by the sorted list of host nodes they cover,
/// so callers wanting a canonical order should canonicalize `host` first.
/// Patterns without nodes, or with a wire running straight from an input to
/// an output, have no well-defined finite set of matches and yield nothing.
pub fn find_matches(pattern: &Circuit, host: &Circuit) -> Vec<Context> {
    if pattern.node_count() == 0
        || pattern.node_count() > host.node_count()
        || pattern.outputs.iter().any(|s| matches!(s, Src::Input(_)))
    {
        return Vec::new();
    }
    let (p_in_dst, p_out_dst) = pattern.targets();
    let (_, h_out_dst) = host.targets();
    let components = components(pattern, &p_out_dst);

    // Candidate embeddings per connected component of the pattern.
    let per_component: Vec<Vec<Vec<(usize, usize)>>> = components
        .iter()
        .map(|comp| {
            let anchor = comp[0];
            (0..host.node_count())
                .filter_map(|h| embed_component(pattern, host, &p_out_dst, &h_out_dst, anchor, h))
                .collect()
        })
        .collect();

    let mut results: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut assignment = vec![usize::MAX; pattern.node_count()];
    let mut used = vec![false; host.node_count()];
    combine(
        &per_component,
        0,
        &mut assignment,
        &mut used,
        &mut |map: &[usize]| {
            if boundary_ok(host, &p_in_dst, &p_out_dst, &h_out_dst, map) && convex(host, map) {
                let mut key = map.to_vec();
                key.sort_unstable();
                results.push((key, map.to_vec()));
            }
        },
    );
    results.sort();
    results
        .into_iter()
        .map(|(_, map)| build_context(pattern, host, &p_in_dst, map))
        .collect()
}

fn components(pattern: &Circuit, out_dst: &[Vec<Dst>]) -> Vec<Vec<usize>> {
    let n = pattern.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut result = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = result.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut i = 0;
        while i < members.len() {
            let k = members[i];
            i += 1;
            let ins = pattern.nodes[k].srcs.iter().filter_map(|s| match s {
                Src::Node { node, .. } => Some(*node),
                _ => None,
            });
            let outs = out_dst[k].iter().filter_map(|d| match d {
                Dst::Node { node, .. } => Some(*node),
                _ => None,
            });
            for nb in ins.chain(outs).collect::<Vec<_>>() {
                if comp[nb] == usize::MAX {
                    comp[nb] = id;
                    members.push(nb);
                }
            }
        }
        members.sort_unstable();
        result.push(members);
    }
    result
}

/// Propagates the forced mapping from `anchor -> h` through the ports of one
/// pattern component. Returns the list of (pattern, host) pairs.
fn embed_component(
    pattern: &Circuit,
    host: &Circuit,
    p_out_dst: &[Vec<Dst>],
    h_out_dst: &[Vec<Dst>],
    anchor: usize,
    h: usize,
) -> Option<Vec<(usize, usize)>> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    let mut stack = vec![(anchor, h)];
    let mut seen_p = std::collections::HashMap::new();
    let mut seen_h = std::collections::HashMap::new();
    while let Some((p, h)) = stack.pop() {
        match (seen_p.get(&p), seen_h.get(&h)) {
            (Some(&hh), _) if hh == h => continue,
            (Some(_), _) | (None, Some(_)) => return None,
            (None, None) => {}
        }
        if pattern.nodes[p].op != host.nodes[h].op {
            return None;
        }
        seen_p.insert(p, h);
        seen_h.insert(h, p);
        map.push((p, h));
        for (q, s) in pattern.nodes[p].srcs.iter().enumerate() {
            if let Src::Node { node, port } = *s {
                match host.nodes[h].srcs[q] {
                    Src::Node { node: hn, port: hp } if hp == port => stack.push((node, hn)),
                    _ => return None,
                }
            }
        }
        for (q, d) in p_out_dst[p].iter().enumerate() {
            if let Dst::Node { node, port } = *d {
                match h_out_dst[h][q] {
                    Dst::Node { node: hn, port: hp } if hp == port => stack.push((node, hn)),
                    _ => return None,
                }
            }
        }
    }
    map.sort_unstable();
    Some(map)
}

fn combine(
    per_component: &[Vec<Vec<(usize, usize)>>],
    i: usize,
    assignment: &mut Vec<usize>,
    used: &mut Vec<bool>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if i == per_component.len() {
        emit(assignment);
        return;
    }
    for candidate in &per_component[i] {
        if candidate.iter().any(|&(_, h)| used[h]) {
            continue;
        }
        for &(p, h) in candidate {
            assignment[p] = h;
            used[h] = true;
        }
        combine(per_component, i + 1, assignment, used, emit);
        for &(p, h) in candidate {
            assignment[p] = usize::MAX;
            used[h] = false;
        }
    }
}

/// Pattern interface wires must leave the matched region in the host.
fn boundary_ok(
    host: &Circuit,
    p_in_dst: &[Dst],
    p_out_dst: &[Vec<Dst>],
    h_out_dst: &[Vec<Dst>],
    map: &[usize],
) -> bool {
    let inside = |h: usize| map.contains(&h);
    for d in p_in_dst {
        if let Dst::Node { node, port } = *d {
            if let Src::Node { node: hn, .. } = host.nodes[map[node]].srcs[port] {
                if inside(hn) {
                    return false;
                }
            }
        }
    }
    for (p, dsts) in p_out_dst.iter().enumerate() {
        for (q, d) in dsts.iter().enumerate() {
            if let Dst::Output(_) = d {
                if let Dst::Node { node: hn, .. } = h_out_dst[map[p]][q] {
                    if inside(hn) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// No path leaves the matched set and comes back.
fn convex(host: &Circuit, map: &[usize]) -> bool {
    let mut inside = vec![false; host.node_count()];
    for &h in map {
        inside[h] = true;
    }
    let mut tainted = vec![false; host.node_count()];
    for (k, node) in host.nodes.iter().enumerate() {
        let mut from_inside = false;
        let mut from_tainted = false;
        for s in &node.srcs {
            if let Src::Node { node: src, .. } = *s {
                from_inside |= inside[src];
                from_tainted |= tainted[src];
            }
        }
        if inside[k] {
            if from_tainted {
                return false;
            }
        } else {
            tainted[k] = from_inside || from_tainted;
        }
    }
    true
}

fn build_context(pattern: &Circuit, host: &Circuit, p_in_dst: &[Dst], map: Vec<usize>) -> Context {
    let n = host.node_count();
    let mut pattern_of = vec![usize::MAX; n];
    for (p, &h) in map.iter().enumerate() {
        pattern_of[h] = p;
    }
    // Non-matched host nodes keep their relative order; the hole goes last and
    // the toposort moves it into place.
    let mut new_index = vec![usize::MAX; n];
    let mut next = 0;
    for k in 0..n {
        if pattern_of[k] == usize::MAX {
            new_index[k] = next;
            next += 1;
        }
    }
    let hole = next;
    let out_port = |node: usize, port: usize| -> usize {
        let p = pattern_of[node];
        pattern
            .outputs
            .iter()
            .position(|s| *s == Src::Node { node: p, port })
            .expect("boundary check guarantees an interface wire")
    };
    let remap = |s: Src| match s {
        Src::Input(i) => Src::Input(i),
        Src::Node { node, port } if pattern_of[node] == usize::MAX => Src::Node {
            node: new_index[node],
            port,
        },
        Src::Node { node, port } => Src::Node {
            node: hole,
            port: out_port(node, port),
        },
    };
    let mut nodes: Vec<Node> = (0..n)
        .filter(|&k| pattern_of[k] == usize::MAX)
        .map(|k| Node {
            op: host.nodes[k].op.clone(),
            srcs: host.nodes[k].srcs.iter().map(|&s| remap(s)).collect(),
        })
        .collect();
    let hole_srcs = p_in_dst
        .iter()
        .map(|d| match *d {
            Dst::Node { node, port } => remap(host.nodes[map[node]].srcs[port]),
            Dst::Output(_) => unreachable!("bare pattern wires are rejected"),
        })
        .collect();
    nodes.push(Node {
        op: Operator::hole(pattern.inputs(), pattern.outputs()),
        srcs: hole_srcs,
    });
    let outputs: Vec<Src> = host.outputs.iter().map(|&s| remap(s)).collect();
    let order = super::topological_order(&nodes, |k| k).expect("convex match leaves a DAG");
    let ctx_host = Circuit::reordered(host.inputs, &nodes, &outputs, &order);
    let hole_pos = order.iter().position(|&k| k == hole).expect("hole present");
    Context {
        host: ctx_host,
        hole: hole_pos,
        matched: map,
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{delta, op};
    use super::*;

    fn coassoc_host() -> Circuit {
        delta()
            .compose(&Circuit::identity(1).tensor(&delta()))
            .unwrap()
    }

    #[test]
    fn trivial_match_of_self() {
        let f = coassoc_host();
        let ms = find_matches(&f, &f);
        assert!(ms.iter().any(|m| m.surrounding_nodes() == 0));
        let t = Context::trivial(1, 3);
        assert!(apply_context(&t, &f).unwrap().equivalent(&f));
    }

    #[test]
    fn two_delta_matches() {
        let ms = find_matches(&delta(), &coassoc_host());
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn no_mu_in_delta() {
        assert!(find_matches(&op("mu", 2, 1), &delta()).is_empty());
    }

    #[test]
    fn round_trip() {
        let host = coassoc_host()
            .compose(&op("mu", 2, 1).tensor(&Circuit::identity(1)))
            .unwrap();
        for pat in [delta(), coassoc_host()] {
            let ms = find_matches(&pat, &host);
            assert!(!ms.is_empty());
            for m in ms {
                assert!(apply_context(&m, &pat).unwrap().equivalent(&host));
            }
        }
    }

    #[test]
    fn hole_arity_checked() {
        let t = Context::trivial(1, 2);
        assert!(matches!(
            apply_context(&t, &op("mu", 2, 1)),
            Err(CircuitError::HoleArity { .. })
        ));
    }

    #[test]
    fn non_convex_rejected() {
        // delta ; (f * id) ; mu with pattern delta-mu pair skipping f.
        let f = op("f", 1, 1);
        let host = delta()
            .compose(&f.tensor(&Circuit::identity(1)))
            .unwrap()
            .compose(&op("mu", 2, 1))
            .unwrap();
        let pat = delta().tensor(&op("mu", 2, 1));
        assert!(find_matches(&pat, &host).is_empty());
    }

    #[test]
    fn bare_wire_pattern_rejected() {
        assert!(find_matches(&Circuit::identity(1), &delta()).is_empty());
        let pat = delta().tensor(&Circuit::identity(1));
        assert!(find_matches(&pat, &coassoc_host()).is_empty());
    }
}

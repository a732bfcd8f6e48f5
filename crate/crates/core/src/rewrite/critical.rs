//! Bounded critical pairs and local confluence probes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{apply_context, find_matches, Circuit, Dst, Node, Src};

use super::{normalize, Polygraph, Rule, Strategy};

/// Two one-step reducts of a superposition of two left sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub left_rule: String,
    pub right_rule: String,
    pub source: Circuit,
    pub left: Circuit,
    pub right: Circuit,
}

/// Identification of nodes of `b` (keys) with nodes of `a` (values), grown
/// from an anchor pair by following shared wires.
fn propagate(a: &Circuit, b: &Circuit, anchor: (usize, usize)) -> Option<BTreeMap<usize, usize>> {
    let (_, a_out) = a.targets();
    let (_, b_out) = b.targets();
    let mut b_to_a: BTreeMap<usize, usize> = BTreeMap::new();
    let mut a_to_b: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([anchor]);
    while let Some((x, y)) = queue.pop_front() {
        match (a_to_b.get(&x), b_to_a.get(&y)) {
            (Some(&yy), Some(&xx)) if yy == y && xx == x => continue,
            (None, None) => {}
            _ => return None,
        }
        if a.nodes()[x].op != b.nodes()[y].op {
            return None;
        }
        a_to_b.insert(x, y);
        b_to_a.insert(y, x);
        for (sa, sb) in a.nodes()[x].srcs.iter().zip(&b.nodes()[y].srcs) {
            if let (Src::Node { node: na, port: pa }, Src::Node { node: nb, port: pb }) = (sa, sb) {
                if pa != pb {
                    return None;
                }
                queue.push_back((*na, *nb));
            }
        }
        for (da, db) in a_out[x].iter().zip(&b_out[y]) {
            if let (Dst::Node { node: na, port: pa }, Dst::Node { node: nb, port: pb }) = (da, db) {
                if pa != pb {
                    return None;
                }
                queue.push_back((*na, *nb));
            }
        }
    }
    Some(b_to_a)
}

/// Glues `b` onto `a` along `b_to_a`. Returns the union circuit and the node
/// images of `a` and `b` in it.
fn glue(
    a: &Circuit,
    b: &Circuit,
    b_to_a: &BTreeMap<usize, usize>,
) -> Option<(Circuit, Vec<usize>, Vec<usize>)> {
    let na = a.node_count();
    let mut b_image = vec![usize::MAX; b.node_count()];
    let mut next = na;
    for (y, img) in b_image.iter_mut().enumerate() {
        *img = match b_to_a.get(&y) {
            Some(&x) => x,
            None => {
                next += 1;
                next - 1
            }
        };
    }
    let a_of_b: HashMap<usize, usize> = b_to_a.iter().map(|(&y, &x)| (x, y)).collect();

    // Sources of every union node input port; `None` means a fresh input.
    let mut srcs: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new(); next];
    let mut ops = vec![None; next];
    for (x, node) in a.nodes().iter().enumerate() {
        ops[x] = Some(node.op.clone());
        srcs[x] = node
            .srcs
            .iter()
            .enumerate()
            .map(|(q, s)| match *s {
                Src::Node { node, port } => Some((node, port)),
                Src::Input(_) => a_of_b.get(&x).and_then(|&y| match b.nodes()[y].srcs[q] {
                    Src::Node { node, port } => Some((b_image[node], port)),
                    Src::Input(_) => None,
                }),
            })
            .collect();
    }
    for (y, node) in b.nodes().iter().enumerate() {
        if b_to_a.contains_key(&y) {
            continue;
        }
        let u = b_image[y];
        ops[u] = Some(node.op.clone());
        srcs[u] = node
            .srcs
            .iter()
            .map(|s| match *s {
                Src::Node { node, port } => Some((b_image[node], port)),
                Src::Input(_) => None,
            })
            .collect();
    }

    let mut inputs = 0;
    let mut consumed: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut nodes: Vec<Node> = Vec::with_capacity(next);
    for u in 0..next {
        let op = ops[u].clone()?;
        let s = srcs[u]
            .iter()
            .map(|s| match s {
                Some((node, port)) => {
                    consumed.insert((*node, *port));
                    Src::Node {
                        node: *node,
                        port: *port,
                    }
                }
                None => {
                    inputs += 1;
                    Src::Input(inputs - 1)
                }
            })
            .collect();
        nodes.push(Node { op, srcs: s });
    }
    let mut outputs = Vec::new();
    for (u, node) in nodes.iter().enumerate() {
        for port in 0..node.op.outputs() {
            if !consumed.contains(&(u, port)) {
                outputs.push(Src::Node { node: u, port });
            }
        }
    }
    let (union, position) = Circuit::from_parts_tracked(inputs, nodes, outputs).ok()?;
    let a_img = (0..na).map(|x| position[x]).collect();
    let b_img = b_image.iter().map(|&u| position[u]).collect();
    Some((union, a_img, b_img))
}

/// Matches of `rule.lhs` in `source` covering exactly `nodes`.
fn context_on(
    rule: &Rule,
    source: &Circuit,
    nodes: &BTreeSet<usize>,
) -> Option<crate::circuit::Context> {
    find_matches(rule.lhs(), source)
        .into_iter()
        .find(|m| m.matched().iter().copied().collect::<BTreeSet<_>>() == *nodes)
}

/// Critical pairs of `p` whose superposition has at most `max_nodes` nodes.
///
/// Overlaps are grown from a single shared node by following wires both
/// left sides agree on; superpositions glued along several disconnected
/// regions are not enumerated. Gluings that cannot be drawn without
/// crossings are not circuits and are dropped. The result is therefore a
/// bounded, explicitly incomplete enumeration.
pub fn critical_pairs(p: &Polygraph, max_nodes: usize) -> Vec<CriticalPair> {
    let rules = p.rules();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, r1) in rules.iter().enumerate() {
        for r2 in &rules[i..] {
            let (a, b) = (r1.lhs(), r2.lhs());
            for x in 0..a.node_count() {
                for y in 0..b.node_count() {
                    let Some(b_to_a) = propagate(a, b, (x, y)) else {
                        continue;
                    };
                    let same_rule = std::ptr::eq(r1, r2);
                    if same_rule
                        && b_to_a.len() == a.node_count()
                        && b_to_a.iter().all(|(y, x)| x == y)
                    {
                        continue;
                    }
                    if a.node_count() + b.node_count() - b_to_a.len() > max_nodes {
                        continue;
                    }
                    let Some(pair) = superpose(r1, r2, &b_to_a) else {
                        continue;
                    };
                    let key = (
                        pair.left_rule.clone(),
                        pair.right_rule.clone(),
                        format!("{:?}", pair.source),
                        format!("{:?}", pair.left),
                        format!("{:?}", pair.right),
                    );
                    let mirrored = (
                        pair.right_rule.clone(),
                        pair.left_rule.clone(),
                        key.2.clone(),
                        key.4.clone(),
                        key.3.clone(),
                    );
                    if pair.left == pair.right || seen.contains(&mirrored) || !seen.insert(key) {
                        continue;
                    }
                    out.push(pair);
                }
            }
        }
    }
    out
}

fn superpose(r1: &Rule, r2: &Rule, b_to_a: &BTreeMap<usize, usize>) -> Option<CriticalPair> {
    let (a, b) = (r1.lhs(), r2.lhs());
    let (union, a_img, b_img) = glue(a, b, b_to_a)?;
    if !union.is_planar() {
        return None;
    }
    let source = union.canonical();
    let a_nodes: BTreeSet<usize> = a_img.into_iter().collect();
    let b_nodes: BTreeSet<usize> = b_img.into_iter().collect();
    let left_ctx = context_on(r1, &union, &a_nodes)?;
    let right_ctx = context_on(r2, &union, &b_nodes)?;
    let left = apply_context(&left_ctx, r1.rhs()).ok()?.canonical();
    let right = apply_context(&right_ctx, r2.rhs()).ok()?.canonical();
    Some(CriticalPair {
        left_rule: r1.name().to_string(),
        right_rule: r2.name().to_string(),
        source,
        left,
        right,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    Joinable,
    NotJoinedWithinFuel,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairVerdict {
    pub index: usize,
    pub left_rule: String,
    pub right_rule: String,
    pub source: String,
    pub left: String,
    pub right: String,
    pub left_normal: String,
    pub right_normal: String,
    pub status: PairStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub pairs: Vec<PairVerdict>,
    pub all_joinable: bool,
}

/// Random seeds tried after the leftmost strategy fails to join a pair.
const PROBES: [u64; 4] = [1, 2, 3, 4];

/// Normalizes both sides of every pair and compares the results.
pub fn check_local_confluence(
    p: &Polygraph,
    pairs: &[CriticalPair],
    fuel: usize,
) -> ConfluenceReport {
    let verdicts: Vec<PairVerdict> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, pair)| {
            let strategies = std::iter::once(Strategy::Leftmost)
                .chain(PROBES.iter().map(|&s| Strategy::Random(s)));
            let mut last = None;
            let mut status = PairStatus::NotJoinedWithinFuel;
            for strategy in strategies {
                let l = normalize(p, &pair.left, fuel, strategy);
                let r = normalize(p, &pair.right, fuel, strategy);
                let joined = l.is_normal() && r.is_normal() && l.last() == r.last();
                last = Some((l.last().clone(), r.last().clone()));
                if joined {
                    status = PairStatus::Joinable;
                    break;
                }
            }
            let (ln, rn) = last.expect("at least one strategy");
            PairVerdict {
                index,
                left_rule: pair.left_rule.clone(),
                right_rule: pair.right_rule.clone(),
                source: pair.source.to_expr(),
                left: pair.left.to_expr(),
                right: pair.right.to_expr(),
                left_normal: ln.to_expr(),
                right_normal: rn.to_expr(),
                status,
            }
        })
        .collect();
    let all_joinable = verdicts.iter().all(|v| v.status == PairStatus::Joinable);
    ConfluenceReport {
        pairs: verdicts,
        all_joinable,
    }
}

//! The top-down mirror symmetry of circuits and its use to share
//! termination obligations between a rule and its mirror image.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::{Circuit, Dst, Node, Operator, Signature, Src};
use crate::heat::{InterpTriple, Interpretation, RuleCheck};
use crate::rewrite::{Polygraph, Rule};
use crate::translate::{DELTA, EPSILON, TAU};

use super::PresetError;

/// An involution on operator names; the dual of `m -> n` must be `n -> m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Duality {
    table: BTreeMap<String, String>,
}

impl Duality {
    /// Builds the involution from unordered pairs; self-dual operators are
    /// given as `(a, a)`.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut table = BTreeMap::new();
        for (a, b) in pairs {
            table.insert(a.to_string(), b.to_string());
            table.insert(b.to_string(), a.to_string());
        }
        Duality { table }
    }

    /// `mu <-> delta`, `eta <-> epsilon`, `tau` and `kappa` self-dual.
    pub fn lz2() -> Self {
        Duality::from_pairs([
            ("mu", DELTA),
            ("eta", EPSILON),
            (TAU, TAU),
            ("kappa", "kappa"),
        ])
    }

    /// No operator has a dual; only the identities are self-dual.
    pub fn trivial() -> Self {
        Duality {
            table: BTreeMap::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.table.is_empty()
    }

    pub fn dual_name(&self, op: &str) -> Option<&str> {
        self.table.get(op).map(String::as_str)
    }

    fn dual_op(&self, op: &Operator) -> Result<Operator, PresetError> {
        let name = self
            .dual_name(op.name())
            .ok_or_else(|| PresetError::NoDual(op.name().to_string()))?;
        Ok(Operator::new(name, op.outputs(), op.inputs()))
    }

    /// Checks that the involution respects the arities declared in `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), PresetError> {
        for op in sig.operators() {
            let dual = self.dual_op(op)?;
            match sig.get(dual.name()) {
                Some(d) if d.inputs() == op.outputs() && d.outputs() == op.inputs() => {}
                _ => return Err(PresetError::NoDual(op.name().to_string())),
            }
        }
        Ok(())
    }

    /// The mirror image of `c`: inputs and outputs swapped, composition
    /// reversed, every operator replaced by its dual. Left-to-right order
    /// is kept.
    pub fn dualize(&self, c: &Circuit) -> Result<Circuit, PresetError> {
        let (from_inputs, from_nodes) = c.targets();
        let n = c.node_count();
        // Node k of `c` becomes node n-1-k; its output ports become inputs.
        let flip = |d: Dst| match d {
            Dst::Output(j) => Src::Input(j),
            Dst::Node { node, port } => Src::Node {
                node: n - 1 - node,
                port,
            },
        };
        let mut nodes = Vec::with_capacity(n);
        for k in (0..n).rev() {
            nodes.push(Node {
                op: self.dual_op(&c.nodes()[k].op)?,
                srcs: from_nodes[k].iter().map(|&d| flip(d)).collect(),
            });
        }
        let outputs = from_inputs.into_iter().map(flip).collect();
        Ok(Circuit::from_parts(c.outputs(), nodes, outputs)?.canonical())
    }

    pub fn dualize_rule(&self, r: &Rule) -> Result<Rule, PresetError> {
        Ok(Rule::new(
            format!("{}^o", r.name()),
            self.dualize(r.lhs())?,
            self.dualize(r.rhs())?,
        )?)
    }

    pub fn is_self_dual(&self, r: &Rule) -> Result<bool, PresetError> {
        Ok(self.dualize(r.lhs())? == r.lhs().canonical()
            && self.dualize(r.rhs())? == r.rhs().canonical())
    }
}

/// Checks `I(c^o) = I(c)^o` on every generator of the table; by
/// functoriality this extends to every circuit.
pub fn check_compatibility(it: &Interpretation, d: &Duality) -> Result<(), PresetError> {
    for (op, triple) in it.table() {
        let Some(dual) = d.dual_name(op) else {
            if d.is_trivial() {
                continue;
            }
            return Err(PresetError::NoDual(op.clone()));
        };
        let image = it
            .get(dual)
            .ok_or_else(|| PresetError::Compatibility(format!("`{dual}` is not interpreted")))?;
        if *image != triple.dual() {
            return Err(PresetError::Compatibility(format!(
                "I({op})^o = {} but I({dual}) = {}",
                triple.dual().display_named(),
                image.display_named()
            )));
        }
    }
    Ok(())
}

/// One class of rules sharing a single termination obligation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DedupClass {
    /// The rule actually checked.
    pub representative: String,
    /// Rules whose obligation follows from the representative's.
    pub covers: Vec<String>,
    /// The representative is its own mirror image, so one of the two map
    /// comparisons implies the other.
    pub self_dual: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DedupReport {
    pub rules: usize,
    pub classes: Vec<DedupClass>,
}

impl DedupReport {
    pub fn obligations(&self) -> usize {
        self.classes.len()
    }
}

fn images(it: &Interpretation, r: &Rule) -> Result<(InterpTriple, InterpTriple), PresetError> {
    Ok((it.interpret(r.lhs())?, it.interpret(r.rhs())?))
}

/// Groups the rules of `p` so that checking one representative per class
/// suffices: two rules share a class when they have the same image under
/// `it`, or when one has the image of the other's mirror.
pub fn dedup_rules_for_checking(
    p: &Polygraph,
    it: &Interpretation,
    d: &Duality,
) -> Result<DedupReport, PresetError> {
    check_compatibility(it, d)?;
    let rules = p.rules();
    let mut keys = Vec::with_capacity(rules.len());
    let mut dual_keys = Vec::with_capacity(rules.len());
    for r in rules {
        keys.push(images(it, r)?);
        dual_keys.push(if d.is_trivial() {
            None
        } else {
            Some(images(it, &d.dualize_rule(r)?)?)
        });
    }
    // Union-find over rule indices.
    let mut parent: Vec<usize> = (0..rules.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for a in 0..rules.len() {
        for b in 0..a {
            let same = keys[a] == keys[b] || dual_keys[a].as_ref() == Some(&keys[b]);
            if same {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut classes: BTreeMap<usize, DedupClass> = BTreeMap::new();
    for (k, rule) in rules.iter().enumerate() {
        let root = find(&mut parent, k);
        if root == k {
            classes.insert(
                k,
                DedupClass {
                    representative: rule.name().to_string(),
                    covers: Vec::new(),
                    self_dual: !d.is_trivial() && d.is_self_dual(rule)?,
                },
            );
        } else {
            classes
                .get_mut(&root)
                .expect("roots precede their class members")
                .covers
                .push(rule.name().to_string());
        }
    }
    Ok(DedupReport {
        rules: rules.len(),
        classes: classes.into_values().collect(),
    })
}

/// Checks the representatives only, skipping the contravariant comparison
/// for self-dual ones.
pub fn check_representatives(
    p: &Polygraph,
    it: &Interpretation,
    report: &DedupReport,
) -> Result<Vec<RuleCheck>, PresetError> {
    report
        .classes
        .iter()
        .map(|c| {
            let rule = p
                .rule(&c.representative)
                .expect("representatives come from the polygraph");
            Ok(crate::heat::check_rule_with(it, rule, c.self_dual)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::heat::lz2;
    use crate::rewrite::parse_polygraph;

    fn sig() -> Signature {
        parse_polygraph(super::super::LZ2_SOURCE)
            .unwrap()
            .signature()
            .clone()
    }

    fn c(text: &str) -> Circuit {
        parse_circuit(text, &sig()).unwrap().canonical()
    }

    #[test]
    fn generators_and_identities() {
        let d = Duality::lz2();
        assert_eq!(d.dualize(&c("mu")).unwrap(), c("delta"));
        assert_eq!(d.dualize(&c("eta")).unwrap(), c("epsilon"));
        assert_eq!(
            d.dualize(&Circuit::identity(3)).unwrap(),
            Circuit::identity(3)
        );
        assert_eq!(
            d.dualize(&c("(mu * id(1)) ; mu")).unwrap(),
            c("delta ; (delta * id(1))")
        );
        assert!(d.check(&sig()).is_ok());
    }

    #[test]
    fn missing_dual_is_reported() {
        let d = Duality::from_pairs([("mu", DELTA)]);
        assert!(matches!(d.dualize(&c("tau")), Err(PresetError::NoDual(_))));
    }

    #[test]
    fn lz2_table_is_compatible() {
        assert!(check_compatibility(&lz2(), &Duality::lz2()).is_ok());
        let mut broken = lz2();
        broken
            .insert(
                "eta",
                InterpTriple::new(
                    vec![crate::heat::Poly::constant(2)],
                    vec![],
                    lz2().get("eta").unwrap().heat.clone(),
                ),
            )
            .unwrap();
        assert!(matches!(
            check_compatibility(&broken, &Duality::lz2()),
            Err(PresetError::Compatibility(_))
        ));
    }
}

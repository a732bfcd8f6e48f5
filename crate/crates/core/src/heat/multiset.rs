//! Symbolic elements of the free commutative monoid on positive naturals.

use std::fmt;

use serde::Serialize;

use super::poly::{Poly, Var};

/// `Σ coeff_k · ul(arg_k)`, kept sorted by argument with equal arguments
/// merged and zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultisetExpr {
    terms: Vec<(Poly, Poly)>,
}

impl MultisetExpr {
    pub fn zero() -> Self {
        MultisetExpr::default()
    }

    /// The generator `ul(arg)`.
    pub fn ul(arg: Poly) -> Self {
        MultisetExpr::from_terms([(Poly::constant(1), arg)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Poly, Poly)>) -> Self {
        let mut all: Vec<(Poly, Poly)> = terms.into_iter().collect();
        all.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(Poly, Poly)> = Vec::with_capacity(all.len());
        for (c, a) in all {
            match out.last_mut() {
                Some(last) if last.1 == a => last.0 = &last.0 + &c,
                _ => out.push((c, a)),
            }
        }
        out.retain(|(c, _)| !c.is_zero());
        MultisetExpr { terms: out }
    }

    /// (coefficient, argument) pairs.
    pub fn terms(&self) -> &[(Poly, Poly)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &MultisetExpr) -> MultisetExpr {
        MultisetExpr::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&self, k: &Poly) -> MultisetExpr {
        MultisetExpr::from_terms(self.terms.iter().map(|(c, a)| (c * k, a.clone())))
    }

    pub fn substitute(&self, f: &impl Fn(Var) -> Option<Poly>) -> MultisetExpr {
        MultisetExpr::from_terms(
            self.terms
                .iter()
                .map(|(c, a)| (c.substitute(f), a.substitute(f))),
        )
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self
            .terms
            .iter()
            .flat_map(|(c, a)| c.vars().into_iter().chain(a.vars()))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Evaluates to a concrete multiset.
    pub fn eval(&self, f: &impl Fn(Var) -> i128) -> Multiset {
        Multiset::from_pairs(self.terms.iter().map(|(c, a)| (a.eval(f), c.eval(f))))
    }

    pub fn display_with(&self, name: &impl Fn(Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(c, a)| {
                let arg = format!("ul({})", a.display_with(name));
                match c.as_constant() {
                    Some(1) => arg,
                    Some(k) => format!("{k}*{arg}"),
                    None => format!("({})*{arg}", c.display_with(name)),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for MultisetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|v| v.to_string()))
    }
}

impl Serialize for MultisetExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A concrete finite multiset of positive naturals: `(value, multiplicity)`
/// sorted by decreasing value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Multiset {
    items: Vec<(i128, i128)>,
}

impl Multiset {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i128, i128)>) -> Self {
        let mut map = std::collections::BTreeMap::<i128, i128>::new();
        for (v, k) in pairs {
            *map.entry(v).or_default() += k;
        }
        let items = map.into_iter().rev().filter(|(_, k)| *k != 0).collect();
        Multiset { items }
    }

    pub fn items(&self) -> &[(i128, i128)] {
        &self.items
    }

    pub fn add(&self, other: &Multiset) -> Multiset {
        Multiset::from_pairs(self.items.iter().chain(&other.items).copied())
    }

    /// True when every element is positive with positive multiplicity.
    pub fn is_valid(&self) -> bool {
        self.items.iter().all(|&(v, k)| v >= 1 && k > 0)
    }

    /// The multiset order: compare multiplicities from the largest element
    /// down; the first difference decides.
    pub fn cmp_multiset(&self, other: &Multiset) -> std::cmp::Ordering {
        let (mut a, mut b) = (self.items.iter().peekable(), other.items.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(&&(va, ka)), Some(&&(vb, kb))) => {
                    if va != vb {
                        return va.cmp(&vb);
                    }
                    if ka != kb {
                        return ka.cmp(&kb);
                    }
                    a.next();
                    b.next();
                }
            }
        }
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .items
            .iter()
            .map(|(v, k)| {
                if *k == 1 {
                    format!("ul({v})")
                } else {
                    format!("{k}*ul({v})")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

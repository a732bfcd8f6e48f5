//! Sound (but incomplete) decision procedures for "for all inputs"
//! inequalities between symbolic expressions.

use itertools::Itertools;
use serde::Serialize;

use super::multiset::MultisetExpr;
use super::poly::{Poly, Var};

/// A set of naturals bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Carrier {
    /// `{0, 1, 2, …}`
    #[serde(rename = "N")]
    N,
    /// `{1, 2, 3, …}`
    #[serde(rename = "N*")]
    NStar,
}

impl Carrier {
    pub fn min(self) -> i128 {
        match self {
            Carrier::N => 0,
            Carrier::NStar => 1,
        }
    }
}

/// The monoid of heats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HeatKind {
    /// Naturals under addition.
    #[serde(rename = "N")]
    Nat,
    /// Finite multisets of positive naturals under the multiset order.
    #[serde(rename = "[N*]")]
    Multiset,
}

/// The carriers of descending currents, ascending currents and heat.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CarrierConfig {
    pub down: Carrier,
    pub up: Carrier,
    pub heat: HeatKind,
}

impl CarrierConfig {
    pub fn min(&self, v: Var) -> i128 {
        match v {
            Var::Down(_) => self.down.min(),
            Var::Up(_) => self.up.min(),
        }
    }

    /// Exchanges the roles of descending and ascending variables.
    pub fn swapped(&self) -> CarrierConfig {
        CarrierConfig {
            down: self.up,
            up: self.down,
            heat: self.heat,
        }
    }
}

/// Outcome of comparing `a` against `b` for every assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Cmp {
    /// `a > b` everywhere.
    Gt,
    /// `a ≥ b` everywhere.
    Ge,
    /// `a` and `b` are the same expression.
    Eq,
    Unknown,
}

impl Cmp {
    pub fn is_ge(self) -> bool {
        matches!(self, Cmp::Gt | Cmp::Ge | Cmp::Eq)
    }
}

fn shifted(p: &Poly, cfg: &CarrierConfig) -> Poly {
    p.substitute(&|v| {
        let m = cfg.min(v);
        (m != 0).then(|| Poly::var(v) + Poly::constant(m))
    })
}

/// Substitutes `x := min + y` and inspects the coefficients of `a - b`.
pub fn compare_sym(a: &Poly, b: &Poly, cfg: &CarrierConfig) -> Cmp {
    if a == b {
        return Cmp::Eq;
    }
    let d = shifted(&(a - b), cfg);
    if !d.is_nonneg() {
        Cmp::Unknown
    } else if d.constant_term() > 0 {
        Cmp::Gt
    } else {
        Cmp::Ge
    }
}

/// Searches `{min..min+3}` for an assignment violating `a > b` (when
/// `strict`) or `a ≥ b`. Gives up above eight variables.
pub fn refute_sym(
    a: &Poly,
    b: &Poly,
    cfg: &CarrierConfig,
    strict: bool,
) -> Option<Vec<(Var, i128)>> {
    let vars: Vec<Var> = a
        .vars()
        .into_iter()
        .chain(b.vars())
        .sorted()
        .dedup()
        .collect();
    if vars.len() > 8 {
        return None;
    }
    let d = a - b;
    vars.iter()
        .map(|&v| (cfg.min(v)..cfg.min(v) + 4).collect::<Vec<_>>())
        .multi_cartesian_product()
        .chain(vars.is_empty().then(Vec::new))
        .find_map(|vals| {
            let value = d.eval(&|v| vals[vars.iter().position(|w| *w == v).unwrap()]);
            let bad = if strict { value <= 0 } else { value < 0 };
            bad.then(|| vars.iter().copied().zip(vals).collect())
        })
}

/// Compares two symbolic multisets: equal generators cancel (comparing
/// their coefficients symbolically), then every remaining generator of `b`
/// must lie strictly below a generator of `a` with positive coefficient.
pub fn compare_multiset(a: &MultisetExpr, b: &MultisetExpr, cfg: &CarrierConfig) -> Cmp {
    if a == b {
        return Cmp::Eq;
    }
    let zero = Poly::zero();
    let mut rest_a: Vec<(Poly, Poly)> = Vec::new();
    let mut rest_b: Vec<(Poly, Poly)> = Vec::new();
    for (ca, ea) in a.terms() {
        match b.terms().iter().find(|(_, eb)| eb == ea) {
            None => rest_a.push((ca.clone(), ea.clone())),
            Some((cb, _)) if ca == cb => {}
            Some((cb, _)) => {
                if compare_sym(ca, cb, cfg).is_ge() {
                    rest_a.push((ca - cb, ea.clone()));
                } else if compare_sym(cb, ca, cfg).is_ge() {
                    rest_b.push((cb - ca, ea.clone()));
                } else {
                    rest_a.push((ca.clone(), ea.clone()));
                    rest_b.push((cb.clone(), ea.clone()));
                }
            }
        }
    }
    for (cb, eb) in b.terms() {
        if !a.terms().iter().any(|(_, ea)| ea == eb) {
            rest_b.push((cb.clone(), eb.clone()));
        }
    }
    let nonneg = |terms: &[(Poly, Poly)]| {
        terms
            .iter()
            .all(|(c, _)| compare_sym(c, &zero, cfg).is_ge())
    };
    if !nonneg(&rest_a) || !nonneg(&rest_b) {
        return Cmp::Unknown;
    }
    let positive: Vec<&Poly> = rest_a
        .iter()
        .filter(|(c, _)| compare_sym(c, &zero, cfg) == Cmp::Gt)
        .map(|(_, e)| e)
        .collect();
    let dominated = rest_b.iter().all(|(_, eb)| {
        positive
            .iter()
            .any(|ea| compare_sym(ea, eb, cfg) == Cmp::Gt)
    });
    match (dominated, positive.is_empty()) {
        (false, _) => Cmp::Unknown,
        (true, false) => Cmp::Gt,
        (true, true) if rest_b.is_empty() => Cmp::Ge,
        (true, true) => Cmp::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NSTAR: CarrierConfig = CarrierConfig {
        down: Carrier::NStar,
        up: Carrier::NStar,
        heat: HeatKind::Multiset,
    };
    const NAT: CarrierConfig = CarrierConfig {
        down: Carrier::N,
        up: Carrier::N,
        heat: HeatKind::Nat,
    };

    fn i() -> Poly {
        Poly::down(0)
    }
    fn j() -> Poly {
        Poly::down(1)
    }
    fn c(k: i128) -> Poly {
        Poly::constant(k)
    }

    #[test]
    fn sym_verdicts() {
        let p = i() + j() + c(2);
        assert_eq!(compare_sym(&p, &p, &NSTAR), Cmp::Eq);
        assert_eq!(compare_sym(&(i() + j()), &i(), &NSTAR), Cmp::Gt);
        assert_eq!(compare_sym(&(i() + j()), &i(), &NAT), Cmp::Ge);
        assert_eq!(compare_sym(&i(), &j(), &NAT), Cmp::Unknown);
        // i*j ≥ i on N*, but not on N with a strict margin.
        assert_eq!(compare_sym(&(&i() * &j()), &i(), &NSTAR), Cmp::Ge);
    }

    #[test]
    fn refutation() {
        assert!(refute_sym(&i(), &j(), &NAT, false).is_some());
        assert!(refute_sym(&(i() + c(1)), &i(), &NAT, true).is_none());
        assert_eq!(refute_sym(&c(1), &c(1), &NAT, true), Some(vec![]));
    }

    #[test]
    fn multiset_verdicts() {
        let ul = MultisetExpr::ul;
        let k = Poly::up(0);
        let l = Poly::up(1);
        assert_eq!(
            compare_multiset(&ul(k.clone() + l.clone() + c(2)), &ul(k.clone()), &NSTAR),
            Cmp::Gt
        );
        assert_eq!(
            compare_multiset(&ul(i() + j()), &ul(i()).add(&ul(j())), &NSTAR),
            Cmp::Gt
        );
        assert_eq!(compare_multiset(&ul(i()), &ul(j()), &NSTAR), Cmp::Unknown);
        assert_eq!(
            compare_multiset(&ul(i()), &MultisetExpr::zero(), &NSTAR),
            Cmp::Gt
        );
        let two_i = MultisetExpr::from_terms([(c(2), i())]);
        assert_eq!(compare_multiset(&two_i, &ul(i()), &NSTAR), Cmp::Gt);
        // Coefficient surplus that may vanish.
        let ji = MultisetExpr::from_terms([(j(), i())]);
        assert_eq!(compare_multiset(&ji, &ul(i()), &NSTAR), Cmp::Ge);
        assert_eq!(compare_multiset(&ul(i()), &ji, &NSTAR), Cmp::Unknown);
    }
}

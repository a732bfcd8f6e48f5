//! Multivariate integer polynomials over descending and ascending variables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// A variable of an interpretation triple: `Down(i)` is the current on the
/// `i`-th input, `Up(j)` the current on the `j`-th output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Var {
    Down(usize),
    Up(usize),
}

impl Var {
    pub fn swapped(self) -> Var {
        match self {
            Var::Down(i) => Var::Up(i),
            Var::Up(i) => Var::Down(i),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Down(i) => write!(f, "x{}", i + 1),
            Var::Up(i) => write!(f, "y{}", i + 1),
        }
    }
}

/// Sorted list of (variable, exponent) pairs with positive exponents.
pub type Monomial = Vec<(Var, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<Var, u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *out.entry(v).or_default() += e;
    }
    out.into_iter().collect()
}

/// A polynomial with integer coefficients; zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, i128>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i128) -> Self {
        let mut p = Poly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = Poly::zero();
        p.add_term(vec![(v, 1)], 1);
        p
    }

    pub fn down(i: usize) -> Self {
        Poly::var(Var::Down(i))
    }

    pub fn up(i: usize) -> Self {
        Poly::var(Var::Up(i))
    }

    /// Sum of `Down(i)` for `i` in `range`.
    pub fn sum_down(range: std::ops::Range<usize>) -> Self {
        range.map(Poly::down).fold(Poly::zero(), |a, b| a + b)
    }

    fn add_term(&mut self, m: Monomial, c: i128) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += c;
        if *entry == 0 {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| **v == 0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i128)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn constant_term(&self) -> i128 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<i128> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| *v))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn scale(&self, k: i128) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c * k);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(1), |acc, _| &acc * self)
    }

    /// Replaces each variable `v` by `f(v)`, or keeps it when `f` returns
    /// `None`.
    pub fn substitute(&self, f: &impl Fn(Var) -> Option<Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            let mut term = Poly::constant(c);
            for &(v, e) in m {
                let base = f(v).unwrap_or_else(|| Poly::var(v));
                term = &term * &base.pow(e);
            }
            out = out + term;
        }
        out
    }

    /// Renames variables.
    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Poly {
        self.substitute(&|v| Some(Poly::var(f(v))))
    }

    pub fn eval(&self, f: &impl Fn(Var) -> i128) -> i128 {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(*c, |acc, (v, e)| acc * f(*v).pow(*e)))
            .sum()
    }

    pub fn display_with(&self, name: &impl Fn(Var) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        // Higher degree first, constant last.
        let mut entries: Vec<(&Monomial, i128)> = self.terms.iter().map(|(m, c)| (m, *c)).collect();
        entries.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|(_, e)| e).sum();
            let db: u32 = b.0.iter().map(|(_, e)| e).sum();
            db.cmp(&da).then_with(|| a.0.cmp(b.0))
        });
        let mut out = String::new();
        for (k, (m, c)) in entries.into_iter().enumerate() {
            let factors: Vec<String> = m
                .iter()
                .map(|(v, e)| {
                    if *e == 1 {
                        name(*v)
                    } else {
                        format!("{}^{}", name(*v), e)
                    }
                })
                .collect();
            let mag = c.abs();
            let body = match (factors.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => factors.join("*"),
                (false, _) => format!("{}*{}", mag, factors.join("*")),
            };
            match (k, c < 0) {
                (0, false) => out.push_str(&body),
                (0, true) => out.push_str(&format!("-{body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
                (_, true) => out.push_str(&format!(" - {body}")),
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|v| v.to_string()))
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl From<i128> for Poly {
    fn from(c: i128) -> Poly {
        Poly::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Poly {
        Poly::down(0)
    }
    fn j() -> Poly {
        Poly::down(1)
    }

    #[test]
    fn ring_laws() {
        let a = &(i() + j()) * &(i() + j());
        let b = &i() * &i() + (&i() * &j()).scale(2) + &j() * &j();
        assert_eq!(a, b);
        assert!((a.clone() - b).is_zero());
        assert_eq!((a.clone() - a.clone()), Poly::zero());
    }

    #[test]
    fn substitution_and_eval() {
        let p = &i() * &j() + Poly::constant(3);
        let q = p.substitute(&|v| match v {
            Var::Down(0) => Some(Poly::up(0) + Poly::constant(1)),
            _ => None,
        });
        assert_eq!(q.eval(&|v| if v == Var::Up(0) { 2 } else { 5 }), 3 * 5 + 3);
    }

    #[test]
    fn display() {
        let p = &i() * &j() + i().scale(2) - Poly::constant(1);
        assert_eq!(p.to_string(), "x1*x2 + 2*x1 - 1");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}

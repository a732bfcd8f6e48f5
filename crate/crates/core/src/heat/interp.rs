//! Interpretations: a triple per operator, their validation, the text format
//! and the functorial extension to circuits.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;

use crate::circuit::{Circuit, Node, Signature};

use super::compare::{compare_sym, Carrier, CarrierConfig, HeatKind};
use super::multiset::MultisetExpr;
use super::poly::{Poly, Var};
use super::{evaluate, var_name, Heat, HeatError, InterpTriple, NodeSemantics};

/// A product-category functor given on generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interpretation {
    name: String,
    config: CarrierConfig,
    table: BTreeMap<String, InterpTriple>,
}

impl Interpretation {
    pub fn new(name: impl Into<String>, config: CarrierConfig) -> Self {
        Interpretation {
            name: name.into(),
            config,
            table: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn config(&self) -> &CarrierConfig {
        &self.config
    }

    pub fn table(&self) -> &BTreeMap<String, InterpTriple> {
        &self.table
    }

    pub fn get(&self, op: &str) -> Option<&InterpTriple> {
        self.table.get(op)
    }

    /// Adds the triple of `op` after checking its heat kind, the range of
    /// multiset arguments and monotonicity.
    pub fn insert(&mut self, op: &str, triple: InterpTriple) -> Result<(), HeatError> {
        let bad = |message: String| HeatError::BadTriple {
            op: op.to_string(),
            message,
        };
        if triple.heat.kind() != self.config.heat {
            return Err(bad("heat lives in the wrong monoid".into()));
        }
        let mentions_outside =
            |p: &Poly, ok: &dyn Fn(Var) -> bool| p.vars().into_iter().any(|v| !ok(v));
        let (m, n) = (triple.inputs, triple.outputs);
        let in_cov = |v: Var| matches!(v, Var::Down(i) if i < m);
        let in_con = |v: Var| matches!(v, Var::Up(j) if j < n);
        let in_all = |v: Var| in_cov(v) || in_con(v);
        if triple.cov.iter().any(|p| mentions_outside(p, &in_cov))
            || triple.con.iter().any(|p| mentions_outside(p, &in_con))
        {
            return Err(bad("a map mentions a variable it cannot depend on".into()));
        }
        let heat_vars = match &triple.heat {
            Heat::Nat(p) => p.vars(),
            Heat::Multiset(ms) => ms.vars(),
        };
        if heat_vars.into_iter().any(|v| !in_all(v)) {
            return Err(bad("the heat mentions an unknown variable".into()));
        }
        if let Heat::Multiset(ms) = &triple.heat {
            let one = Poly::constant(1);
            if let Some((_, arg)) = ms
                .terms()
                .iter()
                .find(|(_, a)| !compare_sym(a, &one, &self.config).is_ge())
            {
                return Err(bad(format!("generator ul({arg}) may fall outside N*")));
            }
        }
        let map_floor = |ps: &[Poly], carrier: Carrier| {
            let floor = Poly::constant(carrier.min());
            ps.iter()
                .all(|p| compare_sym(p, &floor, &self.config).is_ge())
        };
        if !map_floor(&triple.cov, self.config.down) || !map_floor(&triple.con, self.config.up) {
            return Err(bad("a map leaves its carrier".into()));
        }
        match monotonicity_check(&triple, &self.config) {
            Monotonicity::Monotone => {}
            other => return Err(bad(format!("not certified monotone: {other:?}"))),
        }
        self.table.insert(op.to_string(), triple);
        Ok(())
    }

    /// Checks that every operator of `sig` has a triple of the right arity.
    pub fn covers(&self, sig: &Signature) -> Result<(), HeatError> {
        let missing: Vec<String> = sig
            .operators()
            .iter()
            .filter(|op| {
                self.table
                    .get(op.name())
                    .is_none_or(|t| t.inputs != op.inputs() || t.outputs != op.outputs())
            })
            .map(|op| op.name().to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(HeatError::Coverage {
                name: self.name.clone(),
                missing: missing.join(", "),
            })
        }
    }

    /// The image of a circuit.
    pub fn interpret(&self, c: &Circuit) -> Result<InterpTriple, HeatError> {
        let down = (0..c.inputs()).map(Poly::down).collect();
        let up = (0..c.outputs()).map(Poly::up).collect();
        let ev = evaluate(self, c, down, up)?;
        Ok(InterpTriple::new(ev.outputs, ev.inputs, ev.heat))
    }

    /// Renders the interpretation in the text format read by
    /// [`parse_interpretation`].
    pub fn write(&self) -> String {
        let carrier = |c: Carrier| match c {
            Carrier::N => "N",
            Carrier::NStar => "N*",
        };
        let heat = match self.config.heat {
            HeatKind::Nat => "N",
            HeatKind::Multiset => "[N*]",
        };
        let mut out = format!(
            "name {}\ncarrier {} {} {}\n",
            self.name,
            carrier(self.config.down),
            carrier(self.config.up),
            heat
        );
        for (op, t) in &self.table {
            let name = |v: Var| var_name(v, t.inputs);
            let list = |ps: &[Poly]| ps.iter().map(|p| p.display_with(&name)).join(", ");
            let vars_down = (0..t.inputs).map(|i| name(Var::Down(i))).join(",");
            let vars_up = (0..t.outputs).map(|j| name(Var::Up(j))).join(",");
            out.push_str(&format!(
                "{op}: cov({vars_down})=({}); con({vars_up})=({}); heat = {}\n",
                list(&t.cov),
                list(&t.con),
                t.heat.display_with(&name)
            ));
        }
        out
    }

    fn triple_for(&self, node: &Node) -> Result<&InterpTriple, HeatError> {
        let t = self
            .table
            .get(node.op.name())
            .ok_or_else(|| HeatError::MissingOperator(node.op.name().to_string()))?;
        if t.inputs != node.op.inputs() || t.outputs != node.op.outputs() {
            return Err(HeatError::BadTriple {
                op: node.op.name().to_string(),
                message: format!("interpreted as {} -> {}", t.inputs, t.outputs),
            });
        }
        Ok(t)
    }
}

impl NodeSemantics for Interpretation {
    type Down = Poly;
    type Up = Poly;
    type Heat = Heat;
    type Error = HeatError;

    fn cov(&self, node: &Node, ins: &[Poly]) -> Result<Vec<Poly>, HeatError> {
        let t = self.triple_for(node)?;
        let sub = |v: Var| match v {
            Var::Down(i) => Some(ins[i].clone()),
            Var::Up(_) => None,
        };
        Ok(t.cov.iter().map(|p| p.substitute(&sub)).collect())
    }

    fn con(&self, node: &Node, outs: &[Poly]) -> Result<Vec<Poly>, HeatError> {
        let t = self.triple_for(node)?;
        let sub = |v: Var| match v {
            Var::Up(j) => Some(outs[j].clone()),
            Var::Down(_) => None,
        };
        Ok(t.con.iter().map(|p| p.substitute(&sub)).collect())
    }

    fn heat(&self, node: &Node, ins: &[Poly], outs: &[Poly]) -> Result<Heat, HeatError> {
        let t = self.triple_for(node)?;
        Ok(t.heat.substitute(&|v| match v {
            Var::Down(i) => Some(ins[i].clone()),
            Var::Up(j) => Some(outs[j].clone()),
        }))
    }

    fn add(&self, a: Heat, b: Heat) -> Result<Heat, HeatError> {
        a.add(&b)
    }

    fn zero(&self) -> Heat {
        Heat::zero(self.config.heat)
    }
}

/// Outcome of [`monotonicity_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Monotonicity {
    Monotone,
    /// Sampling found no counterexample but the symbolic criterion failed.
    Unknown,
    /// Increasing `var` at `point` decreased a component.
    Violated {
        var: Var,
        point: Vec<(Var, i128)>,
    },
}

/// Polynomials whose coefficients are nonnegative after `x := min + y` are
/// monotone; a multiset heat is monotone when all its coefficients and
/// arguments are. Other triples are sampled on `{min..min+3}`.
pub fn monotonicity_check(t: &InterpTriple, cfg: &CarrierConfig) -> Monotonicity {
    let symbolic = |p: &Poly| {
        p.substitute(&|v| {
            let m = cfg.min(v);
            (m != 0).then(|| Poly::var(v) + Poly::constant(m))
        })
        .is_nonneg()
    };
    let heat_ok = match &t.heat {
        Heat::Nat(p) => symbolic(p),
        Heat::Multiset(ms) => ms.terms().iter().all(|(c, a)| symbolic(c) && symbolic(a)),
    };
    if t.cov.iter().all(&symbolic) && t.con.iter().all(&symbolic) && heat_ok {
        return Monotonicity::Monotone;
    }
    let vars: Vec<Var> = (0..t.inputs)
        .map(Var::Down)
        .chain((0..t.outputs).map(Var::Up))
        .collect();
    if vars.len() > 6 {
        return Monotonicity::Unknown;
    }
    let points = vars
        .iter()
        .map(|&v| (cfg.min(v)..cfg.min(v) + 4).collect::<Vec<_>>())
        .multi_cartesian_product();
    for vals in points {
        let at = |vals: &[i128]| {
            let f = |v: Var| vals[vars.iter().position(|w| *w == v).unwrap()];
            let cov: Vec<i128> = t.cov.iter().map(|p| p.eval(&f)).collect();
            let con: Vec<i128> = t.con.iter().map(|p| p.eval(&f)).collect();
            (cov, con, t.heat.eval(&f))
        };
        let base = at(&vals);
        for k in 0..vars.len() {
            let mut bumped = vals.clone();
            bumped[k] += 1;
            let next = at(&bumped);
            let maps_ok = next.0.iter().zip(&base.0).all(|(a, b)| a >= b)
                && next.1.iter().zip(&base.1).all(|(a, b)| a >= b);
            let heat_ok = next
                .2
                .cmp_value(&base.2)
                .is_some_and(|o| o != std::cmp::Ordering::Less);
            if !maps_ok || !heat_ok {
                return Monotonicity::Violated {
                    var: vars[k],
                    point: vars.iter().copied().zip(vals).collect(),
                };
            }
        }
    }
    Monotonicity::Unknown
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Value {
    P(Poly),
    M(MultisetExpr),
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    names: &'a [(String, Var)],
}

impl ExprParser<'_> {
    fn err(&self, message: impl Into<String>) -> HeatError {
        HeatError::Parse {
            line: self.line,
            message: format!("column {}: {}", self.pos + 1, message.into()),
        }
    }

    fn skip(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Value, HeatError> {
        let mut acc = self.product()?;
        while self.eat('+') {
            let rhs = self.product()?;
            acc = match (acc, rhs) {
                (Value::P(a), Value::P(b)) => Value::P(a + b),
                (Value::M(a), Value::M(b)) => Value::M(a.add(&b)),
                (Value::M(m), Value::P(p)) | (Value::P(p), Value::M(m)) if p.is_zero() => {
                    Value::M(m)
                }
                _ => return Err(self.err("cannot add a number to a multiset")),
            };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Value, HeatError> {
        let mut acc = self.power()?;
        while self.eat('*') {
            let rhs = self.power()?;
            acc = match (acc, rhs) {
                (Value::P(a), Value::P(b)) => Value::P(a * b),
                (Value::P(p), Value::M(m)) | (Value::M(m), Value::P(p)) => Value::M(m.scale(&p)),
                (Value::M(_), Value::M(_)) => return Err(self.err("cannot multiply two multisets")),
            };
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Value, HeatError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.number()?;
            return match base {
                Value::P(p) => Ok(Value::P(p.pow(e as u32))),
                Value::M(_) => Err(self.err("cannot raise a multiset to a power")),
            };
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<i128, HeatError> {
        self.skip();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.err("expected a number"))
    }

    fn atom(&mut self) -> Result<Value, HeatError> {
        self.skip();
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_digit() => Ok(Value::P(Poly::constant(self.number()?))),
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_alphanumeric() || *c == '_')
                {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                if word == "ul" {
                    if !self.eat('(') {
                        return Err(self.err("expected `(` after ul"));
                    }
                    let arg = match self.sum()? {
                        Value::P(p) => p,
                        Value::M(_) => return Err(self.err("ul expects a number")),
                    };
                    if !self.eat(')') {
                        return Err(self.err("expected `)`"));
                    }
                    return Ok(Value::M(MultisetExpr::ul(arg)));
                }
                self.names
                    .iter()
                    .find(|(n, _)| *n == word)
                    .map(|(_, v)| Value::P(Poly::var(*v)))
                    .ok_or_else(|| self.err(format!("unknown variable `{word}`")))
            }
            _ => Err(self.err("expected an expression")),
        }
    }
}

fn parse_value(text: &str, names: &[(String, Var)], line: usize) -> Result<Value, HeatError> {
    let mut p = ExprParser {
        chars: text.chars().collect(),
        pos: 0,
        line,
        names,
    };
    let v = p.sum()?;
    p.skip();
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Parses a polynomial over named variables.
pub fn parse_poly(text: &str, names: &[(String, Var)]) -> Result<Poly, HeatError> {
    match parse_value(text, names, 1)? {
        Value::P(p) => Ok(p),
        Value::M(_) => Err(HeatError::Parse {
            line: 1,
            message: "expected a polynomial".into(),
        }),
    }
}

/// Parses a heat over named variables.
pub fn parse_heat(text: &str, names: &[(String, Var)], kind: HeatKind) -> Result<Heat, HeatError> {
    parse_heat_at(text, names, kind, 1)
}

fn parse_heat_at(
    text: &str,
    names: &[(String, Var)],
    kind: HeatKind,
    line: usize,
) -> Result<Heat, HeatError> {
    match (parse_value(text, names, line)?, kind) {
        (Value::P(p), HeatKind::Nat) => Ok(Heat::Nat(p)),
        (Value::M(m), HeatKind::Multiset) => Ok(Heat::Multiset(m)),
        (Value::P(p), HeatKind::Multiset) if p.is_zero() => {
            Ok(Heat::Multiset(MultisetExpr::zero()))
        }
        _ => Err(HeatError::Parse {
            line,
            message: "heat does not live in the declared monoid".into(),
        }),
    }
}

/// Splits `head(a,b)=(e1, e2)` into the bound names and the expressions.
fn parse_map(part: &str, head: &str, line: usize) -> Result<(Vec<String>, Vec<String>), HeatError> {
    let err = |m: &str| HeatError::Parse {
        line,
        message: format!("`{head}`: {m}"),
    };
    let rest = part
        .trim()
        .strip_prefix(head)
        .ok_or_else(|| err("missing"))?;
    let (vars, exprs) = rest.split_once('=').ok_or_else(|| err("expected `=`"))?;
    let unwrap = |s: &str| -> Result<String, HeatError> {
        let s = s.trim();
        s.strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .map(str::to_string)
            .ok_or_else(|| err("expected a parenthesised list"))
    };
    let split = |s: String| -> Vec<String> {
        // Split on top-level commas only.
        let mut out = Vec::new();
        let (mut depth, mut cur) = (0usize, String::new());
        for c in s.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    out.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
            cur.push(c);
        }
        if !cur.trim().is_empty() || !out.is_empty() {
            out.push(cur);
        }
        out.into_iter().map(|s| s.trim().to_string()).collect()
    };
    Ok((split(unwrap(vars)?), split(unwrap(exprs)?)))
}

/// Reads the interpretation text format:
///
/// ```text
/// name f1
/// carrier N* N* [N*]
/// tau: cov(i,j)=(j,i); con(k,l)=(l,k); heat = i*j*ul(l) + l*ul(i+j)
/// ```
pub fn parse_interpretation(text: &str) -> Result<Interpretation, HeatError> {
    let mut name = String::from("custom");
    let mut interp: Option<Interpretation> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |m: String| HeatError::Parse { line, message: m };
        if let Some(n) = content.strip_prefix("name ") {
            name = n.trim().to_string();
            if let Some(it) = interp.as_mut() {
                it.name = name.clone();
            }
            continue;
        }
        if let Some(rest) = content.strip_prefix("carrier ") {
            let words: Vec<&str> = rest.split_whitespace().collect();
            let carrier = |w: &str| match w {
                "N" => Ok(Carrier::N),
                "N*" => Ok(Carrier::NStar),
                _ => Err(err(format!("unknown carrier `{w}`"))),
            };
            let heat = match words.get(2) {
                Some(&"N") => HeatKind::Nat,
                Some(&"[N*]") => HeatKind::Multiset,
                _ => return Err(err("expected heat monoid `N` or `[N*]`".into())),
            };
            if words.len() != 3 {
                return Err(err("expected three carriers".into()));
            }
            let config = CarrierConfig {
                down: carrier(words[0])?,
                up: carrier(words[1])?,
                heat,
            };
            interp = Some(Interpretation::new(name.clone(), config));
            continue;
        }
        let it = interp
            .as_mut()
            .ok_or_else(|| err("`carrier` must come before the operators".into()))?;
        let (op, body) = content
            .split_once(':')
            .ok_or_else(|| err("expected `op: cov(..)=(..); con(..)=(..); heat = ..`".into()))?;
        let parts: Vec<&str> = body.split(';').collect();
        if parts.len() != 3 {
            return Err(err("expected three `;`-separated components".into()));
        }
        let (down_names, cov_src) = parse_map(parts[0], "cov", line)?;
        let (up_names, con_src) = parse_map(parts[1], "con", line)?;
        let mut names: Vec<(String, Var)> = Vec::new();
        for (k, n) in down_names.iter().enumerate() {
            names.push((n.clone(), Var::Down(k)));
        }
        for (k, n) in up_names.iter().enumerate() {
            names.push((n.clone(), Var::Up(k)));
        }
        if names.iter().map(|(n, _)| n).duplicates().next().is_some() {
            return Err(err("variable names must be distinct".into()));
        }
        let cov_names: Vec<(String, Var)> = names
            .iter()
            .filter(|(_, v)| matches!(v, Var::Down(_)))
            .cloned()
            .collect();
        let con_names: Vec<(String, Var)> = names
            .iter()
            .filter(|(_, v)| matches!(v, Var::Up(_)))
            .cloned()
            .collect();
        let polys = |srcs: &[String], names: &[(String, Var)]| -> Result<Vec<Poly>, HeatError> {
            srcs.iter()
                .map(|s| match parse_value(s, names, line)? {
                    Value::P(p) => Ok(p),
                    Value::M(_) => Err(HeatError::Parse {
                        line,
                        message: "maps take numeric values".into(),
                    }),
                })
                .collect()
        };
        let cov = polys(&cov_src, &cov_names)?;
        let con = polys(&con_src, &con_names)?;
        if con.len() != down_names.len() {
            return Err(err(format!(
                "`con` yields {} values for {} inputs",
                con.len(),
                down_names.len()
            )));
        }
        if cov.len() != up_names.len() {
            return Err(err(format!(
                "`cov` yields {} values for {} outputs",
                cov.len(),
                up_names.len()
            )));
        }
        let heat_src = parts[2]
            .trim()
            .strip_prefix("heat")
            .and_then(|s| s.trim().strip_prefix('='))
            .ok_or_else(|| err("expected `heat = ...`".into()))?;
        let heat = parse_heat_at(heat_src, &names, it.config.heat, line)?;
        let triple = InterpTriple::new(cov, con, heat);
        it.insert(op.trim(), triple)
            .map_err(|e| err(e.to_string()))?;
    }
    interp.ok_or_else(|| HeatError::Parse {
        line: 0,
        message: "missing `carrier` line".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU_LINE: &str = "tau: cov(i,j)=(j,i); con(k,l)=(l,k); heat = i*j*ul(l) + l*ul(i+j)";

    #[test]
    fn parse_and_write_round_trip() {
        let text = format!(
            "name demo\ncarrier N* N* [N*]\n{TAU_LINE}\neps: cov(i)=(); con()=(1); heat = 0\n"
        );
        let it = parse_interpretation(&text).unwrap();
        let tau = it.get("tau").unwrap();
        assert_eq!(tau.cov, vec![Poly::down(1), Poly::down(0)]);
        assert_eq!(
            tau.heat,
            Heat::Multiset(
                MultisetExpr::ul(Poly::up(1))
                    .scale(&(Poly::down(0) * Poly::down(1)))
                    .add(&MultisetExpr::ul(Poly::down(0) + Poly::down(1)).scale(&Poly::up(1)))
            )
        );
        let again = parse_interpretation(&it.write()).unwrap();
        assert_eq!(again, it);
    }

    #[test]
    fn rejects_bad_tables() {
        // ul(0) is not an element of [N*].
        let text = "carrier N N [N*]\nz: cov(i)=(i); con(k)=(k); heat = ul(i)\n";
        assert!(parse_interpretation(text).is_err());
        let text = "carrier N N N\nz: cov(i)=(i, i); con(k)=(k); heat = 0\n";
        assert!(matches!(
            parse_interpretation(text),
            Err(HeatError::Parse { line: 2, .. })
        ));
        let text = "carrier N N N\nz: cov(i)=(q); con(k)=(k); heat = 0\n";
        assert!(parse_interpretation(text).is_err());
    }

    #[test]
    fn monotonicity() {
        let cfg = CarrierConfig {
            down: Carrier::N,
            up: Carrier::N,
            heat: HeatKind::Nat,
        };
        let id = InterpTriple::identity(2, HeatKind::Nat);
        assert_eq!(monotonicity_check(&id, &cfg), Monotonicity::Monotone);
        let bad = InterpTriple::new(
            vec![Poly::constant(5) - Poly::down(0)],
            vec![Poly::up(0)],
            Heat::Nat(Poly::zero()),
        );
        assert!(matches!(
            monotonicity_check(&bad, &cfg),
            Monotonicity::Violated { .. }
        ));
        // (x-1)^2 is monotone on N* though it has a negative coefficient.
        let nstar = CarrierConfig {
            down: Carrier::NStar,
            ..cfg
        };
        let sq = InterpTriple::new(
            vec![(Poly::down(0) - Poly::constant(1)).pow(2)],
            vec![Poly::up(0)],
            Heat::Nat(Poly::zero()),
        );
        assert_eq!(monotonicity_check(&sq, &nstar), Monotonicity::Monotone);
    }
}

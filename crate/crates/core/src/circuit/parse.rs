//! Text syntax for circuits.
//!
//! ```text
//! expr   := tensor (';' tensor)*      composition, top to bottom
//! tensor := atom ('*' atom)*          side by side, left to right
//! atom   := name | 'id' '(' nat ')' | '(' expr ')'
//! ```

use super::{Circuit, CircuitError, Signature, Src};

/// Parsed but unresolved circuit expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitExpr {
    Op {
        name: String,
        line: usize,
        column: usize,
    },
    Id(usize),
    Compose(Vec<CircuitExpr>),
    Tensor(Vec<CircuitExpr>),
}

impl CircuitExpr {
    pub fn parse(text: &str) -> Result<CircuitExpr, CircuitError> {
        Self::parse_at(text, 1, 1)
    }

    /// Parses `text` reporting errors as if it started at `line`, `column`.
    pub fn parse_at(text: &str, line: usize, column: usize) -> Result<CircuitExpr, CircuitError> {
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            column,
        };
        p.skip_ws();
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
        }
        Ok(e)
    }

    pub fn resolve(&self, sig: &Signature) -> Result<Circuit, CircuitError> {
        match self {
            CircuitExpr::Op { name, line, column } => {
                sig.generator(name).map_err(|_| CircuitError::Parse {
                    line: *line,
                    column: *column,
                    message: format!("unknown operator `{name}`"),
                })
            }
            CircuitExpr::Id(n) => Ok(Circuit::identity(*n)),
            CircuitExpr::Tensor(parts) => {
                let mut acc = Circuit::identity(0);
                for p in parts {
                    acc = acc.tensor(&p.resolve(sig)?);
                }
                Ok(acc)
            }
            CircuitExpr::Compose(parts) => {
                let mut iter = parts.iter();
                let mut acc = iter.next().expect("non-empty composition").resolve(sig)?;
                for p in iter {
                    let next = p.resolve(sig)?;
                    acc = acc
                        .compose(&next)
                        .map_err(|e| match (e, p.first_position()) {
                            (
                                CircuitError::InterfaceMismatch { left, right },
                                Some((line, column)),
                            ) => CircuitError::Parse {
                                line,
                                column,
                                message: format!(
                                    "interface mismatch: {left} outputs cannot feed {right} inputs"
                                ),
                            },
                            (e, _) => e,
                        })?;
                }
                Ok(acc)
            }
        }
    }

    fn first_position(&self) -> Option<(usize, usize)> {
        match self {
            CircuitExpr::Op { line, column, .. } => Some((*line, *column)),
            CircuitExpr::Id(_) => None,
            CircuitExpr::Compose(v) | CircuitExpr::Tensor(v) => {
                v.iter().find_map(CircuitExpr::first_position)
            }
        }
    }
}

/// Parses and resolves a circuit expression against `sig`.
pub fn parse_circuit(text: &str, sig: &Signature) -> Result<Circuit, CircuitError> {
    CircuitExpr::parse(text)?.resolve(sig)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Parser {
    fn error(&self, message: String) -> CircuitError {
        let (mut line, mut column) = (self.line, self.column);
        for &c in &self.chars[..self.pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        CircuitError::Parse {
            line,
            column,
            message,
        }
    }

    fn location(&self) -> (usize, usize) {
        match self.error(String::new()) {
            CircuitError::Parse { line, column, .. } => (line, column),
            _ => unreachable!(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CircuitError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |c| format!("`{c}`"));
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    fn expr(&mut self) -> Result<CircuitExpr, CircuitError> {
        let mut parts = vec![self.tensor()?];
        while self.eat(';') {
            parts.push(self.tensor()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            CircuitExpr::Compose(parts)
        })
    }

    fn tensor(&mut self) -> Result<CircuitExpr, CircuitError> {
        let mut parts = vec![self.atom()?];
        while self.eat('*') {
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            CircuitExpr::Tensor(parts)
        })
    }

    fn atom(&mut self) -> Result<CircuitExpr, CircuitError> {
        self.skip_ws();
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        let (line, column) = self.location();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |c| format!("`{c}`"));
            return Err(self.error(format!("expected a circuit, found {found}")));
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if name == "id" {
            self.expect('(')?;
            self.skip_ws();
            let digits = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let text: String = self.chars[digits..self.pos].iter().collect();
            let n = text
                .parse()
                .map_err(|_| self.error("expected a wire count".into()))?;
            self.expect(')')?;
            return Ok(CircuitExpr::Id(n));
        }
        Ok(CircuitExpr::Op { name, line, column })
    }
}

/// Search budget for laying out zero-input nodes.
const PRINT_BUDGET: usize = 20_000;

struct Printer<'a> {
    c: &'a Circuit,
    budget: usize,
}

#[derive(Clone)]
struct State {
    wires: Vec<Src>,
    emitted: Vec<bool>,
    slices: Vec<String>,
}

fn slice(before: usize, name: &str, after: usize) -> String {
    let mut parts = Vec::new();
    if before > 0 {
        parts.push(format!("id({before})"));
    }
    parts.push(name.to_string());
    if after > 0 {
        parts.push(format!("id({after})"));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("({})", parts.join(" * "))
    }
}

impl Printer<'_> {
    fn pending_zero(&self, st: &State, s: Src) -> Option<usize> {
        match s {
            Src::Node { node, .. } if !st.emitted[node] && self.c.nodes[node].op.inputs() == 0 => {
                Some(node)
            }
            _ => None,
        }
    }

    fn emit(&self, st: &mut State, k: usize, at: usize) {
        let op = &self.c.nodes[k].op;
        let arity = op.inputs();
        let after = st.wires.len() - at - arity;
        st.slices.push(slice(at, op.name(), after));
        let outs = (0..op.outputs()).map(|port| Src::Node { node: k, port });
        st.wires.splice(at..at + arity, outs);
        st.emitted[k] = true;
    }

    /// Lays out the sources of `srcs` as a contiguous block of the current
    /// wires, inserting pending zero-input nodes into the gaps. Returns the
    /// start of the block, or `None` if the layout is impossible.
    fn gather(&self, st: &mut State, srcs: &[Src], anywhere: Option<usize>) -> Option<usize> {
        let present: Vec<(usize, usize)> = srcs
            .iter()
            .enumerate()
            .filter_map(|(i, s)| st.wires.iter().position(|w| w == s).map(|p| (i, p)))
            .collect();
        let start = match present.first() {
            Some(&(_, p)) => p,
            None => anywhere?,
        };
        // Pending sources must be whole output blocks of zero-input nodes.
        let mut i = 0;
        let mut plan = Vec::new();
        while i < srcs.len() {
            if present.iter().any(|&(j, _)| j == i) {
                i += 1;
                continue;
            }
            let z = self.pending_zero(st, srcs[i])?;
            let outs = self.c.nodes[z].op.outputs();
            for port in 0..outs {
                if srcs.get(i + port) != Some(&Src::Node { node: z, port }) {
                    return None;
                }
            }
            plan.push((i, z));
            i += outs;
        }
        // Present sources must sit at their final offsets once the gaps are
        // filled, i.e. contiguous apart from the planned insertions.
        let mut trial = st.clone();
        for (offset, z) in plan {
            if start + offset > trial.wires.len() {
                return None;
            }
            self.emit(&mut trial, z, start + offset);
        }
        if start + srcs.len() > trial.wires.len() || trial.wires[start..start + srcs.len()] != *srcs
        {
            return None;
        }
        *st = trial;
        Some(start)
    }

    fn solve(&mut self, mut st: State) -> Option<State> {
        loop {
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            // Greedy: advance past any node whose inputs are already in reach.
            let mut progressed = false;
            for k in 0..self.c.nodes.len() {
                if st.emitted[k] {
                    continue;
                }
                let srcs = &self.c.nodes[k].srcs;
                let anchored = srcs.iter().any(|s| st.wires.contains(s));
                if !anchored {
                    continue;
                }
                if let Some(at) = self.gather(&mut st, srcs, None) {
                    self.emit(&mut st, k, at);
                    progressed = true;
                    break;
                }
            }
            if progressed {
                continue;
            }
            if st.emitted.iter().all(|e| *e) {
                return (st.wires == self.c.outputs).then_some(st);
            }
            // Unanchored nodes: try every position.
            let remaining_nonzero =
                (0..self.c.nodes.len()).any(|k| !st.emitted[k] && self.c.nodes[k].op.inputs() > 0);
            if !remaining_nonzero {
                let mut done = st.clone();
                let outs = self.c.outputs.clone();
                if self.gather(&mut done, &outs, Some(0)) == Some(0)
                    && done.wires.len() == outs.len()
                    && done.emitted.iter().all(|e| *e)
                {
                    return Some(done);
                }
            }
            for k in 0..self.c.nodes.len() {
                if st.emitted[k] {
                    continue;
                }
                let srcs = self.c.nodes[k].srcs.clone();
                if srcs.iter().any(|s| self.pending_zero(&st, *s).is_none()) {
                    continue;
                }
                for pos in 0..=st.wires.len() {
                    let mut trial = st.clone();
                    if let Some(at) = self.gather(&mut trial, &srcs, Some(pos)) {
                        self.emit(&mut trial, k, at);
                        if let Some(done) = self.solve(trial) {
                            return Some(done);
                        }
                    }
                }
            }
            return None;
        }
    }
}

/// Finds an expression denoting `c`, or `None` if no planar layout was found.
pub(crate) fn try_print(c: &Circuit) -> Option<String> {
    let st = State {
        wires: (0..c.inputs).map(Src::Input).collect(),
        emitted: vec![false; c.nodes.len()],
        slices: Vec::new(),
    };
    let mut printer = Printer {
        c,
        budget: PRINT_BUDGET,
    };
    let done = printer.solve(st)?;
    Some(if done.slices.is_empty() {
        format!("id({})", c.inputs)
    } else {
        done.slices.join(" ; ")
    })
}

pub(crate) fn print_circuit(c: &Circuit) -> String {
    try_print(c)
        .or_else(|| try_print(&c.canonical()))
        .unwrap_or_else(|| format!("<non-planar circuit>\n{}", c.layer_dump()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Operator;

    fn sig() -> Signature {
        Signature::from_operators([
            Operator::new("mu", 2, 1),
            Operator::new("eta", 0, 1),
            Operator::new("delta", 1, 2),
            Operator::new("epsilon", 1, 0),
            Operator::new("tau", 2, 2),
        ])
        .unwrap()
    }

    #[test]
    fn parses_braid() {
        let c = parse_circuit("(id(1) * tau) ; (tau * id(1)) ; (id(1) * tau)", &sig()).unwrap();
        assert_eq!((c.inputs(), c.outputs(), c.node_count()), (3, 3, 3));
    }

    #[test]
    fn precedence() {
        let a = parse_circuit("delta ; mu * epsilon", &sig());
        assert!(a.is_err());
        let b = parse_circuit("delta * eta ; mu * id(1)", &sig()).unwrap();
        assert_eq!((b.inputs(), b.outputs()), (1, 2));
    }

    #[test]
    fn error_location() {
        match parse_circuit("delta ;\n  (mu * ", &sig()) {
            Err(CircuitError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 9)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_circuit("delta ; nope", &sig()) {
            Err(CircuitError::Parse { line, column, .. }) => assert_eq!((line, column), (1, 9)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn print_round_trip() {
        let s = sig();
        for text in [
            "id(0)",
            "id(2)",
            "eta ; epsilon",
            "mu ; delta",
            "(eta * id(1)) ; mu",
            "delta ; (delta * id(1)) ; (id(1) * tau)",
            "(delta * delta) ; (id(1) * tau * id(1)) ; (mu * mu)",
            "eta * (eta ; delta) * id(1)",
            "(id(1) * eta) ; tau ; (epsilon * id(1))",
        ] {
            let c = parse_circuit(text, &s).unwrap();
            let printed = c.to_expr();
            let back = parse_circuit(&printed, &s).unwrap();
            assert!(back.equivalent(&c), "{text} printed as {printed}");
        }
    }
}

//! Polygraph files.
//!
//! ```text
//! # comment
//! op mu : 2 -> 1
//! assoc: (mu * id(1)) ; mu => (id(1) * mu) ; mu
//! ```

use crate::circuit::{CircuitError, CircuitExpr, Operator, Signature};

use super::{Polygraph, RewriteError, Rule};

/// Parses `op name : m -> n`; `None` if the line is not a declaration.
pub(crate) fn parse_op_decl(line: &str, lineno: usize) -> Option<Result<Operator, RewriteError>> {
    let rest = line.strip_prefix("op")?;
    if !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let err = |message: &str| RewriteError::Syntax {
        line: lineno,
        message: message.to_string(),
    };
    let parse = || -> Result<Operator, RewriteError> {
        let (name, arity) = rest
            .split_once(':')
            .ok_or_else(|| err("expected `op name : m -> n`"))?;
        let name = name.trim();
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
        {
            return Err(err("invalid operator name"));
        }
        let (m, n) = arity
            .split_once("->")
            .ok_or_else(|| err("expected `m -> n`"))?;
        let m = m.trim().parse().map_err(|_| err("invalid input arity"))?;
        let n = n.trim().parse().map_err(|_| err("invalid output arity"))?;
        Ok(Operator::new(name, m, n))
    };
    Some(parse())
}

/// Strips a trailing `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

/// A piece of a line with its 1-based starting column.
pub(crate) type Located<'a> = (&'a str, usize);

/// Splits `name: lhs => rhs` into its parts with the columns where each side
/// starts (1-based).
pub(crate) fn split_rule(
    line: &str,
    lineno: usize,
) -> Result<(&str, Located<'_>, Located<'_>), RewriteError> {
    let err = |message: &str| RewriteError::Syntax {
        line: lineno,
        message: message.to_string(),
    };
    let colon = line
        .find(':')
        .ok_or_else(|| err("expected `name: lhs => rhs`"))?;
    let name = line[..colon].trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(err("invalid rule name"));
    }
    let arrow = line[colon..]
        .find("=>")
        .map(|i| i + colon)
        .ok_or_else(|| err("expected `=>`"))?;
    let lhs = &line[colon + 1..arrow];
    let rhs = &line[arrow + 2..];
    let column = |start: usize| line[..start].chars().count() + 1;
    Ok((name, (lhs, column(colon + 1)), (rhs, column(arrow + 2))))
}

pub fn parse_polygraph(text: &str) -> Result<Polygraph, RewriteError> {
    let mut sig = Signature::new();
    let mut pending = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(op) = parse_op_decl(trimmed, lineno) {
            sig.add(op?).map_err(|e| RewriteError::Syntax {
                line: lineno,
                message: e.to_string(),
            })?;
            continue;
        }
        let (name, (lhs, lc), (rhs, rc)) = split_rule(line, lineno)?;
        let lhs = CircuitExpr::parse_at(lhs, lineno, lc)?;
        let rhs = CircuitExpr::parse_at(rhs, lineno, rc)?;
        pending.push((lineno, name.to_string(), lhs, rhs));
    }
    let mut p = Polygraph::new(sig, Vec::new())?;
    for (lineno, name, lhs, rhs) in pending {
        let lhs = lhs.resolve(p.signature())?;
        let rhs = rhs.resolve(p.signature())?;
        let rule = Rule::new(name, lhs, rhs).map_err(|e| match e {
            RewriteError::Circuit(CircuitError::Parse { .. }) => e,
            other => RewriteError::Syntax {
                line: lineno,
                message: other.to_string(),
            },
        })?;
        p.push(rule).map_err(|e| RewriteError::Syntax {
            line: lineno,
            message: e.to_string(),
        })?;
    }
    Ok(p)
}

pub fn write_polygraph(p: &Polygraph) -> String {
    let mut out = String::new();
    for op in p.signature().operators() {
        out.push_str(&format!("op {op}\n"));
    }
    for r in p.rules() {
        out.push_str(&format!(
            "{}: {} => {}\n",
            r.name(),
            r.lhs().to_expr(),
            r.rhs().to_expr()
        ));
    }
    out
}

//! Term and TRS file syntax.
//!
//! ```text
//! op mu : 2 -> 1
//! op eta : 0 -> 1
//! A: mu(mu(x1,x2),x3) => mu(x1,mu(x2,x3))
//! ```

use crate::circuit::Signature;
use crate::rewrite::parse::{parse_op_decl, split_rule, strip_comment};

use super::{Term, TermError, Trs, TrsRule};

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> TermError {
        TermError::Parse {
            line: self.line,
            column: self.column + self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_' || *c == '\'')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a term"));
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if let Some(idx) = name.strip_prefix('x') {
            if !idx.is_empty() && idx.chars().all(|c| c.is_ascii_digit()) {
                let i: usize = idx.parse().map_err(|_| self.error("bad variable"))?;
                if i == 0 {
                    return Err(self.error("variables start at x1"));
                }
                return Ok(Term::Var(i));
            }
        }
        let op_column = start;
        let mut args = Vec::new();
        if self.eat('(') && !self.eat(')') {
            loop {
                args.push(self.term()?);
                if self.eat(')') {
                    break;
                }
                if !self.eat(',') {
                    return Err(self.error("expected `,` or `)`"));
                }
            }
        }
        let op = self.sig.get(&name).ok_or_else(|| TermError::Parse {
            line: self.line,
            column: self.column + op_column,
            message: format!("unknown operator `{name}`"),
        })?;
        if !op.is_algebraic() {
            return Err(TermError::NotAlgebraic(name));
        }
        if op.inputs() != args.len() {
            return Err(TermError::Parse {
                line: self.line,
                column: self.column + op_column,
                message: format!(
                    "operator `{name}` expects {} arguments, got {}",
                    op.inputs(),
                    args.len()
                ),
            });
        }
        Ok(Term::App(name, args))
    }
}

fn parse_term_at(
    text: &str,
    sig: &Signature,
    line: usize,
    column: usize,
) -> Result<Term, TermError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line,
        column,
        sig,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(t)
}

/// Parses a term such as `mu(x1,eta)` over `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, TermError> {
    parse_term_at(text, sig, 1, 1)
}

pub fn parse_trs(text: &str) -> Result<Trs, TermError> {
    let mut sig = Signature::new();
    let mut rules = Vec::new();
    let syntax = |line, message: String| TermError::Parse {
        line,
        column: 1,
        message,
    };
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(op) = parse_op_decl(trimmed, lineno) {
            let op = op.map_err(|e| syntax(lineno, e.to_string()))?;
            if !op.is_algebraic() {
                return Err(TermError::NotAlgebraic(op.name().to_string()));
            }
            sig.add(op).map_err(|e| syntax(lineno, e.to_string()))?;
            continue;
        }
        let (name, (lhs, lc), (rhs, rc)) =
            split_rule(line, lineno).map_err(|e| syntax(lineno, e.to_string()))?;
        let lhs = parse_term_at(lhs, &sig, lineno, lc)?;
        let rhs = parse_term_at(rhs, &sig, lineno, rc)?;
        if rules.iter().any(|r: &TrsRule| r.name() == name) {
            return Err(syntax(lineno, format!("duplicate rule `{name}`")));
        }
        rules.push(TrsRule::new(name, lhs, rhs)?);
    }
    Trs::new(sig, rules)
}

pub fn write_trs(trs: &Trs) -> String {
    let mut out = String::new();
    for op in trs.signature().operators() {
        out.push_str(&format!("op {op}\n"));
    }
    for r in trs.rules() {
        out.push_str(&format!("{r}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_monoid() {
        let trs = parse_trs(
            "op mu : 2 -> 1\nop eta : 0 -> 1\nA: mu(mu(x1,x2),x3) => mu(x1,mu(x2,x3))\nL: mu(eta,x1) => x1\n",
        )
        .unwrap();
        assert_eq!(trs.rules().len(), 2);
        assert_eq!(parse_trs(&write_trs(&trs)).unwrap(), trs);
    }

    #[test]
    fn errors() {
        let sig_text = "op mu : 2 -> 1\n";
        assert!(matches!(
            parse_trs(&format!("{sig_text}A: mu(x1) => x1\n")),
            Err(TermError::Parse {
                line: 2,
                column: 4,
                ..
            })
        ));
        assert!(matches!(
            parse_trs("op d : 1 -> 2\n"),
            Err(TermError::NotAlgebraic(_))
        ));
        assert!(matches!(
            parse_trs(&format!("{sig_text}A: mu(x1,x2) => nu\n")),
            Err(TermError::Parse {
                line: 2,
                column: 17,
                ..
            })
        ));
    }
}

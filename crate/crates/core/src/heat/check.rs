//! Rule certification and the layered termination argument.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::rewrite::{Polygraph, Rule};

use super::compare::{compare_sym, CarrierConfig, Cmp};
use super::poly::Var;
use super::{var_name, HeatError, InterpTriple, Interpretation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RuleVerdict {
    /// Maps do not increase and the heat strictly decreases.
    Strict,
    /// Both sides have the same image.
    Invariant,
    /// Nothing increases, but the heat may stay equal.
    NonStrict,
    Unknown,
}

/// The comparison of both sides of a rule under one interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleCheck {
    pub rule: String,
    pub interpretation: String,
    pub verdict: RuleVerdict,
    pub cov: Vec<Cmp>,
    pub con: Vec<Cmp>,
    pub heat: Cmp,
    pub lhs: InterpTriple,
    pub rhs: InterpTriple,
    /// A small assignment where the strict decrease fails, if one was found.
    pub witness: Option<Vec<(Var, i128)>>,
}

fn combine(maps: &[Cmp]) -> Cmp {
    if maps.iter().all(|c| *c == Cmp::Eq) {
        Cmp::Eq
    } else if maps.iter().all(|c| c.is_ge()) {
        Cmp::Ge
    } else {
        Cmp::Unknown
    }
}

/// Compares both sides with the given map comparisons skipped (used for
/// self-dual rules, where one map comparison implies the other).
pub(crate) fn check_rule_with(
    it: &Interpretation,
    rule: &Rule,
    skip_con: bool,
) -> Result<RuleCheck, HeatError> {
    let lhs = it.interpret(rule.lhs())?;
    let rhs = it.interpret(rule.rhs())?;
    let cfg = it.config();
    let cov: Vec<Cmp> = lhs
        .cov
        .iter()
        .zip(&rhs.cov)
        .map(|(a, b)| compare_sym(a, b, cfg))
        .collect();
    let con: Vec<Cmp> = if skip_con {
        Vec::new()
    } else {
        lhs.con
            .iter()
            .zip(&rhs.con)
            .map(|(a, b)| compare_sym(a, b, cfg))
            .collect()
    };
    let heat = lhs.heat.compare(&rhs.heat, cfg);
    let maps = combine(&cov.iter().chain(&con).copied().collect::<Vec<_>>());
    let verdict = if lhs == rhs {
        RuleVerdict::Invariant
    } else if maps.is_ge() && heat == Cmp::Gt {
        RuleVerdict::Strict
    } else if maps.is_ge() && heat.is_ge() {
        RuleVerdict::NonStrict
    } else {
        RuleVerdict::Unknown
    };
    let witness = match verdict {
        RuleVerdict::Strict | RuleVerdict::Invariant => None,
        _ => refute_decrease(&lhs, &rhs, cfg),
    };
    Ok(RuleCheck {
        rule: rule.name().to_string(),
        interpretation: it.name().to_string(),
        verdict,
        cov,
        con,
        heat,
        lhs,
        rhs,
        witness,
    })
}

/// Classifies a rule under an interpretation.
pub fn check_rule(it: &Interpretation, rule: &Rule) -> Result<RuleCheck, HeatError> {
    check_rule_with(it, rule, false)
}

/// Looks for a point of `{min..min+2}^vars` where `lhs ≻ rhs` fails.
fn refute_decrease(
    lhs: &InterpTriple,
    rhs: &InterpTriple,
    cfg: &CarrierConfig,
) -> Option<Vec<(Var, i128)>> {
    let vars: Vec<Var> = (0..lhs.inputs)
        .map(Var::Down)
        .chain((0..lhs.outputs).map(Var::Up))
        .collect();
    if vars.len() > 8 {
        return None;
    }
    vars.iter()
        .map(|&v| (cfg.min(v)..cfg.min(v) + 3).collect::<Vec<_>>())
        .multi_cartesian_product()
        .chain(vars.is_empty().then(Vec::new))
        .find_map(|vals| {
            let f = |v: Var| vals[vars.iter().position(|w| *w == v).unwrap()];
            let ge = |a: &[super::Poly], b: &[super::Poly]| {
                a.iter().zip(b).all(|(x, y)| x.eval(&f) >= y.eval(&f))
            };
            let heat_gt = lhs.heat.eval(&f).cmp_value(&rhs.heat.eval(&f))
                == Some(std::cmp::Ordering::Greater);
            let holds = ge(&lhs.cov, &rhs.cov) && ge(&lhs.con, &rhs.con) && heat_gt;
            (!holds).then(|| vars.iter().copied().zip(vals).collect())
        })
}

/// One layer's verdict inside a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerVerdict {
    pub interpretation: String,
    pub verdict: RuleVerdict,
    pub cov: Vec<Cmp>,
    pub con: Vec<Cmp>,
    pub heat: Cmp,
    pub lhs_heat: String,
    pub rhs_heat: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(String, i128)>>,
}

impl From<&RuleCheck> for LayerVerdict {
    fn from(c: &RuleCheck) -> Self {
        let name = |v: Var| var_name(v, c.lhs.inputs);
        LayerVerdict {
            interpretation: c.interpretation.clone(),
            verdict: c.verdict,
            cov: c.cov.clone(),
            con: c.con.clone(),
            heat: c.heat,
            lhs_heat: c.lhs.heat.display_with(&name),
            rhs_heat: c.rhs.heat.display_with(&name),
            witness: c
                .witness
                .as_ref()
                .map(|w| w.iter().map(|(v, x)| (name(*v), *x)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub rule: String,
    /// 1-based layer in which the rule strictly decreases.
    pub layer: Option<usize>,
    pub verdicts: Vec<LayerVerdict>,
}

/// Every rule strictly decreases in some layer and is invariant in all
/// earlier layers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub layers: Vec<String>,
    pub entries: Vec<CertificateEntry>,
}

impl Certificate {
    pub fn entry(&self, rule: &str) -> Option<&CertificateEntry> {
        self.entries.iter().find(|e| e.rule == rule)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "kebab-case")]
pub enum TerminationFailure {
    /// An interpretation does not apply to the polygraph.
    Interpretation { message: String },
    /// Some rules are not placed in any layer.
    Rules {
        offending: Vec<String>,
        layers: Vec<String>,
        entries: Vec<CertificateEntry>,
    },
}

fn place(layers: &[Interpretation], rule: &Rule) -> Result<CertificateEntry, HeatError> {
    let mut verdicts = Vec::new();
    for (k, it) in layers.iter().enumerate() {
        let check = check_rule(it, rule)?;
        verdicts.push(LayerVerdict::from(&check));
        match check.verdict {
            RuleVerdict::Strict => {
                return Ok(CertificateEntry {
                    rule: rule.name().to_string(),
                    layer: Some(k + 1),
                    verdicts,
                })
            }
            RuleVerdict::Invariant => continue,
            _ => break,
        }
    }
    Ok(CertificateEntry {
        rule: rule.name().to_string(),
        layer: None,
        verdicts,
    })
}

/// Certifies termination of `p` with a lexicographic stack of
/// interpretations.
pub fn layered_termination(
    p: &Polygraph,
    layers: &[Interpretation],
) -> Result<Certificate, TerminationFailure> {
    let names: Vec<String> = layers.iter().map(|l| l.name().to_string()).collect();
    if layers.is_empty() {
        return Err(TerminationFailure::Interpretation {
            message: "at least one layer is required".into(),
        });
    }
    for it in layers {
        it.covers(p.signature())
            .map_err(|e| TerminationFailure::Interpretation {
                message: e.to_string(),
            })?;
    }
    let entries = p
        .rules()
        .par_iter()
        .map(|r| place(layers, r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| TerminationFailure::Interpretation {
            message: e.to_string(),
        })?;
    let offending: Vec<String> = entries
        .iter()
        .filter(|e| e.layer.is_none())
        .map(|e| e.rule.clone())
        .collect();
    if offending.is_empty() {
        Ok(Certificate {
            layers: names,
            entries,
        })
    } else {
        Err(TerminationFailure::Rules {
            offending,
            layers: names,
            entries,
        })
    }
}

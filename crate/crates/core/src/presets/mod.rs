//! The concrete systems shipped with the crate: the monoid-like term
//! rewriting systems R0 ⊂ R1 ⊂ R2 with their translations, the resource
//! rules over the monoid signature, and the Z/2Z-vector-space polygraph.
//!
//! Data files are embedded at build time; setting `POLY_DATA_DIR` makes
//! [`load_preset`] read them from that directory instead. Translations
//! always use the built-in resource rules.

mod duality;
mod gf2;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitError, Operator, Signature};
use crate::heat::{f1, g, layered_termination, lz2, HeatError, Interpretation, TerminationFailure};
use crate::rewrite::{parse_polygraph, Polygraph, RewriteError};
use crate::term::{parse_trs, TermError, Trs};
use crate::translate::{build_sigma_c, rsigma_rules, translate_trs, TranslateError, Translation};

pub use duality::{
    check_compatibility, check_representatives, dedup_rules_for_checking, DedupClass, DedupReport,
    Duality,
};
pub use gf2::{gf2_semantics, Gf2Map};
pub use verify::{verify_loaded, verify_preset, CheckOutcome, VerifyOptions, VerifyReport};

/// Environment variable overriding the data directory.
pub const DATA_DIR_VAR: &str = "POLY_DATA_DIR";

pub(crate) const LZ2_SOURCE: &str = include_str!("../../data/lz2.poly");
const EMBEDDED: [(&str, &str); 5] = [
    ("r0.trs", include_str!("../../data/r0.trs")),
    ("r1.trs", include_str!("../../data/r1.trs")),
    ("r2.trs", include_str!("../../data/r2.trs")),
    ("lz2.poly", LZ2_SOURCE),
    ("rdelta.poly", include_str!("../../data/rdelta.poly")),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresetError {
    #[error("unknown preset `{0}` (expected one of R0, R1, R2, R0c, R1c, R2c, RDS, LZ2)")]
    Unknown(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("operator `{0}` has no dual")]
    NoDual(String),
    #[error("interpretation is not compatible with the duality: {0}")]
    Compatibility(String),
    #[error("{0}")]
    Semantics(String),
    #[error("preset {preset} does not match its expected verdicts:\n{}", diffs.join("\n"))]
    Validation { preset: String, diffs: Vec<String> },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Heat(#[from] HeatError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PresetName {
    R0,
    R1,
    R2,
    R0c,
    R1c,
    R2c,
    Rds,
    Lz2,
}

impl PresetName {
    pub const ALL: [PresetName; 8] = [
        PresetName::R0,
        PresetName::R1,
        PresetName::R2,
        PresetName::R0c,
        PresetName::R1c,
        PresetName::R2c,
        PresetName::Rds,
        PresetName::Lz2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::R0 => "R0",
            PresetName::R1 => "R1",
            PresetName::R2 => "R2",
            PresetName::R0c => "R0c",
            PresetName::R1c => "R1c",
            PresetName::R2c => "R2c",
            PresetName::Rds => "RDS",
            PresetName::Lz2 => "LZ2",
        }
    }

    fn trs_file(self) -> Option<&'static str> {
        match self {
            PresetName::R0 | PresetName::R0c => Some("r0.trs"),
            PresetName::R1 | PresetName::R1c => Some("r1.trs"),
            PresetName::R2 | PresetName::R2c => Some("r2.trs"),
            _ => None,
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = PresetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| PresetError::Unknown(s.to_string()))
    }
}

/// Where a rule is expected to strictly decrease: `Some(k)` for the
/// 1-based layer, `None` when no layer certifies it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expectation {
    pub rule: String,
    pub layer: Option<usize>,
}

/// A validated system with its termination layers.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: PresetName,
    /// The term rewriting system and its translation, for R0/R1/R2.
    pub translation: Option<Translation>,
    pub polygraph: Polygraph,
    pub layers: Vec<Interpretation>,
    pub expected: Vec<Expectation>,
    pub duality: Duality,
}

impl Preset {
    pub fn trs(&self) -> Option<&Trs> {
        self.translation.as_ref().map(|t| &t.trs)
    }

    /// Whether the layers are expected to certify every rule.
    pub fn expects_certificate(&self) -> bool {
        self.expected.iter().all(|e| e.layer.is_some())
    }
}

/// `mu : 2 -> 1`, `eta : 0 -> 1`.
pub fn monoid_signature() -> Signature {
    Signature::from_operators([Operator::new("mu", 2, 1), Operator::new("eta", 0, 1)])
        .expect("distinct names")
}

/// Reads a data file, honouring `POLY_DATA_DIR`.
pub fn read_data(file: &str) -> Result<String, PresetError> {
    if let Some(dir) = std::env::var_os(DATA_DIR_VAR) {
        let path = PathBuf::from(dir).join(file);
        return std::fs::read_to_string(&path).map_err(|e| PresetError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        });
    }
    EMBEDDED
        .iter()
        .find(|(name, _)| *name == file)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| PresetError::Io {
            path: file.to_string(),
            message: "no such embedded file".into(),
        })
}

/// Expected placement under `[f1, g]`: the Yang–Baxter rule in the second
/// layer, every other resource rule in the first.
fn resource_expectations(p: &Polygraph) -> Vec<Expectation> {
    p.rules()
        .iter()
        .map(|r| Expectation {
            rule: r.name().to_string(),
            layer: Some(if r.name() == "alpha" { 2 } else { 1 }),
        })
        .collect()
}

/// Expected placement of the translated term rules: associativity is
/// invisible to both layers, commutativity increases the heat, the unit and
/// nilpotency rules strictly decrease.
fn phi_expectation(term_rule: &str) -> Option<usize> {
    match term_rule {
        "L" | "R" | "S" => Some(1),
        _ => None,
    }
}

fn translated(name: PresetName, file: &str) -> Result<Preset, PresetError> {
    let trs = parse_trs(&read_data(file)?)?;
    let tr = translate_trs(&trs)?;
    let sig = tr.polygraph.signature().clone();
    let mut expected = resource_expectations(&tr.resource);
    for r in trs.rules() {
        expected.push(Expectation {
            rule: Translation::phi_rule_name(r.name()),
            layer: phi_expectation(r.name()),
        });
    }
    Ok(Preset {
        name,
        polygraph: tr.polygraph.clone(),
        translation: Some(tr),
        layers: vec![f1(&sig)?, g(&sig)?],
        expected,
        duality: Duality::trivial(),
    })
}

fn resource_preset() -> Result<Preset, PresetError> {
    let rdelta = parse_polygraph(&read_data("rdelta.poly")?)?;
    let sig = monoid_signature();
    let mut rules = rdelta.rules().to_vec();
    for op in sig.operators() {
        rules.extend(rsigma_rules(op));
    }
    let p = Polygraph::new(build_sigma_c(&sig)?, rules)?;
    let s = p.signature().clone();
    Ok(Preset {
        name: PresetName::Rds,
        translation: None,
        expected: resource_expectations(&p),
        polygraph: p,
        layers: vec![f1(&s)?, g(&s)?],
        duality: Duality::trivial(),
    })
}

fn lz2_preset() -> Result<Preset, PresetError> {
    let p = parse_polygraph(&read_data("lz2.poly")?)?;
    let it = lz2();
    it.covers(p.signature())?;
    let duality = Duality::lz2();
    duality.check(p.signature())?;
    Ok(Preset {
        name: PresetName::Lz2,
        translation: None,
        expected: p
            .rules()
            .iter()
            .map(|r| Expectation {
                rule: r.name().to_string(),
                layer: Some(1),
            })
            .collect(),
        polygraph: p,
        layers: vec![it],
        duality,
    })
}

/// Places every rule in the layers and returns the differences from the
/// expected placement.
pub fn expectation_diffs(preset: &Preset) -> Result<Vec<String>, PresetError> {
    let entries = match layered_termination(&preset.polygraph, &preset.layers) {
        Ok(cert) => cert.entries,
        Err(TerminationFailure::Rules { entries, .. }) => entries,
        Err(TerminationFailure::Interpretation { message }) => {
            return Err(PresetError::Semantics(message))
        }
    };
    let mut diffs = Vec::new();
    for e in &preset.expected {
        let found = entries.iter().find(|x| x.rule == e.rule).map(|x| x.layer);
        match found {
            None => diffs.push(format!("  {}: expected, not in the polygraph", e.rule)),
            Some(layer) if layer != e.layer => diffs.push(format!(
                "  {}: expected layer {:?}, found {:?}",
                e.rule, e.layer, layer
            )),
            Some(_) => {}
        }
    }
    for x in &entries {
        if !preset.expected.iter().any(|e| e.rule == x.rule) {
            diffs.push(format!("  {}: no expectation recorded", x.rule));
        }
    }
    Ok(diffs)
}

/// Loads and validates a preset by name (case-insensitive).
pub fn load_preset(name: &str) -> Result<Preset, PresetError> {
    let name: PresetName = name.parse()?;
    let preset = match name {
        PresetName::Rds => resource_preset()?,
        PresetName::Lz2 => lz2_preset()?,
        other => translated(other, other.trs_file().expect("term presets have a file"))?,
    };
    let diffs = expectation_diffs(&preset)?;
    if !diffs.is_empty() {
        return Err(PresetError::Validation {
            preset: name.to_string(),
            diffs,
        });
    }
    Ok(preset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse_case_insensitively() {
        assert_eq!("rds".parse::<PresetName>().unwrap(), PresetName::Rds);
        assert_eq!("R2C".parse::<PresetName>().unwrap(), PresetName::R2c);
        assert!(matches!(
            "R3".parse::<PresetName>(),
            Err(PresetError::Unknown(_))
        ));
    }

    #[test]
    fn term_presets() {
        let r0 = load_preset("R0").unwrap();
        let trs = r0.trs().unwrap();
        assert_eq!(trs.rules().len(), 3);
        assert!(trs.is_left_linear());
        assert_eq!(load_preset("R1").unwrap().trs().unwrap().rules().len(), 4);
        let r2 = load_preset("R2").unwrap();
        assert_eq!(r2.trs().unwrap().rules().len(), 5);
        assert!(!r2.trs().unwrap().rule("S").unwrap().is_left_linear());
        // 12 resource rules, 4 per operator, 3 translated rules.
        assert_eq!(r0.polygraph.rules().len(), 23);
    }

    #[test]
    fn lz2_preset_has_six_operators() {
        let p = load_preset("LZ2").unwrap();
        assert_eq!(p.polygraph.signature().len(), 6);
        assert_eq!(
            p.polygraph.signature().get("kappa"),
            Some(&Operator::new("kappa", 2, 2))
        );
        assert!(p.expects_certificate());
    }

    #[test]
    fn resource_preset_is_certified() {
        let p = load_preset("RDS").unwrap();
        assert!(p.expects_certificate());
        assert_eq!(p.polygraph.rules().len(), 20);
    }
}

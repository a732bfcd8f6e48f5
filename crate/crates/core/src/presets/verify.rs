//! The full battery of checks run on a preset.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::random::random_circuit;
use crate::heat::RuleVerdict;
use crate::rewrite::{check_local_confluence, critical_pairs};
use crate::term::{finset_semantics, project_pi, uniformize};
use crate::translate::{DELTA, EPSILON, TAU};

use super::duality::{check_compatibility, check_representatives, dedup_rules_for_checking};
use super::gf2::gf2_semantics;
use super::{expectation_diffs, load_preset, Preset, PresetError, PresetName};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub preset: String,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, check: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            check: check.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Size bound for critical pair sources.
    pub max_nodes: usize,
    /// Fuel for joining each critical pair.
    pub fuel: usize,
    /// Random circuits used by sampled checks.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_nodes: 6,
            fuel: 200,
            samples: 200,
            seed: 0,
        }
    }
}

/// Loads `name` and runs [`verify_loaded`] with default options.
pub fn verify_preset(name: &str) -> Result<VerifyReport, PresetError> {
    verify_loaded(&load_preset(name)?, &VerifyOptions::default())
}

pub fn verify_loaded(preset: &Preset, opts: &VerifyOptions) -> Result<VerifyReport, PresetError> {
    let mut report = VerifyReport {
        preset: preset.name.to_string(),
        checks: Vec::new(),
    };
    termination(preset, &mut report)?;
    match preset.name {
        PresetName::Lz2 => {
            linear_soundness(preset, &mut report)?;
            duality(preset, opts, &mut report)?;
            confluence(preset, opts, &mut report, false);
        }
        PresetName::Rds => {
            projection_soundness(preset, &mut report)?;
            confluence(preset, opts, &mut report, true);
        }
        PresetName::R0 | PresetName::R0c => {
            projection_soundness(preset, &mut report)?;
            confluence(preset, opts, &mut report, true);
        }
        _ => projection_soundness(preset, &mut report)?,
    }
    Ok(report)
}

fn termination(preset: &Preset, report: &mut VerifyReport) -> Result<(), PresetError> {
    let diffs = expectation_diffs(preset)?;
    let layers: Vec<&str> = preset.layers.iter().map(|l| l.name()).collect();
    let offending: Vec<&str> = preset
        .expected
        .iter()
        .filter(|e| e.layer.is_none())
        .map(|e| e.rule.as_str())
        .collect();
    let detail = if offending.is_empty() {
        format!("certified by [{}]", layers.join(", "))
    } else {
        format!(
            "not certified by [{}] (expected): {}",
            layers.join(", "),
            offending.join(", ")
        )
    };
    report.push(
        "termination",
        diffs.is_empty(),
        if diffs.is_empty() {
            detail
        } else {
            diffs.join("; ")
        },
    );
    Ok(())
}

/// Every resource rule preserves the term projection (and the finite-set
/// semantics when it only uses resource operators); every translated rule
/// projects onto its term rule.
fn projection_soundness(preset: &Preset, report: &mut VerifyReport) -> Result<(), PresetError> {
    let mut bad = Vec::new();
    for r in preset.polygraph.rules() {
        let (l, rr) = (project_pi(r.lhs())?, project_pi(r.rhs())?);
        let source = preset
            .translation
            .as_ref()
            .and_then(|t| t.manifest.iter().find(|m| m.rule == r.name()))
            .and_then(|m| m.source.clone());
        match source {
            Some(term_rule) => {
                let tr = preset
                    .trs()
                    .and_then(|t| t.rule(&term_rule))
                    .expect("manifest names a rule");
                let u = uniformize(tr);
                if l.terms() != [u.lhs().clone()] || rr.terms() != [u.rhs().clone()] {
                    bad.push(r.name().to_string());
                }
            }
            None => {
                let finset_differs = r.lhs().uses_only(&[TAU, DELTA, EPSILON])
                    && finset_semantics(r.lhs())? != finset_semantics(r.rhs())?;
                if l != rr || finset_differs {
                    bad.push(r.name().to_string());
                }
            }
        }
    }
    let n = preset.polygraph.rules().len();
    report.push(
        "projection",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{n} rules preserve the term projection")
        } else {
            format!("unsound: {}", bad.join(", "))
        },
    );
    Ok(())
}

fn linear_soundness(preset: &Preset, report: &mut VerifyReport) -> Result<(), PresetError> {
    let mut bad = Vec::new();
    for r in preset.polygraph.rules() {
        if gf2_semantics(r.lhs())? != gf2_semantics(r.rhs())? {
            bad.push(r.name().to_string());
        }
    }
    report.push(
        "linear semantics",
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "{} rules preserve the GF(2) matrix",
                preset.polygraph.rules().len()
            )
        } else {
            format!("unsound: {}", bad.join(", "))
        },
    );
    Ok(())
}

fn duality(
    preset: &Preset,
    opts: &VerifyOptions,
    report: &mut VerifyReport,
) -> Result<(), PresetError> {
    let it = &preset.layers[0];
    let d = &preset.duality;
    check_compatibility(it, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sig = preset.polygraph.signature();
    let mut mismatches = 0;
    for k in 0..opts.samples {
        let c = random_circuit(sig, 1 + k % 3, 1 + k % 10, 4, &mut rng);
        let dual = d.dualize(&c)?;
        if it.interpret(&dual)? != it.interpret(&c)?.dual() || d.dualize(&dual)? != c.canonical() {
            mismatches += 1;
        }
    }
    report.push(
        "duality",
        mismatches == 0,
        format!("{} random circuits, {mismatches} mismatches", opts.samples),
    );
    let dedup = dedup_rules_for_checking(&preset.polygraph, it, d)?;
    let checks = check_representatives(&preset.polygraph, it, &dedup)?;
    let strict = checks
        .iter()
        .filter(|c| c.verdict == RuleVerdict::Strict)
        .count();
    report.push(
        "reduced obligations",
        strict == checks.len(),
        format!(
            "{} rules reduce to {} obligations ({} self-dual), {strict} strict",
            dedup.rules,
            dedup.obligations(),
            dedup.classes.iter().filter(|c| c.self_dual).count()
        ),
    );
    Ok(())
}

fn confluence(preset: &Preset, opts: &VerifyOptions, report: &mut VerifyReport, required: bool) {
    let pairs = critical_pairs(&preset.polygraph, opts.max_nodes);
    let conf = check_local_confluence(&preset.polygraph, &pairs, opts.fuel);
    let open: Vec<String> = conf
        .pairs
        .iter()
        .filter(|p| p.status != crate::rewrite::PairStatus::Joinable)
        .map(|p| format!("{}/{}", p.left_rule, p.right_rule))
        .collect();
    let detail = format!(
        "{} critical pairs up to {} nodes, {} not joined{}",
        pairs.len(),
        opts.max_nodes,
        open.len(),
        if open.is_empty() {
            String::new()
        } else {
            format!(": {}", open.join(", "))
        }
    );
    report.push(
        if required {
            "local confluence"
        } else {
            "critical pairs (informational)"
        },
        !required || conf.all_joinable,
        detail,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lz2_battery() {
        let report = verify_preset("LZ2").unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.check, c.detail);
        }
    }

    #[test]
    fn r1c_fails_termination_as_expected() {
        let report = verify_preset("R1c").unwrap();
        let t = report
            .checks
            .iter()
            .find(|c| c.check == "termination")
            .unwrap();
        assert!(t.passed);
        assert!(t.detail.contains("Phi(C)"), "{}", t.detail);
    }
}

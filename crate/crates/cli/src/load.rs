//! Resolving `--theory`, `--trs` and `--interp` arguments.

use std::path::Path;

use poly_core::heat::{builtin_interpretation, parse_interpretation, Interpretation};
use poly_core::rewrite::parse_polygraph;
use poly_core::term::parse_trs;
use poly_core::translate::{translate_trs, Translation};
use poly_core::{load_preset, Polygraph, Preset, PresetName};

use crate::TheoryArgs;

pub type Error = Box<dyn std::error::Error>;

/// A polygraph together with wherever it came from.
pub struct Theory {
    pub polygraph: Polygraph,
    pub translation: Option<Translation>,
    pub preset: Option<Preset>,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Falls back to a preset when `arg` is not an existing file: `rds.poly`
/// and `RDS` both name the resource preset.
fn preset_named(arg: &str) -> Result<Preset, Error> {
    let stem = Path::new(arg)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(arg);
    let name: PresetName = stem
        .parse()
        .map_err(|_| format!("`{arg}` is neither a file nor a preset name"))?;
    Ok(load_preset(&name.to_string())?)
}

pub fn theory(args: &TheoryArgs) -> Result<Theory, Error> {
    if let Some(trs) = &args.trs {
        return trs_theory(trs);
    }
    let Some(arg) = &args.theory else {
        // The resource rules over the monoid signature.
        return from_preset(load_preset("RDS")?);
    };
    let path = Path::new(arg);
    if path.is_file() {
        if path.extension().is_some_and(|e| e == "trs") {
            return trs_theory(arg);
        }
        return Ok(Theory {
            polygraph: parse_polygraph(&read(path)?)?,
            translation: None,
            preset: None,
        });
    }
    from_preset(preset_named(arg)?)
}

fn trs_theory(arg: &str) -> Result<Theory, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let tr = translate_trs(&parse_trs(&read(path)?)?)?;
        return Ok(Theory {
            polygraph: tr.polygraph.clone(),
            translation: Some(tr),
            preset: None,
        });
    }
    let preset = preset_named(arg)?;
    if preset.translation.is_none() {
        return Err(format!("preset {} is not a term rewriting system", preset.name).into());
    }
    from_preset(preset)
}

fn from_preset(preset: Preset) -> Result<Theory, Error> {
    Ok(Theory {
        polygraph: preset.polygraph.clone(),
        translation: preset.translation.clone(),
        preset: Some(preset),
    })
}

/// `--interp` values in order; without any, the preset's own layers.
pub fn layers(theory: &Theory, args: &[String]) -> Result<Vec<Interpretation>, Error> {
    if args.is_empty() {
        return match &theory.preset {
            Some(p) => Ok(p.layers.clone()),
            None => Err("at least one --interp is required for a theory file".into()),
        };
    }
    let sig = theory.polygraph.signature();
    args.iter()
        .map(|a| {
            let path = Path::new(a);
            if path.is_file() {
                let it = parse_interpretation(&read(path)?)?;
                it.covers(sig)?;
                Ok(it)
            } else {
                Ok(builtin_interpretation(a, sig)?)
            }
        })
        .collect()
}

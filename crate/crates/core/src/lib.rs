//! Rewriting on circuits with explicit resource management.
//!
//! - [`circuit`]: circuits over a signature, canonical forms, matching.
//! - [`rewrite`]: polygraphs, normalization, critical pairs.
//! - [`term`]: terms, term families, term rewriting, semantic oracles.
//! - [`translate`]: resource operators and the translation of term rules.
//! - [`heat`]: interpretations as current/heat triples and termination
//!   certificates.
//! - [`presets`]: the bundled theories and their verification battery.

pub mod circuit;
pub mod heat;
pub mod presets;
pub mod rewrite;
pub mod term;
pub mod translate;

pub use circuit::{
    apply_context, find_matches, parse_circuit, Circuit, CircuitError, Context, Dst, Node,
    Operator, Signature, Src,
};
pub use presets::{load_preset, verify_preset, Preset, PresetName};
pub use rewrite::{
    normalize, rewrite_step, Polygraph, ReductionTrace, RewriteError, Rule, Strategy, TraceStatus,
};

//! Random circuits for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, Operator, Signature};

/// Slices `id(a) * op * id(b)` whose composite is a random circuit with
/// `inputs` inputs and exactly `nodes` operator instances.
///
/// The wire count is kept within `1..=max_width` where the signature allows.
pub fn random_slices<R: Rng + ?Sized>(
    sig: &Signature,
    inputs: usize,
    nodes: usize,
    max_width: usize,
    rng: &mut R,
) -> Vec<Circuit> {
    let mut width = inputs;
    let mut slices = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        let fits: Vec<&Operator> = sig
            .operators()
            .iter()
            .filter(|op| op.inputs() <= width)
            .filter(|op| width - op.inputs() + op.outputs() <= max_width.max(width))
            .collect();
        let candidates: Vec<&Operator> = {
            // Avoid collapsing to zero wires unless nothing else is possible.
            let keep: Vec<&Operator> = fits
                .iter()
                .copied()
                .filter(|op| width - op.inputs() + op.outputs() > 0)
                .collect();
            if keep.is_empty() {
                fits
            } else {
                keep
            }
        };
        let Some(op) = candidates.choose(rng) else {
            break;
        };
        let before = rng.gen_range(0..=width - op.inputs());
        let after = width - op.inputs() - before;
        slices.push(
            Circuit::identity(before)
                .tensor(&Circuit::generator((*op).clone()))
                .tensor(&Circuit::identity(after)),
        );
        width = before + op.outputs() + after;
    }
    slices
}

/// Composite of [`random_slices`], folded from the left.
pub fn random_circuit<R: Rng + ?Sized>(
    sig: &Signature,
    inputs: usize,
    nodes: usize,
    max_width: usize,
    rng: &mut R,
) -> Circuit {
    random_slices(sig, inputs, nodes, max_width, rng)
        .iter()
        .fold(Circuit::identity(inputs), |acc, s| {
            acc.compose(s).expect("slices chain by construction")
        })
}

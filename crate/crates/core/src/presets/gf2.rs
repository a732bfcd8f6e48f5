//! Linear semantics over Z/2Z: every wire carries a linear form in the
//! circuit inputs, stored as a bit mask.

use std::fmt;

use crate::circuit::{Circuit, Src};
use crate::translate::{DELTA, EPSILON, TAU};

use super::PresetError;

/// A linear map `GF(2)^inputs -> GF(2)^rows.len()`; row `j` has bit `i` set
/// when output `j` depends on input `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf2Map {
    pub inputs: usize,
    pub rows: Vec<u64>,
}

impl fmt::Display for Gf2Map {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                (0..self.inputs)
                    .map(|i| if r >> i & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        write!(f, "[{}]", rows.join(" "))
    }
}

/// Evaluates `c` with `mu = +`, `eta = 0`, `delta` copying, `epsilon`
/// erasing, `tau` swapping and `kappa(x, y) = (x + y, x)`.
pub fn gf2_semantics(c: &Circuit) -> Result<Gf2Map, PresetError> {
    if c.inputs() > 64 {
        return Err(PresetError::Semantics(format!(
            "{} inputs exceed 64",
            c.inputs()
        )));
    }
    let mut values: Vec<Vec<u64>> = Vec::with_capacity(c.node_count());
    let get = |values: &Vec<Vec<u64>>, s: &Src| match *s {
        Src::Input(i) => 1u64 << i,
        Src::Node { node, port } => values[node][port],
    };
    for node in c.nodes() {
        let x: Vec<u64> = node.srcs.iter().map(|s| get(&values, s)).collect();
        let out = match (node.op.name(), x.as_slice()) {
            ("mu", [a, b]) => vec![a ^ b],
            ("eta", []) => vec![0],
            (DELTA, [a]) => vec![*a, *a],
            (EPSILON, [_]) => vec![],
            (TAU, [a, b]) => vec![*b, *a],
            ("kappa", [a, b]) => vec![a ^ b, *a],
            (name, _) => {
                return Err(PresetError::Semantics(format!(
                    "operator `{name}` has no linear reading"
                )))
            }
        };
        values.push(out);
    }
    Ok(Gf2Map {
        inputs: c.inputs(),
        rows: c.output_srcs().iter().map(|s| get(&values, s)).collect(),
    })
}

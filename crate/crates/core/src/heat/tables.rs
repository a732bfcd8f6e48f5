//! The built-in interpretations: `f1` and `g` for any algebraic signature
//! enriched with `tau`, `delta`, `epsilon`, and `lz2` for the six operators
//! of the Z/2Z-vector-space presentation.

use crate::circuit::Signature;
use crate::translate::{DELTA, EPSILON, TAU};

use super::compare::{Carrier, CarrierConfig, HeatKind};
use super::multiset::MultisetExpr;
use super::poly::Poly;
use super::{Heat, HeatError, InterpTriple, Interpretation};

fn d(i: usize) -> Poly {
    Poly::down(i)
}

fn u(j: usize) -> Poly {
    Poly::up(j)
}

fn c(k: i128) -> Poly {
    Poly::constant(k)
}

fn ul(p: Poly) -> MultisetExpr {
    MultisetExpr::ul(p)
}

fn ms(h: MultisetExpr) -> Heat {
    Heat::Multiset(h)
}

fn add_resource(
    it: &mut Interpretation,
    tau: InterpTriple,
    delta: InterpTriple,
    epsilon: InterpTriple,
) -> Result<(), HeatError> {
    it.insert(TAU, tau)?;
    it.insert(DELTA, delta)?;
    it.insert(EPSILON, epsilon)
}

fn algebraic_ops(sig: &Signature) -> Result<Vec<(String, usize)>, HeatError> {
    let mut out = Vec::new();
    for op in sig.operators() {
        match op.name() {
            TAU | DELTA | EPSILON => continue,
            name if op.is_algebraic() => out.push((name.to_string(), op.inputs())),
            name => {
                return Err(HeatError::BadTriple {
                    op: name.to_string(),
                    message: "no built-in triple for a non-algebraic operator".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Interpretation over `(N*, N*, [N*])` under which every resource rule
/// except the Yang–Baxter rule strictly decreases.
pub fn f1(sig: &Signature) -> Result<Interpretation, HeatError> {
    let mut it = Interpretation::new(
        "f1",
        CarrierConfig {
            down: Carrier::NStar,
            up: Carrier::NStar,
            heat: HeatKind::Multiset,
        },
    );
    add_resource(
        &mut it,
        InterpTriple::new(
            vec![d(1), d(0)],
            vec![u(1), u(0)],
            ms(ul(u(1))
                .scale(&(d(0) * d(1)))
                .add(&ul(d(0) + d(1)).scale(&u(1)))),
        ),
        InterpTriple::new(
            vec![d(0), d(0)],
            vec![u(0) + u(1) + c(1)],
            ms(ul(d(0)).add(&ul(u(1)))),
        ),
        InterpTriple::new(vec![], vec![c(1)], ms(MultisetExpr::zero())),
    )?;
    for (name, n) in algebraic_ops(sig)? {
        it.insert(
            &name,
            InterpTriple::new(
                vec![Poly::sum_down(0..n) + c(1)],
                vec![u(0); n],
                ms(ul(u(0))),
            ),
        )?;
    }
    Ok(it)
}

/// Interpretation over `(N, N, N)` under which the Yang–Baxter rule
/// strictly decreases and the other resource rules do not increase.
pub fn g(sig: &Signature) -> Result<Interpretation, HeatError> {
    let mut it = Interpretation::new(
        "g",
        CarrierConfig {
            down: Carrier::N,
            up: Carrier::N,
            heat: HeatKind::Nat,
        },
    );
    add_resource(
        &mut it,
        InterpTriple::new(
            vec![d(1), d(0) + c(1)],
            vec![u(1), u(0)],
            Heat::Nat(d(0) + d(1)),
        ),
        InterpTriple::new(vec![d(0), d(0)], vec![u(0) + u(1)], Heat::Nat(Poly::zero())),
        InterpTriple::new(vec![], vec![c(1)], Heat::Nat(Poly::zero())),
    )?;
    for (name, n) in algebraic_ops(sig)? {
        it.insert(
            &name,
            InterpTriple::new(
                vec![Poly::sum_down(0..n)],
                vec![u(0); n],
                Heat::Nat(Poly::zero()),
            ),
        )?;
    }
    Ok(it)
}

/// Interpretation of `mu, eta, delta, epsilon, tau, kappa` over
/// `(N*, N*, [N*])`; `tau` and `kappa` get the same triple and the table
/// is closed under the top-down mirror.
pub fn lz2() -> Interpretation {
    let mut it = Interpretation::new(
        "lz2",
        CarrierConfig {
            down: Carrier::NStar,
            up: Carrier::NStar,
            heat: HeatKind::Multiset,
        },
    );
    let swapish = || {
        InterpTriple::new(
            vec![d(0) + d(1), d(0)],
            vec![u(0) + u(1), u(0)],
            ms(ul(d(0)).add(&ul(u(0)))),
        )
    };
    let entries = [
        (
            "mu",
            InterpTriple::new(
                vec![d(0) + d(1)],
                vec![u(0), u(0)],
                ms(ul(d(0)).add(&ul(u(0)))),
            ),
        ),
        ("eta", InterpTriple::new(vec![c(1)], vec![], ms(ul(u(0))))),
        (
            DELTA,
            InterpTriple::new(
                vec![d(0), d(0)],
                vec![u(0) + u(1)],
                ms(ul(d(0)).add(&ul(u(0)))),
            ),
        ),
        (EPSILON, InterpTriple::new(vec![], vec![c(1)], ms(ul(d(0))))),
        (TAU, swapish()),
        ("kappa", swapish()),
    ];
    for (name, t) in entries {
        it.insert(name, t).expect("built-in table is valid");
    }
    it
}

/// Resolves `f1`, `g` or `lz2` against a signature.
pub fn builtin_interpretation(name: &str, sig: &Signature) -> Result<Interpretation, HeatError> {
    let it = match name {
        "f1" => f1(sig)?,
        "g" => g(sig)?,
        "lz2" => lz2(),
        other => return Err(HeatError::UnknownInterpretation(other.to_string())),
    };
    it.covers(sig)?;
    Ok(it)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, Operator};
    use crate::heat::compare::{compare_sym, Cmp};
    use crate::heat::var_name;

    fn sig() -> Signature {
        Signature::from_operators([
            Operator::new("mu", 2, 1),
            Operator::new("eta", 0, 1),
            Operator::new(TAU, 2, 2),
            Operator::new(DELTA, 1, 2),
            Operator::new(EPSILON, 1, 0),
        ])
        .unwrap()
    }

    #[test]
    fn coassociativity_composites() {
        let s = sig();
        let f = f1(&s).unwrap();
        let lhs = f
            .interpret(&parse_circuit("delta ; (id(1) * delta)", &s).unwrap())
            .unwrap();
        let rhs = f
            .interpret(&parse_circuit("delta ; (delta * id(1))", &s).unwrap())
            .unwrap();
        // Contravariant maps in the three output variables.
        let expected = Poly::up(0) + Poly::up(1) + Poly::up(2) + c(2);
        assert_eq!(lhs.con, vec![expected.clone()]);
        assert_eq!(rhs.con, vec![expected]);
        assert_eq!(lhs.cov, vec![d(0), d(0), d(0)]);
        assert_eq!(
            rhs.heat.display_with(&|v| var_name(v, 1)),
            "2*ul(i) + ul(k) + ul(l)"
        );
    }

    #[test]
    fn yang_baxter_under_g() {
        let s = sig();
        let g = g(&s).unwrap();
        let l = g
            .interpret(&parse_circuit("(id(1) * tau) ; (tau * id(1)) ; (id(1) * tau)", &s).unwrap())
            .unwrap();
        let r = g
            .interpret(&parse_circuit("(tau * id(1)) ; (id(1) * tau) ; (tau * id(1))", &s).unwrap())
            .unwrap();
        let sum = (d(0) + d(1) + d(2)).scale(2);
        assert_eq!(l.heat, Heat::Nat(sum.clone() + c(2)));
        assert_eq!(r.heat, Heat::Nat(sum + c(1)));
        assert_eq!(l.cov, vec![d(2), d(1) + c(1), d(0) + c(2)]);
        assert_eq!(l.cov, r.cov);
        assert_eq!(l.con, r.con);
    }

    #[test]
    fn lz2_kappa_square() {
        let it = lz2();
        let s = Signature::from_operators([Operator::new("kappa", 2, 2)]).unwrap();
        let kk = it
            .interpret(&parse_circuit("kappa ; kappa", &s).unwrap())
            .unwrap();
        assert_eq!(kk.cov, vec![d(0).scale(2) + d(1), d(0) + d(1)]);
        assert_eq!(it.get(TAU), it.get("kappa"));
        assert_eq!(it.get("mu").unwrap().dual(), *it.get(DELTA).unwrap());
        assert_eq!(it.get("eta").unwrap().dual(), *it.get(EPSILON).unwrap());
        let cfg = *it.config();
        assert_eq!(compare_sym(&kk.cov[0], &(d(0) + d(1)), &cfg), Cmp::Gt);
    }

    #[test]
    fn coverage() {
        assert!(builtin_interpretation("f1", &sig()).is_ok());
        assert!(builtin_interpretation("lz2", &sig()).is_ok());
        assert!(matches!(
            builtin_interpretation("h", &sig()),
            Err(HeatError::UnknownInterpretation(_))
        ));
    }
}

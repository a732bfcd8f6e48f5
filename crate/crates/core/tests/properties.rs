use poly_core::circuit::random::random_circuit;
use poly_core::heat::{
    compare_multiset, compare_sym, f1, lz2, Cmp, Multiset, MultisetExpr, Poly, Var,
};
use poly_core::presets::Duality;
use poly_core::term::project_pi;
use poly_core::translate::{build_sigma_c, resource_signature};
use poly_core::{load_preset, Circuit, Signature};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sigma_c() -> Signature {
    build_sigma_c(load_preset("R0").unwrap().trs().unwrap().signature()).unwrap()
}

fn lz2_sig() -> Signature {
    load_preset("LZ2").unwrap().polygraph.signature().clone()
}

fn circuit(sig: &Signature, seed: u64, inputs: usize, nodes: usize) -> Circuit {
    random_circuit(sig, inputs, nodes, 4, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A random circuit with the given number of inputs, returned together
/// with a second one composable after it.
fn chain(sig: &Signature, seed: u64, inputs: usize) -> (Circuit, Circuit) {
    let f = circuit(sig, seed, inputs, 1 + seed as usize % 5);
    let g = circuit(
        sig,
        seed ^ 0x5555,
        f.outputs(),
        1 + (seed as usize >> 3) % 5,
    );
    (f, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exchange_law(seed in any::<u64>(), a in 1usize..3, b in 1usize..3) {
        let sig = sigma_c();
        let f = circuit(&sig, seed, a, 3);
        let g = circuit(&sig, seed.wrapping_add(1), b, 3);
        let left = f.tensor(&Circuit::identity(b)).compose(&Circuit::identity(f.outputs()).tensor(&g)).unwrap();
        let right = Circuit::identity(a).tensor(&g).compose(&f.tensor(&Circuit::identity(g.outputs()))).unwrap();
        prop_assert_eq!(left.canonical(), right.canonical());
        prop_assert_eq!(left.canonical(), f.tensor(&g).canonical());
    }

    #[test]
    fn canonical_is_idempotent(seed in any::<u64>(), n in 0usize..12) {
        let c = circuit(&sigma_c(), seed, 2, n);
        let once = c.canonical();
        prop_assert_eq!(once.canonical(), once.clone());
        prop_assert!(c.equivalent(&once));
    }

    #[test]
    fn composition_reassociates(seed in any::<u64>()) {
        let sig = sigma_c();
        let (f, g) = chain(&sig, seed, 2);
        let h = circuit(&sig, seed.wrapping_mul(3), g.outputs(), 3);
        let l = f.compose(&g).unwrap().compose(&h).unwrap();
        let r = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(l.canonical(), r.canonical());
    }

    #[test]
    fn interpretation_is_functorial(seed in any::<u64>()) {
        let sig = sigma_c();
        let it = f1(&sig).unwrap();
        let (f, g) = chain(&sig, seed, 2);
        let (fi, gi) = (it.interpret(&f).unwrap(), it.interpret(&g).unwrap());
        prop_assert_eq!(it.interpret(&f.compose(&g).unwrap()).unwrap(), fi.o_compose(&gi).unwrap());
        prop_assert_eq!(it.interpret(&f.tensor(&g)).unwrap(), fi.o_tensor(&gi).unwrap());
    }

    #[test]
    fn projection_is_functorial(seed in any::<u64>()) {
        let sig = sigma_c();
        let (f, g) = chain(&sig, seed, 3);
        let (pf, pg) = (project_pi(&f).unwrap(), project_pi(&g).unwrap());
        prop_assert_eq!(project_pi(&f.compose(&g).unwrap()).unwrap(), pf.compose(&pg).unwrap());
        prop_assert_eq!(project_pi(&f.tensor(&g)).unwrap(), pf.tensor(&pg));
    }

    #[test]
    fn resource_circuits_project_to_variables(seed in any::<u64>(), n in 0usize..10) {
        let c = circuit(&resource_signature(), seed, 3, n);
        let fam = project_pi(&c).unwrap();
        prop_assert!(fam.terms().iter().all(|t| t.operator_count() == 0));
    }

    #[test]
    fn duality_is_involutive_and_compatible(seed in any::<u64>(), inputs in 0usize..3, n in 0usize..10) {
        let (d, it) = (Duality::lz2(), lz2());
        let c = circuit(&lz2_sig(), seed, inputs, n);
        let dual = d.dualize(&c).unwrap();
        prop_assert_eq!(dual.inputs(), c.outputs());
        prop_assert_eq!(d.dualize(&dual).unwrap(), c.canonical());
        prop_assert_eq!(it.interpret(&dual).unwrap(), it.interpret(&c).unwrap().dual());
    }

    #[test]
    fn multiset_addition_is_monotone(
        a in prop::collection::vec((1i128..8, 1i128..4), 0..5),
        b in prop::collection::vec((1i128..8, 1i128..4), 0..5),
        c in prop::collection::vec((1i128..8, 1i128..4), 0..5),
    ) {
        let (a, b, c) = (Multiset::from_pairs(a), Multiset::from_pairs(b), Multiset::from_pairs(c));
        prop_assert_eq!(a.cmp_multiset(&b), a.add(&c).cmp_multiset(&b.add(&c)));
    }

    #[test]
    fn symbolic_comparison_is_sound(
        ca in prop::collection::vec(-3i128..6, 4),
        cb in prop::collection::vec(-3i128..6, 4),
        at in prop::collection::vec(1i128..20, 2),
    ) {
        let (x, y) = (Poly::down(0), Poly::up(0));
        let poly = |k: &[i128]| Poly::constant(k[0]) + x.scale(k[1]) + y.scale(k[2]) + (&x * &y).scale(k[3]);
        let (a, b) = (poly(&ca), poly(&cb));
        let cfg = f1(&sigma_c()).unwrap().config().to_owned();
        let point = |v: Var| match v { Var::Down(_) => at[0], Var::Up(_) => at[1] };
        let (va, vb) = (a.eval(&point), b.eval(&point));
        match compare_sym(&a, &b, &cfg) {
            Cmp::Gt => prop_assert!(va > vb),
            Cmp::Ge | Cmp::Eq => prop_assert!(va >= vb),
            Cmp::Unknown => {}
        }
        let (ma, mb) = (MultisetExpr::ul(a.clone()), MultisetExpr::ul(b.clone()));
        if compare_multiset(&ma, &mb, &cfg) == Cmp::Gt && vb >= 1 {
            prop_assert!(ma.eval(&point).cmp_multiset(&mb.eval(&point)).is_gt());
        }
    }
}

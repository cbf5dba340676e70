//! Algebraic laws checked on random inputs.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use lenscalc::genus::{level_lower_bound, meyer_exact, schwarz_lower};
use lenscalc::lensring::{make_ring, pullback, Generator, LensRing};
use lenscalc::membership::{member_exact, member_mod};
use lenscalc::poly::binomial;
use lenscalc::{Poly, SparsePoly, Verdict};

fn poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u64..12, -20i64..=20), 0..6)
        .prop_map(|terms| SparsePoly::from_terms(terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

fn ring_strategy() -> impl Strategy<Value = Arc<LensRing>> {
    (prop::sample::select(vec![2u64, 3, 5]), 1u32..=3, 1usize..=8).prop_map(|(p, k, n)| make_ring(p, k, n).unwrap())
}

fn element(ring: &Arc<LensRing>, raw: &[i64]) -> lenscalc::RingElement {
    ring.element(raw.iter().take(ring.n()).map(|&c| BigInt::from(c)).collect())
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..=50, 8)
}

proptest! {
    #[test]
    fn poly_mul_commutes_and_associates(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn shift_round_trip(a in poly_strategy()) {
        prop_assert_eq!(a.shift_to_y().shift_from_y(), a.clone());
        prop_assert_eq!(a.shift_from_y().shift_to_y(), a);
    }

    #[test]
    fn substitute_power_composes(a in poly_strategy(), s in 1u64..4, t in 1u64..4) {
        let lhs = a.substitute_power(s).unwrap().substitute_power(t).unwrap();
        prop_assert_eq!(lhs, a.substitute_power(s * t).unwrap());
    }

    #[test]
    fn substitute_power_is_multiplicative(a in poly_strategy(), b in poly_strategy(), t in 1u64..4) {
        let lhs = a.mul(&b).substitute_power(t).unwrap();
        prop_assert_eq!(lhs, a.substitute_power(t).unwrap().mul(&b.substitute_power(t).unwrap()));
    }

    #[test]
    fn frobenius_congruence(a in poly_strategy(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        // a(x)^p = a(x^p) mod p
        let pb = BigInt::from(p);
        let reduce = |q: &Poly| SparsePoly::from_terms(q.terms().map(|(e, c)| (e, c.mod_floor(&pb))));
        prop_assert_eq!(reduce(&a.pow(p)), reduce(&a.substitute_power(p).unwrap()));
    }

    #[test]
    fn ring_axioms(ring in ring_strategy(), a in coeffs(), b in coeffs(), c in coeffs()) {
        let (a, b, c) = (element(&ring, &a), element(&ring, &b), element(&ring, &c));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&ring.zero()).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&ring.one()).unwrap(), a.clone());
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn normal_form_is_canonical(ring in ring_strategy(), a in coeffs(), c in prop::collection::vec(-5i64..=5, 8)) {
        let a = element(&ring, &a);
        let nf = a.normal_form();
        prop_assert_eq!(nf.normal_form().coeffs().to_vec(), nf.coeffs().to_vec());
        // Adding an ideal element leaves the normal form unchanged.
        let n = ring.n();
        let mut shifted = a.coeffs().to_vec();
        for (i, g) in ring.lattice().gens.rows().iter().enumerate() {
            for (j, x) in g.iter().enumerate() {
                shifted[j + 1] += BigInt::from(c[i % c.len()]) * x;
            }
        }
        prop_assert_eq!(ring.normal_form_coeffs(&shifted), nf.coeffs().to_vec());
        prop_assert_eq!(shifted.len(), n);
    }

    #[test]
    fn modular_refutation_is_sound(ring in ring_strategy(), a in coeffs(), t in 1u32..=4) {
        let mut raw = a;
        raw[0] = 0;
        let a = element(&ring, &raw);
        if member_mod(&ring, &a, t).verdict == Verdict::Refuted {
            prop_assert!(!a.is_zero());
            prop_assert_eq!(member_exact(&ring, &a).verdict, Verdict::Refuted);
        }
        // An actual ideal element is never refuted modulo p^t.
        let zero_rep = a.sub(&a.normal_form()).unwrap();
        prop_assert_ne!(member_mod(&ring, &zero_rep, t).verdict, Verdict::Refuted);
    }

    #[test]
    fn pullback_is_a_homomorphism(p in prop::sample::select(vec![2u64, 3, 5]), k1 in 1u32..=2, dk in 0u32..=2,
                                  n1 in 1usize..=5, n2 in 1usize..=8, a in coeffs(), b in coeffs()) {
        let src = make_ring(p, k1, n1).unwrap();
        let dst = make_ring(p, k1 + dk, n2).unwrap();
        prop_assume!(LensRing::pullback_is_well_defined(&src, &dst).unwrap());
        let (a, b) = (element(&src, &a), element(&src, &b));
        let lhs = pullback(&src, &dst, &a.mul(&b).unwrap()).unwrap();
        let rhs = pullback(&src, &dst, &a).unwrap().mul(&pullback(&src, &dst, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = pullback(&src, &dst, &a.add(&b).unwrap()).unwrap();
        prop_assert_eq!(sum, pullback(&src, &dst, &a).unwrap().add(&pullback(&src, &dst, &b).unwrap()).unwrap());
    }

    #[test]
    fn level_bound_is_monotone(p in prop::sample::select(vec![2i64, 3, 5, 7]), k in 1u32..=4, m in 1i64..10_000) {
        let here = level_lower_bound(&BigInt::from(p), k, &BigInt::from(m));
        let next = level_lower_bound(&BigInt::from(p), k, &BigInt::from(m + 1));
        prop_assert!(next >= here);
        let deeper = level_lower_bound(&BigInt::from(p), k + 1, &BigInt::from(m));
        prop_assert!(deeper <= here);
        prop_assert_eq!(schwarz_lower(&BigInt::from(p), &BigInt::from(m)), level_lower_bound(&BigInt::from(p), 2, &BigInt::from(m)));
    }

    #[test]
    fn meyer_value_meets_level_bound(p in prop::sample::select(vec![3i64, 5, 7, 11]), q in 0i64..5_000) {
        let m = p * q + 2;
        let exact = meyer_exact(&p, &m).unwrap();
        prop_assert_eq!(exact, level_lower_bound(&p, 2, &m));
        prop_assert_eq!(BigInt::from(exact), meyer_exact(&BigInt::from(p), &BigInt::from(m)).unwrap());
    }

    #[test]
    fn generic_scalars_agree(p in prop::sample::select(vec![2i64, 3, 5, 7]), k in 1u32..=5, m in 1i64..1_000_000) {
        let small = level_lower_bound(&p, k, &m);
        let big = level_lower_bound(&BigInt::from(p), k, &BigInt::from(m));
        prop_assert_eq!(BigInt::from(small), big);
        prop_assert_eq!(BigInt::from(binomial::<i64>(40, (m % 41) as u64)), binomial::<BigInt>(40, (m % 41) as u64));
    }
}

#[test]
fn relations_hold_on_small_grid() {
    for p in [2u64, 3, 5] {
        for k in 1..=3u32 {
            for n in 1..=8usize {
                let ring = make_ring(p, k, n).unwrap();
                assert!(ring.generator(Generator::Sigma).pow(n as u64).is_zero());
                let order = num_traits::pow(p, k as usize);
                assert!(ring.generator(Generator::Eta).pow(order).sub(&ring.one()).unwrap().is_zero());
            }
        }
    }
}

use std::collections::BTreeMap;

use proptest::prelude::*;
use topmon::factorisation::{pi_bar, pi_finite, AtomId, ExponentMap};
use topmon::instances::{Fraction, FreeMonoid, Harmonic, Monomial, Multiset, Rationals, Sequence, SeriesRing, Sequences};
use topmon::net::{Level, NetParams, TopologicalMonoid};
use topmon::Monoid;

fn laws<M: TopologicalMonoid>(m: &M, a: &M::Elem, b: &M::Elem, c: &M::Elem) -> Result<(), TestCaseError> {
    let e = m.identity();
    prop_assert_eq!(m.combine(a, &e), a.clone());
    prop_assert_eq!(m.combine(a, b), m.combine(b, a));
    prop_assert_eq!(m.combine(&m.combine(a, b), c), m.combine(a, &m.combine(b, c)));
    prop_assert_eq!(m.divides(a, &m.combine(a, b)), Some(b.clone()));
    prop_assert!(m.contains(&m.combine(a, b)));
    prop_assert_eq!(m.parse_element(&a.to_string()).unwrap(), a.clone());
    if a != b {
        let k = m.separation_level(a, b, 64);
        prop_assert!(k.is_some(), "{} and {} not separated", a, b);
    }
    for k in 0..8 {
        if m.neighborhood_contains(a, Level(k + 1), b) {
            prop_assert!(m.neighborhood_contains(a, Level(k), b));
        }
    }
    Ok(())
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::btree_map(0u32..4, 0u64..4, 0..4).prop_map(Monomial::from_exponents)
}

fn fraction() -> impl Strategy<Value = Fraction> {
    (0u64..200, 1u64..200).prop_map(|(p, q)| Fraction::from_ratio(p, q))
}

fn multiset() -> impl Strategy<Value = Multiset> {
    prop::collection::btree_map(0u64..40, 1u64..3, 0..4).prop_map(Multiset::from_counts)
}

fn sequence(restricted: bool) -> impl Strategy<Value = Sequence> {
    let finite = prop::collection::btree_map(0u64..20, 1u64..3, 0..4).prop_map(Sequence::finite);
    let pattern = if restricted { 1u64..3 } else { 0u64..3 };
    let cofinite = (prop::collection::vec(pattern, 1..3), prop::collection::btree_map(0u64..20, 0i64..3, 0..3))
        .prop_map(|(p, d)| Sequence::new(p, d).unwrap());
    prop_oneof![finite, cofinite].prop_filter("nonzero pattern", move |s| {
        !restricted || s.is_finitely_supported() || s.pattern().iter().all(|v| *v >= 1)
    })
}

fn exponent_map() -> impl Strategy<Value = ExponentMap> {
    let finite = prop::collection::btree_map(0u64..30, 1u64..4, 0..5)
        .prop_map(|m| ExponentMap::finite(m.into_iter().map(|(i, v)| (AtomId::Family(i), v))));
    let cofinite = (1u64..3, prop::collection::btree_map(0u64..30, -1i64..3, 0..4)).prop_map(|(b, d)| {
        ExponentMap::with_base(b, d.into_iter().map(|(i, v)| (AtomId::Family(i), v))).unwrap()
    });
    prop_oneof![finite, cofinite]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_laws(a in monomial(), b in monomial(), c in monomial()) {
        laws(&FreeMonoid::new(4).unwrap(), &a, &b, &c)?;
    }

    #[test]
    fn rational_laws(a in fraction(), b in fraction(), c in fraction()) {
        laws(&Rationals, &a, &b, &c)?;
    }

    #[test]
    fn harmonic_laws(a in multiset(), b in multiset(), c in multiset()) {
        laws(&Harmonic, &a, &b, &c)?;
    }

    #[test]
    fn pointwise_laws(a in sequence(false), b in sequence(false), c in sequence(false)) {
        laws(&Sequences::pointwise(), &a, &b, &c)?;
    }

    #[test]
    fn restricted_laws(a in sequence(true), b in sequence(true), c in sequence(true)) {
        laws(&Sequences::restricted(), &a, &b, &c)?;
    }

    #[test]
    fn series_laws(i in 0usize..40, j in 0usize..40, k in 0usize..40) {
        // Degree-two window elements multiply exactly at precision 8.
        let ring = SeriesRing::new(2, 8).unwrap();
        let w = ring.window(NetParams::default().bound(2));
        laws(&ring, &w[i % w.len()], &w[j % w.len()], &w[k % w.len()])?;
    }

    #[test]
    fn exponent_maps_round_trip(m in exponent_map()) {
        prop_assert_eq!(ExponentMap::parse(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn exponent_order_matches_subtraction(a in exponent_map(), b in exponent_map()) {
        let sum = a.add(&b);
        prop_assert!(a.le(&sum));
        prop_assert_eq!(sum.checked_sub(&a), Some(b.clone()));
        prop_assert_eq!(a.le(&b), b.checked_sub(&a).is_some());
    }

    #[test]
    fn pi_bar_is_a_homomorphism(a in exponent_map(), b in exponent_map()) {
        let m = Sequences::pointwise();
        let p = NetParams::default().with_depth(16);
        let (ra, va) = pi_bar(&m, &a, &p);
        let (rb, vb) = pi_bar(&m, &b, &p);
        let (rs, vs) = pi_bar(&m, &a.add(&b), &p);
        prop_assert!(ra.is_in_z() && rb.is_in_z() && rs.is_in_z());
        prop_assert_eq!(vs.unwrap(), m.combine(&va.unwrap(), &vb.unwrap()));
    }

    #[test]
    fn pi_finite_is_additive(a in prop::collection::btree_map(0u64..10, 1u64..3, 0..4),
                             b in prop::collection::btree_map(0u64..10, 1u64..3, 0..4)) {
        let m = Sequences::restricted();
        let to_map = |x: &BTreeMap<u64, u64>| ExponentMap::finite(x.iter().map(|(i, v)| (AtomId::Family(*i), *v)));
        let (ma, mb) = (to_map(&a), to_map(&b));
        let lhs = pi_finite(&m, &ma.add(&mb)).unwrap();
        prop_assert_eq!(lhs, m.combine(&pi_finite(&m, &ma).unwrap(), &pi_finite(&m, &mb).unwrap()));
    }
}

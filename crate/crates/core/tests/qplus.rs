use num::{BigInt, BigRational, One};
use topmon::instances::{geometric, Fraction, Rationals};
use topmon::net::{
    check_dissociation, check_finite_decimation, detect_divergence, verify_convergence,
    ConvergenceStatus, DivergenceWitness, FactorStream, Level, NetParams, Outcome, SubsetRule, Term,
};
use topmon::{is_irreducible, Monoid, SearchBound, Verdict};

fn fr(p: u64, q: u64) -> Fraction {
    Fraction::from_ratio(p, q)
}

fn half() -> FactorStream<Fraction> {
    geometric(fr(1, 2))
}

#[test]
fn geometric_series_converges_to_one_at_every_level() {
    let p = NetParams::default();
    for k in 0..=20 {
        let r = verify_convergence(&Rationals, &half(), &fr(1, 1), Level(k), 24, &p);
        assert!(r.is_converged(), "level {k}: {r}");
    }
}

#[test]
fn geometric_partial_sums_are_exact() {
    let terms = half().prefix(24);
    let mut acc = BigRational::from_integer(BigInt::from(0));
    for (n, t) in terms.iter().enumerate() {
        acc += t.factor.value();
        let gap = BigRational::one() - &acc;
        assert_eq!(gap, BigRational::new(BigInt::one(), BigInt::one() << (n + 1)));
    }
}

#[test]
fn wrong_candidates_are_not_certified() {
    let p = NetParams::default();
    for c in [fr(3, 4), fr(2, 1), fr(999, 1000)] {
        let r = verify_convergence(&Rationals, &half(), &c, Level(12), 24, &p);
        assert!(!r.is_converged(), "{c}: {r}");
    }
    let r = verify_convergence(&Rationals, &half(), &fr(2, 1), Level(4), 24, &p);
    assert!(matches!(r.status, ConvergenceStatus::CandidateExcluded(_)) || !r.is_converged());
}

#[test]
fn sparse_squares_have_no_small_denominator_limit() {
    let p = NetParams { qmax: 20_000, ..NetParams::default() }.with_depth(12);
    let s = half().select(SubsetRule::Squares);
    match detect_divergence(&Rationals, &s, &p) {
        Some(DivergenceWitness::DenominatorExclusion { tightest_level, max_level, .. }) => {
            assert!(tightest_level <= max_level)
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn even_indices_converge_to_one_third() {
    let p = NetParams::default();
    let evens = half().select(SubsetRule::Periodic { modulus: 2, residues: [0].into_iter().collect() });
    let r = verify_convergence(&Rationals, &evens, &fr(1, 3), Level(10), 24, &p);
    assert!(r.is_converged(), "{r}");
}

#[test]
fn finite_decimation_removes_the_missing_mass() {
    let p = NetParams::default();
    let removed = [1, 3].into_iter().collect();
    let c = check_finite_decimation(&Rationals, &half(), &removed, &[fr(3, 8)], &p);
    assert_eq!(c.outcome, Outcome::Pass);
    assert_eq!(c.limit, Some(fr(3, 8)));
}

#[test]
fn nested_geometric_sums_dissociate() {
    let p = NetParams::default().with_depth(200);
    let expand = |t: &Term<Fraction>| {
        let x = t.factor.clone();
        geometric(fr(1, 2)).map(format!("halves({x})"), move |h| {
            Fraction::new(h.value() * x.value()).unwrap()
        })
    };
    let c = check_dissociation(&Rationals, &half(), expand, &fr(1, 1), &p);
    assert_eq!(c.outcome, Outcome::Pass, "{:?}", c.convergence);
}

#[test]
fn finite_tableaux_dissociate_exactly() {
    let p = NetParams::default();
    let outer = FactorStream::finite("outer", vec![fr(1, 2), fr(1, 3), fr(1, 6)]);
    let expand = |t: &Term<Fraction>| {
        let x = t.factor.value().clone();
        let third = Fraction::new(&x / BigInt::from(3)).unwrap();
        let rest = Fraction::new(x - third.value()).unwrap();
        FactorStream::finite("split", vec![third, rest])
    };
    let c = check_dissociation(&Rationals, &outer, expand, &fr(1, 1), &p);
    assert_eq!(c.outcome, Outcome::Pass);
    assert_eq!(c.limit, Some(fr(1, 1)));
}

#[test]
fn no_positive_rational_is_an_atom() {
    let b = SearchBound::new(8, 2);
    for x in Rationals.window(b) {
        assert_eq!(is_irreducible(&Rationals, &x, b).unwrap().status, Verdict::No, "{x}");
    }
}

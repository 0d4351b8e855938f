use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topmon::instances::{harmonic_phi, moment, Harmonic, Multiset};
use topmon::net::{
    finite_span_contains, verify_convergence, ConvergenceStatus, FactorStream, Level, NetParams,
    TopologicalMonoid,
};
use topmon::Verdict;

fn e(i: u64) -> Multiset {
    Multiset::basis(i)
}

#[test]
fn powers_of_two_enter_every_ball_around_e0() {
    for k in 0..=63u32 {
        let n = 1u64 << k;
        assert!(Harmonic.neighborhood_contains(&e(0), Level(k), &e(n)), "k = {k}");
    }
    // The first basis vector that qualifies is exactly 2^k.
    for k in 1..=20u32 {
        let n = 1u64 << k;
        assert!(!Harmonic.neighborhood_contains(&e(0), Level(k), &e(n - 1)), "k = {k}");
    }
}

#[test]
fn moments_match_a_direct_sum() {
    let f = Multiset::from_counts([(0, 2), (2, 1), (3, 2)]);
    assert_eq!(moment(&f, 0), BigRational::from_integer(BigInt::from(5)));
    let expected = BigRational::new(1.into(), 2.into()) + BigRational::new(2.into(), 3.into());
    assert_eq!(harmonic_phi(&f), expected);
}

#[test]
fn no_stream_over_positive_indices_reaches_e0() {
    let p = NetParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..50 {
        let len = rng.gen_range(1..6);
        let factors: Vec<Multiset> = (0..len).map(|_| e(rng.gen_range(1..1000))).collect();
        let s = FactorStream::finite(format!("t{trial}"), factors);
        for k in [0, 5, 20] {
            let r = verify_convergence(&Harmonic, &s, &e(0), Level(k), 32, &p);
            assert!(matches!(r.status, ConvergenceStatus::CandidateExcluded(_)), "{r}");
        }
    }
    for start in [1, 2, 100] {
        let s = FactorStream::from_rule("tail", start, e);
        let r = verify_convergence(&Harmonic, &s, &e(0), Level(3), 32, &p);
        assert!(matches!(r.status, ConvergenceStatus::CandidateExcluded(_)), "{r}");
    }
}

#[test]
fn e0_is_outside_the_finite_span_of_positive_indices() {
    let gens: Vec<Multiset> = (1..=12).map(e).collect();
    let v = finite_span_contains(&Harmonic, &gens, &e(0), 3).unwrap();
    assert_eq!(v.status, Verdict::No);
}

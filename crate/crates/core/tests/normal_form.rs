use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topmon::instances::{chi_stream, geometric, Fraction, FreeMonoid, Harmonic, Integers, Rationals, SeriesRing, Sequences};
use topmon::net::{
    check_dissociation, eval_normal_form, multiset_normal_form, normal_form_stream, verify_convergence,
    DivergenceWitness, FactorStream, Level, NetParams, Outcome, Term, TopologicalMonoid,
};
use topmon::MonoidError;

fn finite_streams_agree<M: TopologicalMonoid>(m: &M, seed: u64) {
    let p = NetParams::default();
    let pool = m.window(p.bound(2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..100 {
        let n = rng.gen_range(0..12);
        let factors: Vec<M::Elem> = (0..n).map(|_| pool[rng.gen_range(0..pool.len().min(6))].clone()).collect();
        let s = FactorStream::finite(format!("t{trial}"), factors.clone());
        let nf = multiset_normal_form(m, &s, &p).unwrap();
        assert_eq!(eval_normal_form(m, &nf), m.product(factors.iter()), "{} trial {trial}", m.name());
        let direct = m.product(factors.iter());
        assert!(verify_convergence(m, &normal_form_stream(&s), &direct, p.level, p.depth, &p).is_converged());
    }
}

#[test]
fn normal_forms_evaluate_like_their_streams() {
    finite_streams_agree(&FreeMonoid::new(4).unwrap(), 1);
    finite_streams_agree(&Rationals, 2);
    finite_streams_agree(&Harmonic, 3);
    finite_streams_agree(&SeriesRing::new(2, 8).unwrap(), 4);
    finite_streams_agree(&Sequences::pointwise(), 5);
    finite_streams_agree(&Sequences::restricted(), 6);
}

#[test]
fn certification_transfers_to_the_normal_form() {
    let p = NetParams::default();
    let g = geometric(Fraction::from_ratio(1, 2));
    let one = Fraction::from_ratio(1, 1);
    for (k, d) in [(5, 12), (10, 24)] {
        let a = verify_convergence(&Rationals, &g, &one, Level(k), d, &p);
        let b = verify_convergence(&Rationals, &normal_form_stream(&g), &one, Level(k), d, &p);
        assert!(a.is_converged() && b.is_converged());
    }
    let m = Sequences::restricted();
    for (k, d) in [(5, 12), (10, 24)] {
        let a = verify_convergence(&m, &chi_stream(0), &m.f(), Level(k), d, &p);
        let b = verify_convergence(&m, &normal_form_stream(&chi_stream(0)), &m.f(), Level(k), d, &p);
        assert!(a.is_converged() && b.is_converged(), "{a} / {b}");
    }
}

#[test]
fn infinite_repetition_is_rejected() {
    let p = NetParams::default();
    let s = FactorStream::constant("ones", Fraction::from_ratio(1, 1));
    assert!(matches!(
        multiset_normal_form(&Rationals, &s, &p),
        Err(MonoidError::InfiniteMultiplicity { .. })
    ));
}

#[test]
fn integers_fail_dissociation() {
    let p = NetParams::default();
    let outer = FactorStream::constant("zeros", BigInt::from(0));
    let expand = |t: &Term<BigInt>| {
        let k = BigInt::from(t.index + 1);
        FactorStream::finite("pair", vec![k.clone(), -k])
    };
    let c = check_dissociation(&Integers, &outer, expand, &BigInt::from(0), &p);
    assert_eq!(c.outcome, Outcome::Fail);
    assert!(matches!(c.witness, Some(DivergenceWitness::Unbounded { .. })), "{:?}", c.witness);
}

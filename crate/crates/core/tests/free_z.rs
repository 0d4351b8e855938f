use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topmon::factorisation::{
    pi_bar, pi_finite, unique_factorisation_check, xi, xi_section_check, zh_add, zh_atoms_check,
    zh_net_convergence, AtomId, ExponentMap, ZMonoid,
};
use topmon::instances::{monomials, FreeMonoid, Monomial};
use topmon::net::{Level, NetParams, Outcome};
use topmon::{Monoid, SearchBound};

fn z_free(gens: u32) -> (FreeMonoid, ZMonoid<FreeMonoid>, NetParams) {
    let f = FreeMonoid::new(gens).unwrap();
    let p = NetParams::default();
    (f.clone(), ZMonoid::new(f, p.clone()), p)
}

fn as_map(m: &Monomial) -> ExponentMap {
    ExponentMap::finite(m.exponents().iter().map(|(i, e)| (AtomId::Family(u64::from(*i)), *e)))
}

#[test]
fn pi_is_a_bijection_on_the_degree_five_window() {
    let (f, z, _) = z_free(4);
    let bound = SearchBound::new(4, 5);
    let maps = z.window(bound);
    assert_eq!(maps.len(), 125);
    let images: BTreeSet<Monomial> = maps.iter().map(|m| pi_finite(&f, m).unwrap()).collect();
    assert_eq!(images.len(), 125);
    let oracle: BTreeSet<Monomial> = monomials(4, 5).into_iter().collect();
    assert_eq!(images, oracle);
    for m in &oracle {
        assert_eq!(pi_finite(&f, &as_map(m)).unwrap(), *m);
    }
    assert_eq!(pi_finite(&f, &ExponentMap::zero()).unwrap(), f.identity());
}

#[test]
fn addition_is_a_homomorphism_on_window_pairs() {
    let (f, z, p) = z_free(4);
    let maps = z.window(SearchBound::new(4, 4));
    for a in &maps {
        for b in &maps {
            let r = zh_add(&f, a, b, &p).unwrap();
            assert!(r.homomorphism && r.membership.is_in_z(), "{a} + {b}");
        }
    }
}

#[test]
fn passing_sequences_in_a_discrete_z_are_eventually_constant() {
    let (_, z, _) = z_free(3);
    let pool = z.window(SearchBound::new(3, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut passing = 0;
    for _ in 0..50 {
        let limit = pool[rng.gen_range(0..pool.len())].clone();
        let settle = rng.gen_range(0..24);
        let noisy = rng.gen_bool(0.3);
        let seq: Vec<ExponentMap> = (0..24)
            .map(|i| {
                if i >= settle && !(noisy && i == 23) {
                    limit.clone()
                } else {
                    pool[rng.gen_range(0..pool.len())].clone()
                }
            })
            .collect();
        let r = zh_net_convergence(&z, &seq, &limit, Level(6));
        if r.outcome == Outcome::Pass {
            passing += 1;
            assert_eq!(r.eventually_constant, Some(true));
        }
    }
    assert!(passing > 10);
}

#[test]
fn atoms_of_z_free_are_the_unit_maps() {
    let (_, z, _) = z_free(3);
    let r = zh_atoms_check(&z, SearchBound::new(3, 3)).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
    assert_eq!(r.atoms.len(), 3);
}

#[test]
fn xi_is_a_section_on_the_window() {
    let (f, z, p) = z_free(4);
    for m in z.window(SearchBound::new(4, 4)) {
        let r = xi_section_check(&f, &m, &p).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{m}: {}", r.note);
    }
    assert_eq!(xi(&ExponentMap::zero()), ExponentMap::zero());
}

#[test]
fn z_free_factors_uniquely() {
    let (_, z, p) = z_free(3);
    let bound = SearchBound::new(3, 4);
    for m in z.window(bound) {
        let r = unique_factorisation_check(&z, &m, bound, &p).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{m}: {}", r.note);
        assert_eq!(r.factorisations, vec![m.clone()]);
    }
}

#[test]
fn free_elements_factor_uniquely() {
    let (f, _, p) = z_free(4);
    let b = f.parse_element("x0^2*x1").unwrap();
    let r = unique_factorisation_check(&f, &b, SearchBound::new(4, 3), &p).unwrap();
    assert_eq!(r.outcome, Outcome::Pass);
    assert_eq!(r.factorisations[0].to_string(), "{a0:2, a1:1}");
}

#[test]
fn z_free_admits_no_infinite_maps() {
    let (f, _, p) = z_free(4);
    let (r, v) = pi_bar(&f, &ExponentMap::ones(), &p);
    assert!(!r.is_in_z());
    assert!(v.is_none());
}

use topmon::factorisation::{
    chi, exponent_divides, order_ideal_check, pi_bar, pi_finite, topologically_prime_check,
    unique_factorisation_check, xi_section_check, zh_add, zh_atoms_check, AtomId, ExponentMap,
    ZMonoid, ZVerdict,
};
use topmon::instances::{chi_stream, enumerate_atoms, Sequence, Sequences};
use topmon::net::{is_topologically_irreducible, verify_convergence, ConvergenceStatus, DivergenceWitness, NetParams, Outcome};
use topmon::{is_irreducible, is_prime_bounded, is_prime_witness, Monoid, SearchBound, Verdict};

fn setup() -> (Sequences, NetParams, SearchBound) {
    let params = NetParams::default();
    let bound = params.bound(2);
    (Sequences::restricted(), params, bound)
}

fn ones_minus_chi0() -> ExponentMap {
    ExponentMap::with_base(1, [(AtomId::Family(0), -1)]).unwrap()
}

#[test]
fn f_is_an_atom_and_a_bounded_prime() {
    let (m, _, bound) = setup();
    assert_eq!(is_irreducible(&m, &m.f(), bound).unwrap().status, Verdict::Yes);
    assert_eq!(is_prime_bounded(&m, &m.f(), 3, bound).unwrap().status, Verdict::Yes);
}

#[test]
fn f_is_not_topologically_prime() {
    let (m, params, bound) = setup();
    let v = topologically_prime_check(&m, &m.f(), bound, 3, &[], &params).unwrap();
    assert_eq!(v.status, Verdict::No);
    assert!(v.note.contains("chi-all"), "{}", v.note);
    let witness = v.witness.unwrap();
    assert_eq!(witness[0], Sequence::chi(0));
}

#[test]
fn chi_atoms_are_topologically_irreducible() {
    let (m, params, bound) = setup();
    for j in 0..4 {
        let v = is_topologically_irreducible(&m, &Sequence::chi(j), bound, &params).unwrap();
        assert_eq!(v.status, Verdict::Yes, "chi_{j}");
    }
}

#[test]
fn chi_atoms_divide_f_squared_but_not_f() {
    let (m, params, bound) = setup();
    let ff = m.combine(&m.f(), &m.f());
    for j in 0..4 {
        let chi = Sequence::chi(j);
        assert!(m.divides(&chi, &ff).is_some());
        assert!(m.divides(&chi, &m.f()).is_none());
        let v = topologically_prime_check(&m, &chi, bound, 3, &[], &params).unwrap();
        assert_eq!(v.status, Verdict::No);
        assert!(is_prime_witness(&m, &chi, &v.witness.unwrap()));
    }
}

#[test]
fn chi0_does_not_divide_f() {
    let (m, _, _) = setup();
    assert!(m.divides(&Sequence::chi(0), &m.f()).is_none());
    assert!(Sequences::pointwise().divides(&Sequence::chi(0), &m.f()).is_some());
}

#[test]
fn the_order_ideal_property_fails() {
    let (m, params, _) = setup();
    let r = order_ideal_check(&m, &ExponentMap::ones(), &ones_minus_chi0(), &params).unwrap();
    assert_eq!(r.outcome, Outcome::Fail);
    assert_eq!(r.membership.verdict, ZVerdict::NotInZ);
    assert!(order_ideal_check(&m, &ones_minus_chi0(), &ExponentMap::ones(), &params).is_err());
    let same = order_ideal_check(&m, &ExponentMap::ones(), &ExponentMap::ones(), &params).unwrap();
    assert_eq!(same.outcome, Outcome::Pass);
}

#[test]
fn pointwise_sequences_form_an_order_ideal() {
    let m = Sequences::pointwise();
    let params = NetParams::default();
    let r = order_ideal_check(&m, &ExponentMap::ones(), &ones_minus_chi0(), &params).unwrap();
    assert_eq!(r.outcome, Outcome::Pass);
}

#[test]
fn window_atoms_are_the_chis_and_f() {
    let (m, _, bound) = setup();
    let atoms = enumerate_atoms(&m, bound).unwrap();
    let mut expected: Vec<Sequence> = (0..12).map(Sequence::chi).collect();
    expected.push(m.f());
    assert_eq!(atoms, expected);
}

#[test]
fn all_ones_converges_to_f_and_the_decimation_escapes() {
    let (m, params, _) = setup();
    let (report, value) = pi_bar(&m, &ExponentMap::ones(), &params);
    assert_eq!(report.verdict, ZVerdict::InZ);
    assert_eq!(value, Some(m.f()));
    let r = verify_convergence(&m, &chi_stream(1), &m.f(), params.level, params.depth, &params);
    assert!(!r.is_converged());
    let (report, _) = pi_bar(&m, &ones_minus_chi0(), &params);
    assert_eq!(report.verdict, ZVerdict::NotInZ);
    assert!(matches!(
        report.convergence.unwrap().status,
        ConvergenceStatus::DivergedWith(DivergenceWitness::OutsideCarrier { .. })
    ));
}

#[test]
fn f_has_two_factorisations() {
    let (m, params, bound) = setup();
    let r = unique_factorisation_check(&m, &m.f(), bound, &params).unwrap();
    assert_eq!(r.outcome, Outcome::Fail);
    assert!(r.factorisations.contains(&ExponentMap::unit(AtomId::Extra(0))));
    assert!(r.factorisations.contains(&ExponentMap::ones()));
}

#[test]
fn finite_maps_evaluate_pointwise() {
    let (m, params, _) = setup();
    let map = ExponentMap::finite([(AtomId::Family(0), 1), (AtomId::Family(1), 2)]);
    assert_eq!(pi_finite(&m, &map).unwrap(), Sequence::finite([(0, 1), (1, 2)]));
    assert_eq!(chi(&m, &Sequence::chi(0)).unwrap(), ExponentMap::unit(AtomId::Family(0)));
    assert!(chi(&m, &Sequence::finite([(0, 2)])).is_err());
    let r = zh_add(&m, &ExponentMap::ones(), &ExponentMap::unit(AtomId::Family(0)), &params).unwrap();
    assert!(r.homomorphism);
    assert_eq!(r.membership.verdict, ZVerdict::InZ);
}

#[test]
fn componentwise_order_and_divisibility_disagree() {
    let (m, params, _) = setup();
    let d = exponent_divides(&m, &ExponentMap::unit(AtomId::Family(0)), &ExponentMap::ones(), &params);
    assert!(d.componentwise);
    assert_eq!(d.in_monoid, Some(false));
    assert!(d.mismatch());
}

#[test]
fn z_of_restricted_has_the_expected_atoms() {
    let (m, params, bound) = setup();
    let z = ZMonoid::new(m, params);
    let r = zh_atoms_check(&z, bound).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{:?}", r.failures);
    assert_eq!(r.atoms.len(), 13);
    assert!(r.atoms.contains(&ExponentMap::unit(AtomId::Extra(0))));
}

#[test]
fn xi_is_a_section_on_the_all_ones_map() {
    let (m, params, _) = setup();
    let r = xi_section_check(&m, &ExponentMap::ones(), &params).unwrap();
    assert_eq!(r.outcome, Outcome::Pass, "{}", r.note);
}

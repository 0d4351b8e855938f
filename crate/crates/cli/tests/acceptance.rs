//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.
//! Run with `cargo test -p topmon-cli --test acceptance -- --nocapture`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topmon::factorisation::{
    order_ideal_check, pi_finite, topologically_prime_check, unique_factorisation_check,
    xi_section_check, zh_add, zh_atoms_check, zh_net_convergence, AtomId, ExponentMap, ZMonoid,
};
use topmon::instances::{
    chi_stream, enumerate_atoms, geometric, series_valuation, Fraction, FreeMonoid, Harmonic,
    Integers, Monomial, Multiset, Rationals, Sequence, Sequences, Series, SeriesRing, Valuation,
};
use topmon::net::{
    check_dissociation, detect_divergence, eval_normal_form, multiset_normal_form,
    normal_form_stream, prefix_products, verify_convergence, ConvergenceStatus, DivergenceWitness,
    FactorStream, Level, NetParams, Outcome, SubsetRule, Term, TopologicalMonoid,
};
use topmon::{is_irreducible, is_prime_bounded, Monoid, SearchBound, Verdict};

fn report(n: u32, ok: bool, detail: impl AsRef<str>) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} {}", detail.as_ref());
    assert!(ok, "criterion {n} failed: {}", detail.as_ref());
}

fn fr(p: u64, q: u64) -> Fraction {
    Fraction::from_ratio(p, q)
}

/// Exponent vectors over `gens` generators with total degree in `1..=max`.
fn exponent_vectors(gens: usize, max: u32) -> Vec<Vec<u32>> {
    fn go(gens: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == gens {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            go(gens, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(gens, max, &mut Vec::new(), &mut out);
    out.retain(|v| v.iter().any(|&e| e > 0));
    out
}

fn render_monomial(exps: &BTreeMap<u32, u32>) -> String {
    let parts: Vec<String> = exps.iter().filter(|(_, e)| **e > 0).map(|(i, e)| format!("x{i}^{e}")).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn monomial_exps(m: &Monomial) -> BTreeMap<u32, u32> {
    m.exponents().iter().map(|(i, e)| (*i, *e as u32)).collect()
}

#[test]
fn criterion_01_free_factoriality() {
    let start = Instant::now();
    let f = FreeMonoid::new(4).unwrap();
    let z = ZMonoid::new(f.clone(), NetParams::default());
    let oracle: BTreeSet<Monomial> = exponent_vectors(4, 5)
        .iter()
        .map(|v| {
            let exps = v.iter().enumerate().map(|(i, e)| (i as u32, *e)).collect();
            f.parse_element(&render_monomial(&exps)).unwrap()
        })
        .collect();
    let maps = z.window(SearchBound::new(4, 5));
    let images: BTreeSet<Monomial> = maps.iter().map(|m| pi_finite(&f, m).unwrap()).collect();
    let injective = images.len() == maps.len();
    let identity = pi_finite(&f, &ExponentMap::zero()).unwrap() == f.identity();
    let elapsed = start.elapsed();
    let ok = oracle.len() == 125 && injective && images == oracle && identity && elapsed < Duration::from_secs(1);
    report(1, ok, format!("elements={} maps={} bijective={} time={elapsed:?}", oracle.len(), maps.len(), injective && images == oracle));
}

#[test]
fn criterion_02_geometric_convergence() {
    let start = Instant::now();
    let p = NetParams::default();
    let g = geometric(fr(1, 2));
    let certified = (0..=20).all(|k| verify_convergence(&Rationals, &g, &fr(1, 1), Level(k), 24, &p).is_converged());
    // Oracle: the partial sum of the first n terms is 1 - 2^-n.
    let mut acc = BigRational::zero();
    let mut exact = true;
    for (n, t) in g.prefix(24).iter().enumerate() {
        acc += t.factor.value();
        let gap = BigRational::one() - &acc;
        exact &= gap == BigRational::new(BigInt::one(), BigInt::one() << (n + 1));
        if n >= 20 {
            exact &= gap <= BigRational::new(BigInt::one(), BigInt::one() << 20);
        }
    }
    let elapsed = start.elapsed();
    let ok = certified && exact && elapsed < Duration::from_secs(1);
    report(2, ok, format!("levels=0..=20 depth=24 certified={certified} exact={exact} time={elapsed:?}"));
}

#[test]
fn criterion_03_qplus_decimation_failure() {
    const DEPTH: usize = 20;
    const LEVEL: u32 = 40;
    const QMAX: u64 = 1_000_000;
    let start = Instant::now();
    let p = NetParams { qmax: QMAX, max_exclusion_level: LEVEL, ..NetParams::default() }.with_depth(DEPTH);
    let s = geometric(fr(1, 2)).select(SubsetRule::Squares);
    let witness = detect_divergence(&Rationals, &s, &p);
    let library_ok = matches!(
        &witness,
        Some(DivergenceWitness::DenominatorExclusion { qmax, max_level, tightest_level, .. })
            if *qmax == QMAX && *max_level <= LEVEL && tightest_level <= max_level
    );
    let library_time = start.elapsed();

    // Oracle: S = sum of 2^-(j^2) for j = 1..=20, as N / 2^400. Later terms
    // of the geometric stream add at most 2^-400, so every limit lies in
    // [S, S + 2^-400]. p/q is excluded at level 40 when it sits 2^-40
    // outside that interval.
    let bits = DEPTH * DEPTH;
    let n: BigInt = (1..=DEPTH).map(|j| BigInt::one() << (bits - j * j)).sum();
    let scale = BigInt::one() << bits;
    let margin = BigInt::one() << (bits - LEVEL as usize);
    let mut survivors = Vec::new();
    for q in 1..=QMAX {
        let qb = BigInt::from(q);
        let qn = &qb * &n;
        let p0: BigInt = &qn / &scale;
        for dp in -1i64..=2 {
            let pp = &p0 + dp;
            if pp.sign() == num::bigint::Sign::Minus {
                continue;
            }
            let c = &pp * &scale;
            let below = c <= &qn - &qb * &margin;
            let above = c >= &qn + &qb + &qb * &margin;
            if !(below || above) {
                survivors.push((pp.clone(), q));
            }
        }
    }
    let ok = library_ok && survivors.is_empty() && library_time < Duration::from_secs(30);
    let shown = witness.map(|w| w.to_string()).unwrap_or_else(|| "none".into());
    report(3, ok, format!("survivors={} library_time={library_time:?} witness=\"{shown}\"", survivors.len()));
}

#[test]
fn criterion_04_restricted_counterexamples() {
    let start = Instant::now();
    let m = Sequences::restricted();
    let params = NetParams::default();
    let bound = params.bound(2);
    let f = m.f();
    let a = is_irreducible(&m, &f, bound).unwrap().status == Verdict::Yes
        && is_prime_bounded(&m, &f, 3, bound).unwrap().status == Verdict::Yes;
    let top = topologically_prime_check(&m, &f, bound, 3, &[], &params).unwrap();
    let b = top.status == Verdict::No
        && top.note.contains("chi-all")
        && top.witness.as_ref().is_some_and(|w| w.iter().enumerate().all(|(i, x)| *x == Sequence::chi(i as u64)));
    let c = m.divides(&Sequence::chi(0), &f).is_none();
    let lower = ExponentMap::with_base(1, [(AtomId::Family(0), -1)]).unwrap();
    let d = order_ideal_check(&m, &ExponentMap::ones(), &lower, &params).unwrap().outcome == Outcome::Fail;
    let mut expected: Vec<Sequence> = (0..12).map(Sequence::chi).collect();
    expected.push(f.clone());
    let e = enumerate_atoms(&m, bound).unwrap() == expected;
    let elapsed = start.elapsed();
    let ok = a && b && c && d && e && elapsed < Duration::from_secs(5);
    report(4, ok, format!("a={a} b={b} c={c} d={d} e={e} time={elapsed:?}"));
}

#[test]
fn criterion_05_harmonic_closure() {
    let e0 = Multiset::basis(0);
    // Oracle: for n >= 1, M_m(e_n) = n^-m, so e_n is in U_k(e_0) iff
    // n^-m <= 2^-k for m = 1..=k, i.e. iff n >= 2^k.
    let mut closure = true;
    for k in 0..=20u32 {
        let n = 1u64 << k;
        closure &= Harmonic.neighborhood_contains(&e0, Level(k), &Multiset::basis(n));
        if k > 0 {
            closure &= !Harmonic.neighborhood_contains(&e0, Level(k), &Multiset::basis(n - 1));
        }
    }
    let mut wide = true;
    for k in 21..=63u32 {
        wide &= Harmonic.neighborhood_contains(&e0, Level(k), &Multiset::basis(1u64 << k));
    }
    let p = NetParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut positivity = true;
    for trial in 0..50 {
        let len = rng.gen_range(1..6);
        let factors: Vec<Multiset> = (0..len).map(|_| Multiset::basis(rng.gen_range(1..1 << 20))).collect();
        let s = FactorStream::finite(format!("t{trial}"), factors);
        for k in [0, 10, 20] {
            let r = verify_convergence(&Harmonic, &s, &e0, Level(k), 32, &p);
            positivity &= matches!(r.status, ConvergenceStatus::CandidateExcluded(_));
        }
    }
    for start in [1, 2, 1000] {
        let s = FactorStream::from_rule("tail", start, Multiset::basis);
        for k in [0, 10, 20] {
            let r = verify_convergence(&Harmonic, &s, &e0, Level(k), 32, &p);
            positivity &= matches!(r.status, ConvergenceStatus::CandidateExcluded(_));
        }
    }
    let ok = closure && wide && positivity;
    report(5, ok, format!("closure(k<=20)={closure} closure(k<=63)={wide} positivity={positivity}"));
}

fn normal_forms_agree<M: TopologicalMonoid>(m: &M, seed: u64) -> bool {
    let p = NetParams::default();
    let pool = m.window(p.bound(2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..100).all(|trial| {
        let n = rng.gen_range(0..12);
        let factors: Vec<M::Elem> = (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        let direct = factors.iter().fold(m.identity(), |acc, x| m.combine(&acc, x));
        let s = FactorStream::finite(format!("t{trial}"), factors);
        let nf = multiset_normal_form(m, &s, &p).unwrap();
        eval_normal_form(m, &nf) == direct
            && verify_convergence(m, &normal_form_stream(&s), &direct, p.level, p.depth, &p).is_converged()
    })
}

#[test]
fn criterion_06_multiset_normal_form() {
    let finite = [
        ("free", normal_forms_agree(&FreeMonoid::new(4).unwrap(), 1)),
        ("qplus", normal_forms_agree(&Rationals, 2)),
        ("harmonic", normal_forms_agree(&Harmonic, 3)),
        ("series", normal_forms_agree(&SeriesRing::new(2, 8).unwrap(), 4)),
        ("pointwise", normal_forms_agree(&Sequences::pointwise(), 5)),
        ("restricted", normal_forms_agree(&Sequences::restricted(), 6)),
        ("integers-demo", normal_forms_agree(&Integers, 7)),
    ];
    let p = NetParams::default();
    let mut transfer = true;
    let g = geometric(fr(1, 2));
    let seq = Sequences::restricted();
    for (k, d) in [(4, 10), (10, 24), (16, 32)] {
        let a = verify_convergence(&Rationals, &g, &fr(1, 1), Level(k), d, &p);
        let b = verify_convergence(&Rationals, &normal_form_stream(&g), &fr(1, 1), Level(k), d, &p);
        transfer &= a.is_converged() && b.is_converged();
        let a = verify_convergence(&seq, &chi_stream(0), &seq.f(), Level(k), d, &p);
        let b = verify_convergence(&seq, &normal_form_stream(&chi_stream(0)), &seq.f(), Level(k), d, &p);
        transfer &= a.is_converged() && b.is_converged();
    }
    let failing: Vec<&str> = finite.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let ok = failing.is_empty() && transfer;
    report(6, ok, format!("instances={} failing={failing:?} transfer={transfer}", finite.len()));
}

#[test]
fn criterion_07_z_theorems() {
    let p = NetParams::default();
    let f = FreeMonoid::new(4).unwrap();
    let z = ZMonoid::new(f.clone(), p.clone());
    let maps = z.window(SearchBound::new(4, 4));

    // (a) with the product of images rebuilt from exponent vectors.
    let mut a = true;
    for x in &maps {
        for y in &maps {
            let r = zh_add(&f, x, y, &p).unwrap();
            let mut exps = monomial_exps(&pi_finite(&f, x).unwrap());
            for (i, e) in monomial_exps(&pi_finite(&f, y).unwrap()) {
                *exps.entry(i).or_default() += e;
            }
            let oracle = f.parse_element(&render_monomial(&exps)).unwrap();
            a &= r.homomorphism && r.value.as_ref() == Some(&oracle);
        }
    }

    // (b)
    let z3 = ZMonoid::new(FreeMonoid::new(3).unwrap(), p.clone());
    let pool = z3.window(SearchBound::new(3, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut b = true;
    let mut passing = 0;
    for _ in 0..50 {
        let limit = pool[rng.gen_range(0..pool.len())].clone();
        let settle = rng.gen_range(0..24);
        let noisy = rng.gen_bool(0.3);
        let seq: Vec<ExponentMap> = (0..24)
            .map(|i| if i >= settle && !(noisy && i == 23) { limit.clone() } else { pool[rng.gen_range(0..pool.len())].clone() })
            .collect();
        let r = zh_net_convergence(&z3, &seq, &limit, Level(6));
        if r.outcome == Outcome::Pass {
            passing += 1;
            b &= r.eventually_constant == Some(true);
        }
    }
    b &= passing > 0;

    // (c)
    let restricted = Sequences::restricted();
    let bound = p.bound(2);
    let zr = ZMonoid::new(restricted, p.clone());
    let c = zh_atoms_check(&z, SearchBound::new(4, 3)).unwrap().outcome == Outcome::Pass
        && zh_atoms_check(&zr, bound).unwrap().outcome == Outcome::Pass;

    // (d)
    let d = maps.iter().all(|m| xi_section_check(&f, m, &p).unwrap().outcome == Outcome::Pass)
        && xi_section_check(&restricted, &ExponentMap::ones(), &p).unwrap().outcome == Outcome::Pass;

    // (e)
    let zb = SearchBound::new(4, 3);
    let e = z.window(zb).iter().all(|m| {
        let r = unique_factorisation_check(&z, m, zb, &p).unwrap();
        r.outcome == Outcome::Pass && r.factorisations == vec![m.clone()]
    });

    let ok = a && b && c && d && e;
    report(7, ok, format!("a={a} b={b} (passing={passing}/50) c={c} d={d} e={e}"));
}

fn random_series(ring: &SeriesRing, rng: &mut ChaCha8Rng) -> Series {
    let terms: Vec<(Vec<u32>, BigRational)> = (0..rng.gen_range(1..3))
        .map(|_| {
            let mut e = vec![rng.gen_range(0..3), rng.gen_range(0..3)];
            if e == [0, 0] {
                e[rng.gen_range(0..2)] = 1;
            }
            (e, BigRational::from_integer(BigInt::from(rng.gen_range(1..4))))
        })
        .collect();
    let refs: Vec<(&[u32], BigRational)> = terms.iter().map(|(e, c)| (e.as_slice(), c.clone())).collect();
    ring.from_terms(&refs)
}

/// Least total degree among nonzero coefficients, if any.
fn min_degree(s: &Series) -> Option<u32> {
    s.coefficients().iter().filter(|(_, c)| !c.is_zero()).map(|(e, _)| e.iter().sum()).min()
}

#[test]
fn criterion_08_almost_discrete_series() {
    let ring = SeriesRing::new(2, 8).unwrap();
    let p = NetParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let streams: Vec<Vec<Series>> = (0..20)
        .map(|_| (0..rng.gen_range(2..10)).map(|_| random_series(&ring, &mut rng)).collect())
        .collect();
    let mut increasing = true;
    let mut finite_exact = true;
    let mut none_certified = true;
    let mut candidates = ring.window(p.bound(2));
    candidates.push(ring.identity());
    for factors in &streams {
        let terms: Vec<Term<Series>> = factors.iter().cloned().enumerate().map(|(i, f)| Term::new(i as u64, f)).collect();
        let partials = prefix_products(&ring, &terms);
        for w in partials.windows(2) {
            match (min_degree(&w[0]), min_degree(&w[1])) {
                (Some(a), Some(b)) => increasing &= b > a,
                // Truncated away: the valuation has reached the precision.
                (_, None) => increasing &= series_valuation(&w[1]) == Valuation::AtLeast(ring.precision()),
                (None, Some(_)) => increasing = false,
            }
        }
        let product = ring.product(factors.iter());
        let s = FactorStream::finite("f", factors.clone());
        finite_exact &= verify_convergence(&ring, &s, &product, Level(8), 16, &p).is_converged();
        let cycle = factors.clone();
        let inf = FactorStream::from_rule("cycle", 0, move |i| cycle[i as usize % cycle.len()].clone());
        for c in &candidates {
            none_certified &= !verify_convergence(&ring, &inf, c, Level(8), 16, &p).is_converged();
        }
    }
    let ok = increasing && finite_exact && none_certified;
    report(8, ok, format!("streams=20 increasing={increasing} finite_exact={finite_exact} infinite_uncertified={none_certified} candidates={}", candidates.len()));
}

#[test]
fn criterion_09_dissociation() {
    let p = NetParams::default().with_depth(200);
    let expand = |t: &Term<Fraction>| {
        let x = t.factor.clone();
        geometric(fr(1, 2)).map(format!("halves({x})"), move |h| Fraction::new(h.value() * x.value()).unwrap())
    };
    let q = check_dissociation(&Rationals, &geometric(fr(1, 2)), expand, &fr(1, 1), &p);
    let qplus = q.outcome == Outcome::Pass;

    let p = NetParams::default();
    let outer = FactorStream::constant("zeros", BigInt::from(0));
    let pairs = |t: &Term<BigInt>| {
        let k = BigInt::from(t.index + 1);
        FactorStream::finite("pair", vec![k.clone(), -k])
    };
    let z = check_dissociation(&Integers, &outer, pairs, &BigInt::from(0), &p);
    let integers = z.outcome == Outcome::Fail && matches!(z.witness, Some(DivergenceWitness::Unbounded { .. }));
    let w = z.witness.map(|w| w.to_string()).unwrap_or_default();
    report(9, qplus && integers, format!("qplus_nested={qplus} integers_fail_unbounded={integers} witness=\"{w}\""));
}

#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_topmon");
    let run = |instance: &str| {
        let out = Command::new(bin)
            .args(["check-laws", instance, "--seed", "7", "--format", "structured"])
            .output()
            .unwrap();
        (out.status.code(), out.stdout)
    };
    let mut identical = true;
    let mut checked = 0;
    for instance in ["free", "qplus", "harmonic", "series", "pointwise", "restricted", "integers-demo"] {
        let (a, b) = (run(instance), run(instance));
        identical &= a == b && a.0 == Some(0) && !a.1.is_empty();
        checked += 1;
    }
    report(10, identical, format!("instances={checked} byte_identical={identical}"));
}

use std::collections::BTreeSet;

use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topmon::factorisation::{
    exponent_divides, order_ideal_check, pi_bar, pi_finite, topologically_prime_check,
    unique_factorisation_check, xi_section_check, zh_add, zh_atoms_check, zh_net_convergence,
    AtomId, Atomic, ExponentMap, ZMonoid,
};
use topmon::instances::{
    chi_stream, enumerate_atoms, geometric, monomials, series_valuation, AnyInstance, Fraction,
    FreeMonoid, Harmonic, Integers, Multiset, Rationals, Sequence, Sequences, SeriesRing, Valuation,
};
use topmon::net::{
    check_arbitrary_decimation, check_dissociation, eval_normal_form, evaluate_product,
    finite_span_contains, is_topologically_irreducible, multiset_normal_form, prefix_products,
    verify_convergence, ConvergenceStatus, DivergenceWitness, FactorStream, Level, NetParams,
    Outcome, SubsetRule, Term, TopologicalMonoid,
};
use topmon::{is_irreducible, is_prime_bounded, Monoid, Verdict};

use crate::context::Ctx;
use crate::report::{list, outcome_of, Check, SuiteReport};

const SAMPLE_ELEMENTS: usize = 40;
const TRIPLES: usize = 200;
const RANDOM_STREAMS: usize = 100;

pub fn check_laws(inst: &AnyInstance, ctx: &Ctx) -> SuiteReport {
    match inst {
        AnyInstance::Free(m) => run(m, ctx, free_checks),
        AnyInstance::Qplus(m) => run(m, ctx, qplus_checks),
        AnyInstance::Harmonic(m) => run(m, ctx, harmonic_checks),
        AnyInstance::Series(m) => run(m, ctx, series_checks),
        AnyInstance::Sequences(m) if m.is_restricted() => run(m, ctx, restricted_checks),
        AnyInstance::Sequences(m) => run(m, ctx, pointwise_checks),
        AnyInstance::Integers(m) => run(m, ctx, integers_checks),
    }
}

fn run<M: TopologicalMonoid>(m: &M, ctx: &Ctx, specific: fn(&M, &Ctx, &mut SuiteReport)) -> SuiteReport {
    let mut r = SuiteReport::new("check-laws", &m.name(), ctx.settings());
    generic_checks(m, ctx, &mut r);
    specific(m, ctx, &mut r);
    r.finish()
}

fn sample<M: Monoid>(m: &M, ctx: &Ctx) -> Vec<M::Elem> {
    m.window(ctx.bound()).into_iter().take(SAMPLE_ELEMENTS).collect()
}

fn first_failure<T, F: FnMut(&T) -> bool>(items: &[T], mut ok: F) -> Option<&T> {
    items.iter().find(|x| !ok(x))
}

fn law_check<T: std::fmt::Display>(id: &str, statement: &str, failure: Option<T>, n: usize) -> Check {
    let c = Check::from_bool(id, statement, failure.is_none()).param("samples", n);
    match failure {
        Some(w) => c.witness(w.to_string()),
        None => c,
    }
}

fn generic_checks<M: TopologicalMonoid>(m: &M, ctx: &Ctx, r: &mut SuiteReport) {
    let elems = sample(m, ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.params.seed);
    let triples: Vec<(M::Elem, M::Elem, M::Elem)> = if elems.is_empty() {
        Vec::new()
    } else {
        (0..TRIPLES)
            .map(|_| {
                let mut pick = || elems[rng.gen_range(0..elems.len())].clone();
                (pick(), pick(), pick())
            })
            .collect()
    };
    let n = triples.len();
    let e = m.identity();
    let fmt3 = |t: &(M::Elem, M::Elem, M::Elem)| format!("({}, {}, {})", t.0, t.1, t.2);

    let f = first_failure(&triples, |(a, _, _)| m.combine(a, &e) == *a);
    r.push(law_check("laws.identity", "the identity is neutral", f.map(fmt3), n));
    let f = first_failure(&triples, |(a, b, _)| m.combine(a, b) == m.combine(b, a));
    r.push(law_check("laws.commutative", "the operation is commutative", f.map(fmt3), n));
    let f = first_failure(&triples, |(a, b, c)| {
        m.combine(&m.combine(a, b), c) == m.combine(a, &m.combine(b, c))
    });
    r.push(law_check("laws.associative", "the operation is associative", f.map(fmt3), n));
    let f = first_failure(&triples, |(a, b, _)| {
        let ab = m.combine(a, b);
        m.contains(&ab) && m.divides(a, &ab).as_ref() == Some(b)
    });
    r.push(law_check("laws.cancellative", "a*b = a*c implies b = c (unique cofactor)", f.map(fmt3), n));

    let units: Vec<&M::Elem> = elems.iter().filter(|x| m.is_unit(x)).collect();
    let reduced = m.is_reduced() && units.is_empty();
    let mut c = Check::from_bool("laws.reduced", "the only unit is the identity", reduced);
    if let Some(u) = units.first() {
        c = c.witness(format!("unit {u}"));
    }
    if !m.is_reduced() {
        c = c.expect_fail();
    }
    r.push(c);

    let f = first_failure(&elems, |x| m.parse_element(&x.to_string()).as_ref() == Ok(x));
    r.push(law_check("encoding.round-trip", "parse(print(x)) = x", f, elems.len()));

    let pairs: Vec<(M::Elem, M::Elem)> = elems
        .iter()
        .enumerate()
        .flat_map(|(i, a)| elems[i + 1..].iter().map(move |b| (a.clone(), b.clone())))
        .take(400)
        .collect();
    let f = first_failure(&pairs, |(a, b)| m.separation_level(a, b, 64).is_some());
    r.push(law_check(
        "topology.hausdorff",
        "distinct elements are separated by basic neighbourhoods",
        f.map(|(a, b)| format!("{a} / {b}")),
        pairs.len(),
    ));
    let f = first_failure(&pairs, |(a, b)| {
        (0..ctx.params.level.0).all(|k| {
            !m.neighborhood_contains(a, Level(k + 1), b) || m.neighborhood_contains(a, Level(k), b)
        })
    });
    r.push(law_check(
        "topology.nested-basis",
        "the neighbourhood basis is decreasing",
        f.map(|(a, b)| format!("{a} / {b}")),
        pairs.len(),
    ));

    let mut bad = None;
    let mut streams = 0;
    if !elems.is_empty() {
        for t in 0..RANDOM_STREAMS {
            let len = rng.gen_range(0..10);
            let factors: Vec<M::Elem> = (0..len).map(|_| elems[rng.gen_range(0..elems.len().min(8))].clone()).collect();
            let s = FactorStream::finite(format!("random{t}"), factors.clone());
            let direct = m.product(factors.iter());
            let ok = multiset_normal_form(m, &s, &ctx.params).is_ok_and(|nf| eval_normal_form(m, &nf) == direct)
                && verify_convergence(m, &s, &direct, ctx.params.level, ctx.params.depth, &ctx.params).is_converged();
            streams += 1;
            if !ok && bad.is_none() {
                bad = Some(s.label().to_string());
            }
        }
    }
    r.push(law_check(
        "net.finite-normal-form",
        "a finite product equals the product of its multiset normal form",
        bad,
        streams,
    ));
}

fn converges<M: TopologicalMonoid>(m: &M, s: &FactorStream<M::Elem>, c: &M::Elem, p: &NetParams) -> bool {
    verify_convergence(m, s, c, p.level, p.depth, p).is_converged()
}

fn free_checks(m: &FreeMonoid, ctx: &Ctx, r: &mut SuiteReport) {
    let bound = ctx.bound();
    let p = &ctx.params;
    let z = ZMonoid::new(m.clone(), p.clone());
    let maps = z.window(bound);
    let images: BTreeSet<_> = maps.iter().filter_map(|x| pi_finite(m, x).ok()).collect();
    let oracle: BTreeSet<_> = monomials(m.gens(), ctx.degree).into_iter().collect();
    r.push(
        Check::from_bool(
            "z.pi-bijective",
            "the factorisation homomorphism is bijective (free means factorial)",
            images.len() == maps.len() && images == oracle,
        )
        .param("maps", maps.len())
        .param("elements", oracle.len()),
    );

    let small: Vec<&ExponentMap> = maps.iter().filter(|x| x.total().is_some_and(|t| t <= 4)).collect();
    let mut bad = None;
    for a in &small {
        for b in &small {
            let ok = zh_add(m, a, b, p).is_ok_and(|s| s.homomorphism && s.membership.is_in_z());
            if !ok && bad.is_none() {
                bad = Some(format!("{a} + {b}"));
            }
        }
    }
    r.push(law_check(
        "z.add-homomorphism",
        "pi-bar turns componentwise addition into the monoid operation",
        bad,
        small.len() * small.len(),
    ));

    push_atoms_check(&z, ctx, r);

    let f = first_failure(&maps, |x| {
        unique_factorisation_check(&z, x, bound, p).is_ok_and(|u| u.outcome == Outcome::Pass)
    });
    r.push(law_check(
        "z.unique-factorisation",
        "Z(H) is topologically prime factorial",
        f,
        maps.len(),
    ));

    let f = first_failure(&small, |x| xi_section_check(m, x, p).is_ok_and(|x| x.outcome == Outcome::Pass));
    r.push(law_check("z.xi-section", "Xi is a section of pi-bar on Z(Z(H))", f, small.len()));

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x5a);
    let mut passing = 0;
    let mut bad = None;
    for _ in 0..50 {
        let limit = maps[rng.gen_range(0..maps.len())].clone();
        let settle = rng.gen_range(0..24);
        let seq: Vec<ExponentMap> = (0..24)
            .map(|i| if i >= settle { limit.clone() } else { maps[rng.gen_range(0..maps.len())].clone() })
            .collect();
        let n = zh_net_convergence(&z, &seq, &limit, p.level);
        if n.outcome == Outcome::Pass {
            passing += 1;
            if n.eventually_constant != Some(true) && bad.is_none() {
                bad = Some(limit.to_string());
            }
        }
    }
    r.push(law_check("z.discrete", "Z of a discrete monoid is discrete", bad, 50).param("passing", passing));

    let gens: Vec<_> = (0..m.gens()).map(|i| m.family_atom(u64::from(i))).collect();
    let f = first_failure(&gens, |g| {
        is_prime_bounded(m, g, ctx.max_factors, bound).is_ok_and(|v| v.is_yes())
            && topologically_prime_check(m, g, bound, ctx.max_factors, &[], p).is_ok_and(|v| v.is_yes())
    });
    r.push(law_check("atoms.prime", "generators are prime and topologically prime", f, gens.len()));
}

fn push_atoms_check<M>(z: &ZMonoid<M>, ctx: &Ctx, r: &mut SuiteReport)
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let bound = ctx.params.bound(ctx.degree.min(2));
    let c = match zh_atoms_check(z, bound) {
        Ok(a) => {
            let c = Check::new("z.atoms", "the atoms of Z(H) are the unit maps chi_a", a.outcome)
                .param("atoms", a.atoms.len())
                .param("reducible", a.reducible);
            match a.failures.first() {
                Some(f) => c.witness(f.clone()),
                None => c,
            }
        }
        Err(e) => Check::new("z.atoms", "the atoms of Z(H) are the unit maps chi_a", Outcome::Inconclusive).witness(e.to_string()),
    };
    r.push(c);
}

fn qplus_checks(m: &Rationals, ctx: &Ctx, r: &mut SuiteReport) {
    let p = &ctx.params;
    let one = Fraction::from_ratio(1, 1);
    let g = geometric(Fraction::from_ratio(1, 2));
    let levels: Vec<u32> = (0..=p.level.0).collect();
    let f = first_failure(&levels, |k| verify_convergence(m, &g, &one, Level(*k), p.depth, p).is_converged());
    r.push(law_check("net.geometric", "the sum of 2^-k over k >= 1 is 1", f, levels.len()));

    let d = check_arbitrary_decimation(m, &g, SubsetRule::Squares, &m.window(ctx.bound()), p);
    let mut c = Check::new(
        "decimation.squares",
        "Q+ does not allow arbitrary decimation",
        d.outcome,
    )
    .expect_fail()
    .param("stream", &d.stream);
    if let Some(w) = &d.witness {
        c = c.witness(w.to_string());
    }
    r.push(c);

    let evens = SubsetRule::Periodic { modulus: 2, residues: [0].into_iter().collect() };
    let d = check_arbitrary_decimation(m, &g, evens, &[Fraction::from_ratio(1, 3)], p);
    r.push(Check::new("decimation.evens", "even-indexed terms sum to 1/3", d.outcome).param("stream", &d.stream));

    let dp = p.clone().with_depth(200);
    let expand = |t: &Term<Fraction>| {
        let x = t.factor.clone();
        geometric(Fraction::from_ratio(1, 2)).map(format!("halves({x})"), move |h| {
            Fraction::new(h.value() * x.value()).expect("nonnegative")
        })
    };
    let d = check_dissociation(m, &g, expand, &one, &dp);
    r.push(Check::new("dissociation.nested", "nested geometric sums dissociate to 1", d.outcome).param("depth", 200));

    let atoms = enumerate_atoms(m, ctx.bound()).unwrap_or_default();
    r.push(
        Check::from_bool("atoms.none", "Q+ has no atoms", atoms.is_empty())
            .param("window-elements", m.window(ctx.bound()).len()),
    );
}

fn harmonic_checks(m: &Harmonic, ctx: &Ctx, r: &mut SuiteReport) {
    let p = &ctx.params;
    let e = Multiset::basis;
    let levels: Vec<u32> = (0..=p.level.0.min(63)).collect();
    let f = first_failure(&levels, |k| {
        let n = 1u64 << k;
        m.neighborhood_contains(&e(0), Level(*k), &e(n))
            && (n == 1 || !m.neighborhood_contains(&e(0), Level(*k), &e(n - 1)))
    });
    r.push(law_check("harmonic.basis-to-e0", "e_n converges to e_0", f, levels.len()));

    let mut streams: Vec<FactorStream<Multiset>> = (1..=4).map(|s| FactorStream::from_rule(format!("basis-from({s})"), s, e)).collect();
    streams.push(FactorStream::finite("[e_1]", vec![e(1)]));
    streams.push(FactorStream::finite("[e_3, e_500]", vec![e(3), e(500)]));
    let f = first_failure(&streams, |s| {
        matches!(
            verify_convergence(m, s, &e(0), p.level, p.depth, p).status,
            ConvergenceStatus::CandidateExcluded(_)
        )
    });
    r.push(law_check(
        "harmonic.positivity",
        "no nonempty product of e_n (n >= 1) converges to e_0",
        f.map(|s| s.label().to_string()),
        streams.len(),
    ));

    let gens: Vec<Multiset> = (1..=u64::from(p.window)).map(e).collect();
    let v = finite_span_contains(m, &gens, &e(0), ctx.degree.max(2));
    r.push(
        Check::new(
            "harmonic.e0-in-span",
            "e_0 lies in the span of the e_n (n >= 1)",
            v.map_or(Outcome::Inconclusive, |v| outcome_of(&v)),
        )
        .expect_fail(),
    );
    let indices: Vec<u64> = (0..=u64::from(p.window)).collect();
    let f = first_failure(&indices, |i| {
        is_irreducible(m, &e(*i), ctx.bound()).is_ok_and(|v| v.is_yes())
    });
    r.push(law_check("atoms.basis", "every e_i is an atom", f, p.window as usize + 1));
}

fn series_checks(m: &SeriesRing, ctx: &Ctx, r: &mut SuiteReport) {
    let p = &ctx.params;
    let pool: Vec<_> = m.window(p.bound(2));
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let streams: Vec<Vec<_>> = (0..20)
        .map(|_| (0..rng.gen_range(2..8)).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect())
        .collect();
    let f = first_failure(&streams, |fs| {
        let terms: Vec<Term<_>> = fs.iter().cloned().enumerate().map(|(i, x)| Term::new(i as u64, x)).collect();
        prefix_products(m, &terms).windows(2).all(|w| {
            let (a, b) = (series_valuation(&w[0]), series_valuation(&w[1]));
            matches!(b, Valuation::AtLeast(_)) || b.lower_bound() > a.lower_bound()
        })
    });
    r.push(law_check(
        "series.valuation-increasing",
        "partial products of non-units have increasing valuation",
        f.map(|s| list(s)),
        streams.len(),
    ));
    let mut candidates = pool.clone();
    candidates.push(m.identity());
    let f = first_failure(&streams, |fs| {
        let cycle = fs.clone();
        let s = FactorStream::from_rule("cycle", 0, move |i| cycle[i as usize % cycle.len()].clone());
        candidates.iter().all(|c| !converges(m, &s, c, p))
    });
    r.push(law_check(
        "series.almost-discrete",
        "convergent products have finitely many non-identity factors",
        f.map(|s| list(s)),
        streams.len(),
    ));
    let f = first_failure(&streams, |fs| {
        let s = FactorStream::finite("f", fs.clone());
        converges(m, &s, &m.product(fs.iter()), p)
    });
    r.push(law_check("series.finite-exact", "finite products are certified exactly", f.map(|s| list(s)), streams.len()));
}

/// Limits of decimated `chi-all` in the pointwise instance.
fn pointwise_decimations() -> Vec<(SubsetRule, Sequence)> {
    let all_but_0 = Sequences::pointwise()
        .divides(&Sequence::chi(0), &Sequence::constant(1))
        .expect("pointwise carrier");
    let evens: Sequence = Sequences::pointwise().parse_element("base=[1,0]").expect("valid");
    let odds: Sequence = Sequences::pointwise().parse_element("base=[0,1]").expect("valid");
    vec![
        (SubsetRule::From(1), all_but_0),
        (SubsetRule::Periodic { modulus: 2, residues: [0].into_iter().collect() }, evens),
        (SubsetRule::Periodic { modulus: 2, residues: [1].into_iter().collect() }, odds),
        (SubsetRule::Only([2, 5].into_iter().collect()), Sequence::finite([(2, 1), (5, 1)])),
    ]
}

fn pointwise_checks(m: &Sequences, ctx: &Ctx, r: &mut SuiteReport) {
    let p = &ctx.params;
    let cases = pointwise_decimations();
    let f = first_failure(&cases, |(rule, limit)| {
        let d = check_arbitrary_decimation(m, &chi_stream(0), rule.clone(), std::slice::from_ref(limit), p);
        d.outcome == Outcome::Pass && d.limit.as_ref() == Some(limit)
    });
    r.push(law_check(
        "decimation.arbitrary",
        "pointwise sequences allow arbitrary decimation",
        f.map(|(rule, _)| rule.to_string()),
        cases.len(),
    ));
    let d = ExponentMap::with_base(1, [(AtomId::Family(0), -1)]).expect("valid");
    let o = order_ideal_check(m, &ExponentMap::ones(), &d, p);
    r.push(Check::new(
        "z.order-ideal",
        "Z(H) is an order ideal when H allows arbitrary decimation",
        o.map_or(Outcome::Inconclusive, |o| o.outcome),
    ));
    let (rep, _) = pi_bar(m, &ExponentMap::ones(), p);
    r.push(Check::from_bool("z.all-ones", "the all-ones map lies in Z(H)", rep.is_in_z()));
    push_atoms_check(&ZMonoid::new(*m, p.clone()), ctx, r);
}

fn restricted_checks(m: &Sequences, ctx: &Ctx, r: &mut SuiteReport) {
    let p = &ctx.params;
    let bound = ctx.params.bound(ctx.degree.max(2));
    let f = m.f();
    let irr = is_irreducible(m, &f, bound);
    r.push(Check::new(
        "f.irreducible",
        "f is irreducible",
        irr.map_or(Outcome::Inconclusive, |v| outcome_of(&v)),
    ));
    let pr = is_prime_bounded(m, &f, ctx.max_factors, bound);
    r.push(
        Check::new("f.prime", "f is prime", pr.map_or(Outcome::Inconclusive, |v| outcome_of(&v)))
            .param("max-factors", ctx.max_factors),
    );
    match topologically_prime_check(m, &f, bound, ctx.max_factors, &[], p) {
        Ok(v) => {
            let mut c = Check::new("f.topologically-prime", "f is topologically prime", outcome_of(&v)).expect_fail();
            if v.status == Verdict::No {
                c = c.witness(v.note.clone());
            }
            r.push(c);
        }
        Err(e) => r.push(Check::new("f.topologically-prime", "f is topologically prime", Outcome::Inconclusive).witness(e.to_string())),
    }

    let chis: Vec<Sequence> = (0..4).map(Sequence::chi).collect();
    let fail = first_failure(&chis, |x| is_topologically_irreducible(m, x, bound, p).is_ok_and(|v| v.is_yes()));
    r.push(law_check("chi.topologically-irreducible", "chi_j is topologically irreducible", fail, chis.len()));
    let v = is_prime_bounded(m, &chis[0], ctx.max_factors, bound);
    let mut c = Check::new(
        "chi.prime",
        "chi_j is prime (claimed topologically prime)",
        v.as_ref().map_or(Outcome::Inconclusive, outcome_of),
    )
    .expect_fail();
    if let Ok(v) = &v {
        if let Some(w) = &v.witness {
            c = c.witness(format!("chi_0 divides the product of {} but no factor", list(w)));
        }
    }
    r.push(c);

    r.push(
        Check::from_bool("chi0.divides-f", "chi_0 divides f", m.divides(&chis[0], &f).is_some())
            .expect_fail()
            .witness("f - chi_0 = (0,1,1,...) is outside the carrier"),
    );

    let atoms = enumerate_atoms(m, bound).unwrap_or_default();
    let mut expected: Vec<Sequence> = (0..u64::from(p.window)).map(Sequence::chi).collect();
    expected.push(f.clone());
    r.push(
        Check::from_bool("atoms.window", "the window atoms are chi_0..chi_{W-1} and f", atoms == expected)
            .param("atoms", atoms.len()),
    );

    let d = evaluate_product(m, &chi_stream(1), &[], p);
    let mut c = Check::new("decimation.chi-from-1", "the product of chi_i over i >= 1 converges in H", d.outcome).expect_fail();
    if let Some(w) = &d.witness {
        c = c.witness(w.to_string());
    }
    r.push(c);

    let (rep, v) = pi_bar(m, &ExponentMap::ones(), p);
    r.push(Check::from_bool(
        "z.all-ones",
        "the all-ones map lies in Z(H) with value f",
        rep.is_in_z() && v.as_ref() == Some(&f),
    ));
    let dmap = ExponentMap::with_base(1, [(AtomId::Family(0), -1)]).expect("valid");
    let o = order_ideal_check(m, &ExponentMap::ones(), &dmap, p);
    r.push(
        Check::new("z.order-ideal", "Z(H) is an order ideal", o.map_or(Outcome::Inconclusive, |o| o.outcome))
            .expect_fail()
            .param("lower", &dmap),
    );
    let ed = exponent_divides(m, &ExponentMap::unit(AtomId::Family(0)), &ExponentMap::ones(), p);
    r.push(
        Check::from_bool(
            "z.divisibility-matches-order",
            "chi_a(0) <= all-ones matches divisibility in H",
            !ed.mismatch(),
        )
        .expect_fail(),
    );
    let u = unique_factorisation_check(m, &f, bound, p);
    let mut c = Check::new(
        "f.unique-factorisation",
        "factorisations into atoms are unique",
        u.as_ref().map_or(Outcome::Inconclusive, |u| u.outcome),
    )
    .expect_fail();
    if let Ok(u) = &u {
        c = c.witness(list(&u.factorisations));
    }
    r.push(c);
    push_atoms_check(&ZMonoid::new(*m, p.clone()), ctx, r);
    let x = xi_section_check(m, &ExponentMap::ones(), p);
    r.push(Check::new(
        "z.xi-section",
        "Xi is a section of pi-bar on Z(Z(H))",
        x.map_or(Outcome::Inconclusive, |x| x.outcome),
    ));
}

fn integers_checks(m: &Integers, ctx: &Ctx, r: &mut SuiteReport) {
    let d = integers_dissociation(m, &ctx.params);
    let mut c = Check::new(
        "dissociation.zero-sum",
        "the integers allow dissociation of 0 = k + (-k)",
        d.0,
    )
    .expect_fail();
    if let Some(w) = d.1 {
        c = c.witness(w.to_string());
    }
    r.push(c);
}

pub fn integers_dissociation(m: &Integers, p: &NetParams) -> (Outcome, Option<DivergenceWitness>) {
    let outer = FactorStream::constant("zeros", BigInt::from(0));
    let expand = |t: &Term<BigInt>| {
        let k = BigInt::from(t.index + 1);
        FactorStream::finite(format!("[{k}, -{k}]"), vec![k.clone(), -k])
    };
    let d = check_dissociation(m, &outer, expand, &BigInt::from(0), p);
    (d.outcome, d.witness)
}

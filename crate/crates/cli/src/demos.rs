use topmon::factorisation::{
    order_ideal_check, pi_bar, topologically_prime_check, zh_net_convergence, AtomId,
    ExponentMap, ZMonoid,
};
use topmon::instances::{geometric, Fraction, Harmonic, Integers, Multiset, Rationals, SeriesRing, Sequences};
use topmon::net::{
    check_arbitrary_decimation, finite_span_contains, verify_convergence, ConvergenceStatus,
    FactorStream, Level, Outcome, SubsetRule, TopologicalMonoid,
};
use topmon::{is_irreducible, is_prime_bounded, Monoid, MonoidError, Result};

use crate::context::Ctx;
use crate::report::{list, outcome_of, Check, SuiteReport};
use crate::suites::integers_dissociation;

pub const DEMOS: [&str; 7] = [
    "qplus-decimation",
    "harmonic-closure",
    "restricted-order-ideal",
    "restricted-prime-not-topprime",
    "integers-dissociation",
    "series-almost-discrete",
    "zh-inverse-not-continuous",
];

pub fn run_demo(name: &str, ctx: &Ctx) -> Result<SuiteReport> {
    let (instance, checks) = match name {
        "qplus-decimation" => ("qplus", qplus_decimation(ctx)),
        "harmonic-closure" => ("harmonic", harmonic_closure(ctx)),
        "restricted-order-ideal" => ("restricted", restricted_order_ideal(ctx)),
        "restricted-prime-not-topprime" => ("restricted", restricted_prime(ctx)),
        "integers-dissociation" => ("integers-demo", integers(ctx)),
        "series-almost-discrete" => ("series", series(ctx)?),
        "zh-inverse-not-continuous" => ("Z(harmonic)", zh_inverse(ctx)),
        _ => {
            return Err(MonoidError::InvalidParams(format!(
                "unknown demo `{name}`; expected one of {}",
                DEMOS.join(", ")
            )))
        }
    };
    let mut r = SuiteReport::new(&format!("demo {name}"), instance, ctx.settings());
    for c in checks {
        r.push(c);
    }
    Ok(r.finish())
}

fn qplus_decimation(ctx: &Ctx) -> Vec<Check> {
    let p = &ctx.params;
    let g = geometric(Fraction::from_ratio(1, 2));
    let one = Fraction::from_ratio(1, 1);
    let full = verify_convergence(&Rationals, &g, &one, p.level, p.depth, p);
    let d = check_arbitrary_decimation(&Rationals, &g, SubsetRule::Squares, &[], p);
    let mut c = Check::new("qplus.squares-converge", "the squares-indexed sub-sum has a rational limit", d.outcome)
        .expect_fail()
        .param("qmax", p.qmax)
        .param("stream", &d.stream);
    if let Some(w) = &d.witness {
        c = c.witness(w.to_string());
    }
    vec![
        Check::from_bool("qplus.geometric", "the sum of 2^-k over k >= 1 is 1", full.is_converged())
            .param("status", full.status_name()),
        c,
    ]
}

fn harmonic_closure(ctx: &Ctx) -> Vec<Check> {
    let p = &ctx.params;
    let e = Multiset::basis;
    let k_max = p.level.0.min(63);
    let closure = (0..=k_max).all(|k| Harmonic.neighborhood_contains(&e(0), Level(k), &e(1 << k)));
    let gens: Vec<Multiset> = (1..=u64::from(p.window)).map(e).collect();
    let span = finite_span_contains(&Harmonic, &gens, &e(0), ctx.degree.max(2));
    let tail = FactorStream::from_rule("basis-from(1)", 1, e);
    let top = verify_convergence(&Harmonic, &tail, &e(0), p.level, p.depth, p);
    let mut top_check = Check::new(
        "harmonic.e0-topological-span",
        "e_0 is a convergent product of e_n (n >= 1)",
        if top.is_converged() { Outcome::Pass } else { Outcome::Fail },
    )
    .expect_fail();
    if let ConvergenceStatus::CandidateExcluded(reason) = &top.status {
        top_check = top_check.witness(reason.clone());
    }
    vec![
        Check::from_bool("harmonic.e0-in-closure", "e_{2^k} lies in U_k(e_0) for every level", closure)
            .param("levels", k_max + 1),
        Check::new(
            "harmonic.e0-in-span",
            "e_0 is a finite product of e_n (n >= 1)",
            span.map_or(Outcome::Inconclusive, |v| outcome_of(&v)),
        )
        .expect_fail(),
        top_check,
    ]
}

fn ones_minus_chi0() -> ExponentMap {
    ExponentMap::with_base(1, [(AtomId::Family(0), -1)]).expect("valid map")
}

fn restricted_order_ideal(ctx: &Ctx) -> Vec<Check> {
    let m = Sequences::restricted();
    let p = &ctx.params;
    let (upper, _) = pi_bar(&m, &ExponentMap::ones(), p);
    let d = ones_minus_chi0();
    let o = order_ideal_check(&m, &ExponentMap::ones(), &d, p);
    let mut c = Check::new(
        "restricted.order-ideal",
        "Z(H) is an order ideal",
        o.as_ref().map_or(Outcome::Inconclusive, |o| o.outcome),
    )
    .expect_fail()
    .param("lower", &d);
    if let Ok(o) = &o {
        c = c.param("membership", o.membership.verdict);
        if let Some(w) = o.membership.convergence.as_ref().and_then(|r| r.witness()) {
            c = c.witness(w.to_string());
        }
    }
    vec![
        Check::from_bool("restricted.all-ones-in-z", "the all-ones map lies in Z(H)", upper.is_in_z()),
        c,
    ]
}

fn restricted_prime(ctx: &Ctx) -> Vec<Check> {
    let m = Sequences::restricted();
    let p = &ctx.params;
    let bound = p.bound(ctx.degree.max(2));
    let f = m.f();
    let outcome = |v: Result<topmon::BoundedVerdict<_>>| v.map_or(Outcome::Inconclusive, |v| outcome_of(&v));
    let mut top = Check::new("restricted.f-topologically-prime", "f is topologically prime", Outcome::Inconclusive)
        .expect_fail();
    if let Ok(v) = topologically_prime_check(&m, &f, bound, ctx.max_factors, &[], p) {
        top = Check::new("restricted.f-topologically-prime", "f is topologically prime", outcome_of(&v))
            .expect_fail()
            .witness(format!("{}; factors {}", v.note, list(v.witness.as_deref().unwrap_or(&[]))));
    }
    vec![
        Check::new("restricted.f-irreducible", "f is irreducible", outcome(is_irreducible(&m, &f, bound))),
        Check::new("restricted.f-prime", "f is prime", outcome(is_prime_bounded(&m, &f, ctx.max_factors, bound)))
            .param("max-factors", ctx.max_factors),
        top,
    ]
}

fn integers(ctx: &Ctx) -> Vec<Check> {
    let (o, w) = integers_dissociation(&Integers, &ctx.params);
    let mut c = Check::new("integers.dissociation", "0 = k + (-k) dissociates in the integers", o).expect_fail();
    if let Some(w) = w {
        c = c.witness(w.to_string());
    }
    vec![c]
}

fn series(ctx: &Ctx) -> Result<Vec<Check>> {
    let ring = SeriesRing::new(ctx.instance.vars, ctx.instance.precision)?;
    let p = &ctx.params;
    let x0 = ring.monomial(&[1, 0]);
    let x1 = ring.parse_element("x1")?;
    let x0x1 = ring.combine(&x0, &x1);
    let alternating = {
        let (a, b) = (x0.clone(), x1.clone());
        FactorStream::from_rule("x0, x1, x0, ...", 0, move |i| if i % 2 == 0 { a.clone() } else { b.clone() })
    };
    let mut candidates = ring.window(p.bound(2));
    candidates.push(ring.identity());
    let certified: Vec<String> = candidates
        .iter()
        .filter(|c| verify_convergence(&ring, &alternating, c, p.level, p.depth, p).is_converged())
        .map(ToString::to_string)
        .collect();
    let witness = verify_convergence(&ring, &alternating, &x0, p.level, p.depth, p);
    let mut c = Check::from_bool(
        "series.infinite-not-certified",
        "an infinite product of non-units converges to no carrier element",
        certified.is_empty(),
    )
    .param("candidates", candidates.len());
    if let Some(w) = witness.witness() {
        c = c.witness(w.to_string());
    }
    let finite = FactorStream::finite("[x0, x1]", vec![x0.clone(), x1.clone()]);
    Ok(vec![
        c,
        Check::from_bool(
            "series.finite-exact",
            "finite products are certified exactly",
            verify_convergence(&ring, &finite, &x0x1, p.level, p.depth, p).is_converged(),
        ),
    ])
}

fn zh_inverse(ctx: &Ctx) -> Vec<Check> {
    let p = &ctx.params;
    let z = ZMonoid::new(Harmonic, p.clone());
    let levels = p.level.0.min(16);
    let seq: Vec<ExponentMap> = (0..=levels + 8)
        .map(|i| ExponentMap::unit(AtomId::Family(1u64 << i.min(62))))
        .collect();
    let limit = ExponentMap::unit(AtomId::Family(0));
    let n = zh_net_convergence(&z, &seq, &limit, Level(levels));
    vec![
        Check::from_bool(
            "zh.values-converge",
            "pi-bar(chi(e_{2^i})) = e_{2^i} converges to e_0 = pi-bar(chi(e_0))",
            n.values_converge,
        ),
        Check::new("zh.maps-converge", "chi(e_{2^i}) converges to chi(e_0) in Z(H)", n.outcome)
            .expect_fail()
            .witness(n.reason),
    ]
}

use std::collections::BTreeSet;

use crate::error::Result;
use crate::monoid::{BoundedVerdict, Monoid, SearchBound, Verdict};

use super::convergence::{
    detect_divergence, term_value, verify_convergence, ConvergenceReport, DivergenceWitness,
    NetParams,
};
use super::stream::{FactorStream, SubsetRule, Term};
use super::topology::TopologicalMonoid;
use super::Outcome;

/// Result of evaluating a derived product (decimation or dissociation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCheck<E> {
    pub outcome: Outcome,
    pub stream: String,
    pub limit: Option<E>,
    pub convergence: Option<ConvergenceReport>,
    pub witness: Option<DivergenceWitness>,
    pub note: String,
}

impl<E> ProductCheck<E> {
    fn new(outcome: Outcome, stream: &str) -> Self {
        ProductCheck {
            outcome,
            stream: stream.to_string(),
            limit: None,
            convergence: None,
            witness: None,
            note: String::new(),
        }
    }
}

/// Evaluates a product: exact for finite streams, refuted when a divergence
/// witness exists, otherwise certified against the first matching candidate.
pub fn evaluate_product<M: TopologicalMonoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    pool: &[M::Elem],
    params: &NetParams,
) -> ProductCheck<M::Elem> {
    let label = stream.label();
    if let Some(terms) = stream.terms() {
        let mut check = ProductCheck::new(Outcome::Pass, label);
        check.limit = Some(
            terms
                .iter()
                .fold(m.identity(), |acc, t| m.combine(&acc, &term_value(m, t))),
        );
        check.note = "finite product".into();
        return check;
    }
    if let Some(w) = detect_divergence(m, stream, params) {
        let mut check = ProductCheck::new(Outcome::Fail, label);
        check.witness = Some(w);
        return check;
    }
    let mut last = None;
    for c in pool {
        let r = verify_convergence(m, stream, c, params.level, params.depth, params);
        if r.is_converged() {
            let mut check = ProductCheck::new(Outcome::Pass, label);
            check.limit = Some(c.clone());
            check.convergence = Some(r);
            return check;
        }
        last = Some(r);
    }
    let mut check = ProductCheck::new(Outcome::Inconclusive, label);
    check.convergence = last;
    check.note = format!("no certificate among {} candidates", pool.len());
    check
}

/// Sub-product over the indices selected by `rule`.
pub fn check_arbitrary_decimation<M: TopologicalMonoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    rule: SubsetRule,
    pool: &[M::Elem],
    params: &NetParams,
) -> ProductCheck<M::Elem> {
    evaluate_product(m, &stream.select(rule), pool, params)
}

/// Sub-product with finitely many indices removed.
pub fn check_finite_decimation<M: TopologicalMonoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    removed: &BTreeSet<u64>,
    pool: &[M::Elem],
    params: &NetParams,
) -> ProductCheck<M::Elem> {
    evaluate_product(m, &stream.without(removed), pool, params)
}

/// Replaces every outer factor by its expansion and evaluates the merged
/// product against `outer_limit`.
pub fn check_dissociation<M, F>(
    m: &M,
    outer: &FactorStream<M::Elem>,
    expand: F,
    outer_limit: &M::Elem,
    params: &NetParams,
) -> ProductCheck<M::Elem>
where
    M: TopologicalMonoid + ?Sized,
    F: Fn(&Term<M::Elem>) -> FactorStream<M::Elem> + Send + Sync + 'static,
{
    let union = outer.dissociate(format!("dissociate({})", outer.label()), expand);
    let mut check = evaluate_product(m, &union, std::slice::from_ref(outer_limit), params);
    if check.outcome == Outcome::Pass && check.limit.as_ref() != Some(outer_limit) {
        check.outcome = Outcome::Fail;
        check.note = "merged product converges elsewhere".into();
    }
    check
}

/// Decides `x ∈ ⟨gens⟩` by enumerating products of at most `degree`
/// generators. With a grading the search is exact up to the grade of `x`.
pub fn finite_span_contains<M: Monoid + ?Sized>(
    m: &M,
    gens: &[M::Elem],
    x: &M::Elem,
    degree: u32,
) -> Result<BoundedVerdict<M::Elem>> {
    m.check(x)?;
    for g in gens {
        m.check(g)?;
    }
    let bound = SearchBound::new(gens.len() as u32, degree);
    if m.is_unit(x) {
        return Ok(BoundedVerdict::yes(bound).with_note("empty product"));
    }
    let gens: Vec<M::Elem> = gens.iter().filter(|g| !m.is_unit(g)).cloned().collect();
    let exact_depth = match (m.grade(x), gens.iter().all(|g| m.grade(g).is_some_and(|d| d >= 1))) {
        (Some(d), true) => Some(d),
        _ => None,
    };
    let limit = exact_depth.unwrap_or(u64::from(degree));
    let mut chosen = Vec::new();
    if let Some(w) = span_search(m, &gens, x, limit, 0, &m.identity(), &mut chosen) {
        let mut v = BoundedVerdict::yes(bound);
        v.witness = Some(w);
        return Ok(v);
    }
    if exact_depth.is_some() {
        // Every product of more than grade(x) generators has larger grade.
        let mut v = BoundedVerdict::no(bound, gens);
        v.note = "exhaustive up to the grade of the target".into();
        Ok(v)
    } else {
        Ok(BoundedVerdict::unknown(bound))
    }
}

fn span_search<M: Monoid + ?Sized>(
    m: &M,
    gens: &[M::Elem],
    x: &M::Elem,
    remaining: u64,
    start: usize,
    acc: &M::Elem,
    chosen: &mut Vec<M::Elem>,
) -> Option<Vec<M::Elem>> {
    if acc == x && !chosen.is_empty() {
        return Some(chosen.clone());
    }
    if remaining == 0 {
        return None;
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        let next = m.combine(acc, g);
        if m.grade(&next).zip(m.grade(x)).is_some_and(|(a, b)| a > b) {
            continue;
        }
        chosen.push(g.clone());
        let found = span_search(m, gens, x, remaining - 1, i, &next, chosen);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Bounded topological irreducibility: no finite split in the window and
/// no infinite test stream of factors other than `x` converging to `x`.
pub fn is_topologically_irreducible<M: TopologicalMonoid + ?Sized>(
    m: &M,
    x: &M::Elem,
    bound: SearchBound,
    params: &NetParams,
) -> Result<BoundedVerdict<M::Elem>> {
    let finite = crate::monoid::is_irreducible(m, x, bound)?;
    if finite.status == Verdict::No {
        return Ok(finite);
    }
    for (stream, limit) in m.test_streams(bound) {
        if limit != *x || stream.is_finite() {
            continue;
        }
        let prefix = stream.prefix(params.depth);
        if prefix.iter().any(|t| t.factor == *x) {
            continue;
        }
        let r = verify_convergence(m, &stream, x, params.level, params.depth, params);
        if r.is_converged() {
            let witness = prefix.into_iter().take(4).map(|t| t.factor).collect();
            return Ok(BoundedVerdict::no(bound, witness)
                .with_note(format!("converges as {}", stream.label())));
        }
    }
    Ok(finite)
}

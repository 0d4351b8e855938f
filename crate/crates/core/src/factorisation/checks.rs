use std::collections::BTreeMap;

use crate::error::{MonoidError, Result};
use crate::monoid::{is_irreducible, is_prime_bounded, BoundedVerdict, Monoid, SearchBound, Verdict};
use crate::net::{verify_convergence, FactorStream, Level, NetParams, Outcome, TopologicalMonoid};

use super::atomic::{window_atoms, Atomic};
use super::exponent_map::{AtomId, ExponentMap};
use super::zmonoid::{pi_bar, xi, ZMembershipReport, ZMonoid};

/// Largest multiplicity tried per atom when searching factorisations.
const MAX_MULTIPLICITY: u64 = 64;
/// Factorisation searches stop after this many distinct results.
const MAX_FACTORISATIONS: usize = 16;

fn require_in_z<M>(m: &M, map: &ExponentMap, params: &NetParams) -> Result<(ZMembershipReport, M::Elem)>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    match pi_bar(m, map, params) {
        (report, Some(v)) => Ok((report, v)),
        (report, None) => Err(MonoidError::NotInZ(format!("{map}: {}", report.note))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZAddReport<E> {
    pub sum: ExponentMap,
    pub membership: ZMembershipReport,
    pub value: Option<E>,
    /// `π̄(f+g) = π̄(f)·π̄(g)`.
    pub homomorphism: bool,
}

/// Componentwise sum in `Z(H)` with the homomorphism property checked.
pub fn zh_add<M>(m: &M, f: &ExponentMap, g: &ExponentMap, params: &NetParams) -> Result<ZAddReport<M::Elem>>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let (_, vf) = require_in_z(m, f, params)?;
    let (_, vg) = require_in_z(m, g, params)?;
    let sum = f.add(g);
    let (membership, value) = pi_bar(m, &sum, params);
    let homomorphism = value.as_ref() == Some(&m.combine(&vf, &vg));
    Ok(ZAddReport {
        sum,
        membership,
        value,
        homomorphism,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderIdealReport {
    pub outcome: Outcome,
    pub membership: ZMembershipReport,
}

/// Whether `d ≤ c` with `c ∈ Z(H)` forces `d ∈ Z(H)`.
pub fn order_ideal_check<M>(m: &M, c: &ExponentMap, d: &ExponentMap, params: &NetParams) -> Result<OrderIdealReport>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    if !d.le(c) {
        return Err(MonoidError::NotBelow {
            lower: d.to_string(),
            upper: c.to_string(),
        });
    }
    require_in_z(m, c, params)?;
    let (membership, _) = pi_bar(m, d, params);
    let outcome = match membership.verdict {
        super::zmonoid::ZVerdict::InZ => Outcome::Pass,
        super::zmonoid::ZVerdict::NotInZ => Outcome::Fail,
        super::zmonoid::ZVerdict::Inconclusive => Outcome::Inconclusive,
    };
    Ok(OrderIdealReport { outcome, membership })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentDivides {
    pub componentwise: bool,
    /// `divides(π̄(v), π̄(w))` when both values are known.
    pub in_monoid: Option<bool>,
}

impl ExponentDivides {
    /// The two routes disagree. Expected only on instances that are not
    /// topologically factorial.
    pub fn mismatch(&self) -> bool {
        self.in_monoid.is_some_and(|b| b != self.componentwise)
    }
}

pub fn exponent_divides<M>(m: &M, v: &ExponentMap, w: &ExponentMap, params: &NetParams) -> ExponentDivides
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let componentwise = v.le(w);
    let in_monoid = match (pi_bar(m, v, params).1, pi_bar(m, w, params).1) {
        (Some(a), Some(b)) => Some(m.divides(&a, &b).is_some()),
        _ => None,
    };
    ExponentDivides {
        componentwise,
        in_monoid,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetCheck {
    pub outcome: Outcome,
    /// `π̄(seq_i) → π̄(limit)` on the tail at every level.
    pub values_converge: bool,
    /// Every coordinate projection below the level agrees on the tail.
    pub projections_stabilise: bool,
    /// Set for discrete bases when the check passes.
    pub eventually_constant: Option<bool>,
    pub reason: String,
}

/// Convergence of a finite sample sequence in `Z(H)`: for every level
/// `k ≤ level`, the last quarter of the sequence (at least one entry) lies in
/// the level-`k` neighbourhood of `limit`.
pub fn zh_net_convergence<M>(z: &ZMonoid<M>, seq: &[ExponentMap], limit: &ExponentMap, level: Level) -> NetCheck
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let tail_start = seq.len() - (seq.len() / 4).max(1).min(seq.len());
    let tail = &seq[tail_start..];
    let limit_value = z.value(limit);
    let mut values_converge = true;
    let mut projections_stabilise = true;
    let mut reason = String::new();
    for k in 0..=level.0 {
        for g in tail {
            let value_ok = match (&limit_value, z.value(g)) {
                (Some(c), Some(v)) => z.base().neighborhood_contains(c, Level(k), &v),
                _ => false,
            };
            if !value_ok && values_converge {
                values_converge = false;
                reason = format!("value of {g} outside level {k}");
            }
            if projections_stabilise {
                if let Some(id) = projection_mismatch(z, g, limit, k) {
                    projections_stabilise = false;
                    if reason.is_empty() {
                        reason = format!("projection {id} of {g} differs from the limit at level {k}");
                    }
                }
            }
        }
    }
    let outcome = if values_converge && projections_stabilise {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    let eventually_constant = (outcome == Outcome::Pass && z.is_discrete()).then(|| tail.iter().all(|g| g == limit));
    NetCheck {
        outcome,
        values_converge,
        projections_stabilise,
        eventually_constant,
        reason,
    }
}

fn projection_mismatch<M>(z: &ZMonoid<M>, g: &ExponentMap, limit: &ExponentMap, k: u32) -> Option<AtomId>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let family = (0..u64::from(k)).map(AtomId::Family);
    let extras = (0..z.base().extra_atoms().len() as u32).map(AtomId::Extra);
    family.chain(extras).find(|id| g.get(*id) != limit.get(*id))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomsCheck {
    pub outcome: Outcome,
    pub atoms: Vec<ExponentMap>,
    /// Window maps of total at least two, each with a split.
    pub reducible: usize,
    pub failures: Vec<String>,
}

/// The atoms of `Z(H)` inside the window are exactly the unit maps `χ_a`.
pub fn zh_atoms_check<M>(z: &ZMonoid<M>, bound: SearchBound) -> Result<AtomsCheck>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let mut atoms = Vec::new();
    let mut reducible = 0;
    let mut failures = Vec::new();
    for x in z.window(bound) {
        let verdict = is_irreducible(z, &x, bound)?;
        let unit_map = x.total() == Some(1);
        match (unit_map, verdict.status) {
            (true, Verdict::Yes) => atoms.push(x),
            (false, Verdict::No) => reducible += 1,
            (_, status) => failures.push(format!("{x}: {status:?}")),
        }
    }
    let outcome = if failures.is_empty() { Outcome::Pass } else { Outcome::Fail };
    Ok(AtomsCheck {
        outcome,
        atoms,
        reducible,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorisationReport {
    pub outcome: Outcome,
    pub factorisations: Vec<ExponentMap>,
    /// `max{r : a^r | b}` per window atom.
    pub recovered: ExponentMap,
    pub note: String,
}

impl FactorisationReport {
    pub fn is_unique(&self) -> bool {
        self.factorisations.len() == 1
    }
}

/// Finite factorisations of `b` over `atoms`, together with any `extra`
/// (already verified) factorisations, compared against the max-power
/// recovery of exponents.
pub fn factorisation_report<M: Monoid + ?Sized>(
    m: &M,
    atoms: &[(AtomId, M::Elem)],
    b: &M::Elem,
    extra: Vec<ExponentMap>,
) -> Result<FactorisationReport> {
    m.check(b)?;
    let mut found = Vec::new();
    if m.is_unit(b) {
        found.push(ExponentMap::zero());
    } else {
        let mut chosen = BTreeMap::new();
        factor_search(m, atoms, b, 0, &mut chosen, &mut found);
    }
    for e in extra {
        if !found.contains(&e) {
            found.push(e);
        }
    }
    let recovered = ExponentMap::finite(atoms.iter().map(|(id, a)| (*id, max_power(m, a, b))));
    let (outcome, note) = match found.as_slice() {
        [] if atoms.is_empty() => (Outcome::Inconclusive, "atomless window".to_string()),
        [] => (Outcome::Inconclusive, "no factorisation within bounds".to_string()),
        [only] if !only.is_finite() || *only == recovered => (Outcome::Pass, "unique".to_string()),
        [_] => (Outcome::Fail, format!("exponents disagree with max-power recovery {recovered}")),
        many => (Outcome::Fail, format!("{} inequivalent factorisations", many.len())),
    };
    Ok(FactorisationReport {
        outcome,
        factorisations: found,
        recovered,
        note,
    })
}

fn max_power<M: Monoid + ?Sized>(m: &M, a: &M::Elem, b: &M::Elem) -> u64 {
    let mut r = 0;
    let mut acc = a.clone();
    while r < MAX_MULTIPLICITY && m.divides(&acc, b).is_some() {
        r += 1;
        acc = m.combine(&acc, a);
    }
    r
}

fn factor_search<M: Monoid + ?Sized>(
    m: &M,
    atoms: &[(AtomId, M::Elem)],
    rest: &M::Elem,
    start: usize,
    chosen: &mut BTreeMap<AtomId, u64>,
    found: &mut Vec<ExponentMap>,
) {
    if found.len() >= MAX_FACTORISATIONS {
        return;
    }
    if m.is_unit(rest) {
        found.push(ExponentMap::finite(chosen.iter().map(|(id, v)| (*id, *v))));
        return;
    }
    let Some((id, a)) = atoms.get(start) else {
        return;
    };
    // Try the largest power first, then fewer copies of this atom.
    let mut stack = vec![(0, rest.clone())];
    let mut power = a.clone();
    while let Some(next) = m.divides(&power, rest) {
        let r = stack.len() as u64;
        stack.push((r, next));
        if r >= MAX_MULTIPLICITY {
            break;
        }
        power = m.combine(&power, a);
    }
    for (r, next) in stack.into_iter().rev() {
        if r > 0 {
            chosen.insert(*id, r);
        }
        factor_search(m, atoms, &next, start + 1, chosen, found);
        chosen.remove(id);
    }
}

/// Factorisations of `b` over the window atoms of an atomic instance,
/// including known infinite ones that `π̄` confirms.
pub fn unique_factorisation_check<M>(
    m: &M,
    b: &M::Elem,
    bound: SearchBound,
    params: &NetParams,
) -> Result<FactorisationReport>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let atoms = window_atoms(m, bound);
    let extra = m
        .infinite_factorisations(b)
        .into_iter()
        .filter(|e| pi_bar(m, e, params).1.as_ref() == Some(b))
        .collect();
    factorisation_report(m, &atoms, b, extra)
}

/// Bounded topological primality: prime among finite products, and for
/// every certified test stream whose limit `x` divides, `x` divides one of
/// the observed factors.
pub fn topologically_prime_check<M: TopologicalMonoid + ?Sized>(
    m: &M,
    x: &M::Elem,
    bound: SearchBound,
    max_factors: usize,
    extra_streams: &[(FactorStream<M::Elem>, M::Elem)],
    params: &NetParams,
) -> Result<BoundedVerdict<M::Elem>> {
    let finite = is_prime_bounded(m, x, max_factors, bound)?;
    if finite.status == Verdict::No {
        return Ok(finite.with_note("fails on a finite product"));
    }
    let mut streams = m.test_streams(bound);
    streams.extend(extra_streams.iter().cloned());
    for (stream, limit) in &streams {
        if m.divides(x, limit).is_none() {
            continue;
        }
        let terms = stream.terms().unwrap_or_else(|| stream.prefix(params.depth));
        if !stream.is_finite() {
            let r = verify_convergence(m, stream, limit, params.level, params.depth, params);
            if !r.is_converged() {
                continue;
            }
        }
        if terms.iter().all(|t| m.divides(x, &t.factor).is_none()) {
            let witness = terms.into_iter().take(4).map(|t| t.factor).collect();
            return Ok(BoundedVerdict::no(bound, witness)
                .with_note(format!("divides the limit {limit} of {} but no factor", stream.label())));
        }
    }
    Ok(finite.with_note(format!("no counterexample among {} streams", streams.len())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiReport {
    pub outcome: Outcome,
    /// `π̄_{Z(H)}(Ξ(m)) = m`.
    pub section: bool,
    /// Sample sequences on which convergence in `Z(H)` and of the images
    /// in `Z(Z(H))` agreed, out of those tried.
    pub agreeing: usize,
    pub sampled: usize,
    pub note: String,
}

/// `Ξ` is a section of `π̄_{Z(H)}` and preserves and reflects convergence
/// on sample sequences.
pub fn xi_section_check<M>(m: &M, map: &ExponentMap, params: &NetParams) -> Result<XiReport>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    require_in_z(m, map, params)?;
    let z = ZMonoid::new(m.clone(), params.clone());
    let zz = ZMonoid::new(z.clone(), params.clone());
    let image = xi(map);
    let (report, value) = pi_bar(&z, &image, params);
    let section = report.is_in_z() && value.as_ref() == Some(map);

    let samples = sample_sequences(map);
    let mut agreeing = 0;
    for seq in &samples {
        let lhs = zh_net_convergence(&z, seq, map, params.level).outcome;
        let images: Vec<ExponentMap> = seq.iter().map(xi).collect();
        let rhs = zh_net_convergence(&zz, &images, &image, params.level).outcome;
        if lhs == rhs {
            agreeing += 1;
        }
    }
    let outcome = if section && agreeing == samples.len() {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    let note = if section {
        format!("{agreeing}/{} sample sequences agree", samples.len())
    } else {
        format!("section fails: {}", report.note)
    };
    Ok(XiReport {
        outcome,
        section,
        agreeing,
        sampled: samples.len(),
        note,
    })
}

/// Constant, truncating and alternating sequences aimed at `map`.
fn sample_sequences(map: &ExponentMap) -> Vec<Vec<ExponentMap>> {
    const LEN: u64 = 24;
    let constant = vec![map.clone(); LEN as usize];
    let truncations: Vec<ExponentMap> = (1..=LEN)
        .map(|n| {
            let mut t = truncate(map, n);
            if map.is_finite() && n == LEN {
                t = map.clone();
            }
            t
        })
        .collect();
    let alternating = (0..LEN)
        .map(|i| if i % 2 == 0 { map.clone() } else { ExponentMap::zero() })
        .collect();
    vec![constant, truncations, alternating]
}

/// The restriction of `map` to the extra atoms and the family atoms below `n`.
fn truncate(map: &ExponentMap, n: u64) -> ExponentMap {
    let mut entries: Vec<(AtomId, u64)> = (0..n).map(|i| (AtomId::Family(i), map.get(AtomId::Family(i)))).collect();
    entries.extend(
        map.delta()
            .keys()
            .filter(|id| matches!(id, AtomId::Extra(_)))
            .map(|id| (*id, map.get(*id))),
    );
    ExponentMap::finite(entries)
}

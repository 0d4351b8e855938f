use std::collections::BTreeSet;
use std::fmt;

use crate::error::{MonoidError, Result};
use crate::instances::{multisets_of_size, Multiset};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{
    detect_divergence, pair_streams, prefix_products, verify_convergence, ConvergenceReport,
    ConvergenceStatus, DivergenceWitness, FactorStream, Level, NetParams, Term, TopologicalMonoid,
};

use super::atomic::{atom, is_valid_id, window_atoms, Atomic};
use super::exponent_map::{AtomId, ExponentMap};

/// The unit coordinate map `χ_a` of an atom.
pub fn chi<M: Atomic + ?Sized>(m: &M, a: &M::Elem) -> Result<ExponentMap> {
    m.atom_id_of(a)
        .map(ExponentMap::unit)
        .ok_or_else(|| MonoidError::NotAnAtom(a.to_string()))
}

fn check_ids<M: Atomic + ?Sized>(m: &M, map: &ExponentMap) -> Result<()> {
    if let Some(id) = map.delta().keys().find(|id| !is_valid_id(m, **id)) {
        return Err(MonoidError::NotAnAtom(id.to_string()));
    }
    if map.base() > 0 && m.family_len().is_some() {
        return Err(MonoidError::InvalidParams(
            "a base value needs an infinite atom family".into(),
        ));
    }
    Ok(())
}

/// `π(m) = ∏ a^{m(a)}` for finitely supported `m`.
pub fn pi_finite<M: Atomic + ?Sized>(m: &M, map: &ExponentMap) -> Result<M::Elem> {
    check_ids(m, map)?;
    let entries = map
        .entries()
        .ok_or_else(|| MonoidError::InfiniteSupport(map.to_string()))?;
    let mut acc = m.identity();
    for (id, v) in entries {
        let a = atom(m, id).ok_or_else(|| MonoidError::NotAnAtom(id.to_string()))?;
        acc = m.combine(&acc, &m.power(&a, v));
    }
    Ok(acc)
}

/// The atom powers of `map` as a stream: extra atoms first, then the family
/// in index order, skipping zero exponents.
pub fn atom_stream<M>(m: &M, map: &ExponentMap) -> FactorStream<M::Elem>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let label = format!("atoms({map})");
    let extras: Vec<Term<M::Elem>> = map
        .delta()
        .keys()
        .filter(|id| matches!(id, AtomId::Extra(_)) && map.get(**id) > 0)
        .enumerate()
        .filter_map(|(p, id)| atom(m, *id).map(|a| Term::with_multiplicity(p as u64, a, map.get(*id))))
        .collect();
    let n_extra = extras.len() as u64;
    if let Some(entries) = map.entries() {
        let mut terms = extras;
        for (id, v) in entries {
            if let AtomId::Family(i) = id {
                terms.push(Term::with_multiplicity(n_extra + i, m.family_atom(i), v));
            }
        }
        return FactorStream::from_terms(label, terms);
    }
    let zeros: BTreeSet<u64> = map
        .delta()
        .keys()
        .filter_map(|id| match id {
            AtomId::Family(i) if map.get(*id) == 0 => Some(*i),
            _ => None,
        })
        .collect();
    let base = m.clone();
    let map = map.clone();
    FactorStream::from_term_rule(label, move |p| {
        if (p as u64) < n_extra {
            return extras[p].clone();
        }
        let mut i = p as u64 - n_extra;
        for z in &zeros {
            if *z <= i {
                i += 1;
            }
        }
        Term::with_multiplicity(n_extra + i, base.family_atom(i), map.get(AtomId::Family(i)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZVerdict {
    InZ,
    NotInZ,
    Inconclusive,
}

impl fmt::Display for ZVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZVerdict::InZ => "in-Z",
            ZVerdict::NotInZ => "not-in-Z",
            ZVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of evaluating `π̄(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZMembershipReport {
    pub verdict: ZVerdict,
    pub convergence: Option<ConvergenceReport>,
    pub witness: Option<DivergenceWitness>,
    pub note: String,
}

impl ZMembershipReport {
    fn new(verdict: ZVerdict, note: impl Into<String>) -> Self {
        ZMembershipReport {
            verdict,
            convergence: None,
            witness: None,
            note: note.into(),
        }
    }

    pub fn is_in_z(&self) -> bool {
        self.verdict == ZVerdict::InZ
    }
}

/// `π̄(m) = ∏ a^{m(a)}` when the atom-power product converges.
pub fn pi_bar<M>(m: &M, map: &ExponentMap, params: &NetParams) -> (ZMembershipReport, Option<M::Elem>)
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    if let Err(e) = check_ids(m, map) {
        return (ZMembershipReport::new(ZVerdict::NotInZ, e.to_string()), None);
    }
    let stream = atom_stream(m, map);
    if map.is_finite() {
        let value = pi_finite(m, map).ok();
        let mut report = ZMembershipReport::new(ZVerdict::InZ, "finite support");
        if let Some(v) = &value {
            report.convergence = Some(verify_convergence(m, &stream, v, params.level, params.depth, params));
        }
        return (report, value);
    }
    let Some(candidate) = m.family_limit(map) else {
        return match detect_divergence(m, &stream, params) {
            Some(w) => {
                let mut r = ZMembershipReport::new(ZVerdict::NotInZ, "atom-power product diverges");
                r.witness = Some(w);
                (r, None)
            }
            None => (ZMembershipReport::new(ZVerdict::Inconclusive, "no formal limit available"), None),
        };
    };
    let conv = verify_convergence(m, &stream, &candidate, params.level, params.depth, params);
    let mut report = match &conv.status {
        ConvergenceStatus::ConvergedAt(_) if m.contains(&candidate) => {
            ZMembershipReport::new(ZVerdict::InZ, "converges to its formal value")
        }
        ConvergenceStatus::ConvergedAt(_) => {
            ZMembershipReport::new(ZVerdict::NotInZ, "formal value lies outside the carrier")
        }
        ConvergenceStatus::DivergedWith(w) => {
            let mut r = ZMembershipReport::new(ZVerdict::NotInZ, "atom-power product diverges");
            r.witness = Some(w.clone());
            r
        }
        _ => ZMembershipReport::new(ZVerdict::Inconclusive, "no certificate within depth"),
    };
    let value = report.is_in_z().then_some(candidate);
    report.convergence = Some(conv);
    (report, value)
}

/// `Z(H)`: exponent maps over the atoms of `H` whose atom-power product
/// converges, under componentwise addition.
///
/// The topology is initial for `π̄` and the coordinate projections: a basic
/// neighbourhood at level `k` fixes the family coordinates below `k` and all
/// extra coordinates, and asks `π̄` to land in the level-`k` neighbourhood
/// in `H`.
#[derive(Debug, Clone)]
pub struct ZMonoid<M> {
    base: M,
    params: NetParams,
}

impl<M: PartialEq> PartialEq for ZMonoid<M> {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.params == other.params
    }
}

impl<M> ZMonoid<M>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    pub fn new(base: M, params: NetParams) -> Self {
        ZMonoid { base, params }
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn params(&self) -> &NetParams {
        &self.params
    }

    /// `π̄(m)`, falling back to the formal value of infinite maps.
    pub fn value(&self, map: &ExponentMap) -> Option<M::Elem> {
        if map.is_finite() {
            pi_finite(&self.base, map).ok()
        } else {
            self.base.family_limit(map)
        }
    }

    pub fn pi_bar(&self, map: &ExponentMap) -> (ZMembershipReport, Option<M::Elem>) {
        pi_bar(&self.base, map, &self.params)
    }

    fn projections_agree(&self, a: &ExponentMap, b: &ExponentMap, level: Level) -> bool {
        let ids: BTreeSet<AtomId> = a
            .exceptional_atoms()
            .union(&b.exceptional_atoms())
            .copied()
            .collect();
        let family_ok = (0..u64::from(level.0)).all(|i| a.get(AtomId::Family(i)) == b.get(AtomId::Family(i)));
        family_ok
            && ids
                .iter()
                .filter(|id| matches!(id, AtomId::Extra(_)))
                .all(|id| a.get(*id) == b.get(*id))
    }
}

impl<M> Monoid for ZMonoid<M>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    type Elem = ExponentMap;

    fn name(&self) -> String {
        format!("Z({})", self.base.name())
    }

    fn identity(&self) -> ExponentMap {
        ExponentMap::zero()
    }

    fn combine(&self, a: &ExponentMap, b: &ExponentMap) -> ExponentMap {
        a.add(b)
    }

    fn divides(&self, a: &ExponentMap, b: &ExponentMap) -> Option<ExponentMap> {
        let c = b.checked_sub(a)?;
        self.contains(&c).then_some(c)
    }

    fn contains(&self, x: &ExponentMap) -> bool {
        if check_ids(&self.base, x).is_err() {
            return false;
        }
        x.is_finite() || self.pi_bar(x).0.is_in_z()
    }

    /// Finitely supported maps over the window atoms with total
    /// `1..=degree`.
    fn window(&self, bound: SearchBound) -> Vec<ExponentMap> {
        let atoms: Vec<AtomId> = window_atoms(&self.base, bound).into_iter().map(|(id, _)| id).collect();
        let slots: Vec<u64> = (0..atoms.len() as u64).collect();
        (1..=bound.degree as usize)
            .flat_map(|d| multisets_of_size(&slots, d))
            .map(|ms: Multiset| {
                ExponentMap::finite(ms.counts().iter().map(|(s, c)| (atoms[*s as usize], *c)))
            })
            .collect()
    }

    fn in_window(&self, x: &ExponentMap, bound: SearchBound) -> bool {
        let ids: BTreeSet<AtomId> = window_atoms(&self.base, bound).into_iter().map(|(id, _)| id).collect();
        x.total().is_some_and(|t| t <= u64::from(bound.degree))
            && x.exceptional_atoms().iter().all(|id| ids.contains(id))
    }

    fn parse_element(&self, text: &str) -> Result<ExponentMap> {
        let x = ExponentMap::parse(text)?;
        check_ids(&self.base, &x)?;
        Ok(x)
    }

    fn grade(&self, x: &ExponentMap) -> Option<u64> {
        x.total()
    }
}

impl<M> TopologicalMonoid for ZMonoid<M>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    fn neighborhood_contains(&self, center: &ExponentMap, level: Level, x: &ExponentMap) -> bool {
        if center == x {
            return true;
        }
        if !self.projections_agree(center, x, level) {
            return false;
        }
        match (self.value(center), self.value(x)) {
            (Some(c), Some(v)) => self.base.neighborhood_contains(&c, level, &v),
            _ => false,
        }
    }

    fn is_discrete(&self) -> bool {
        self.base.is_discrete()
    }

    fn order_convex(&self) -> bool {
        self.base.order_convex()
    }

    fn excludes_as_limit(&self, partial: &ExponentMap, candidate: &ExponentMap) -> Option<String> {
        if !partial.le(candidate) {
            return Some(format!("partial {partial} is not below {candidate}"));
        }
        let (p, c) = (self.value(partial)?, self.value(candidate)?);
        self.base.excludes_as_limit(&p, &c)
    }

    fn divergence_witness(
        &self,
        stream: &FactorStream<ExponentMap>,
        terms: &[Term<ExponentMap>],
        partials: &[ExponentMap],
        params: &NetParams,
    ) -> Option<DivergenceWitness> {
        let n = terms.len();
        if n < 2 {
            return None;
        }
        let threshold = params.repeat_threshold_at(n) as u64;
        let (half, full) = (&partials[n / 2], &partials[n]);
        if let Some(id) = full
            .exceptional_atoms()
            .into_iter()
            .find(|id| full.get(*id) >= threshold && full.get(*id) > half.get(*id))
        {
            return Some(DivergenceWitness::Unbounded {
                measure: format!("coordinate {id}"),
                observations: [n / 4, n / 2, n]
                    .iter()
                    .map(|&k| (k, partials[k].get(id).to_string()))
                    .collect(),
            });
        }
        let me = self.clone();
        let mapped: FactorStream<M::Elem> = stream.map(format!("pi({})", stream.label()), move |x| {
            me.value(x).unwrap_or_else(|| me.base.identity())
        });
        let h_terms: Vec<Term<M::Elem>> = terms
            .iter()
            .map(|t| Term::with_multiplicity(t.index, self.value(&t.factor).unwrap_or_else(|| self.base.identity()), t.multiplicity))
            .collect();
        let h_partials = prefix_products(&self.base, &h_terms);
        self.base.divergence_witness(&mapped, &h_terms, &h_partials, params)
    }

    fn test_streams(&self, bound: SearchBound) -> Vec<(FactorStream<ExponentMap>, ExponentMap)> {
        let mut out = pair_streams(self, bound, 16);
        if self.base.family_len().is_none() {
            let ones = ExponentMap::ones();
            if self.contains(&ones) {
                let stream = FactorStream::from_rule("chi-all", 0, |i| ExponentMap::unit(AtomId::Family(i)));
                out.push((stream, ones));
            }
        }
        out
    }
}

impl<M> Atomic for ZMonoid<M>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    fn family_len(&self) -> Option<u64> {
        self.base.family_len()
    }

    fn family_atom(&self, i: u64) -> ExponentMap {
        ExponentMap::unit(AtomId::Family(i))
    }

    fn extra_atoms(&self) -> Vec<ExponentMap> {
        (0..self.base.extra_atoms().len() as u32)
            .map(|j| ExponentMap::unit(AtomId::Extra(j)))
            .collect()
    }

    fn atom_id_of(&self, x: &ExponentMap) -> Option<AtomId> {
        match x.entries()?.as_slice() {
            [(id, 1)] if is_valid_id(&self.base, *id) => Some(*id),
            _ => None,
        }
    }

    fn family_window(&self, bound: SearchBound) -> u64 {
        self.base.family_window(bound)
    }

    /// `Σ m(χ_a)·χ_a` is `m` itself.
    fn family_limit(&self, m: &ExponentMap) -> Option<ExponentMap> {
        Some(m.clone())
    }

    fn infinite_factorisations(&self, x: &ExponentMap) -> Vec<ExponentMap> {
        if x.is_finite() {
            Vec::new()
        } else {
            vec![x.clone()]
        }
    }
}

/// `Ξ`: relabels every atom `a` of `H` as the atom `χ_a` of `Z(H)`. With
/// atoms of `Z(H)` indexed like those of `H` this is the identity on
/// encodings.
pub fn xi(m: &ExponentMap) -> ExponentMap {
    m.clone()
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{MonoidError, Result};
use crate::factorisation::{AtomId, Atomic, ExponentMap};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{pair_streams, DivergenceWitness, FactorStream, Level, NetParams, Term, TopologicalMonoid};
use crate::text::Cursor;

/// A sequence `N → N` equal to a periodic pattern plus a finite correction:
/// `s(i) = pattern[i mod p] + delta(i)`.
///
/// The pattern is stored with its minimal period and the correction without
/// zeros, which makes the encoding unique.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence {
    pattern: Vec<u64>,
    delta: BTreeMap<u64, i64>,
}

fn minimal_period(pattern: &[u64]) -> Vec<u64> {
    let n = pattern.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (0..n).all(|i| pattern[i] == pattern[i % d]))
        .map_or_else(|| pattern.to_vec(), |d| pattern[..d].to_vec())
}

fn lcm(a: usize, b: usize) -> usize {
    a / num::integer::gcd(a, b) * b
}

impl Sequence {
    /// Fails when some value would be negative or the pattern is empty.
    pub fn new(pattern: Vec<u64>, delta: BTreeMap<u64, i64>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(MonoidError::InvalidParams("empty base pattern".into()));
        }
        let mut delta = delta;
        delta.retain(|_, v| *v != 0);
        let s = Sequence {
            pattern: minimal_period(&pattern),
            delta,
        };
        if let Some(i) = s.delta.keys().find(|&&i| s.value_i128(i) < 0) {
            return Err(MonoidError::InvalidParams(format!("coordinate {i} would be negative")));
        }
        Ok(s)
    }

    fn unchecked(pattern: Vec<u64>, mut delta: BTreeMap<u64, i64>) -> Self {
        delta.retain(|_, v| *v != 0);
        Sequence {
            pattern: minimal_period(&pattern),
            delta,
        }
    }

    pub fn zero() -> Self {
        Sequence::unchecked(vec![0], BTreeMap::new())
    }

    pub fn constant(b: u64) -> Self {
        Sequence::unchecked(vec![b], BTreeMap::new())
    }

    /// `χ_i`, the indicator of coordinate `i`.
    pub fn chi(i: u64) -> Self {
        Sequence::unchecked(vec![0], BTreeMap::from([(i, 1)]))
    }

    pub fn finite<I: IntoIterator<Item = (u64, u64)>>(entries: I) -> Self {
        let mut delta = BTreeMap::new();
        for (i, v) in entries {
            *delta.entry(i).or_insert(0i64) += v as i64;
        }
        Sequence::unchecked(vec![0], delta)
    }

    pub fn pattern(&self) -> &[u64] {
        &self.pattern
    }

    pub fn delta(&self) -> &BTreeMap<u64, i64> {
        &self.delta
    }

    fn value_i128(&self, i: u64) -> i128 {
        i128::from(self.pattern[(i % self.pattern.len() as u64) as usize])
            + i128::from(self.delta.get(&i).copied().unwrap_or(0))
    }

    pub fn value(&self, i: u64) -> u64 {
        u64::try_from(self.value_i128(i)).unwrap_or(0)
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.pattern == [0]
    }

    /// Largest coordinate with a nonzero value, for finitely supported
    /// sequences.
    pub fn support_max(&self) -> Option<u64> {
        if !self.is_finitely_supported() {
            return None;
        }
        self.delta.keys().next_back().copied()
    }

    pub fn total(&self) -> Option<u64> {
        self.is_finitely_supported()
            .then(|| self.delta.values().map(|v| *v as u64).sum())
    }

    /// Coordinates after which both sequences are purely periodic, plus one
    /// common period: comparing on `0..horizon` decides every coordinate.
    fn horizon(&self, other: &Self) -> u64 {
        let last = self
            .delta
            .keys()
            .chain(other.delta.keys())
            .max()
            .map_or(0, |i| i + 1);
        last + lcm(self.pattern.len(), other.pattern.len()) as u64
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i128, i128) -> i128) -> Option<Self> {
        let p = lcm(self.pattern.len(), other.pattern.len());
        let mut pattern = Vec::with_capacity(p);
        for r in 0..p {
            let v = f(
                i128::from(self.pattern[r % self.pattern.len()]),
                i128::from(other.pattern[r % other.pattern.len()]),
            );
            pattern.push(u64::try_from(v).ok()?);
        }
        let keys: BTreeSet<u64> = self.delta.keys().chain(other.delta.keys()).copied().collect();
        let mut delta = BTreeMap::new();
        for i in keys {
            let v = f(self.value_i128(i), other.value_i128(i));
            if v < 0 {
                return None;
            }
            let base = i128::from(pattern[(i % p as u64) as usize]);
            delta.insert(i, i64::try_from(v - base).ok()?);
        }
        Some(Sequence::unchecked(pattern, delta))
    }

    /// Text of the first `n` coordinates, e.g. `(0,1,1,…)`.
    pub fn prefix_text(&self, n: u64) -> String {
        let vals: Vec<String> = (0..n).map(|i| self.value(i).to_string()).collect();
        format!("({},…)", vals.join(","))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pattern.len() == 1 {
            write!(f, "base={}", self.pattern[0])?;
        } else {
            let p: Vec<String> = self.pattern.iter().map(u64::to_string).collect();
            write!(f, "base=[{}]", p.join(","))?;
        }
        if !self.delta.is_empty() {
            let parts: Vec<String> = self.delta.iter().map(|(i, v)| format!("{i}:{v:+}")).collect();
            write!(f, "; delta={{{}}}", parts.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn parse_sequence(text: &str) -> Result<Sequence> {
    let mut c = Cursor::new(text);
    if !c.eat_str("base") {
        return Err(c.error("expected `base=`"));
    }
    c.expect('=')?;
    let pattern = if c.eat('[') {
        let mut p = vec![c.unsigned()?];
        while c.eat(',') {
            p.push(c.unsigned()?);
        }
        c.expect(']')?;
        p
    } else {
        vec![c.unsigned()?]
    };
    let mut delta = BTreeMap::new();
    if c.eat(';') {
        if !c.eat_str("delta") {
            return Err(c.error("expected `delta=`"));
        }
        c.expect('=')?;
        for (i, v) in c.braced_map(|c| c.unsigned(), |c| c.signed())? {
            *delta.entry(i).or_insert(0) += v;
        }
    }
    let col = c.column();
    c.finish()?;
    Sequence::new(pattern, delta).map_err(|e| MonoidError::parse(col, e.to_string()))
}

/// `N^N` under pointwise addition with the product topology, or its
/// submonoid of sequences that are finitely supported or `≥ 1` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sequences {
    restricted: bool,
}

impl Sequences {
    pub fn pointwise() -> Self {
        Sequences { restricted: false }
    }

    pub fn restricted() -> Self {
        Sequences { restricted: true }
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    /// Membership in `N^N` or in the restricted carrier.
    fn in_carrier(&self, x: &Sequence) -> bool {
        let nonneg = x.delta.keys().all(|&i| x.value_i128(i) >= 0);
        if !nonneg || !self.restricted {
            return nonneg;
        }
        x.is_finitely_supported()
            || (x.pattern.iter().all(|&v| v >= 1) && x.delta.keys().all(|&i| x.value_i128(i) >= 1))
    }

    /// The constant-one sequence `f`.
    pub fn f(&self) -> Sequence {
        Sequence::constant(1)
    }
}

/// `∏_{i ≥ from} χ_i`.
pub fn chi_stream(from: u64) -> FactorStream<Sequence> {
    let label = if from == 0 { "chi-all".to_string() } else { format!("chi-from({from})") };
    FactorStream::from_rule(label, from, Sequence::chi)
}

impl Monoid for Sequences {
    type Elem = Sequence;

    fn name(&self) -> String {
        if self.restricted { "restricted".into() } else { "pointwise".into() }
    }

    fn identity(&self) -> Sequence {
        Sequence::zero()
    }

    fn combine(&self, a: &Sequence, b: &Sequence) -> Sequence {
        a.zip_with(b, |x, y| x + y)
            .unwrap_or_else(|| unreachable!("sum of nonnegative sequences"))
    }

    fn divides(&self, a: &Sequence, b: &Sequence) -> Option<Sequence> {
        let c = b.zip_with(a, |x, y| x - y)?;
        self.in_carrier(&c).then_some(c)
    }

    fn contains(&self, x: &Sequence) -> bool {
        !x.pattern.is_empty() && self.in_carrier(x)
    }

    /// Finitely supported sequences on coordinates `< window` with total at
    /// most `degree`; then `f` and `f + χ_i` (and `f − χ_i` pointwise).
    fn window(&self, bound: SearchBound) -> Vec<Sequence> {
        let coords: Vec<u64> = (0..u64::from(bound.window)).collect();
        let mut out: Vec<Sequence> = (1..=bound.degree as usize)
            .flat_map(|d| super::harmonic::multisets_of_size(&coords, d))
            .map(|m| Sequence::finite(m.counts().iter().map(|(i, c)| (*i, *c))))
            .collect();
        let f = self.f();
        out.push(f.clone());
        out.extend(coords.iter().map(|&i| self.combine(&f, &Sequence::chi(i))));
        if !self.restricted {
            out.extend(coords.iter().filter_map(|&i| self.divides(&Sequence::chi(i), &f)));
        }
        out
    }

    fn in_window(&self, x: &Sequence, bound: SearchBound) -> bool {
        let w = u64::from(bound.window);
        if x.is_finitely_supported() {
            return x.total().is_some_and(|t| t <= u64::from(bound.degree))
                && x.support_max().is_none_or(|i| i < w);
        }
        x.pattern == [1]
            && x.delta.len() <= 1
            && x.delta.iter().all(|(i, v)| *i < w && (*v == 1 || (*v == -1 && !self.restricted)))
    }

    fn parse_element(&self, text: &str) -> Result<Sequence> {
        let x = parse_sequence(text)?;
        self.check(&x)?;
        Ok(x)
    }
}

impl TopologicalMonoid for Sequences {
    fn neighborhood_contains(&self, center: &Sequence, level: Level, x: &Sequence) -> bool {
        (0..u64::from(level.0)).all(|i| center.value_i128(i) == x.value_i128(i))
    }

    fn order_convex(&self) -> bool {
        true
    }

    /// Coordinates only grow along extensions.
    fn excludes_as_limit(&self, partial: &Sequence, candidate: &Sequence) -> Option<String> {
        (0..partial.horizon(candidate))
            .find(|&i| partial.value_i128(i) > candidate.value_i128(i))
            .map(|i| {
                format!(
                    "coordinate {i} of partial is {} > {}",
                    partial.value(i),
                    candidate.value(i)
                )
            })
    }

    fn divergence_witness(
        &self,
        _stream: &FactorStream<Sequence>,
        terms: &[Term<Sequence>],
        partials: &[Sequence],
        params: &NetParams,
    ) -> Option<DivergenceWitness> {
        let n = terms.len();
        if n < 2 {
            return None;
        }
        let (half, full) = (&partials[n / 2], &partials[n]);
        let threshold = params.repeat_threshold_at(n) as i128;
        let watched: BTreeSet<u64> = (0..u64::from(params.window))
            .chain(full.delta.keys().copied())
            .collect();
        if let Some(&i) = watched
            .iter()
            .find(|&&i| full.value_i128(i) >= threshold && full.value_i128(i) > half.value_i128(i))
        {
            return Some(DivergenceWitness::Unbounded {
                measure: format!("coordinate {i}"),
                observations: [n / 4, n / 2, n]
                    .iter()
                    .map(|&k| (k, partials[k].value(i).to_string()))
                    .collect(),
            });
        }
        if !self.restricted {
            return None;
        }
        // Support still growing while a low coordinate stays empty: the
        // pointwise limit is neither finitely supported nor positive.
        let (Some(s_half), Some(s_full)) = (half.support_max(), full.support_max()) else {
            return None;
        };
        let w = u64::from(params.window).min(s_full);
        let hole = (0..w).find(|&i| full.value(i) == 0)?;
        (s_full > s_half).then(|| DivergenceWitness::OutsideCarrier {
            limit: full.prefix_text(u64::from(params.window)),
            reason: format!(
                "coordinate {hole} stays 0 while the support grows ({s_half} at {}, {s_full} at {n})",
                n / 2
            ),
        })
    }

    fn test_streams(&self, bound: SearchBound) -> Vec<(FactorStream<Sequence>, Sequence)> {
        let mut out = pair_streams(self, bound, 16);
        out.push((chi_stream(0), self.f()));
        if !self.restricted {
            let dip = self.divides(&Sequence::chi(0), &self.f()).unwrap_or_else(Sequence::zero);
            out.push((chi_stream(1), dip));
            let evens = FactorStream::from_rule("chi-even", 0, |k| Sequence::chi(2 * k));
            out.push((evens, Sequence::unchecked(vec![1, 0], BTreeMap::new())));
        }
        out
    }
}

impl Atomic for Sequences {
    fn family_len(&self) -> Option<u64> {
        None
    }

    fn family_atom(&self, i: u64) -> Sequence {
        Sequence::chi(i)
    }

    fn extra_atoms(&self) -> Vec<Sequence> {
        if self.restricted { vec![self.f()] } else { Vec::new() }
    }

    fn atom_id_of(&self, x: &Sequence) -> Option<AtomId> {
        if self.restricted && *x == self.f() {
            return Some(AtomId::Extra(0));
        }
        match x.delta.iter().next() {
            Some((i, 1)) if x.is_finitely_supported() && x.delta.len() == 1 => Some(AtomId::Family(*i)),
            _ => None,
        }
    }

    /// Pointwise value `Σ m(χ_i)·χ_i (+ m(f)·f)`.
    fn family_limit(&self, m: &ExponentMap) -> Option<Sequence> {
        let extra = if self.restricted { m.get(AtomId::Extra(0)) } else { 0 };
        let mut delta = BTreeMap::new();
        for (id, v) in m.delta() {
            match id {
                AtomId::Family(i) => {
                    delta.insert(*i, *v);
                }
                AtomId::Extra(0) if self.restricted => {}
                AtomId::Extra(_) => return None,
            }
        }
        Sequence::new(vec![m.base() + extra], delta).ok()
    }

    /// Constant-based sequences are the pointwise sum of their coordinates.
    fn infinite_factorisations(&self, x: &Sequence) -> Vec<ExponentMap> {
        if x.pattern.len() != 1 || x.pattern[0] == 0 {
            return Vec::new();
        }
        let delta = x.delta.iter().map(|(i, v)| (AtomId::Family(*i), *v));
        ExponentMap::with_base(x.pattern[0], delta).into_iter().collect()
    }
}

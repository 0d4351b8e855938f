use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::Result;
use crate::factorisation::{AtomId, Atomic};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{DivergenceWitness, FactorStream, Level, NetParams, Term, TopologicalMonoid};
use crate::text::Cursor;

/// A finite multiset of basis vectors `e_i`, `i ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Multiset(BTreeMap<u64, u64>);

impl Multiset {
    pub fn from_counts<I: IntoIterator<Item = (u64, u64)>>(counts: I) -> Self {
        let mut map = BTreeMap::new();
        for (i, c) in counts {
            *map.entry(i).or_default() += c;
        }
        map.retain(|_, c| *c > 0);
        Multiset(map)
    }

    pub fn basis(i: u64) -> Self {
        Multiset::from_counts([(i, 1)])
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.0
    }

    pub fn size(&self) -> u64 {
        self.0.values().sum()
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(i, c)| format!("{i}:{c}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub(crate) fn parse_multiset(text: &str) -> Result<Multiset> {
    let mut c = Cursor::new(text);
    c.expect('[')?;
    let mut counts = Vec::new();
    if !c.eat(']') {
        loop {
            let i = c.unsigned()?;
            c.expect(':')?;
            counts.push((i, c.unsigned()?));
            if c.eat(']') {
                break;
            }
            c.expect(',')?;
        }
    }
    c.finish()?;
    Ok(Multiset::from_counts(counts))
}

/// `M_0(f) = |f|` and `M_m(f) = Σ_{i≥1} f(i)·i^{-m}`; `e_0` only counts
/// towards `M_0`.
pub fn moment(f: &Multiset, m: u32) -> BigRational {
    if m == 0 {
        return BigRational::from_integer(f.size().into());
    }
    f.0.iter()
        .filter(|(i, _)| **i > 0)
        .fold(BigRational::zero(), |acc, (i, c)| {
            acc + BigRational::new(BigInt::from(*c), num::pow::pow(BigInt::from(*i), m as usize))
        })
}

/// The additive map `e_0 ↦ 0`, `e_i ↦ 1/i`.
pub fn harmonic_phi(f: &Multiset) -> BigRational {
    moment(f, 1)
}

/// Free commutative monoid on `e_0, e_1, …` with the moment topology:
/// `U_k(f)` asks `|M_m(g) − M_m(f)| ≤ 2^{-k}` for `m = 0..=k`.
///
/// `φ = M_1` is continuous and `e_n → e_0`, while the higher moments keep
/// the space Hausdorff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Harmonic;

/// Nondecreasing index tuples of length `d` over `indices`.
pub(crate) fn multisets_of_size(indices: &[u64], d: usize) -> Vec<Multiset> {
    fn go(indices: &[u64], d: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Multiset>) {
        if cur.len() == d {
            out.push(Multiset::from_counts(cur.iter().map(|i| (*i, 1))));
            return;
        }
        for s in start..indices.len() {
            cur.push(indices[s]);
            go(indices, d, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(indices, d, 0, &mut Vec::new(), &mut out);
    out
}

impl Monoid for Harmonic {
    type Elem = Multiset;

    fn name(&self) -> String {
        "harmonic".into()
    }

    fn identity(&self) -> Multiset {
        Multiset::default()
    }

    fn combine(&self, a: &Multiset, b: &Multiset) -> Multiset {
        Multiset::from_counts(a.0.iter().chain(&b.0).map(|(i, c)| (*i, *c)))
    }

    fn divides(&self, a: &Multiset, b: &Multiset) -> Option<Multiset> {
        let mut rest = b.0.clone();
        for (i, c) in &a.0 {
            let have = rest.get_mut(i)?;
            *have = have.checked_sub(*c)?;
        }
        rest.retain(|_, c| *c > 0);
        Some(Multiset(rest))
    }

    fn contains(&self, x: &Multiset) -> bool {
        x.0.values().all(|c| *c > 0)
    }

    /// Multisets over `e_0..=e_window` of size `1..=degree`.
    fn window(&self, bound: SearchBound) -> Vec<Multiset> {
        let indices: Vec<u64> = (0..=u64::from(bound.window)).collect();
        (1..=bound.degree as usize)
            .flat_map(|d| multisets_of_size(&indices, d))
            .collect()
    }

    fn in_window(&self, x: &Multiset, bound: SearchBound) -> bool {
        x.size() <= u64::from(bound.degree) && x.0.keys().all(|i| *i <= u64::from(bound.window))
    }

    fn parse_element(&self, text: &str) -> Result<Multiset> {
        parse_multiset(text)
    }

    fn grade(&self, x: &Multiset) -> Option<u64> {
        Some(x.size())
    }
}

impl TopologicalMonoid for Harmonic {
    fn neighborhood_contains(&self, center: &Multiset, level: Level, x: &Multiset) -> bool {
        if center == x {
            return true;
        }
        let radius = BigRational::new(BigInt::one(), BigInt::one() << level.0);
        (0..=level.0).all(|m| (moment(x, m) - moment(center, m)).abs() <= radius)
    }

    fn order_convex(&self) -> bool {
        true
    }

    /// Moments only grow along extensions and are continuous, so a partial
    /// product above the candidate in some moment rules it out.
    fn excludes_as_limit(&self, partial: &Multiset, candidate: &Multiset) -> Option<String> {
        (0..=2)
            .find(|&m| moment(partial, m) > moment(candidate, m))
            .map(|m| {
                format!(
                    "moment M_{m} of partial {partial} is {} > {}",
                    moment(partial, m),
                    moment(candidate, m)
                )
            })
    }

    fn divergence_witness(
        &self,
        _stream: &FactorStream<Multiset>,
        terms: &[Term<Multiset>],
        partials: &[Multiset],
        _params: &NetParams,
    ) -> Option<DivergenceWitness> {
        super::free::degree_growth(terms, partials, Multiset::size).map(|w| match w {
            DivergenceWitness::Unbounded { observations, .. } => DivergenceWitness::Unbounded {
                measure: "multiset size".into(),
                observations,
            },
            other => other,
        })
    }
}

impl Atomic for Harmonic {
    fn family_len(&self) -> Option<u64> {
        None
    }

    fn family_atom(&self, i: u64) -> Multiset {
        Multiset::basis(i)
    }

    fn atom_id_of(&self, x: &Multiset) -> Option<AtomId> {
        match x.0.iter().next() {
            Some((i, 1)) if x.0.len() == 1 => Some(AtomId::Family(*i)),
            _ => None,
        }
    }

    fn family_window(&self, bound: SearchBound) -> u64 {
        u64::from(bound.window) + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> Multiset {
        parse_multiset(s).unwrap()
    }

    #[test]
    fn phi_values() {
        assert_eq!(harmonic_phi(&ms("[0:1]")), BigRational::zero());
        assert_eq!(harmonic_phi(&ms("[7:1]")), BigRational::new(1.into(), 7.into()));
        assert_eq!(harmonic_phi(&ms("[2:1, 3:1]")), BigRational::new(5.into(), 6.into()));
    }

    #[test]
    fn basis_vectors_approach_e0() {
        let e0 = Multiset::basis(0);
        for k in 0..=12u32 {
            let n = 1u64 << k;
            assert!(Harmonic.neighborhood_contains(&e0, Level(k), &Multiset::basis(n)), "k={k}");
        }
        assert!(!Harmonic.neighborhood_contains(&e0, Level(4), &Multiset::basis(15)));
    }

    #[test]
    fn text_round_trips() {
        for s in ["[]", "[0:1, 3:2]", "[12:5]"] {
            assert_eq!(ms(s).to_string(), s);
        }
        assert!(parse_multiset("[0:1,").is_err());
    }
}

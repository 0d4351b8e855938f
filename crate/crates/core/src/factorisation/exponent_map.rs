use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{MonoidError, Result};
use crate::text::Cursor;

/// Atom label. `Family(i)` is the i-th member of the instance's indexed
/// atom family (generators, coordinate vectors, basis elements); `Extra(j)`
/// are further atoms listed after the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomId {
    Family(u64),
    Extra(u32),
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomId::Family(i) => write!(f, "a{i}"),
            AtomId::Extra(j) => write!(f, "b{j}"),
        }
    }
}

impl AtomId {
    fn parse(c: &mut Cursor<'_>) -> Result<Self> {
        if c.eat('a') {
            Ok(AtomId::Family(c.unsigned()?))
        } else if c.eat('b') {
            let col = c.column();
            let j = c.unsigned()?;
            let j = u32::try_from(j).map_err(|_| MonoidError::parse(col, "atom index too large"))?;
            Ok(AtomId::Extra(j))
        } else {
            Err(c.error("expected an atom label `a<i>` or `b<j>`"))
        }
    }
}

/// A map from atoms to `N`: every family atom gets `base` plus a finite
/// correction, extra atoms get their listed value.
///
/// `base = 0` gives the finitely supported maps; `base = 1` encodes the
/// all-ones map and its finite perturbations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExponentMap {
    base: u64,
    delta: BTreeMap<AtomId, i64>,
}

impl ExponentMap {
    pub fn zero() -> Self {
        ExponentMap::default()
    }

    /// The all-ones map over the atom family.
    pub fn ones() -> Self {
        ExponentMap {
            base: 1,
            delta: BTreeMap::new(),
        }
    }

    pub fn unit(id: AtomId) -> Self {
        ExponentMap::finite([(id, 1)])
    }

    pub fn finite<I: IntoIterator<Item = (AtomId, u64)>>(entries: I) -> Self {
        let mut delta: BTreeMap<AtomId, i64> = BTreeMap::new();
        for (id, v) in entries {
            let v = i64::try_from(v).unwrap_or(i64::MAX);
            *delta.entry(id).or_default() += v;
        }
        delta.retain(|_, v| *v != 0);
        ExponentMap { base: 0, delta }
    }

    /// Checked constructor; fails when some value would be negative.
    pub fn with_base<I: IntoIterator<Item = (AtomId, i64)>>(base: u64, delta: I) -> Result<Self> {
        let mut map: BTreeMap<AtomId, i64> = BTreeMap::new();
        for (id, v) in delta {
            *map.entry(id).or_default() += v;
        }
        map.retain(|_, v| *v != 0);
        let m = ExponentMap { base, delta: map };
        if let Some((id, _)) = m.delta.iter().find(|(id, _)| m.value_i128(**id) < 0) {
            return Err(MonoidError::InvalidParams(format!(
                "exponent of {id} would be negative"
            )));
        }
        Ok(m)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn delta(&self) -> &BTreeMap<AtomId, i64> {
        &self.delta
    }

    fn value_i128(&self, id: AtomId) -> i128 {
        let base = match id {
            AtomId::Family(_) => i128::from(self.base),
            AtomId::Extra(_) => 0,
        };
        base + i128::from(self.delta.get(&id).copied().unwrap_or(0))
    }

    pub fn get(&self, id: AtomId) -> u64 {
        u64::try_from(self.value_i128(id)).unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.base == 0
    }

    pub fn is_zero(&self) -> bool {
        self.base == 0 && self.delta.is_empty()
    }

    /// Support of a finitely supported map, with values.
    pub fn entries(&self) -> Option<Vec<(AtomId, u64)>> {
        self.is_finite()
            .then(|| self.delta.iter().map(|(id, v)| (*id, *v as u64)).collect())
    }

    /// Sum of all values of a finitely supported map.
    pub fn total(&self) -> Option<u64> {
        self.is_finite()
            .then(|| self.delta.values().map(|v| *v as u64).sum())
    }

    /// Atoms whose value differs from the base.
    pub fn exceptional_atoms(&self) -> BTreeSet<AtomId> {
        self.delta.keys().copied().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut delta = self.delta.clone();
        for (id, v) in &other.delta {
            *delta.entry(*id).or_default() += v;
        }
        delta.retain(|_, v| *v != 0);
        ExponentMap {
            base: self.base + other.base,
            delta,
        }
    }

    /// `self − other` when it stays nonnegative everywhere.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let base = self.base.checked_sub(other.base)?;
        let mut delta = self.delta.clone();
        for (id, v) in &other.delta {
            *delta.entry(*id).or_default() -= v;
        }
        ExponentMap::with_base(base, delta).ok()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        other.checked_sub(self).is_some()
    }

    pub fn scale(&self, r: u64) -> Self {
        let r_signed = i64::try_from(r).unwrap_or(i64::MAX);
        let mut delta: BTreeMap<AtomId, i64> =
            self.delta.iter().map(|(id, v)| (*id, v * r_signed)).collect();
        delta.retain(|_, v| *v != 0);
        ExponentMap {
            base: self.base * r,
            delta,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Cursor::new(text);
        let m = if c.eat_str("base") {
            c.expect('=')?;
            let base = if c.eat_str("ones") { 1 } else { c.unsigned()? };
            let mut delta = Vec::new();
            if c.eat(';') {
                if !c.eat_str("delta") {
                    return Err(c.error("expected `delta`"));
                }
                c.expect('=')?;
                delta = c.braced_map(AtomId::parse, |c| c.signed())?;
            }
            ExponentMap::with_base(base, delta).map_err(|e| c.error(e.to_string()))?
        } else {
            let entries = c.braced_map(AtomId::parse, |c| c.unsigned())?;
            ExponentMap::finite(entries)
        };
        c.finish()?;
        Ok(m)
    }
}

impl fmt::Display for ExponentMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base == 0 {
            let parts: Vec<String> = self.delta.iter().map(|(id, v)| format!("{id}:{v}")).collect();
            return write!(f, "{{{}}}", parts.join(", "));
        }
        if self.base == 1 {
            f.write_str("base=ones")?;
        } else {
            write!(f, "base={}", self.base)?;
        }
        if !self.delta.is_empty() {
            let parts: Vec<String> = self.delta.iter().map(|(id, v)| format!("{id}:{v:+}")).collect();
            write!(f, "; delta={{{}}}", parts.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trips() {
        for s in ["{}", "{a1:2, a3:1}", "base=ones", "base=ones; delta={a0:-1, b0:+2}", "base=3"] {
            let m = ExponentMap::parse(s).unwrap();
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn negative_values_are_rejected() {
        assert!(ExponentMap::parse("base=ones; delta={a0:-2}").is_err());
        assert!(ExponentMap::parse("base=ones; delta={b0:-1}").is_err());
    }

    #[test]
    fn order_compares_bases_and_corrections() {
        let ones = ExponentMap::ones();
        let dip = ExponentMap::parse("base=ones; delta={a0:-1}").unwrap();
        let chi0 = ExponentMap::unit(AtomId::Family(0));
        assert!(dip.le(&ones));
        assert!(!ones.le(&dip));
        assert!(chi0.le(&ones));
        assert_eq!(ones.checked_sub(&chi0), Some(dip));
        assert!(!ones.le(&ExponentMap::finite([(AtomId::Family(0), 5)])));
    }
}

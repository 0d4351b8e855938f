//! The concrete monoids: free commutative, nonnegative rationals, the
//! harmonic example, power series, sequences, and the integers demo.

mod free;
mod harmonic;
mod integers;
mod rational;
mod sequence;
mod series;

use std::fmt;
use std::str::FromStr;

pub use free::{monomials, FreeMonoid, Monomial};
pub use harmonic::{harmonic_phi, moment, Harmonic, Multiset};
pub(crate) use harmonic::multisets_of_size;
pub use integers::Integers;
pub use rational::{denominator_sweep, geometric, Fraction, Rationals};
pub use sequence::{chi_stream, Sequence, Sequences};
pub use series::{series_valuation, Series, SeriesRing, Valuation};

use crate::error::{MonoidError, Result};
use crate::monoid::{is_irreducible, Monoid, SearchBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InstanceKind {
    Free,
    Qplus,
    Harmonic,
    Series,
    Pointwise,
    Restricted,
    IntegersDemo,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::Free,
        InstanceKind::Qplus,
        InstanceKind::Harmonic,
        InstanceKind::Series,
        InstanceKind::Pointwise,
        InstanceKind::Restricted,
        InstanceKind::IntegersDemo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Free => "free",
            InstanceKind::Qplus => "qplus",
            InstanceKind::Harmonic => "harmonic",
            InstanceKind::Series => "series",
            InstanceKind::Pointwise => "pointwise",
            InstanceKind::Restricted => "restricted",
            InstanceKind::IntegersDemo => "integers-demo",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = MonoidError;

    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| MonoidError::InvalidParams(format!("unknown instance kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceParams {
    pub gens: u32,
    pub vars: u32,
    pub precision: u32,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            gens: 4,
            vars: 2,
            precision: 8,
        }
    }
}

/// Any instance, for callers that pick the kind at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyInstance {
    Free(FreeMonoid),
    Qplus(Rationals),
    Harmonic(Harmonic),
    Series(SeriesRing),
    Sequences(Sequences),
    Integers(Integers),
}

pub fn make_instance(kind: InstanceKind, params: InstanceParams) -> Result<AnyInstance> {
    Ok(match kind {
        InstanceKind::Free => AnyInstance::Free(FreeMonoid::new(params.gens)?),
        InstanceKind::Qplus => AnyInstance::Qplus(Rationals),
        InstanceKind::Harmonic => AnyInstance::Harmonic(Harmonic),
        InstanceKind::Series => AnyInstance::Series(SeriesRing::new(params.vars, params.precision)?),
        InstanceKind::Pointwise => AnyInstance::Sequences(Sequences::pointwise()),
        InstanceKind::Restricted => AnyInstance::Sequences(Sequences::restricted()),
        InstanceKind::IntegersDemo => AnyInstance::Integers(Integers),
    })
}

/// Window elements certified irreducible, in window order.
pub fn enumerate_atoms<M: Monoid + ?Sized>(m: &M, bound: SearchBound) -> Result<Vec<M::Elem>> {
    let mut atoms = Vec::new();
    for x in m.window(bound) {
        if m.is_unit(&x) {
            continue;
        }
        if is_irreducible(m, &x, bound)?.is_yes() {
            atoms.push(x);
        }
    }
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for k in InstanceKind::ALL {
            assert_eq!(k.as_str().parse::<InstanceKind>().unwrap(), k);
        }
        assert!("reals".parse::<InstanceKind>().is_err());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = InstanceParams { precision: 0, ..InstanceParams::default() };
        assert!(make_instance(InstanceKind::Series, p).is_err());
        let p = InstanceParams { gens: 0, ..InstanceParams::default() };
        assert!(make_instance(InstanceKind::Free, p).is_err());
    }

    #[test]
    fn atoms_of_small_windows() {
        let f = FreeMonoid::new(2).unwrap();
        let atoms = enumerate_atoms(&f, SearchBound::new(12, 3)).unwrap();
        assert_eq!(atoms, vec![Monomial::generator(0), Monomial::generator(1)]);
        let h = enumerate_atoms(&Harmonic, SearchBound::new(4, 2)).unwrap();
        assert_eq!(h, (0..=4).map(Multiset::basis).collect::<Vec<_>>());
        assert!(enumerate_atoms(&Rationals, SearchBound::new(6, 1)).unwrap().is_empty());
    }
}

use std::fmt;

use crate::monoid::{Monoid, SearchBound};

use super::convergence::{DivergenceWitness, NetParams};
use super::stream::{FactorStream, Term};

/// Index `k` of the decreasing neighbourhood basis `U_k(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Level(pub u32);

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A Hausdorff commutative monoid with a countable decreasing neighbourhood
/// basis at every point, plus the instance-specific refutation strategies
/// used when a product fails to converge.
pub trait TopologicalMonoid: Monoid {
    /// Decides `x ∈ U_k(center)`.
    fn neighborhood_contains(&self, center: &Self::Elem, level: Level, x: &Self::Elem) -> bool;

    fn is_discrete(&self) -> bool {
        false
    }

    /// True when every basic neighbourhood is convex for divisibility
    /// (`a | b | c` with `a, c ∈ U` forces `b ∈ U`). Net checks then only
    /// need the two extreme partial products.
    fn order_convex(&self) -> bool {
        false
    }

    /// Reason why no product having `partial` as a partial product can
    /// converge to `candidate`, when the instance can prove it.
    fn excludes_as_limit(&self, _partial: &Self::Elem, _candidate: &Self::Elem) -> Option<String> {
        None
    }

    /// Instance-specific refutation of convergence from an observed prefix.
    /// `partials[m]` is the product of the first `m` terms.
    fn divergence_witness(
        &self,
        _stream: &FactorStream<Self::Elem>,
        _terms: &[Term<Self::Elem>],
        _partials: &[Self::Elem],
        _params: &NetParams,
    ) -> Option<DivergenceWitness> {
        None
    }

    /// Streams with their intended limits, used by bounded searches that
    /// quantify over convergent products.
    fn test_streams(&self, bound: SearchBound) -> Vec<(FactorStream<Self::Elem>, Self::Elem)> {
        pair_streams(self, bound, 24)
    }

    /// Least level at which `y` leaves `U_k(x)`.
    fn separation_level(&self, x: &Self::Elem, y: &Self::Elem, max_level: u32) -> Option<Level> {
        (0..=max_level)
            .map(Level)
            .find(|&k| !self.neighborhood_contains(x, k, y))
    }
}

/// Two-factor finite streams over the first `limit` window elements.
pub fn pair_streams<M: Monoid + ?Sized>(
    m: &M,
    bound: SearchBound,
    limit: usize,
) -> Vec<(FactorStream<M::Elem>, M::Elem)> {
    let elems: Vec<M::Elem> = m.window(bound).into_iter().take(limit).collect();
    let mut out = Vec::new();
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[i..] {
            let limit = m.combine(a, b);
            out.push((
                FactorStream::finite(format!("[{a}, {b}]"), vec![a.clone(), b.clone()]),
                limit,
            ));
        }
    }
    out
}

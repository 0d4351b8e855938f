use crate::monoid::SearchBound;
use crate::net::TopologicalMonoid;

use super::exponent_map::{AtomId, ExponentMap};

/// An instance whose atoms come as an indexed family plus finitely many
/// extra atoms, in a fixed order.
pub trait Atomic: TopologicalMonoid {
    /// `None` for an infinite family.
    fn family_len(&self) -> Option<u64>;

    /// The i-th family atom; only called with `i < family_len`.
    fn family_atom(&self, i: u64) -> Self::Elem;

    fn extra_atoms(&self) -> Vec<Self::Elem> {
        Vec::new()
    }

    fn atom_id_of(&self, x: &Self::Elem) -> Option<AtomId>;

    /// Number of family atoms observed through `bound`.
    fn family_window(&self, bound: SearchBound) -> u64 {
        let w = u64::from(bound.window);
        self.family_len().map_or(w, |n| n.min(w))
    }

    /// The formal value of a map with infinite support (e.g. a pointwise
    /// sum), when the instance can name it. Membership in the carrier and
    /// convergence are not implied.
    fn family_limit(&self, _m: &ExponentMap) -> Option<Self::Elem> {
        None
    }

    /// Known factorisations of `x` with infinite support.
    fn infinite_factorisations(&self, _x: &Self::Elem) -> Vec<ExponentMap> {
        Vec::new()
    }
}

pub fn atom<M: Atomic + ?Sized>(m: &M, id: AtomId) -> Option<M::Elem> {
    match id {
        AtomId::Family(i) => m
            .family_len()
            .is_none_or(|n| i < n)
            .then(|| m.family_atom(i)),
        AtomId::Extra(j) => m.extra_atoms().get(j as usize).cloned(),
    }
}

pub fn is_valid_id<M: Atomic + ?Sized>(m: &M, id: AtomId) -> bool {
    match id {
        AtomId::Family(i) => m.family_len().is_none_or(|n| i < n),
        AtomId::Extra(j) => (j as usize) < m.extra_atoms().len(),
    }
}

/// Family atoms inside the window in index order, then the extra atoms.
pub fn window_atoms<M: Atomic + ?Sized>(m: &M, bound: SearchBound) -> Vec<(AtomId, M::Elem)> {
    let mut out: Vec<(AtomId, M::Elem)> = (0..m.family_window(bound))
        .map(|i| (AtomId::Family(i), m.family_atom(i)))
        .collect();
    out.extend(
        m.extra_atoms()
            .into_iter()
            .enumerate()
            .map(|(j, a)| (AtomId::Extra(j as u32), a)),
    );
    out
}

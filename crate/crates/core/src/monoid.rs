//! Commutative monoids with divisibility and bounded searches for
//! irreducibility and primality.
//!
//! Every instance is assumed abelian, cancellative and reduced (the only unit
//! is the identity); the integers demo is the single flagged exception.
//! Elements are immutable canonical values, so equality is structural.

use std::fmt;
use std::hash::Hash;

use crate::error::{MonoidError, Result};

/// Finite search window: `window` bounds generator/coordinate indices,
/// `degree` bounds exponent totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBound {
    pub window: u32,
    pub degree: u32,
}

impl SearchBound {
    pub const fn new(window: u32, degree: u32) -> Self {
        SearchBound { window, degree }
    }
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound {
            window: 12,
            degree: 2,
        }
    }
}

impl fmt::Display for SearchBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "window={} degree={}", self.window, self.degree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Outcome of a bounded decision procedure.
///
/// `No` always carries a witness that can be re-checked by direct
/// multiplication; `Unknown` means the bound ran out before a decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedVerdict<E> {
    pub status: Verdict,
    pub witness: Option<Vec<E>>,
    pub bound: SearchBound,
    pub note: String,
}

impl<E> BoundedVerdict<E> {
    pub fn yes(bound: SearchBound) -> Self {
        BoundedVerdict {
            status: Verdict::Yes,
            witness: None,
            bound,
            note: String::new(),
        }
    }

    pub fn no(bound: SearchBound, witness: Vec<E>) -> Self {
        BoundedVerdict {
            status: Verdict::No,
            witness: Some(witness),
            bound,
            note: String::new(),
        }
    }

    pub fn unknown(bound: SearchBound) -> Self {
        BoundedVerdict {
            status: Verdict::Unknown,
            witness: None,
            bound,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn is_yes(&self) -> bool {
        self.status == Verdict::Yes
    }

    pub fn is_no(&self) -> bool {
        self.status == Verdict::No
    }
}

/// An abelian cancellative monoid with canonical element encoding.
pub trait Monoid {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static;

    /// Short instance label used in reports, e.g. `free(n=4)`.
    fn name(&self) -> String;

    fn identity(&self) -> Self::Elem;

    /// The monoid operation on canonical values of this instance.
    fn combine(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// The unique `c` with `a·c = b`, if it exists in the carrier.
    fn divides(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    /// Carrier membership (and compatibility with the instance parameters).
    fn contains(&self, x: &Self::Elem) -> bool;

    /// Deterministically ordered non-unit elements inside `bound`.
    fn window(&self, bound: SearchBound) -> Vec<Self::Elem>;

    /// Whether `x` lies inside the window, i.e. whether window searches
    /// about `x` are exhaustive.
    fn in_window(&self, x: &Self::Elem, bound: SearchBound) -> bool;

    fn parse_element(&self, text: &str) -> Result<Self::Elem>;

    fn is_unit(&self, x: &Self::Elem) -> bool {
        *x == self.identity()
    }

    fn is_reduced(&self) -> bool {
        true
    }

    /// A grading with every non-unit of grade at least one, when the
    /// instance has one. Bounded searches below a graded element are exact.
    fn grade(&self, _x: &Self::Elem) -> Option<u64> {
        None
    }

    /// A decomposition `x = a·b` the instance knows without searching,
    /// for divisors the window cannot reach.
    fn candidate_split(&self, _x: &Self::Elem) -> Option<(Self::Elem, Self::Elem)> {
        None
    }

    fn power(&self, x: &Self::Elem, n: u64) -> Self::Elem {
        let mut result = self.identity();
        let mut base = x.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = self.combine(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.combine(&base, &base);
            }
        }
        result
    }

    /// `combine` with both arguments checked against this instance.
    fn try_combine(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.combine(a, b))
    }

    /// `divides` with both arguments checked against this instance.
    fn try_divides(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Option<Self::Elem>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.divides(a, b))
    }

    fn check(&self, x: &Self::Elem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(MonoidError::ForeignElement {
                element: x.to_string(),
                instance: self.name(),
            })
        }
    }

    fn product<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
    {
        items
            .into_iter()
            .fold(self.identity(), |acc, x| self.combine(&acc, x))
    }
}

/// Searches all splits `x = a·b` with `a`, `b` non-units drawn from the
/// window. In a reduced cancellative monoid any longer decomposition groups
/// into a two-factor one, so two factors suffice.
pub fn is_irreducible<M: Monoid + ?Sized>(
    m: &M,
    x: &M::Elem,
    bound: SearchBound,
) -> Result<BoundedVerdict<M::Elem>> {
    m.check(x)?;
    if m.is_unit(x) {
        return Err(MonoidError::UnitInput);
    }
    if let Some((a, b)) = m.candidate_split(x) {
        if !m.is_unit(&a) && !m.is_unit(&b) && m.combine(&a, &b) == *x {
            return Ok(BoundedVerdict::no(bound, vec![a, b]));
        }
    }
    for a in m.window(bound) {
        if m.is_unit(&a) || a == *x {
            continue;
        }
        if let Some(c) = m.divides(&a, x) {
            if !m.is_unit(&c) {
                return Ok(BoundedVerdict::no(bound, vec![a, c]));
            }
        }
    }
    if m.in_window(x, bound) {
        Ok(BoundedVerdict::yes(bound))
    } else {
        Ok(BoundedVerdict::unknown(bound).with_note("element lies outside the search window"))
    }
}

/// Looks for a product `a₁⋯a_r` (`2 ≤ r ≤ max_factors`, factors from the
/// window) divisible by `x` while no factor is.
pub fn is_prime_bounded<M: Monoid + ?Sized>(
    m: &M,
    x: &M::Elem,
    max_factors: usize,
    bound: SearchBound,
) -> Result<BoundedVerdict<M::Elem>> {
    m.check(x)?;
    if m.is_unit(x) {
        return Err(MonoidError::UnitInput);
    }
    // Factors divisible by x can never appear in a witness.
    let pool: Vec<M::Elem> = m
        .window(bound)
        .into_iter()
        .filter(|a| !m.is_unit(a) && m.divides(x, a).is_none())
        .collect();
    let mut chosen = Vec::with_capacity(max_factors);
    for r in 2..=max_factors {
        if let Some(w) = prime_search(m, x, &pool, r, 0, &m.identity(), &mut chosen) {
            return Ok(BoundedVerdict::no(bound, w));
        }
    }
    Ok(BoundedVerdict::yes(bound))
}

fn prime_search<M: Monoid + ?Sized>(
    m: &M,
    x: &M::Elem,
    pool: &[M::Elem],
    remaining: usize,
    start: usize,
    acc: &M::Elem,
    chosen: &mut Vec<usize>,
) -> Option<Vec<M::Elem>> {
    if remaining == 0 {
        return m
            .divides(x, acc)
            .map(|_| chosen.iter().map(|&i| pool[i].clone()).collect());
    }
    for i in start..pool.len() {
        let next = m.combine(acc, &pool[i]);
        chosen.push(i);
        let found = prime_search(m, x, pool, remaining - 1, i, &next, chosen);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Re-checks a primality witness: `x` divides the product but no factor.
pub fn is_prime_witness<M: Monoid + ?Sized>(m: &M, x: &M::Elem, factors: &[M::Elem]) -> bool {
    let product = m.product(factors);
    m.divides(x, &product).is_some() && factors.iter().all(|a| m.divides(x, a).is_none())
}

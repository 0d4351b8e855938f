use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{MonoidError, Result};

/// One indexed factor of a (possibly infinite) product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term<E> {
    pub index: u64,
    pub factor: E,
    pub multiplicity: u64,
}

impl<E> Term<E> {
    pub fn new(index: u64, factor: E) -> Self {
        Term {
            index,
            factor,
            multiplicity: 1,
        }
    }

    pub fn with_multiplicity(index: u64, factor: E, multiplicity: u64) -> Self {
        Term {
            index,
            factor,
            multiplicity,
        }
    }
}

type PrefixFn<E> = dyn Fn(usize) -> Vec<Term<E>> + Send + Sync;
type TailFn<E> = dyn Fn(usize) -> Option<E> + Send + Sync;

/// Upper limit on how far a selection scans its parent for the next term.
const SCAN_CAP: usize = 1 << 20;

/// A countable, deterministically enumerated family of factors.
///
/// Streams are immutable; every combinator builds a new stream that shares
/// the enumeration rule of its parent. An optional tail bound gives, for
/// each position `n`, an element bounding the product of all terms at
/// positions `≥ n` (meaningful for order-monotone instances only).
#[derive(Clone)]
pub struct FactorStream<E> {
    label: String,
    len: Option<usize>,
    prefix: Arc<PrefixFn<E>>,
    tail_bound: Option<Arc<TailFn<E>>>,
}

impl<E: fmt::Debug> fmt::Debug for FactorStream<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactorStream")
            .field("label", &self.label)
            .field("len", &self.len)
            .finish_non_exhaustive()
    }
}

impl<E> fmt::Display for FactorStream<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl<E: Clone + Send + Sync + 'static> FactorStream<E> {
    /// Finite stream with indices `0..factors.len()` and unit multiplicities.
    pub fn finite(label: impl Into<String>, factors: Vec<E>) -> Self {
        let terms = factors
            .into_iter()
            .enumerate()
            .map(|(i, f)| Term::new(i as u64, f))
            .collect();
        Self::from_terms(label, terms)
    }

    pub fn from_terms(label: impl Into<String>, terms: Vec<Term<E>>) -> Self {
        let len = terms.len();
        let terms = Arc::new(terms);
        FactorStream {
            label: label.into(),
            len: Some(len),
            prefix: Arc::new(move |n| terms.iter().take(n).cloned().collect()),
            tail_bound: None,
        }
    }

    /// Infinite stream whose `p`-th term has index `start + p` and factor
    /// `rule(start + p)`.
    pub fn from_rule<F>(label: impl Into<String>, start: u64, rule: F) -> Self
    where
        F: Fn(u64) -> E + Send + Sync + 'static,
    {
        Self::from_term_rule(label, move |p| {
            let index = start + p as u64;
            Term::new(index, rule(index))
        })
    }

    /// Infinite stream given position by position.
    pub fn from_term_rule<F>(label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(usize) -> Term<E> + Send + Sync + 'static,
    {
        FactorStream {
            label: label.into(),
            len: None,
            prefix: Arc::new(move |n| (0..n).map(&rule).collect()),
            tail_bound: None,
        }
    }

    pub fn constant(label: impl Into<String>, x: E) -> Self {
        Self::from_rule(label, 0, move |_| x.clone())
    }

    pub fn with_tail_bound<F>(mut self, bound: F) -> Self
    where
        F: Fn(usize) -> Option<E> + Send + Sync + 'static,
    {
        self.tail_bound = Some(Arc::new(bound));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Some(n)` for finite streams, `None` for infinite ones.
    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    pub fn is_finite(&self) -> bool {
        self.len.is_some()
    }

    /// The first `n` terms (fewer if the stream is shorter).
    pub fn prefix(&self, n: usize) -> Vec<Term<E>> {
        let n = self.len.map_or(n, |len| n.min(len));
        (self.prefix)(n)
    }

    /// All terms of a finite stream.
    pub fn terms(&self) -> Option<Vec<Term<E>>> {
        self.len.map(|len| (self.prefix)(len))
    }

    /// Bound on the product of all terms at positions `≥ n`, when known.
    pub fn tail_bound(&self, n: usize) -> Option<E> {
        self.tail_bound.as_ref().and_then(|t| t(n))
    }

    pub fn has_tail_bound(&self) -> bool {
        self.tail_bound.is_some()
    }

    /// The sub-stream of terms whose index satisfies `rule`.
    pub fn select(&self, rule: SubsetRule) -> Self {
        let label = format!("{}|{}", self.label, rule);
        if let Some(len) = self.len {
            let terms: Vec<Term<E>> = (self.prefix)(len)
                .into_iter()
                .filter(|t| rule.contains(t.index))
                .collect();
            return Self::from_terms(label, terms);
        }
        if let SubsetRule::Only(ref indices) = rule {
            let terms = scan_selected(&self.prefix, &rule, indices.len());
            return Self::from_terms(label, terms);
        }
        let parent = self.prefix.clone();
        let rule = Arc::new(rule);
        let prefix_rule = rule.clone();
        let prefix: Arc<PrefixFn<E>> =
            Arc::new(move |n| scan_selected(&parent, &prefix_rule, n));
        let tail_bound = self.tail_bound.clone().map(|tail| {
            let parent = self.prefix.clone();
            let rule = rule.clone();
            let f: Arc<TailFn<E>> = Arc::new(move |n| {
                // The selected tail from position n sits inside the parent
                // tail that starts at the parent position of the n-th pick.
                let pos = parent_position(&parent, &rule, n)?;
                tail(pos)
            });
            f
        });
        FactorStream {
            label,
            len: None,
            prefix,
            tail_bound,
        }
    }

    /// The cofinite sub-stream obtained by dropping the given indices.
    pub fn without(&self, removed: &BTreeSet<u64>) -> Self {
        self.select(SubsetRule::Without(removed.clone()))
    }

    /// Applies `f` to every factor; the tail bound is not carried over.
    pub fn map<G, F>(&self, label: impl Into<String>, f: F) -> FactorStream<G>
    where
        G: Clone + Send + Sync + 'static,
        F: Fn(&E) -> G + Send + Sync + 'static,
    {
        let parent = self.prefix.clone();
        FactorStream {
            label: label.into(),
            len: self.len,
            prefix: Arc::new(move |n| {
                parent(n)
                    .into_iter()
                    .map(|t| Term::with_multiplicity(t.index, f(&t.factor), t.multiplicity))
                    .collect()
            }),
            tail_bound: None,
        }
    }

    /// The disjoint union of the expansions of every outer term, enumerated
    /// diagonally over (outer position, inner position). Union indices are
    /// the Cantor pairing of outer and inner index.
    pub fn dissociate<F>(&self, label: impl Into<String>, expand: F) -> Self
    where
        F: Fn(&Term<E>) -> FactorStream<E> + Send + Sync + 'static,
    {
        let expand = Arc::new(expand);
        let len = self.len.and_then(|outer_len| {
            (self.prefix)(outer_len)
                .iter()
                .map(|t| expand(t).len())
                .sum::<Option<usize>>()
        });
        let outer = self.clone();
        FactorStream {
            label: label.into(),
            len,
            prefix: Arc::new(move |n| diagonal_prefix(&outer, expand.as_ref(), n, len)),
            tail_bound: None,
        }
    }
}

fn scan_selected<E>(parent: &Arc<PrefixFn<E>>, rule: &SubsetRule, n: usize) -> Vec<Term<E>> {
    if n == 0 {
        return Vec::new();
    }
    let mut k = (n * 2).max(16);
    loop {
        let mut picked: Vec<Term<E>> = parent(k)
            .into_iter()
            .filter(|t| rule.contains(t.index))
            .collect();
        if picked.len() >= n || k >= SCAN_CAP {
            picked.truncate(n);
            return picked;
        }
        k *= 2;
    }
}

fn parent_position<E>(parent: &Arc<PrefixFn<E>>, rule: &SubsetRule, n: usize) -> Option<usize> {
    let mut k = (n * 2).max(16);
    loop {
        let terms = parent(k);
        let mut seen = 0;
        for (pos, t) in terms.iter().enumerate() {
            if rule.contains(t.index) {
                if seen == n {
                    return Some(pos);
                }
                seen += 1;
            }
        }
        if k >= SCAN_CAP {
            return None;
        }
        k *= 2;
    }
}

fn diagonal_prefix<E, F>(
    outer: &FactorStream<E>,
    expand: &F,
    n: usize,
    total: Option<usize>,
) -> Vec<Term<E>>
where
    E: Clone + Send + Sync + 'static,
    F: Fn(&Term<E>) -> FactorStream<E>,
{
    let want = total.map_or(n, |t| n.min(t));
    if want == 0 {
        return Vec::new();
    }
    // Fetch a square of outer and inner positions; enlarge it when short
    // or empty rows leave the first diagonals thin.
    let mut fetch = want;
    loop {
        let rows: Vec<(u64, Vec<Term<E>>)> = outer
            .prefix(fetch)
            .iter()
            .map(|t| (t.index, expand(t).prefix(fetch)))
            .collect();
        let mut out = Vec::with_capacity(want);
        'diagonals: for s in 0..fetch {
            for (p, (outer_index, row)) in rows.iter().enumerate().take(s + 1) {
                if let Some(t) = row.get(s - p) {
                    out.push(Term::with_multiplicity(
                        cantor_pair(*outer_index, t.index),
                        t.factor.clone(),
                        t.multiplicity,
                    ));
                    if out.len() == want {
                        break 'diagonals;
                    }
                }
            }
        }
        if out.len() == want || fetch >= SCAN_CAP {
            return out;
        }
        fetch *= 2;
    }
}

/// Cantor pairing, saturating at `u64::MAX`.
pub fn cantor_pair(a: u64, b: u64) -> u64 {
    let s = a.saturating_add(b);
    s.saturating_mul(s.saturating_add(1)) / 2 + b
}

/// Index selection rules for decimation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetRule {
    All,
    Only(BTreeSet<u64>),
    Without(BTreeSet<u64>),
    Periodic { modulus: u64, residues: BTreeSet<u64> },
    Squares,
    From(u64),
}

impl SubsetRule {
    pub fn contains(&self, index: u64) -> bool {
        match self {
            SubsetRule::All => true,
            SubsetRule::Only(s) => s.contains(&index),
            SubsetRule::Without(s) => !s.contains(&index),
            SubsetRule::Periodic { modulus, residues } => residues.contains(&(index % modulus)),
            SubsetRule::Squares => {
                let r = index.isqrt();
                r * r == index
            }
            SubsetRule::From(k) => index >= *k,
        }
    }
}

impl fmt::Display for SubsetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(s: &BTreeSet<u64>) -> String {
            s.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            SubsetRule::All => f.write_str("all"),
            SubsetRule::Only(s) => write!(f, "only({})", list(s)),
            SubsetRule::Without(s) => write!(f, "without({})", list(s)),
            SubsetRule::Periodic { modulus, residues } => {
                write!(f, "mod{}({})", modulus, list(residues))
            }
            SubsetRule::Squares => f.write_str("squares"),
            SubsetRule::From(k) => write!(f, "from({k})"),
        }
    }
}

impl std::str::FromStr for SubsetRule {
    type Err = MonoidError;

    /// Parses the `Display` form, e.g. `squares`, `from(3)`, `mod2(0)`,
    /// `without(1,3)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || MonoidError::parse(1, format!("unknown subset rule `{s}`"));
        let set = |body: &str| -> Result<BTreeSet<u64>> {
            body.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
                .collect()
        };
        match s {
            "all" => return Ok(SubsetRule::All),
            "squares" => return Ok(SubsetRule::Squares),
            _ => {}
        }
        let (head, body) = s
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .ok_or_else(bad)?;
        match head {
            "only" => Ok(SubsetRule::Only(set(body)?)),
            "without" => Ok(SubsetRule::Without(set(body)?)),
            "from" => Ok(SubsetRule::From(body.trim().parse().map_err(|_| bad())?)),
            _ => {
                let modulus: u64 = head.strip_prefix("mod").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if modulus == 0 {
                    return Err(bad());
                }
                Ok(SubsetRule::Periodic { modulus, residues: set(body)? })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_stream_enumerates_deterministically() {
        let s = FactorStream::from_rule("n", 1, |k| k * 10);
        let a: Vec<u64> = s.prefix(4).into_iter().map(|t| t.factor).collect();
        let b: Vec<u64> = s.prefix(4).into_iter().map(|t| t.factor).collect();
        assert_eq!(a, vec![10, 20, 30, 40]);
        assert_eq!(a, b);
        assert!(!s.is_finite());
    }

    #[test]
    fn squares_selection_reads_parent_indices() {
        let s = FactorStream::from_rule("n", 1, |k| k).select(SubsetRule::Squares);
        let idx: Vec<u64> = s.prefix(5).into_iter().map(|t| t.index).collect();
        assert_eq!(idx, vec![1, 4, 9, 16, 25]);
    }

    #[test]
    fn only_rule_on_infinite_parent_is_finite() {
        let s = FactorStream::from_rule("n", 0, |k| k)
            .select(SubsetRule::Only([2, 5, 7].into_iter().collect()));
        assert_eq!(s.len(), Some(3));
        let f: Vec<u64> = s.terms().unwrap().into_iter().map(|t| t.factor).collect();
        assert_eq!(f, vec![2, 5, 7]);
    }

    #[test]
    fn selection_tail_bound_follows_parent_position() {
        let s = FactorStream::from_rule("n", 1, |k| k)
            .with_tail_bound(|n| Some(n as u64 * 100))
            .select(SubsetRule::Squares);
        // Third pick is index 9, at parent position 8.
        assert_eq!(s.tail_bound(2), Some(800));
    }

    #[test]
    fn dissociation_of_finite_streams_is_finite() {
        let outer = FactorStream::finite("o", vec![2u64, 3]);
        let u = outer.dissociate("u", |t| FactorStream::finite("row", vec![t.factor; t.factor as usize]));
        assert_eq!(u.len(), Some(5));
        let mut f: Vec<u64> = u.terms().unwrap().into_iter().map(|t| t.factor).collect();
        f.sort();
        assert_eq!(f, vec![2, 2, 3, 3, 3]);
    }

    #[test]
    fn dissociation_diagonal_reaches_every_row() {
        let outer = FactorStream::from_rule("o", 0, |i| i);
        let u = outer.dissociate("u", |t| {
            let i = t.factor;
            FactorStream::from_rule("row", 0, move |j| i * 100 + j)
        });
        let f: Vec<u64> = u.prefix(6).into_iter().map(|t| t.factor).collect();
        assert_eq!(f, vec![0, 1, 100, 2, 101, 200]);
    }

    #[test]
    fn subset_rules_parse_their_display_form() {
        for text in ["all", "squares", "from(3)", "mod2(0)", "mod3(1,2)", "only(2,5)", "without(1,3)"] {
            let rule: SubsetRule = text.parse().unwrap();
            assert_eq!(rule.to_string(), text);
        }
        assert!("mod0(1)".parse::<SubsetRule>().is_err());
        assert!("evens".parse::<SubsetRule>().is_err());
    }

    #[test]
    fn cantor_pair_is_injective_on_small_grid() {
        let mut seen = BTreeSet::new();
        for a in 0..30 {
            for b in 0..30 {
                assert!(seen.insert(cantor_pair(a, b)));
            }
        }
    }
}

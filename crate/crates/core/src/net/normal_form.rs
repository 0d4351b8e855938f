use std::collections::BTreeMap;
use std::fmt;

use crate::error::{MonoidError, Result};
use crate::monoid::Monoid;

use super::convergence::{term_value, NetParams};
use super::stream::{FactorStream, Term};

/// Distinct factors with their multiplicities, in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm<E> {
    pub entries: Vec<(E, u64)>,
    /// Number of stream terms read.
    pub depth: usize,
}

impl<E: Clone + Ord> NormalForm<E> {
    pub fn multiplicity(&self, x: &E) -> u64 {
        self.entries
            .iter()
            .find(|(e, _)| e == x)
            .map_or(0, |(_, c)| *c)
    }

    pub fn as_map(&self) -> BTreeMap<E, u64> {
        self.entries.iter().cloned().collect()
    }
}

impl<E: fmt::Display> fmt::Display for NormalForm<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(e, c)| format!("{e}:{c}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn group<E: Clone + Ord>(terms: &[Term<E>]) -> Vec<(Term<E>, u64)> {
    let mut slot: BTreeMap<E, usize> = BTreeMap::new();
    let mut out: Vec<(Term<E>, u64)> = Vec::new();
    for t in terms {
        match slot.get(&t.factor) {
            Some(&i) => out[i].1 += t.multiplicity,
            None => {
                slot.insert(t.factor.clone(), out.len());
                out.push((t.clone(), t.multiplicity));
            }
        }
    }
    out
}

/// Counts `m(h) = #{j : f_j = h}` over the stream (or its first
/// `params.depth` terms when infinite).
///
/// On an infinite stream a factor reaching the repetition threshold is an
/// error: in a convergent product no non-unit occurs infinitely often.
pub fn multiset_normal_form<M: Monoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    params: &NetParams,
) -> Result<NormalForm<M::Elem>> {
    let terms = match stream.terms() {
        Some(t) => t,
        None => stream.prefix(params.depth),
    };
    let grouped = group(&terms);
    if !stream.is_finite() {
        let threshold = params.repeat_threshold_at(terms.len()) as u64;
        let heavy = grouped
            .iter()
            .filter(|(t, _)| !m.is_unit(&t.factor))
            .find(|(_, c)| *c >= threshold || *c >= params.multiplicity_cap);
        if let Some((t, c)) = heavy {
            return Err(MonoidError::InfiniteMultiplicity {
                factor: t.factor.to_string(),
                count: *c,
                depth: terms.len(),
            });
        }
    }
    Ok(NormalForm {
        entries: grouped.into_iter().map(|(t, c)| (t.factor, c)).collect(),
        depth: terms.len(),
    })
}

/// The stream `∏ h^{m(h)}` over distinct factors. Each term keeps the index
/// of the first occurrence of its factor.
pub fn normal_form_stream<E>(stream: &FactorStream<E>) -> FactorStream<E>
where
    E: Clone + Ord + Send + Sync + 'static,
{
    let label = format!("nf({})", stream.label());
    if let Some(terms) = stream.terms() {
        let grouped = group(&terms)
            .into_iter()
            .map(|(t, c)| Term::with_multiplicity(t.index, t.factor, c))
            .collect();
        return FactorStream::from_terms(label, grouped);
    }
    let parent = stream.clone();
    FactorStream::from_term_rule(label, move |p| {
        let mut fetch = (p + 1) * 2;
        loop {
            let grouped = group(&parent.prefix(fetch));
            if let Some((t, c)) = grouped.get(p) {
                return Term::with_multiplicity(t.index, t.factor.clone(), *c);
            }
            fetch *= 2;
        }
    })
}

/// Product of a normal form, `∏ h^{m(h)}`.
pub fn eval_normal_form<M: Monoid + ?Sized>(m: &M, nf: &NormalForm<M::Elem>) -> M::Elem {
    nf.entries.iter().fold(m.identity(), |acc, (e, c)| {
        m.combine(&acc, &term_value(m, &Term::with_multiplicity(0, e.clone(), *c)))
    })
}

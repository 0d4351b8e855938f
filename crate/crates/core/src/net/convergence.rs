use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MonoidError, Result};
use crate::monoid::{Monoid, SearchBound};

use super::stream::{FactorStream, Term};
use super::topology::{Level, TopologicalMonoid};

/// Bounds and seeds shared by all net checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetParams {
    pub depth: usize,
    pub level: Level,
    pub seed: u64,
    /// Random supersets drawn per certificate.
    pub samples: usize,
    /// Denominator bound for rational exclusion sweeps.
    pub qmax: u64,
    pub max_exclusion_level: u32,
    /// Occurrences of one factor within the depth that count as repetition.
    /// `None` means `ceil(depth / 2)`, at least 2.
    pub repeat_threshold: Option<usize>,
    pub multiplicity_cap: u64,
    pub window: u32,
}

impl Default for NetParams {
    fn default() -> Self {
        NetParams {
            depth: 32,
            level: Level(10),
            seed: 0,
            samples: 200,
            qmax: 1_000_000,
            max_exclusion_level: 40,
            repeat_threshold: None,
            multiplicity_cap: 10_000,
            window: 12,
        }
    }
}

impl NetParams {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = Level(level);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn repeat_threshold_at(&self, depth: usize) -> usize {
        self.repeat_threshold.unwrap_or(depth.div_ceil(2)).max(2)
    }

    pub fn bound(&self, degree: u32) -> SearchBound {
        SearchBound::new(self.window, degree)
    }
}

/// How the "every finite superset" clause of a certificate was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckPath {
    /// Finite stream compared in full.
    Exact,
    /// Endpoint check on an order-convex basis, cross-checked by sampling.
    Monotone,
    /// Seeded random supersets only.
    Sampled,
}

impl fmt::Display for CheckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckPath::Exact => "exact",
            CheckPath::Monotone => "monotone",
            CheckPath::Sampled => "sampled",
        })
    }
}

/// Every finite `T` with `core ⊆ T ⊆ (first depth indices)` has its
/// partial product in `U_level(candidate)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub core: BTreeSet<u64>,
    pub level: Level,
    pub depth: usize,
    pub path: CheckPath,
    pub samples: usize,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "core={} level={} depth={} path={} samples={}",
            format_indices(&self.core),
            self.level,
            self.depth,
            self.path,
            self.samples
        )
    }
}

/// Compact index set text: runs of consecutive indices collapse to `a..b`.
pub fn format_indices(set: &BTreeSet<u64>) -> String {
    let mut parts = Vec::new();
    let mut iter = set.iter().copied().peekable();
    while let Some(start) = iter.next() {
        let mut end = start;
        while iter.peek() == Some(&(end + 1)) {
            end = iter.next().unwrap_or(end);
        }
        if end > start {
            parts.push(format!("{start}..{end}"));
        } else {
            parts.push(start.to_string());
        }
    }
    format!("{{{}}}", parts.join(","))
}

/// A re-checkable reason why a stream has no limit in the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivergenceWitness {
    RepeatedFactor {
        factor: String,
        occurrences: u64,
        depth: usize,
    },
    /// A monotone measure observed growing along the prefix.
    Unbounded {
        measure: String,
        observations: Vec<(usize, String)>,
    },
    /// Partial products whose valuation keeps increasing.
    ValuationEscape { valuations: Vec<u64> },
    /// The only possible limit lies outside the carrier.
    OutsideCarrier { limit: String, reason: String },
    /// Every `p/q` with `q ≤ qmax` is excluded at some level `≤ max_level`;
    /// `tightest` needed level `tightest_level`.
    DenominatorExclusion {
        qmax: u64,
        max_level: u32,
        tightest: String,
        tightest_level: u32,
        depth: usize,
    },
}

impl fmt::Display for DivergenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceWitness::RepeatedFactor {
                factor,
                occurrences,
                depth,
            } => write!(f, "factor {factor} repeats {occurrences} times within depth {depth}"),
            DivergenceWitness::Unbounded {
                measure,
                observations,
            } => {
                let obs: Vec<String> = observations
                    .iter()
                    .map(|(n, v)| format!("{n}:{v}"))
                    .collect();
                write!(f, "{measure} unbounded [{}]", obs.join(", "))
            }
            DivergenceWitness::ValuationEscape { valuations } => {
                let v: Vec<String> = valuations.iter().map(u64::to_string).collect();
                write!(f, "valuation escapes [{}]", v.join(", "))
            }
            DivergenceWitness::OutsideCarrier { limit, reason } => {
                write!(f, "pointwise limit {limit} outside carrier: {reason}")
            }
            DivergenceWitness::DenominatorExclusion {
                qmax,
                max_level,
                tightest,
                tightest_level,
                depth,
            } => write!(
                f,
                "no p/q with q<={qmax} is a limit (all excluded by level {max_level}; \
                 tightest {tightest} at level {tightest_level}; depth {depth})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvergenceStatus {
    ConvergedAt(Certificate),
    DivergedWith(DivergenceWitness),
    /// The stream may converge, but provably not to this candidate.
    CandidateExcluded(String),
    Inconclusive { depth: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    pub candidate: String,
    pub level: Level,
    pub depth: usize,
    pub note: String,
}

impl ConvergenceReport {
    pub fn is_converged(&self) -> bool {
        matches!(self.status, ConvergenceStatus::ConvergedAt(_))
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self.status, ConvergenceStatus::DivergedWith(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.status {
            ConvergenceStatus::ConvergedAt(c) => Some(c),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&DivergenceWitness> {
        match &self.status {
            ConvergenceStatus::DivergedWith(w) => Some(w),
            _ => None,
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            ConvergenceStatus::ConvergedAt(_) => "converged",
            ConvergenceStatus::DivergedWith(_) => "diverged",
            ConvergenceStatus::CandidateExcluded(_) => "excluded",
            ConvergenceStatus::Inconclusive { .. } => "inconclusive",
        }
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            ConvergenceStatus::ConvergedAt(c) => {
                write!(f, "ConvergedAt({}) candidate={}", c, self.candidate)
            }
            ConvergenceStatus::DivergedWith(w) => write!(f, "DivergedWith({w})"),
            ConvergenceStatus::CandidateExcluded(r) => {
                write!(f, "CandidateExcluded({}) candidate={}", r, self.candidate)
            }
            ConvergenceStatus::Inconclusive { depth } => {
                write!(f, "Inconclusive(depth={depth}) candidate={}", self.candidate)
            }
        }?;
        if !self.note.is_empty() {
            write!(f, " note=\"{}\"", self.note)?;
        }
        Ok(())
    }
}

/// `factor^multiplicity` of one term.
pub fn term_value<M: Monoid + ?Sized>(m: &M, t: &Term<M::Elem>) -> M::Elem {
    m.power(&t.factor, t.multiplicity)
}

/// `partials[n]` is the product of the first `n` terms.
pub fn prefix_products<M: Monoid + ?Sized>(m: &M, terms: &[Term<M::Elem>]) -> Vec<M::Elem> {
    let mut out = Vec::with_capacity(terms.len() + 1);
    let mut acc = m.identity();
    out.push(acc.clone());
    for t in terms {
        acc = m.combine(&acc, &term_value(m, t));
        out.push(acc.clone());
    }
    out
}

/// Product over the terms whose indices lie in `subset`.
pub fn eval_partial<M: Monoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    subset: &BTreeSet<u64>,
) -> Result<M::Elem> {
    if subset.is_empty() {
        return Ok(m.identity());
    }
    let mut fetch = subset.len().max(16);
    loop {
        let terms = stream.prefix(fetch);
        let found: Vec<&Term<M::Elem>> =
            terms.iter().filter(|t| subset.contains(&t.index)).collect();
        if found.len() == subset.len() {
            return Ok(found
                .into_iter()
                .fold(m.identity(), |acc, t| m.combine(&acc, &term_value(m, t))));
        }
        let exhausted = stream.len().is_some_and(|len| fetch >= len) || fetch >= 1 << 20;
        if exhausted {
            let seen: BTreeSet<u64> = terms.iter().map(|t| t.index).collect();
            let missing = subset.iter().find(|i| !seen.contains(i)).copied();
            return Err(MonoidError::UnknownIndex(missing.unwrap_or_default()));
        }
        fetch *= 2;
    }
}

/// Looks for a refutation of convergence within the first `params.depth`
/// terms. Finite streams always converge.
pub fn detect_divergence<M: TopologicalMonoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    params: &NetParams,
) -> Option<DivergenceWitness> {
    if stream.is_finite() {
        return None;
    }
    let terms = stream.prefix(params.depth);
    let partials = prefix_products(m, &terms);
    divergence_from_prefix(m, stream, &terms, &partials, params)
}

fn divergence_from_prefix<M: TopologicalMonoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    terms: &[Term<M::Elem>],
    partials: &[M::Elem],
    params: &NetParams,
) -> Option<DivergenceWitness> {
    if let Some(w) = m.divergence_witness(stream, terms, partials, params) {
        return Some(w);
    }
    repeated_factor(m, terms, params)
}

/// A non-unit factor cannot occur infinitely often in a convergent product;
/// heavy repetition inside the prefix is taken as evidence of that.
pub fn repeated_factor<M: Monoid + ?Sized>(
    m: &M,
    terms: &[Term<M::Elem>],
    params: &NetParams,
) -> Option<DivergenceWitness> {
    let mut counts: BTreeMap<&M::Elem, u64> = BTreeMap::new();
    for t in terms.iter().filter(|t| !m.is_unit(&t.factor)) {
        *counts.entry(&t.factor).or_default() += t.multiplicity;
    }
    let threshold = params.repeat_threshold_at(terms.len()) as u64;
    let (factor, occurrences) = counts.into_iter().max_by_key(|&(_, c)| c)?;
    let capped = terms.iter().any(|t| t.multiplicity >= params.multiplicity_cap);
    (occurrences >= threshold || capped).then(|| DivergenceWitness::RepeatedFactor {
        factor: factor.to_string(),
        occurrences,
        depth: terms.len(),
    })
}

/// Bounded check of `∏ stream = candidate` at `level` within `depth` terms.
///
/// Refutations are tried before certificates, so a stream that provably
/// has no limit is never certified against any candidate.
pub fn verify_convergence<M: TopologicalMonoid + ?Sized>(
    m: &M,
    stream: &FactorStream<M::Elem>,
    candidate: &M::Elem,
    level: Level,
    depth: usize,
    params: &NetParams,
) -> ConvergenceReport {
    let report = |status, note: &str| ConvergenceReport {
        status,
        candidate: candidate.to_string(),
        level,
        depth,
        note: note.to_string(),
    };

    if let Some(terms) = stream.terms() {
        let total = m.product(terms.iter().map(|t| term_value(m, t)).collect::<Vec<_>>().iter());
        if total == *candidate {
            let core = terms.iter().map(|t| t.index).collect();
            let cert = Certificate {
                core,
                level,
                depth: terms.len(),
                path: CheckPath::Exact,
                samples: 0,
            };
            return report(ConvergenceStatus::ConvergedAt(cert), "");
        }
        let reason = m
            .excludes_as_limit(&total, candidate)
            .map_or_else(|| format!("finite product is {total}"), |r| format!("finite product is {total}; {r}"));
        return report(ConvergenceStatus::CandidateExcluded(reason), "");
    }
    if depth == 0 {
        return report(ConvergenceStatus::Inconclusive { depth }, "depth 0");
    }

    let terms = stream.prefix(depth);
    let partials = prefix_products(m, &terms);
    let full = &partials[terms.len()];
    if let Some(reason) = m.excludes_as_limit(full, candidate) {
        return report(ConvergenceStatus::CandidateExcluded(reason), "");
    }
    if let Some(w) = divergence_from_prefix(m, stream, &terms, &partials, params) {
        return report(ConvergenceStatus::DivergedWith(w), "");
    }
    if !m.neighborhood_contains(candidate, level, full) {
        return report(
            ConvergenceStatus::Inconclusive { depth },
            "partial product at depth lies outside the neighbourhood",
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ (u64::from(level.0) << 32) ^ depth as u64);
    for core_len in 0..=terms.len() {
        if !m.neighborhood_contains(candidate, level, &partials[core_len]) {
            continue;
        }
        let sampled = sample_supersets(m, &terms, core_len, candidate, level, params.samples, &mut rng);
        let path = if m.order_convex() {
            if !sampled {
                return report(
                    ConvergenceStatus::Inconclusive { depth },
                    "sampled superset left a convex neighbourhood",
                );
            }
            CheckPath::Monotone
        } else if sampled {
            CheckPath::Sampled
        } else {
            continue;
        };
        let cert = Certificate {
            core: terms[..core_len].iter().map(|t| t.index).collect(),
            level,
            depth,
            path,
            samples: params.samples,
        };
        return report(ConvergenceStatus::ConvergedAt(cert), "");
    }
    report(ConvergenceStatus::Inconclusive { depth }, "no core found")
}

/// Draws random `T` with the first `core_len` positions fixed and the rest
/// of the prefix each included with probability one half.
fn sample_supersets<M: TopologicalMonoid + ?Sized>(
    m: &M,
    terms: &[Term<M::Elem>],
    core_len: usize,
    candidate: &M::Elem,
    level: Level,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> bool {
    let values: Vec<M::Elem> = terms.iter().map(|t| term_value(m, t)).collect();
    let core = m.product(values[..core_len].iter());
    (0..samples).all(|_| {
        let mut acc = core.clone();
        for v in &values[core_len..] {
            if rng.gen_bool(0.5) {
                acc = m.combine(&acc, v);
            }
        }
        m.neighborhood_contains(candidate, level, &acc)
    })
}

/// Divergence of `(x^n)`: the constant stream must be refuted, and every
/// window candidate must miss some power in `(n_max/2, n_max]`.
pub fn powers_diverge<M: TopologicalMonoid + ?Sized>(
    m: &M,
    x: &M::Elem,
    n_max: usize,
    level: Level,
    params: &NetParams,
) -> Result<bool> {
    m.check(x)?;
    if m.is_unit(x) {
        return Err(MonoidError::UnitInput);
    }
    let stream = FactorStream::constant(format!("({x})^n"), x.clone());
    let refuted = detect_divergence(m, &stream, &params.clone().with_depth(n_max)).is_some();
    let powers: Vec<M::Elem> = (n_max / 2 + 1..=n_max).map(|n| m.power(x, n as u64)).collect();
    let mut candidates = m.window(params.bound(2));
    candidates.push(m.identity());
    let escapes = candidates
        .iter()
        .all(|c| powers.iter().any(|p| !m.neighborhood_contains(c, level, p)));
    Ok(refuted && escapes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_runs_are_compact() {
        let s: BTreeSet<u64> = [1, 2, 3, 5, 7, 8].into_iter().collect();
        assert_eq!(format_indices(&s), "{1..3,5,7..8}");
        assert_eq!(format_indices(&BTreeSet::new()), "{}");
    }

    #[test]
    fn repeat_threshold_defaults_to_half_depth() {
        let p = NetParams::default();
        assert_eq!(p.repeat_threshold_at(32), 16);
        assert_eq!(p.repeat_threshold_at(3), 2);
        assert_eq!(p.repeat_threshold_at(1), 2);
    }
}

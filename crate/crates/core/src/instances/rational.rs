use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{MonoidError, Result};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{
    repeated_factor, DivergenceWitness, FactorStream, Level, NetParams, Term, TopologicalMonoid,
};
use crate::text::Cursor;

/// A nonnegative rational in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(BigRational);

impl Fraction {
    pub fn new(value: BigRational) -> Option<Self> {
        (!value.is_negative()).then_some(Fraction(value))
    }

    pub fn from_ratio(p: u64, q: u64) -> Self {
        assert!(q != 0, "zero denominator");
        Fraction(BigRational::new(p.into(), q.into()))
    }

    pub fn zero() -> Self {
        Fraction(BigRational::zero())
    }

    /// `2^{-k}`.
    pub fn dyadic(k: u32) -> Self {
        Fraction(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub(crate) fn parse_fraction(text: &str) -> Result<Fraction> {
    let mut c = Cursor::new(text);
    let col = c.column();
    let p: BigInt = c.digit_str()?.parse().map_err(|_| MonoidError::parse(col, "bad numerator"))?;
    let q: BigInt = if c.eat('/') {
        let col = c.column();
        let q: BigInt = c.digit_str()?.parse().map_err(|_| MonoidError::parse(col, "bad denominator"))?;
        if q.is_zero() {
            return Err(MonoidError::parse(col, "zero denominator"));
        }
        q
    } else {
        BigInt::one()
    };
    c.finish()?;
    Ok(Fraction(BigRational::new(p, q)))
}

/// `(Q_{≥0}, +)` with the open dyadic balls `|x − c| < 2^{-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Monoid for Rationals {
    type Elem = Fraction;

    fn name(&self) -> String {
        "qplus".into()
    }

    fn identity(&self) -> Fraction {
        Fraction::zero()
    }

    fn combine(&self, a: &Fraction, b: &Fraction) -> Fraction {
        Fraction(&a.0 + &b.0)
    }

    fn divides(&self, a: &Fraction, b: &Fraction) -> Option<Fraction> {
        Fraction::new(&b.0 - &a.0)
    }

    fn contains(&self, x: &Fraction) -> bool {
        !x.0.is_negative()
    }

    /// `p/q` with `q ≤ window` and `0 < p/q ≤ degree`, by denominator then
    /// numerator.
    fn window(&self, bound: SearchBound) -> Vec<Fraction> {
        let mut out = Vec::new();
        for q in 1..=u64::from(bound.window.max(1)) {
            for p in 1..=q * u64::from(bound.degree) {
                if num::integer::gcd(p, q) == 1 {
                    out.push(Fraction::from_ratio(p, q));
                }
            }
        }
        out
    }

    fn in_window(&self, x: &Fraction, bound: SearchBound) -> bool {
        x.0.denom() <= &BigInt::from(bound.window)
            && x.0 <= BigRational::from_integer(bound.degree.into())
    }

    fn parse_element(&self, text: &str) -> Result<Fraction> {
        parse_fraction(text)
    }

    /// `x = x/2 + x/2`: the monoid is divisible, so nothing is an atom.
    fn candidate_split(&self, x: &Fraction) -> Option<(Fraction, Fraction)> {
        let half = Fraction(&x.0 / BigRational::from_integer(2.into()));
        Some((half.clone(), half))
    }

    fn power(&self, x: &Fraction, n: u64) -> Fraction {
        Fraction(&x.0 * BigRational::from_integer(n.into()))
    }
}

impl TopologicalMonoid for Rationals {
    fn neighborhood_contains(&self, center: &Fraction, level: Level, x: &Fraction) -> bool {
        (&x.0 - &center.0).abs() < Fraction::dyadic(level.0).0
    }

    fn order_convex(&self) -> bool {
        true
    }

    fn excludes_as_limit(&self, partial: &Fraction, candidate: &Fraction) -> Option<String> {
        (partial > candidate).then(|| format!("partial sum {partial} exceeds {candidate}"))
    }

    fn divergence_witness(
        &self,
        stream: &FactorStream<Fraction>,
        terms: &[Term<Fraction>],
        partials: &[Fraction],
        params: &NetParams,
    ) -> Option<DivergenceWitness> {
        if let Some(DivergenceWitness::RepeatedFactor { factor, occurrences, depth }) =
            repeated_factor(self, terms, params)
        {
            let n = terms.len();
            let observations = [n / 4, n / 2, n]
                .iter()
                .map(|&i| (i, partials[i].to_string()))
                .collect();
            return Some(DivergenceWitness::Unbounded {
                measure: format!("partial sums ({factor} repeats {occurrences} times in {depth})"),
                observations,
            });
        }
        let tail = stream.tail_bound(terms.len())?;
        denominator_sweep(&partials[terms.len()], &tail, terms.len(), params)
    }

    fn test_streams(&self, bound: SearchBound) -> Vec<(FactorStream<Fraction>, Fraction)> {
        let mut out = crate::net::pair_streams(self, bound, 16);
        out.push((geometric(Fraction::from_ratio(1, 2)), Fraction::from_ratio(1, 1)));
        out
    }
}

/// Terms `r^k` for `k ≥ 1`, with exact tail bounds `r^{n+1}/(1−r)`.
pub fn geometric(ratio: Fraction) -> FactorStream<Fraction> {
    assert!(
        ratio.0 < BigRational::one() && ratio.0.is_positive(),
        "ratio must lie in (0, 1)"
    );
    let r = ratio.0.clone();
    let tail_r = r.clone();
    FactorStream::from_rule(format!("geometric({ratio})"), 1, move |k| {
        Fraction(num::pow::pow(r.clone(), k as usize))
    })
    .with_tail_bound(move |n| {
        let one = BigRational::one();
        Some(Fraction(num::pow::pow(tail_r.clone(), n + 1) / (one - &tail_r)))
    })
}

/// Fixed-point precision of the sweep, in bits.
const SWEEP_BITS: u32 = 100;

/// Tries to exclude every `p/q` with `q ≤ qmax` as a limit.
///
/// All partial sums over index sets containing the first `depth` terms lie
/// in `[S, S + tail]`, so `c` is excluded at level `k` once
/// `c ≤ S − 2^{-k}` or `c ≥ S + tail + 2^{-k}`. Both tests run in 100-bit
/// fixed point, rounded against exclusion.
pub fn denominator_sweep(
    sum: &Fraction,
    tail: &Fraction,
    depth: usize,
    params: &NetParams,
) -> Option<DivergenceWitness> {
    let scale = BigInt::one() << SWEEP_BITS;
    let scaled = &sum.0 * BigRational::from_integer(scale.clone());
    let a = scaled.floor().to_integer().to_u128()?;
    let t = (&tail.0 * BigRational::from_integer(scale)).ceil().to_integer();
    let tail_fp = if t.sign() == Sign::Minus { 0 } else { t.to_u128()? };
    // Keeps q·(a + 1 + tail) below 2^128.
    if a >> (SWEEP_BITS + 2) != 0 || tail_fp >> (SWEEP_BITS + 2) != 0 || params.qmax >> 24 != 0 {
        return None;
    }
    let max_level = params.max_exclusion_level.min(SWEEP_BITS);
    let hi = a + 1 + tail_fp;
    let mut tightest = (0u32, 0u64, 1u64);
    for q in 1..=params.qmax {
        let q128 = u128::from(q);
        let p_lo = (q128 * a) >> SWEEP_BITS;
        let mut p = p_lo.saturating_sub(1);
        loop {
            let level = exclusion_level(p, q128, a, hi, max_level)?;
            if level > tightest.0 {
                tightest = (level, p as u64, q);
            }
            // Past the upper edge every larger numerator is excluded sooner.
            if (p << SWEEP_BITS) >= q128 * hi {
                break;
            }
            p += 1;
        }
    }
    let (level, p, q) = tightest;
    Some(DivergenceWitness::DenominatorExclusion {
        qmax: params.qmax,
        max_level,
        tightest: Fraction::from_ratio(p, q).to_string(),
        tightest_level: level,
        depth,
    })
}

/// Least level `k ≤ max_level` excluding `p/q`, if any.
fn exclusion_level(p: u128, q: u128, a: u128, hi: u128, max_level: u32) -> Option<u32> {
    let c = p << SWEEP_BITS;
    // Largest t with q·2^t < gap, i.e. exclusion at level SWEEP_BITS − t.
    let level_for = |gap: u128| -> Option<u32> {
        if gap <= q {
            return None;
        }
        let t = ((gap - 1) / q).ilog2();
        Some(SWEEP_BITS.saturating_sub(t))
    };
    let below = (q * a).checked_sub(c).and_then(level_for);
    let above = c.checked_sub(q * hi).map(|g| g + 1).and_then(level_for);
    let best = match (below, above) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return None,
    };
    (best <= max_level).then_some(best)
}

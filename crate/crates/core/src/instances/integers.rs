use num::{BigInt, Signed, Zero};

use crate::error::{MonoidError, Result};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{DivergenceWitness, FactorStream, Level, NetParams, Term, TopologicalMonoid};
use crate::text::Cursor;

/// `(Z, +)` with the discrete topology. Demo only: every element is a unit,
/// so the standing assumption that the monoid is reduced fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Integers;

impl Monoid for Integers {
    type Elem = BigInt;

    fn name(&self) -> String {
        "integers-demo".into()
    }

    fn identity(&self) -> BigInt {
        BigInt::zero()
    }

    fn combine(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn divides(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(b - a)
    }

    fn contains(&self, _x: &BigInt) -> bool {
        true
    }

    fn is_unit(&self, _x: &BigInt) -> bool {
        true
    }

    fn is_reduced(&self) -> bool {
        false
    }

    /// `1..=window` then `-1..=-window`.
    fn window(&self, bound: SearchBound) -> Vec<BigInt> {
        let w = i64::from(bound.window);
        (1..=w).chain((1..=w).map(|k| -k)).map(BigInt::from).collect()
    }

    fn in_window(&self, x: &BigInt, bound: SearchBound) -> bool {
        !x.is_zero() && x.abs() <= BigInt::from(bound.window)
    }

    fn parse_element(&self, text: &str) -> Result<BigInt> {
        let mut c = Cursor::new(text);
        let negative = c.eat('-');
        let col = c.column();
        let v: BigInt = c
            .digit_str()?
            .parse()
            .map_err(|_| MonoidError::parse(col, "bad integer"))?;
        c.finish()?;
        Ok(if negative { -v } else { v })
    }
}

impl TopologicalMonoid for Integers {
    fn neighborhood_contains(&self, center: &BigInt, _level: Level, x: &BigInt) -> bool {
        center == x
    }

    fn is_discrete(&self) -> bool {
        true
    }

    /// Finite index sets may pick only the positive terms, so growing
    /// positive (or negative) part sums rule out every limit.
    fn divergence_witness(
        &self,
        _stream: &FactorStream<BigInt>,
        terms: &[Term<BigInt>],
        _partials: &[BigInt],
        _params: &NetParams,
    ) -> Option<DivergenceWitness> {
        let n = terms.len();
        if n < 4 {
            return None;
        }
        let part_sum = |upto: usize, positive: bool| -> BigInt {
            terms[..upto]
                .iter()
                .map(|t| &t.factor * BigInt::from(t.multiplicity))
                .filter(|v| if positive { v.is_positive() } else { v.is_negative() })
                .sum()
        };
        for positive in [true, false] {
            let checkpoints = [n / 4, n / 2, n];
            let sums: Vec<BigInt> = checkpoints.iter().map(|&k| part_sum(k, positive)).collect();
            let growing = if positive {
                sums.windows(2).all(|w| w[0] < w[1])
            } else {
                sums.windows(2).all(|w| w[0] > w[1])
            };
            if growing {
                let sign = if positive { "positive" } else { "negative" };
                return Some(DivergenceWitness::Unbounded {
                    measure: format!("partial sums over {sign} terms"),
                    observations: checkpoints
                        .iter()
                        .zip(&sums)
                        .map(|(k, s)| (*k, s.to_string()))
                        .collect(),
                });
            }
        }
        None
    }
}

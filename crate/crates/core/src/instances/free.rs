use std::collections::BTreeMap;
use std::fmt;

use crate::error::{MonoidError, Result};
use crate::factorisation::{AtomId, Atomic};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{DivergenceWitness, FactorStream, NetParams, Term, TopologicalMonoid};
use crate::text::Cursor;

/// A monomial `∏ x_i^{e_i}` with positive exponents; `1` when empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<u32, u64>);

impl Monomial {
    pub fn from_exponents<I: IntoIterator<Item = (u32, u64)>>(exps: I) -> Self {
        let mut map = BTreeMap::new();
        for (g, e) in exps {
            *map.entry(g).or_default() += e;
        }
        map.retain(|_, e| *e > 0);
        Monomial(map)
    }

    pub fn generator(i: u32) -> Self {
        Monomial::from_exponents([(i, 1)])
    }

    pub fn exponents(&self) -> &BTreeMap<u32, u64> {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.values().sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, e)| if *e == 1 { format!("x{g}") } else { format!("x{g}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Reads `x0^2*x3`; bare `x`, `y`, `z`, `w` name generators 0 to 3.
pub(crate) fn parse_monomial(text: &str) -> Result<Monomial> {
    let mut c = Cursor::new(text);
    if c.eat('1') {
        c.finish()?;
        return Ok(Monomial::default());
    }
    let mut exps = Vec::new();
    loop {
        let g = match c.peek() {
            Some('x') => {
                c.eat('x');
                match c.peek() {
                    Some(d) if d.is_ascii_digit() => {
                        let col = c.column();
                        u32::try_from(c.unsigned()?)
                            .map_err(|_| MonoidError::parse(col, "generator index too large"))?
                    }
                    _ => 0,
                }
            }
            Some(ch @ ('y' | 'z' | 'w')) => {
                c.eat(ch);
                match ch {
                    'y' => 1,
                    'z' => 2,
                    _ => 3,
                }
            }
            _ => return Err(c.error("expected a generator")),
        };
        let e = if c.eat('^') { c.unsigned()? } else { 1 };
        if e == 0 {
            return Err(c.error("exponent must be positive"));
        }
        exps.push((g, e));
        if !c.eat('*') {
            break;
        }
    }
    c.finish()?;
    Ok(Monomial::from_exponents(exps))
}

/// Monomials of total degree `1..=degree` over `gens` generators, by degree
/// and then lexicographically on the exponent vector (descending).
pub fn monomials(gens: u32, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 1..=u64::from(degree) {
        let mut exps = vec![0u64; gens as usize];
        compositions(&mut exps, 0, d, &mut out);
    }
    out
}

fn compositions(exps: &mut [u64], at: usize, remaining: u64, out: &mut Vec<Monomial>) {
    if at + 1 == exps.len() {
        exps[at] = remaining;
        out.push(Monomial::from_exponents(
            exps.iter().enumerate().map(|(g, e)| (g as u32, *e)),
        ));
        return;
    }
    for e in (0..=remaining).rev() {
        exps[at] = e;
        compositions(exps, at + 1, remaining - e, out);
    }
    exps[at] = 0;
}

/// The free commutative monoid on `gens` generators, with the discrete
/// topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeMonoid {
    gens: u32,
}

impl FreeMonoid {
    pub fn new(gens: u32) -> Result<Self> {
        if gens == 0 {
            return Err(MonoidError::InvalidParams("free monoid needs at least one generator".into()));
        }
        Ok(FreeMonoid { gens })
    }

    pub fn gens(&self) -> u32 {
        self.gens
    }
}

impl Monoid for FreeMonoid {
    type Elem = Monomial;

    fn name(&self) -> String {
        format!("free(n={})", self.gens)
    }

    fn identity(&self) -> Monomial {
        Monomial::default()
    }

    fn combine(&self, a: &Monomial, b: &Monomial) -> Monomial {
        Monomial::from_exponents(a.0.iter().chain(&b.0).map(|(g, e)| (*g, *e)))
    }

    fn divides(&self, a: &Monomial, b: &Monomial) -> Option<Monomial> {
        let mut rest = b.0.clone();
        for (g, e) in &a.0 {
            let have = rest.get_mut(g)?;
            *have = have.checked_sub(*e)?;
        }
        rest.retain(|_, e| *e > 0);
        Some(Monomial(rest))
    }

    fn contains(&self, x: &Monomial) -> bool {
        x.0.iter().all(|(g, e)| *g < self.gens && *e > 0)
    }

    fn window(&self, bound: SearchBound) -> Vec<Monomial> {
        monomials(self.gens.min(bound.window), bound.degree)
    }

    fn in_window(&self, x: &Monomial, bound: SearchBound) -> bool {
        x.degree() <= u64::from(bound.degree) && x.0.keys().all(|g| *g < bound.window)
    }

    fn parse_element(&self, text: &str) -> Result<Monomial> {
        let x = parse_monomial(text)?;
        self.check(&x)?;
        Ok(x)
    }

    fn grade(&self, x: &Monomial) -> Option<u64> {
        Some(x.degree())
    }
}

impl TopologicalMonoid for FreeMonoid {
    fn neighborhood_contains(&self, center: &Monomial, _level: crate::net::Level, x: &Monomial) -> bool {
        center == x
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn order_convex(&self) -> bool {
        true
    }

    fn divergence_witness(
        &self,
        _stream: &FactorStream<Monomial>,
        terms: &[Term<Monomial>],
        partials: &[Monomial],
        _params: &NetParams,
    ) -> Option<DivergenceWitness> {
        degree_growth(terms, partials, |x| x.degree())
    }
}

/// In a discrete instance with a grading, an infinite stream of non-units
/// has strictly growing partial grades, so the net is never eventually
/// constant.
pub(crate) fn degree_growth<E>(
    terms: &[Term<E>],
    partials: &[E],
    grade: impl Fn(&E) -> u64,
) -> Option<DivergenceWitness> {
    let n = terms.len();
    if n < 2 {
        return None;
    }
    let checkpoints = [n / 4, n / 2, n];
    let observations: Vec<(usize, String)> = checkpoints
        .iter()
        .map(|&i| (i, grade(&partials[i]).to_string()))
        .collect();
    let grades: Vec<u64> = checkpoints.iter().map(|&i| grade(&partials[i])).collect();
    (grades.windows(2).all(|w| w[0] < w[1])).then(|| DivergenceWitness::Unbounded {
        measure: "total degree".into(),
        observations,
    })
}

impl Atomic for FreeMonoid {
    fn family_len(&self) -> Option<u64> {
        Some(u64::from(self.gens))
    }

    fn family_atom(&self, i: u64) -> Monomial {
        Monomial::generator(i as u32)
    }

    fn atom_id_of(&self, x: &Monomial) -> Option<AtomId> {
        match x.0.iter().next() {
            Some((g, 1)) if x.0.len() == 1 => Some(AtomId::Family(u64::from(*g))),
            _ => None,
        }
    }
}

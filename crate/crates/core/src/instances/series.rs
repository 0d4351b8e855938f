use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{MonoidError, Result};
use crate::monoid::{Monoid, SearchBound};
use crate::net::{DivergenceWitness, FactorStream, Level, NetParams, Term, TopologicalMonoid};
use crate::text::Cursor;

type Exps = Vec<u32>;

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Graded order: total degree first, then lexicographic.
fn graded_cmp(a: &[u32], b: &[u32]) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| a.cmp(b))
}

/// A power series in `vars` variables known exactly below total degree
/// `precision`. `truncated` marks that higher terms are unknown; otherwise
/// the element is the displayed polynomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Series {
    vars: u32,
    precision: u32,
    coeffs: BTreeMap<Exps, BigRational>,
    truncated: bool,
}

/// Order of vanishing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    /// The identity `1`.
    Unit,
    Finite(u32),
    /// All known coefficients vanish; the valuation is at least this.
    AtLeast(u32),
}

impl Valuation {
    /// Lower bound as a number, `0` for the unit.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Unit => 0,
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Unit => f.write_str("unit"),
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Series {
    fn normalized(vars: u32, precision: u32, coeffs: BTreeMap<Exps, BigRational>, truncated: bool) -> Self {
        let mut truncated = truncated;
        let mut kept = BTreeMap::new();
        for (e, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            if degree(&e) >= precision {
                truncated = true;
            } else {
                kept.insert(e, c);
            }
        }
        Series {
            vars,
            precision,
            coeffs: kept,
            truncated,
        }
    }

    pub fn one(vars: u32, precision: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0; vars as usize], BigRational::one());
        Series {
            vars,
            precision,
            coeffs,
            truncated: false,
        }
    }

    pub fn monomial(vars: u32, precision: u32, exps: Exps) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(exps, BigRational::one());
        Series::normalized(vars, precision, coeffs, false)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn coefficients(&self) -> &BTreeMap<Exps, BigRational> {
        &self.coeffs
    }

    fn is_one(&self) -> bool {
        !self.truncated
            && self.coeffs.len() == 1
            && self
                .coeffs
                .iter()
                .next()
                .is_some_and(|(e, c)| degree(e) == 0 && c.is_one())
    }

    fn leading(&self) -> Option<(&Exps, &BigRational)> {
        self.coeffs.iter().max_by(|a, b| graded_cmp(a.0, b.0))
    }
}

pub fn series_valuation(f: &Series) -> Valuation {
    if f.is_one() {
        return Valuation::Unit;
    }
    match f.coeffs.keys().map(|e| degree(e)).min() {
        Some(v) => Valuation::Finite(v),
        None => Valuation::AtLeast(f.precision),
    }
}

fn monomial_text(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, p)| **p > 0)
        .map(|(i, p)| if *p == 1 { format!("x{i}") } else { format!("x{i}^{p}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn rational_text(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Exps> = self.coeffs.keys().collect();
        keys.sort_by(|a, b| graded_cmp(a, b).then_with(|| b.cmp(a)));
        let mut out = String::new();
        for e in keys {
            let c = &self.coeffs[e];
            let negative = c.is_negative();
            let abs = c.abs();
            let mono = monomial_text(e);
            let body = if mono.is_empty() {
                rational_text(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", rational_text(&abs), mono)
            };
            match (out.is_empty(), negative) {
                (true, false) => out.push_str(&body),
                (true, true) => out.push_str(&format!("-{body}")),
                (false, false) => out.push_str(&format!(" + {body}")),
                (false, true) => out.push_str(&format!(" - {body}")),
            }
        }
        if self.truncated {
            if out.is_empty() {
                out = format!("O({})", self.precision);
            } else {
                out.push_str(&format!(" + O({})", self.precision));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// `K[[x_0, …, x_{n−1}]]` restricted to `{1} ∪ {f ≠ 0 : f(0) = 0}`, under
/// multiplication, with the m-adic topology seen through a working
/// precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesRing {
    vars: u32,
    precision: u32,
}

impl SeriesRing {
    pub fn new(vars: u32, precision: u32) -> Result<Self> {
        if vars == 0 || precision == 0 {
            return Err(MonoidError::InvalidParams(
                "series need at least one variable and positive precision".into(),
            ));
        }
        Ok(SeriesRing { vars, precision })
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn monomial(&self, exps: &[u32]) -> Series {
        Series::monomial(self.vars, self.precision, exps.to_vec())
    }

    pub fn from_terms(&self, terms: &[(&[u32], BigRational)]) -> Series {
        let mut coeffs: BTreeMap<Exps, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(e.to_vec()).or_insert_with(BigRational::zero) += c;
        }
        Series::normalized(self.vars, self.precision, coeffs, false)
    }

    fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut coeffs: BTreeMap<Exps, BigRational> = BTreeMap::new();
        let mut dropped = false;
        for (ea, ca) in &a.coeffs {
            for (eb, cb) in &b.coeffs {
                let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if degree(&e) >= self.precision {
                    dropped = true;
                    continue;
                }
                *coeffs.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        Series::normalized(self.vars, self.precision, coeffs, a.truncated || b.truncated || dropped)
    }

    /// Exact polynomial division `b / a` under the graded order.
    fn exact_quotient(&self, a: &Series, b: &Series) -> Option<Series> {
        let (la, ca) = a.leading()?;
        let mut rem = b.coeffs.clone();
        let mut quot: BTreeMap<Exps, BigRational> = BTreeMap::new();
        while let Some((lr, cr)) = rem.iter().max_by(|x, y| graded_cmp(x.0, y.0)) {
            if !lr.iter().zip(la).all(|(r, s)| r >= s) {
                return None;
            }
            let e: Exps = lr.iter().zip(la).map(|(r, s)| r - s).collect();
            let c = cr / ca;
            for (ea, cb) in &a.coeffs {
                let m: Exps = ea.iter().zip(&e).map(|(x, y)| x + y).collect();
                let entry = rem.entry(m).or_insert_with(BigRational::zero);
                *entry -= cb * &c;
                if entry.is_zero() {
                    rem.retain(|_, v| !v.is_zero());
                }
            }
            quot.insert(e, c);
        }
        Some(Series::normalized(self.vars, self.precision, quot, false))
    }
}

impl Monoid for SeriesRing {
    type Elem = Series;

    fn name(&self) -> String {
        format!("series(vars={}, precision={})", self.vars, self.precision)
    }

    fn identity(&self) -> Series {
        Series::one(self.vars, self.precision)
    }

    fn combine(&self, a: &Series, b: &Series) -> Series {
        if a.is_one() {
            return b.clone();
        }
        if b.is_one() {
            return a.clone();
        }
        self.mul(a, b)
    }

    /// Decided for exact inputs by polynomial division; truncated inputs
    /// never report a cofactor.
    fn divides(&self, a: &Series, b: &Series) -> Option<Series> {
        if a.is_one() {
            return Some(b.clone());
        }
        if a == b {
            return Some(self.identity());
        }
        if b.is_one() || a.truncated || b.truncated {
            return None;
        }
        let q = self.exact_quotient(a, b)?;
        (self.contains(&q) && !q.is_one()).then_some(q)
    }

    fn contains(&self, x: &Series) -> bool {
        if x.vars != self.vars || x.precision != self.precision {
            return false;
        }
        if x.coeffs.keys().any(|e| e.len() != self.vars as usize || degree(e) >= self.precision) {
            return false;
        }
        if x.is_one() {
            return true;
        }
        let no_constant = x.coeffs.keys().all(|e| degree(e) > 0);
        no_constant && (x.truncated || !x.coeffs.is_empty())
    }

    /// Monomials of degree `1..=degree` (below the precision), then sums of
    /// two distinct such monomials.
    fn window(&self, bound: SearchBound) -> Vec<Series> {
        let max = bound.degree.min(self.precision.saturating_sub(1));
        let monos: Vec<Exps> = super::free::monomials(self.vars, max)
            .into_iter()
            .map(|m| {
                let mut e = vec![0; self.vars as usize];
                for (g, p) in m.exponents() {
                    e[*g as usize] = *p as u32;
                }
                e
            })
            .collect();
        let mut out: Vec<Series> = monos.iter().map(|e| self.monomial(e)).collect();
        for (i, a) in monos.iter().enumerate() {
            for b in &monos[i + 1..] {
                out.push(self.from_terms(&[(a, BigRational::one()), (b, BigRational::one())]));
            }
        }
        out
    }

    fn in_window(&self, x: &Series, bound: SearchBound) -> bool {
        !x.truncated
            && (1..=2).contains(&x.coeffs.len())
            && x.coeffs.iter().all(|(e, c)| c.is_one() && (1..=bound.degree).contains(&degree(e)))
    }

    fn parse_element(&self, text: &str) -> Result<Series> {
        let x = parse_series(self, text)?;
        self.check(&x)?;
        Ok(x)
    }
}

fn parse_series(ring: &SeriesRing, text: &str) -> Result<Series> {
    let mut c = Cursor::new(text);
    let mut coeffs: BTreeMap<Exps, BigRational> = BTreeMap::new();
    let mut truncated = false;
    let mut first = true;
    loop {
        let negative = if c.eat('-') {
            true
        } else {
            if !first && !c.eat('+') {
                break;
            }
            false
        };
        first = false;
        if c.eat_str("O(") {
            let col = c.column();
            let d = c.unsigned()?;
            c.expect(')')?;
            if d != u64::from(ring.precision) {
                return Err(MonoidError::parse(col, format!("precision must be {}", ring.precision)));
            }
            truncated = true;
            continue;
        }
        let mut coef = BigRational::one();
        let mut exps = vec![0u32; ring.vars as usize];
        if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
            let col = c.column();
            let p: BigInt = c.digit_str()?.parse().map_err(|_| MonoidError::parse(col, "bad coefficient"))?;
            let q: BigInt = if c.eat('/') {
                let col = c.column();
                let q: BigInt = c.digit_str()?.parse().map_err(|_| MonoidError::parse(col, "bad coefficient"))?;
                if q.is_zero() {
                    return Err(MonoidError::parse(col, "zero denominator"));
                }
                q
            } else {
                BigInt::one()
            };
            coef = BigRational::new(p, q);
            if !c.eat('*') {
                *coeffs.entry(exps).or_insert_with(BigRational::zero) += if negative { -coef } else { coef };
                continue;
            }
        }
        loop {
            if !c.eat('x') {
                return Err(c.error("expected a variable `x<i>`"));
            }
            let col = c.column();
            let v = c.unsigned()? as usize;
            if v >= ring.vars as usize {
                return Err(MonoidError::parse(col, format!("variable index must be below {}", ring.vars)));
            }
            let p = if c.eat('^') { c.unsigned()? as u32 } else { 1 };
            exps[v] += p;
            if !c.eat('*') {
                break;
            }
        }
        *coeffs.entry(exps).or_insert_with(BigRational::zero) += if negative { -coef } else { coef };
    }
    c.finish()?;
    Ok(Series::normalized(ring.vars, ring.precision, coeffs, truncated))
}

impl TopologicalMonoid for SeriesRing {
    /// Agreement of all coefficients of degree `< min(k, precision)`.
    fn neighborhood_contains(&self, center: &Series, level: Level, x: &Series) -> bool {
        let cut = level.0.min(self.precision);
        let low = |s: &Series| -> Vec<(Exps, BigRational)> {
            s.coeffs
                .iter()
                .filter(|(e, _)| degree(e) < cut)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect()
        };
        low(center) == low(x)
    }

    fn divergence_witness(
        &self,
        _stream: &FactorStream<Series>,
        terms: &[Term<Series>],
        partials: &[Series],
        _params: &NetParams,
    ) -> Option<DivergenceWitness> {
        let nonunits = terms.iter().filter(|t| !t.factor.is_one()).count();
        if nonunits < 2 {
            return None;
        }
        // Each non-unit factor raises the valuation by at least one, so the
        // partial products tend to 0, which lies outside the carrier.
        let valuations: Vec<u64> = partials
            .iter()
            .map(|p| u64::from(series_valuation(p).lower_bound()))
            .take_while({
                let mut done = false;
                let cap = u64::from(self.precision);
                move |v| {
                    let keep = !done;
                    done = *v >= cap;
                    keep
                }
            })
            .collect();
        Some(DivergenceWitness::ValuationEscape { valuations })
    }
}

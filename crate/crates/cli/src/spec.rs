use serde::{Deserialize, Serialize};
use topmon::instances::{chi_stream, geometric, Fraction, InstanceKind, InstanceParams, Multiset};
use topmon::net::{FactorStream, SubsetRule};
use topmon::{Monoid, MonoidError, Result};

/// Instance-specific rule names, resolved before the generic ones.
pub type SpecialRule<E> = dyn Fn(&str) -> Option<Result<FactorStream<E>>>;

/// A product to evaluate, as read from a TOML file.
///
/// Either `factors` (a finite list of element encodings) or `rule` (one of
/// `geometric(p/q)`, `chi-all`, `chi-from(k)`, `chi-even`, `basis-from(k)`,
/// `constant(<element>)`) gives the stream; `select` optionally decimates it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSpec {
    pub instance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<String>,
    pub candidate: String,
    pub level: u32,
    pub depth: usize,
}

impl StreamSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let spec: StreamSpec = toml::from_str(text).map_err(|e| {
            let pos = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            format!("line {}, column {}: {}", pos.0, pos.1, e.message())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    #[cfg(test)]
    pub fn print(&self) -> String {
        toml::to_string(self).expect("stream spec serializes")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        self.kind().map_err(|e| e.to_string())?;
        match (&self.factors, &self.rule) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err("exactly one of `factors` and `rule` is required".into()),
        }
        if let Some(s) = &self.select {
            s.parse::<SubsetRule>().map_err(|e| e.to_string())?;
        }
        Ok(())
    }

    pub fn kind(&self) -> Result<InstanceKind> {
        self.instance.parse()
    }

    pub fn instance_params(&self, defaults: InstanceParams) -> InstanceParams {
        InstanceParams {
            gens: self.gens.unwrap_or(defaults.gens),
            vars: self.vars.unwrap_or(defaults.vars),
            precision: self.precision.unwrap_or(defaults.precision),
        }
    }

    /// The stream over `m`, with the selection applied.
    pub fn build<M: Monoid>(&self, m: &M, special: &SpecialRule<M::Elem>) -> Result<FactorStream<M::Elem>> {
        let stream = match (&self.factors, &self.rule) {
            (Some(f), _) => {
                let elems = f.iter().map(|t| m.parse_element(t)).collect::<Result<Vec<_>>>()?;
                FactorStream::finite(format!("[{}]", f.join(", ")), elems)
            }
            (None, Some(rule)) => {
                if let Some(body) = call(rule, "constant") {
                    let x = m.parse_element(body)?;
                    FactorStream::constant(rule.clone(), x)
                } else {
                    special(rule).ok_or_else(|| {
                        MonoidError::Unsupported(format!("rule `{rule}` for instance {}", self.instance))
                    })??
                }
            }
            (None, None) => return Err(MonoidError::InvalidParams("no factors and no rule".into())),
        };
        Ok(match &self.select {
            Some(s) => stream.select(s.parse()?),
            None => stream,
        })
    }
}

/// `name(body)` to `body`.
pub fn call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.trim()
        .strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn index_arg(rule: &str, name: &str) -> Option<Result<u64>> {
    call(rule, name).map(|b| {
        b.trim()
            .parse()
            .map_err(|_| MonoidError::Parse { column: name.len() + 2, message: "expected an index".into() })
    })
}

pub fn qplus_rule(rule: &str) -> Option<Result<FactorStream<Fraction>>> {
    let body = call(rule, "geometric")?;
    Some(topmon::instances::Rationals.parse_element(body).and_then(|r| {
        let one = Fraction::from_ratio(1, 1);
        if r == Fraction::zero() || r >= one {
            Err(MonoidError::InvalidParams("geometric ratio must lie in (0, 1)".into()))
        } else {
            Ok(geometric(r))
        }
    }))
}

pub fn sequence_rule(rule: &str) -> Option<Result<FactorStream<topmon::instances::Sequence>>> {
    match rule.trim() {
        "chi-all" => Some(Ok(chi_stream(0))),
        "chi-even" => Some(Ok(FactorStream::from_rule("chi-even", 0, |k| topmon::instances::Sequence::chi(2 * k)))),
        _ => index_arg(rule, "chi-from").map(|k| k.map(chi_stream)),
    }
}

pub fn harmonic_rule(rule: &str) -> Option<Result<FactorStream<Multiset>>> {
    index_arg(rule, "basis-from").map(|k| k.map(|k| FactorStream::from_rule(format!("basis-from({k})"), k, Multiset::basis)))
}

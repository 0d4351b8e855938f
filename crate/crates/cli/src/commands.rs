use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use topmon::factorisation::{
    atom, factorisation_report, unique_factorisation_check, AtomId, Atomic, ExponentMap,
    FactorisationReport,
};
use topmon::instances::{enumerate_atoms, make_instance, AnyInstance};
use topmon::net::{multiset_normal_form, verify_convergence, FactorStream, Level, Outcome, TopologicalMonoid};
use topmon::{Monoid, Result};

use crate::context::Ctx;
use crate::report::SCHEMA;
use crate::spec::{harmonic_rule, qplus_rule, sequence_rule, SpecialRule, StreamSpec};

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub instance: String,
    pub stream: String,
    pub candidate: String,
    pub level: u32,
    pub depth: usize,
    pub status: String,
    pub result: String,
    pub normal_form: String,
}

impl EvalReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "EVAL instance={} stream={:?} candidate={} level={} depth={}",
            self.instance, self.stream, self.candidate, self.level, self.depth
        );
        let _ = writeln!(out, "RESULT {}", self.result);
        let _ = writeln!(out, "NORMAL-FORM {}", self.normal_form);
        out
    }
}

fn no_rule<E>(_: &str) -> Option<Result<FactorStream<E>>> {
    None
}

pub fn eval_product(spec: &StreamSpec, ctx: &Ctx) -> Result<EvalReport> {
    let inst = make_instance(spec.kind()?, spec.instance_params(ctx.instance))?;
    match &inst {
        AnyInstance::Free(m) => eval_on(m, spec, ctx, &no_rule),
        AnyInstance::Qplus(m) => eval_on(m, spec, ctx, &qplus_rule),
        AnyInstance::Harmonic(m) => eval_on(m, spec, ctx, &harmonic_rule),
        AnyInstance::Series(m) => eval_on(m, spec, ctx, &no_rule),
        AnyInstance::Sequences(m) => eval_on(m, spec, ctx, &sequence_rule),
        AnyInstance::Integers(m) => eval_on(m, spec, ctx, &no_rule),
    }
}

fn eval_on<M: TopologicalMonoid>(
    m: &M,
    spec: &StreamSpec,
    ctx: &Ctx,
    special: &SpecialRule<M::Elem>,
) -> Result<EvalReport> {
    let stream = spec.build(m, special)?;
    let candidate = m.parse_element(&spec.candidate)?;
    m.check(&candidate)?;
    let params = ctx.params.clone().with_depth(spec.depth).with_level(spec.level);
    let r = verify_convergence(m, &stream, &candidate, Level(spec.level), spec.depth, &params);
    let normal_form = match multiset_normal_form(m, &stream, &params) {
        Ok(nf) => format!("{nf} depth={}", nf.depth),
        Err(e) => format!("none ({e})"),
    };
    Ok(EvalReport {
        schema: SCHEMA,
        command: "eval-product",
        instance: m.name(),
        stream: stream.label().to_string(),
        candidate: candidate.to_string(),
        level: spec.level,
        depth: spec.depth,
        status: r.status_name().to_string(),
        result: r.to_string(),
        normal_form,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorOutput {
    pub schema: &'static str,
    pub command: &'static str,
    pub instance: String,
    pub element: String,
    pub settings: BTreeMap<String, String>,
    pub atoms: usize,
    pub factorisations: Vec<String>,
    pub recovered: String,
    pub unique: &'static str,
    pub note: String,
}

impl FactorOutput {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let settings: Vec<String> = self.settings.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            out,
            "FACTOR instance={} element={:?} atoms={} {}",
            self.instance,
            self.element,
            self.atoms,
            settings.join(" ")
        );
        for (i, f) in self.factorisations.iter().enumerate() {
            let _ = writeln!(out, "FACTORISATION {} {}", i + 1, f);
        }
        let _ = writeln!(out, "RECOVERED {}", self.recovered);
        let _ = writeln!(out, "UNIQUE {} note={:?}", self.unique, self.note);
        out
    }
}

pub fn factor(inst: &AnyInstance, text: &str, ctx: &Ctx) -> Result<FactorOutput> {
    match inst {
        AnyInstance::Free(m) => factor_atomic(m, text, ctx),
        AnyInstance::Harmonic(m) => factor_atomic(m, text, ctx),
        AnyInstance::Sequences(m) => factor_atomic(m, text, ctx),
        AnyInstance::Qplus(m) => factor_windowed(m, text, ctx),
        AnyInstance::Series(m) => factor_windowed(m, text, ctx),
        AnyInstance::Integers(m) => factor_windowed(m, text, ctx),
    }
}

fn factor_atomic<M>(m: &M, text: &str, ctx: &Ctx) -> Result<FactorOutput>
where
    M: Atomic + Clone + Send + Sync + 'static,
{
    let b = m.parse_element(text)?;
    let report = unique_factorisation_check(m, &b, ctx.bound(), &ctx.params)?;
    let atoms = topmon::factorisation::window_atoms(m, ctx.bound()).len();
    Ok(output(m, &b, ctx, atoms, report, |id| atom(m, id)))
}

/// Factorisation over the atoms found in the window, for instances without
/// a named atom family.
fn factor_windowed<M: Monoid>(m: &M, text: &str, ctx: &Ctx) -> Result<FactorOutput> {
    let b = m.parse_element(text)?;
    m.check(&b)?;
    let found = if m.is_reduced() { enumerate_atoms(m, ctx.bound())? } else { Vec::new() };
    let atoms: Vec<(AtomId, M::Elem)> = found
        .into_iter()
        .enumerate()
        .map(|(i, a)| (AtomId::Family(i as u64), a))
        .collect();
    let report = factorisation_report(m, &atoms, &b, Vec::new())?;
    let lookup = |id: AtomId| atoms.iter().find(|(i, _)| *i == id).map(|(_, a)| a.clone());
    Ok(output(m, &b, ctx, atoms.len(), report, lookup))
}

fn output<M: Monoid, F: Fn(AtomId) -> Option<M::Elem>>(
    m: &M,
    b: &M::Elem,
    ctx: &Ctx,
    atoms: usize,
    report: FactorisationReport,
    lookup: F,
) -> FactorOutput {
    let spell = |map: &ExponentMap| -> String {
        match map.entries() {
            Some(entries) if !entries.is_empty() => {
                let parts: Vec<String> = entries
                    .iter()
                    .map(|(id, v)| {
                        let a = lookup(*id).map_or_else(|| id.to_string(), |a| a.to_string());
                        if *v == 1 { format!("({a})") } else { format!("({a})^{v}") }
                    })
                    .collect();
                format!("{map} = {}", parts.join(" * "))
            }
            Some(_) => format!("{map} = identity"),
            None => format!("{map} (infinite product of atoms)"),
        }
    };
    let unique = match report.outcome {
        Outcome::Pass => "yes",
        Outcome::Fail => "no",
        Outcome::Inconclusive => "inconclusive",
    };
    let mut settings = BTreeMap::new();
    settings.insert("window".to_string(), ctx.params.window.to_string());
    settings.insert("degree".to_string(), ctx.degree.to_string());
    FactorOutput {
        schema: SCHEMA,
        command: "factor",
        instance: m.name(),
        element: b.to_string(),
        settings,
        atoms,
        factorisations: report.factorisations.iter().map(spell).collect(),
        recovered: report.recovered.to_string(),
        unique,
        note: report.note,
    }
}

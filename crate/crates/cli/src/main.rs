//! `topmon`: law suites, counterexample demos, product evaluation and
//! factorisation from the command line.

mod commands;
mod context;
mod demos;
mod report;
mod spec;
mod suites;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use topmon::instances::{make_instance, InstanceKind, InstanceParams};
use topmon::net::{Level, NetParams};

use crate::context::Ctx;
use crate::spec::StreamSpec;

#[derive(Parser)]
#[command(name = "topmon", version, about = "Checks for factorisation in topological monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the law suite of an instance.
    CheckLaws {
        /// free, qplus, harmonic, series, pointwise, restricted or integers-demo.
        instance: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run a scripted counterexample.
    Demo {
        name: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Evaluate a product described by a TOML stream spec.
    EvalProduct {
        spec: std::path::PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Factor an element into window atoms.
    Factor {
        instance: String,
        element: String,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long, default_value_t = 12)]
    window: u32,
    #[arg(long, default_value_t = 32)]
    depth: usize,
    #[arg(long, default_value_t = 10)]
    level: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Denominator bound for rational exclusion sweeps.
    #[arg(long, default_value_t = 1_000_000)]
    qmax: u64,
    #[arg(long = "max-factors", default_value_t = 3)]
    max_factors: usize,
    /// Degree bound of window elements.
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Generators of the free instance.
    #[arg(long, default_value_t = 4)]
    gens: u32,
    /// Variables of the series instance.
    #[arg(long, default_value_t = 2)]
    vars: u32,
    /// Working precision of the series instance.
    #[arg(long, default_value_t = 8)]
    precision: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl Opts {
    fn ctx(&self) -> Ctx {
        Ctx {
            params: NetParams {
                depth: self.depth,
                level: Level(self.level),
                seed: self.seed,
                qmax: self.qmax,
                window: self.window,
                ..NetParams::default()
            },
            degree: self.degree,
            max_factors: self.max_factors,
            instance: InstanceParams {
                gens: self.gens,
                vars: self.vars,
                precision: self.precision,
            },
        }
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::CheckLaws { instance, opts } => {
            let ctx = opts.ctx();
            let inst = match instance.parse::<InstanceKind>().and_then(|k| make_instance(k, ctx.instance)) {
                Ok(i) => i,
                Err(e) => return usage_error(e),
            };
            let report = suites::check_laws(&inst, &ctx);
            emit(opts.format, &report.render_text(), &report.render_structured());
            ExitCode::from(report.exit_code as u8)
        }
        Command::Demo { name, opts } => match demos::run_demo(&name, &opts.ctx()) {
            Ok(report) => {
                emit(opts.format, &report.render_text(), &report.render_structured());
                ExitCode::from(report.exit_code as u8)
            }
            Err(e) => usage_error(e),
        },
        Command::EvalProduct { spec, opts } => {
            let text = match std::fs::read_to_string(&spec) {
                Ok(t) => t,
                Err(e) => return usage_error(format!("{}: {e}", spec.display())),
            };
            let parsed = match StreamSpec::parse(&text) {
                Ok(s) => s,
                Err(e) => return usage_error(format!("{}: {e}", spec.display())),
            };
            match commands::eval_product(&parsed, &opts.ctx()) {
                Ok(r) => {
                    emit(opts.format, &r.render_text(), &to_json(&r));
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
        Command::Factor { instance, element, opts } => {
            let ctx = opts.ctx();
            let result = instance
                .parse::<InstanceKind>()
                .and_then(|k| make_instance(k, ctx.instance))
                .and_then(|inst| commands::factor(&inst, &element, &ctx));
            match result {
                Ok(r) => {
                    emit(opts.format, &r.render_text(), &to_json(&r));
                    ExitCode::SUCCESS
                }
                Err(e) => usage_error(e),
            }
        }
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("report serializes");
    s.push('\n');
    s
}

fn emit(format: Format, text: &str, structured: &str) {
    match format {
        Format::Text => print!("{text}"),
        Format::Structured => print!("{structured}"),
    }
}

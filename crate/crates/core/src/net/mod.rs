//! Convergent products as nets over finite index subsets.

mod convergence;
mod decimation;
mod normal_form;
mod stream;
mod topology;

use std::fmt;

pub use convergence::{
    detect_divergence, eval_partial, format_indices, powers_diverge, prefix_products,
    repeated_factor, term_value, verify_convergence, Certificate, CheckPath, ConvergenceReport,
    ConvergenceStatus, DivergenceWitness, NetParams,
};
pub use decimation::{
    check_arbitrary_decimation, check_dissociation, check_finite_decimation, evaluate_product,
    finite_span_contains, is_topologically_irreducible, ProductCheck,
};
pub use normal_form::{eval_normal_form, multiset_normal_form, normal_form_stream, NormalForm};
pub use stream::{cantor_pair, FactorStream, SubsetRule, Term};
pub use topology::{pair_streams, Level, TopologicalMonoid};

/// Three-way verdict of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "INCONCLUSIVE",
        })
    }
}

//! Problem model and the text frontend.
//!
//! A [`Problem`] bundles a regular tree grammar with one or more semantic
//! rules per production and a specification (input/output examples or a
//! logical formula). Problems are built programmatically, by the builtin
//! semantics generators ([`build_impv_semantics`], [`build_regex_semantics`]),
//! or parsed from the s-expression file format by [`parse_problem`].

mod impv;
mod parser;
mod pretty;
mod printer;
mod regex;
pub mod samples;
mod sexpr;

pub use impv::{
    build_impv_semantics, expr_term_formula, expression_grammar, impv_op, subgrammar_of_impv,
    ImpvOp,
};
pub use parser::parse_problem;
pub use pretty::term_surface;
pub use printer::print_problem;
pub use regex::{build_regex_semantics, regex_example_input, regex_op, RegexOp, RegexParams};
pub use sexpr::Location;

use crate::interp::{Valuation, Value};
use crate::lang::{
    Formula, Grammar, ProdId, RelArgSort, SemanticRule, Sort,
};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors from the text frontend and the builtin semantics generators.
#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("{location}: syntax error: {message}")]
    Syntax { location: Location, message: String },
    #[error("{location}: sort error: {message}")]
    Sort { location: Location, message: String },
    #[error("unknown production id {0}")]
    UnknownProduction(ProdId),
    #[error("production {0} is not an imperative-language production")]
    NotImpvSubgrammar(ProdId),
}

impl FrontendError {
    pub(crate) fn syntax(location: Location, message: impl Into<String>) -> Self {
        FrontendError::Syntax {
            location,
            message: message.into(),
        }
    }

    pub(crate) fn sort(location: Location, message: impl Into<String>) -> Self {
        FrontendError::Sort {
            location,
            message: message.into(),
        }
    }
}

/// The desired output for one example input.
#[derive(Debug, Clone, PartialEq)]
pub enum ExampleOutput {
    /// The full output value must equal this value. For State outputs the
    /// value is a complete output state.
    Exact(Value),
    /// Only the listed state variables are constrained; the rest of the
    /// output state is don't-care.
    Partial(Vec<(String, Value)>),
    /// A formula over the example's input variables and the distinguished
    /// output variable `out` (for State outputs, fields of `out`).
    Constraint(Formula),
}

impl ExampleOutput {
    /// The constrained (variable, value) pairs, with `Exact` state values
    /// expanded variable-wise. Scalar `Exact` outputs yield the pseudo
    /// variable `""`.
    pub fn constraints(&self) -> Vec<(String, Value)> {
        match self {
            ExampleOutput::Exact(Value::State(v)) => v
                .iter()
                .map(|(n, val)| (n.to_string(), val.clone()))
                .collect(),
            ExampleOutput::Exact(v) => vec![(String::new(), v.clone())],
            ExampleOutput::Partial(pairs) => pairs.clone(),
            ExampleOutput::Constraint(_) => Vec::new(),
        }
    }
}

impl fmt::Display for ExampleOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleOutput::Exact(v) => write!(f, "{v}"),
            ExampleOutput::Constraint(c) => write!(f, "{c}"),
            ExampleOutput::Partial(pairs) => {
                write!(f, "(")?;
                for (i, (n, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{n}={v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// One input/output example over the start nonterminal's semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub input: Valuation,
    pub output: ExampleOutput,
}

/// The specification a synthesized term must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub enum Specification {
    Examples(Vec<Example>),
    /// A formula over the start nonterminal's input state variables and the
    /// distinguished output variable `out`. `verifiable` records whether the
    /// grammar's semantics can be translated to formulas term by term, which
    /// counterexample-guided solving requires.
    Formula { formula: Formula, verifiable: bool },
}

impl Specification {
    pub fn examples(&self) -> Option<&[Example]> {
        match self {
            Specification::Examples(ex) => Some(ex),
            Specification::Formula { .. } => None,
        }
    }
}

/// Which builtin generator produced the semantics, if any. Recorded so the
/// printer can round-trip the directive instead of dumping generated rules,
/// and so example outputs can be interpreted domain-specifically (a bare
/// boolean output of a regex problem constrains the acceptance entry).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinSemantics {
    Impv,
    Regex(RegexParams),
}

/// How while loops are interpreted in the boolean abstraction: havoc the
/// state after any possibly-entered loop, or iterate the body transformer
/// to a join-based fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhileMode {
    Havoc,
    Join,
}

impl fmt::Display for WhileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhileMode::Havoc => write!(f, "havoc"),
            WhileMode::Join => write!(f, "join"),
        }
    }
}

/// Markers left on a [`Problem`] by the semantics-transforming passes, so
/// later stages (query construction, result interpretation) can see which
/// shape they are working with without re-deriving it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Transforms {
    /// Set by vectorization: all relations range over state/flag vectors of
    /// this width and the examples are solved as one batch.
    pub vector_width: Option<usize>,
    /// Set by the boolean abstraction: (tracked bit, while mode). The
    /// resulting system over-approximates, so unsat no longer implies
    /// realizability.
    pub abstracted: Option<(u32, WhileMode)>,
    /// Set by loop bounding: the iteration budget. The resulting system
    /// under-approximates, so sat no longer implies unrealizability.
    pub bounded: Option<u32>,
}

/// A complete synthesis problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: Option<String>,
    pub grammar: Grammar,
    /// All semantic rules of a production, in source order. Multiple rules
    /// express case splits (a while loop has an entered and a skipped rule).
    pub semantics: BTreeMap<ProdId, Vec<SemanticRule>>,
    /// Argument sorts of every semantic relation, keyed by relation name.
    pub signatures: BTreeMap<String, Vec<RelArgSort>>,
    pub spec: Specification,
    pub builtin: Option<BuiltinSemantics>,
    pub transforms: Transforms,
}

/// Name of the semantic relation of a nonterminal.
pub fn sem_relation(nt: &str) -> String {
    format!("sem_{nt}")
}

/// Name of the syntax relation of a nonterminal (holds exactly the listings
/// of its terms).
pub fn syn_relation(nt: &str) -> String {
    format!("syn_{nt}")
}

/// Name of the fused syntax/semantics relation of a nonterminal.
pub fn fuse_relation(nt: &str) -> String {
    format!("fuse_{nt}")
}

impl Problem {
    pub fn rules_of(&self, prod: ProdId) -> &[SemanticRule] {
        self.semantics.get(&prod).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn signature(&self, relation: &str) -> Option<&[RelArgSort]> {
        self.signatures.get(relation).map(Vec::as_slice)
    }

    /// Value sorts of a relation's inputs (arguments before the term slot)
    /// and outputs (after it).
    pub fn relation_io(&self, relation: &str) -> Option<(Vec<&Sort>, Vec<&Sort>)> {
        let sig = self.signatures.get(relation)?;
        let term_at = sig
            .iter()
            .position(|a| matches!(a, RelArgSort::TermOf(_)))?;
        fn value(a: &RelArgSort) -> &Sort {
            match a {
                RelArgSort::Value(s) => s,
                RelArgSort::TermOf(_) => unreachable!(),
            }
        }
        Some((
            sig[..term_at].iter().map(value).collect(),
            sig[term_at + 1..].iter().map(value).collect(),
        ))
    }

    /// Input state sort of a nonterminal's semantic relation. For vectorized
    /// problems this is the vector sort.
    pub fn input_sort(&self, nt: &str) -> Option<&Sort> {
        let (ins, _) = self.relation_io(&sem_relation(nt))?;
        ins.first().copied()
    }

    /// Output sort of a nonterminal's semantic relation.
    pub fn output_sort(&self, nt: &str) -> Option<&Sort> {
        let (_, outs) = self.relation_io(&sem_relation(nt))?;
        outs.first().copied()
    }

    /// Input state sort of the start nonterminal, which examples must match.
    pub fn start_input_sort(&self) -> Option<&Sort> {
        self.input_sort(&self.grammar.start)
    }

    pub fn regex_params(&self) -> Option<RegexParams> {
        match self.builtin {
            Some(BuiltinSemantics::Regex(p)) => Some(p),
            _ => None,
        }
    }

    /// Standard single-state signatures for every nonterminal of `grammar`:
    /// `sem_N(input_state, term, output)`.
    pub fn standard_signatures(
        grammar: &Grammar,
        input_sort: &Sort,
        output_sort_of: impl Fn(&str) -> Sort,
    ) -> BTreeMap<String, Vec<RelArgSort>> {
        grammar
            .nonterminals
            .iter()
            .map(|(nt, _)| {
                (
                    sem_relation(nt),
                    vec![
                        RelArgSort::Value(input_sort.clone()),
                        RelArgSort::TermOf(nt.clone()),
                        RelArgSort::Value(output_sort_of(nt)),
                    ],
                )
            })
            .collect()
    }
}

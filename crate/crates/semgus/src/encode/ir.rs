//! The clause-level program that the encoders produce and the emitter
//! prints. Everything here is already scalar: state values are flattened
//! to one variable per field, so a clause can be printed without knowing
//! anything about the source problem.

use std::collections::BTreeMap;
use thiserror::Error;

use crate::lang::ProdId;

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    #[error("specification has no examples to encode")]
    SpecNotExamples,
    #[error("production {0} is outside the imperative operator set")]
    NotImpvSubgrammar(ProdId),
    #[error("cannot encode sort: {0}")]
    UnsupportedSort(String),
    #[error("cannot encode rule: {0}")]
    UnsupportedRule(String),
    #[error("cannot encode value: {0}")]
    UnsupportedValue(String),
    #[error("vector width {width} does not match example count {examples}")]
    WidthMismatch { width: usize, examples: usize },
    #[error("{0} requires a listing representation")]
    NotListingRep(&'static str),
}

/// How terms are represented inside the clause system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// One algebraic datatype per nonterminal, one constructor per
    /// production.
    Tree,
    /// Pre-order listing of production ids as an inductive cons list.
    List,
    /// Pre-order listing in an integer array, addressed by cursor pairs.
    Array,
}

impl Representation {
    pub fn is_listing(self) -> bool {
        matches!(self, Representation::List | Representation::Array)
    }

    pub fn name(self) -> &'static str {
        match self {
            Representation::Tree => "tree",
            Representation::List => "list",
            Representation::Array => "array",
        }
    }
}

/// Sort of one relation argument or clause variable, in solver terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChcSort {
    Int,
    Bool,
    BitVec(u32),
    IntArray,
    /// A declared algebraic datatype (the listing or a term datatype).
    Datatype(String),
}

/// A ground solver expression. Operators are carried by name; the emitter
/// prints applications as plain s-expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum ChcExpr {
    Sym(String),
    Int(i64),
    Bool(bool),
    BitVec(u64, u32),
    /// `((as const (Array Int Int)) <default>)`.
    ConstArray(i64),
    App(String, Vec<ChcExpr>),
}

impl ChcExpr {
    pub fn sym(s: impl Into<String>) -> ChcExpr {
        ChcExpr::Sym(s.into())
    }

    pub fn app(op: impl Into<String>, args: Vec<ChcExpr>) -> ChcExpr {
        ChcExpr::App(op.into(), args)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, ChcExpr::Bool(true))
    }

    /// Conjunction, flattening the trivial cases.
    pub fn and_all(mut parts: Vec<ChcExpr>) -> ChcExpr {
        parts.retain(|p| !p.is_true());
        match parts.len() {
            0 => ChcExpr::Bool(true),
            1 => parts.pop().unwrap(),
            _ => ChcExpr::App("and".into(), parts),
        }
    }
}

/// An application of an uninterpreted relation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChcApp {
    pub relation: String,
    pub args: Vec<ChcExpr>,
}

/// One constrained Horn clause: body relation applications plus a single
/// theory constraint imply the head; a missing head means `false` (the
/// query clause).
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub vars: Vec<(String, ChcSort)>,
    pub body: Vec<ChcApp>,
    pub constraint: ChcExpr,
    pub head: Option<ChcApp>,
}

/// One algebraic datatype: constructors with named selectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DatatypeDecl {
    pub name: String,
    pub ctors: Vec<(String, Vec<(String, ChcSort)>)>,
}

/// Encoding switches recorded on the finished program, for reporting and
/// for picking the result polarity when the solver answers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EncodeMeta {
    pub vectorized: Option<usize>,
    pub fused: bool,
    pub abstracted: bool,
    pub bounded: Option<u32>,
}

/// A complete Horn-clause system with a single designated query relation.
#[derive(Debug, Clone)]
pub struct ChcProgram {
    pub representation: Representation,
    pub meta: EncodeMeta,
    /// Declared in one block; order matters for mutual recursion only in
    /// that all of them are visible to each other.
    pub datatypes: Vec<DatatypeDecl>,
    /// Relation name to flattened argument sorts.
    pub relations: BTreeMap<String, Vec<ChcSort>>,
    pub clauses: Vec<Clause>,
    pub query_relation: String,
}

pub const QUERY_RELATION: &str = "Realizable";
pub const LIST_SORT: &str = "Lst";

impl ChcProgram {
    pub fn new(representation: Representation) -> ChcProgram {
        ChcProgram {
            representation,
            meta: EncodeMeta::default(),
            datatypes: Vec::new(),
            relations: BTreeMap::new(),
            clauses: Vec::new(),
            query_relation: QUERY_RELATION.into(),
        }
    }

    pub fn declare(&mut self, name: impl Into<String>, args: Vec<ChcSort>) {
        let name = name.into();
        let prev = self.relations.insert(name.clone(), args);
        debug_assert!(prev.is_none() || prev == self.relations.get(&name).cloned());
    }

    pub fn add_datatype(&mut self, dt: DatatypeDecl) {
        if !self.datatypes.iter().any(|d| d.name == dt.name) {
            self.datatypes.push(dt);
        }
    }

    /// The cons-list datatype used by the list representation.
    pub fn add_list_datatype(&mut self) {
        self.add_datatype(DatatypeDecl {
            name: LIST_SORT.into(),
            ctors: vec![
                (
                    "cons".into(),
                    vec![
                        ("hd".into(), ChcSort::Int),
                        ("tl".into(), ChcSort::Datatype(LIST_SORT.into())),
                    ],
                ),
                ("nil".into(), Vec::new()),
            ],
        });
    }
}

/// Datatype name of a nonterminal's term sort under the tree
/// representation.
pub fn term_sort_name(nt: &str) -> String {
    format!("T_{nt}")
}

/// Constructor name of a production under the tree representation.
pub fn ctor_name(prod: ProdId) -> String {
    format!("c{prod}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_all_flattens_trivial_conjunctions() {
        assert_eq!(ChcExpr::and_all(vec![]), ChcExpr::Bool(true));
        let x = ChcExpr::sym("x");
        assert_eq!(
            ChcExpr::and_all(vec![ChcExpr::Bool(true), x.clone()]),
            x.clone()
        );
        assert_eq!(
            ChcExpr::and_all(vec![x.clone(), x.clone()]),
            ChcExpr::app("and", vec![x.clone(), x])
        );
    }

    #[test]
    fn datatypes_deduplicate_by_name() {
        let mut p = ChcProgram::new(Representation::List);
        p.add_list_datatype();
        p.add_list_datatype();
        assert_eq!(p.datatypes.len(), 1);
    }
}

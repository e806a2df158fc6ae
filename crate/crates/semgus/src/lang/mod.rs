//! Domain model: sorts, theory formulas, grammars, terms, listings, and
//! semantic rules. Everything here is immutable after construction and safe
//! to share across threads.

mod formula;
mod grammar;
mod rule;
mod sort;
mod term;

pub use formula::Formula;
pub use grammar::{
    validate_grammar, Grammar, Production, ValidationFinding, ValidationReport,
};
pub use rule::{RelArg, RelArgSort, RelationApp, SemanticRule, TermRef};
pub use sort::{Sort, BITVEC_DEFAULT_WIDTH};
pub use term::{listing_to_term, term_size, term_to_listing, Listing, Term};

/// Production identifier. User-assigned, positive, never renumbered.
pub type ProdId = u32;

/// Errors raised by structural operations on the domain model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    /// A term violates its grammar: unknown production id, wrong child
    /// count, or a child rooted at the wrong nonterminal.
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    /// Pre-order parsing of a listing failed: at `position` the parser
    /// expected a production for `expected` but found none that fits.
    #[error("listing parse failure at position {position}: expected a production of {expected}")]
    ParseFailure { position: usize, expected: String },
    /// A listing parsed to a complete term with ids left over.
    #[error("listing has {0} trailing symbol(s) after a complete term")]
    TrailingSymbols(usize),
    /// A formula failed sort inference.
    #[error("sort error: {0}")]
    Sort(String),
}

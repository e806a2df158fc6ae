//! Constrained-Horn-clause encodings of synthesis problems and the
//! problem transformations (vectorization, fusion, abstraction, bounding)
//! that feed them.
//!
//! The clause system derives `Realizable` from a satisfying term and then
//! asserts `Realizable => false`, so a `sat` answer means no term exists
//! and `unsat` means one does. Over-approximating transformations
//! (abstraction) keep `sat` meaningful and weaken `unsat` to unknown;
//! under-approximating ones (bounding) do the reverse.

mod abstraction;
mod bounded;
mod emit;
mod fuse;
mod ir;
mod lower;
mod query;
mod semantics;
mod syntax;
mod vectorize;

pub use abstraction::make_abstract;
pub use bounded::{make_bounded, BOUND_FIELD};
pub use emit::emit_smtlib;
pub use fuse::encode_fused;
pub use ir::{
    ChcApp, ChcExpr, ChcProgram, ChcSort, Clause, DatatypeDecl, EncodeError, EncodeMeta,
    Representation, LIST_SORT, QUERY_RELATION,
};
pub use query::build_query;
pub use semantics::{encode_semantics, encode_standard};
pub use syntax::encode_syntax;
pub use vectorize::vectorize;

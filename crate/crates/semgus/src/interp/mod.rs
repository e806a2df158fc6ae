//! Reference interpretation of terms under semantic rules: concrete
//! evaluation, vectorized evaluation over example batches, abstract
//! bit-blasted evaluation, bounded unrolling, and regex match matrices.

mod absdom;
mod check;
mod eval;
mod regexmat;
mod value;
mod vectorized;

pub use absdom::{alpha, eval_abstract, AbsOut, AbsVal, AbsValuation};
pub use check::{check_example, check_examples};
pub use eval::{eval, eval_bounded, eval_with_stats, EvalError, EvalStats, DEFAULT_FUEL};
pub use regexmat::{regex_matrix, BoolMatrix};
pub use value::{IntArrayVal, Valuation, Value, VecEntry, VecValuation};
pub use vectorized::eval_vectorized;

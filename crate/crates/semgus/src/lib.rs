//! Semantics-guided synthesis.
//!
//! A synthesis problem here is a typed regular tree grammar describing the
//! space of candidate programs, a constrained-Horn-clause semantics attached
//! to each production, and a behavioral specification (input-output examples
//! or a logical formula). The crate can
//!
//! * encode the problem as an SMT-LIB 2 HORN script and drive an external
//!   Horn solver over it ([`encode`], [`solve::run_chc`]),
//! * enumerate candidate terms and check them against the examples with the
//!   reference interpreter ([`solve::enumerate_solve`], [`interp`]),
//! * run a CEGIS loop for logical specifications over pure expression
//!   grammars ([`solve::cegis`]).
//!
//! Both directions of an answer are meaningful: a solver `sat` on the
//! emitted system proves the problem has no solution at all (unrealizable),
//! while `unsat` means a solution term exists and can be recovered.

pub mod cli;
pub mod encode;
pub mod interp;
pub mod lang;
pub mod problem;
pub mod solve;

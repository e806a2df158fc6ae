use serde::{Deserialize, Serialize};
use std::fmt;

/// Bit width used for bitvector expressions when a grammar does not pick one.
pub const BITVEC_DEFAULT_WIDTH: u32 = 32;

/// Sort of a value, a state, or a vector of either.
///
/// `State` fixes a canonical variable order: states serialize as tuples, so
/// two states over the same variables but declared in a different order are
/// different sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sort {
    Int,
    Bool,
    /// Fixed-width bitvector; width >= 1.
    BitVec(u32),
    /// Integer-indexed, integer-valued array.
    IntArray,
    /// Program state: named fields in declaration order.
    State(Vec<(String, Sort)>),
    /// Fixed-length vector; length >= 1. Used by the vectorized semantics.
    Vector(Box<Sort>, usize),
}

impl Sort {
    pub fn is_state(&self) -> bool {
        matches!(self, Sort::State(_))
    }

    /// Fields of a `State` sort; `None` otherwise.
    pub fn state_fields(&self) -> Option<&[(String, Sort)]> {
        match self {
            Sort::State(fields) => Some(fields),
            _ => None,
        }
    }

    /// Sort of field `name` within a `State` sort.
    pub fn field_sort(&self, name: &str) -> Option<&Sort> {
        self.state_fields()?
            .iter()
            .find(|(f, _)| f == name)
            .map(|(_, s)| s)
    }

    /// Structural well-formedness: positive widths and lengths, unique state
    /// field names.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Sort::Int | Sort::Bool | Sort::IntArray => true,
            Sort::BitVec(w) => *w >= 1,
            Sort::Vector(elem, len) => *len >= 1 && elem.is_well_formed(),
            Sort::State(fields) => {
                let mut seen = std::collections::BTreeSet::new();
                fields
                    .iter()
                    .all(|(name, s)| seen.insert(name.clone()) && s.is_well_formed())
            }
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Bool => write!(f, "Bool"),
            Sort::BitVec(w) => write!(f, "(BitVec {w})"),
            Sort::IntArray => write!(f, "(Array Int Int)"),
            Sort::State(fields) => {
                write!(f, "(State")?;
                for (name, sort) in fields {
                    write!(f, " ({name} {sort})")?;
                }
                write!(f, ")")
            }
            Sort::Vector(elem, len) => write!(f, "(Vector {elem} {len})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_field_lookup_respects_declaration_order() {
        let s = Sort::State(vec![
            ("x".into(), Sort::BitVec(32)),
            ("y".into(), Sort::BitVec(32)),
        ]);
        assert_eq!(s.field_sort("y"), Some(&Sort::BitVec(32)));
        assert_eq!(s.field_sort("z"), None);
        assert_eq!(
            s.state_fields().unwrap().first().map(|(n, _)| n.as_str()),
            Some("x")
        );
    }

    #[test]
    fn ill_formed_sorts_are_rejected() {
        assert!(!Sort::BitVec(0).is_well_formed());
        assert!(!Sort::Vector(Box::new(Sort::Int), 0).is_well_formed());
        let dup = Sort::State(vec![("x".into(), Sort::Int), ("x".into(), Sort::Bool)]);
        assert!(!dup.is_well_formed());
        assert!(Sort::BitVec(1).is_well_formed());
    }

    #[test]
    fn display_matches_file_format_spellings() {
        assert_eq!(Sort::Int.to_string(), "Int");
        assert_eq!(Sort::BitVec(32).to_string(), "(BitVec 32)");
        assert_eq!(Sort::IntArray.to_string(), "(Array Int Int)");
        assert_eq!(BITVEC_DEFAULT_WIDTH, 32);
    }
}

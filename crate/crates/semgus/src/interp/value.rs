use crate::lang::{LangError, Sort};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A finite integer array value. Arrays in examples and during evaluation
/// always have an explicit length; reading outside `0..len` is a runtime
/// error rather than an unspecified value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntArrayVal {
    pub elems: Vec<i64>,
}

impl IntArrayVal {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

/// A runtime value of the interpreter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    Int(i64),
    Bool(bool),
    /// Stored masked to `width` bits.
    BitVec(u64, u32),
    Array(IntArrayVal),
    State(Valuation),
}

impl Value {
    pub fn bitvec(v: u64, width: u32) -> Value {
        Value::BitVec(mask_to_width(v, width), width)
    }

    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
            Value::BitVec(_, w) => Sort::BitVec(*w),
            Value::Array(_) => Sort::IntArray,
            Value::State(v) => v.sort(),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_state(&self) -> Option<&Valuation> {
        match self {
            Value::State(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::BitVec(v, _) => write!(f, "{v}"),
            Value::Array(a) => {
                write!(f, "(")?;
                for (i, e) in a.elems.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Value::State(v) => write!(f, "{v}"),
        }
    }
}

pub(crate) fn mask_to_width(v: u64, width: u32) -> u64 {
    if width >= 64 {
        v
    } else {
        v & ((1u64 << width) - 1)
    }
}

/// A program state: one value per state variable, in the State sort's
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Valuation {
    bindings: Vec<(String, Value)>,
}

impl Valuation {
    /// Build a valuation and check it against `sort`: exactly the declared
    /// variables, each at its declared sort. Bindings are reordered to the
    /// sort's canonical order.
    pub fn new(sort: &Sort, mut bindings: Vec<(String, Value)>) -> Result<Self, LangError> {
        let fields = sort
            .state_fields()
            .ok_or_else(|| LangError::Sort(format!("{sort} is not a State sort")))?;
        if bindings.len() != fields.len() {
            return Err(LangError::Sort(format!(
                "state needs {} bindings, got {}",
                fields.len(),
                bindings.len()
            )));
        }
        let mut ordered = Vec::with_capacity(fields.len());
        for (name, fsort) in fields {
            let idx = bindings
                .iter()
                .position(|(n, _)| n == name)
                .ok_or_else(|| LangError::Sort(format!("state is missing variable {name}")))?;
            let (n, v) = bindings.remove(idx);
            if v.sort() != *fsort {
                return Err(LangError::Sort(format!(
                    "state variable {n} expects {fsort}, got {}",
                    v.sort()
                )));
            }
            ordered.push((n, v));
        }
        Ok(Valuation { bindings: ordered })
    }

    /// Internal constructor for already-ordered bindings.
    pub(crate) fn from_ordered(bindings: Vec<(String, Value)>) -> Self {
        Valuation { bindings }
    }

    pub fn sort(&self) -> Sort {
        Sort::State(
            self.bindings
                .iter()
                .map(|(n, v)| (n.clone(), v.sort()))
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    /// Copy of this valuation with one variable replaced.
    pub fn with(&self, name: &str, value: Value) -> Result<Self, LangError> {
        let mut bindings = self.bindings.clone();
        let slot = bindings
            .iter_mut()
            .find(|(n, _)| n == name)
            .ok_or_else(|| LangError::Sort(format!("no state variable {name}")))?;
        if slot.1.sort() != value.sort() {
            return Err(LangError::Sort(format!(
                "state variable {name} expects {}, got {}",
                slot.1.sort(),
                value.sort()
            )));
        }
        slot.1 = value;
        Ok(Valuation { bindings })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (n, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        write!(f, ")")
    }
}

/// One entry of a vectorized state: a live valuation or the absorbing
/// bottom element. Bottom is a distinct tag, not a sentinel valuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VecEntry {
    Val(Valuation),
    Bottom,
}

impl VecEntry {
    pub fn is_bottom(&self) -> bool {
        matches!(self, VecEntry::Bottom)
    }
}

/// A fixed-length vector of states, one per example, evaluated in lockstep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VecValuation {
    pub entries: Vec<VecEntry>,
}

impl VecValuation {
    pub fn new(entries: Vec<VecEntry>) -> Self {
        VecValuation { entries }
    }

    pub fn from_states(states: Vec<Valuation>) -> Self {
        VecValuation {
            entries: states.into_iter().map(VecEntry::Val).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy_sort() -> Sort {
        Sort::State(vec![
            ("x".into(), Sort::BitVec(32)),
            ("y".into(), Sort::BitVec(32)),
        ])
    }

    #[test]
    fn valuation_reorders_to_canonical_order() {
        let v = Valuation::new(
            &xy_sort(),
            vec![
                ("y".into(), Value::bitvec(9, 32)),
                ("x".into(), Value::bitvec(6, 32)),
            ],
        )
        .unwrap();
        let names: Vec<&str> = v.iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["x", "y"]);
    }

    #[test]
    fn valuation_rejects_missing_and_missorted_bindings() {
        assert!(Valuation::new(&xy_sort(), vec![("x".into(), Value::bitvec(6, 32))]).is_err());
        assert!(Valuation::new(
            &xy_sort(),
            vec![
                ("x".into(), Value::Int(6)),
                ("y".into(), Value::bitvec(9, 32)),
            ],
        )
        .is_err());
    }

    #[test]
    fn bitvec_values_are_masked() {
        let v = Value::bitvec(0x1_0000_0001, 32);
        assert_eq!(v, Value::BitVec(1, 32));
    }

    #[test]
    fn with_replaces_one_binding() {
        let v = Valuation::new(
            &xy_sort(),
            vec![
                ("x".into(), Value::bitvec(6, 32)),
                ("y".into(), Value::bitvec(9, 32)),
            ],
        )
        .unwrap();
        let v2 = v.with("x", Value::bitvec(15, 32)).unwrap();
        assert_eq!(v2.get("x"), Some(&Value::BitVec(15, 32)));
        assert_eq!(v2.get("y"), Some(&Value::BitVec(9, 32)));
        assert!(v.with("z", Value::Int(0)).is_err());
    }
}

//! Formula-to-clause lowering. State values do not exist at the clause
//! level: a State-sorted variable `G` becomes one scalar variable per
//! field (`G.x`, `G.y`, ...), and field reads/writes are resolved
//! symbolically here. Only scalar-sorted expressions come out.

use crate::interp::Value;
use crate::lang::{Formula, Sort};

use super::ir::{ChcExpr, ChcSort, EncodeError};

/// Clause-level sort of a scalar source sort.
pub fn scalar_sort(sort: &Sort) -> Result<ChcSort, EncodeError> {
    match sort {
        Sort::Int => Ok(ChcSort::Int),
        Sort::Bool => Ok(ChcSort::Bool),
        Sort::BitVec(w) => Ok(ChcSort::BitVec(*w)),
        Sort::IntArray => Ok(ChcSort::IntArray),
        other => Err(EncodeError::UnsupportedSort(format!("{other:?}"))),
    }
}

/// Flattened shape of a value sort: name suffixes plus clause sorts.
/// Scalars flatten to themselves, states to one entry per field, vectors
/// to one flattened copy per entry (entry-major).
pub fn flatten_sort(sort: &Sort) -> Result<Vec<(String, ChcSort)>, EncodeError> {
    match sort {
        Sort::State(fields) => fields
            .iter()
            .map(|(name, s)| Ok((format!(".{name}"), scalar_sort(s)?)))
            .collect(),
        Sort::Vector(inner, n) => {
            let entry = flatten_sort(inner)?;
            if matches!(**inner, Sort::Vector(..)) {
                return Err(EncodeError::UnsupportedSort("nested vector".into()));
            }
            Ok((0..*n)
                .flat_map(|i| {
                    entry
                        .iter()
                        .map(move |(suffix, s)| (format!(".{i}{suffix}"), s.clone()))
                })
                .collect())
        }
        other => Ok(vec![(String::new(), scalar_sort(other)?)]),
    }
}

/// Flattened variable list for one named value of the given sort.
pub fn flat_vars(base: &str, sort: &Sort) -> Result<Vec<(String, ChcSort)>, EncodeError> {
    Ok(flatten_sort(sort)?
        .into_iter()
        .map(|(suffix, s)| (format!("{base}{suffix}"), s))
        .collect())
}

fn sort_of(f: &Formula) -> Result<Sort, EncodeError> {
    f.sort()
        .map_err(|e| EncodeError::UnsupportedRule(e.to_string()))
}

/// Lower a scalar-sorted formula to a clause expression.
pub fn lower(f: &Formula) -> Result<ChcExpr, EncodeError> {
    match f {
        Formula::Var(name, sort) => {
            if sort.is_state() {
                return Err(EncodeError::UnsupportedRule(format!(
                    "state variable {name} at scalar position"
                )));
            }
            Ok(ChcExpr::sym(name.clone()))
        }
        Formula::IntConst(k) => Ok(ChcExpr::Int(*k)),
        Formula::BoolConst(b) => Ok(ChcExpr::Bool(*b)),
        Formula::BitVecConst(v, w) => Ok(ChcExpr::BitVec(*v, *w)),
        Formula::Add(a, b) => Ok(ChcExpr::app("+", vec![lower(a)?, lower(b)?])),
        Formula::Sub(a, b) => Ok(ChcExpr::app("-", vec![lower(a)?, lower(b)?])),
        Formula::MulConst(k, a) => Ok(ChcExpr::app("*", vec![ChcExpr::Int(*k), lower(a)?])),
        Formula::Lt(a, b) => {
            let op = if matches!(sort_of(a)?, Sort::BitVec(_)) {
                "bvult"
            } else {
                "<"
            };
            Ok(ChcExpr::app(op, vec![lower(a)?, lower(b)?]))
        }
        Formula::Le(a, b) => {
            let op = if matches!(sort_of(a)?, Sort::BitVec(_)) {
                "bvule"
            } else {
                "<="
            };
            Ok(ChcExpr::app(op, vec![lower(a)?, lower(b)?]))
        }
        Formula::Eq(a, b) => match sort_of(a)? {
            Sort::State(fields) => Ok(ChcExpr::and_all(
                fields
                    .iter()
                    .map(|(name, _)| {
                        Ok(ChcExpr::app("=", vec![project(a, name)?, project(b, name)?]))
                    })
                    .collect::<Result<_, EncodeError>>()?,
            )),
            _ => Ok(ChcExpr::app("=", vec![lower(a)?, lower(b)?])),
        },
        Formula::And(parts) => Ok(ChcExpr::and_all(
            parts.iter().map(lower).collect::<Result<_, _>>()?,
        )),
        Formula::Or(parts) => {
            let mut lowered: Vec<ChcExpr> = parts.iter().map(lower).collect::<Result<_, _>>()?;
            match lowered.len() {
                0 => Ok(ChcExpr::Bool(false)),
                1 => Ok(lowered.pop().unwrap()),
                _ => Ok(ChcExpr::app("or", lowered)),
            }
        }
        Formula::Not(a) => Ok(ChcExpr::app("not", vec![lower(a)?])),
        Formula::Implies(a, b) => Ok(ChcExpr::app("=>", vec![lower(a)?, lower(b)?])),
        Formula::Ite(c, t, e) => {
            if sort_of(t)?.is_state() {
                return Err(EncodeError::UnsupportedRule(
                    "state-sorted ite at scalar position".into(),
                ));
            }
            Ok(ChcExpr::app("ite", vec![lower(c)?, lower(t)?, lower(e)?]))
        }
        Formula::BvAnd(a, b) => Ok(ChcExpr::app("bvand", vec![lower(a)?, lower(b)?])),
        Formula::BvOr(a, b) => Ok(ChcExpr::app("bvor", vec![lower(a)?, lower(b)?])),
        Formula::BvAdd(a, b) => Ok(ChcExpr::app("bvadd", vec![lower(a)?, lower(b)?])),
        Formula::BvNot(a) => Ok(ChcExpr::app("bvnot", vec![lower(a)?])),
        Formula::Select(a, i) => Ok(ChcExpr::app("select", vec![lower(a)?, lower(i)?])),
        Formula::Store(a, i, v) => Ok(ChcExpr::app("store", vec![lower(a)?, lower(i)?, lower(v)?])),
        Formula::FieldGet(field, m) => project(m, field),
        Formula::FieldSet(..) => Err(EncodeError::UnsupportedRule(
            "field update at scalar position".into(),
        )),
    }
}

/// Lower one field of a state-sorted formula. Field writes are resolved
/// by name match, conditionals distribute into both branches.
pub fn project(m: &Formula, field: &str) -> Result<ChcExpr, EncodeError> {
    match m {
        Formula::Var(name, sort) => match sort.state_fields() {
            Some(fields) if fields.iter().any(|(f, _)| f == field) => {
                Ok(ChcExpr::sym(format!("{name}.{field}")))
            }
            _ => Err(EncodeError::UnsupportedRule(format!(
                "no field {field} on {name}"
            ))),
        },
        Formula::FieldSet(f, inner, v) => {
            if f == field {
                lower(v)
            } else {
                project(inner, field)
            }
        }
        Formula::Ite(c, a, b) => Ok(ChcExpr::app(
            "ite",
            vec![lower(c)?, project(a, field)?, project(b, field)?],
        )),
        other => Err(EncodeError::UnsupportedRule(format!(
            "cannot project field {field} from {other:?}"
        ))),
    }
}

/// Literal clause expression for a scalar runtime value. Arrays become a
/// constant array overwritten position by position; note the clause-level
/// array is total while the interpreter's is bounds-checked.
pub fn value_expr(v: &Value) -> Result<ChcExpr, EncodeError> {
    match v {
        Value::Int(k) => Ok(ChcExpr::Int(*k)),
        Value::Bool(b) => Ok(ChcExpr::Bool(*b)),
        Value::BitVec(x, w) => Ok(ChcExpr::BitVec(*x, *w)),
        Value::Array(a) => Ok(a.elems.iter().enumerate().fold(
            ChcExpr::ConstArray(0),
            |acc, (i, e)| ChcExpr::app("store", vec![acc, ChcExpr::Int(i as i64), ChcExpr::Int(*e)]),
        )),
        Value::State(_) => Err(EncodeError::UnsupportedValue(
            "state value at scalar position".into(),
        )),
    }
}

/// Flattened literal expressions for a value of the given sort: states
/// expand to per-field literals in sort field order.
pub fn flat_value_exprs(v: &Value, sort: &Sort) -> Result<Vec<ChcExpr>, EncodeError> {
    match (v, sort.state_fields()) {
        (Value::State(val), Some(fields)) => fields
            .iter()
            .map(|(name, _)| {
                let fv = val.get(name).ok_or_else(|| {
                    EncodeError::UnsupportedValue(format!("state value missing field {name}"))
                })?;
                value_expr(fv)
            })
            .collect(),
        _ => Ok(vec![value_expr(v)?]),
    }
}

/// Literal formula for a scalar runtime value, for substitution into
/// constraint specifications.
pub fn value_formula(v: &Value) -> Result<Formula, EncodeError> {
    match v {
        Value::Int(k) => Ok(Formula::IntConst(*k)),
        Value::Bool(b) => Ok(Formula::BoolConst(*b)),
        Value::BitVec(x, w) => Ok(Formula::BitVecConst(*x, *w)),
        other => Err(EncodeError::UnsupportedValue(format!(
            "no literal formula for {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::xy_state;

    fn g() -> Formula {
        Formula::var("G", xy_state())
    }

    #[test]
    fn field_reads_resolve_through_writes_and_ites() {
        let w = 32;
        let set_x = Formula::FieldSet(
            "x".into(),
            Box::new(g()),
            Box::new(Formula::BitVecConst(7, w)),
        );
        assert_eq!(project(&set_x, "x").unwrap(), ChcExpr::BitVec(7, w));
        assert_eq!(project(&set_x, "y").unwrap(), ChcExpr::sym("G.y"));

        let ite = Formula::ite(Formula::var("c", Sort::Bool), set_x, g());
        assert_eq!(
            project(&ite, "x").unwrap(),
            ChcExpr::app(
                "ite",
                vec![ChcExpr::sym("c"), ChcExpr::BitVec(7, w), ChcExpr::sym("G.x")]
            )
        );
    }

    #[test]
    fn state_equality_expands_per_field() {
        let eq = Formula::eq(g(), Formula::var("H", xy_state()));
        assert_eq!(
            lower(&eq).unwrap(),
            ChcExpr::app(
                "and",
                vec![
                    ChcExpr::app("=", vec![ChcExpr::sym("G.x"), ChcExpr::sym("H.x")]),
                    ChcExpr::app("=", vec![ChcExpr::sym("G.y"), ChcExpr::sym("H.y")]),
                ]
            )
        );
    }

    #[test]
    fn comparison_operator_follows_operand_sort() {
        let int_lt = Formula::lt(Formula::IntConst(1), Formula::IntConst(2));
        assert_eq!(
            lower(&int_lt).unwrap(),
            ChcExpr::app("<", vec![ChcExpr::Int(1), ChcExpr::Int(2)])
        );
        let bv_lt = Formula::lt(Formula::BitVecConst(1, 8), Formula::BitVecConst(2, 8));
        assert_eq!(
            lower(&bv_lt).unwrap(),
            ChcExpr::app("bvult", vec![ChcExpr::BitVec(1, 8), ChcExpr::BitVec(2, 8)])
        );
    }

    #[test]
    fn array_literals_are_store_chains() {
        let v = Value::Array(crate::interp::IntArrayVal {
            elems: vec![5, 6],
        });
        assert_eq!(
            value_expr(&v).unwrap(),
            ChcExpr::app(
                "store",
                vec![
                    ChcExpr::app(
                        "store",
                        vec![ChcExpr::ConstArray(0), ChcExpr::Int(0), ChcExpr::Int(5)]
                    ),
                    ChcExpr::Int(1),
                    ChcExpr::Int(6),
                ]
            )
        );
    }

    #[test]
    fn vector_sorts_flatten_entry_major() {
        let vs = Sort::Vector(Box::new(xy_state()), 2);
        let flat = flatten_sort(&vs).unwrap();
        let names: Vec<&str> = flat.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, [".0.x", ".0.y", ".1.x", ".1.y"]);
        let nested = Sort::Vector(Box::new(vs), 2);
        assert!(matches!(
            flatten_sort(&nested),
            Err(EncodeError::UnsupportedSort(_))
        ));
        // A vector is still not a scalar.
        assert!(scalar_sort(&Sort::Vector(Box::new(Sort::Int), 3)).is_err());
    }
}

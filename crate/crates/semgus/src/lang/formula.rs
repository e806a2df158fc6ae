use super::{LangError, Sort};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A theory formula: the constraint language of semantic rules and queries.
///
/// Variables carry their sort, so sort inference needs no environment.
/// `State`-sorted values are manipulated only through `FieldGet`/`FieldSet`;
/// the encoder flattens them to scalars, the interpreter keeps them as
/// tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Var(String, Sort),
    IntConst(i64),
    BoolConst(bool),
    /// Value is stored masked to `width` bits; width <= 64.
    BitVecConst(u64, u32),

    Add(Box<Formula>, Box<Formula>),
    Sub(Box<Formula>, Box<Formula>),
    /// Multiplication by an integer literal (keeps the theory linear).
    MulConst(i64, Box<Formula>),

    /// `<` on Int, unsigned `<` on BitVec.
    Lt(Box<Formula>, Box<Formula>),
    /// `<=` on Int, unsigned `<=` on BitVec.
    Le(Box<Formula>, Box<Formula>),
    /// Equality at any matching sort (including State; never Vector).
    Eq(Box<Formula>, Box<Formula>),

    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Condition is Bool; branches share any sort (including State).
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),

    BvAnd(Box<Formula>, Box<Formula>),
    BvOr(Box<Formula>, Box<Formula>),
    BvAdd(Box<Formula>, Box<Formula>),
    BvNot(Box<Formula>),

    Select(Box<Formula>, Box<Formula>),
    Store(Box<Formula>, Box<Formula>, Box<Formula>),

    /// Read one field of a State-sorted operand.
    FieldGet(String, Box<Formula>),
    /// Replace one field of a State-sorted operand.
    FieldSet(String, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>, sort: Sort) -> Self {
        Formula::Var(name.into(), sort)
    }

    pub fn eq(a: Formula, b: Formula) -> Self {
        Formula::Eq(Box::new(a), Box::new(b))
    }

    pub fn lt(a: Formula, b: Formula) -> Self {
        Formula::Lt(Box::new(a), Box::new(b))
    }

    pub fn ite(c: Formula, t: Formula, e: Formula) -> Self {
        Formula::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn field_get(field: impl Into<String>, state: Formula) -> Self {
        Formula::FieldGet(field.into(), Box::new(state))
    }

    pub fn field_set(field: impl Into<String>, state: Formula, value: Formula) -> Self {
        Formula::FieldSet(field.into(), Box::new(state), Box::new(value))
    }

    /// Conjunction that collapses the trivial cases.
    pub fn and_all(mut conjuncts: Vec<Formula>) -> Self {
        conjuncts.retain(|c| *c != Formula::BoolConst(true));
        match conjuncts.len() {
            0 => Formula::BoolConst(true),
            1 => conjuncts.pop().unwrap(),
            _ => Formula::And(conjuncts),
        }
    }

    pub fn or_all(mut disjuncts: Vec<Formula>) -> Self {
        disjuncts.retain(|d| *d != Formula::BoolConst(false));
        match disjuncts.len() {
            0 => Formula::BoolConst(false),
            1 => disjuncts.pop().unwrap(),
            _ => Formula::Or(disjuncts),
        }
    }

    /// Infer the sort of this formula, checking operand sorts along the way.
    pub fn sort(&self) -> Result<Sort, LangError> {
        use Formula::*;
        let err = |msg: String| Err(LangError::Sort(msg));
        match self {
            Var(name, sort) => {
                if sort.is_well_formed() {
                    Ok(sort.clone())
                } else {
                    err(format!("variable {name} has ill-formed sort {sort}"))
                }
            }
            IntConst(_) => Ok(Sort::Int),
            BoolConst(_) => Ok(Sort::Bool),
            BitVecConst(v, w) => {
                if *w == 0 || *w > 64 {
                    return err(format!("bitvector width {w} out of range 1..=64"));
                }
                if *w < 64 && v >> w != 0 {
                    return err(format!("constant {v} does not fit in {w} bits"));
                }
                Ok(Sort::BitVec(*w))
            }
            Add(a, b) | Sub(a, b) => {
                expect(a, &Sort::Int, "arithmetic")?;
                expect(b, &Sort::Int, "arithmetic")?;
                Ok(Sort::Int)
            }
            MulConst(_, a) => {
                expect(a, &Sort::Int, "scaling")?;
                Ok(Sort::Int)
            }
            Lt(a, b) | Le(a, b) => {
                let sa = a.sort()?;
                let sb = b.sort()?;
                match (&sa, &sb) {
                    (Sort::Int, Sort::Int) => Ok(Sort::Bool),
                    (Sort::BitVec(w1), Sort::BitVec(w2)) if w1 == w2 => Ok(Sort::Bool),
                    _ => err(format!("comparison of {sa} against {sb}")),
                }
            }
            Eq(a, b) => {
                let sa = a.sort()?;
                let sb = b.sort()?;
                if matches!(sa, Sort::Vector(..)) {
                    return err("equality on Vector sorts is not supported".into());
                }
                if sa == sb {
                    Ok(Sort::Bool)
                } else {
                    err(format!("equality of {sa} against {sb}"))
                }
            }
            And(parts) | Or(parts) => {
                for p in parts {
                    expect(p, &Sort::Bool, "connective")?;
                }
                Ok(Sort::Bool)
            }
            Not(a) => {
                expect(a, &Sort::Bool, "not")?;
                Ok(Sort::Bool)
            }
            Implies(a, b) => {
                expect(a, &Sort::Bool, "implies")?;
                expect(b, &Sort::Bool, "implies")?;
                Ok(Sort::Bool)
            }
            Ite(c, t, e) => {
                expect(c, &Sort::Bool, "ite condition")?;
                let st = t.sort()?;
                let se = e.sort()?;
                if st == se {
                    Ok(st)
                } else {
                    err(format!("ite branches of {st} against {se}"))
                }
            }
            BvAnd(a, b) | BvOr(a, b) | BvAdd(a, b) => {
                let sa = a.sort()?;
                let sb = b.sort()?;
                match (&sa, &sb) {
                    (Sort::BitVec(w1), Sort::BitVec(w2)) if w1 == w2 => Ok(sa),
                    _ => err(format!("bitvector op on {sa} and {sb}")),
                }
            }
            BvNot(a) => {
                let sa = a.sort()?;
                match sa {
                    Sort::BitVec(_) => Ok(sa),
                    _ => err(format!("bvnot on {sa}")),
                }
            }
            Select(arr, idx) => {
                expect(arr, &Sort::IntArray, "select")?;
                expect(idx, &Sort::Int, "select index")?;
                Ok(Sort::Int)
            }
            Store(arr, idx, val) => {
                expect(arr, &Sort::IntArray, "store")?;
                expect(idx, &Sort::Int, "store index")?;
                expect(val, &Sort::Int, "store value")?;
                Ok(Sort::IntArray)
            }
            FieldGet(field, state) => {
                let ss = state.sort()?;
                match ss.field_sort(field) {
                    Some(fs) => Ok(fs.clone()),
                    None => err(format!("no field {field} in {ss}")),
                }
            }
            FieldSet(field, state, value) => {
                let ss = state.sort()?;
                let sv = value.sort()?;
                match ss.field_sort(field) {
                    Some(fs) if *fs == sv => Ok(ss),
                    Some(fs) => err(format!("field {field} expects {fs}, got {sv}")),
                    None => err(format!("no field {field} in {ss}")),
                }
            }
        }
    }

    /// Collect free variable names with their sorts (all variables are free;
    /// the formula language has no binders).
    pub fn free_vars(&self, out: &mut BTreeMap<String, Sort>) {
        use Formula::*;
        match self {
            Var(name, sort) => {
                out.insert(name.clone(), sort.clone());
            }
            IntConst(_) | BoolConst(_) | BitVecConst(..) => {}
            Add(a, b)
            | Sub(a, b)
            | Lt(a, b)
            | Le(a, b)
            | Eq(a, b)
            | Implies(a, b)
            | BvAnd(a, b)
            | BvOr(a, b)
            | BvAdd(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            MulConst(_, a) | Not(a) | BvNot(a) | FieldGet(_, a) => a.free_vars(out),
            And(parts) | Or(parts) => {
                for p in parts {
                    p.free_vars(out);
                }
            }
            Ite(a, b, c) | Store(a, b, c) => {
                a.free_vars(out);
                b.free_vars(out);
                c.free_vars(out);
            }
            Select(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            FieldSet(_, a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    /// Substitute variables by name. Untouched names stay as they are.
    pub fn subst(&self, map: &BTreeMap<String, Formula>) -> Formula {
        use Formula::*;
        let s = |f: &Formula| Box::new(f.subst(map));
        match self {
            Var(name, _) => match map.get(name) {
                Some(replacement) => replacement.clone(),
                None => self.clone(),
            },
            IntConst(_) | BoolConst(_) | BitVecConst(..) => self.clone(),
            Add(a, b) => Add(s(a), s(b)),
            Sub(a, b) => Sub(s(a), s(b)),
            MulConst(c, a) => MulConst(*c, s(a)),
            Lt(a, b) => Lt(s(a), s(b)),
            Le(a, b) => Le(s(a), s(b)),
            Eq(a, b) => Eq(s(a), s(b)),
            And(parts) => And(parts.iter().map(|p| p.subst(map)).collect()),
            Or(parts) => Or(parts.iter().map(|p| p.subst(map)).collect()),
            Not(a) => Not(s(a)),
            Implies(a, b) => Implies(s(a), s(b)),
            Ite(a, b, c) => Ite(s(a), s(b), s(c)),
            BvAnd(a, b) => BvAnd(s(a), s(b)),
            BvOr(a, b) => BvOr(s(a), s(b)),
            BvAdd(a, b) => BvAdd(s(a), s(b)),
            BvNot(a) => BvNot(s(a)),
            Select(a, b) => Select(s(a), s(b)),
            Store(a, b, c) => Store(s(a), s(b), s(c)),
            FieldGet(f, a) => FieldGet(f.clone(), s(a)),
            FieldSet(f, a, b) => FieldSet(f.clone(), s(a), s(b)),
        }
    }

    /// Flatten nested conjunctions into a conjunct list.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(parts) => parts.iter().flat_map(|p| p.conjuncts()).collect(),
            other => vec![other],
        }
    }
}

fn expect(f: &Formula, want: &Sort, what: &str) -> Result<(), LangError> {
    let got = f.sort()?;
    if got == *want {
        Ok(())
    } else {
        Err(LangError::Sort(format!("{what} expects {want}, got {got}")))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            Var(name, _) => write!(f, "{name}"),
            IntConst(v) => write!(f, "{v}"),
            BoolConst(v) => write!(f, "{v}"),
            BitVecConst(v, w) => write!(f, "(_ bv{v} {w})"),
            Add(a, b) => write!(f, "(+ {a} {b})"),
            Sub(a, b) => write!(f, "(- {a} {b})"),
            MulConst(c, a) => write!(f, "(* {c} {a})"),
            Lt(a, b) => write!(f, "(< {a} {b})"),
            Le(a, b) => write!(f, "(<= {a} {b})"),
            Eq(a, b) => write!(f, "(= {a} {b})"),
            And(parts) => write_variadic(f, "and", parts),
            Or(parts) => write_variadic(f, "or", parts),
            Not(a) => write!(f, "(not {a})"),
            Implies(a, b) => write!(f, "(=> {a} {b})"),
            Ite(a, b, c) => write!(f, "(ite {a} {b} {c})"),
            BvAnd(a, b) => write!(f, "(bvand {a} {b})"),
            BvOr(a, b) => write!(f, "(bvor {a} {b})"),
            BvAdd(a, b) => write!(f, "(bvadd {a} {b})"),
            BvNot(a) => write!(f, "(bvnot {a})"),
            Select(a, b) => write!(f, "(select {a} {b})"),
            Store(a, b, c) => write!(f, "(store {a} {b} {c})"),
            FieldGet(field, a) => write!(f, "(fieldGet {field} {a})"),
            FieldSet(field, a, b) => write!(f, "(fieldSet {field} {a} {b})"),
        }
    }
}

fn write_variadic(f: &mut fmt::Formatter<'_>, op: &str, parts: &[Formula]) -> fmt::Result {
    write!(f, "({op}")?;
    for p in parts {
        write!(f, " {p}")?;
    }
    write!(f, ")")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(name: &str) -> Formula {
        Formula::var(name, Sort::BitVec(32))
    }

    #[test]
    fn sort_inference_accepts_well_sorted_nodes() {
        let f = Formula::eq(
            bv("v"),
            Formula::BvOr(Box::new(bv("x")), Box::new(bv("y"))),
        );
        assert_eq!(f.sort().unwrap(), Sort::Bool);

        let cmp = Formula::lt(bv("x"), bv("y"));
        assert_eq!(cmp.sort().unwrap(), Sort::Bool);

        let state = Sort::State(vec![("x".into(), Sort::BitVec(32))]);
        let upd = Formula::field_set("x", Formula::var("g", state.clone()), bv("v"));
        assert_eq!(upd.sort().unwrap(), state);
    }

    #[test]
    fn sort_inference_rejects_mismatches() {
        let bad = Formula::Add(Box::new(bv("x")), Box::new(Formula::IntConst(1)));
        assert!(matches!(bad.sort(), Err(LangError::Sort(_))));

        let bad_eq = Formula::eq(Formula::IntConst(1), Formula::BoolConst(true));
        assert!(bad_eq.sort().is_err());

        let narrow = Formula::BitVecConst(256, 8);
        assert!(narrow.sort().is_err());

        let missing = Formula::field_get(
            "z",
            Formula::var("g", Sort::State(vec![("x".into(), Sort::Int)])),
        );
        assert!(missing.sort().is_err());
    }

    #[test]
    fn subst_replaces_by_name() {
        let f = Formula::BvAnd(Box::new(bv("x")), Box::new(bv("y")));
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), Formula::BitVecConst(6, 32));
        let g = f.subst(&map);
        assert_eq!(
            g,
            Formula::BvAnd(Box::new(Formula::BitVecConst(6, 32)), Box::new(bv("y")))
        );
    }

    #[test]
    fn conjunct_flattening_is_recursive() {
        let f = Formula::And(vec![
            Formula::And(vec![Formula::BoolConst(true), Formula::BoolConst(false)]),
            Formula::BoolConst(true),
        ]);
        assert_eq!(f.conjuncts().len(), 3);
    }
}

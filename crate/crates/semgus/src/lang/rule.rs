use super::{Formula, ProdId, Sort};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Which term a relation application talks about, relative to the semantic
/// rule's own production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermRef {
    /// The whole term built by the rule's production (recursion, as in the
    /// looping rule of `while`).
    SelfTerm,
    /// The i-th child subterm, 0-based.
    Child(usize),
}

/// One argument of a relation application: a theory formula or a term
/// reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelArg {
    F(Formula),
    T(TermRef),
}

impl RelArg {
    pub fn var(name: impl Into<String>, sort: Sort) -> Self {
        RelArg::F(Formula::var(name, sort))
    }
}

/// Declared argument sort of a relation: a plain value sort or "a term of
/// nonterminal N" (whose concrete shape depends on the encoding
/// representation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelArgSort {
    Value(Sort),
    TermOf(String),
}

/// Application of an uninterpreted relation, e.g. `sem_Start(G, t, G2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationApp {
    pub relation: String,
    pub args: Vec<RelArg>,
}

impl RelationApp {
    pub fn new(relation: impl Into<String>, args: Vec<RelArg>) -> Self {
        RelationApp {
            relation: relation.into(),
            args,
        }
    }

    /// The single term argument, if any.
    pub fn term_ref(&self) -> Option<TermRef> {
        self.args.iter().find_map(|a| match a {
            RelArg::T(t) => Some(*t),
            RelArg::F(_) => None,
        })
    }

    /// Formula arguments before the first term argument (inputs) and after
    /// it (outputs).
    pub fn split_io(&self) -> (Vec<&Formula>, Vec<&Formula>) {
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut seen_term = false;
        for a in &self.args {
            match a {
                RelArg::T(_) => seen_term = true,
                RelArg::F(f) => {
                    if seen_term {
                        outputs.push(f);
                    } else {
                        inputs.push(f);
                    }
                }
            }
        }
        (inputs, outputs)
    }
}

impl fmt::Display for RelationApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.relation)?;
        for a in &self.args {
            match a {
                RelArg::F(formula) => write!(f, " {formula}")?,
                RelArg::T(TermRef::SelfTerm) => write!(f, " @self")?,
                RelArg::T(TermRef::Child(i)) => write!(f, " @{i}")?,
            }
        }
        write!(f, ")")
    }
}

/// One constrained Horn clause of a production's semantics:
/// `body /\ constraint => head`. A production may carry several rules (the
/// two-rule semantics of `while` is the canonical case).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticRule {
    pub production: ProdId,
    /// Every free variable of body/constraint/head, with its sort.
    pub vars: Vec<(String, Sort)>,
    pub body: Vec<RelationApp>,
    pub constraint: Formula,
    pub head: RelationApp,
}

impl SemanticRule {
    /// Sorts of the declared variables as a lookup map.
    pub fn var_sorts(&self) -> BTreeMap<&str, &Sort> {
        self.vars.iter().map(|(n, s)| (n.as_str(), s)).collect()
    }

    /// Check the structural invariants that do not need a grammar: every
    /// free variable is declared and the constraint is Bool-sorted.
    pub fn check_closed(&self) -> Result<(), super::LangError> {
        let declared = self.var_sorts();
        let mut free = BTreeMap::new();
        self.constraint.free_vars(&mut free);
        for app in self.body.iter().chain(std::iter::once(&self.head)) {
            for arg in &app.args {
                if let RelArg::F(f) = arg {
                    f.free_vars(&mut free);
                }
            }
        }
        for (name, sort) in &free {
            match declared.get(name.as_str()) {
                Some(s) if **s == *sort => {}
                Some(s) => {
                    return Err(super::LangError::Sort(format!(
                        "variable {name} used at {sort} but declared at {s}"
                    )))
                }
                None => {
                    return Err(super::LangError::Sort(format!(
                        "variable {name} is not declared in the rule for production {}",
                        self.production
                    )))
                }
            }
        }
        let csort = self.constraint.sort()?;
        if csort != Sort::Bool {
            return Err(super::LangError::Sort(format!(
                "rule constraint must be Bool, got {csort}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn io_split_pivots_on_the_term_argument() {
        let state = Sort::State(vec![("x".into(), Sort::Int)]);
        let app = RelationApp::new(
            "sem_S",
            vec![
                RelArg::var("G", state.clone()),
                RelArg::T(TermRef::Child(0)),
                RelArg::var("G2", state.clone()),
            ],
        );
        let (inputs, outputs) = app.split_io();
        assert_eq!(inputs.len(), 1);
        assert_eq!(outputs.len(), 1);
        assert_eq!(app.term_ref(), Some(TermRef::Child(0)));
    }

    #[test]
    fn undeclared_variables_fail_the_closure_check() {
        let rule = SemanticRule {
            production: 1,
            vars: vec![],
            body: vec![],
            constraint: Formula::eq(Formula::var("v", Sort::Int), Formula::IntConst(0)),
            head: RelationApp::new("sem_E", vec![RelArg::T(TermRef::SelfTerm)]),
        };
        assert!(rule.check_closed().is_err());
    }

    #[test]
    fn well_formed_rule_passes_the_closure_check() {
        let rule = SemanticRule {
            production: 1,
            vars: vec![("v".into(), Sort::Int)],
            body: vec![],
            constraint: Formula::eq(Formula::var("v", Sort::Int), Formula::IntConst(0)),
            head: RelationApp::new(
                "sem_E",
                vec![
                    RelArg::T(TermRef::SelfTerm),
                    RelArg::var("v", Sort::Int),
                ],
            ),
        };
        rule.check_closed().unwrap();
    }
}

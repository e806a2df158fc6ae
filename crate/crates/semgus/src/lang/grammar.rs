use super::{ProdId, Sort};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One grammar production `lhs -> op(rhs...)`.
///
/// `lhs_sort`/`rhs_sorts` record the type assignment: the output sort of the
/// lhs nonterminal and of each rhs nonterminal. They must agree with the
/// grammar's nonterminal declarations; `validate_grammar` checks this.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Production {
    pub id: ProdId,
    pub lhs: String,
    pub op: String,
    pub rhs: Vec<String>,
    pub lhs_sort: Sort,
    pub rhs_sorts: Vec<Sort>,
}

impl Production {
    pub fn arity(&self) -> usize {
        self.rhs.len()
    }
}

/// A typed regular tree grammar. Nonterminals map to their output sort;
/// production ids are user-assigned and never renumbered, so listings and
/// emitted scripts stay stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grammar {
    /// Declaration order is meaningful: it fixes emission order downstream.
    pub nonterminals: Vec<(String, Sort)>,
    pub start: String,
    pub productions: Vec<Production>,
}

impl Grammar {
    pub fn nonterminal_sort(&self, name: &str) -> Option<&Sort> {
        self.nonterminals
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }

    pub fn production(&self, id: ProdId) -> Option<&Production> {
        self.productions.iter().find(|p| p.id == id)
    }

    /// Productions with the given lhs, in ascending id order.
    pub fn productions_of(&self, nonterminal: &str) -> Vec<&Production> {
        let mut out: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| p.lhs == nonterminal)
            .collect();
        out.sort_by_key(|p| p.id);
        out
    }

    /// Nonterminals reachable from `from` through productions (inclusive).
    pub fn reachable_from(&self, from: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(nt) = stack.pop() {
            if !seen.insert(nt.clone()) {
                continue;
            }
            for p in self.productions.iter().filter(|p| p.lhs == nt) {
                for child in &p.rhs {
                    if !seen.contains(child) {
                        stack.push(child.clone());
                    }
                }
            }
        }
        seen
    }

    /// Nonterminals that derive at least one finite term.
    pub fn productive_nonterminals(&self) -> BTreeSet<String> {
        let mut productive: BTreeSet<String> = BTreeSet::new();
        loop {
            let mut changed = false;
            for p in &self.productions {
                if productive.contains(&p.lhs) {
                    continue;
                }
                if p.rhs.iter().all(|nt| productive.contains(nt)) {
                    productive.insert(p.lhs.clone());
                    changed = true;
                }
            }
            if !changed {
                return productive;
            }
        }
    }
}

/// One defect found by `validate_grammar`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationFinding {
    DuplicateProductionId(ProdId),
    /// `name` is used by production `production` (as lhs or rhs) or as the
    /// start symbol (production = 0) without being declared.
    UndeclaredNonterminal { production: ProdId, name: String },
    UnproductiveNonterminal(String),
    /// Production's recorded type assignment disagrees with the declared
    /// nonterminal sorts.
    TypeAssignmentMismatch(ProdId),
}

/// Outcome of grammar validation. Carries findings instead of failing fast
/// so a caller can report every defect at once.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<ValidationFinding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Check grammar well-formedness: unique production ids, declared
/// nonterminals everywhere, consistent type assignments, and productivity of
/// every declared nonterminal.
pub fn validate_grammar(g: &Grammar) -> ValidationReport {
    let mut findings = Vec::new();
    let declared: BTreeMap<&str, &Sort> = g
        .nonterminals
        .iter()
        .map(|(n, s)| (n.as_str(), s))
        .collect();

    let mut seen_ids = BTreeSet::new();
    for p in &g.productions {
        if !seen_ids.insert(p.id) {
            findings.push(ValidationFinding::DuplicateProductionId(p.id));
        }
        for name in std::iter::once(&p.lhs).chain(p.rhs.iter()) {
            if !declared.contains_key(name.as_str()) {
                findings.push(ValidationFinding::UndeclaredNonterminal {
                    production: p.id,
                    name: name.clone(),
                });
            }
        }
        let lhs_ok = declared.get(p.lhs.as_str()) == Some(&&p.lhs_sort);
        let rhs_ok = p.rhs.len() == p.rhs_sorts.len()
            && p.rhs
                .iter()
                .zip(&p.rhs_sorts)
                .all(|(n, s)| declared.get(n.as_str()) == Some(&s));
        if !(lhs_ok && rhs_ok) {
            findings.push(ValidationFinding::TypeAssignmentMismatch(p.id));
        }
    }

    if !declared.contains_key(g.start.as_str()) {
        findings.push(ValidationFinding::UndeclaredNonterminal {
            production: 0,
            name: g.start.clone(),
        });
    }

    let productive = g.productive_nonterminals();
    for (name, _) in &g.nonterminals {
        if !productive.contains(name) {
            findings.push(ValidationFinding::UnproductiveNonterminal(name.clone()));
        }
    }

    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::loop_or_grammar;

    #[test]
    fn the_bitwise_loop_grammar_validates_cleanly() {
        let g = loop_or_grammar();
        assert_eq!(g.productions.len(), 9);
        let report = validate_grammar(&g);
        assert!(report.is_valid(), "unexpected findings: {:?}", report.findings);
    }

    #[test]
    fn duplicate_ids_are_reported() {
        let mut g = loop_or_grammar();
        let mut clone = g.productions[2].clone();
        clone.id = 3;
        g.productions.push(clone);
        let report = validate_grammar(&g);
        assert!(report
            .findings
            .contains(&ValidationFinding::DuplicateProductionId(3)));
    }

    #[test]
    fn a_nonterminal_without_a_base_case_is_unproductive() {
        let sort = Sort::Int;
        let g = Grammar {
            nonterminals: vec![("E".into(), sort.clone())],
            start: "E".into(),
            productions: vec![Production {
                id: 1,
                lhs: "E".into(),
                op: "+".into(),
                rhs: vec!["E".into(), "E".into()],
                lhs_sort: sort.clone(),
                rhs_sorts: vec![sort.clone(), sort],
            }],
        };
        let report = validate_grammar(&g);
        assert!(report
            .findings
            .contains(&ValidationFinding::UnproductiveNonterminal("E".into())));
    }

    #[test]
    fn undeclared_nonterminals_are_reported_with_their_production() {
        let mut g = loop_or_grammar();
        g.productions[0].rhs[0] = "Bogus".into();
        let report = validate_grammar(&g);
        assert!(report.findings.iter().any(|f| matches!(
            f,
            ValidationFinding::UndeclaredNonterminal { production: 1, name } if name == "Bogus"
        )));
    }
}

use super::{Grammar, LangError, ProdId};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A candidate program: a tree of production applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub prod_id: ProdId,
    pub children: Vec<Term>,
}

impl Term {
    pub fn new(prod_id: ProdId, children: Vec<Term>) -> Self {
        Term { prod_id, children }
    }

    pub fn leaf(prod_id: ProdId) -> Self {
        Term {
            prod_id,
            children: Vec::new(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            write!(f, "{}", self.prod_id)
        } else {
            write!(f, "{}(", self.prod_id)?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

/// Flattened pre-order sequence of production ids. For a fixed grammar the
/// map from terms to listings is injective, and listings of distinct terms
/// of one nonterminal are never prefixes of each other.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Listing {
    pub ids: Vec<ProdId>,
}

impl Listing {
    pub fn new(ids: Vec<ProdId>) -> Self {
        Listing { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

impl fmt::Display for Listing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, id) in self.ids.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "]")
    }
}

/// Number of productions in `t` (equal to the length of its listing).
pub fn term_size(t: &Term) -> usize {
    1 + t.children.iter().map(term_size).sum::<usize>()
}

/// Pre-order listing of `t`, checking term well-formedness on the way.
pub fn term_to_listing(g: &Grammar, t: &Term) -> Result<Listing, LangError> {
    let mut ids = Vec::with_capacity(term_size(t));
    collect_preorder(g, t, None, &mut ids)?;
    Ok(Listing::new(ids))
}

fn collect_preorder(
    g: &Grammar,
    t: &Term,
    expected_lhs: Option<&str>,
    out: &mut Vec<ProdId>,
) -> Result<(), LangError> {
    let p = g.production(t.prod_id).ok_or_else(|| {
        LangError::MalformedTerm(format!("unknown production id {}", t.prod_id))
    })?;
    if let Some(want) = expected_lhs {
        if p.lhs != want {
            return Err(LangError::MalformedTerm(format!(
                "production {} derives {} where {} was expected",
                p.id, p.lhs, want
            )));
        }
    }
    if t.children.len() != p.arity() {
        return Err(LangError::MalformedTerm(format!(
            "production {} has arity {}, term gives {} children",
            p.id,
            p.arity(),
            t.children.len()
        )));
    }
    out.push(t.prod_id);
    for (child, nt) in t.children.iter().zip(&p.rhs) {
        collect_preorder(g, child, Some(nt), out)?;
    }
    Ok(())
}

/// Parse `l` as the pre-order derivation of a single term of `nonterminal`.
/// The whole listing must be consumed.
pub fn listing_to_term(g: &Grammar, nonterminal: &str, l: &Listing) -> Result<Term, LangError> {
    let mut pos = 0usize;
    let term = parse_preorder(g, nonterminal, &l.ids, &mut pos)?;
    if pos != l.ids.len() {
        return Err(LangError::TrailingSymbols(l.ids.len() - pos));
    }
    Ok(term)
}

fn parse_preorder(
    g: &Grammar,
    nonterminal: &str,
    ids: &[ProdId],
    pos: &mut usize,
) -> Result<Term, LangError> {
    let fail = |pos: usize| LangError::ParseFailure {
        position: pos,
        expected: nonterminal.to_string(),
    };
    let Some(&id) = ids.get(*pos) else {
        return Err(fail(*pos));
    };
    let Some(p) = g.production(id) else {
        return Err(fail(*pos));
    };
    if p.lhs != nonterminal {
        return Err(fail(*pos));
    }
    *pos += 1;
    let mut children = Vec::with_capacity(p.arity());
    for nt in &p.rhs {
        children.push(parse_preorder(g, nt, ids, pos)?);
    }
    Ok(Term::new(id, children))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::loop_or_grammar;

    fn t(id: ProdId, children: Vec<Term>) -> Term {
        Term::new(id, children)
    }

    // while(x<x){x:=x}: 1 applied to 2(6,6) and 4(6).
    fn while_xx_assign_x() -> Term {
        t(
            1,
            vec![
                t(2, vec![Term::leaf(6), Term::leaf(6)]),
                t(4, vec![Term::leaf(6)]),
            ],
        )
    }

    #[test]
    fn preorder_listing_of_a_while_term() {
        let g = loop_or_grammar();
        let l = term_to_listing(&g, &while_xx_assign_x()).unwrap();
        assert_eq!(l.ids, vec![1, 2, 6, 6, 4, 6]);
    }

    #[test]
    fn preorder_listing_distinguishes_the_assigned_variable() {
        let g = loop_or_grammar();
        // Same loop but assigning y's value: 1(2(6,6),4(7)).
        let term = t(
            1,
            vec![
                t(2, vec![Term::leaf(6), Term::leaf(6)]),
                t(4, vec![Term::leaf(7)]),
            ],
        );
        let l = term_to_listing(&g, &term).unwrap();
        assert_eq!(l.ids, vec![1, 2, 6, 6, 4, 7]);
    }

    #[test]
    fn leaf_listing_is_a_singleton() {
        let g = loop_or_grammar();
        let l = term_to_listing(&g, &Term::leaf(6)).unwrap();
        assert_eq!(l.ids, vec![6]);
    }

    #[test]
    fn listing_round_trips_back_to_the_term() {
        let g = loop_or_grammar();
        let term = while_xx_assign_x();
        let l = term_to_listing(&g, &term).unwrap();
        let back = listing_to_term(&g, "Start", &l).unwrap();
        assert_eq!(back, term);
    }

    #[test]
    fn leaf_parses_from_its_nonterminal() {
        let g = loop_or_grammar();
        let term = listing_to_term(&g, "E", &Listing::new(vec![6])).unwrap();
        assert_eq!(term, Term::leaf(6));
    }

    #[test]
    fn truncated_listing_is_a_parse_failure() {
        let g = loop_or_grammar();
        let err = listing_to_term(&g, "Start", &Listing::new(vec![1, 2, 6, 6])).unwrap_err();
        // The statement child of the while is missing: the parser runs out
        // of input while expecting an S production.
        assert_eq!(
            err,
            LangError::ParseFailure {
                position: 4,
                expected: "S".to_string()
            }
        );
    }

    #[test]
    fn leftover_ids_are_trailing_symbols() {
        let g = loop_or_grammar();
        let err = listing_to_term(&g, "E", &Listing::new(vec![6, 7])).unwrap_err();
        assert_eq!(err, LangError::TrailingSymbols(1));
    }

    #[test]
    fn malformed_terms_are_rejected() {
        let g = loop_or_grammar();
        let wrong_arity = t(1, vec![Term::leaf(2)]);
        assert!(matches!(
            term_to_listing(&g, &wrong_arity),
            Err(LangError::MalformedTerm(_))
        ));

        let unknown = Term::leaf(99);
        assert!(matches!(
            term_to_listing(&g, &unknown),
            Err(LangError::MalformedTerm(_))
        ));

        // Child rooted at the wrong nonterminal: while(B,S) given (B,B).
        let wrong_child = t(
            1,
            vec![
                t(2, vec![Term::leaf(6), Term::leaf(6)]),
                t(2, vec![Term::leaf(6), Term::leaf(6)]),
            ],
        );
        assert!(matches!(
            term_to_listing(&g, &wrong_child),
            Err(LangError::MalformedTerm(_))
        ));
    }

    #[test]
    fn term_sizes_count_productions() {
        assert_eq!(term_size(&while_xx_assign_x()), 6);
        assert_eq!(term_size(&Term::leaf(7)), 1);
        let assign_and = t(4, vec![t(8, vec![Term::leaf(6), Term::leaf(7)])]);
        assert_eq!(term_size(&assign_and), 4);
    }
}

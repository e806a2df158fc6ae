//! Match matrices for regex terms: entry `[i][j]` says whether the regex
//! matches the substring `s[i..j]`. Concatenation is boolean matrix
//! multiplication and star sums the first `|s|` powers, so the whole
//! evaluation is polynomial regardless of the regex.

use super::eval::EvalError;
use crate::lang::Term;
use crate::problem::{regex_op, Problem, RegexOp};

fn unsupported(msg: impl Into<String>) -> EvalError {
    EvalError::Unsupported(msg.into())
}

pub type BoolMatrix = Vec<Vec<bool>>;

fn identity(n: usize) -> BoolMatrix {
    (0..=n).map(|i| (0..=n).map(|j| i == j).collect()).collect()
}

fn zero(n: usize) -> BoolMatrix {
    vec![vec![false; n + 1]; n + 1]
}

fn mul_add(a: &BoolMatrix, b: &BoolMatrix, add: &BoolMatrix) -> BoolMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| add[i][j] || (0..n).any(|m| a[i][m] && b[m][j]))
                .collect()
        })
        .collect()
}

fn matrix(p: &Problem, t: &Term, s: &[i64]) -> Result<BoolMatrix, EvalError> {
    let n = s.len();
    let prod = p
        .grammar
        .production(t.prod_id)
        .ok_or_else(|| unsupported(format!("unknown production {}", t.prod_id)))?;
    let op = regex_op(prod)
        .ok_or_else(|| unsupported(format!("production {} is not a regex operator", prod.id)))?;
    Ok(match op {
        RegexOp::Char(c) => (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| j == i + 1 && s[i] == c as i64)
                    .collect()
            })
            .collect(),
        RegexOp::Epsilon => identity(n),
        RegexOp::Empty => zero(n),
        RegexOp::Union => {
            let a = matrix(p, &t.children[0], s)?;
            let b = matrix(p, &t.children[1], s)?;
            (0..=n)
                .map(|i| (0..=n).map(|j| a[i][j] || b[i][j]).collect())
                .collect()
        }
        RegexOp::Concat => {
            let a = matrix(p, &t.children[0], s)?;
            let b = matrix(p, &t.children[1], s)?;
            mul_add(&a, &b, &zero(n))
        }
        RegexOp::Star => {
            let x = matrix(p, &t.children[0], s)?;
            // I + X + ... + X^n via n multiply-accumulate unrollings.
            let mut acc = identity(n);
            for _ in 0..n {
                acc = mul_add(&x, &acc, &acc);
            }
            acc
        }
    })
}

/// The `(|s|+1)²` match matrix of regex term `r` over integer word `s`.
/// Acceptance of the whole word is entry `[0][|s|]`.
pub fn regex_matrix(p: &Problem, r: &Term, s: &[i64]) -> Result<BoolMatrix, EvalError> {
    if let Some(params) = p.regex_params() {
        if s.len() > params.max_len {
            return Err(unsupported(format!(
                "word length {} exceeds declared maximum {}",
                s.len(),
                params.max_len
            )));
        }
    }
    matrix(p, r, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::regex_problem;

    fn problem() -> Problem {
        regex_problem(2, 5, &[(&[0], true)])
    }

    // Operator ids for alphabet 2: chars 1-2, eps 3, phi 4, union 5,
    // concat 6, star 7.
    fn a() -> Term {
        Term::leaf(1)
    }
    fn b() -> Term {
        Term::leaf(2)
    }
    fn star(t: Term) -> Term {
        Term::new(7, vec![t])
    }
    fn union(x: Term, y: Term) -> Term {
        Term::new(5, vec![x, y])
    }
    fn concat(x: Term, y: Term) -> Term {
        Term::new(6, vec![x, y])
    }

    #[test]
    fn epsilon_is_the_identity_and_empty_is_zero() {
        let p = problem();
        assert_eq!(
            regex_matrix(&p, &Term::leaf(3), &[0, 1]).unwrap(),
            vec![
                vec![true, false, false],
                vec![false, true, false],
                vec![false, false, true],
            ]
        );
        assert_eq!(
            regex_matrix(&p, &Term::leaf(4), &[0, 1]).unwrap(),
            vec![vec![false; 3]; 3]
        );
    }

    #[test]
    fn any_star_fills_the_upper_triangle() {
        let p = problem();
        let t = star(union(a(), b()));
        let m = regex_matrix(&p, &t, &[0, 1, 0]).unwrap();
        for i in 0..=3 {
            for j in 0..=3 {
                assert_eq!(m[i][j], i <= j, "entry {i},{j}");
            }
        }
    }

    #[test]
    fn acceptance_matches_the_frozen_oracle_values() {
        let p = problem();
        // (a|b)*b
        let t = concat(star(union(a(), b())), b());
        let cases: [(&[i64], bool); 6] = [
            (&[], false),
            (&[0], false),
            (&[1], true),
            (&[0, 1], true),
            (&[1, 0], false),
            (&[0, 0, 1], true),
        ];
        for (w, want) in cases {
            let m = regex_matrix(&p, &t, w).unwrap();
            assert_eq!(m[0][w.len()], want, "word {w:?}");
        }
    }

    #[test]
    fn star_matrix_matches_the_frozen_grid() {
        let p = problem();
        // (ab)* over abab
        let t = star(concat(a(), b()));
        let m = regex_matrix(&p, &t, &[0, 1, 0, 1]).unwrap();
        let want = [
            [1, 0, 1, 0, 1],
            [0, 1, 0, 0, 0],
            [0, 0, 1, 0, 1],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
        ];
        for i in 0..=4 {
            for j in 0..=4 {
                assert_eq!(m[i][j], want[i][j] == 1, "entry {i},{j}");
            }
        }
    }

    #[test]
    fn rule_based_evaluation_agrees_on_the_live_region() {
        use crate::interp::{eval, Value, DEFAULT_FUEL};
        use crate::problem::regex_example_input;
        let p = regex_problem(2, 3, &[(&[0], true)]);
        let params = p.regex_params().unwrap();
        let terms = [
            a(),
            Term::leaf(3),
            Term::leaf(4),
            union(a(), b()),
            concat(a(), b()),
            star(a()),
            star(union(a(), b())),
            concat(star(a()), b()),
        ];
        let words: [&[i64]; 6] = [&[], &[0], &[1], &[0, 1], &[1, 1], &[0, 1, 0]];
        for t in &terms {
            for w in words {
                let m = regex_matrix(&p, t, w).unwrap();
                let input = regex_example_input(params, w);
                let out = eval(&p, t, &input, DEFAULT_FUEL).unwrap();
                let Value::State(st) = out else { panic!("expected state") };
                for i in 0..=w.len() {
                    for j in i..=w.len() {
                        assert_eq!(
                            st.get(&crate::problem::RegexParams::entry(i, j)),
                            Some(&Value::Bool(m[i][j])),
                            "term {t:?} word {w:?} entry {i},{j}"
                        );
                    }
                }
            }
        }
    }
}

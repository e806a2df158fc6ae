//! Minimal s-expression reader with source locations, shared by the
//! problem parser. Atoms keep their raw text; the parser decides whether
//! an atom is a symbol, number or keyword. Double-quoted strings are
//! single atoms with the quotes stripped.

use super::FrontendError;
use std::fmt;

/// A line:column position in a problem file (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

impl Location {
    pub(crate) fn start() -> Location {
        Location { line: 1, col: 1 }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SExpr {
    Atom {
        text: String,
        quoted: bool,
        loc: Location,
    },
    List {
        items: Vec<SExpr>,
        loc: Location,
    },
}

impl SExpr {
    pub fn loc(&self) -> Location {
        match self {
            SExpr::Atom { loc, .. } | SExpr::List { loc, .. } => *loc,
        }
    }

    /// The atom's text if this is an unquoted atom.
    pub fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Atom {
                text,
                quoted: false,
                ..
            } => Some(text),
            _ => None,
        }
    }

    pub fn string(&self) -> Option<&str> {
        match self {
            SExpr::Atom {
                text, quoted: true, ..
            } => Some(text),
            _ => None,
        }
    }

    pub fn int(&self) -> Option<i64> {
        self.symbol()?.parse().ok()
    }

    pub fn items(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            _ => None,
        }
    }

    /// List items after checking the leading symbol.
    pub fn tagged(&self, tag: &str) -> Option<&[SExpr]> {
        let items = self.items()?;
        (items.first()?.symbol()? == tag).then(|| &items[1..])
    }
}

struct Scanner {
    src: Vec<char>,
    pos: usize,
    loc: Location,
}

impl Scanner {
    fn new(src: &str) -> Self {
        Scanner {
            src: src.chars().collect(),
            pos: 0,
            loc: Location::start(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.loc.line += 1;
            self.loc.col = 1;
        } else {
            self.loc.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<SExpr>, FrontendError> {
        self.skip_trivia();
        let loc = self.loc;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Some(SExpr::List { items, loc }));
                        }
                        Some(_) => match self.read()? {
                            Some(item) => items.push(item),
                            None => {
                                return Err(FrontendError::syntax(loc, "unclosed parenthesis"))
                            }
                        },
                        None => return Err(FrontendError::syntax(loc, "unclosed parenthesis")),
                    }
                }
            }
            ')' => Err(FrontendError::syntax(loc, "unmatched closing parenthesis")),
            '"' => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => text.push(c),
                            _ => {
                                return Err(FrontendError::syntax(
                                    loc,
                                    "unsupported escape in string literal",
                                ))
                            }
                        },
                        Some(c) => text.push(c),
                        None => {
                            return Err(FrontendError::syntax(loc, "unterminated string literal"))
                        }
                    }
                }
                Ok(Some(SExpr::Atom {
                    text,
                    quoted: true,
                    loc,
                }))
            }
            _ => {
                let mut text = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"') {
                        break;
                    }
                    text.push(self.bump().unwrap());
                }
                Ok(Some(SExpr::Atom {
                    text,
                    quoted: false,
                    loc,
                }))
            }
        }
    }
}

/// Read every top-level form of a problem file.
pub(crate) fn parse_all(src: &str) -> Result<Vec<SExpr>, FrontendError> {
    let mut scanner = Scanner::new(src);
    let mut forms = Vec::new();
    while let Some(form) = scanner.read()? {
        forms.push(form);
    }
    Ok(forms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_forms_with_locations() {
        let forms = parse_all("; header\n(a (b 12) \"s\")\n(c)").unwrap();
        assert_eq!(forms.len(), 2);
        let items = forms[0].items().unwrap();
        assert_eq!(items[0].symbol(), Some("a"));
        assert_eq!(items[1].items().unwrap()[1].int(), Some(12));
        assert_eq!(items[2].string(), Some("s"));
        assert_eq!(forms[0].loc(), Location { line: 2, col: 1 });
        assert_eq!(forms[1].loc(), Location { line: 3, col: 1 });
    }

    #[test]
    fn reports_unclosed_and_unmatched_parens() {
        assert!(parse_all("(a (b)").is_err());
        assert!(parse_all(")").is_err());
    }

    #[test]
    fn keywords_and_negative_numbers_are_atoms() {
        let forms = parse_all("(:vars -3)").unwrap();
        let items = forms[0].items().unwrap();
        assert_eq!(items[0].symbol(), Some(":vars"));
        assert_eq!(items[1].int(), Some(-3));
    }
}

//! Parser for the s-expression problem file format (format version 1).
//!
//! A file opens with `(set-info :format 1)` and then gives, in any order:
//! nonterminal declarations, productions, semantics (explicit `rule` forms
//! or one `builtin-semantics` directive), constraints and the start symbol.
//! Everything is sort-checked against the declarations; errors carry the
//! offending form's location.

use super::sexpr::{parse_all, Location, SExpr};
use super::{
    build_impv_semantics, build_regex_semantics, expression_grammar, regex_example_input,
    sem_relation, BuiltinSemantics, Example, ExampleOutput, FrontendError, Problem, RegexParams,
    Specification, Transforms,
};
use crate::interp::{IntArrayVal, Valuation, Value};
use crate::lang::{
    validate_grammar, Formula, Grammar, ProdId, Production, RelArg, RelArgSort, RelationApp,
    SemanticRule, Sort, TermRef, ValidationFinding,
};
use std::collections::BTreeMap;

type Env = BTreeMap<String, Sort>;

fn syntax(loc: Location, msg: impl Into<String>) -> FrontendError {
    FrontendError::syntax(loc, msg)
}

fn sort_err(loc: Location, msg: impl Into<String>) -> FrontendError {
    FrontendError::sort(loc, msg)
}

fn symbol<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, FrontendError> {
    e.symbol()
        .ok_or_else(|| syntax(e.loc(), format!("expected {what}")))
}

fn items<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], FrontendError> {
    e.items()
        .ok_or_else(|| syntax(e.loc(), format!("expected {what}")))
}

/// `:key value` pairs; each keyword at most once.
fn kwargs<'a>(rest: &'a [SExpr], loc: Location) -> Result<Vec<(&'a str, &'a SExpr)>, FrontendError> {
    if rest.len() % 2 != 0 {
        return Err(syntax(loc, "expected :keyword value pairs"));
    }
    let mut out: Vec<(&str, &SExpr)> = Vec::new();
    for pair in rest.chunks(2) {
        let key = symbol(&pair[0], "a keyword")?;
        let key = key
            .strip_prefix(':')
            .ok_or_else(|| syntax(pair[0].loc(), "expected a :keyword"))?;
        if out.iter().any(|(k, _)| *k == key) {
            return Err(syntax(pair[0].loc(), format!("duplicate keyword :{key}")));
        }
        out.push((key, &pair[1]));
    }
    Ok(out)
}

fn kwarg<'a>(
    args: &[(&str, &'a SExpr)],
    key: &str,
    loc: Location,
) -> Result<&'a SExpr, FrontendError> {
    args.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| syntax(loc, format!("missing :{key}")))
}

fn parse_sort(e: &SExpr) -> Result<Sort, FrontendError> {
    if let Some(name) = e.symbol() {
        return match name {
            "Int" => Ok(Sort::Int),
            "Bool" => Ok(Sort::Bool),
            other => Err(sort_err(e.loc(), format!("unknown sort {other}"))),
        };
    }
    let list = items(e, "a sort")?;
    let head = list
        .first()
        .and_then(SExpr::symbol)
        .ok_or_else(|| syntax(e.loc(), "expected a sort"))?;
    match head {
        "BitVec" if list.len() == 2 => {
            let w = list[1]
                .int()
                .filter(|w| (1..=64).contains(w))
                .ok_or_else(|| sort_err(list[1].loc(), "bit width must be in 1..=64"))?;
            Ok(Sort::BitVec(w as u32))
        }
        "Array" if list.len() == 3 => {
            if list[1].symbol() == Some("Int") && list[2].symbol() == Some("Int") {
                Ok(Sort::IntArray)
            } else {
                Err(sort_err(e.loc(), "only (Array Int Int) is supported"))
            }
        }
        "State" => {
            let mut fields = Vec::new();
            for f in &list[1..] {
                let pair = items(f, "a (variable sort) pair")?;
                if pair.len() != 2 {
                    return Err(syntax(f.loc(), "expected (variable sort)"));
                }
                fields.push((symbol(&pair[0], "a variable")?.to_string(), parse_sort(&pair[1])?));
            }
            let s = Sort::State(fields);
            if !s.is_well_formed() {
                return Err(sort_err(e.loc(), "state variables must be distinct"));
            }
            Ok(s)
        }
        other => Err(sort_err(e.loc(), format!("unknown sort {other}"))),
    }
}

/// Names that may not be used as variables, so the formula parser can
/// always tell an application from a reference.
const RESERVED: &[&str] = &[
    "true", "false", "and", "or", "not", "ite", "select", "store", "fieldGet", "fieldSet",
];

fn parse_formula(e: &SExpr, env: &Env) -> Result<Formula, FrontendError> {
    let loc = e.loc();
    if let Some(atom) = e.symbol() {
        if let Some(v) = e.int() {
            return Ok(Formula::IntConst(v));
        }
        return match atom {
            "true" => Ok(Formula::BoolConst(true)),
            "false" => Ok(Formula::BoolConst(false)),
            name => env
                .get(name)
                .map(|s| Formula::var(name, s.clone()))
                .ok_or_else(|| sort_err(loc, format!("unknown variable {name}"))),
        };
    }
    let list = items(e, "a formula")?;
    let head = list
        .first()
        .and_then(SExpr::symbol)
        .ok_or_else(|| syntax(loc, "expected an operator"))?;
    let args = &list[1..];
    let expect = |n: usize| -> Result<(), FrontendError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(syntax(loc, format!("{head} takes {n} arguments")))
        }
    };
    let sub = |i: usize| parse_formula(&args[i], env);
    let bin = |ctor: fn(Box<Formula>, Box<Formula>) -> Formula| -> Result<Formula, FrontendError> {
        expect(2)?;
        Ok(ctor(Box::new(sub(0)?), Box::new(sub(1)?)))
    };
    match head {
        "_" => {
            // (_ bv<value> <width>)
            expect(2)?;
            let lit = symbol(&args[0], "a bv literal")?;
            let value: u64 = lit
                .strip_prefix("bv")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| syntax(loc, "expected (_ bv<value> <width>)"))?;
            let width = args[1]
                .int()
                .filter(|w| (1..=64).contains(w))
                .ok_or_else(|| sort_err(args[1].loc(), "bit width must be in 1..=64"))?
                as u32;
            if width < 64 && value >= (1u64 << width) {
                return Err(sort_err(loc, format!("{value} does not fit in {width} bits")));
            }
            Ok(Formula::BitVecConst(value, width))
        }
        "+" => bin(Formula::Add),
        "-" => bin(Formula::Sub),
        "*" => {
            expect(2)?;
            let (a, b) = (sub(0)?, sub(1)?);
            match (a, b) {
                (Formula::IntConst(c), f) | (f, Formula::IntConst(c)) => {
                    Ok(Formula::MulConst(c, Box::new(f)))
                }
                _ => Err(sort_err(loc, "one factor of * must be an integer literal")),
            }
        }
        "<" | "bvult" => bin(Formula::Lt),
        "<=" | "bvule" => bin(Formula::Le),
        ">" => {
            expect(2)?;
            Ok(Formula::lt(sub(1)?, sub(0)?))
        }
        ">=" => {
            expect(2)?;
            Ok(Formula::Le(Box::new(sub(1)?), Box::new(sub(0)?)))
        }
        "=" => bin(Formula::Eq),
        "=>" => bin(Formula::Implies),
        "and" | "or" => {
            let parts = args
                .iter()
                .map(|a| parse_formula(a, env))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" {
                Formula::and_all(parts)
            } else {
                Formula::or_all(parts)
            })
        }
        "not" => {
            expect(1)?;
            Ok(Formula::not(sub(0)?))
        }
        "ite" => {
            expect(3)?;
            Ok(Formula::ite(sub(0)?, sub(1)?, sub(2)?))
        }
        "bvand" => bin(Formula::BvAnd),
        "bvor" => bin(Formula::BvOr),
        "bvadd" => bin(Formula::BvAdd),
        "bvnot" => {
            expect(1)?;
            Ok(Formula::BvNot(Box::new(sub(0)?)))
        }
        "select" => bin(Formula::Select),
        "store" => {
            expect(3)?;
            Ok(Formula::Store(
                Box::new(sub(0)?),
                Box::new(sub(1)?),
                Box::new(sub(2)?),
            ))
        }
        "fieldGet" => {
            expect(2)?;
            Ok(Formula::field_get(symbol(&args[0], "a field name")?, sub(1)?))
        }
        "fieldSet" => {
            expect(3)?;
            Ok(Formula::field_set(
                symbol(&args[0], "a field name")?,
                sub(1)?,
                sub(2)?,
            ))
        }
        other => Err(syntax(loc, format!("unknown operator {other}"))),
    }
}

/// Parse and sort-check a formula in one step.
fn parse_checked_formula(e: &SExpr, env: &Env, want: Option<&Sort>) -> Result<Formula, FrontendError> {
    let f = parse_formula(e, env)?;
    let got = f
        .sort()
        .map_err(|err| sort_err(e.loc(), err.to_string()))?;
    if let Some(want) = want {
        if got != *want {
            return Err(sort_err(e.loc(), format!("expected sort {want}, got {got}")));
        }
    }
    Ok(f)
}

fn parse_value(e: &SExpr, sort: &Sort) -> Result<Value, FrontendError> {
    let loc = e.loc();
    let fail = || sort_err(loc, format!("expected a value of sort {sort}"));
    match sort {
        Sort::Int => e.int().map(Value::Int).ok_or_else(fail),
        Sort::Bool => match e.symbol() {
            Some("true") => Ok(Value::Bool(true)),
            Some("false") => Ok(Value::Bool(false)),
            _ => Err(fail()),
        },
        Sort::BitVec(w) => {
            let raw = if let Some(rest) = e.tagged("_") {
                // (_ bv<value> <width>) with a matching width
                if rest.len() != 2 || rest[1].int() != Some(*w as i64) {
                    return Err(fail());
                }
                rest[0]
                    .symbol()
                    .and_then(|s| s.strip_prefix("bv"))
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(fail)?
            } else {
                e.symbol()
                    .and_then(|s| s.parse::<u64>().ok())
                    .ok_or_else(fail)?
            };
            if *w < 64 && raw >= (1u64 << w) {
                return Err(sort_err(loc, format!("{raw} does not fit in {w} bits")));
            }
            Ok(Value::BitVec(raw, *w))
        }
        Sort::IntArray => {
            let elems = items(e, "an integer list")?
                .iter()
                .map(|i| i.int().ok_or_else(fail))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Array(IntArrayVal { elems }))
        }
        Sort::State(fields) => {
            let mut bindings = Vec::new();
            for b in items(e, "a binding list")? {
                let pair = items(b, "a (variable value) pair")?;
                if pair.len() != 2 {
                    return Err(syntax(b.loc(), "expected (variable value)"));
                }
                let name = symbol(&pair[0], "a variable")?;
                let fsort = fields
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, s)| s)
                    .ok_or_else(|| sort_err(pair[0].loc(), format!("unknown state variable {name}")))?;
                bindings.push((name.to_string(), parse_value(&pair[1], fsort)?));
            }
            Valuation::new(sort, bindings)
                .map(Value::State)
                .map_err(|err| sort_err(loc, err.to_string()))
        }
        Sort::Vector(..) => Err(fail()),
    }
}

struct NtDecl {
    name: String,
    input: Sort,
    output: Sort,
    loc: Location,
}

#[derive(Clone, Copy)]
enum BuiltinChoice {
    Impv,
    Regex(RegexParams),
}

enum ConstraintForm<'a> {
    Example { form: &'a SExpr, loc: Location },
    Formula { form: &'a SExpr, loc: Location },
}

/// Parse a complete problem file.
pub fn parse_problem(text: &str) -> Result<Problem, FrontendError> {
    let forms = parse_all(text)?;
    let start_loc = Location::start();
    let first = forms
        .first()
        .ok_or_else(|| syntax(start_loc, "empty problem file"))?;
    let format_ok = first
        .tagged("set-info")
        .map(|rest| {
            rest.len() == 2 && rest[0].symbol() == Some(":format") && rest[1].int() == Some(1)
        })
        .unwrap_or(false);
    if !format_ok {
        return Err(syntax(
            first.loc(),
            "a problem file must begin with (set-info :format 1)",
        ));
    }

    let mut name: Option<String> = None;
    let mut nts: Vec<NtDecl> = Vec::new();
    let mut prods: Vec<(Production, Location)> = Vec::new();
    let mut rule_forms: Vec<&SExpr> = Vec::new();
    let mut builtin: Option<(BuiltinChoice, Location)> = None;
    let mut constraints: Vec<ConstraintForm> = Vec::new();
    let mut start: Option<(String, Location)> = None;

    for form in &forms {
        let loc = form.loc();
        let list = items(form, "a top-level form")?;
        let head = list
            .first()
            .and_then(SExpr::symbol)
            .ok_or_else(|| syntax(loc, "expected a top-level form"))?;
        let rest = &list[1..];
        match head {
            "set-info" => {
                for (key, value) in kwargs(rest, loc)? {
                    match key {
                        "format" => {
                            if value.int() != Some(1) {
                                return Err(syntax(value.loc(), "unsupported format version"));
                            }
                        }
                        "name" => {
                            name = Some(
                                value
                                    .string()
                                    .ok_or_else(|| syntax(value.loc(), "expected a string"))?
                                    .to_string(),
                            );
                        }
                        other => return Err(syntax(loc, format!("unknown info key :{other}"))),
                    }
                }
            }
            "declare-nonterminal" => {
                if rest.is_empty() {
                    return Err(syntax(loc, "expected (declare-nonterminal <name> ...)"));
                }
                let nt = symbol(&rest[0], "a nonterminal name")?;
                if nts.iter().any(|d| d.name == nt) {
                    return Err(sort_err(loc, format!("nonterminal {nt} declared twice")));
                }
                let args = kwargs(&rest[1..], loc)?;
                let input = parse_sort(kwarg(&args, "input", loc)?)?;
                if !input.is_state() {
                    return Err(sort_err(loc, "the :input sort must be a State sort"));
                }
                let output = parse_sort(kwarg(&args, "output", loc)?)?;
                nts.push(NtDecl {
                    name: nt.to_string(),
                    input,
                    output,
                    loc,
                });
            }
            "production" => {
                if rest.len() != 3 {
                    return Err(syntax(loc, "expected (production <id> <Lhs> (<op> <Rhs>...))"));
                }
                let id = rest[0]
                    .int()
                    .filter(|i| (0..=i64::from(u32::MAX)).contains(i))
                    .ok_or_else(|| syntax(rest[0].loc(), "expected a production id"))?
                    as ProdId;
                let lhs = symbol(&rest[1], "a nonterminal")?.to_string();
                let shape = items(&rest[2], "(<op> <Rhs>...)")?;
                let op = shape
                    .first()
                    .and_then(SExpr::symbol)
                    .ok_or_else(|| syntax(rest[2].loc(), "expected an operator"))?
                    .to_string();
                let rhs = shape[1..]
                    .iter()
                    .map(|r| symbol(r, "a nonterminal").map(str::to_string))
                    .collect::<Result<Vec<_>, _>>()?;
                let sort_of = |n: &str, at: Location| {
                    nts.iter()
                        .find(|d| d.name == n)
                        .map(|d| d.output.clone())
                        .ok_or_else(|| sort_err(at, format!("undeclared nonterminal {n}")))
                };
                let lhs_sort = sort_of(&lhs, loc)?;
                let rhs_sorts = rhs
                    .iter()
                    .map(|n| sort_of(n, loc))
                    .collect::<Result<Vec<_>, _>>()?;
                prods.push((
                    Production {
                        id,
                        lhs,
                        op,
                        rhs,
                        lhs_sort,
                        rhs_sorts,
                    },
                    loc,
                ));
            }
            "rule" => rule_forms.push(form),
            "builtin-semantics" => {
                if builtin.is_some() {
                    return Err(sort_err(loc, "builtin-semantics given twice"));
                }
                let which = rest
                    .first()
                    .and_then(SExpr::symbol)
                    .ok_or_else(|| syntax(loc, "expected impv or regex"))?;
                let choice = match which {
                    "impv" if rest.len() == 1 => BuiltinChoice::Impv,
                    "regex" => {
                        let args = kwargs(&rest[1..], loc)?;
                        let get = |key: &str| -> Result<usize, FrontendError> {
                            kwarg(&args, key, loc)?
                                .int()
                                .filter(|v| *v >= 1)
                                .map(|v| v as usize)
                                .ok_or_else(|| syntax(loc, format!(":{key} must be >= 1")))
                        };
                        BuiltinChoice::Regex(RegexParams {
                            alphabet: get("alphabet")?,
                            max_len: get("maxlen")?,
                        })
                    }
                    other => return Err(syntax(loc, format!("unknown builtin {other}"))),
                };
                builtin = Some((choice, loc));
            }
            "constraint" => {
                if rest.len() != 1 {
                    return Err(syntax(loc, "expected (constraint <spec>)"));
                }
                let inner = &rest[0];
                if inner.tagged("example").is_some() {
                    constraints.push(ConstraintForm::Example { form: inner, loc });
                } else if inner.tagged("formula").is_some() {
                    constraints.push(ConstraintForm::Formula { form: inner, loc });
                } else {
                    return Err(syntax(inner.loc(), "expected (example ...) or (formula ...)"));
                }
            }
            "synth-start" => {
                if rest.len() != 1 {
                    return Err(syntax(loc, "expected (synth-start <Nonterminal>)"));
                }
                if start.is_some() {
                    return Err(sort_err(loc, "synth-start given twice"));
                }
                start = Some((symbol(&rest[0], "a nonterminal")?.to_string(), loc));
            }
            other => return Err(syntax(loc, format!("unknown form {other}"))),
        }
    }

    // Assemble the grammar and semantics.
    let (grammar, semantics, signatures, builtin_kind) = match builtin {
        Some((BuiltinChoice::Regex(params), bloc)) => {
            if !nts.is_empty() || !prods.is_empty() || !rule_forms.is_empty() {
                return Err(sort_err(
                    bloc,
                    "regex builtin provides its own grammar; remove declarations and rules",
                ));
            }
            if let Some((s, sloc)) = &start {
                if s.as_str() != "R" {
                    return Err(sort_err(*sloc, "the regex start nonterminal is R"));
                }
            }
            let (g, sem, sigs) = build_regex_semantics(params.alphabet, params.max_len);
            (g, sem, sigs, Some(BuiltinSemantics::Regex(params)))
        }
        other_builtin => {
            let (start_name, _) = start
                .clone()
                .ok_or_else(|| syntax(start_loc, "missing (synth-start <Nonterminal>)"))?;
            if nts.is_empty() {
                return Err(syntax(start_loc, "no nonterminals declared"));
            }
            if !nts.iter().any(|d| d.name == start_name) {
                let sloc = start.as_ref().unwrap().1;
                return Err(sort_err(
                    sloc,
                    format!("undeclared start nonterminal {start_name}"),
                ));
            }
            let grammar = Grammar {
                nonterminals: nts.iter().map(|d| (d.name.clone(), d.output.clone())).collect(),
                start: start_name,
                productions: prods.iter().map(|(p, _)| p.clone()).collect(),
            };
            report_grammar_findings(&grammar, &nts, &prods)?;

            let signatures: BTreeMap<String, Vec<RelArgSort>> = nts
                .iter()
                .map(|d| {
                    (
                        sem_relation(&d.name),
                        vec![
                            RelArgSort::Value(d.input.clone()),
                            RelArgSort::TermOf(d.name.clone()),
                            RelArgSort::Value(d.output.clone()),
                        ],
                    )
                })
                .collect();

            match other_builtin {
                Some((BuiltinChoice::Impv, bloc)) => {
                    if !rule_forms.is_empty() {
                        return Err(sort_err(
                            bloc,
                            "give either builtin-semantics or explicit rules, not both",
                        ));
                    }
                    let input = &nts[0].input;
                    if let Some(d) = nts.iter().find(|d| d.input != *input) {
                        return Err(sort_err(
                            d.loc,
                            "builtin impv semantics needs one shared :input state",
                        ));
                    }
                    let semantics = build_impv_semantics(&grammar, input)?;
                    (grammar, semantics, signatures, Some(BuiltinSemantics::Impv))
                }
                _ => {
                    let mut semantics: BTreeMap<ProdId, Vec<SemanticRule>> = BTreeMap::new();
                    for form in &rule_forms {
                        let (id, rule) = parse_rule(form, &grammar, &signatures)?;
                        semantics.entry(id).or_default().push(rule);
                    }
                    for (p, ploc) in &prods {
                        if !semantics.contains_key(&p.id) {
                            return Err(sort_err(
                                *ploc,
                                format!("production {} has no semantic rule", p.id),
                            ));
                        }
                    }
                    (grammar, semantics, signatures, None)
                }
            }
        }
    };

    let spec = parse_spec(&constraints, &grammar, &signatures, builtin_kind)?;

    Ok(Problem {
        name,
        grammar,
        semantics,
        signatures,
        spec,
        builtin: builtin_kind,
        transforms: Transforms::default(),
    })
}

fn report_grammar_findings(
    grammar: &Grammar,
    nts: &[NtDecl],
    prods: &[(Production, Location)],
) -> Result<(), FrontendError> {
    let report = validate_grammar(grammar);
    let Some(finding) = report.findings.first() else {
        return Ok(());
    };
    let prod_loc = |id: ProdId| {
        prods
            .iter()
            .find(|(p, _)| p.id == id)
            .map(|(_, l)| *l)
            .unwrap_or_else(Location::start)
    };
    Err(match finding {
        ValidationFinding::DuplicateProductionId(id) => {
            let second = prods
                .iter()
                .filter(|(p, _)| p.id == *id)
                .nth(1)
                .map(|(_, l)| *l)
                .unwrap_or_else(Location::start);
            sort_err(second, format!("duplicate production id {id}"))
        }
        ValidationFinding::UndeclaredNonterminal { production, name } => sort_err(
            prod_loc(*production),
            format!("undeclared nonterminal {name}"),
        ),
        ValidationFinding::UnproductiveNonterminal(nt) => {
            let loc = nts
                .iter()
                .find(|d| d.name == *nt)
                .map(|d| d.loc)
                .unwrap_or_else(Location::start);
            sort_err(loc, format!("nonterminal {nt} derives no finite term"))
        }
        ValidationFinding::TypeAssignmentMismatch(id) => sort_err(
            prod_loc(*id),
            format!("production {id} disagrees with the declared nonterminal sorts"),
        ),
    })
}

fn parse_rule(
    form: &SExpr,
    grammar: &Grammar,
    signatures: &BTreeMap<String, Vec<RelArgSort>>,
) -> Result<(ProdId, SemanticRule), FrontendError> {
    let loc = form.loc();
    let rest = form.tagged("rule").expect("dispatched on rule");
    if rest.is_empty() {
        return Err(syntax(loc, "expected (rule <prod-id> ...)"));
    }
    let id = rest[0]
        .int()
        .filter(|i| (0..=i64::from(u32::MAX)).contains(i))
        .ok_or_else(|| syntax(rest[0].loc(), "expected a production id"))? as ProdId;
    let production = grammar
        .production(id)
        .ok_or(FrontendError::UnknownProduction(id))?;

    let args = kwargs(&rest[1..], loc)?;
    let mut env: Env = Env::new();
    let mut vars: Vec<(String, Sort)> = Vec::new();
    for binding in items(kwarg(&args, "vars", loc)?, "a binding list")? {
        let pair = items(binding, "a (variable sort) pair")?;
        if pair.len() != 2 {
            return Err(syntax(binding.loc(), "expected (variable sort)"));
        }
        let v = symbol(&pair[0], "a variable")?;
        if RESERVED.contains(&v) || v.contains('.') || v.starts_with('@') {
            return Err(sort_err(pair[0].loc(), format!("reserved variable name {v}")));
        }
        let s = parse_sort(&pair[1])?;
        if env.insert(v.to_string(), s.clone()).is_some() {
            return Err(sort_err(pair[0].loc(), format!("variable {v} declared twice")));
        }
        vars.push((v.to_string(), s));
    }

    let app = |e: &SExpr| parse_relation_app(e, production, signatures, &env);
    let body = items(kwarg(&args, "body", loc)?, "a premise list")?
        .iter()
        .map(app)
        .collect::<Result<Vec<_>, _>>()?;
    let head = app(kwarg(&args, "head", loc)?)?;

    let constraint_form = kwarg(&args, "constraint", loc)?;
    let constraint = parse_checked_formula(constraint_form, &env, Some(&Sort::Bool))?;

    // The head must define this production's own relation.
    if head.relation != sem_relation(&production.lhs) || head.term_ref() != Some(TermRef::SelfTerm)
    {
        return Err(sort_err(
            loc,
            format!(
                "the head must be {}(... @self ...)",
                sem_relation(&production.lhs)
            ),
        ));
    }

    let rule = SemanticRule {
        production: id,
        vars,
        body,
        constraint,
        head,
    };
    rule.check_closed()
        .map_err(|e| sort_err(loc, e.to_string()))?;
    Ok((id, rule))
}

fn parse_relation_app(
    e: &SExpr,
    production: &Production,
    signatures: &BTreeMap<String, Vec<RelArgSort>>,
    env: &Env,
) -> Result<RelationApp, FrontendError> {
    let loc = e.loc();
    let list = items(e, "a relation application")?;
    let rel = list
        .first()
        .and_then(SExpr::symbol)
        .ok_or_else(|| syntax(loc, "expected a relation name"))?;
    let sig = signatures
        .get(rel)
        .ok_or_else(|| sort_err(loc, format!("unknown relation {rel}")))?;
    if list.len() - 1 != sig.len() {
        return Err(sort_err(
            loc,
            format!("{rel} takes {} arguments, got {}", sig.len(), list.len() - 1),
        ));
    }
    let mut args = Vec::new();
    for (arg, slot) in list[1..].iter().zip(sig) {
        let parsed = match (arg.symbol(), slot) {
            (Some("@self"), RelArgSort::TermOf(nt)) => {
                if *nt != production.lhs {
                    return Err(sort_err(
                        arg.loc(),
                        format!("@self is a {} term, {rel} expects {nt}", production.lhs),
                    ));
                }
                RelArg::T(TermRef::SelfTerm)
            }
            (Some(s), RelArgSort::TermOf(nt)) if s.starts_with('@') => {
                let i: usize = s[1..]
                    .parse()
                    .map_err(|_| syntax(arg.loc(), "expected @self or @<child index>"))?;
                if i >= production.arity() {
                    return Err(sort_err(
                        arg.loc(),
                        format!("production {} has {} children", production.id, production.arity()),
                    ));
                }
                if production.rhs[i] != *nt {
                    return Err(sort_err(
                        arg.loc(),
                        format!("@{i} is a {} term, {rel} expects {nt}", production.rhs[i]),
                    ));
                }
                RelArg::T(TermRef::Child(i))
            }
            (_, RelArgSort::TermOf(_)) => {
                return Err(sort_err(arg.loc(), "expected a term argument (@self or @<i>)"))
            }
            (_, RelArgSort::Value(want)) => {
                RelArg::F(parse_checked_formula(arg, env, Some(want))?)
            }
        };
        args.push(parsed);
    }
    Ok(RelationApp::new(rel, args))
}

fn parse_spec(
    constraints: &[ConstraintForm],
    grammar: &Grammar,
    signatures: &BTreeMap<String, Vec<RelArgSort>>,
    builtin: Option<BuiltinSemantics>,
) -> Result<Specification, FrontendError> {
    if constraints.is_empty() {
        return Err(syntax(Location::start(), "problem has no constraints"));
    }
    let sig = &signatures[&sem_relation(&grammar.start)];
    let (input_sort, output_sort) = match sig.as_slice() {
        [RelArgSort::Value(i), RelArgSort::TermOf(_), RelArgSort::Value(o)] => (i, o),
        _ => unreachable!("frontend signatures are input/term/output"),
    };

    let mut examples: Vec<Example> = Vec::new();
    let mut formula: Option<(Formula, Location)> = None;
    for c in constraints {
        match c {
            ConstraintForm::Example { form, loc } => {
                if formula.is_some() {
                    return Err(sort_err(*loc, "cannot mix example and formula constraints"));
                }
                examples.push(parse_example(form, input_sort, output_sort, builtin)?);
            }
            ConstraintForm::Formula { form, loc } => {
                if !examples.is_empty() || formula.is_some() {
                    return Err(sort_err(
                        *loc,
                        "a problem takes several examples or one formula",
                    ));
                }
                let rest = form.tagged("formula").expect("dispatched");
                if rest.len() != 1 {
                    return Err(syntax(*loc, "expected (formula <constraint>)"));
                }
                let mut env: Env = input_sort
                    .state_fields()
                    .expect("input is a state")
                    .iter()
                    .cloned()
                    .collect();
                env.insert("out".into(), output_sort.clone());
                let f = parse_checked_formula(&rest[0], &env, Some(&Sort::Bool))?;
                formula = Some((f, *loc));
            }
        }
    }
    match formula {
        Some((formula, _)) => {
            let input = input_sort;
            Ok(Specification::Formula {
                verifiable: expression_grammar(grammar, input),
                formula,
            })
        }
        None => Ok(Specification::Examples(examples)),
    }
}

fn parse_example(
    form: &SExpr,
    input_sort: &Sort,
    output_sort: &Sort,
    builtin: Option<BuiltinSemantics>,
) -> Result<Example, FrontendError> {
    let loc = form.loc();
    let rest = form.tagged("example").expect("dispatched");
    let args = kwargs(rest, loc)?;
    let input_form = kwarg(&args, "input", loc)?;
    let output_form = kwarg(&args, "output", loc)?;

    if let Some(BuiltinSemantics::Regex(params)) = builtin {
        return parse_regex_example(input_form, output_form, params);
    }

    let input = match parse_value(input_form, input_sort)? {
        Value::State(v) => v,
        _ => unreachable!("input sort is a state"),
    };
    let output = parse_output(output_form, output_sort, input_sort)?;
    Ok(Example { input, output })
}

fn parse_regex_example(
    input_form: &SExpr,
    output_form: &SExpr,
    params: RegexParams,
) -> Result<Example, FrontendError> {
    let loc = input_form.loc();
    let bindings = items(input_form, "((w (<char>...)))")?;
    let word_form = bindings
        .first()
        .and_then(|b| b.tagged("w"))
        .filter(|rest| bindings.len() == 1 && rest.len() == 1)
        .ok_or_else(|| syntax(loc, "regex examples take :input ((w (<char>...)))"))?;
    let word = items(&word_form[0], "a character list")?
        .iter()
        .map(|c| {
            c.int()
                .filter(|v| (0..params.alphabet as i64).contains(v))
                .ok_or_else(|| {
                    sort_err(
                        c.loc(),
                        format!("characters are integers in 0..{}", params.alphabet),
                    )
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if word.len() > params.max_len {
        return Err(sort_err(
            loc,
            format!("string longer than the declared maximum {}", params.max_len),
        ));
    }
    let accept = match output_form.symbol() {
        Some("true") => true,
        Some("false") => false,
        _ => {
            return Err(sort_err(
                output_form.loc(),
                "regex outputs are true (accept) or false (reject)",
            ))
        }
    };
    Ok(Example {
        input: regex_example_input(params, &word),
        output: ExampleOutput::Partial(vec![(
            RegexParams::entry(0, word.len()),
            Value::Bool(accept),
        )]),
    })
}

fn parse_output(
    form: &SExpr,
    output_sort: &Sort,
    input_sort: &Sort,
) -> Result<ExampleOutput, FrontendError> {
    let loc = form.loc();
    // Binding list: ((x 15) (y 9)) constrains named output state variables.
    let is_binding_list = form
        .items()
        .is_some_and(|it| it.first().is_some_and(|f| f.items().is_some()));
    if is_binding_list {
        let fields = output_sort
            .state_fields()
            .ok_or_else(|| sort_err(loc, format!("output sort {output_sort} has no variables")))?;
        let mut pairs = Vec::new();
        for b in form.items().unwrap() {
            let pair = items(b, "a (variable value) pair")?;
            if pair.len() != 2 {
                return Err(syntax(b.loc(), "expected (variable value)"));
            }
            let name = symbol(&pair[0], "a variable")?;
            let fsort = fields
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| s)
                .ok_or_else(|| {
                    sort_err(pair[0].loc(), format!("unknown output variable {name}"))
                })?;
            if pairs.iter().any(|(n, _)| n == name) {
                return Err(sort_err(pair[0].loc(), format!("variable {name} bound twice")));
            }
            pairs.push((name.to_string(), parse_value(&pair[1], fsort)?));
        }
        if pairs.is_empty() {
            return Err(syntax(loc, "output binding list is empty"));
        }
        return Ok(ExampleOutput::Partial(pairs));
    }

    // Plain value: full output for scalar sorts, first-variable shorthand
    // for state outputs (the conventional "the answer lands in x").
    let value_attempt = match output_sort {
        Sort::State(fields) => {
            let (first, fsort) = &fields[0];
            parse_value(form, fsort).map(|v| ExampleOutput::Partial(vec![(first.clone(), v)]))
        }
        scalar => parse_value(form, scalar).map(ExampleOutput::Exact),
    };
    if let Ok(out) = value_attempt {
        return Ok(out);
    }

    // Otherwise a formula over the input variables and `out`.
    let mut env: Env = input_sort
        .state_fields()
        .expect("input is a state")
        .iter()
        .cloned()
        .collect();
    env.insert("out".into(), output_sort.clone());
    let f = parse_checked_formula(form, &env, Some(&Sort::Bool))?;
    Ok(ExampleOutput::Constraint(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples;

    fn xor_file() -> String {
        r#"
(set-info :format 1)
(set-info :name "xor-loop")
(declare-nonterminal Start
  :input (State (x (BitVec 32)) (y (BitVec 32)))
  :output (State (x (BitVec 32)) (y (BitVec 32))))
(declare-nonterminal B
  :input (State (x (BitVec 32)) (y (BitVec 32)))
  :output Bool)
(declare-nonterminal S
  :input (State (x (BitVec 32)) (y (BitVec 32)))
  :output (State (x (BitVec 32)) (y (BitVec 32))))
(declare-nonterminal E
  :input (State (x (BitVec 32)) (y (BitVec 32)))
  :output (BitVec 32))
(production 1 Start (while B S))
(production 2 B (bvult E E))
(production 3 S (seq S S))
(production 4 S (assign_x E))
(production 5 S (assign_y E))
(production 6 E (x))
(production 7 E (y))
(production 8 E (bvand E E))
(production 9 E (bvor E E))
(builtin-semantics impv)
(constraint (example :input ((x 6) (y 9)) :output 15))
(constraint (example :input ((x 44) (y 247)) :output 219))
(constraint (example :input ((x 14) (y 15)) :output 1))
(synth-start Start)
"#
        .to_string()
    }

    #[test]
    fn parses_the_xor_problem() {
        let p = parse_problem(&xor_file()).unwrap();
        assert_eq!(p.name.as_deref(), Some("xor-loop"));
        assert_eq!(p.grammar.productions.len(), 9);
        let ex = p.spec.examples().unwrap();
        assert_eq!(ex.len(), 3);
        let model = samples::xor_problem();
        assert_eq!(p.grammar, model.grammar);
        assert_eq!(p.semantics, model.semantics);
        assert_eq!(ex, model.spec.examples().unwrap());
    }

    #[test]
    fn empty_file_is_a_syntax_error() {
        match parse_problem("") {
            Err(FrontendError::Syntax { .. }) => {}
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_production_in_rule_is_reported_by_id() {
        let text = r#"
(set-info :format 1)
(declare-nonterminal E :input (State (x Int)) :output Int)
(production 1 E (x))
(rule 99 :vars ((G (State (x Int))) (v Int))
  :body ()
  :constraint (= v (fieldGet x G))
  :head (sem_E G @self v))
(constraint (example :input ((x 1)) :output 1))
(synth-start E)
"#;
        match parse_problem(text) {
            Err(FrontendError::UnknownProduction(99)) => {}
            other => panic!("expected UnknownProduction(99), got {other:?}"),
        }
    }

    #[test]
    fn explicit_rules_round_trip_through_the_model() {
        let text = r#"
(set-info :format 1)
(declare-nonterminal E :input (State (x Int)) :output Int)
(production 1 E (x))
(production 2 E (double E))
(rule 1 :vars ((G (State (x Int))) (v Int))
  :body ()
  :constraint (= v (fieldGet x G))
  :head (sem_E G @self v))
(rule 2 :vars ((G (State (x Int))) (v Int) (w Int))
  :body ((sem_E G @0 w))
  :constraint (= v (* 2 w))
  :head (sem_E G @self v))
(constraint (example :input ((x 3)) :output (= out 6)))
(synth-start E)
"#;
        let p = parse_problem(text).unwrap();
        assert_eq!(p.semantics[&2][0].body.len(), 1);
        match &p.spec.examples().unwrap()[0].output {
            ExampleOutput::Constraint(f) => {
                assert_eq!(f.to_string(), "(= out 6)");
            }
            other => panic!("expected a constraint output, got {other:?}"),
        }
    }

    #[test]
    fn regex_files_provide_their_own_grammar() {
        let text = r#"
(set-info :format 1)
(builtin-semantics regex :alphabet 2 :maxlen 3)
(constraint (example :input ((w (0 1))) :output true))
(constraint (example :input ((w ())) :output false))
"#;
        let p = parse_problem(text).unwrap();
        assert_eq!(p.grammar.start, "R");
        assert_eq!(p.grammar.productions.len(), 7);
        let ex = p.spec.examples().unwrap();
        assert_eq!(
            ex[0].output,
            ExampleOutput::Partial(vec![("m_0_2".into(), Value::Bool(true))])
        );
    }

    #[test]
    fn sort_errors_carry_locations() {
        let text = "(set-info :format 1)\n(declare-nonterminal E :input Int :output Int)";
        match parse_problem(text) {
            Err(FrontendError::Sort { location, .. }) => {
                assert_eq!(location.line, 2);
            }
            other => panic!("expected a sort error, got {other:?}"),
        }
    }
}

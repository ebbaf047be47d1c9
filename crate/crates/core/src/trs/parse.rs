//! Reader for the line-oriented `.trs` format.
//!
//! ```text
//! sort Nat
//! cons Z : Nat
//! cons S : Nat -> Nat
//! fun  loop : Nat Nat Nat -> Nat
//! pragma terminating
//! rule loop(a, bogus, Z)    -> loop(S(a), S(bogus), S(Z))
//! rule loop(a, bogus, S(x)) -> a
//! ```
//!
//! `#` starts a comment and a trailing `.` is ignored. Identifiers that are
//! not declared symbols are variables; a variable takes the sort of its first
//! occurrence.

use std::collections::HashMap;

use thiserror::Error;

use super::{Rule, Signature, Trs, WellFormednessError};
use crate::term::{FuncSymbol, Sort, SymbolKind, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// `line` is 0 for terms parsed outside a file.
    #[error("{}{error}", line_prefix(*.line))]
    WellFormedness { line: usize, error: WellFormednessError },
}

fn line_prefix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

impl TrsError {
    pub fn is_well_formedness(&self) -> bool {
        matches!(self, TrsError::WellFormedness { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Open,
    Close,
    Comma,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        match c {
            '(' => out.push(Token::Open),
            ')' => out.push(Token::Close),
            ',' => out.push(Token::Comma),
            c if c.is_whitespace() => {}
            c if is_ident_start(c) => {
                let mut end = start + c.len_utf8();
                while let Some(&(k, d)) = chars.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    end = k + d.len_utf8();
                    chars.next();
                }
                out.push(Token::Ident(text[start..end].to_string()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

/// Untyped syntax tree; `args` is `None` for a bare identifier.
#[derive(Debug, Clone)]
struct Raw {
    name: String,
    args: Option<Vec<Raw>>,
}

fn parse_raw(text: &str) -> Result<Raw, String> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let raw = parse_raw_at(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(format!("trailing input after term in {text:?}"));
    }
    Ok(raw)
}

fn parse_raw_at(tokens: &[Token], pos: &mut usize) -> Result<Raw, String> {
    let name = match tokens.get(*pos) {
        Some(Token::Ident(name)) => name.clone(),
        Some(t) => return Err(format!("expected identifier, found {t:?}")),
        None => return Err("expected identifier, found end of input".into()),
    };
    *pos += 1;
    if tokens.get(*pos) != Some(&Token::Open) {
        return Ok(Raw { name, args: None });
    }
    *pos += 1;
    let mut args = Vec::new();
    if tokens.get(*pos) == Some(&Token::Close) {
        *pos += 1;
        return Ok(Raw { name, args: Some(args) });
    }
    loop {
        args.push(parse_raw_at(tokens, pos)?);
        match tokens.get(*pos) {
            Some(Token::Comma) => *pos += 1,
            Some(Token::Close) => {
                *pos += 1;
                return Ok(Raw { name, args: Some(args) });
            }
            _ => return Err(format!("expected ',' or ')' in arguments of {name}")),
        }
    }
}

fn convert(
    sig: &Signature,
    raw: &Raw,
    expected: Option<&Sort>,
    vars: &mut HashMap<String, Sort>,
) -> Result<Term, WellFormednessError> {
    if let Some(f) = sig.lookup(&raw.name) {
        let given = raw.args.as_ref().map_or(0, Vec::len);
        if given != f.arity() {
            return Err(TermError::ArityMismatch {
                symbol: f.name().to_string(),
                arity: f.arity(),
                found: given,
            }
            .into());
        }
        if let Some(expected) = expected {
            if expected != f.result_sort() {
                return Err(TermError::SortMismatch {
                    expected: expected.clone(),
                    found: f.result_sort().clone(),
                }
                .into());
            }
        }
        let args = raw
            .args
            .iter()
            .flatten()
            .zip(f.arg_sorts())
            .map(|(a, s)| convert(sig, a, Some(s), vars))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Term::app(f.clone(), args)?);
    }
    if raw.args.is_some() {
        return Err(WellFormednessError::UndeclaredSymbol(raw.name.clone()));
    }
    let sort = match (vars.get(&raw.name), expected) {
        (Some(known), Some(expected)) if known != expected => {
            return Err(TermError::SortMismatch {
                expected: expected.clone(),
                found: known.clone(),
            }
            .into())
        }
        (Some(known), _) => known.clone(),
        (None, Some(expected)) => expected.clone(),
        (None, None) => return Err(WellFormednessError::UndeclaredSymbol(raw.name.clone())),
    };
    vars.insert(raw.name.clone(), sort.clone());
    Ok(Term::var(&raw.name, sort))
}

pub(super) fn parse_term_in(sig: &Signature, text: &str, sort: Option<&Sort>) -> Result<Term, TrsError> {
    let raw = parse_raw(text).map_err(|message| ParseError { line: 0, message })?;
    let mut vars = HashMap::new();
    convert(sig, &raw, sort, &mut vars).map_err(|error| TrsError::WellFormedness { line: 0, error })
}

fn strip_line(line: &str) -> &str {
    let line = line.split('#').next().unwrap_or("").trim();
    line.strip_suffix('.').map(str::trim_end).unwrap_or(line)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char)
}

/// Parses a `.trs` document.
pub fn parse_trs(text: &str) -> Result<Trs, TrsError> {
    let mut sig = Signature::new();
    let mut rule_lines: Vec<(usize, &str)> = Vec::new();
    let mut terminating = false;
    let mut symbol_lines: Vec<(usize, &str, &str)> = Vec::new();

    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = strip_line(line);
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let err = |message: String| TrsError::Parse(ParseError { line: lineno, message });
        match keyword {
            "sort" => {
                if !is_identifier(rest) {
                    return Err(err(format!("bad sort name {rest:?}")));
                }
                sig.add_sort(Sort::new(rest))
                    .map_err(|error| TrsError::WellFormedness { line: lineno, error })?;
            }
            "cons" | "fun" => symbol_lines.push((lineno, keyword, rest)),
            "pragma" => match rest {
                "terminating" => terminating = true,
                other => return Err(err(format!("unknown pragma {other:?}"))),
            },
            "rule" => rule_lines.push((lineno, rest)),
            other => return Err(err(format!("unknown declaration {other:?}"))),
        }
    }

    for (lineno, keyword, rest) in symbol_lines {
        let err = |message: String| TrsError::Parse(ParseError { line: lineno, message });
        let (name, profile) = rest
            .split_once(':')
            .ok_or_else(|| err("expected `NAME : SORTS`".into()))?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(err(format!("bad symbol name {name:?}")));
        }
        let words: Vec<&str> = profile.split_whitespace().filter(|w| *w != "->").collect();
        let Some((result, args)) = words.split_last() else {
            return Err(err(format!("missing result sort for {name}")));
        };
        let lookup = |s: &str| {
            sig.sort(s).cloned().ok_or_else(|| TrsError::WellFormedness {
                line: lineno,
                error: WellFormednessError::UndeclaredSort(s.to_string()),
            })
        };
        let arg_sorts = args.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>()?;
        let result = lookup(result)?;
        let kind = if keyword == "fun" {
            SymbolKind::Defined
        } else {
            SymbolKind::Constructor
        };
        sig.add_symbol(FuncSymbol::new(name, arg_sorts, result, kind))
            .map_err(|error| TrsError::WellFormedness { line: lineno, error })?;
    }

    let mut rules = Vec::new();
    let mut lines = Vec::new();
    for (lineno, rest) in rule_lines {
        let err = |message: String| TrsError::Parse(ParseError { line: lineno, message });
        let wf = |error: WellFormednessError| TrsError::WellFormedness { line: lineno, error };
        let (label, body) = match rest.split_once(':') {
            Some((label, body)) if is_identifier(label.trim()) => (Some(label.trim().to_string()), body),
            Some(_) => return Err(err("bad rule label".into())),
            None => (None, rest),
        };
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| err("expected `LHS -> RHS`".into()))?;
        let lhs_raw = parse_raw(lhs).map_err(&err)?;
        let rhs_raw = parse_raw(rhs).map_err(&err)?;
        if lhs_raw.args.is_none() && sig.lookup(&lhs_raw.name).is_none() {
            return Err(wf(WellFormednessError::VariableLhs { rule: rules.len() + 1 }));
        }
        let mut vars = HashMap::new();
        let lhs = convert(&sig, &lhs_raw, None, &mut vars).map_err(wf)?;
        let rhs = convert(&sig, &rhs_raw, Some(lhs.sort()), &mut vars).map_err(wf)?;
        let mut rule = Rule::new(lhs, rhs);
        rule.label = label;
        rules.push(rule);
        lines.push(lineno);
    }

    Trs::new(sig, rules, terminating).map_err(|error| {
        let rule = match &error {
            WellFormednessError::VariableLhs { rule }
            | WellFormednessError::ExtraVariable { rule, .. }
            | WellFormednessError::SortClash { rule, .. } => Some(*rule),
            _ => None,
        };
        let line = rule.and_then(|r| lines.get(r - 1).copied()).unwrap_or(0);
        TrsError::WellFormedness { line, error }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOGUS: &str = "
        sort Nat
        cons Z : Nat
        cons S : Nat -> Nat
        fun  loop : Nat Nat Nat -> Nat
        pragma terminating
        rule loop(a, bogus, Z)    -> loop(S(a), S(bogus), S(Z))
        rule loop(a, bogus, S(x)) -> a
    ";

    #[test]
    fn parses_bogus() {
        let trs = parse_trs(BOGUS).unwrap();
        let defined: Vec<_> = trs.defined_symbols().map(|f| f.name().to_string()).collect();
        assert_eq!(defined, ["loop"]);
        let z = trs.signature().lookup("Z").unwrap();
        let s = trs.signature().lookup("S").unwrap();
        assert!(trs.is_constructor(z) && trs.is_constructor(s));
        assert_eq!(trs.rules().len(), 2);
        assert!(trs.is_terminating_attested());
    }

    #[test]
    fn variable_lhs_rejected() {
        let err = parse_trs("sort Nat\ncons Z : Nat\nrule x -> Z").unwrap_err();
        assert!(matches!(
            err,
            TrsError::WellFormedness {
                line: 3,
                error: WellFormednessError::VariableLhs { .. }
            }
        ));
    }

    #[test]
    fn extra_variable_rejected() {
        let src = "sort Nat\ncons Z : Nat\nfun f : Nat -> Nat\nfun g : Nat -> Nat\nrule f(x) -> g(y)\nrule g(x) -> x";
        let err = parse_trs(src).unwrap_err();
        assert!(matches!(
            err,
            TrsError::WellFormedness {
                line: 5,
                error: WellFormednessError::ExtraVariable { .. }
            }
        ));
    }

    #[test]
    fn sort_clash_and_undeclared_symbol() {
        let src = "sort Nat\nsort Bool\ncons Z : Nat\ncons T : Bool\nfun f : Nat -> Nat\nrule f(x) -> T";
        assert!(parse_trs(src).unwrap_err().is_well_formedness());
        let src = "sort Nat\ncons Z : Nat\nfun f : Nat -> Nat\nrule f(x) -> h(x)";
        let err = parse_trs(src).unwrap_err();
        assert!(matches!(
            err,
            TrsError::WellFormedness {
                error: WellFormednessError::UndeclaredSymbol(_),
                ..
            }
        ));
        // inconsistent variable sorts within one rule
        let src = "sort Nat\nsort Bool\ncons Z : Nat\ncons T : Bool\nfun f : Nat Bool -> Nat\nrule f(x, x) -> Z";
        assert!(parse_trs(src).unwrap_err().is_well_formedness());
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = parse_trs("sort Nat\ncons Z : Nat\nfun f : Nat -> Nat\nrule f(x -> x").unwrap_err();
        assert!(matches!(err, TrsError::Parse(ParseError { line: 4, .. })));
        let err = parse_trs("sorts Nat").unwrap_err();
        assert!(matches!(err, TrsError::Parse(ParseError { line: 1, .. })));
    }

    #[test]
    fn comments_dots_labels_and_empty_parens() {
        let src = "# header\nsort Nat\ncons Z : Nat.\ncons S : Nat -> Nat\nfun f : Nat -> Nat\nrule base: f(Z()) -> Z.  # comment\n";
        let trs = parse_trs(src).unwrap();
        assert_eq!(trs.rules()[0].label.as_deref(), Some("base"));
        assert_eq!(trs.rules()[0].to_string(), "f(Z) -> Z");
    }

    #[test]
    fn display_round_trips() {
        let trs = parse_trs(BOGUS).unwrap();
        let again = parse_trs(&trs.to_string()).unwrap();
        assert_eq!(trs.to_string(), again.to_string());
        assert_eq!(trs.rules(), again.rules());
    }

    #[test]
    fn goal_terms() {
        let trs = parse_trs(BOGUS).unwrap();
        assert_eq!(
            trs.parse_ground_term("loop(Z, Z, S(Z))").unwrap().to_string(),
            "loop(Z, Z, S(Z))"
        );
        assert!(trs.parse_ground_term("loop(x, Z, Z)").is_err());
        assert!(trs.parse_term("x").is_err());
        let nat = trs.signature().sort("Nat").unwrap().clone();
        assert!(trs.parse_term_of_sort("x", &nat).unwrap().is_var());
    }
}

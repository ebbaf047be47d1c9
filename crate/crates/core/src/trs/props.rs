//! Structural checks: left-linearity, constructor discipline, critical pairs,
//! confluence, complete definedness.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{Rule, Trs};
use crate::rewrite::{Rewriter, DEFAULT_FUEL};
use crate::term::{unify, FuncSymbol, Position, Sort, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearityWitness {
    /// 1-based rule number.
    pub rule: usize,
    pub var: String,
}

impl fmt::Display for LinearityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: variable {} repeated", self.rule, self.var)
    }
}

pub fn check_left_linear(trs: &Trs) -> Result<(), LinearityWitness> {
    for (k, rule) in trs.rules().iter().enumerate() {
        if let Some(x) = rule.lhs.repeated_var() {
            return Err(LinearityWitness {
                rule: k + 1,
                var: x.name().to_string(),
            });
        }
    }
    Ok(())
}

/// Err carries the 1-based number of the first rule whose lhs is not a
/// pattern.
pub fn check_constructor_system(trs: &Trs) -> Result<(), usize> {
    for (k, rule) in trs.rules().iter().enumerate() {
        if !rule.lhs.args().iter().all(|a| trs.is_constructor_term(a)) {
            return Err(k + 1);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    pub left: Term,
    pub right: Term,
    pub overlay: bool,
    pub trivial: bool,
    /// 1-based rule numbers.
    pub outer_rule: usize,
    pub inner_rule: usize,
    pub position: Position,
}

impl fmt::Display for CriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.left, self.right)
    }
}

fn rename_apart(rule: &Rule, avoid: &BTreeSet<String>) -> Rule {
    rule.rename_vars(&|x: &Var| {
        let mut name = format!("{}'", x.name());
        while avoid.contains(&name) {
            name.push('\'');
        }
        x.with_name(&name)
    })
}

/// Overlaps of an inner rule into a non-variable position of an outer rule's
/// lhs. At the root each unordered pair is taken once and a rule never
/// overlaps itself.
pub fn critical_pairs(trs: &Trs) -> Vec<CriticalPair> {
    let rules = trs.rules();
    let mut out = Vec::new();
    for (i, outer) in rules.iter().enumerate() {
        let avoid: BTreeSet<String> = outer.lhs.vars().iter().map(|x| x.name().to_string()).collect();
        for (j, inner) in rules.iter().enumerate() {
            let inner = rename_apart(inner, &avoid);
            let mut sites = Vec::new();
            outer.lhs.visit(&mut |s, p| {
                if !s.is_var() {
                    sites.push((s.clone(), p.clone()));
                }
            });
            for (site, p) in sites {
                if p.is_root() && j <= i {
                    continue;
                }
                if site.root() != inner.lhs.root() {
                    continue;
                }
                let Some(sigma) = unify(&site, &inner.lhs) else {
                    continue;
                };
                let left = sigma.apply(&outer.rhs);
                let right = sigma
                    .apply(&outer.lhs)
                    .replace(&p, sigma.apply(&inner.rhs))
                    .expect("overlap position exists");
                out.push(CriticalPair {
                    trivial: left == right,
                    overlay: p.is_root(),
                    left,
                    right,
                    outer_rule: i + 1,
                    inner_rule: j + 1,
                    position: p,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Confluence {
    YesOrthogonal,
    YesKnuthBendix,
    No { left: Term, right: Term },
    Unknown { reason: String },
}

impl Confluence {
    pub fn is_confluent(&self) -> bool {
        matches!(self, Confluence::YesOrthogonal | Confluence::YesKnuthBendix)
    }
}

impl fmt::Display for Confluence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Confluence::YesOrthogonal => write!(f, "yes (orthogonal)"),
            Confluence::YesKnuthBendix => write!(f, "yes (critical pairs joinable, terminating)"),
            Confluence::No { left, right } => write!(f, "no, witness <{left}, {right}>"),
            Confluence::Unknown { reason } => write!(f, "unknown ({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fuel exhausted normalizing critical pair {pair}")]
pub struct ConfluenceFuelExhausted {
    pub pair: String,
}

pub fn check_confluence(trs: &Trs) -> Result<Confluence, ConfluenceFuelExhausted> {
    check_confluence_with_fuel(trs, DEFAULT_FUEL)
}

pub fn check_confluence_with_fuel(trs: &Trs, fuel: usize) -> Result<Confluence, ConfluenceFuelExhausted> {
    let cps = critical_pairs(trs);
    let linear = check_left_linear(trs).is_ok();
    if linear && cps.iter().all(|cp| cp.trivial && cp.overlay) {
        return Ok(Confluence::YesOrthogonal);
    }
    if !trs.is_terminating_attested() {
        let reason = if linear {
            "critical pairs present, termination not attested"
        } else {
            "not left-linear, termination not attested"
        };
        return Ok(Confluence::Unknown {
            reason: reason.to_string(),
        });
    }
    let rw = Rewriter::new(trs).with_fuel(fuel);
    for cp in &cps {
        let (l, r) = (rw.normalize(&cp.left), rw.normalize(&cp.right));
        match (l.normal_form(), r.normal_form()) {
            (Some(a), Some(b)) if a == b => {}
            (Some(a), Some(b)) => {
                return Ok(Confluence::No {
                    left: a.clone(),
                    right: b.clone(),
                })
            }
            _ => return Err(ConfluenceFuelExhausted { pair: cp.to_string() }),
        }
    }
    Ok(Confluence::YesKnuthBendix)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Uncovered {
    pub symbol: String,
    pub pattern: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub complete: bool,
    /// One uncovered constructor pattern per incompletely defined symbol.
    pub uncovered: Vec<Uncovered>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a constructor system (rule {rule})")]
pub struct NotAConstructorSystem {
    pub rule: usize,
}

/// Pattern-matrix case splitting on the declared constructors of each
/// argument sort. Witness variables are named `_1`, `_2`, ...
pub fn check_completely_defined(trs: &Trs) -> Result<CompletenessReport, NotAConstructorSystem> {
    check_constructor_system(trs).map_err(|rule| NotAConstructorSystem { rule })?;
    let mut uncovered = Vec::new();
    for f in trs.defined_symbols() {
        let rows: Vec<Vec<Term>> = trs.rules_of(f).map(|(_, r)| r.lhs.args().to_vec()).collect();
        let mut fresh = 0;
        let sorts = f.arg_sorts().to_vec();
        let mut splitter = Splitter { trs, fresh: &mut fresh };
        if let Some(args) = splitter.uncovered(rows, &sorts) {
            let pattern = Term::app(f.clone(), args).expect("well-sorted witness");
            let order: Vec<String> = pattern.vars_ordered().iter().map(|x| x.name().to_string()).collect();
            let pattern = pattern.rename_vars(&|x: &Var| {
                let k = order.iter().position(|n| n == x.name()).expect("collected above");
                x.with_name(&format!("_{}", k + 1))
            });
            uncovered.push(Uncovered {
                symbol: f.name().to_string(),
                pattern,
            });
        }
    }
    Ok(CompletenessReport {
        complete: uncovered.is_empty(),
        uncovered,
    })
}

struct Splitter<'a, 'b> {
    trs: &'a Trs,
    fresh: &'b mut usize,
}

impl Splitter<'_, '_> {
    fn fresh_var(&mut self, sort: &Sort) -> Term {
        *self.fresh += 1;
        Term::var(&format!("_{}", self.fresh), sort.clone())
    }

    fn wildcard(sort: &Sort) -> Term {
        Term::var("_", sort.clone())
    }

    /// Some argument vector matched by no row, if one exists.
    fn uncovered(&mut self, rows: Vec<Vec<Term>>, sorts: &[Sort]) -> Option<Vec<Term>> {
        let Some((sort, rest)) = sorts.split_first() else {
            return rows.is_empty().then(Vec::new);
        };
        let ctors: Vec<Arc<FuncSymbol>> = self
            .trs
            .signature()
            .constructors_of(sort)
            .filter(|c| self.trs.is_constructor(c))
            .cloned()
            .collect();
        if ctors.is_empty() || rows.iter().all(|r| r[0].is_var()) {
            // Sorts without constructors leave the whole column uncovered.
            let rows = if ctors.is_empty() { Vec::new() } else { rows };
            let tail: Vec<Vec<Term>> = rows.into_iter().map(|r| r[1..].to_vec()).collect();
            let head = self.fresh_var(sort);
            let mut w = self.uncovered(tail, rest)?;
            w.insert(0, head);
            return Some(w);
        }
        for c in ctors {
            let specialized: Vec<Vec<Term>> = rows
                .iter()
                .filter_map(|r| {
                    let mut out: Vec<Term> = match &r[0] {
                        Term::Var(_) => c.arg_sorts().iter().map(Self::wildcard).collect(),
                        Term::App(g, args) if **g == *c => args.to_vec(),
                        Term::App(..) => return None,
                    };
                    out.extend_from_slice(&r[1..]);
                    Some(out)
                })
                .collect();
            let mut sorts: Vec<Sort> = c.arg_sorts().to_vec();
            sorts.extend_from_slice(rest);
            if let Some(mut w) = self.uncovered(specialized, &sorts) {
                let tail = w.split_off(c.arity());
                let mut out = vec![Term::app(c.clone(), w).expect("well-sorted witness")];
                out.extend(tail);
                return Some(out);
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SevalDefinedness {
    pub defined: bool,
    /// The failing conjunct, when not defined.
    pub failing: Option<String>,
}

/// Completely defined and attested terminating.
pub fn check_seval_defined(trs: &Trs) -> SevalDefinedness {
    let failing = match check_completely_defined(trs) {
        Err(e) => Some(format!("completely-defined: {e}")),
        Ok(report) if !report.complete => {
            let w = &report.uncovered[0];
            Some(format!("completely-defined: {} uncovered", w.pattern))
        }
        Ok(_) if !trs.is_terminating_attested() => Some("terminating: not attested".to_string()),
        Ok(_) => None,
    };
    SevalDefinedness {
        defined: failing.is_none(),
        failing,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub left_linear: bool,
    pub left_linear_witness: Option<LinearityWitness>,
    pub constructor_system: bool,
    /// 1-based rule number of the first non-pattern lhs.
    pub constructor_system_witness: Option<usize>,
    /// Absent when the system is not a constructor system.
    pub completely_defined: Option<bool>,
    pub uncovered: Vec<Uncovered>,
    pub critical_pairs: Vec<CriticalPair>,
    pub confluence: Confluence,
    pub seval_defined: bool,
    pub seval_failing: Option<String>,
    pub terminating_attested: bool,
}

impl PropertyReport {
    pub fn compute(trs: &Trs, fuel: usize) -> PropertyReport {
        let ll = check_left_linear(trs);
        let cs = check_constructor_system(trs);
        let cd = check_completely_defined(trs).ok();
        let confluence =
            check_confluence_with_fuel(trs, fuel).unwrap_or_else(|e| Confluence::Unknown { reason: e.to_string() });
        let seval = check_seval_defined(trs);
        PropertyReport {
            left_linear: ll.is_ok(),
            left_linear_witness: ll.err(),
            constructor_system: cs.is_ok(),
            constructor_system_witness: cs.err(),
            completely_defined: cd.as_ref().map(|r| r.complete),
            uncovered: cd.map(|r| r.uncovered).unwrap_or_default(),
            critical_pairs: critical_pairs(trs),
            confluence,
            seval_defined: seval.defined,
            seval_failing: seval.failing,
            terminating_attested: trs.is_terminating_attested(),
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        write!(f, "left-linear: {}", yn(self.left_linear))?;
        if let Some(w) = &self.left_linear_witness {
            write!(f, " ({w})")?;
        }
        write!(f, "\nconstructor system: {}", yn(self.constructor_system))?;
        if let Some(rule) = self.constructor_system_witness {
            write!(f, " (rule {rule})")?;
        }
        match self.completely_defined {
            None => write!(f, "\ncompletely defined: n/a")?,
            Some(b) => {
                write!(f, "\ncompletely defined: {}", yn(b))?;
                if !self.uncovered.is_empty() {
                    let ws: Vec<String> = self.uncovered.iter().map(|u| u.pattern.to_string()).collect();
                    write!(f, " (uncovered: {})", ws.join(", "))?;
                }
            }
        }
        write!(f, "\ncritical pairs: {}", self.critical_pairs.len())?;
        write!(f, "\nconfluent: {}", self.confluence)?;
        write!(f, "\nterminating (attested): {}", yn(self.terminating_attested))?;
        write!(f, "\nSeval-defined: {}", yn(self.seval_defined))?;
        if let Some(why) = &self.seval_failing {
            write!(f, " ({why})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trs::parse_trs;

    const NON_CONFLUENT: &str = "
        sort N
        cons 0 : N
        cons s : N -> N
        fun f : N -> N
        fun g : N -> N
        pragma terminating
        rule f(0) -> 0
        rule f(s(x)) -> g(f(x))
        rule g(x) -> 0
        rule g(x) -> s(0)
    ";

    #[test]
    fn linearity_witness() {
        let trs = parse_trs("sort T\ncons a : T\nfun f : T T -> T\nrule f(x, x) -> a").unwrap();
        assert_eq!(
            check_left_linear(&trs),
            Err(LinearityWitness {
                rule: 1,
                var: "x".into()
            })
        );
        let empty = parse_trs("sort T\ncons a : T").unwrap();
        assert!(check_left_linear(&empty).is_ok());
        assert!(check_constructor_system(&empty).is_ok());
    }

    #[test]
    fn non_constructor_witness() {
        let trs = parse_trs(
            "sort T\ncons a : T\ncons b : T\nfun f : T T -> T\nfun g : T -> T\n\
             rule f(a, x) -> g(f(b, x))\nrule g(f(b, x)) -> x",
        )
        .unwrap();
        assert_eq!(check_constructor_system(&trs), Err(2));
        assert!(check_completely_defined(&trs).is_err());
    }

    #[test]
    fn self_overlap_below_root() {
        let trs = parse_trs("sort T\ncons a : T\nfun f : T -> T\nrule f(f(x)) -> x").unwrap();
        let cps = critical_pairs(&trs);
        assert_eq!(cps.len(), 1);
        assert!(cps[0].trivial && !cps[0].overlay);
        assert_eq!(cps[0].position.to_string(), "1");
        assert_eq!(cps[0].left, cps[0].right);
    }

    #[test]
    fn non_confluent_example() {
        let trs = parse_trs(NON_CONFLUENT).unwrap();
        let cps = critical_pairs(&trs);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].to_string(), "<0, s(0)>");
        assert!(cps[0].overlay && !cps[0].trivial);
        let c = check_confluence(&trs).unwrap();
        assert_eq!(c.to_string(), "no, witness <0, s(0)>");
        let unattested = trs.with_termination_attested(false);
        assert!(matches!(
            check_confluence(&unattested).unwrap(),
            Confluence::Unknown { .. }
        ));
    }

    #[test]
    fn no_rules_is_orthogonal() {
        let trs = parse_trs("sort T\ncons a : T").unwrap();
        assert_eq!(check_confluence(&trs).unwrap(), Confluence::YesOrthogonal);
    }

    #[test]
    fn knuth_bendix_joinable() {
        let trs = parse_trs(
            "sort T\ncons a : T\nfun f : T -> T\nfun g : T -> T\npragma terminating\n\
             rule f(g(x)) -> a\nrule g(x) -> x\nrule f(x) -> a",
        )
        .unwrap();
        assert_eq!(check_confluence(&trs).unwrap(), Confluence::YesKnuthBendix);
    }

    #[test]
    fn completeness_witnesses() {
        let trs = parse_trs(
            "sort N\ncons 0 : N\ncons s : N -> N\nfun f : N -> N\nfun g : N -> N\n\
             rule f(0) -> 0\nrule f(s(x)) -> f(x)\nrule g(s(0)) -> 0",
        )
        .unwrap();
        let report = check_completely_defined(&trs).unwrap();
        assert!(!report.complete);
        assert_eq!(report.uncovered.len(), 1);
        assert_eq!(report.uncovered[0].pattern.to_string(), "g(0)");
        let seval = check_seval_defined(&trs);
        assert!(!seval.defined);
        assert!(seval.failing.unwrap().contains("g(0)"));
    }

    #[test]
    fn nested_witness_and_wildcards() {
        let trs = parse_trs(
            "sort N\ncons 0 : N\ncons s : N -> N\nfun g : N N -> N\n\
             rule g(0, y) -> 0\nrule g(s(0), 0) -> 0\nrule g(x, s(y)) -> 0",
        )
        .unwrap();
        let report = check_completely_defined(&trs).unwrap();
        assert_eq!(report.uncovered[0].pattern.to_string(), "g(s(s(_1)), 0)");
        let total = parse_trs("sort N\ncons 0 : N\nfun f : N -> N\npragma terminating\nrule f(x) -> x").unwrap();
        assert!(check_completely_defined(&total).unwrap().complete);
        assert!(check_seval_defined(&total).defined);
        let unattested = total.with_termination_attested(false);
        assert_eq!(
            check_seval_defined(&unattested).failing.as_deref(),
            Some("terminating: not attested")
        );
    }

    #[test]
    fn uninhabited_sort_is_not_covered() {
        let trs = parse_trs("sort N\nsort E\ncons 0 : N\nfun f : E -> N\nrule f(x) -> 0").unwrap();
        assert!(!check_completely_defined(&trs).unwrap().complete);
        let trs = parse_trs("sort N\nsort E\ncons 0 : N\nfun f : E N -> N\nrule f(x, 0) -> 0").unwrap();
        assert!(!check_completely_defined(&trs).unwrap().complete);
    }
}

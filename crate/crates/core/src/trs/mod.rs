//! Rewrite systems over a many-sorted signature, the `.trs` text format, and
//! the structural property checks.

mod parse;
mod props;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{FuncSymbol, Sort, SymbolKind, Term, Var};

pub use parse::{parse_trs, ParseError, TrsError};
pub use props::{
    check_completely_defined, check_confluence, check_constructor_system, check_left_linear, check_seval_defined,
    critical_pairs, CompletenessReport, Confluence, CriticalPair, LinearityWitness, PropertyReport, SevalDefinedness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WellFormednessError {
    #[error("rule {rule}: left-hand side is a variable")]
    VariableLhs { rule: usize },
    #[error("rule {rule}: variable {var} occurs in the right-hand side only")]
    ExtraVariable { rule: usize, var: String },
    #[error("rule {rule}: left-hand side has sort {lhs}, right-hand side has sort {rhs}")]
    SortClash { rule: usize, lhs: Sort, rhs: Sort },
    #[error("undeclared symbol {0}")]
    UndeclaredSymbol(String),
    #[error("undeclared sort {0}")]
    UndeclaredSort(String),
    #[error("duplicate declaration of {0}")]
    Duplicate(String),
    #[error("{0}")]
    Term(#[from] crate::term::TermError),
}

/// Sorts and function symbols in declaration order.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorts: Vec<Sort>,
    symbols: Vec<Arc<FuncSymbol>>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, sort: Sort) -> Result<(), WellFormednessError> {
        if self.sorts.contains(&sort) {
            return Err(WellFormednessError::Duplicate(sort.to_string()));
        }
        self.sorts.push(sort);
        Ok(())
    }

    pub fn add_symbol(&mut self, symbol: FuncSymbol) -> Result<Arc<FuncSymbol>, WellFormednessError> {
        if self.index.contains_key(symbol.name()) {
            return Err(WellFormednessError::Duplicate(symbol.name().to_string()));
        }
        for s in symbol.arg_sorts().iter().chain([symbol.result_sort()]) {
            if !self.sorts.contains(s) {
                return Err(WellFormednessError::UndeclaredSort(s.to_string()));
            }
        }
        let symbol = Arc::new(symbol);
        self.index.insert(symbol.name().to_string(), self.symbols.len());
        self.symbols.push(symbol.clone());
        Ok(symbol)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn symbols(&self) -> &[Arc<FuncSymbol>] {
        &self.symbols
    }

    pub fn lookup(&self, name: &str) -> Option<&Arc<FuncSymbol>> {
        self.index.get(name).map(|&k| &self.symbols[k])
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.name() == name)
    }

    /// Symbols of the given result sort, in declaration order.
    pub fn symbols_of_sort<'a>(&'a self, sort: &'a Sort) -> impl Iterator<Item = &'a Arc<FuncSymbol>> {
        self.symbols.iter().filter(move |f| f.result_sort() == sort)
    }

    pub fn constructors_of<'a>(&'a self, sort: &'a Sort) -> impl Iterator<Item = &'a Arc<FuncSymbol>> {
        self.symbols_of_sort(sort).filter(|f| f.is_constructor())
    }

    fn with_kinds(&self, defined: &HashSet<String>) -> Signature {
        let symbols: Vec<_> = self
            .symbols
            .iter()
            .map(|f| {
                let kind = if defined.contains(f.name()) {
                    SymbolKind::Defined
                } else {
                    SymbolKind::Constructor
                };
                Arc::new(f.with_kind(kind))
            })
            .collect();
        Signature {
            sorts: self.sorts.clone(),
            symbols,
            index: self.index.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Rule {
        Rule { lhs, rhs, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Rule {
        self.label = Some(label.into());
        self
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn rename_vars(&self, f: &impl Fn(&Var) -> Var) -> Rule {
        Rule {
            lhs: self.lhs.rename_vars(f),
            rhs: self.rhs.rename_vars(f),
            label: self.label.clone(),
        }
    }

    /// Variables renamed to `v1, v2, ...` in order of first occurrence, for
    /// comparison up to alpha-equivalence.
    pub fn canonical(&self) -> Rule {
        let order = self.lhs.vars_ordered();
        let map: HashMap<Var, Var> = order
            .iter()
            .enumerate()
            .map(|(k, v)| (v.clone(), v.with_name(&format!("v{}", k + 1))))
            .collect();
        Rule {
            lhs: self.lhs.rename_vars(&|v| map[v].clone()),
            rhs: self
                .rhs
                .rename_vars(&|v| map.get(v).cloned().unwrap_or_else(|| v.clone())),
            label: None,
        }
    }

    pub fn alpha_eq(&self, other: &Rule) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A many-sorted term rewriting system.
#[derive(Debug, Clone)]
pub struct Trs {
    signature: Signature,
    rules: Vec<Rule>,
    terminating: bool,
    defined: HashSet<String>,
    constants: BTreeMap<Sort, Term>,
}

impl Trs {
    /// Classifies symbols (defined iff rooting some lhs), validates every rule,
    /// and fixes the per-sort designated constants.
    pub fn new(signature: Signature, rules: Vec<Rule>, terminating: bool) -> Result<Trs, WellFormednessError> {
        for (k, rule) in rules.iter().enumerate() {
            if rule.lhs.is_var() {
                return Err(WellFormednessError::VariableLhs { rule: k + 1 });
            }
            for t in [&rule.lhs, &rule.rhs] {
                for f in t.symbols() {
                    if signature.lookup(f.name()).map(|g| g.arity()) != Some(f.arity()) {
                        return Err(WellFormednessError::UndeclaredSymbol(f.name().to_string()));
                    }
                }
            }
            if rule.lhs.sort() != rule.rhs.sort() {
                return Err(WellFormednessError::SortClash {
                    rule: k + 1,
                    lhs: rule.lhs.sort().clone(),
                    rhs: rule.rhs.sort().clone(),
                });
            }
            let lhs_vars = rule.lhs.vars();
            if let Some(x) = rule.rhs.vars().into_iter().find(|x| !lhs_vars.contains(x)) {
                return Err(WellFormednessError::ExtraVariable {
                    rule: k + 1,
                    var: x.name().to_string(),
                });
            }
        }
        let defined: HashSet<String> = rules
            .iter()
            .filter_map(|r| r.lhs.root().map(|f| f.name().to_string()))
            .collect();
        let signature = signature.with_kinds(&defined);
        let remap = |f: &Arc<FuncSymbol>| signature.lookup(f.name()).cloned().expect("checked above");
        let rules = rules
            .into_iter()
            .map(|r| Rule {
                lhs: r.lhs.map_symbols(&remap),
                rhs: r.rhs.map_symbols(&remap),
                label: r.label,
            })
            .collect();
        let constants = designated_constants(&signature);
        Ok(Trs {
            signature,
            rules,
            terminating,
            defined,
            constants,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_terminating_attested(&self) -> bool {
        self.terminating
    }

    pub fn with_termination_attested(mut self, attested: bool) -> Trs {
        self.terminating = attested;
        self
    }

    pub fn with_rules(&self, rules: Vec<Rule>) -> Result<Trs, WellFormednessError> {
        Trs::new(self.signature.clone(), rules, self.terminating)
    }

    pub fn is_defined(&self, f: &FuncSymbol) -> bool {
        self.defined.contains(f.name())
    }

    pub fn is_constructor(&self, f: &FuncSymbol) -> bool {
        !self.is_defined(f)
    }

    pub fn defined_symbols(&self) -> impl Iterator<Item = &Arc<FuncSymbol>> {
        self.signature.symbols().iter().filter(|f| self.is_defined(f))
    }

    /// Rules whose lhs is rooted by `f`, with their 0-based indices.
    pub fn rules_of<'a>(&'a self, f: &'a FuncSymbol) -> impl Iterator<Item = (usize, &'a Rule)> {
        self.rules.iter().enumerate().filter(move |(_, r)| r.lhs.has_root(f))
    }

    /// Terms built only from constructors and variables.
    pub fn is_constructor_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => self.is_constructor(f) && args.iter().all(|a| self.is_constructor_term(a)),
        }
    }

    pub fn is_value(&self, t: &Term) -> bool {
        t.is_ground() && self.is_constructor_term(t)
    }

    /// The designated ground constructor term of a sort: its first declared
    /// constant, else the smallest ground constructor term by depth and
    /// declaration order.
    pub fn constant_of(&self, sort: &Sort) -> Option<&Term> {
        self.constants.get(sort)
    }

    pub fn constants(&self) -> &BTreeMap<Sort, Term> {
        &self.constants
    }

    /// Parses a term in this signature. Undeclared identifiers become
    /// variables whose sorts are inferred from their position.
    pub fn parse_term(&self, text: &str) -> Result<Term, TrsError> {
        parse::parse_term_in(&self.signature, text, None)
    }

    pub fn parse_term_of_sort(&self, text: &str, sort: &Sort) -> Result<Term, TrsError> {
        parse::parse_term_in(&self.signature, text, Some(sort))
    }

    /// Parses a ground term; variables are rejected.
    pub fn parse_ground_term(&self, text: &str) -> Result<Term, TrsError> {
        let t = self.parse_term(text)?;
        if let Some(x) = t.vars().into_iter().next() {
            return Err(TrsError::Parse(ParseError {
                line: 0,
                message: format!("goal must be ground, found variable {x}"),
            }));
        }
        Ok(t)
    }

    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| r.lhs.size() + r.rhs.size()).sum()
    }

    /// Rules compared up to alpha-equivalence and order.
    pub fn same_rules_modulo_alpha(&self, other: &Trs) -> bool {
        let mine: BTreeSet<String> = self.rules.iter().map(|r| r.canonical().to_string()).collect();
        let theirs: BTreeSet<String> = other.rules.iter().map(|r| r.canonical().to_string()).collect();
        mine == theirs
    }
}

fn designated_constants(sig: &Signature) -> BTreeMap<Sort, Term> {
    let mut out: BTreeMap<Sort, Term> = BTreeMap::new();
    for sort in sig.sorts() {
        if let Some(c) = sig.constructors_of(sort).find(|c| c.arity() == 0) {
            out.insert(sort.clone(), Term::app_unchecked(c.clone(), Vec::new()));
        }
    }
    // Sorts without a constant: grow by depth, first constructor in
    // declaration order whose argument sorts are already inhabited.
    loop {
        let mut added = Vec::new();
        for sort in sig.sorts() {
            if out.contains_key(sort) {
                continue;
            }
            let found = sig.constructors_of(sort).find_map(|c| {
                let args: Option<Vec<Term>> = c.arg_sorts().iter().map(|s| out.get(s).cloned()).collect();
                args.map(|args| Term::app_unchecked(c.clone(), args))
            });
            if let Some(t) = found {
                added.push((sort.clone(), t));
            }
        }
        if added.is_empty() {
            break;
        }
        out.extend(added);
    }
    out
}

impl fmt::Display for Trs {
    /// The `.trs` text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.signature.sorts() {
            writeln!(f, "sort {s}")?;
        }
        for sym in self.signature.symbols() {
            let keyword = if self.is_defined(sym) { "fun " } else { "cons" };
            write!(f, "{keyword} {} :", sym.name())?;
            for s in sym.arg_sorts() {
                write!(f, " {s}")?;
            }
            if sym.arity() > 0 {
                write!(f, " ->")?;
            }
            writeln!(f, " {}", sym.result_sort())?;
        }
        if self.terminating {
            writeln!(f, "pragma terminating")?;
        }
        for r in &self.rules {
            match &r.label {
                Some(label) => writeln!(f, "rule {label}: {r}")?,
                None => writeln!(f, "rule {r}")?,
            }
        }
        Ok(())
    }
}

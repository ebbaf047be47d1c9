//! Syntactic erasures: deleting argument positions from symbols, terms and
//! rules, and compressing the erased system.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::RedundancySet;
use crate::rewrite::{Caps, ReductionGraph, Semantics};
use crate::term::{FuncSymbol, Sort, Substitution, Term};
use crate::trs::{Rule, Signature, Trs, WellFormednessError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErasureError {
    #[error("sort {0} has no ground constructor term")]
    NoGroundConstant(Sort),
    #[error("{symbol} has no argument {index}")]
    IndexOutOfRange { symbol: String, index: usize },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("erased system is ill-formed: {0}")]
    WellFormedness(#[from] WellFormednessError),
}

/// Argument positions (1-based) to delete, per symbol name. Symbols not
/// listed keep all their arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SyntacticErasure(BTreeMap<String, BTreeSet<usize>>);

impl SyntacticErasure {
    pub fn identity() -> SyntacticErasure {
        SyntacticErasure::default()
    }

    /// Checks every symbol exists and every index is in range.
    pub fn new(
        entries: impl IntoIterator<Item = (String, BTreeSet<usize>)>,
        sig: &Signature,
    ) -> Result<SyntacticErasure, ErasureError> {
        let mut out = SyntacticErasure::identity();
        for (f, indices) in entries {
            let sym = sig.lookup(&f).ok_or_else(|| ErasureError::UnknownSymbol(f.clone()))?;
            if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > sym.arity()) {
                return Err(ErasureError::IndexOutOfRange { symbol: f, index: bad });
            }
            if !indices.is_empty() {
                out.0.insert(f, indices);
            }
        }
        Ok(out)
    }

    pub fn get(&self, f: &str) -> Option<&BTreeSet<usize>> {
        self.0.get(f)
    }

    pub fn erases(&self, f: &str, i: usize) -> bool {
        self.0.get(f).is_some_and(|s| s.contains(&i))
    }

    pub fn is_identity(&self) -> bool {
        self.0.values().all(|s| s.is_empty())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<usize>)> {
        self.0.iter()
    }

    /// Surviving argument indices of `f`, in order.
    pub fn kept(&self, f: &FuncSymbol) -> Vec<usize> {
        (1..=f.arity()).filter(|&i| !self.erases(f.name(), i)).collect()
    }

    fn erase_symbol(&self, f: &FuncSymbol, name: &str) -> FuncSymbol {
        let sorts: Vec<Sort> = self.kept(f).iter().map(|&i| f.arg_sorts()[i - 1].clone()).collect();
        FuncSymbol::new(name, sorts, f.result_sort().clone(), f.kind())
    }
}

impl fmt::Display for SyntacticErasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, s)| {
                let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                format!("{g}: {{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Deletes the analyzer's redundant arguments; constructors are never
/// reported, so they keep all theirs.
pub fn erasure_from_analysis(red: &RedundancySet, sig: &Signature) -> Result<SyntacticErasure, ErasureError> {
    SyntacticErasure::new(red.iter().map(|(f, s)| (f.clone(), s.clone())), sig)
}

/// Erases a term, building erased symbols on the fly under their original
/// names.
pub fn erase_term(t: &Term, rho: &SyntacticErasure) -> Term {
    let mut cache = HashMap::new();
    erase_with(t, rho, &mut |f: &Arc<FuncSymbol>| {
        cache
            .entry(f.name().to_string())
            .or_insert_with(|| Arc::new(rho.erase_symbol(f, f.name())))
            .clone()
    })
}

fn erase_with(t: &Term, rho: &SyntacticErasure, sym: &mut impl FnMut(&Arc<FuncSymbol>) -> Arc<FuncSymbol>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            let g = sym(f);
            let args = rho
                .kept(f)
                .into_iter()
                .map(|i| erase_with(&args[i - 1], rho, sym))
                .collect();
            Term::app_unchecked(g, args)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Origin {
    pub erased: String,
    pub original: String,
    /// Original 1-based indices of the surviving arguments, in order.
    pub kept: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ErasureWarning {
    /// Exploring the reducts of a rhs hit the caps; reduction abandoned.
    FuelExhausted { rule: usize, rhs: Term },
    /// Some reduction sequence from a rhs cycles.
    NotNormalizing { rule: usize, rhs: Term },
    /// A rhs has several normal forms.
    AmbiguousNormalForm { rule: usize, forms: Vec<Term> },
}

impl fmt::Display for ErasureWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErasureWarning::FuelExhausted { rule, rhs } => {
                write!(f, "fuel exhausted normalizing the right-hand side {rhs} of rule {rule}; returning the unreduced erasure")
            }
            ErasureWarning::NotNormalizing { rule, rhs } => {
                write!(
                    f,
                    "right-hand side {rhs} of rule {rule} has an infinite reduction; returning the unreduced erasure"
                )
            }
            ErasureWarning::AmbiguousNormalForm { rule, forms } => {
                let forms: Vec<String> = forms.iter().map(|t| t.to_string()).collect();
                write!(
                    f,
                    "right-hand side of rule {rule} has normal forms {}; returning the unreduced erasure",
                    forms.join(", ")
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ErasedTrs {
    pub trs: Trs,
    pub rho: SyntacticErasure,
    pub origin: Vec<Origin>,
    pub warnings: Vec<ErasureWarning>,
    symbols: HashMap<String, Arc<FuncSymbol>>,
}

impl ErasedTrs {
    /// τ_ρ into the erased signature, for terms over the original one.
    pub fn erase_term(&self, t: &Term) -> Term {
        erase_with(t, &self.rho, &mut |f: &Arc<FuncSymbol>| self.symbols[f.name()].clone())
    }

    pub fn erased_symbol(&self, original: &str) -> Option<&Arc<FuncSymbol>> {
        self.symbols.get(original)
    }

    pub fn is_reduction_aborted(&self) -> bool {
        !self.warnings.is_empty()
    }
}

/// Erases signature and rules. Erased symbols get `suffix` appended when at
/// least one argument is deleted. Variables that disappear from a lhs are
/// replaced in the rhs by the designated constant of their sort. The
/// termination attestation is not carried over.
pub fn erase_trs(trs: &Trs, rho: &SyntacticErasure, suffix: &str) -> Result<ErasedTrs, ErasureError> {
    for (f, indices) in rho.iter() {
        let sym = trs
            .signature()
            .lookup(f)
            .ok_or_else(|| ErasureError::UnknownSymbol(f.clone()))?;
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > sym.arity()) {
            return Err(ErasureError::IndexOutOfRange {
                symbol: f.clone(),
                index: bad,
            });
        }
    }
    let mut sig = Signature::new();
    for s in trs.signature().sorts() {
        sig.add_sort(s.clone())?;
    }
    let mut symbols = HashMap::new();
    let mut origin = Vec::new();
    for f in trs.signature().symbols() {
        let name = if rho.get(f.name()).is_some_and(|s| !s.is_empty()) {
            format!("{}{suffix}", f.name())
        } else {
            f.name().to_string()
        };
        let g = sig.add_symbol(rho.erase_symbol(f, &name))?;
        origin.push(Origin {
            erased: name,
            original: f.name().to_string(),
            kept: rho.kept(f),
        });
        symbols.insert(f.name().to_string(), g);
    }
    let mut rules = Vec::new();
    for rule in trs.rules() {
        let lookup = &mut |f: &Arc<FuncSymbol>| symbols[f.name()].clone();
        let lhs = erase_with(&rule.lhs, rho, lookup);
        let rhs = erase_with(&rule.rhs, rho, lookup);
        let survivors = lhs.vars();
        let mut sigma = Substitution::new();
        for x in rule.lhs.vars().into_iter().filter(|x| !survivors.contains(x)) {
            let c = trs
                .constant_of(x.sort())
                .ok_or_else(|| ErasureError::NoGroundConstant(x.sort().clone()))?;
            sigma.insert(x, c.clone()).expect("constant has the variable's sort");
        }
        let mut erased = Rule::new(lhs, sigma.apply(&rhs));
        if let Some(label) = &rule.label {
            erased = erased.with_label(label.clone());
        }
        rules.push(erased);
    }
    Ok(ErasedTrs {
        trs: Trs::new(sig, rules, false)?,
        rho: rho.clone(),
        origin,
        warnings: Vec::new(),
        symbols,
    })
}

/// Exploration caps derived from a fuel budget.
pub fn reduction_caps(fuel: usize) -> Caps {
    Caps {
        max_terms: (fuel / 2).max(1),
        max_edges: fuel.saturating_mul(2).max(1),
        ..Caps::default()
    }
}

/// Compression: drop trivial rules, replace every rhs by its unique normal
/// form under the remaining rules, drop rules that became trivial, and drop
/// alpha-equivalent duplicates, keeping input order. Normal forms are found
/// by exploring all reducts within caps derived from `fuel`; when a rhs
/// cannot be normalized that way the unreduced erasure is returned with a
/// warning.
pub fn reduced_erasure(e: &ErasedTrs, fuel: usize) -> Result<ErasedTrs, ErasureError> {
    let caps = reduction_caps(fuel);
    let nontrivial: Vec<Rule> = e.trs.rules().iter().filter(|r| !r.is_trivial()).cloned().collect();
    let system = e.trs.with_rules(nontrivial.clone())?;
    let mut normalized = Vec::new();
    for (k, rule) in nontrivial.iter().enumerate() {
        match unique_normal_form(&rule.rhs, &system, caps) {
            Ok(nf) => normalized.push(Rule {
                lhs: rule.lhs.clone(),
                rhs: nf,
                label: rule.label.clone(),
            }),
            Err(mut w) => {
                let number = original_number(e, &nontrivial, k);
                match &mut w {
                    ErasureWarning::FuelExhausted { rule, .. }
                    | ErasureWarning::NotNormalizing { rule, .. }
                    | ErasureWarning::AmbiguousNormalForm { rule, .. } => *rule = number,
                }
                let mut out = e.clone();
                out.warnings.push(w);
                return Ok(out);
            }
        }
    }
    let mut rules: Vec<Rule> = Vec::new();
    for rule in normalized {
        if rule.is_trivial() || rules.iter().any(|r| r.alpha_eq(&rule)) {
            continue;
        }
        rules.push(rule);
    }
    Ok(ErasedTrs {
        trs: e.trs.with_rules(rules)?,
        rho: e.rho.clone(),
        origin: e.origin.clone(),
        warnings: Vec::new(),
        symbols: e.symbols.clone(),
    })
}

/// 1-based position in the erased system of the k-th nontrivial rule.
fn original_number(e: &ErasedTrs, nontrivial: &[Rule], k: usize) -> usize {
    let target = &nontrivial[k];
    let before = nontrivial[..k].iter().filter(|r| *r == target).count();
    e.trs
        .rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| *r == target)
        .nth(before)
        .map(|(n, _)| n + 1)
        .unwrap_or(k + 1)
}

fn unique_normal_form(t: &Term, trs: &Trs, caps: Caps) -> Result<Term, ErasureWarning> {
    let graph = ReductionGraph::explore(t, trs, caps);
    if graph.is_truncated() {
        return Err(ErasureWarning::FuelExhausted {
            rule: 0,
            rhs: t.clone(),
        });
    }
    if graph.has_cycle() {
        return Err(ErasureWarning::NotNormalizing {
            rule: 0,
            rhs: t.clone(),
        });
    }
    let forms = graph.semantics(Semantics::Nf).terms;
    if forms.len() == 1 {
        Ok(forms.into_iter().next().expect("one normal form"))
    } else {
        Err(ErasureWarning::AmbiguousNormalForm {
            rule: 0,
            forms: forms.into_iter().collect(),
        })
    }
}

/// Renames rule variables canonically, for comparing erased programs.
pub fn canonical_rules(trs: &Trs) -> BTreeSet<String> {
    trs.rules().iter().map(|r| r.canonical().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trs::parse_trs;

    const APPLAST: &str = "
        sort Nat
        sort List
        cons Z : Nat
        cons S : Nat -> Nat
        cons nil : List
        cons cons : Nat List -> List
        fun applast : List Nat -> Nat
        fun lastnew : Nat List Nat -> Nat
        pragma terminating
        rule applast(nil, z) -> z
        rule applast(cons(x, xs), z) -> lastnew(x, xs, z)
        rule lastnew(x, nil, z) -> z
        rule lastnew(x, cons(y, ys), z) -> lastnew(y, ys, z)
    ";

    fn rho(trs: &Trs, entries: &[(&str, &[usize])]) -> SyntacticErasure {
        SyntacticErasure::new(
            entries
                .iter()
                .map(|(f, s)| (f.to_string(), s.iter().copied().collect())),
            trs.signature(),
        )
        .unwrap()
    }

    fn rules(trs: &Trs) -> Vec<String> {
        trs.rules().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn applast_erasure_and_reduction() {
        let trs = parse_trs(APPLAST).unwrap();
        let rho = rho(&trs, &[("applast", &[1]), ("lastnew", &[1, 2])]);
        let e = erase_trs(&trs, &rho, "").unwrap();
        assert_eq!(
            rules(&e.trs),
            [
                "applast(z) -> z",
                "applast(z) -> lastnew(z)",
                "lastnew(z) -> z",
                "lastnew(z) -> lastnew(z)"
            ]
        );
        let r = reduced_erasure(&e, 10_000).unwrap();
        assert!(r.warnings.is_empty());
        assert_eq!(rules(&r.trs), ["applast(z) -> z", "lastnew(z) -> z"]);
        let primed = erase_trs(&trs, &rho, "'").unwrap();
        let primed = reduced_erasure(&primed, 10_000).unwrap();
        assert_eq!(rules(&primed.trs), ["applast'(z) -> z", "lastnew'(z) -> z"]);
    }

    #[test]
    fn erased_term_and_arity() {
        let trs = parse_trs(APPLAST).unwrap();
        let rho = rho(&trs, &[("applast", &[1])]);
        let t = trs.parse_term("applast(cons(x, xs), z)").unwrap();
        let erased = erase_term(&t, &rho);
        assert_eq!(erased.to_string(), "applast(z)");
        assert_eq!(erased.root().unwrap().arity(), 1);
        assert_eq!(erase_term(&t, &SyntacticErasure::identity()), t);
    }

    #[test]
    fn index_out_of_range() {
        let trs = parse_trs(APPLAST).unwrap();
        let err = SyntacticErasure::new([("applast".to_string(), BTreeSet::from([3]))], trs.signature());
        assert!(matches!(err, Err(ErasureError::IndexOutOfRange { .. })));
    }

    #[test]
    fn removed_variables_become_constants() {
        let trs = parse_trs(
            "sort Nat\ncons Z : Nat\ncons S : Nat -> Nat\nfun loop : Nat Nat Nat -> Nat\n\
             rule loop(a, bogus, Z) -> loop(S(a), S(bogus), S(Z))\nrule loop(a, bogus, S(x)) -> a",
        )
        .unwrap();
        let rho = rho(&trs, &[("loop", &[2])]);
        let e = erase_trs(&trs, &rho, "").unwrap();
        assert_eq!(rules(&e.trs), ["loop(a, Z) -> loop(S(a), S(Z))", "loop(a, S(x)) -> a"]);
    }

    #[test]
    fn looping_rhs_aborts_reduction() {
        let trs = parse_trs(
            "sort T\ncons a : T\ncons c : T -> T\nfun h : T T -> T\n\
             rule h(a, y) -> a\nrule h(c(x), y) -> h(x, c(y))",
        )
        .unwrap();
        let rho = rho(&trs, &[("h", &[1])]);
        let e = erase_trs(&trs, &rho, "").unwrap();
        assert_eq!(rules(&e.trs), ["h(y) -> a", "h(y) -> h(c(y))"]);
        let r = reduced_erasure(&e, crate::rewrite::DEFAULT_FUEL).unwrap();
        assert!(matches!(
            r.warnings[..],
            [ErasureWarning::FuelExhausted { rule: 2, .. }]
        ));
        assert_eq!(rules(&r.trs), rules(&e.trs));
    }
}

//! The redundancy analyzer: the variable case, the pattern case over
//! (f,i)-triples, and the fixpoint combining them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::rewrite::{Joinability, Rewriter, DEFAULT_FUEL};
use crate::term::{pos_fi, unify_up_to_arg_oriented, FuncSymbol, Position, Sort, Substitution, Term, Var};
use crate::trs::{PropertyReport, Rule, Trs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Gate {
    #[serde(rename = "LL")]
    LeftLinear,
    #[serde(rename = "CS")]
    ConstructorSystem,
    #[serde(rename = "C")]
    Confluent,
    #[serde(rename = "ED")]
    SevalDefined,
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gate::LeftLinear => "LL",
            Gate::ConstructorSystem => "CS",
            Gate::Confluent => "C",
            Gate::SevalDefined => "ED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("precondition unmet: {}", .0.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))]
    PreconditionUnmet(Vec<Gate>),
    #[error("sort {0} has no ground constructor term")]
    NoGroundConstant(Sort),
    #[error("{symbol} has no argument {index}")]
    NoSuchArgument { symbol: String, index: usize },
}

/// The preconditions each method needs, read off a property report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gates {
    pub left_linear: bool,
    pub constructor_system: bool,
    pub confluent: bool,
    pub seval_defined: bool,
}

impl Gates {
    pub fn from_report(report: &PropertyReport) -> Gates {
        Gates {
            left_linear: report.left_linear,
            constructor_system: report.constructor_system,
            confluent: report.confluence.is_confluent(),
            seval_defined: report.seval_defined,
        }
    }

    pub fn of(trs: &Trs, fuel: usize) -> Gates {
        Gates::from_report(&PropertyReport::compute(trs, fuel))
    }

    pub fn variable_unmet(&self) -> Vec<Gate> {
        let mut out = Vec::new();
        if !self.left_linear {
            out.push(Gate::LeftLinear);
        }
        if !self.constructor_system {
            out.push(Gate::ConstructorSystem);
        }
        out
    }

    pub fn pattern_unmet(&self) -> Vec<Gate> {
        let mut out = self.variable_unmet();
        if !self.confluent {
            out.push(Gate::Confluent);
        }
        if !self.seval_defined {
            out.push(Gate::SevalDefined);
        }
        out
    }
}

/// Redundant argument indices (1-based) per defined symbol name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RedundancySet(BTreeMap<String, BTreeSet<usize>>);

impl RedundancySet {
    pub fn new() -> RedundancySet {
        RedundancySet::default()
    }

    pub fn contains(&self, f: &str, i: usize) -> bool {
        self.0.get(f).is_some_and(|s| s.contains(&i))
    }

    pub fn get(&self, f: &str) -> Option<&BTreeSet<usize>> {
        self.0.get(f)
    }

    pub fn insert(&mut self, f: &str, i: usize) -> bool {
        self.0.entry(f.to_string()).or_default().insert(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<usize>)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.values().all(|s| s.is_empty())
    }

    /// Number of (f, i) entries.
    pub fn len(&self) -> usize {
        self.0.values().map(|s| s.len()).sum()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &String> {
        self.0.iter().filter(|(_, s)| !s.is_empty()).map(|(f, _)| f)
    }
}

impl<'a> FromIterator<(&'a str, usize)> for RedundancySet {
    fn from_iter<I: IntoIterator<Item = (&'a str, usize)>>(iter: I) -> Self {
        let mut out = RedundancySet::new();
        for (f, i) in iter {
            out.insert(f, i);
        }
        out
    }
}

impl fmt::Display for RedundancySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(g, s)| format!("{g}: {}", fmt_indices(s)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn fmt_indices(s: &BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Whether `p` lies strictly below argument `i` of some `g`-rooted subterm
/// with `i ∈ known(g)`.
pub fn is_redundant_position(t: &Term, p: &Position, known: &RedundancySet) -> bool {
    let mut node = t;
    for &k in p.path() {
        if let Some(g) = node.root() {
            if known.contains(g.name(), k) {
                return true;
            }
        }
        match node.args().get(k - 1) {
            Some(next) => node = next,
            None => return false,
        }
    }
    false
}

/// The positions of `t` licensed as redundant by already-known redundant
/// arguments: everything at or below `q.i` where `root(t|q) = g` and
/// `i ∈ known(g)`.
pub fn redundant_positions(t: &Term, known: &RedundancySet) -> BTreeSet<Position> {
    t.positions()
        .into_iter()
        .filter(|p| is_redundant_position(t, p, known))
        .collect()
}

/// Every occurrence of `x` in `r` is at a known-redundant position or under
/// argument `i` of an `f`-rooted subterm.
pub fn is_fi_redundant_var(x: &Var, r: &Term, f: &FuncSymbol, i: usize, known: &RedundancySet) -> bool {
    r.var_positions(x)
        .iter()
        .all(|p| is_redundant_position(r, p, known) || under_fi(r, p, f, i))
}

fn under_fi(t: &Term, p: &Position, f: &FuncSymbol, i: usize) -> bool {
    let mut node = t;
    for &k in p.path() {
        if k == i && node.has_root(f) {
            return true;
        }
        node = &node.args()[k - 1];
    }
    false
}

fn check_index(f: &FuncSymbol, i: usize) -> Result<(), AnalysisError> {
    if i == 0 || i > f.arity() {
        return Err(AnalysisError::NoSuchArgument {
            symbol: f.name().to_string(),
            index: i,
        });
    }
    Ok(())
}

pub fn variable_case(trs: &Trs, f: &FuncSymbol, i: usize, known: &RedundancySet) -> Result<bool, AnalysisError> {
    let unmet = Gates::of(trs, DEFAULT_FUEL).variable_unmet();
    if !unmet.is_empty() {
        return Err(AnalysisError::PreconditionUnmet(unmet));
    }
    variable_case_ungated(trs, f, i, known)
}

/// The i-th lhs argument of every rule of `f` is a variable that is
/// (f,i)-redundant in the rule's rhs. Purely syntactic.
fn variable_case_ungated(trs: &Trs, f: &FuncSymbol, i: usize, known: &RedundancySet) -> Result<bool, AnalysisError> {
    check_index(f, i)?;
    if !trs.is_defined(f) {
        return Ok(false);
    }
    Ok(trs.rules_of(f).all(|(_, rule)| match &rule.lhs.args()[i - 1] {
        Term::Var(x) => is_fi_redundant_var(x, &rule.rhs, f, i, known),
        Term::App(..) => false,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiTriple {
    #[serde(serialize_with = "symbol_name")]
    pub f: Arc<FuncSymbol>,
    pub i: usize,
    /// 0-based rule indices into the TRS.
    pub index1: usize,
    pub index2: usize,
    pub rule1: Rule,
    /// The second rule, renamed apart from the first.
    pub rule2: Rule,
    pub sigma: Substitution,
}

fn symbol_name<S: serde::Serializer>(f: &Arc<FuncSymbol>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(f.name())
}

/// Renames the variables of `rule` that clash with `avoid` by priming them.
fn prime_clashes(rule: &Rule, avoid: &BTreeSet<String>) -> Rule {
    let own: BTreeSet<String> = rule.lhs.vars().iter().map(|x| x.name().to_string()).collect();
    rule.rename_vars(&|x: &Var| {
        if !avoid.contains(x.name()) {
            return x.clone();
        }
        let mut name = format!("{}'", x.name());
        while avoid.contains(&name) || own.contains(&name) {
            name.push('\'');
        }
        x.with_name(&name)
    })
}

/// Unordered pairs of distinct rules of `f`, in rule order, whose lhss unify
/// once argument `i` is deleted. The later rule is renamed apart by priming
/// clashing variables; variable-variable bindings map first-rule variables
/// to second-rule ones.
pub fn fi_triples(trs: &Trs, f: &Arc<FuncSymbol>, i: usize) -> Result<Vec<FiTriple>, AnalysisError> {
    check_index(f, i)?;
    let rules: Vec<(usize, &Rule)> = trs.rules_of(f).collect();
    let mut out = Vec::new();
    for (a, &(k, r1)) in rules.iter().enumerate() {
        let vars1: BTreeSet<Var> = r1.lhs.vars();
        let names1: BTreeSet<String> = vars1.iter().map(|x| x.name().to_string()).collect();
        for &(m, r2) in &rules[a + 1..] {
            let r2 = prime_clashes(r2, &names1);
            let orient = |x: &Var, y: &Var| match (vars1.contains(x), vars1.contains(y)) {
                (true, false) => true,
                (false, true) => false,
                _ => x > y,
            };
            let sigma = unify_up_to_arg_oriented(&r1.lhs, &r2.lhs, i, &orient).expect("rules of the same symbol");
            if let Some(sigma) = sigma {
                out.push(FiTriple {
                    f: f.clone(),
                    i,
                    index1: k,
                    index2: m,
                    rule1: r1.clone(),
                    rule2: r2,
                    sigma,
                });
            }
        }
    }
    Ok(out)
}

fn constant(constants: &BTreeMap<Sort, Term>, sort: &Sort) -> Result<Term, AnalysisError> {
    constants
        .get(sort)
        .cloned()
        .ok_or_else(|| AnalysisError::NoGroundConstant(sort.clone()))
}

/// Replaces the outermost positions under argument `i` of `f`-rooted
/// subterms of `r` that share a variable with `l|i` by the designated
/// constant of their sort. Identity when `l|i` is a variable.
pub fn tau_transform(
    r: &Term,
    l: &Term,
    f: &FuncSymbol,
    i: usize,
    constants: &BTreeMap<Sort, Term>,
) -> Result<Term, AnalysisError> {
    check_index(f, i)?;
    let li = &l.args()[i - 1];
    if li.is_var() {
        return Ok(r.clone());
    }
    let shared = li.vars();
    let q: Vec<Position> = pos_fi(r, f, i)
        .into_iter()
        .filter(|p| {
            let sub = r.subterm(p).expect("position of r");
            sub.vars().iter().any(|x| shared.contains(x))
        })
        .collect();
    let minimal: Vec<&Position> = q
        .iter()
        .filter(|p| !q.iter().any(|o| o != *p && o.is_prefix_of(p)))
        .collect();
    let mut out = r.clone();
    for p in minimal {
        let sort = out.subterm(p).expect("position of r").sort().clone();
        out = out.replace(p, constant(constants, &sort)?).expect("position of r");
    }
    Ok(out)
}

/// The triple's unifier extended with every variable of either rule's i-th
/// lhs argument mapped to its sort's designated constant.
pub fn sigma_c(triple: &FiTriple, constants: &BTreeMap<Sort, Term>) -> Result<Substitution, AnalysisError> {
    let i = triple.i;
    let mut ground: BTreeSet<Var> = triple.rule1.lhs.args()[i - 1].vars();
    ground.extend(triple.rule2.lhs.args()[i - 1].vars());
    let mut pairs: Vec<(Var, Term)> = triple
        .sigma
        .iter()
        .filter(|(x, _)| !ground.contains(*x))
        .map(|(x, t)| (x.clone(), t.clone()))
        .collect();
    for x in ground {
        let c = constant(constants, x.sort())?;
        pairs.push((x, c));
    }
    Ok(pairs.into_iter().collect())
}

/// The instantiated rhs pair of one triple and its joinability verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleCheck {
    /// 1-based rule numbers.
    pub rule1: usize,
    pub rule2: usize,
    pub sigma: Substitution,
    pub sigma_c: Substitution,
    pub tau1: Term,
    pub tau2: Term,
    pub left: Term,
    pub right: Term,
    pub joinability: Joinability,
}

pub fn check_triple(trs: &Trs, triple: &FiTriple, rw: &Rewriter<'_>) -> Result<TripleCheck, AnalysisError> {
    let (f, i) = (&triple.f, triple.i);
    let tau1 = tau_transform(&triple.rule1.rhs, &triple.rule1.lhs, f, i, trs.constants())?;
    let tau2 = tau_transform(&triple.rule2.rhs, &triple.rule2.lhs, f, i, trs.constants())?;
    let sc = sigma_c(triple, trs.constants())?;
    let left = sc.apply(&tau1);
    let right = sc.apply(&tau2);
    let joinability = rw.joinable(&left, &right);
    Ok(TripleCheck {
        rule1: triple.index1 + 1,
        rule2: triple.index2 + 1,
        sigma: triple.sigma.clone(),
        sigma_c: sc,
        tau1,
        tau2,
        left,
        right,
        joinability,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PatternVerdict {
    Redundant {
        triples: Vec<TripleCheck>,
    },
    NotRedundant {
        reason: String,
    },
    /// Some triple could not be decided within the fuel.
    Indeterminate {
        reason: String,
    },
}

impl PatternVerdict {
    pub fn is_redundant(&self) -> bool {
        matches!(self, PatternVerdict::Redundant { .. })
    }
}

pub fn pattern_case(
    trs: &Trs,
    f: &Arc<FuncSymbol>,
    i: usize,
    known: &RedundancySet,
    fuel: usize,
) -> Result<PatternVerdict, AnalysisError> {
    let unmet = Gates::of(trs, fuel).pattern_unmet();
    if !unmet.is_empty() {
        return Err(AnalysisError::PreconditionUnmet(unmet));
    }
    pattern_case_ungated(trs, f, i, known, &Rewriter::new(trs).with_fuel(fuel))
}

fn pattern_case_ungated(
    trs: &Trs,
    f: &Arc<FuncSymbol>,
    i: usize,
    known: &RedundancySet,
    rw: &Rewriter<'_>,
) -> Result<PatternVerdict, AnalysisError> {
    check_index(f, i)?;
    if !trs.is_defined(f) {
        return Ok(PatternVerdict::NotRedundant {
            reason: "constructor".to_string(),
        });
    }
    for (k, rule) in trs.rules_of(f) {
        for x in rule.lhs.args()[i - 1].vars() {
            if !is_fi_redundant_var(&x, &rule.rhs, f, i, known) {
                return Ok(PatternVerdict::NotRedundant {
                    reason: format!("rule {}: variable {x} is not ({},{i})-redundant", k + 1, f.name()),
                });
            }
        }
    }
    let mut checks = Vec::new();
    for triple in fi_triples(trs, f, i)? {
        let check = check_triple(trs, &triple, rw)?;
        match &check.joinability {
            Joinability::Joinable { .. } => checks.push(check),
            Joinability::NotJoinable { .. } => {
                return Ok(PatternVerdict::NotRedundant {
                    reason: format!(
                        "triple (rules {}, {}): {} and {} not joinable",
                        check.rule1, check.rule2, check.left, check.right
                    ),
                })
            }
            Joinability::Indeterminate => {
                return Ok(PatternVerdict::Indeterminate {
                    reason: format!(
                        "triple (rules {}, {}): fuel exhausted joining {} and {}",
                        check.rule1, check.rule2, check.left, check.right
                    ),
                })
            }
        }
    }
    Ok(PatternVerdict::Redundant { triples: checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Variable,
    Pattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub fuel: usize,
    pub max_rounds: usize,
    pub methods: BTreeSet<Method>,
    /// Visit candidates in an order shuffled with this seed. The result
    /// must not depend on it.
    pub candidate_seed: Option<u64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            fuel: DEFAULT_FUEL,
            max_rounds: 64,
            methods: BTreeSet::from([Method::Variable, Method::Pattern]),
            candidate_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Justification {
    VariableCase { round: usize },
    PatternCase { round: usize, triples: Vec<TripleCheck> },
}

impl Justification {
    pub fn round(&self) -> usize {
        match self {
            Justification::VariableCase { round } | Justification::PatternCase { round, .. } => *round,
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Justification::VariableCase { .. } => Method::Variable,
            Justification::PatternCase { .. } => Method::Pattern,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub symbol: String,
    pub index: usize,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Undecided {
    pub symbol: String,
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub redundant: RedundancySet,
    /// One per redundant (f, i), ordered by symbol name then index.
    pub entries: Vec<Entry>,
    /// Pattern-case checks left indeterminate by fuel in the last round.
    pub unknown: Vec<Undecided>,
    pub properties: PropertyReport,
    pub gates: Gates,
    /// Why a method was not run.
    pub notes: Vec<String>,
    pub rounds: usize,
    /// Rewrite steps spent by each method.
    pub steps: BTreeMap<Method, usize>,
}

impl Analysis {
    pub fn justification(&self, f: &str, i: usize) -> Option<&Justification> {
        self.entries
            .iter()
            .find(|e| e.symbol == f && e.index == i)
            .map(|e| &e.justification)
    }

    pub fn count(&self, method: Method) -> usize {
        self.entries
            .iter()
            .filter(|e| e.justification.method() == method)
            .count()
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.redundant.is_empty() {
            writeln!(f, "no redundant arguments")?;
        }
        for (g, indices) in self.redundant.iter().filter(|(_, s)| !s.is_empty()) {
            let why: Vec<String> = self
                .entries
                .iter()
                .filter(|e| &e.symbol == g)
                .map(|e| {
                    let method = match e.justification.method() {
                        Method::Variable => "variable-case",
                        Method::Pattern => "pattern-case",
                    };
                    if indices.len() == 1 {
                        format!("{method}, round {}", e.justification.round())
                    } else {
                        format!("{}: {method} r{}", e.index, e.justification.round())
                    }
                })
                .collect();
            writeln!(f, "{g}: {} ({})", fmt_indices(indices), why.join("; "))?;
        }
        for u in &self.unknown {
            writeln!(f, "{} argument {}: unknown ({})", u.symbol, u.index, u.reason)?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

/// Runs the enabled, precondition-satisfied methods in rounds against the
/// redundancy known at the start of each round until nothing new is found.
pub fn analyze(trs: &Trs, cfg: &AnalysisConfig) -> Analysis {
    let properties = PropertyReport::compute(trs, cfg.fuel);
    let gates = Gates::from_report(&properties);
    let mut notes = Vec::new();
    let var_on = cfg.methods.contains(&Method::Variable) && {
        let unmet = gates.variable_unmet();
        if !unmet.is_empty() {
            notes.push(format!(
                "variable case disabled: {}",
                describe_unmet(&unmet, &properties)
            ));
        }
        unmet.is_empty()
    };
    let pat_on = cfg.methods.contains(&Method::Pattern) && {
        let unmet = gates.pattern_unmet();
        if !unmet.is_empty() {
            notes.push(format!(
                "pattern case disabled: {}",
                describe_unmet(&unmet, &properties)
            ));
        }
        unmet.is_empty()
    };

    let mut candidates: Vec<(Arc<FuncSymbol>, usize)> = trs
        .defined_symbols()
        .flat_map(|f| (1..=f.arity()).map(move |i| (f.clone(), i)))
        .collect();
    if let Some(seed) = cfg.candidate_seed {
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let var_rw = Rewriter::new(trs).with_fuel(cfg.fuel);
    let pat_rw = Rewriter::new(trs).with_fuel(cfg.fuel);
    let mut known = RedundancySet::new();
    let mut found: BTreeMap<(String, usize), Justification> = BTreeMap::new();
    let mut unknown = BTreeMap::new();
    let mut rounds = 0;
    while rounds < cfg.max_rounds.max(1) {
        rounds += 1;
        let mut added = Vec::new();
        unknown.clear();
        for (f, i) in &candidates {
            if known.contains(f.name(), *i) {
                continue;
            }
            if var_on && variable_case_ungated(trs, f, *i, &known).unwrap_or(false) {
                added.push((f.name().to_string(), *i, Justification::VariableCase { round: rounds }));
                continue;
            }
            if pat_on {
                match pattern_case_ungated(trs, f, *i, &known, &pat_rw) {
                    Ok(PatternVerdict::Redundant { triples }) => {
                        added.push((
                            f.name().to_string(),
                            *i,
                            Justification::PatternCase { round: rounds, triples },
                        ));
                    }
                    Ok(PatternVerdict::Indeterminate { reason }) => {
                        unknown.insert((f.name().to_string(), *i), reason);
                    }
                    Ok(PatternVerdict::NotRedundant { .. }) => {}
                    Err(e) => {
                        unknown.insert((f.name().to_string(), *i), e.to_string());
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for (f, i, why) in added {
            known.insert(&f, i);
            found.insert((f, i), why);
        }
    }

    Analysis {
        redundant: known,
        entries: found
            .into_iter()
            .map(|((symbol, index), justification)| Entry {
                symbol,
                index,
                justification,
            })
            .collect(),
        unknown: unknown
            .into_iter()
            .map(|((symbol, index), reason)| Undecided { symbol, index, reason })
            .collect(),
        properties,
        gates,
        notes,
        rounds,
        steps: BTreeMap::from([
            (Method::Variable, var_rw.steps_taken()),
            (Method::Pattern, pat_rw.steps_taken()),
        ]),
    }
}

fn describe_unmet(unmet: &[Gate], report: &PropertyReport) -> String {
    let parts: Vec<String> = unmet
        .iter()
        .map(|g| match g {
            Gate::LeftLinear => match &report.left_linear_witness {
                Some(w) => format!("not left-linear ({w})"),
                None => "not left-linear".to_string(),
            },
            Gate::ConstructorSystem => match report.constructor_system_witness {
                Some(rule) => format!("not a constructor system (rule {rule})"),
                None => "not a constructor system".to_string(),
            },
            Gate::Confluent => format!("confluence = {}", report.confluence),
            Gate::SevalDefined => match &report.seval_failing {
                Some(why) => format!("not Seval-defined ({why})"),
                None => "not Seval-defined".to_string(),
            },
        })
        .collect();
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trs::parse_trs;

    pub(crate) const APPLAST: &str = "
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

    fn sym(trs: &Trs, name: &str) -> Arc<FuncSymbol> {
        trs.signature().lookup(name).unwrap().clone()
    }

    #[test]
    fn redundant_positions_under_known_arguments() {
        let trs = parse_trs(APPLAST).unwrap();
        let t = trs.parse_term("lastnew(y, ys, z)").unwrap();
        assert!(redundant_positions(&t, &RedundancySet::new()).is_empty());
        let known: RedundancySet = [("lastnew", 1)].into_iter().collect();
        let ps: Vec<String> = redundant_positions(&t, &known).iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["1"]);
        let known: RedundancySet = [("lastnew", 1), ("lastnew", 2)].into_iter().collect();
        let ps: Vec<String> = redundant_positions(&t, &known).iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["1", "2"]);
    }

    #[test]
    fn fi_redundant_variables() {
        let trs = parse_trs(APPLAST).unwrap();
        let lastnew = sym(&trs, "lastnew");
        let r = trs.parse_term("lastnew(y, ys, z)").unwrap();
        let var = |n: &str| r.vars().into_iter().find(|x| x.name() == n).unwrap();
        let none = RedundancySet::new();
        assert!(is_fi_redundant_var(&var("ys"), &r, &lastnew, 2, &none));
        assert!(!is_fi_redundant_var(&var("y"), &r, &lastnew, 2, &none));
        let known: RedundancySet = [("lastnew", 1)].into_iter().collect();
        assert!(is_fi_redundant_var(&var("y"), &r, &lastnew, 2, &known));
        let absent = Var::new("x", var("y").sort().clone());
        assert!(is_fi_redundant_var(&absent, &r, &lastnew, 2, &none));
    }

    #[test]
    fn variable_case_on_lastnew() {
        let trs = parse_trs(APPLAST).unwrap();
        let lastnew = sym(&trs, "lastnew");
        let none = RedundancySet::new();
        assert!(variable_case(&trs, &lastnew, 1, &none).unwrap());
        assert!(!variable_case(&trs, &lastnew, 2, &none).unwrap());
        assert!(!variable_case(&trs, &lastnew, 3, &none).unwrap());
    }

    #[test]
    fn lastnew_triple_intermediates() {
        let trs = parse_trs(APPLAST).unwrap();
        let lastnew = sym(&trs, "lastnew");
        let triples = fi_triples(&trs, &lastnew, 2).unwrap();
        assert_eq!(triples.len(), 1);
        let t = &triples[0];
        assert_eq!(t.sigma.to_string(), "{x -> x', z -> z'}");
        assert_eq!(
            t.rule2.to_string(),
            "lastnew(x', cons(y, ys), z') -> lastnew(y, ys, z')"
        );
        let tau2 = tau_transform(&t.rule2.rhs, &t.rule2.lhs, &lastnew, 2, trs.constants()).unwrap();
        assert_eq!(tau2.to_string(), "lastnew(y, nil, z')");
        let tau1 = tau_transform(&t.rule1.rhs, &t.rule1.lhs, &lastnew, 2, trs.constants()).unwrap();
        assert_eq!(tau1.to_string(), "z");
        let sc = sigma_c(t, trs.constants()).unwrap();
        assert_eq!(sc.to_string(), "{x -> x', y -> Z, ys -> nil, z -> z'}");
        let check = check_triple(&trs, t, &Rewriter::new(&trs)).unwrap();
        assert_eq!(check.right.to_string(), "lastnew(Z, nil, z')");
        assert_eq!(
            check.joinability.clone(),
            Joinability::Joinable {
                common: trs
                    .parse_term_of_sort("z'", trs.signature().sort("Nat").unwrap())
                    .unwrap()
            }
        );
    }

    #[test]
    fn applast_triple_sigma_c() {
        let trs = parse_trs(APPLAST).unwrap();
        let applast = sym(&trs, "applast");
        let triples = fi_triples(&trs, &applast, 1).unwrap();
        assert_eq!(triples.len(), 1);
        let sc = sigma_c(&triples[0], trs.constants()).unwrap();
        assert_eq!(sc.to_string(), "{x -> Z, xs -> nil, z -> z'}");
    }

    #[test]
    fn applast_rounds() {
        let trs = parse_trs(APPLAST).unwrap();
        let a = analyze(&trs, &AnalysisConfig::default());
        assert_eq!(a.redundant.to_string(), "{applast: {1}, lastnew: {1,2}}");
        assert_eq!(
            a.justification("lastnew", 1),
            Some(&Justification::VariableCase { round: 1 })
        );
        assert_eq!(
            a.justification("lastnew", 2).map(|j| (j.method(), j.round())),
            Some((Method::Pattern, 2))
        );
        assert_eq!(
            a.justification("applast", 1).map(|j| (j.method(), j.round())),
            Some((Method::Pattern, 3))
        );
        assert_eq!(a.steps[&Method::Variable], 0);
    }

    #[test]
    fn pattern_case_gated_on_confluence() {
        let trs = parse_trs(
            "sort N\ncons 0 : N\ncons s : N -> N\nfun f : N -> N\nfun g : N -> N\npragma terminating\n\
             rule f(0) -> 0\nrule f(s(x)) -> g(f(x))\nrule g(x) -> 0\nrule g(x) -> s(0)",
        )
        .unwrap();
        let f = sym(&trs, "f");
        assert_eq!(
            pattern_case(&trs, &f, 1, &RedundancySet::new(), 100),
            Err(AnalysisError::PreconditionUnmet(vec![Gate::Confluent]))
        );
        let a = analyze(&trs, &AnalysisConfig::default());
        assert_eq!(a.count(Method::Pattern), 0);
        assert!(a.notes.iter().any(|n| n.contains("<0, s(0)>")));
    }

    #[test]
    fn mutual_recursion_tau() {
        let trs = parse_trs(
            "sort Nat\ncons Z : Nat\ncons S : Nat -> Nat\nfun f : Nat Nat -> Nat\n\
             rule f(Z, y) -> Z\nrule f(S(x), y) -> f(f(x, y), y)",
        )
        .unwrap();
        let f = sym(&trs, "f");
        let rule = &trs.rules()[1];
        let tau = tau_transform(&rule.rhs, &rule.lhs, &f, 1, trs.constants()).unwrap();
        assert_eq!(tau.to_string(), "f(Z, y)");
    }
}

//! Rewriting: single steps under a strategy, fuel-bounded normalization,
//! joinability by normal forms, and bounded reachable-set semantics.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use crate::term::{match_into, Position, Term};
use crate::trs::Trs;

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    LeftmostInnermost,
    LeftmostOutermost,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "innermost" | "leftmost-innermost" | "li" => Ok(Strategy::LeftmostInnermost),
            "outermost" | "leftmost-outermost" | "lo" => Ok(Strategy::LeftmostOutermost),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

/// One rewrite step: the redex position, the 0-based index of the applied
/// rule, and the resulting term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub position: Position,
    pub rule: usize,
    pub result: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum EvalOutcome {
    /// A constructor ground term.
    Value {
        term: Term,
        steps: usize,
    },
    /// A normal form that is not a value.
    NormalForm {
        term: Term,
        steps: usize,
    },
    FuelExhausted {
        last: Term,
        steps: usize,
    },
}

impl EvalOutcome {
    pub fn steps(&self) -> usize {
        match self {
            EvalOutcome::Value { steps, .. }
            | EvalOutcome::NormalForm { steps, .. }
            | EvalOutcome::FuelExhausted { steps, .. } => *steps,
        }
    }

    pub fn term(&self) -> &Term {
        match self {
            EvalOutcome::Value { term, .. } | EvalOutcome::NormalForm { term, .. } => term,
            EvalOutcome::FuelExhausted { last, .. } => last,
        }
    }

    pub fn value(&self) -> Option<&Term> {
        match self {
            EvalOutcome::Value { term, .. } => Some(term),
            _ => None,
        }
    }

    /// The normal form, when one was reached.
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            EvalOutcome::Value { term, .. } | EvalOutcome::NormalForm { term, .. } => Some(term),
            EvalOutcome::FuelExhausted { .. } => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, EvalOutcome::FuelExhausted { .. })
    }
}

impl fmt::Display for EvalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalOutcome::Value { term, steps } => write!(f, "value {term} ({steps} steps)"),
            EvalOutcome::NormalForm { term, steps } => write!(f, "normal form {term} ({steps} steps)"),
            EvalOutcome::FuelExhausted { last, steps } => {
                write!(f, "fuel exhausted after {steps} steps at {last}")
            }
        }
    }
}

/// Three-valued joinability; fuel exhaustion is never read as a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Joinability {
    Joinable { common: Term },
    NotJoinable { left: Term, right: Term },
    Indeterminate,
}

impl Joinability {
    pub fn is_joinable(&self) -> bool {
        matches!(self, Joinability::Joinable { .. })
    }
}

/// A rewrite engine over one TRS with a fixed strategy and fuel.
///
/// Counts every step it performs, across all calls.
#[derive(Debug)]
pub struct Rewriter<'a> {
    trs: &'a Trs,
    strategy: Strategy,
    fuel: usize,
    steps: AtomicUsize,
}

impl<'a> Rewriter<'a> {
    pub fn new(trs: &'a Trs) -> Rewriter<'a> {
        Rewriter {
            trs,
            strategy: Strategy::default(),
            fuel: DEFAULT_FUEL,
            steps: AtomicUsize::new(0),
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_fuel(mut self, fuel: usize) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn trs(&self) -> &'a Trs {
        self.trs
    }

    pub fn fuel(&self) -> usize {
        self.fuel
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn steps_taken(&self) -> usize {
        self.steps.load(Ordering::Relaxed)
    }

    pub fn step(&self, t: &Term) -> Option<Step> {
        let step = rewrite_step(t, self.trs, self.strategy)?;
        self.steps.fetch_add(1, Ordering::Relaxed);
        Some(step)
    }

    pub fn normalize(&self, t: &Term) -> EvalOutcome {
        self.run(t, None)
    }

    pub fn normalize_traced(&self, t: &Term) -> (EvalOutcome, Vec<Step>) {
        let mut trace = Vec::new();
        let out = self.run(t, Some(&mut trace));
        (out, trace)
    }

    fn run(&self, t: &Term, mut trace: Option<&mut Vec<Step>>) -> EvalOutcome {
        let mut current = t.clone();
        let mut steps = 0;
        loop {
            if steps == self.fuel {
                // One more probe tells a normal form apart from exhaustion.
                return match rewrite_step(&current, self.trs, self.strategy) {
                    None => self.classify(current, steps),
                    Some(_) => EvalOutcome::FuelExhausted { last: current, steps },
                };
            }
            match self.step(&current) {
                None => return self.classify(current, steps),
                Some(step) => {
                    steps += 1;
                    current = step.result.clone();
                    if let Some(trace) = trace.as_deref_mut() {
                        trace.push(step);
                    }
                }
            }
        }
    }

    fn classify(&self, term: Term, steps: usize) -> EvalOutcome {
        if self.trs.is_value(&term) {
            EvalOutcome::Value { term, steps }
        } else {
            EvalOutcome::NormalForm { term, steps }
        }
    }

    /// Normalizes a ground term.
    pub fn eval(&self, t: &Term) -> Result<EvalOutcome, NotGround> {
        if !t.is_ground() {
            return Err(NotGround(t.clone()));
        }
        Ok(self.normalize(t))
    }

    /// Both terms reach syntactically equal normal forms. Sound as a
    /// joinability test only for confluent systems; callers gate.
    pub fn joinable(&self, t: &Term, s: &Term) -> Joinability {
        let left = self.normalize(t);
        let right = self.normalize(s);
        match (left.normal_form(), right.normal_form()) {
            (Some(a), Some(b)) if a == b => Joinability::Joinable { common: a.clone() },
            (Some(a), Some(b)) => Joinability::NotJoinable {
                left: a.clone(),
                right: b.clone(),
            },
            _ => Joinability::Indeterminate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("term {0} is not ground")]
pub struct NotGround(pub Term);

/// The step chosen by the strategy's position order, applying the first
/// matching rule in file order.
pub fn rewrite_step(t: &Term, trs: &Trs, strategy: Strategy) -> Option<Step> {
    let mut path = Vec::new();
    let (rule, sigma) = find_redex(t, trs, strategy, &mut path)?;
    let contractum = sigma.apply(&trs.rules()[rule].rhs);
    Some(Step {
        result: t.replace_unchecked(&path, contractum),
        position: Position::from_path(path),
        rule,
    })
}

fn find_redex(
    t: &Term,
    trs: &Trs,
    strategy: Strategy,
    path: &mut Vec<usize>,
) -> Option<(usize, crate::term::Substitution)> {
    if strategy == Strategy::LeftmostOutermost {
        if let Some(hit) = root_match(t, trs) {
            return Some(hit);
        }
    }
    for (k, arg) in t.args().iter().enumerate() {
        path.push(k + 1);
        if let Some(hit) = find_redex(arg, trs, strategy, path) {
            return Some(hit);
        }
        path.pop();
    }
    if strategy == Strategy::LeftmostInnermost {
        return root_match(t, trs);
    }
    None
}

fn root_match(t: &Term, trs: &Trs) -> Option<(usize, crate::term::Substitution)> {
    if t.is_var() {
        return None;
    }
    trs.rules().iter().enumerate().find_map(|(k, rule)| {
        let mut sigma = BTreeMap::new();
        if rule.lhs.root() == t.root() && match_into(&rule.lhs, t, &mut sigma) {
            Some((k, sigma.into_iter().collect()))
        } else {
            None
        }
    })
}

pub fn is_root_redex(t: &Term, trs: &Trs) -> bool {
    root_match(t, trs).is_some()
}

pub fn is_normal_form(t: &Term, trs: &Trs) -> bool {
    rewrite_step(t, trs, Strategy::LeftmostOutermost).is_none()
}

pub fn normalize(t: &Term, trs: &Trs, strategy: Strategy, fuel: usize) -> EvalOutcome {
    Rewriter::new(trs).with_strategy(strategy).with_fuel(fuel).normalize(t)
}

pub fn eval(t: &Term, trs: &Trs, fuel: usize) -> Result<EvalOutcome, NotGround> {
    Rewriter::new(trs).with_fuel(fuel).eval(t)
}

pub fn joinable(t: &Term, s: &Term, trs: &Trs, fuel: usize) -> Joinability {
    Rewriter::new(trs).with_fuel(fuel).joinable(t, s)
}

/// Every one-step reduct of `t`, over all positions and all rules.
pub fn one_step_reducts(t: &Term, trs: &Trs) -> Vec<Term> {
    let mut out = Vec::new();
    collect_reducts(t, trs, &mut out);
    out
}

fn collect_reducts(t: &Term, trs: &Trs, out: &mut Vec<Term>) {
    let Term::App(f, args) = t else {
        return;
    };
    for rule in trs.rules() {
        let mut sigma = BTreeMap::new();
        if rule.lhs.root() == Some(f) && match_into(&rule.lhs, t, &mut sigma) {
            let sigma: crate::term::Substitution = sigma.into_iter().collect();
            out.push(sigma.apply(&rule.rhs));
        }
    }
    for (k, arg) in args.iter().enumerate() {
        let mut inner = Vec::new();
        collect_reducts(arg, trs, &mut inner);
        for r in inner {
            let mut new_args = args.to_vec();
            new_args[k] = r;
            out.push(Term::app_unchecked(f.clone(), new_args));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Empty,
    Eval,
    Nf,
    Hnf,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub max_terms: usize,
    pub max_edges: usize,
    /// Reducts deeper than this are not explored.
    pub max_depth: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_terms: 5_000,
            max_edges: 20_000,
            max_depth: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemanticsSelector {
    pub semantics: Semantics,
    pub caps: Caps,
}

impl SemanticsSelector {
    pub fn new(semantics: Semantics) -> Self {
        SemanticsSelector {
            semantics,
            caps: Caps::default(),
        }
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedSet {
    pub terms: BTreeSet<Term>,
    pub truncated: bool,
}

/// The part of the reduction graph of a term reachable within the caps.
#[derive(Debug, Clone)]
pub struct ReductionGraph {
    nodes: Vec<Term>,
    succ: Vec<Vec<usize>>,
    root_redex: Vec<bool>,
    normal: Vec<bool>,
    value: Vec<bool>,
    truncated: bool,
}

impl ReductionGraph {
    /// Breadth-first closure of the one-step relation.
    pub fn explore(t: &Term, trs: &Trs, caps: Caps) -> ReductionGraph {
        let mut g = ReductionGraph {
            nodes: Vec::new(),
            succ: Vec::new(),
            root_redex: Vec::new(),
            normal: Vec::new(),
            value: Vec::new(),
            truncated: false,
        };
        let mut index: HashMap<Term, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut edges = 0;
        g.add(t.clone(), trs, &mut index);
        queue.push_back(0);
        'outer: while let Some(n) = queue.pop_front() {
            let reducts = one_step_reducts(&g.nodes[n], trs);
            g.normal[n] = reducts.is_empty();
            for r in reducts {
                if edges == caps.max_edges {
                    g.truncated = true;
                    break 'outer;
                }
                edges += 1;
                let m = match index.get(&r) {
                    Some(&m) => m,
                    None => {
                        if g.nodes.len() == caps.max_terms || r.depth() > caps.max_depth {
                            g.truncated = true;
                            break 'outer;
                        }
                        let m = g.add(r, trs, &mut index);
                        queue.push_back(m);
                        m
                    }
                };
                if !g.succ[n].contains(&m) {
                    g.succ[n].push(m);
                }
            }
        }
        g
    }

    fn add(&mut self, t: Term, trs: &Trs, index: &mut HashMap<Term, usize>) -> usize {
        let n = self.nodes.len();
        self.root_redex.push(is_root_redex(&t, trs));
        self.value.push(trs.is_value(&t));
        self.normal.push(false);
        self.succ.push(Vec::new());
        index.insert(t.clone(), n);
        self.nodes.push(t);
        n
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether some explored node reaches itself.
    pub fn has_cycle(&self) -> bool {
        // 0 unvisited, 1 on the stack, 2 done.
        let mut state = vec![0u8; self.nodes.len()];
        for start in 0..self.nodes.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some((n, k)) = stack.pop() {
                if let Some(&m) = self.succ[n].get(k) {
                    stack.push((n, k + 1));
                    match state[m] {
                        0 => {
                            state[m] = 1;
                            stack.push((m, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    state[n] = 2;
                }
            }
        }
        false
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> BoundedSet {
        BoundedSet {
            terms: (0..self.nodes.len())
                .filter(|&n| keep(n))
                .map(|n| self.nodes[n].clone())
                .collect(),
            truncated: self.truncated,
        }
    }

    pub fn semantics(&self, semantics: Semantics) -> BoundedSet {
        match semantics {
            Semantics::Empty => BoundedSet {
                terms: BTreeSet::new(),
                truncated: false,
            },
            Semantics::Red => self.select(|_| true),
            Semantics::Nf => self.select(|n| self.normal[n]),
            Semantics::Eval => self.select(|n| self.value[n]),
            Semantics::Hnf => {
                let reaches_redex = self.reaches_root_redex();
                self.select(|n| !reaches_redex[n])
            }
        }
    }

    /// Nodes from which some root redex is reachable (reflexively).
    fn reaches_root_redex(&self) -> Vec<bool> {
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (n, succ) in self.succ.iter().enumerate() {
            for &m in succ {
                pred[m].push(n);
            }
        }
        let mut mark = self.root_redex.clone();
        let mut stack: Vec<usize> = (0..self.nodes.len()).filter(|&n| mark[n]).collect();
        while let Some(m) = stack.pop() {
            for &n in &pred[m] {
                if !mark[n] {
                    mark[n] = true;
                    stack.push(n);
                }
            }
        }
        mark
    }
}

/// Bounded approximation of a term semantics. The HNF variant keeps reducts
/// from which no root redex is reachable inside the explored graph.
pub fn bounded_semantics(t: &Term, trs: &Trs, selector: SemanticsSelector) -> BoundedSet {
    if selector.semantics == Semantics::Empty {
        return BoundedSet {
            terms: BTreeSet::new(),
            truncated: false,
        };
    }
    ReductionGraph::explore(t, trs, selector.caps).semantics(selector.semantics)
}

/// Renders a trace as `p: t -> t' [label]`, one line per step.
pub fn format_trace(start: &Term, trace: &[Step], trs: &Trs) -> String {
    let mut out = String::new();
    let mut current = start.clone();
    for step in trace {
        let rule = &trs.rules()[step.rule];
        let label = rule.label.clone().unwrap_or_else(|| format!("rule {}", step.rule + 1));
        out.push_str(&format!(
            "{}: {} -> {} [{}]\n",
            step.position, current, step.result, label
        ));
        current = step.result.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trs::parse_trs;

    const LEQ: &str = "
        sort Nat
        sort Bool
        cons Z : Nat
        cons S : Nat -> Nat
        cons True : Bool
        cons False : Bool
        fun leq_pe : Nat Nat -> Bool
        pragma terminating
        rule leq_pe(Z, x) -> True
        rule leq_pe(S(x), y) -> leq_pe(x, y)
    ";

    const H_ERASED: &str = "
        sort T
        cons a : T
        cons c : T -> T
        fun h : T -> T
        rule h(y) -> a
        rule h(y) -> h(c(y))
    ";

    const H_REORDERED: &str = "
        sort T
        cons a : T
        cons c : T -> T
        fun h : T -> T
        rule h(y) -> h(c(y))
        rule h(y) -> a
    ";

    #[test]
    fn constructor_terms_are_normal() {
        let trs = parse_trs(LEQ).unwrap();
        let t = trs.parse_ground_term("S(Z)").unwrap();
        assert!(rewrite_step(&t, &trs, Strategy::LeftmostInnermost).is_none());
        let out = eval(&trs.parse_ground_term("Z").unwrap(), &trs, DEFAULT_FUEL).unwrap();
        assert_eq!(
            out,
            EvalOutcome::Value {
                term: trs.parse_ground_term("Z").unwrap(),
                steps: 0
            }
        );
    }

    #[test]
    fn leq_two_steps() {
        let trs = parse_trs(LEQ).unwrap();
        let rw = Rewriter::new(&trs);
        let (out, trace) = rw.normalize_traced(&trs.parse_ground_term("leq_pe(S(Z), Z)").unwrap());
        assert_eq!(out.value().unwrap().to_string(), "True");
        assert_eq!(out.steps(), 2);
        assert_eq!(trace[0].result.to_string(), "leq_pe(Z, Z)");
        assert_eq!(rw.steps_taken(), 2);
    }

    #[test]
    fn strategies_differ_on_h_rules() {
        let trs = parse_trs(H_ERASED).unwrap();
        let goal = trs.parse_ground_term("h(a)").unwrap();
        let out = normalize(&goal, &trs, Strategy::LeftmostOutermost, DEFAULT_FUEL);
        assert_eq!(out.value().unwrap().to_string(), "a");
        assert_eq!(out.steps(), 1);
        let trs = parse_trs(H_REORDERED).unwrap();
        let out = normalize(&goal, &trs, Strategy::LeftmostOutermost, 200);
        assert!(out.is_exhausted());
        assert_eq!(out.steps(), 200);
    }

    #[test]
    fn fuel_boundary_distinguishes_normal_forms() {
        let trs = parse_trs(LEQ).unwrap();
        let goal = trs.parse_ground_term("leq_pe(S(Z), Z)").unwrap();
        assert!(normalize(&goal, &trs, Strategy::LeftmostInnermost, 2).value().is_some());
        assert!(normalize(&goal, &trs, Strategy::LeftmostInnermost, 1).is_exhausted());
        assert!(normalize(&goal, &trs, Strategy::LeftmostInnermost, 0).is_exhausted());
    }

    #[test]
    fn joinability_three_ways() {
        let trs = parse_trs(LEQ).unwrap();
        let z = trs.parse_ground_term("Z").unwrap();
        let sz = trs.parse_ground_term("S(Z)").unwrap();
        assert!(matches!(
            joinable(&z, &sz, &trs, DEFAULT_FUEL),
            Joinability::NotJoinable { .. }
        ));
        let a = trs.parse_ground_term("leq_pe(Z, S(Z))").unwrap();
        let b = trs.parse_ground_term("leq_pe(S(Z), S(Z))").unwrap();
        assert!(joinable(&a, &b, &trs, DEFAULT_FUEL).is_joinable());
        let loops = parse_trs(H_REORDERED).unwrap();
        let h = loops.parse_ground_term("h(a)").unwrap();
        let out = Rewriter::new(&loops)
            .with_strategy(Strategy::LeftmostOutermost)
            .with_fuel(50)
            .joinable(&h, &h);
        assert_eq!(out, Joinability::Indeterminate);
    }

    #[test]
    fn eval_rejects_open_terms() {
        let trs = parse_trs(LEQ).unwrap();
        let nat = trs.signature().sort("Nat").unwrap().clone();
        let x = trs.parse_term_of_sort("x", &nat).unwrap();
        assert!(eval(&x, &trs, 10).is_err());
    }

    #[test]
    fn empty_semantics_is_empty() {
        let trs = parse_trs(LEQ).unwrap();
        let t = trs.parse_ground_term("leq_pe(Z, Z)").unwrap();
        let out = bounded_semantics(&t, &trs, SemanticsSelector::new(Semantics::Empty));
        assert!(out.terms.is_empty() && !out.truncated);
    }

    #[test]
    fn truncation_is_flagged() {
        let trs = parse_trs(H_ERASED).unwrap();
        let t = trs.parse_ground_term("h(a)").unwrap();
        let caps = Caps {
            max_terms: 20,
            max_edges: 100,
            max_depth: 50,
        };
        let out = bounded_semantics(&t, &trs, SemanticsSelector::new(Semantics::Red).with_caps(caps));
        assert!(out.truncated);
        assert_eq!(out.terms.len(), 20);
        let eval = bounded_semantics(&t, &trs, SemanticsSelector::new(Semantics::Eval).with_caps(caps));
        assert_eq!(eval.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn trace_format() {
        let trs = parse_trs(LEQ).unwrap();
        let goal = trs.parse_ground_term("leq_pe(S(Z), Z)").unwrap();
        let (_, trace) = Rewriter::new(&trs).normalize_traced(&goal);
        assert_eq!(
            format_trace(&goal, &trace, &trs),
            "e: leq_pe(S(Z), Z) -> leq_pe(Z, Z) [rule 2]\ne: leq_pe(Z, Z) -> True [rule 1]\n"
        );
    }
}

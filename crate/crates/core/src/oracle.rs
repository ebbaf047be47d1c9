//! Brute-force ground truth: bounded enumeration of contexts and terms to
//! refute argument redundancy, and seeded differential testing of erasures.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::erasure::{erase_trs, reduced_erasure, ErasedTrs, ErasureError, SyntacticErasure};
use crate::rewrite::{Caps, EvalOutcome, ReductionGraph, Rewriter, Semantics, DEFAULT_FUEL};
use crate::term::{FuncSymbol, Position, Sort, Substitution, Term, Var};
use crate::trs::{check_left_linear, Signature, Trs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("sort {0} has no ground term of depth at most {1}")]
    EmptySort(Sort, usize),
    #[error("{symbol} has no argument {index}")]
    NoSuchArgument { symbol: String, index: usize },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error(transparent)]
    Erasure(#[from] ErasureError),
}

/// Ground terms by exact depth and sort, built bottom-up.
struct Levels<'a> {
    sig: &'a Signature,
    exact: Vec<BTreeMap<Sort, Vec<Term>>>,
}

impl<'a> Levels<'a> {
    fn new(sig: &'a Signature) -> Levels<'a> {
        Levels {
            sig,
            exact: vec![BTreeMap::new()],
        }
    }

    fn exact(&mut self, sort: &Sort, d: usize) -> &[Term] {
        while self.exact.len() <= d {
            let next = self.exact.len();
            let level = self.build(next);
            self.exact.push(level);
        }
        self.exact[d].get(sort).map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn upto(&mut self, sort: &Sort, d: usize) -> Vec<(Term, usize)> {
        let mut out = Vec::new();
        for k in 1..=d {
            out.extend(self.exact(sort, k).iter().map(|t| (t.clone(), k)));
        }
        out
    }

    fn build(&mut self, d: usize) -> BTreeMap<Sort, Vec<Term>> {
        let mut level: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
        let symbols: Vec<Arc<FuncSymbol>> = self.sig.symbols().to_vec();
        for f in symbols {
            if f.arity() == 0 {
                if d == 1 {
                    let terms = level.entry(f.result_sort().clone()).or_default();
                    terms.push(Term::app_unchecked(f.clone(), Vec::new()));
                }
                continue;
            }
            if d < 2 {
                continue;
            }
            let columns: Vec<Vec<(Term, usize)>> = f.arg_sorts().iter().map(|s| self.upto(s, d - 1)).collect();
            let terms = level.entry(f.result_sort().clone()).or_default();
            for_each_tuple(&columns, &mut |tuple| {
                if tuple.iter().any(|(_, k)| *k == d - 1) {
                    let args = tuple.iter().map(|(t, _)| (*t).clone()).collect();
                    terms.push(Term::app_unchecked(f.clone(), args));
                }
            });
        }
        level
    }
}

/// Lexicographic walk over the cartesian product of the columns.
fn for_each_tuple<T>(columns: &[Vec<T>], visit: &mut impl FnMut(&[&T])) {
    if columns.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0; columns.len()];
    loop {
        let tuple: Vec<&T> = idx.iter().zip(columns).map(|(&k, c)| &c[k]).collect();
        visit(&tuple);
        let mut pos = columns.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < columns[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All ground terms of `sort` of depth at most `depth`, by depth, then
/// symbol declaration order, then arguments lexicographically.
pub fn enumerate_ground_terms(sig: &Signature, sort: &Sort, depth: usize) -> Result<Vec<Term>, OracleError> {
    let out: Vec<Term> = Levels::new(sig).upto(sort, depth).into_iter().map(|(t, _)| t).collect();
    if out.is_empty() {
        return Err(OracleError::EmptySort(sort.clone(), depth));
    }
    Ok(out)
}

/// A term with exactly one hole, kept as a variable named `[]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Context {
    skeleton: Term,
    hole: Position,
}

pub const HOLE: &str = "[]";

impl Context {
    pub fn empty(sort: &Sort) -> Context {
        Context {
            skeleton: Term::var(HOLE, sort.clone()),
            hole: Position::root(),
        }
    }

    pub fn hole(&self) -> &Position {
        &self.hole
    }

    pub fn is_empty(&self) -> bool {
        self.hole.is_root()
    }

    /// Depth with the hole counted as 0.
    pub fn depth(&self) -> usize {
        fn go(t: &Term, hole: &[usize]) -> usize {
            match hole.split_first() {
                None => 0,
                Some((&k, rest)) => {
                    let args = t.args();
                    let mut d = go(&args[k - 1], rest);
                    for (j, a) in args.iter().enumerate() {
                        if j + 1 != k {
                            d = d.max(a.depth());
                        }
                    }
                    d + 1
                }
            }
        }
        go(&self.skeleton, self.hole.path())
    }

    pub fn plug(&self, t: &Term) -> Term {
        self.skeleton
            .replace(&self.hole, t.clone())
            .expect("hole position exists")
    }

    fn wrap(f: &Arc<FuncSymbol>, k: usize, inner: &Context, others: &[&Term]) -> Context {
        let mut args: Vec<Term> = others.iter().map(|t| (*t).clone()).collect();
        args.insert(k, inner.skeleton.clone());
        let mut path = vec![k + 1];
        path.extend_from_slice(inner.hole.path());
        Context {
            skeleton: Term::app_unchecked(f.clone(), args),
            hole: Position::from_path(path),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.skeleton)
    }
}

impl Serialize for Context {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All one-hole contexts whose hole has `hole_sort`, of depth at most
/// `depth`, starting with the empty context. Ordered by depth, then the
/// root's declaration order, then hole argument, then the remaining
/// arguments lexicographically.
pub fn enumerate_contexts(sig: &Signature, hole_sort: &Sort, depth: usize) -> Vec<Context> {
    let mut levels = Levels::new(sig);
    // Contexts by exact depth, grouped by result sort.
    let mut exact: Vec<BTreeMap<Sort, Vec<Context>>> =
        vec![BTreeMap::from([(hole_sort.clone(), vec![Context::empty(hole_sort)])])];
    for d in 1..=depth {
        let mut level: BTreeMap<Sort, Vec<Context>> = BTreeMap::new();
        for f in sig.symbols() {
            for k in 0..f.arity() {
                let inner: Vec<(&Context, usize)> = (0..d)
                    .flat_map(|e| {
                        exact[e]
                            .get(&f.arg_sorts()[k])
                            .into_iter()
                            .flatten()
                            .map(move |c| (c, e))
                    })
                    .collect();
                if inner.is_empty() {
                    continue;
                }
                let others: Vec<Vec<(Term, usize)>> = f
                    .arg_sorts()
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, s)| levels.upto(s, d - 1))
                    .collect();
                let out = level.entry(f.result_sort().clone()).or_default();
                for &(c, e) in &inner {
                    for_each_tuple(&others, &mut |tuple| {
                        let max = tuple.iter().map(|(_, k)| *k).max().unwrap_or(0).max(e);
                        if max == d - 1 {
                            let ts: Vec<&Term> = tuple.iter().map(|(t, _)| t).collect();
                            out.push(Context::wrap(f, k, c, &ts));
                        }
                    });
                }
            }
        }
        exact.push(level);
    }
    // Flatten each depth in declaration order of the roots.
    let mut out = Vec::new();
    for (d, level) in exact.into_iter().enumerate() {
        if d == 0 {
            out.extend(level.into_values().flatten());
            continue;
        }
        let mut all: Vec<Context> = level.into_values().flatten().collect();
        let rank: HashMap<&str, usize> = sig.symbols().iter().enumerate().map(|(n, f)| (f.name(), n)).collect();
        all.sort_by_key(|c| rank[c.skeleton.root().expect("non-empty context").name()]);
        out.extend(all);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumBounds {
    pub ctx_depth: usize,
    pub term_depth: usize,
    pub max_cases: usize,
    pub caps: Caps,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds {
            ctx_depth: 3,
            term_depth: 3,
            max_cases: 50_000,
            caps: Caps::default(),
        }
    }
}

fn serialize_set<S: Serializer>(set: &BTreeSet<Term>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(set.iter().map(|t| t.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub context: Context,
    pub term: Term,
    pub index: usize,
    pub replacement: Term,
    #[serde(serialize_with = "serialize_set")]
    pub before: BTreeSet<Term>,
    #[serde(serialize_with = "serialize_set")]
    pub after: BTreeSet<Term>,
}

impl Counterexample {
    pub fn replaced(&self) -> Term {
        let p = Position::from_path(vec![self.index]);
        self.term
            .replace(&p, self.replacement.clone())
            .expect("argument exists")
    }

    /// Recomputes both evaluation sets; true when they still differ and
    /// neither exploration was truncated.
    pub fn replays(&self, trs: &Trs, caps: Caps) -> bool {
        let a = ReductionGraph::explore(&self.context.plug(&self.term), trs, caps);
        let b = ReductionGraph::explore(&self.context.plug(&self.replaced()), trs, caps);
        if a.is_truncated() || b.is_truncated() {
            return false;
        }
        let (a, b) = (a.semantics(Semantics::Eval).terms, b.semantics(Semantics::Eval).terms);
        a == self.before && b == self.after && a != b
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<Term>| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "context {}, term {}, argument {} replaced by {}: Seval {{{}}} vs {{{}}}",
            self.context,
            self.term,
            self.index,
            self.replacement,
            set(&self.before),
            set(&self.after)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    NoCounterexampleUpTo {
        ctx_depth: usize,
        term_depth: usize,
        cases_checked: usize,
        /// Cases skipped because an exploration hit the caps.
        skipped_truncated: usize,
        /// The case budget ran out before the enumeration did.
        hit_max_cases: bool,
    },
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Counterexample(c) => Some(c),
            Verdict::NoCounterexampleUpTo { .. } => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoCounterexampleUpTo {
                ctx_depth,
                term_depth,
                cases_checked,
                skipped_truncated,
                hit_max_cases,
            } => {
                write!(
                    f,
                    "no counterexample up to context depth {ctx_depth}, term depth {term_depth} \
                     ({cases_checked} cases, {skipped_truncated} skipped as truncated"
                )?;
                if *hit_max_cases {
                    write!(f, ", case budget exhausted")?;
                }
                write!(f, ")")
            }
            Verdict::Counterexample(c) => write!(f, "counterexample: {c}"),
        }
    }
}

/// The step budget or a reduction cycle cut a computation short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Truncated;

type Matcher = Vec<(Var, Term)>;

/// Memoized evaluation sets of ground terms.
///
/// Left-linear systems are handled by splitting every derivation at its
/// first root step: until then all steps happen inside the arguments, and
/// steps below a lhs variable can be postponed past the root step. So the
/// values of `g(t1..tn)` are the values of the root successors `rσ`, where
/// `σ` ranges over the earliest matches of the lhs arguments against
/// reducts of the `ti`. This avoids interleaving independent redexes.
/// Other systems fall back to exploring the reduction graph.
struct EvalCache<'a> {
    trs: &'a Trs,
    caps: Caps,
    left_linear: bool,
    seen: HashMap<Term, Option<Arc<BTreeSet<Term>>>>,
    succ: HashMap<Term, Result<Arc<Vec<Term>>, Truncated>>,
    active: HashSet<Term>,
}

impl<'a> EvalCache<'a> {
    fn new(trs: &'a Trs, caps: Caps) -> EvalCache<'a> {
        EvalCache {
            trs,
            caps,
            left_linear: check_left_linear(trs).is_ok(),
            seen: HashMap::new(),
            succ: HashMap::new(),
            active: HashSet::new(),
        }
    }

    /// None when the computation was truncated.
    fn get(&mut self, t: &Term) -> Option<BTreeSet<Term>> {
        if !self.left_linear {
            if let Some(hit) = self.seen.get(t) {
                return hit.as_deref().cloned();
            }
            let graph = ReductionGraph::explore(t, self.trs, self.caps);
            let out = (!graph.is_truncated()).then(|| Arc::new(graph.semantics(Semantics::Eval).terms));
            self.seen.insert(t.clone(), out.clone());
            return out.as_deref().cloned();
        }
        self.active.clear();
        self.values(t, 0).ok().map(|v| (*v).clone())
    }

    fn values(&mut self, t: &Term, depth: usize) -> Result<Arc<BTreeSet<Term>>, Truncated> {
        if let Some(hit) = self.seen.get(t) {
            return hit.clone().ok_or(Truncated);
        }
        if depth > self.caps.max_depth || !self.active.insert(t.clone()) {
            return Err(Truncated);
        }
        let out = self.compute_values(t, depth);
        self.active.remove(t);
        self.seen.insert(t.clone(), out.clone().ok());
        out
    }

    fn compute_values(&mut self, t: &Term, depth: usize) -> Result<Arc<BTreeSet<Term>>, Truncated> {
        let root = t.root().expect("ground term").clone();
        let mut out = BTreeSet::new();
        if self.trs.is_constructor(&root) {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for a in t.args() {
                let vs = self.values(a, depth + 1)?;
                if vs.is_empty() {
                    return Ok(Arc::new(out));
                }
                if tuples.len() * vs.len() > self.caps.max_terms {
                    return Err(Truncated);
                }
                tuples = tuples
                    .into_iter()
                    .flat_map(|tuple| {
                        vs.iter().map(move |v| {
                            let mut next = tuple.clone();
                            next.push(v.clone());
                            next
                        })
                    })
                    .collect();
            }
            out.extend(tuples.into_iter().map(|args| Term::app_unchecked(root.clone(), args)));
        } else {
            for u in self.root_successors(t, depth)?.iter() {
                out.extend(self.values(u, depth + 1)?.iter().cloned());
                if out.len() > self.caps.max_terms {
                    return Err(Truncated);
                }
            }
        }
        Ok(Arc::new(out))
    }

    /// `rσ` for every rule `l -> r` and earliest match `σ` of `l` below `t`'s root.
    fn root_successors(&mut self, t: &Term, depth: usize) -> Result<Arc<Vec<Term>>, Truncated> {
        if let Some(hit) = self.succ.get(t) {
            return hit.clone();
        }
        if depth > self.caps.max_depth {
            return Err(Truncated);
        }
        let out = self.compute_root_successors(t, depth).map(Arc::new);
        self.succ.insert(t.clone(), out.clone());
        out
    }

    fn compute_root_successors(&mut self, t: &Term, depth: usize) -> Result<Vec<Term>, Truncated> {
        let trs = self.trs;
        let root = t.root().expect("ground term");
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (_, rule) in trs.rules_of(root) {
            let mut matchers: Vec<Matcher> = vec![Vec::new()];
            for (p, a) in rule.lhs.args().iter().zip(t.args()) {
                let ms = self.matches(p, a, depth + 1)?;
                matchers = self.combine(matchers, &ms)?;
                if matchers.is_empty() {
                    break;
                }
            }
            for m in matchers {
                let u = m.into_iter().collect::<Substitution>().apply(&rule.rhs);
                if seen.insert(u.clone()) {
                    out.push(u);
                }
            }
            if out.len() > self.caps.max_terms {
                return Err(Truncated);
            }
        }
        Ok(out)
    }

    /// Earliest instances of the linear pattern `p` among the reducts of `t`.
    fn matches(&mut self, p: &Term, t: &Term, depth: usize) -> Result<Vec<Matcher>, Truncated> {
        let Some(c) = p.root() else {
            let Term::Var(x) = p else { unreachable!() };
            return Ok(vec![vec![(x.clone(), t.clone())]]);
        };
        let root = t.root().expect("ground term");
        if root == c {
            let mut matchers = vec![Vec::new()];
            for (q, a) in p.args().iter().zip(t.args()) {
                let ms = self.matches(q, a, depth + 1)?;
                matchers = self.combine(matchers, &ms)?;
                if matchers.is_empty() {
                    break;
                }
            }
            return Ok(matchers);
        }
        if self.trs.is_constructor(root) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for u in self.root_successors(t, depth)?.iter() {
            for m in self.matches(p, u, depth + 1)? {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            if out.len() > self.caps.max_terms {
                return Err(Truncated);
            }
        }
        Ok(out)
    }

    fn combine(&self, left: Vec<Matcher>, right: &[Matcher]) -> Result<Vec<Matcher>, Truncated> {
        if left.len() * right.len() > self.caps.max_terms {
            return Err(Truncated);
        }
        Ok(left
            .iter()
            .flat_map(|l| {
                right.iter().map(move |r| {
                    let mut m = l.clone();
                    m.extend(r.iter().cloned());
                    m
                })
            })
            .collect())
    }
}

/// Searches contexts (outer loop), `f`-rooted terms, then replacements of
/// argument `i`, for a pair whose evaluation sets differ. The first
/// counterexample in enumeration order is returned.
pub fn brute_force_redundant(trs: &Trs, f: &str, i: usize, bounds: &EnumBounds) -> Result<Verdict, OracleError> {
    let sig = trs.signature();
    let sym = sig
        .lookup(f)
        .ok_or_else(|| OracleError::UnknownSymbol(f.to_string()))?
        .clone();
    if i == 0 || i > sym.arity() {
        return Err(OracleError::NoSuchArgument {
            symbol: f.to_string(),
            index: i,
        });
    }
    let terms: Vec<Term> = enumerate_ground_terms(sig, sym.result_sort(), bounds.term_depth)?
        .into_iter()
        .filter(|t| t.has_root(&sym))
        .collect();
    let replacements = enumerate_ground_terms(sig, &sym.arg_sorts()[i - 1], bounds.term_depth)?;
    let contexts = enumerate_contexts(sig, sym.result_sort(), bounds.ctx_depth);
    let mut cache = EvalCache::new(trs, bounds.caps);
    let arg = Position::from_path(vec![i]);
    let (mut cases, mut skipped) = (0, 0);
    for c in &contexts {
        for t in &terms {
            for s in &replacements {
                if &t.args()[i - 1] == s {
                    continue;
                }
                if cases == bounds.max_cases {
                    return Ok(Verdict::NoCounterexampleUpTo {
                        ctx_depth: bounds.ctx_depth,
                        term_depth: bounds.term_depth,
                        cases_checked: cases,
                        skipped_truncated: skipped,
                        hit_max_cases: true,
                    });
                }
                cases += 1;
                let replaced = t.replace(&arg, s.clone()).expect("argument exists");
                let (Some(before), Some(after)) = (cache.get(&c.plug(t)), cache.get(&c.plug(&replaced))) else {
                    skipped += 1;
                    continue;
                };
                if before != after {
                    return Ok(Verdict::Counterexample(Counterexample {
                        context: c.clone(),
                        term: t.clone(),
                        index: i,
                        replacement: s.clone(),
                        before,
                        after,
                    }));
                }
            }
        }
    }
    Ok(Verdict::NoCounterexampleUpTo {
        ctx_depth: bounds.ctx_depth,
        term_depth: bounds.term_depth,
        cases_checked: cases,
        skipped_truncated: skipped,
        hit_max_cases: false,
    })
}

/// Random ground terms with per-sort depth feasibility precomputed.
pub struct TermSampler<'a> {
    sig: &'a Signature,
    min_depth: BTreeMap<Sort, usize>,
}

impl<'a> TermSampler<'a> {
    pub fn new(sig: &'a Signature) -> TermSampler<'a> {
        let mut min_depth: BTreeMap<Sort, usize> = BTreeMap::new();
        loop {
            let mut changed = false;
            for f in sig.symbols() {
                let need: Option<usize> = f
                    .arg_sorts()
                    .iter()
                    .map(|s| min_depth.get(s).copied())
                    .try_fold(0, |m, d| d.map(|d| m.max(d)));
                if let Some(d) = need {
                    let d = d + 1;
                    let entry = min_depth.entry(f.result_sort().clone()).or_insert(usize::MAX);
                    if d < *entry {
                        *entry = d;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        TermSampler { sig, min_depth }
    }

    fn fits(&self, f: &FuncSymbol, depth: usize) -> bool {
        depth >= 1
            && f.arg_sorts()
                .iter()
                .all(|s| self.min_depth.get(s).is_some_and(|&d| d < depth))
    }

    /// A term of `sort` of depth at most `depth`, symbols drawn uniformly
    /// among those that fit.
    pub fn sample(&self, sort: &Sort, depth: usize, rng: &mut impl Rng) -> Option<Term> {
        let choices: Vec<&Arc<FuncSymbol>> = self.sig.symbols_of_sort(sort).filter(|f| self.fits(f, depth)).collect();
        let f = choices.choose(rng)?;
        self.sample_rooted(f, depth, rng)
    }

    pub fn sample_rooted(&self, f: &Arc<FuncSymbol>, depth: usize, rng: &mut impl Rng) -> Option<Term> {
        if !self.fits(f, depth) {
            return None;
        }
        let args: Option<Vec<Term>> = f.arg_sorts().iter().map(|s| self.sample(s, depth - 1, rng)).collect();
        Some(Term::app_unchecked(f.clone(), args?))
    }
}

/// Seeded random ground terms rooted by defined symbols.
pub fn sample_defined_terms(trs: &Trs, count: usize, depth: usize, seed: u64) -> Vec<Term> {
    let sampler = TermSampler::new(trs.signature());
    let roots: Vec<&Arc<FuncSymbol>> = trs.defined_symbols().filter(|f| sampler.fits(f, depth)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if roots.is_empty() {
        return out;
    }
    for _ in 0..count {
        let f = roots.choose(&mut rng).expect("non-empty");
        out.push(sampler.sample_rooted(f, depth, &mut rng).expect("root fits"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub depth: usize,
    pub seed: u64,
    pub fuel: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 200,
            depth: 6,
            seed: 42,
            fuel: DEFAULT_FUEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub term: Term,
    pub erased_term: Term,
    pub original: EvalOutcome,
    pub erased: EvalOutcome,
}

impl fmt::Display for Disagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} | erased {}: {}",
            self.term, self.original, self.erased_term, self.erased
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub config: VerifyConfig,
    pub erasure: SyntacticErasure,
    pub agree: usize,
    pub disagree: usize,
    pub indeterminate: usize,
    pub witnesses: Vec<Disagreement>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.disagree == 0
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "erasure {}: {} trials (depth {}, seed {}): {} agree, {} disagree, {} indeterminate",
            self.erasure,
            self.config.trials,
            self.config.depth,
            self.config.seed,
            self.agree,
            self.disagree,
            self.indeterminate
        )?;
        for w in &self.witnesses {
            writeln!(f, "disagreement: {w}")?;
        }
        Ok(())
    }
}

/// Erases (and, when that succeeds cleanly, reduces) `trs` under `rho`, then
/// compares evaluation of sampled terms with evaluation of their erasures.
pub fn differential_verify(trs: &Trs, rho: &SyntacticErasure, cfg: &VerifyConfig) -> Result<DiffReport, OracleError> {
    let erased = erase_trs(trs, rho, "")?;
    let reduced = reduced_erasure(&erased, cfg.fuel)?;
    Ok(differential_verify_erased(trs, &reduced, cfg))
}

/// Both sides reaching the same value, or both getting stuck without one,
/// is agreement; fuel exhaustion on either side is indeterminate.
pub fn differential_verify_erased(trs: &Trs, erased: &ErasedTrs, cfg: &VerifyConfig) -> DiffReport {
    let original = Rewriter::new(trs).with_fuel(cfg.fuel);
    let target = Rewriter::new(&erased.trs).with_fuel(cfg.fuel);
    let mut report = DiffReport {
        config: *cfg,
        erasure: erased.rho.clone(),
        agree: 0,
        disagree: 0,
        indeterminate: 0,
        witnesses: Vec::new(),
    };
    for t in sample_defined_terms(trs, cfg.trials, cfg.depth, cfg.seed) {
        let u = erased.erase_term(&t);
        let a = original.normalize(&t);
        let b = target.normalize(&u);
        if a.is_exhausted() || b.is_exhausted() {
            report.indeterminate += 1;
        } else if a.value() == b.value() {
            report.agree += 1;
        } else {
            report.disagree += 1;
            report.witnesses.push(Disagreement {
                term: t,
                erased_term: u,
                original: a,
                erased: b,
            });
        }
    }
    report
}

//! Many-sorted first-order terms, positions, substitutions, matching and
//! syntactic unification.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {0} is not a position of the term")]
    PositionOutOfRange(Position),
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("symbol {symbol} has arity {arity}, got argument index or count {found}")]
    ArityMismatch { symbol: String, arity: usize, found: usize },
    #[error("terms are not applications of the same symbol")]
    RootMismatch,
}

/// A sort name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Sort {
        Sort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Sort {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Constructor,
    Defined,
}

/// A function symbol with its sort profile.
///
/// Identity (equality, ordering, hashing) is the pair (name, arity); the kind
/// is a classification relative to an owning TRS.
#[derive(Debug, Clone)]
pub struct FuncSymbol {
    name: Arc<str>,
    arg_sorts: Vec<Sort>,
    result: Sort,
    kind: SymbolKind,
}

impl FuncSymbol {
    pub fn new(name: &str, arg_sorts: Vec<Sort>, result: Sort, kind: SymbolKind) -> FuncSymbol {
        FuncSymbol {
            name: Arc::from(name),
            arg_sorts,
            result,
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }

    pub fn arg_sorts(&self) -> &[Sort] {
        &self.arg_sorts
    }

    pub fn result_sort(&self) -> &Sort {
        &self.result
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_constructor(&self) -> bool {
        self.kind == SymbolKind::Constructor
    }

    pub fn with_kind(&self, kind: SymbolKind) -> FuncSymbol {
        FuncSymbol { kind, ..self.clone() }
    }

    pub fn renamed(&self, name: &str) -> FuncSymbol {
        FuncSymbol {
            name: Arc::from(name),
            ..self.clone()
        }
    }

    fn key(&self) -> (&str, usize) {
        (&self.name, self.arg_sorts.len())
    }
}

impl PartialEq for FuncSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for FuncSymbol {}

impl PartialOrd for FuncSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FuncSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl Hash for FuncSymbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl fmt::Display for FuncSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A sorted variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    name: Arc<str>,
    sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Var {
        Var {
            name: Arc::from(name),
            sort,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub fn with_name(&self, name: &str) -> Var {
        Var::new(name, self.sort.clone())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A tree address; the empty path is the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn from_path(path: Vec<usize>) -> Position {
        debug_assert!(path.iter().all(|&i| i >= 1));
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut path = self.0.clone();
        path.push(i);
        Position(path)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut path = self.0.clone();
        path.extend_from_slice(&other.0);
        Position(path)
    }

    /// `self ≤ other`: self is a prefix of other.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Disjoint positions: neither is a prefix of the other.
    pub fn is_parallel(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|seg| match seg.parse::<usize>() {
                Ok(0) | Err(_) => Err(format!("bad position segment {seg:?}")),
                Ok(i) => Ok(i),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A first-order term. Equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Arc<FuncSymbol>, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    /// Sort-checked application.
    pub fn app(symbol: Arc<FuncSymbol>, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != symbol.arity() {
            return Err(TermError::ArityMismatch {
                symbol: symbol.name().to_string(),
                arity: symbol.arity(),
                found: args.len(),
            });
        }
        for (arg, expected) in args.iter().zip(symbol.arg_sorts()) {
            let found = arg.sort();
            if found != expected {
                return Err(TermError::SortMismatch {
                    expected: expected.clone(),
                    found: found.clone(),
                });
            }
        }
        Ok(Term::App(symbol, args.into()))
    }

    pub(crate) fn app_unchecked(symbol: Arc<FuncSymbol>, args: Vec<Term>) -> Term {
        debug_assert_eq!(symbol.arity(), args.len());
        Term::App(symbol, args.into())
    }

    pub fn constant(symbol: Arc<FuncSymbol>) -> Result<Term, TermError> {
        Term::app(symbol, Vec::new())
    }

    pub fn sort(&self) -> &Sort {
        match self {
            Term::Var(v) => v.sort(),
            Term::App(f, _) => f.result_sort(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn root(&self) -> Option<&Arc<FuncSymbol>> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn has_root(&self, symbol: &FuncSymbol) -> bool {
        self.root().is_some_and(|f| **f == *symbol)
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Tree depth; a constant or variable has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first (pre-order) occurrence.
    pub fn vars_ordered(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit(&mut |t, _| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn is_linear(&self) -> bool {
        self.repeated_var().is_none()
    }

    /// The first variable (in pre-order) that occurs more than once.
    pub fn repeated_var(&self) -> Option<Var> {
        let mut seen = BTreeSet::new();
        let mut repeated = None;
        self.visit(&mut |t, _| {
            if let (Term::Var(v), None) = (t, &repeated) {
                if !seen.insert(v.clone()) {
                    repeated = Some(v.clone());
                }
            }
        });
        repeated
    }

    /// Pre-order traversal with positions; children visited left to right,
    /// which yields positions in lexicographic order.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term, &Position)) {
        fn go<'a>(t: &'a Term, pos: &mut Vec<usize>, f: &mut impl FnMut(&'a Term, &Position)) {
            f(t, &Position(pos.clone()));
            for (k, a) in t.args().iter().enumerate() {
                pos.push(k + 1);
                go(a, pos, f);
                pos.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.visit(&mut |_, p| out.push(p.clone()));
        out
    }

    pub fn var_positions(&self, x: &Var) -> Vec<Position> {
        let mut out = Vec::new();
        self.visit(&mut |t, p| {
            if t.as_var() == Some(x) {
                out.push(p.clone());
            }
        });
        out
    }

    pub fn subterm(&self, p: &Position) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in p.path() {
            t = t
                .args()
                .get(i.wrapping_sub(1))
                .ok_or_else(|| TermError::PositionOutOfRange(p.clone()))?;
        }
        Ok(t)
    }

    /// `t[s]_p`.
    pub fn replace(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        let old = self.subterm(p)?;
        if old.sort() != s.sort() {
            return Err(TermError::SortMismatch {
                expected: old.sort().clone(),
                found: s.sort().clone(),
            });
        }
        Ok(self.replace_unchecked(p.path(), s))
    }

    pub(crate) fn replace_unchecked(&self, path: &[usize], s: Term) -> Term {
        match path.split_first() {
            None => s,
            Some((&i, rest)) => match self {
                Term::App(f, args) => {
                    let mut new_args = args.to_vec();
                    new_args[i - 1] = args[i - 1].replace_unchecked(rest, s);
                    Term::App(f.clone(), new_args.into())
                }
                Term::Var(_) => unreachable!("path checked by caller"),
            },
        }
    }

    /// Rebuilds the term with every symbol mapped through `f`.
    pub fn map_symbols(&self, f: &impl Fn(&Arc<FuncSymbol>) -> Arc<FuncSymbol>) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(g, args) => Term::App(f(g), args.iter().map(|a| a.map_symbols(f)).collect::<Vec<_>>().into()),
        }
    }

    pub fn rename_vars(&self, f: &impl Fn(&Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(g, args) => Term::App(
                g.clone(),
                args.iter().map(|a| a.rename_vars(f)).collect::<Vec<_>>().into(),
            ),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Arc<FuncSymbol>> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t, _| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `Pos_{f,i}(t)`: the positions of the i-th argument of every f-rooted
/// subterm of `t`.
pub fn pos_fi(t: &Term, f: &FuncSymbol, i: usize) -> Vec<Position> {
    let mut out = Vec::new();
    if i == 0 || i > f.arity() {
        return out;
    }
    t.visit(&mut |s, q| {
        if s.has_root(f) {
            out.push(q.child(i));
        }
    });
    out.sort();
    out
}

/// A finite map from variables to terms.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn identity() -> Substitution {
        Substitution::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn get_by_name(&self, name: &str) -> Option<&Term> {
        self.0.iter().find(|(v, _)| v.name() == name).map(|(_, t)| t)
    }

    /// Adds a binding. Identity bindings are dropped.
    pub fn insert(&mut self, x: Var, t: Term) -> Result<(), TermError> {
        if x.sort() != t.sort() {
            return Err(TermError::SortMismatch {
                expected: x.sort().clone(),
                found: t.sort().clone(),
            });
        }
        if t.as_var() == Some(&x) {
            self.0.remove(&x);
        } else {
            self.0.insert(x, t);
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect::<Vec<_>>().into()),
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Substitution) -> Substitution {
        let mut out = BTreeMap::new();
        for (x, t) in &first.0 {
            let t = self.apply(t);
            if t.as_var() != Some(x) {
                out.insert(x.clone(), t);
            }
        }
        for (x, t) in &self.0 {
            out.entry(x.clone()).or_insert_with(|| t.clone());
        }
        Substitution(out)
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self) == *self
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, t)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(x, t)| (x.name(), t.to_string())))
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// Finds σ with σ(pattern) = t. Variables of `t` are treated as constants.
pub fn match_term(pattern: &Term, t: &Term) -> Option<Substitution> {
    let mut sigma = BTreeMap::new();
    if match_into(pattern, t, &mut sigma) {
        Some(Substitution(sigma))
    } else {
        None
    }
}

pub(crate) fn match_into(pattern: &Term, t: &Term, sigma: &mut BTreeMap<Var, Term>) -> bool {
    match (pattern, t) {
        (Term::Var(x), _) => {
            if x.sort() != t.sort() {
                return false;
            }
            match sigma.get(x) {
                Some(bound) => bound == t,
                None => {
                    sigma.insert(x.clone(), t.clone());
                    true
                }
            }
        }
        (Term::App(f, ps), Term::App(g, ts)) => {
            f == g && ps.iter().zip(ts.iter()).all(|(p, s)| match_into(p, s, sigma))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

/// Default variable-variable orientation: bind the lexicographically larger
/// variable to the smaller one.
pub fn bind_larger_to_smaller(a: &Var, b: &Var) -> bool {
    a > b
}

/// Most general unifier of `t` and `s` with occurs check.
pub fn unify(t: &Term, s: &Term) -> Option<Substitution> {
    unify_all([(t.clone(), s.clone())])
}

pub fn unify_all(pairs: impl IntoIterator<Item = (Term, Term)>) -> Option<Substitution> {
    unify_oriented(pairs, &bind_larger_to_smaller)
}

/// Robinson unification with eager variable elimination, so the result is
/// idempotent. When both sides of an equation are variables, `orient(a, b)`
/// decides whether `a ↦ b` (true) or `b ↦ a` (false) is recorded.
pub fn unify_oriented(
    pairs: impl IntoIterator<Item = (Term, Term)>,
    orient: &dyn Fn(&Var, &Var) -> bool,
) -> Option<Substitution> {
    let mut work: Vec<(Term, Term)> = pairs.into_iter().collect();
    work.reverse();
    let mut solved: BTreeMap<Var, Term> = BTreeMap::new();
    while let Some((a, b)) = work.pop() {
        if a == b {
            continue;
        }
        if a.sort() != b.sort() {
            return None;
        }
        let (x, t) = match (&a, &b) {
            (Term::Var(x), Term::Var(y)) => {
                if orient(x, y) {
                    (x.clone(), b.clone())
                } else {
                    (y.clone(), a.clone())
                }
            }
            (Term::Var(x), _) => (x.clone(), b.clone()),
            (_, Term::Var(y)) => (y.clone(), a.clone()),
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g {
                    return None;
                }
                for (p, q) in fa.iter().zip(ga.iter()).rev() {
                    work.push((p.clone(), q.clone()));
                }
                continue;
            }
        };
        if t.vars().contains(&x) {
            return None;
        }
        let single = Substitution(BTreeMap::from([(x.clone(), t.clone())]));
        for (l, r) in work.iter_mut() {
            *l = single.apply(l);
            *r = single.apply(r);
        }
        for v in solved.values_mut() {
            *v = single.apply(v);
        }
        solved.insert(x, t);
    }
    Some(Substitution(solved))
}

/// Unifies the argument tuples of two applications of the same symbol with the
/// i-th (1-based) component deleted. Callers rename the terms apart.
pub fn unify_up_to_arg(t: &Term, s: &Term, i: usize) -> Result<Option<Substitution>, TermError> {
    unify_up_to_arg_oriented(t, s, i, &bind_larger_to_smaller)
}

pub fn unify_up_to_arg_oriented(
    t: &Term,
    s: &Term,
    i: usize,
    orient: &dyn Fn(&Var, &Var) -> bool,
) -> Result<Option<Substitution>, TermError> {
    let (Some(f), Some(g)) = (t.root(), s.root()) else {
        return Err(TermError::RootMismatch);
    };
    if f != g {
        return Err(TermError::RootMismatch);
    }
    if i == 0 || i > f.arity() {
        return Err(TermError::ArityMismatch {
            symbol: f.name().to_string(),
            arity: f.arity(),
            found: i,
        });
    }
    let pairs = t
        .args()
        .iter()
        .zip(s.args())
        .enumerate()
        .filter(|(k, _)| k + 1 != i)
        .map(|(_, (a, b))| (a.clone(), b.clone()));
    Ok(unify_oriented(pairs, orient))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Sort {
        Sort::new("Nat")
    }

    fn sym(name: &str, arity: usize) -> Arc<FuncSymbol> {
        Arc::new(FuncSymbol::new(
            name,
            vec![nat(); arity],
            nat(),
            SymbolKind::Constructor,
        ))
    }

    fn v(name: &str) -> Term {
        Term::var(name, nat())
    }

    fn app(name: &str, args: Vec<Term>) -> Term {
        Term::app(sym(name, args.len()), args).unwrap()
    }

    fn z() -> Term {
        app("Z", vec![])
    }

    fn s(t: Term) -> Term {
        app("S", vec![t])
    }

    #[test]
    fn positions_of_small_terms() {
        assert_eq!(v("x").positions(), vec![Position::root()]);
        let t = app("plus", vec![z(), v("x")]);
        let ps: Vec<String> = t.positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["e", "1", "2"]);
        let t = app("lastnew", vec![v("y"), v("ys"), v("z")]);
        let ps: Vec<String> = t.positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["e", "1", "2", "3"]);
    }

    #[test]
    fn position_parse_and_order() {
        let p: Position = "1.2".parse().unwrap();
        assert_eq!(p.path(), &[1, 2]);
        assert_eq!("e".parse::<Position>().unwrap(), Position::root());
        assert!("0".parse::<Position>().is_err());
        let q: Position = "1".parse().unwrap();
        assert!(q.is_prefix_of(&p));
        assert!(!p.is_prefix_of(&q));
        assert!(q < p);
        let r: Position = "2".parse().unwrap();
        assert!(r.is_parallel(&p));
        assert!(!q.is_parallel(&p));
    }

    #[test]
    fn subterm_and_replace() {
        let t = app("f", vec![app("a", vec![]), app("a", vec![])]);
        let b = app("b", vec![]);
        let replaced = t.replace(&"2".parse().unwrap(), b.clone()).unwrap();
        assert_eq!(replaced.to_string(), "f(a, b)");
        assert_eq!(t.replace(&Position::root(), b.clone()).unwrap(), b);
        assert!(matches!(
            t.subterm(&"3".parse().unwrap()),
            Err(TermError::PositionOutOfRange(_))
        ));
        let other = Term::app(
            Arc::new(FuncSymbol::new(
                "c",
                vec![],
                Sort::new("Other"),
                SymbolKind::Constructor,
            )),
            vec![],
        )
        .unwrap();
        assert!(matches!(
            t.replace(&"1".parse().unwrap(), other),
            Err(TermError::SortMismatch { .. })
        ));
    }

    #[test]
    fn matching() {
        let m = match_term(&v("x"), &s(z())).unwrap();
        assert_eq!(m.get_by_name("x"), Some(&s(z())));
        let m = match_term(&app("plus", vec![z(), v("x")]), &app("plus", vec![z(), s(z())])).unwrap();
        assert_eq!(m.get_by_name("x"), Some(&s(z())));
        assert!(match_term(&app("plus", vec![s(v("x")), v("y")]), &app("plus", vec![z(), z()])).is_none());
        // nonlinear pattern
        let p = app("f", vec![v("x"), v("x")]);
        assert!(match_term(&p, &app("f", vec![z(), z()])).is_some());
        assert!(match_term(&p, &app("f", vec![z(), s(z())])).is_none());
    }

    #[test]
    fn unification_cases() {
        let m = unify(&v("x"), &v("y")).unwrap();
        assert_eq!(m.to_string(), "{y -> x}");
        assert!(unify(&v("x"), &s(v("x"))).is_none());
        let m = unify(&app("f", vec![v("x"), s(v("y"))]), &app("f", vec![s(z()), v("x")])).unwrap();
        assert_eq!(m.get_by_name("x"), Some(&s(z())));
        assert_eq!(m.get_by_name("y"), Some(&z()));
        assert!(m.is_idempotent());
    }

    #[test]
    fn unify_up_to_argument() {
        let l1 = app("f", vec![z()]);
        let l2 = app("f", vec![s(v("x"))]);
        assert_eq!(unify_up_to_arg(&l1, &l2, 1).unwrap(), Some(Substitution::identity()));
        assert!(matches!(
            unify_up_to_arg(&l1, &l2, 2),
            Err(TermError::ArityMismatch { .. })
        ));
        let a = app("leq_pe", vec![z(), v("x")]);
        let b = app("leq_pe", vec![z(), s(v("y"))]);
        let m = unify_up_to_arg(&a, &b, 1).unwrap().unwrap();
        assert_eq!(m.to_string(), "{x -> S(y)}");
    }

    #[test]
    fn pos_fi_collects_nested_occurrences() {
        // f(f(x,y),y), the rhs of the mutual-recursion-1 program
        let x = v("x");
        let y = v("y");
        let inner = app("f", vec![x, y.clone()]);
        let t = app("f", vec![inner, y]);
        let f = sym("f", 2);
        let ps: Vec<String> = pos_fi(&t, &f, 1).iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["1", "1.1"]);
        assert!(pos_fi(&v("z"), &f, 1).is_empty());
    }

    #[test]
    fn linearity_and_vars() {
        assert!(!app("f", vec![v("x"), v("x")]).is_linear());
        assert!(app("plus", vec![s(v("x")), v("y")]).is_linear());
        assert!(z().vars().is_empty());
    }
}

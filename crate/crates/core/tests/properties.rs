use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redarg_core::erasure::{erase_term, SyntacticErasure};
use redarg_core::oracle::sample_defined_terms;
use redarg_core::rewrite::{bounded_semantics, is_normal_form, Caps, Semantics, SemanticsSelector};
use redarg_core::term::{match_term, unify};
use redarg_core::{parse_trs, FuncSymbol, Position, Sort, Substitution, Term, Trs, Var};

const SIG: &str = "
    sort Nat
    sort List
    cons Z : Nat
    cons S : Nat -> Nat
    cons nil : List
    cons cons : Nat List -> List
    fun  applast : List Nat -> Nat
    fun  lastnew : Nat List Nat -> Nat
    fun  pick : Nat Nat -> Nat
    rule applast(nil, z) -> z
    rule applast(cons(x, xs), z) -> lastnew(x, xs, z)
    rule lastnew(x, nil, z) -> z
    rule lastnew(x, cons(y, ys), z) -> lastnew(y, ys, z)
    rule pick(x, y) -> x
    rule pick(x, y) -> y
";

fn system() -> Trs {
    parse_trs(SIG).unwrap()
}

fn vars(trs: &Trs) -> Vec<Var> {
    let nat = trs.signature().sort("Nat").unwrap().clone();
    let list = trs.signature().sort("List").unwrap().clone();
    vec![
        Var::new("x", nat.clone()),
        Var::new("y", nat),
        Var::new("xs", list.clone()),
        Var::new("ys", list),
    ]
}

/// Random term of `sort`, at most `depth` deep, with variables when `with_vars`.
fn gen(trs: &Trs, sort: &Sort, depth: usize, with_vars: bool, rng: &mut ChaCha8Rng) -> Term {
    let vs: Vec<Var> = vars(trs).into_iter().filter(|v| v.sort() == sort).collect();
    if with_vars && !vs.is_empty() && rng.gen_bool(0.25) {
        return Term::Var(vs.choose(rng).unwrap().clone());
    }
    let syms: Vec<&Arc<FuncSymbol>> = trs
        .signature()
        .symbols_of_sort(sort)
        .filter(|f| depth > 1 || f.arity() == 0)
        .collect();
    let f = (*syms.choose(rng).unwrap()).clone();
    let args = f
        .arg_sorts()
        .to_vec()
        .iter()
        .map(|s| gen(trs, s, depth - 1, with_vars, rng))
        .collect();
    Term::app(f, args).unwrap()
}

fn any_sort(trs: &Trs, rng: &mut ChaCha8Rng) -> Sort {
    trs.signature().sorts().choose(rng).unwrap().clone()
}

fn gen_subst(trs: &Trs, rng: &mut ChaCha8Rng) -> Substitution {
    let mut sigma = Substitution::new();
    for v in vars(trs) {
        if rng.gen_bool(0.7) {
            let t = gen(trs, v.sort(), 3, true, rng);
            sigma.insert(v, t).unwrap();
        }
    }
    sigma
}

fn gen_rho(trs: &Trs, rng: &mut ChaCha8Rng) -> SyntacticErasure {
    let entries: Vec<(String, BTreeSet<usize>)> = trs
        .signature()
        .symbols()
        .iter()
        .map(|f| {
            let idx = (1..=f.arity()).filter(|_| rng.gen_bool(0.4)).collect();
            (f.name().to_string(), idx)
        })
        .collect();
    SyntacticErasure::new(entries, trs.signature()).unwrap()
}

/// Independent rendering of τ_ρ(t).
fn tau_text(t: &Term, rho: &SyntacticErasure) -> String {
    match t {
        Term::Var(x) => x.name().to_string(),
        Term::App(f, args) => {
            let kept: Vec<String> = args
                .iter()
                .enumerate()
                .filter(|(k, _)| !rho.erases(f.name(), k + 1))
                .map(|(_, a)| tau_text(a, rho))
                .collect();
            if kept.is_empty() {
                f.name().to_string()
            } else {
                format!("{}({})", f.name(), kept.join(", "))
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn replace_then_subterm(seed in any::<u64>()) {
        let trs = system();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sort = any_sort(&trs, &mut rng);
        let t = gen(&trs, &sort, 5, true, &mut rng);
        let positions = t.positions();
        let p = positions.choose(&mut rng).unwrap().clone();
        let s = gen(&trs, t.subterm(&p).unwrap().sort(), 3, true, &mut rng);
        let r = t.replace(&p, s.clone()).unwrap();
        prop_assert_eq!(r.subterm(&p).unwrap(), &s);
        for q in &positions {
            if q.is_parallel(&p) {
                prop_assert_eq!(r.subterm(q).unwrap(), t.subterm(q).unwrap());
            }
        }
        let u = gen(&trs, &sort, 3, true, &mut rng);
        prop_assert_eq!(t.replace(&Position::root(), u.clone()).unwrap(), u);
    }

    #[test]
    fn match_round_trip(seed in any::<u64>()) {
        let trs = system();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sort = any_sort(&trs, &mut rng);
        let pattern = gen(&trs, &sort, 4, true, &mut rng);
        let sigma = gen_subst(&trs, &mut rng);
        let instance = sigma.apply(&pattern);
        let found = match_term(&pattern, &instance);
        prop_assert!(found.is_some());
        let found = found.unwrap();
        prop_assert_eq!(found.apply(&pattern), instance);
        // Only variables of the pattern are bound.
        let pv = pattern.vars();
        prop_assert!(found.domain().all(|x| pv.contains(x)));
    }

    #[test]
    fn unifiers_unify_and_are_idempotent(seed in any::<u64>()) {
        let trs = system();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sort = any_sort(&trs, &mut rng);
        let s = gen(&trs, &sort, 4, true, &mut rng);
        // Instances of a common term unify often enough to be interesting.
        let t = if rng.gen_bool(0.5) { gen_subst(&trs, &mut rng).apply(&s) } else { gen(&trs, &sort, 4, true, &mut rng) };
        if let Some(mgu) = unify(&s, &t) {
            prop_assert_eq!(mgu.apply(&s), mgu.apply(&t));
            prop_assert!(mgu.is_idempotent());
            for (x, u) in mgu.iter() {
                prop_assert_eq!(x.sort(), u.sort());
            }
        }
        if s == t {
            prop_assert!(unify(&s, &t).is_some());
        }
    }

    #[test]
    fn rho_is_a_substitution_homomorphism(seed in any::<u64>()) {
        let trs = system();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sort = any_sort(&trs, &mut rng);
        let t = gen(&trs, &sort, 5, true, &mut rng);
        let sigma = gen_subst(&trs, &mut rng);
        let rho = gen_rho(&trs, &mut rng);
        let lhs = erase_term(&sigma.apply(&t), &rho);
        let erased_sigma: Substitution = sigma.iter().map(|(x, u)| (x.clone(), erase_term(u, &rho))).collect();
        let rhs = erased_sigma.apply(&erase_term(&t, &rho));
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(lhs.to_string(), tau_text(&sigma.apply(&t), &rho));
    }
}

#[test]
fn semantics_filtration_on_sampled_terms() {
    let trs = system();
    let caps = Caps::default();
    let mut checked = 0;
    for t in sample_defined_terms(&trs, 100, 4, 7) {
        let red = bounded_semantics(&t, &trs, SemanticsSelector::new(Semantics::Red).with_caps(caps));
        if red.truncated {
            continue;
        }
        let get = |s| bounded_semantics(&t, &trs, SemanticsSelector::new(s).with_caps(caps)).terms;
        let (eval, nf, hnf) = (get(Semantics::Eval), get(Semantics::Nf), get(Semantics::Hnf));
        let expect_eval: BTreeSet<Term> = red.terms.iter().filter(|u| trs.is_value(u)).cloned().collect();
        let expect_nf: BTreeSet<Term> = red.terms.iter().filter(|u| is_normal_form(u, &trs)).cloned().collect();
        assert_eq!(eval, expect_eval, "{t}");
        assert_eq!(nf, expect_nf, "{t}");
        assert!(
            eval.is_subset(&nf) && nf.is_subset(&hnf) && hnf.is_subset(&red.terms),
            "{t}"
        );
        assert!(get(Semantics::Empty).is_empty());
        checked += 1;
    }
    assert!(checked >= 90, "only {checked} untruncated");
}

#[test]
fn sampling_is_seed_deterministic() {
    let trs = system();
    assert_eq!(
        sample_defined_terms(&trs, 50, 5, 3),
        sample_defined_terms(&trs, 50, 5, 3)
    );
    assert_ne!(
        sample_defined_terms(&trs, 50, 5, 3),
        sample_defined_terms(&trs, 50, 5, 4)
    );
}

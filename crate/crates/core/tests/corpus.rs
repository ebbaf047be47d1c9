use std::fs;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use redarg_core::analysis::{analyze, AnalysisConfig, Justification, Method};
use redarg_core::erasure::{erase_trs, erasure_from_analysis, reduced_erasure};
use redarg_core::trs::check_left_linear;
use redarg_core::{parse_trs, Trs};

const BENCHMARKS: [&str; 8] = [
    "bogus",
    "applast",
    "plus_minus",
    "plus_leq",
    "double_even",
    "sum_allzeros",
    "mutrec1",
    "mutrec2",
];

fn corpus(rel: &str) -> Trs {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel);
    parse_trs(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn analysis_ignores_rule_and_candidate_order() {
    for name in BENCHMARKS {
        let trs = corpus(&format!("{name}.trs"));
        let base = analyze(&trs, &AnalysisConfig::default()).redundant;
        for seed in 0..10u64 {
            let mut rules = trs.rules().to_vec();
            rules.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let shuffled = trs.with_rules(rules).unwrap();
            let cfg = AnalysisConfig {
                candidate_seed: Some(seed),
                ..AnalysisConfig::default()
            };
            assert_eq!(analyze(&shuffled, &cfg).redundant, base, "{name}, seed {seed}");
        }
    }
}

#[test]
fn erasures_stay_left_linear() {
    for name in BENCHMARKS {
        let trs = corpus(&format!("{name}.trs"));
        let red = analyze(&trs, &AnalysisConfig::default()).redundant;
        let rho = erasure_from_analysis(&red, trs.signature()).unwrap();
        let plain = erase_trs(&trs, &rho, "'").unwrap();
        assert!(check_left_linear(&plain.trs).is_ok(), "{name}");
        let reduced = reduced_erasure(&plain, 10_000).unwrap();
        assert!(check_left_linear(&reduced.trs).is_ok(), "{name}");
    }
}

#[test]
fn gated_systems_get_no_pattern_claims() {
    for (file, gate) in [
        ("negative/non_confluent.trs", "confluence = no, witness <0, s(0)>"),
        ("negative/non_seval_defined.trs", "g(0) uncovered"),
        ("negative/non_constructor.trs", "not a constructor system"),
    ] {
        let trs = corpus(file);
        let a = analyze(&trs, &AnalysisConfig::default());
        assert!(
            a.entries
                .iter()
                .all(|e| !matches!(e.justification, Justification::PatternCase { .. })),
            "{file}"
        );
        assert!(a.notes.iter().any(|n| n.contains(gate)), "{file}: {:?}", a.notes);
    }
}

#[test]
fn variable_case_alone_finds_useless_variables() {
    let trs = corpus("bogus.trs");
    let cfg = AnalysisConfig {
        methods: [Method::Variable].into(),
        ..AnalysisConfig::default()
    };
    let a = analyze(&trs, &cfg);
    assert!(a.redundant.contains("loop", 2));
    assert_eq!(a.redundant.len(), 1);
}

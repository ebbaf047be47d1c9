//! Benchmark runner: analysis, erasure and step counts over a corpus
//! described by a `bench.toml` manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context as _};
use serde::{Deserialize, Serialize};

use redarg_core::analysis::{analyze, AnalysisConfig, RedundancySet};
use redarg_core::erasure::{canonical_rules, erase_trs, erasure_from_analysis, reduced_erasure};
use redarg_core::rewrite::Rewriter;
use redarg_core::trs::parse_trs;

use crate::load;

#[derive(Debug, Clone, Deserialize)]
pub struct Manifest {
    #[serde(rename = "benchmark")]
    pub benchmarks: Vec<BenchmarkSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BenchmarkSpec {
    pub name: String,
    pub file: String,
    pub expected: String,
    /// Signaled/total count from the reference results table.
    pub rarg: String,
    pub goal: String,
    pub redundant: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub name: String,
    pub detected: RedundancySet,
    pub expected: RedundancySet,
    pub sets_match: bool,
    pub erased_matches: bool,
    /// Rules of the emitted program missing from the expected one, and vice versa.
    pub extra_rules: Vec<String>,
    pub missing_rules: Vec<String>,
    pub warnings: Vec<String>,
    pub signaled: usize,
    pub table_rarg: String,
    pub rarg_consistent: bool,
    pub steps_original: Option<usize>,
    pub steps_erased: Option<usize>,
    pub analysis_seconds: f64,
}

impl BenchRow {
    pub fn passed(&self) -> bool {
        self.sets_match && self.erased_matches
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub analysis_seconds: f64,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(BenchRow::passed)
    }

    pub fn row(&self, name: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

pub fn read_manifest(dir: &Path) -> anyhow::Result<Manifest> {
    let path = dir.join("bench.toml");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Number of signaled positions in a `signaled/total` string.
fn table_signaled(rarg: &str) -> Option<usize> {
    rarg.split('/').next()?.trim().parse().ok()
}

pub fn run_bench(dir: &Path, fuel: usize) -> anyhow::Result<BenchReport> {
    let manifest = read_manifest(dir)?;
    let cfg = AnalysisConfig {
        fuel,
        ..AnalysisConfig::default()
    };
    let mut rows = Vec::new();
    let mut total = 0.0;
    for spec in &manifest.benchmarks {
        let trs = load(&dir.join(&spec.file), false)?;
        let started = Instant::now();
        let analysis = analyze(&trs, &cfg);
        let seconds = started.elapsed().as_secs_f64();
        total += seconds;

        let expected: RedundancySet = spec
            .redundant
            .iter()
            .flat_map(|(f, is)| is.iter().map(move |&i| (f.as_str(), i)))
            .collect();

        let rho =
            erasure_from_analysis(&analysis.redundant, trs.signature()).map_err(|e| anyhow!("{}: {e}", spec.name))?;
        let erased = erase_trs(&trs, &rho, "'").map_err(|e| anyhow!("{}: {e}", spec.name))?;
        let erased = reduced_erasure(&erased, fuel).map_err(|e| anyhow!("{}: {e}", spec.name))?;

        let expected_path = dir.join(&spec.expected);
        let expected_text =
            fs::read_to_string(&expected_path).with_context(|| format!("reading {}", expected_path.display()))?;
        let expected_trs = parse_trs(&expected_text).map_err(|e| anyhow!("{}: {e}", expected_path.display()))?;
        let ours = canonical_rules(&erased.trs);
        let theirs = canonical_rules(&expected_trs);

        let goal = trs
            .parse_ground_term(&spec.goal)
            .map_err(|e| anyhow!("{}: goal: {e}", spec.name))?;
        let original = Rewriter::new(&trs).with_fuel(fuel).normalize(&goal);
        let reduced = Rewriter::new(&erased.trs)
            .with_fuel(fuel)
            .normalize(&erased.erase_term(&goal));

        let signaled = analysis.redundant.len();
        rows.push(BenchRow {
            name: spec.name.clone(),
            sets_match: analysis.redundant == expected,
            detected: analysis.redundant,
            expected,
            erased_matches: ours == theirs,
            extra_rules: ours.difference(&theirs).cloned().collect(),
            missing_rules: theirs.difference(&ours).cloned().collect(),
            warnings: erased.warnings.iter().map(|w| w.to_string()).collect(),
            signaled,
            rarg_consistent: table_signaled(&spec.rarg) == Some(signaled),
            table_rarg: spec.rarg.clone(),
            steps_original: (!original.is_exhausted()).then(|| original.steps()),
            steps_erased: (!reduced.is_exhausted()).then(|| reduced.steps()),
            analysis_seconds: seconds,
        });
    }
    Ok(BenchReport {
        rows,
        analysis_seconds: total,
    })
}

fn steps(n: Option<usize>) -> String {
    n.map_or_else(|| "-".to_string(), |n| n.to_string())
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:<32} {:<6} {:<7} {:<10} {:>6} {:>6}",
            "benchmark", "redundant", "sets", "erased", "rarg", "steps", "after"
        )?;
        for row in &self.rows {
            let rarg = format!("{} ({})", row.signaled, row.table_rarg);
            writeln!(
                f,
                "{:<14} {:<32} {:<6} {:<7} {:<10} {:>6} {:>6}",
                row.name,
                row.detected.to_string(),
                if row.sets_match { "ok" } else { "DIFF" },
                if row.erased_matches { "ok" } else { "DIFF" },
                rarg,
                steps(row.steps_original),
                steps(row.steps_erased),
            )?;
        }
        for row in &self.rows {
            if !row.sets_match {
                writeln!(f, "{}: expected {}, detected {}", row.name, row.expected, row.detected)?;
            }
            for r in &row.extra_rules {
                writeln!(f, "{}: emitted rule not in expected program: {r}", row.name)?;
            }
            for r in &row.missing_rules {
                writeln!(f, "{}: expected rule not emitted: {r}", row.name)?;
            }
            for w in &row.warnings {
                writeln!(f, "{}: warning: {w}", row.name)?;
            }
            if !row.rarg_consistent {
                writeln!(
                    f,
                    "{}: {} positions signaled, table reports {}",
                    row.name, row.signaled, row.table_rarg
                )?;
            }
        }
        let passed = self.rows.iter().filter(|r| r.passed()).count();
        writeln!(
            f,
            "{passed}/{} benchmarks match; analysis took {:.3}s",
            self.rows.len(),
            self.analysis_seconds
        )
    }
}

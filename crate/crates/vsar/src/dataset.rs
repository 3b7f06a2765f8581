//! Dataset files, run configuration, and batch evaluation reports.
//!
//! Puzzles are stored one JSON object per line. Attribute values are
//! integers; rule labels are strings. A fixed `RunConfig` reproduces a
//! dataset byte for byte.

use std::io::{BufRead, Write};

use anyhow::{bail, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codebook::{CodebookSet, PanelLabels};
use crate::raven::{
    generate_puzzle, symbolic_solve, ComponentGrid, ComponentRules, Configuration, FoundRules,
    PuzzleSpec,
};
use crate::reasoner::{solve, ComponentFindings, ReasonAttr, Solution};

pub const DEFAULT_DIMENSION: usize = 3000;
pub const DEFAULT_BETA: f64 = 20.0;
pub const MIN_DIMENSION: usize = 500;
/// Overrides the default base seed; explicit --seed flags always win.
pub const SEED_ENV_VAR: &str = "VSAR_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub codebook: u64,
    pub generator: u64,
    pub noise: u64,
}

impl Seeds {
    /// Derives the three stream seeds from one base seed.
    pub fn from_base(base: u64) -> Self {
        Seeds {
            codebook: base,
            generator: base.wrapping_add(1),
            noise: base.wrapping_add(2),
        }
    }
}

/// Everything needed to reproduce a run; echoed verbatim into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub d: usize,
    pub seeds: Seeds,
    pub beta: f64,
    pub eta: f64,
    pub configurations: Vec<Configuration>,
    pub n_puzzles: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.d < MIN_DIMENSION {
            bail!("dimension {} is below the minimum {}", self.d, MIN_DIMENSION);
        }
        if !(0.0..=1.0).contains(&self.eta) {
            bail!("eta {} must lie in [0, 1]", self.eta);
        }
        if self.configurations.is_empty() {
            bail!("at least one configuration is required");
        }
        Ok(())
    }
}

/// One dataset line. `components` holds the 9 panels of each component
/// grid (the missing panel is present: it is the ground-truth completion).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleRecord {
    pub config: Configuration,
    pub components: Vec<Vec<PanelLabels>>,
    pub candidates: Vec<Vec<PanelLabels>>,
    pub answer: usize,
    pub rules: Vec<ComponentRules>,
}

impl PuzzleRecord {
    pub fn from_spec(spec: &PuzzleSpec) -> Self {
        PuzzleRecord {
            config: spec.configuration,
            components: spec.components.iter().map(|c| c.panels.clone()).collect(),
            candidates: spec.candidates.clone(),
            answer: spec.answer,
            rules: spec.components.iter().map(|c| c.rules.clone()).collect(),
        }
    }

    pub fn to_spec(&self) -> anyhow::Result<PuzzleSpec> {
        let expected_slots = self.config.component_slots();
        if self.components.len() != expected_slots.len() {
            bail!(
                "{} expects {} components, found {}",
                self.config,
                expected_slots.len(),
                self.components.len()
            );
        }
        if self.rules.len() != self.components.len() {
            bail!("rules entries ({}) do not match components ({})", self.rules.len(), self.components.len());
        }
        if self.candidates.len() != 8 {
            bail!("expected 8 candidates, found {}", self.candidates.len());
        }
        if self.answer >= 8 {
            bail!("answer index {} out of range", self.answer);
        }
        let mut components = Vec::with_capacity(self.components.len());
        for (ci, (panels, &n_slots)) in self.components.iter().zip(&expected_slots).enumerate() {
            if panels.len() != 9 {
                bail!("component {ci} has {} panels, expected 9", panels.len());
            }
            for (pi, p) in panels.iter().enumerate() {
                if p.n_slots() != n_slots {
                    bail!("component {ci} panel {pi} has {} slots, expected {n_slots}", p.n_slots());
                }
            }
            components.push(ComponentGrid {
                n_slots,
                panels: panels.clone(),
                rules: self.rules[ci].clone(),
            });
        }
        for (k, cand) in self.candidates.iter().enumerate() {
            if cand.len() != components.len() {
                bail!("candidate {k} has {} panels, expected {}", cand.len(), components.len());
            }
            for (ci, p) in cand.iter().enumerate() {
                if p.n_slots() != expected_slots[ci] {
                    bail!("candidate {k} component {ci} has {} slots, expected {}", p.n_slots(), expected_slots[ci]);
                }
            }
        }
        Ok(PuzzleSpec {
            configuration: self.config,
            components,
            candidates: self.candidates.clone(),
            answer: self.answer,
        })
    }
}

/// Generates `n_puzzles` per configuration, in configuration order, from
/// the generator seed alone.
pub fn generate_records(config: &RunConfig) -> Vec<PuzzleRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seeds.generator);
    let mut records = Vec::with_capacity(config.n_puzzles * config.configurations.len());
    for &c in &config.configurations {
        for _ in 0..config.n_puzzles {
            records.push(PuzzleRecord::from_spec(&generate_puzzle(c, &mut rng)));
        }
    }
    records
}

pub fn write_records<W: Write>(mut w: W, records: &[PuzzleRecord]) -> anyhow::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSON-lines dataset, keeping per-line parse failures so callers
/// can report them with 1-based line numbers.
pub fn read_records<R: BufRead>(r: R) -> anyhow::Result<Vec<(usize, anyhow::Result<PuzzleRecord>)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.context("reading dataset line")?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<PuzzleRecord>(&line)
            .map_err(anyhow::Error::from)
            .and_then(|rec| rec.to_spec().map(|_| rec));
        out.push((i + 1, parsed));
    }
    Ok(out)
}

// -------- reports --------

#[derive(Debug, Clone, Serialize)]
pub struct RuleReport {
    pub attribute: String,
    pub label: Option<String>,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub line: usize,
    pub config: Configuration,
    pub chosen: usize,
    pub answer: usize,
    pub correct: bool,
    pub flagged: bool,
    pub candidate_scores: Vec<f64>,
    pub rules: Vec<Vec<RuleReport>>,
}

fn attr_name(attr: ReasonAttr) -> &'static str {
    match attr {
        ReasonAttr::Shape => "type",
        ReasonAttr::Size => "size",
        ReasonAttr::Color => "color",
        ReasonAttr::Number => "number",
        ReasonAttr::Position => "position",
    }
}

fn rule_reports(components: &[ComponentFindings]) -> Vec<Vec<RuleReport>> {
    components
        .iter()
        .map(|cf| {
            cf.findings
                .iter()
                .map(|f| RuleReport {
                    attribute: attr_name(f.attr).to_string(),
                    label: f.result.as_ref().map(|r| r.label.to_string()),
                    score: f.result.as_ref().map(|r| r.score),
                })
                .collect()
        })
        .collect()
}

pub fn solve_report(
    line: usize,
    record: &PuzzleRecord,
    books: &CodebookSet,
    eta: f64,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<SolveReport> {
    let spec = record.to_spec()?;
    let sol = solve(&spec, books, eta, rng)?;
    Ok(SolveReport {
        line,
        config: record.config,
        chosen: sol.answer,
        answer: record.answer,
        correct: sol.answer == record.answer,
        flagged: sol.flagged,
        candidate_scores: sol.candidate_scores,
        rules: rule_reports(&sol.components),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigAccuracy {
    pub config: Configuration,
    pub puzzles: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub rule_instances: usize,
    pub rule_matches: usize,
    pub rule_accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub run: RunConfig,
    pub per_config: Vec<ConfigAccuracy>,
    pub total_puzzles: usize,
    pub average_accuracy: f64,
    pub overall_rule_accuracy: f64,
}

/// Counts (oracle-labeled instances, reasoner matches) for one component.
fn rule_agreement(found: &ComponentFindings, oracle: &FoundRules) -> (usize, usize) {
    let pairs = [
        (ReasonAttr::Shape, oracle.shape),
        (ReasonAttr::Size, oracle.size),
        (ReasonAttr::Color, oracle.color),
        (ReasonAttr::Number, oracle.number),
        (ReasonAttr::Position, oracle.position),
    ];
    let mut instances = 0;
    let mut matches = 0;
    for (attr, truth) in pairs {
        if let Some(truth) = truth {
            instances += 1;
            if found.label_of(attr) == Some(truth) {
                matches += 1;
            }
        }
    }
    (instances, matches)
}

/// Solves every record and tallies answer accuracy per configuration plus
/// rule agreement against the symbolic first-fit oracle.
pub fn evaluate(
    run: &RunConfig,
    records: &[PuzzleRecord],
    books: &CodebookSet,
) -> anyhow::Result<EvalReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(run.seeds.noise);
    struct Tally {
        puzzles: usize,
        correct: usize,
        rule_instances: usize,
        rule_matches: usize,
    }
    let mut tallies: Vec<(Configuration, Tally)> = Vec::new();
    for record in records {
        let spec = record.to_spec()?;
        let sol: Solution = solve(&spec, books, run.eta, &mut rng)?;
        let (_, oracle_rules) = symbolic_solve(&spec);
        let entry = match tallies.iter_mut().find(|(c, _)| *c == record.config) {
            Some((_, t)) => t,
            None => {
                tallies.push((
                    record.config,
                    Tally { puzzles: 0, correct: 0, rule_instances: 0, rule_matches: 0 },
                ));
                &mut tallies.last_mut().unwrap().1
            }
        };
        entry.puzzles += 1;
        if sol.answer == record.answer {
            entry.correct += 1;
        }
        for (cf, or) in sol.components.iter().zip(oracle_rules.iter()) {
            let (inst, matched) = rule_agreement(cf, or);
            entry.rule_instances += inst;
            entry.rule_matches += matched;
        }
    }
    let per_config: Vec<ConfigAccuracy> = tallies
        .into_iter()
        .map(|(config, t)| ConfigAccuracy {
            config,
            puzzles: t.puzzles,
            correct: t.correct,
            accuracy: ratio(t.correct, t.puzzles),
            rule_instances: t.rule_instances,
            rule_matches: t.rule_matches,
            rule_accuracy: ratio(t.rule_matches, t.rule_instances),
        })
        .collect();
    let total: usize = per_config.iter().map(|c| c.puzzles).sum();
    let correct: usize = per_config.iter().map(|c| c.correct).sum();
    let inst: usize = per_config.iter().map(|c| c.rule_instances).sum();
    let matched: usize = per_config.iter().map(|c| c.rule_matches).sum();
    Ok(EvalReport {
        run: run.clone(),
        per_config,
        total_puzzles: total,
        average_accuracy: ratio(correct, total),
        overall_rule_accuracy: ratio(matched, inst),
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    /// Fixed-width text table; numerically deterministic for a fixed run.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{:<14} {:>8} {:>8} {:>9} {:>9}\n",
            "config", "puzzles", "correct", "accuracy", "rule_acc"
        ));
        for c in &self.per_config {
            s.push_str(&format!(
                "{:<14} {:>8} {:>8} {:>9.4} {:>9.4}\n",
                c.config.to_string(),
                c.puzzles,
                c.correct,
                c.accuracy,
                c.rule_accuracy
            ));
        }
        s.push_str(&format!(
            "{:<14} {:>8} {:>8} {:>9.4} {:>9.4}\n",
            "average",
            self.total_puzzles,
            self.per_config.iter().map(|c| c.correct).sum::<usize>(),
            self.average_accuracy,
            self.overall_rule_accuracy
        ));
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("config,puzzles,correct,accuracy,rule_accuracy\n");
        for c in &self.per_config {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                c.config, c.puzzles, c.correct, c.accuracy, c.rule_accuracy
            ));
        }
        s.push_str(&format!(
            "average,{},{},{},{}\n",
            self.total_puzzles,
            self.per_config.iter().map(|c| c.correct).sum::<usize>(),
            self.average_accuracy,
            self.overall_rule_accuracy
        ));
        s
    }
}

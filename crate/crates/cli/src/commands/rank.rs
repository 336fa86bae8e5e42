//! `falcon rank`: score link-prediction triples against a trained model.
//!
//! For every test triple `r(s, o)` the command scores all named individuals
//! as candidate objects and reports the true object's rank, both raw and
//! filtered (other triples known to be true are removed from the candidate
//! list before ranking). The known set is the training ABox plus the test
//! file itself.

use std::collections::HashSet;
use std::path::PathBuf;

use clap::Args;
use falcon_core::entailment::{role_degree, Aggregate};
use falcon_core::interpreter::ModelHandle;
use falcon_core::metrics::{rank_metrics, rank_of, RankSummary};
use falcon_core::ontology::{parse_axiom, Axiom};
use serde::Serialize;

use crate::error::CliError;
use crate::io::{load_models, read_text, RunContext};

#[derive(Debug, Args)]
pub struct RankCmd {
    /// Checkpoint directory or file from `falcon train`.
    #[arg(long, value_name = "PATH")]
    pub models: PathBuf,
    /// Test triples, one `relation(subject, object)` per line.
    #[arg(long, value_name = "FILE")]
    pub triples: PathBuf,
    /// How per-model scores combine: min or mean.
    #[arg(long, default_value = "min")]
    pub aggregate: Aggregate,
    /// Directory for the rank table, summary, and manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
struct RankReport {
    raw: RankSummary,
    filtered: RankSummary,
    candidates: usize,
    skipped: Vec<SkippedLine>,
}

#[derive(Debug, Serialize)]
struct SkippedLine {
    line: usize,
    text: String,
    error: String,
}

impl RankCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let loaded = load_models(&self.models)?;
        let handles: Vec<ModelHandle> =
            loaded.models.iter().map(|m| m.handle.clone()).collect();
        let text = read_text(&self.triples)?;

        let mut ctx = RunContext::new("rank", &self.out_dir)?;
        for (path, content) in &loaded.inputs {
            ctx.record_input(path, content);
        }
        ctx.record_input(&self.triples.display().to_string(), &text);

        let individuals: Vec<String> =
            loaded.ontology.signature.individuals.iter().map(String::from).collect();
        if individuals.is_empty() {
            return Err(CliError::config("the ontology declares no individuals to rank"));
        }

        // Collect the test triples, reporting bad lines without aborting.
        let mut tests: Vec<(String, String, String)> = Vec::new();
        let mut skipped = Vec::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match parse_axiom(line) {
                Ok(Axiom::RoleAssertion { relation, subject, object }) => {
                    tests.push((relation, subject, object));
                }
                Ok(other) => skipped.push(SkippedLine {
                    line: number + 1,
                    text: line.to_string(),
                    error: format!("not a role assertion: {other}"),
                }),
                Err(e) => skipped.push(SkippedLine {
                    line: number + 1,
                    text: line.to_string(),
                    error: e.to_string(),
                }),
            }
        }
        if tests.is_empty() {
            return Err(CliError::config("no usable triples in the test file"));
        }

        // Known-true triples: training ABox plus the test set itself.
        let mut known: HashSet<(String, String, String)> = loaded
            .ontology
            .role_assertions()
            .map(|(r, s, o)| (r.to_string(), s.to_string(), o.to_string()))
            .collect();
        known.extend(tests.iter().cloned());

        let mut csv = String::from("relation,subject,object,raw_rank,filtered_rank\n");
        let mut raw_ranks = Vec::new();
        let mut filtered_ranks = Vec::new();
        for (relation, subject, object) in &tests {
            let mut positive = None;
            let mut raw_others = Vec::new();
            let mut filtered_others = Vec::new();
            for candidate in &individuals {
                let per_model: Vec<f64> = handles
                    .iter()
                    .map(|h| role_degree(h, relation, subject, candidate))
                    .collect::<Result<_, _>>()?;
                let score = self.aggregate.apply(&per_model);
                if candidate == object {
                    positive = Some(score);
                } else {
                    raw_others.push(score);
                    let triple =
                        (relation.clone(), subject.clone(), candidate.clone());
                    if !known.contains(&triple) {
                        filtered_others.push(score);
                    }
                }
            }
            let positive = positive.ok_or_else(|| {
                CliError::config(format!("object `{object}` is not a declared individual"))
            })?;
            let raw = rank_of(positive, &raw_others);
            let filtered = rank_of(positive, &filtered_others);
            csv.push_str(&format!("{relation},{subject},{object},{raw},{filtered}\n"));
            raw_ranks.push(raw);
            filtered_ranks.push(filtered);
        }

        let report = RankReport {
            raw: rank_metrics(&raw_ranks).expect("at least one test triple"),
            filtered: rank_metrics(&filtered_ranks).expect("at least one test triple"),
            candidates: individuals.len(),
            skipped,
        };
        println!(
            "raw      MRR {:.4}  hits@3 {:.4}  hits@10 {:.4}  ({} triples, {} candidates)",
            report.raw.mrr, report.raw.hits_at_3, report.raw.hits_at_10, tests.len(),
            report.candidates
        );
        println!(
            "filtered MRR {:.4}  hits@3 {:.4}  hits@10 {:.4}",
            report.filtered.mrr, report.filtered.hits_at_3, report.filtered.hits_at_10
        );
        for s in &report.skipped {
            eprintln!("warning: line {}: {} ({})", s.line, s.error, s.text);
        }

        ctx.write("ranks.csv", &csv)?;
        ctx.write("rank_summary.json", &serde_json::to_string_pretty(&report)?)?;
        ctx.finish()?;
        Ok(())
    }
}

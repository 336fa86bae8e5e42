//! `falcon entail`: classify query axioms against a trained ensemble.
//!
//! Queries come one per line in the native axiom syntax; `#` starts a
//! comment. A line that fails to parse or names an unknown symbol is
//! reported and recorded, and the run continues with the next line.

use std::path::PathBuf;

use clap::Args;
use falcon_core::entailment::{entail_axiom, EntailmentVerdict};
use falcon_core::interpreter::ModelHandle;
use falcon_core::ontology::parse_axiom;
use serde::Serialize;

use crate::args::EvalArgs;
use crate::error::CliError;
use crate::io::{load_models, read_text, RunContext};

#[derive(Debug, Args)]
pub struct EntailCmd {
    /// Checkpoint directory or file from `falcon train`.
    #[arg(long, value_name = "PATH")]
    pub models: PathBuf,
    /// File with one query axiom per line.
    #[arg(long, value_name = "FILE")]
    pub queries: PathBuf,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Directory for the verdict file and the manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

/// One line's result: a verdict, or the reason the line was skipped.
#[derive(Debug, Serialize)]
#[serde(untagged)]
enum QueryOutcome {
    Verdict(EntailmentVerdict),
    Failed { query: String, error: String },
}

impl EntailCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let loaded = load_models(&self.models)?;
        let handles: Vec<ModelHandle> =
            loaded.models.iter().map(|m| m.handle.clone()).collect();
        let queries = read_text(&self.queries)?;

        let mut ctx = RunContext::new("entail", &self.out_dir)?;
        for (path, content) in &loaded.inputs {
            ctx.record_input(path, content);
        }
        ctx.record_input(&self.queries.display().to_string(), &queries);

        let spec = self.eval.pool_spec();
        let mut outcomes = Vec::new();
        for (number, line) in queries.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let outcome = parse_axiom(line).map_err(CliError::from).and_then(|axiom| {
                entail_axiom(&handles, &axiom, &spec, self.eval.aggregate, &self.eval.thresholds)
                    .map_err(CliError::from)
            });
            match outcome {
                Ok(verdict) => {
                    println!(
                        "{:<10}  aggregate={:.4}  {}",
                        verdict.classification.to_string(),
                        verdict.aggregate,
                        verdict.query
                    );
                    outcomes.push(QueryOutcome::Verdict(verdict));
                }
                Err(e) => {
                    eprintln!("warning: line {}: {e}", number + 1);
                    outcomes.push(QueryOutcome::Failed {
                        query: line.to_string(),
                        error: e.to_string(),
                    });
                }
            }
        }

        ctx.write("verdicts.json", &serde_json::to_string_pretty(&outcomes)?)?;
        ctx.finish()?;
        Ok(())
    }
}

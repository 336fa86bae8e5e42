//! `falcon consistency`: degree to which the ABox can hold alongside the
//! TBox — per model the weakest assertion, across models the best model.

use std::path::PathBuf;

use clap::Args;
use falcon_core::entailment::consistency_degree;
use serde::Serialize;

use crate::args::PoolArgs;
use crate::error::CliError;
use crate::io::{load_models, RunContext};

#[derive(Debug, Args)]
pub struct ConsistencyCmd {
    /// Checkpoint directory or file from `falcon train`.
    #[arg(long, value_name = "PATH")]
    pub models: PathBuf,
    #[command(flatten)]
    pub pool: PoolArgs,
    /// Directory for the report and the manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
struct ConsistencyReport {
    per_model: Vec<f64>,
    /// Max over models: one good model is enough.
    degree: f64,
    assertions: usize,
}

impl ConsistencyCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let loaded = load_models(&self.models)?;
        let mut ctx = RunContext::new("consistency", &self.out_dir)?;
        for (path, content) in &loaded.inputs {
            ctx.record_input(path, content);
        }

        let pool = self.pool.pool_spec().build(&loaded.models[0].handle, "consistency");
        let per_model: Vec<f64> = loaded
            .models
            .iter()
            .map(|m| consistency_degree(&m.handle, &pool, &loaded.ontology))
            .collect::<Result<_, _>>()?;
        let degree = per_model.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let report =
            ConsistencyReport { per_model, degree, assertions: loaded.ontology.abox.len() };

        println!(
            "consistency degree {:.4} over {} model(s), {} assertion(s)",
            report.degree,
            report.per_model.len(),
            report.assertions
        );
        ctx.write("consistency.json", &serde_json::to_string_pretty(&report)?)?;
        ctx.finish()?;
        Ok(())
    }
}

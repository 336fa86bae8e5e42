//! `falcon instantiate`: score named individuals' membership in a concept.
//!
//! All individuals are scored on one shared evaluation pool (keyed by the
//! concept), so degrees are comparable across rows; output is sorted by
//! aggregate degree, best first.

use std::path::PathBuf;

use clap::Args;
use falcon_core::entailment::classify;
use falcon_core::interpreter::ModelHandle;
use falcon_core::ontology::parse_concept;

use crate::args::EvalArgs;
use crate::error::CliError;
use crate::io::{load_models, RunContext};

#[derive(Debug, Args)]
pub struct InstantiateCmd {
    /// Checkpoint directory or file from `falcon train`.
    #[arg(long, value_name = "PATH")]
    pub models: PathBuf,
    /// Concept expression in the native syntax, e.g. "(Female and Parent)".
    #[arg(long, value_name = "EXPR")]
    pub concept: String,
    /// Restrict to one named individual (default: score all of them).
    #[arg(long, value_name = "NAME")]
    pub individual: Option<String>,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Directory for the result file and the manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

impl InstantiateCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let loaded = load_models(&self.models)?;
        let handles: Vec<ModelHandle> =
            loaded.models.iter().map(|m| m.handle.clone()).collect();
        let concept = parse_concept(&self.concept)?;

        let individuals: Vec<String> = match &self.individual {
            Some(name) => {
                if !loaded.ontology.signature.individuals.contains(name) {
                    return Err(CliError::config(format!(
                        "individual `{name}` is not declared in the ontology"
                    )));
                }
                vec![name.clone()]
            }
            None => loaded.ontology.signature.individuals.iter().map(String::from).collect(),
        };
        if individuals.is_empty() {
            return Err(CliError::config("the ontology declares no individuals"));
        }

        let mut ctx = RunContext::new("instantiate", &self.out_dir)?;
        for (path, content) in &loaded.inputs {
            ctx.record_input(path, content);
        }

        // One pool for every row keeps the quantifier scopes identical, so
        // degrees are comparable between individuals.
        let pool = self.eval.pool_spec().build(&handles[0], &concept.to_string());
        let mut verdicts = Vec::new();
        for name in &individuals {
            let per_model: Vec<f64> = handles
                .iter()
                .map(|h| falcon_core::entailment::instantiation_degree(h, &pool, name, &concept))
                .collect::<Result<_, _>>()?;
            verdicts.push(classify(
                format!("{name} : {concept}"),
                per_model,
                self.eval.aggregate,
                &self.eval.thresholds,
            ));
        }
        verdicts.sort_by(|a, b| b.aggregate.total_cmp(&a.aggregate));

        for v in &verdicts {
            println!("{:<10}  aggregate={:.4}  {}", v.classification.to_string(), v.aggregate, v.query);
        }
        ctx.write("instantiations.json", &serde_json::to_string_pretty(&verdicts)?)?;
        ctx.finish()?;
        Ok(())
    }
}

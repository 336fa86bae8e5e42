//! Argument groups shared across subcommands: ontology sources, training
//! configuration assembly, and evaluation-side options.

use std::path::PathBuf;

use clap::Args;
use falcon_core::entailment::{Aggregate, EvalPoolSpec, Thresholds};
use falcon_core::fuzzy::TNormFamily;
use falcon_core::ontology::{builtin_family, parse_ontology, Ontology};
use falcon_core::training::TrainConfig;

use crate::error::CliError;
use crate::io::read_text;

/// Where the ontology comes from: a file in the native axiom syntax or a
/// bundled fixture.
#[derive(Debug, Args)]
pub struct OntologySource {
    /// Ontology file in the native axiom syntax.
    #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
    pub ontology: Option<PathBuf>,
    /// Bundled ontology name (available: family).
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,
}

impl OntologySource {
    /// Load the ontology, its source text, and a label for the manifest.
    pub fn load(&self) -> Result<(Ontology, String, String), CliError> {
        match (&self.ontology, &self.builtin) {
            (Some(path), None) => {
                let text = read_text(path)?;
                let ontology = parse_ontology(&text)?;
                Ok((ontology, text, path.display().to_string()))
            }
            (None, Some(name)) if name == "family" => {
                let ontology = builtin_family();
                let text = ontology.render();
                Ok((ontology, text, "builtin:family".into()))
            }
            (None, Some(other)) => Err(CliError::config(format!(
                "unknown builtin ontology `{other}` (available: family)"
            ))),
            (None, None) => {
                Err(CliError::config("provide --ontology FILE or --builtin family"))
            }
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        }
    }
}

/// Training configuration assembled from an optional TOML file plus flag
/// overrides. Flags beat the file; the file beats the defaults.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// TOML file with training configuration.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Fuzzy operator family: goedel, product, or lukasiewicz.
    #[arg(long)]
    pub tnorm: Option<TNormFamily>,
    /// Embedding width.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Hidden layer widths of the scoring networks, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "W,..")]
    pub hidden: Option<Vec<usize>>,
    /// Adam learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Gradient steps per model.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Weight of the subsumption loss component.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weight of the concept-assertion loss component.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Base seed; model i trains from seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of models in the ensemble.
    #[arg(short = 'k', long = "models", value_name = "K")]
    pub models: Option<usize>,
    /// Weight of the pairwise ranking loss (0 disables it).
    #[arg(long)]
    pub bpr_weight: Option<f64>,
}

impl ConfigArgs {
    /// Produce the effective, validated training configuration.
    pub fn build(&self) -> Result<TrainConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => TrainConfig::from_toml_str(&read_text(path)?)
                .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?,
            None => TrainConfig::default(),
        };
        if let Some(t) = self.tnorm {
            config.tnorm = t;
        }
        if let Some(d) = self.dim {
            config.dim = d;
        }
        if let Some(h) = &self.hidden {
            config.hidden = Some(h.clone());
        }
        if let Some(lr) = self.lr {
            config.learning_rate = lr;
        }
        if let Some(s) = self.steps {
            config.steps = s;
        }
        if let Some(a) = self.alpha {
            config.alpha = a;
        }
        if let Some(b) = self.beta {
            config.beta = b;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(k) = self.models {
            config.models = k;
        }
        if let Some(w) = self.bpr_weight {
            config.bpr_weight = w;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Evaluation-pool sizing, shared by every command that scores queries.
#[derive(Debug, Clone, Args)]
pub struct PoolArgs {
    /// Anonymous individuals added to each evaluation pool.
    #[arg(long = "eval-pool", value_name = "N", default_value_t = 64)]
    pub eval_pool: usize,
    /// Base seed for evaluation pools (mixed with a per-query hash).
    #[arg(long, default_value_t = 0)]
    pub pool_seed: u64,
}

impl PoolArgs {
    pub fn pool_spec(&self) -> EvalPoolSpec {
        EvalPoolSpec { anonymous: self.eval_pool, seed: self.pool_seed }
    }
}

/// Full evaluation options for the classification commands.
#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub pool: PoolArgs,
    /// How per-model degrees combine: min or mean.
    #[arg(long, default_value = "min")]
    pub aggregate: Aggregate,
    /// Entailment and disproof thresholds, as ENTAIL or ENTAIL,DISPROVE.
    #[arg(long, default_value = "0.7,0.7", value_parser = parse_thresholds)]
    pub thresholds: Thresholds,
}

impl EvalArgs {
    pub fn pool_spec(&self) -> EvalPoolSpec {
        self.pool.pool_spec()
    }
}

fn parse_thresholds(s: &str) -> Result<Thresholds, String> {
    let parse_one = |p: &str| -> Result<f64, String> {
        let v: f64 = p.trim().parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !(0.5..=1.0).contains(&v) {
            return Err(format!("threshold {v} lies outside [0.5, 1]"));
        }
        Ok(v)
    };
    match s.split(',').collect::<Vec<_>>().as_slice() {
        [e] => {
            let e = parse_one(e)?;
            Ok(Thresholds { entail: e, disprove: e })
        }
        [e, d] => Ok(Thresholds { entail: parse_one(e)?, disprove: parse_one(d)? }),
        _ => Err("expected ENTAIL or ENTAIL,DISPROVE".into()),
    }
}

//! `falcon bench`: sweep inconsistency level and ensemble size, scoring a
//! labeled axiom set at every grid cell into a plot-ready CSV.
//!
//! For each injection count the whole pool of models is retrained on the
//! corrupted ontology; each requested ensemble size then scores the first
//! k models of that pool, so rows within a column describe nested
//! ensembles. Per row the CSV reports MAE on the expected-entailed set,
//! AUC/AUPR/Fmax of entailed versus unprovable, the mean AUC of the k
//! single models (`auc_avg`), and how much the aggregated ensemble beats
//! that mean (`multi_minus_avg`).

use std::path::PathBuf;

use clap::Args;
use falcon_core::entailment::{axiom_degree, Aggregate, EvalPoolSpec};
use falcon_core::interpreter::ModelHandle;
use falcon_core::metrics::{auc, aupr, fmax, inject_inconsistency, mae_entailed};
use falcon_core::ontology::{entailed_eval_axioms, parse_axiom, unprovable_eval_axioms, Axiom};
use falcon_core::training::train_ensemble;
use log::info;

use crate::args::{ConfigArgs, OntologySource, PoolArgs};
use crate::error::CliError;
use crate::io::{read_text, RunContext};

#[derive(Debug, Args)]
pub struct BenchCmd {
    #[command(flatten)]
    pub source: OntologySource,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Comma-separated injection counts (0 = the clean ontology).
    #[arg(long = "n-inc", value_delimiter = ',', default_value = "0,1,5,10")]
    pub n_inc: Vec<usize>,
    /// Comma-separated ensemble sizes to score; the largest sets the pool
    /// of models trained per injection level (-k is ignored here).
    #[arg(long = "k-list", value_delimiter = ',', default_value = "1,5,10")]
    pub k_list: Vec<usize>,
    /// Expected-entailed axioms, one per line (default: the bundled family
    /// evaluation set; required for a custom ontology).
    #[arg(long, value_name = "FILE")]
    pub positives: Option<PathBuf>,
    /// Unprovable axioms, one per line (default as above).
    #[arg(long, value_name = "FILE")]
    pub negatives: Option<PathBuf>,
    #[command(flatten)]
    pub pool: PoolArgs,
    /// How per-model degrees combine into the Multi column: min or mean.
    #[arg(long, default_value = "min")]
    pub aggregate: Aggregate,
    /// Directory for the CSV and the manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

impl BenchCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let (ontology, text, label) = self.source.load()?;
        let base_config = self.config.build()?;
        if self.n_inc.is_empty() || self.k_list.is_empty() {
            return Err(CliError::config("--n-inc and --k-list must be non-empty"));
        }
        if self.k_list.contains(&0) {
            return Err(CliError::config("ensemble sizes must be at least 1"));
        }
        let max_k = *self.k_list.iter().max().expect("non-empty list");

        let mut ctx = RunContext::new("bench", &self.out_dir)?;
        ctx.record_input(&label, &text);
        ctx.set_config(&base_config);
        let positives = self.eval_set(&self.positives, entailed_eval_axioms, &mut ctx, "positives")?;
        let negatives =
            self.eval_set(&self.negatives, unprovable_eval_axioms, &mut ctx, "negatives")?;

        let spec = self.pool.pool_spec();
        let mut csv = String::from("n_inc,k,mae,auc,aupr,fmax,auc_avg,multi_minus_avg\n");
        println!("n_inc  k   mae     auc     aupr    fmax    auc_avg delta");
        for &n in &self.n_inc {
            let working = if n == 0 {
                ontology.clone()
            } else {
                // Each injection level is an independent, seeded corruption.
                let seed = base_config.seed.wrapping_add(n as u64);
                ctx.push_seed(seed);
                inject_inconsistency(&ontology, n, seed)?.0
            };
            let mut config = base_config.clone();
            config.models = max_k;
            info!("bench cell n_inc={n}: training {max_k} models");
            let models = train_ensemble(&working, &config)?;
            for model in &models {
                ctx.push_seed(model.seed);
            }
            let handles: Vec<ModelHandle> = models.into_iter().map(|m| m.handle).collect();

            // Score each axiom once across the whole pool; ensemble sizes
            // below just slice the per-model degree vectors.
            let pos = degree_table(&handles, &positives, &spec)?;
            let neg = degree_table(&handles, &negatives, &spec)?;

            for &k in &self.k_list {
                let agg = |row: &Vec<f64>| self.aggregate.apply(&row[..k]);
                let pos_k: Vec<f64> = pos.iter().map(agg).collect();
                let neg_k: Vec<f64> = neg.iter().map(agg).collect();
                let mae = mae_entailed(&pos_k).expect("positives are non-empty");
                let auc_multi = auc(&pos_k, &neg_k).expect("both sides non-empty");
                let aupr_multi = aupr(&pos_k, &neg_k).expect("both sides non-empty");
                let fmax_multi = fmax(&pos_k, &neg_k).expect("both sides non-empty");
                let auc_avg = (0..k)
                    .map(|i| {
                        let p: Vec<f64> = pos.iter().map(|row| row[i]).collect();
                        let n: Vec<f64> = neg.iter().map(|row| row[i]).collect();
                        auc(&p, &n).expect("both sides non-empty")
                    })
                    .sum::<f64>()
                    / k as f64;
                let delta = auc_multi - auc_avg;
                csv.push_str(&format!(
                    "{n},{k},{mae},{auc_multi},{aupr_multi},{fmax_multi},{auc_avg},{delta}\n"
                ));
                println!(
                    "{n:<6} {k:<3} {mae:<7.4} {auc_multi:<7.4} {aupr_multi:<7.4} \
                     {fmax_multi:<7.4} {auc_avg:<7.4} {delta:+.4}"
                );
            }
        }

        ctx.write("bench.csv", &csv)?;
        ctx.finish()?;
        Ok(())
    }

    /// Load a labeled axiom set from a file, or fall back to the bundled
    /// family set when the ontology is the builtin one.
    fn eval_set(
        &self,
        path: &Option<PathBuf>,
        bundled: fn() -> Vec<Axiom>,
        ctx: &mut RunContext,
        what: &str,
    ) -> Result<Vec<Axiom>, CliError> {
        let axioms = match path {
            Some(p) => {
                let text = read_text(p)?;
                ctx.record_input(&p.display().to_string(), &text);
                let mut parsed = Vec::new();
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    parsed.push(parse_axiom(line)?);
                }
                parsed
            }
            None if self.source.builtin.as_deref() == Some("family") => bundled(),
            None => {
                return Err(CliError::config(format!(
                    "--{what} is required when benchmarking a custom ontology"
                )))
            }
        };
        if axioms.is_empty() {
            return Err(CliError::config(format!("the {what} set is empty")));
        }
        Ok(axioms)
    }
}

/// Per-model degree of every axiom: `table[axiom][model]`.
fn degree_table(
    handles: &[ModelHandle],
    axioms: &[Axiom],
    spec: &EvalPoolSpec,
) -> Result<Vec<Vec<f64>>, CliError> {
    let mut table = Vec::with_capacity(axioms.len());
    for axiom in axioms {
        let pool = spec.build(&handles[0], &axiom.to_string());
        let row: Vec<f64> = handles
            .iter()
            .map(|h| axiom_degree(h, &pool, axiom))
            .collect::<Result<_, _>>()?;
        table.push(row);
    }
    Ok(table)
}

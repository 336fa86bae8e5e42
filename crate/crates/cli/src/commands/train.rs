//! `falcon train`: fit an ensemble and write checkpoints, loss traces, and
//! the run manifest.

use std::path::PathBuf;

use clap::Args;
use falcon_core::checkpoint::ModelCheckpoint;
use falcon_core::training::{train_ensemble, LossBreakdown};
use log::info;

use crate::args::{ConfigArgs, OntologySource};
use crate::error::CliError;
use crate::io::{read_text, RunContext};

#[derive(Debug, Args)]
pub struct TrainCmd {
    #[command(flatten)]
    pub source: OntologySource,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Directory for checkpoints, loss traces, and the manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

impl TrainCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let (ontology, text, label) = self.source.load()?;
        let config = self.config.build()?;
        let mut ctx = RunContext::new("train", &self.out_dir)?;
        ctx.record_input(&label, &text);
        if let Some(path) = &self.config.config {
            ctx.record_input(&path.display().to_string(), &read_text(path)?);
        }
        ctx.set_config(&config);

        info!(
            "training {} model(s), {} steps each, dim {}, on {label}",
            config.models, config.steps, config.dim
        );
        let models = train_ensemble(&ontology, &config)?;

        for (i, model) in models.iter().enumerate() {
            ctx.push_seed(model.seed);
            let checkpoint = ModelCheckpoint::from_model(model, &text);
            ctx.write(&format!("model_{i:02}.json"), &serde_json::to_string_pretty(&checkpoint)?)?;
            ctx.write(&format!("loss_{i:02}.csv"), &loss_csv(&model.loss_trace))?;
            let last = model
                .final_loss()
                .map(|l| format!("{l:.6}"))
                .unwrap_or_else(|| "n/a (0 steps)".into());
            println!("model {i:02}: seed {}, final loss {last}", model.seed);
        }

        let manifest = ctx.finish()?;
        println!(
            "wrote {} checkpoint(s) to {} (manifest: {})",
            models.len(),
            self.out_dir.display(),
            manifest.display()
        );
        Ok(())
    }
}

fn loss_csv(trace: &[LossBreakdown]) -> String {
    let mut out = String::from("step,total,tbox,abox_concepts,abox_roles,ranking\n");
    for (step, l) in trace.iter().enumerate() {
        out.push_str(&format!(
            "{step},{},{},{},{},{}\n",
            l.total, l.tbox, l.abox_concepts, l.abox_roles, l.ranking
        ));
    }
    out
}

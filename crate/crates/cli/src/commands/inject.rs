//! `falcon inject`: plant contradictions into an ontology by asserting
//! fresh individuals into both sides of declared-disjoint concept pairs.

use std::path::PathBuf;

use clap::Args;
use falcon_core::metrics::inject_inconsistency;

use crate::args::OntologySource;
use crate::error::CliError;
use crate::io::RunContext;

#[derive(Debug, Args)]
pub struct InjectCmd {
    #[command(flatten)]
    pub source: OntologySource,
    /// Number of contradictory individuals to plant.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Seed choosing which disjoint pairs get violated.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the injected ontology, its record, and the manifest.
    #[arg(long, value_name = "DIR", default_value = "falcon-out")]
    pub out_dir: PathBuf,
}

impl InjectCmd {
    pub fn run(&self) -> Result<(), CliError> {
        let (ontology, text, label) = self.source.load()?;
        let mut ctx = RunContext::new("inject", &self.out_dir)?;
        ctx.record_input(&label, &text);
        ctx.push_seed(self.seed);

        let (injected, record) = inject_inconsistency(&ontology, self.count, self.seed)?;
        ctx.write("injected.ont", &injected.render())?;
        ctx.write("injections.json", &serde_json::to_string_pretty(&record)?)?;
        ctx.finish()?;

        println!(
            "planted {} contradiction(s) into {label}: {} axioms -> {}",
            record.records.len(),
            ontology.tbox.len() + ontology.abox.len(),
            injected.tbox.len() + injected.abox.len()
        );
        for r in &record.records {
            println!("  {} : {} and {}", r.individual, r.left, r.right);
        }
        Ok(())
    }
}

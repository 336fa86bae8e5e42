//! File plumbing: reading inputs, locating checkpoints, and the run
//! context every subcommand writes its outputs and manifest through.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use falcon_core::checkpoint::{EnsembleCheckpoint, ModelCheckpoint, RunManifest};
use falcon_core::ontology::Ontology;
use falcon_core::training::{TrainConfig, TrainedModel};

use crate::error::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

/// A restored ensemble plus everything the manifest needs to cite it.
pub struct LoadedEnsemble {
    pub ontology: Ontology,
    pub models: Vec<TrainedModel>,
    /// (display path, file content) for manifest input hashing.
    pub inputs: Vec<(String, String)>,
}

/// Load an ensemble from a checkpoint directory (every `model_*.json`, in
/// name order), a single-model checkpoint file, or an ensemble checkpoint
/// file.
pub fn load_models(path: &Path) -> Result<LoadedEnsemble, CliError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut found: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?
            .filter_map(|entry| entry.ok())
            .map(|entry| entry.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("model_") && n.ends_with(".json"))
            })
            .collect();
        found.sort();
        if found.is_empty() {
            let ensemble = path.join("ensemble.json");
            if ensemble.is_file() {
                vec![ensemble]
            } else {
                return Err(CliError::config(format!(
                    "no checkpoints in {} (expected model_*.json or ensemble.json)",
                    path.display()
                )));
            }
        } else {
            found
        }
    } else if path.is_file() {
        vec![path.to_path_buf()]
    } else {
        return Err(CliError::config(format!("{} does not exist", path.display())));
    };

    let mut models: Vec<TrainedModel> = Vec::new();
    let mut inputs = Vec::new();
    let mut ontology: Option<Ontology> = None;
    let mut pinned: Option<(String, usize)> = None; // (ontology hash, dim)

    for file in &files {
        let text = read_text(file)?;
        // Ensemble checkpoints are the ones with a members array.
        let sniff: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::parse(format!("{}: {e}", file.display())))?;
        let (sha, dim, mut restored) = if sniff.get("members").is_some() {
            let checkpoint = EnsembleCheckpoint::from_json(&text)
                .map_err(|e| annotate(file, e.into()))?;
            let sha = checkpoint.ontology_sha256.clone();
            let dim = checkpoint.config.dim;
            let (onto, ms) = checkpoint.restore().map_err(|e| annotate(file, e.into()))?;
            ontology.get_or_insert(onto);
            (sha, dim, ms)
        } else {
            let checkpoint =
                ModelCheckpoint::from_json(&text).map_err(|e| annotate(file, e.into()))?;
            let sha = checkpoint.ontology_sha256.clone();
            let dim = checkpoint.config.dim;
            let (onto, model) = checkpoint.restore().map_err(|e| annotate(file, e.into()))?;
            ontology.get_or_insert(onto);
            (sha, dim, vec![model])
        };
        match &pinned {
            None => pinned = Some((sha, dim)),
            Some((first_sha, first_dim)) => {
                if *first_sha != sha {
                    return Err(CliError::config(format!(
                        "{} was trained on a different ontology than the other checkpoints",
                        file.display()
                    )));
                }
                if *first_dim != dim {
                    return Err(CliError::config(format!(
                        "{} uses embedding width {dim}, the other checkpoints use {first_dim}; \
                         an ensemble must share one width",
                        file.display()
                    )));
                }
            }
        }
        inputs.push((file.display().to_string(), text));
        models.append(&mut restored);
    }

    Ok(LoadedEnsemble {
        ontology: ontology.expect("at least one checkpoint file loaded"),
        models,
        inputs,
    })
}

fn annotate(path: &Path, e: CliError) -> CliError {
    match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        CliError::Numeric(m) => CliError::Numeric(format!("{}: {m}", path.display())),
    }
}

/// Collects the run manifest for one command and funnels every output file
/// through a single place so nothing escapes the record.
pub struct RunContext {
    out_dir: PathBuf,
    manifest: RunManifest,
    started: Instant,
}

impl RunContext {
    pub fn new(command: &str, out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir)
            .map_err(|e| CliError::config(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(RunContext {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest::new(command, std::env::args().collect()),
            started: Instant::now(),
        })
    }

    pub fn record_input(&mut self, label: &str, content: &str) {
        self.manifest.record_input(label, content);
    }

    pub fn set_config(&mut self, config: &TrainConfig) {
        self.manifest.config = Some(config.clone());
    }

    pub fn push_seed(&mut self, seed: u64) {
        self.manifest.seeds.push(seed);
    }

    /// Write one output file into the run directory and record it.
    pub fn write(&mut self, name: &str, content: &str) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, content)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.record_output(&path);
        Ok(path)
    }

    /// Seal the run: stamp the wall clock and write `manifest.json`.
    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.manifest.wall_clock_secs = self.started.elapsed().as_secs_f64();
        let path = self.out_dir.join("manifest.json");
        self.manifest
            .save(&path)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

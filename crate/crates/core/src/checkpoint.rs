//! Saving and restoring trained models, bit for bit.
//!
//! Checkpoints are JSON. Parameters are `f64`s serialized in
//! shortest-round-trip form, so a value survives save/load exactly; a
//! restored model answers every query with the same bits as the original.
//! Each checkpoint embeds the ontology text it was trained on together
//! with its SHA-256, so a file tampered with (or paired with the wrong
//! ontology) is rejected instead of silently producing a mismatched model.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diff::{DiffError, ParamStore};
use crate::interpreter::ModelHandle;
use crate::ontology::{parse_ontology, Ontology, ParseError};
use crate::training::{LossBreakdown, TrainConfig, TrainedModel};

/// Current checkpoint format. Bump on breaking layout changes.
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("checkpoint is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported checkpoint version {found} (this build reads version {expected})")]
    Version { found: u32, expected: u32 },
    #[error("embedded ontology does not match its recorded hash; the checkpoint is corrupt")]
    HashMismatch,
    #[error("embedded ontology no longer parses: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// Hex SHA-256 of a text, as stored in checkpoints and manifests.
pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One trained model, self-contained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCheckpoint {
    pub format_version: u32,
    pub seed: u64,
    pub config: TrainConfig,
    pub ontology_sha256: String,
    pub ontology_text: String,
    pub params: ParamStore,
    pub loss_trace: Vec<LossBreakdown>,
}

impl ModelCheckpoint {
    pub fn from_model(model: &TrainedModel, ontology_text: &str) -> Self {
        ModelCheckpoint {
            format_version: CHECKPOINT_VERSION,
            seed: model.seed,
            config: model.config.clone(),
            ontology_sha256: sha256_hex(ontology_text),
            ontology_text: ontology_text.to_owned(),
            params: model.handle.params.clone(),
            loss_trace: model.loss_trace.clone(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
        Ok(fs::write(path, serde_json::to_string_pretty(self)?)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CheckpointError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Parse and verify a checkpoint already read into memory.
    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        let checkpoint: ModelCheckpoint = serde_json::from_str(text)?;
        checkpoint.verify()?;
        Ok(checkpoint)
    }

    fn verify(&self) -> Result<(), CheckpointError> {
        if self.format_version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version {
                found: self.format_version,
                expected: CHECKPOINT_VERSION,
            });
        }
        if sha256_hex(&self.ontology_text) != self.ontology_sha256 {
            return Err(CheckpointError::HashMismatch);
        }
        Ok(())
    }

    /// Rebuild the ontology and the trained model.
    pub fn restore(self) -> Result<(Ontology, TrainedModel), CheckpointError> {
        let ontology = parse_ontology(&self.ontology_text)?;
        let handle = ModelHandle::assemble(
            ontology.signature.clone(),
            self.config.dim,
            self.config.hidden_layers(),
            self.config.tnorm,
            self.params,
        )?;
        Ok((
            ontology,
            TrainedModel {
                handle,
                seed: self.seed,
                config: self.config,
                loss_trace: self.loss_trace,
            },
        ))
    }
}

/// Per-model payload inside an ensemble checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub seed: u64,
    pub params: ParamStore,
    pub loss_trace: Vec<LossBreakdown>,
}

/// A whole ensemble in one file: shared config and ontology, one parameter
/// set per member.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleCheckpoint {
    pub format_version: u32,
    pub config: TrainConfig,
    pub ontology_sha256: String,
    pub ontology_text: String,
    pub members: Vec<EnsembleMember>,
}

impl EnsembleCheckpoint {
    pub fn from_models(models: &[TrainedModel], ontology_text: &str) -> Self {
        assert!(!models.is_empty(), "an ensemble checkpoint needs at least one model");
        EnsembleCheckpoint {
            format_version: CHECKPOINT_VERSION,
            config: models[0].config.clone(),
            ontology_sha256: sha256_hex(ontology_text),
            ontology_text: ontology_text.to_owned(),
            members: models
                .iter()
                .map(|m| EnsembleMember {
                    seed: m.seed,
                    params: m.handle.params.clone(),
                    loss_trace: m.loss_trace.clone(),
                })
                .collect(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
        Ok(fs::write(path, serde_json::to_string_pretty(self)?)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CheckpointError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Parse and verify a checkpoint already read into memory.
    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        let checkpoint: EnsembleCheckpoint = serde_json::from_str(text)?;
        if checkpoint.format_version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version {
                found: checkpoint.format_version,
                expected: CHECKPOINT_VERSION,
            });
        }
        if sha256_hex(&checkpoint.ontology_text) != checkpoint.ontology_sha256 {
            return Err(CheckpointError::HashMismatch);
        }
        Ok(checkpoint)
    }

    pub fn restore(self) -> Result<(Ontology, Vec<TrainedModel>), CheckpointError> {
        let ontology = parse_ontology(&self.ontology_text)?;
        let models = self
            .members
            .into_iter()
            .map(|member| -> Result<TrainedModel, CheckpointError> {
                let handle = ModelHandle::assemble(
                    ontology.signature.clone(),
                    self.config.dim,
                    self.config.hidden_layers(),
                    self.config.tnorm,
                    member.params,
                )?;
                Ok(TrainedModel {
                    handle,
                    seed: member.seed,
                    config: self.config.clone(),
                    loss_trace: member.loss_trace,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok((ontology, models))
    }
}

/// What a command was run with: the subcommand, the exact argv, hashes of
/// every input file, the effective training config and seeds, and the paths
/// written. Enough to replay the run, confirm the inputs are unchanged, and
/// find everything it produced. The wall-clock field is informational and is
/// the one field allowed to differ between a run and its replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    /// Subcommand name (`train`, `entail`, ...).
    pub command: String,
    /// Full argument vector for replaying the run.
    pub argv: Vec<String>,
    /// Effective training configuration, when the command trains.
    pub config: Option<TrainConfig>,
    /// Every seed consumed by the run, in consumption order.
    pub seeds: Vec<u64>,
    /// Input path -> SHA-256 of its content at run time.
    pub inputs: BTreeMap<String, String>,
    /// Output paths the run wrote, in write order.
    pub outputs: Vec<String>,
    /// Seconds the run took. Informational only.
    pub wall_clock_secs: f64,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, argv: Vec<String>) -> Self {
        RunManifest {
            format_version: CHECKPOINT_VERSION,
            command: command.into(),
            argv,
            config: None,
            seeds: Vec::new(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }

    pub fn record_input(&mut self, path: impl AsRef<Path>, content: &str) {
        self.inputs.insert(path.as_ref().display().to_string(), sha256_hex(content));
    }

    pub fn record_output(&mut self, path: impl AsRef<Path>) {
        self.outputs.push(path.as_ref().display().to_string());
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
        Ok(fs::write(path, serde_json::to_string_pretty(self)?)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CheckpointError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entailment::EvalPoolSpec;
    use crate::ontology::builtin_family;
    use crate::training::train_model;

    fn trained_pair() -> (String, TrainedModel) {
        let ontology = builtin_family();
        let text = ontology.render();
        let config = TrainConfig { dim: 6, steps: 15, ..TrainConfig::default() };
        let model = train_model(&ontology, &config, 3).unwrap();
        (text, model)
    }

    #[test]
    fn model_checkpoint_round_trips_bit_exactly() {
        let (text, model) = trained_pair();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        ModelCheckpoint::from_model(&model, &text).save(&path).unwrap();
        let (ontology, restored) = ModelCheckpoint::load(&path).unwrap().restore().unwrap();

        assert_eq!(restored.seed, model.seed);
        assert_eq!(restored.config, model.config);
        assert_eq!(restored.loss_trace, model.loss_trace);
        for (a, b) in model.handle.params.ids().zip(restored.handle.params.ids()) {
            assert_eq!(model.handle.params.data(a), restored.handle.params.data(b));
        }

        // Same bits in, same degrees out.
        let query = crate::ontology::parse_concept("(Female and Parent)").unwrap();
        let pool = EvalPoolSpec::default().build(&model.handle, "roundtrip");
        assert_eq!(
            model.handle.concept_degrees(&pool, &query).unwrap(),
            restored.handle.concept_degrees(&pool, &query).unwrap(),
        );
        assert_eq!(ontology.render(), text);
    }

    #[test]
    fn tampered_checkpoints_are_rejected() {
        let (text, model) = trained_pair();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        ModelCheckpoint::from_model(&model, &text).save(&path).unwrap();

        let mut raw: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        raw["ontology_text"] = serde_json::Value::String("concept Hacked\n".into());
        fs::write(&path, raw.to_string()).unwrap();
        assert!(matches!(ModelCheckpoint::load(&path), Err(CheckpointError::HashMismatch)));

        let mut raw: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&ModelCheckpoint::from_model(&model, &text)).unwrap())
                .unwrap();
        raw["format_version"] = serde_json::Value::from(99);
        fs::write(&path, raw.to_string()).unwrap();
        assert!(matches!(
            ModelCheckpoint::load(&path),
            Err(CheckpointError::Version { found: 99, .. })
        ));
    }

    #[test]
    fn ensemble_checkpoint_round_trips() {
        let ontology = builtin_family();
        let text = ontology.render();
        let config = TrainConfig { dim: 4, steps: 5, models: 3, ..TrainConfig::default() };
        let models = crate::training::train_ensemble(&ontology, &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ensemble.json");
        EnsembleCheckpoint::from_models(&models, &text).save(&path).unwrap();
        let (_, restored) = EnsembleCheckpoint::load(&path).unwrap().restore().unwrap();
        assert_eq!(restored.len(), 3);
        for (original, back) in models.iter().zip(&restored) {
            assert_eq!(original.seed, back.seed);
            for (a, b) in original.handle.params.ids().zip(back.handle.params.ids()) {
                assert_eq!(original.handle.params.data(a), back.handle.params.data(b));
            }
        }
    }

    #[test]
    fn manifests_record_argv_and_input_hashes() {
        let mut manifest = RunManifest::new(
            "train",
            vec!["falcon".into(), "train".into(), "--seed".into(), "7".into()],
        );
        manifest.record_input("onto.owlish", "concept A\n");
        manifest.record_output("out/model_00.json");
        manifest.seeds = vec![7, 8];
        manifest.config = Some(TrainConfig::default());
        manifest.wall_clock_secs = 0.25;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        manifest.save(&path).unwrap();
        let back = RunManifest::load(&path).unwrap();
        assert_eq!(back, manifest);
        assert_eq!(back.inputs["onto.owlish"], sha256_hex("concept A\n"));
        assert_eq!(back.outputs, vec!["out/model_00.json".to_string()]);
    }
}

//! Approximate reasoning over ALC ontologies by building fuzzy models with
//! gradient descent.
//!
//! Pipeline: parse an ontology ([`ontology`]), train one or more neural
//! fuzzy models against its axioms ([`training`]), then read entailment
//! degrees for queries off the trained models ([`entailment`]). Because
//! models are built by minimizing axiom violation rather than by refutation,
//! the approach degrades gracefully on inconsistent inputs and answers
//! queries with degrees instead of a hard yes/no ([`metrics`] quantifies
//! both behaviours).

pub mod checkpoint;
pub mod diff;
pub mod entailment;
pub mod fuzzy;
pub mod interpreter;
pub mod metrics;
pub mod ontology;
pub mod training;

pub use checkpoint::{
    CheckpointError, EnsembleCheckpoint, ModelCheckpoint, RunManifest, CHECKPOINT_VERSION,
};
pub use entailment::{
    axiom_degree, classify, consistency_degree, crisp_check, ensemble_consistency, entail_axiom,
    instantiation_degree, role_degree, satisfiability_degree, subsumption_degree, threshold_model,
    Aggregate, Classification, CrispInterpretation, EntailmentVerdict, EvalPoolSpec, Thresholds,
};
pub use fuzzy::{FuzzyError, TNormFamily, DEGREE_TOLERANCE};
pub use interpreter::{
    Evaluator, IndividualPool, Interpretation, InterpreterError, LookupModel, ModelHandle,
    NeuralAtoms, PoolEntry,
};
pub use metrics::{
    auc, aupr, fmax, inject_inconsistency, mae_entailed, rank_metrics, rank_of,
    InjectionManifest, InjectionRecord, MetricsError, RankSummary,
};
pub use ontology::{
    builtin_family, entailed_eval_axioms, parse_axiom, parse_concept, parse_ontology,
    unprovable_eval_axioms, Axiom, ConceptDescription, Ontology, ParseError, Signature,
    SymbolKind,
};
pub use training::{
    train_ensemble, train_model, LossBreakdown, TrainConfig, TrainError, TrainedModel,
};

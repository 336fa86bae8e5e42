//! Model construction by gradient descent.
//!
//! Each training step rebuilds the element pool (named individuals plus
//! fresh anonymous elements), evaluates every axiom's violation on that
//! pool, and takes one Adam step on the weighted sum:
//!
//! * TBox: each subsumption `C SubClassOf D` is rewritten to the concept
//!   `C and not D`, which a model of the axiom must assign degree 0
//!   everywhere; its loss is the mean membership over the pool.
//! * ABox concept assertions `a : C` lose `1 − m(a, C)`.
//! * ABox role assertions `r(a, b)` lose `1 − m((a, b), r)`.
//!
//! The three weights (`alpha`, `beta`, `1 − alpha − beta`) are renormalized
//! over the components actually present in the ontology. An optional
//! pairwise-ranking term (`bpr_weight`) additionally pushes each asserted
//! role pair to outscore a corrupted pair, which sharpens link ranking.
//!
//! Training is deterministic: one seed fixes the initialization and every
//! pool and corruption draw, so a rerun reproduces the model bit for bit.

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diff::{AdamState, DiffError, Graph, NodeId};
use crate::fuzzy::TNormFamily;
use crate::interpreter::{Evaluator, IndividualPool, InterpreterError, ModelHandle, NeuralAtoms};
use crate::ontology::{normalize_tbox, Ontology};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Interpreter(#[from] InterpreterError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("loss became non-finite at step {step}")]
    NonFiniteLoss { step: usize },
    #[error("every loss component present in this ontology has zero weight")]
    ZeroWeight,
}

/// Hyperparameters for one training run. Loads from TOML; omitted fields
/// take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Embedding width (also the anonymous-element feature width).
    pub dim: usize,
    /// Hidden-layer widths of both scoring networks; `None` means one
    /// hidden layer as wide as `dim`.
    pub hidden: Option<Vec<usize>>,
    pub tnorm: TNormFamily,
    /// Gradient steps; 0 returns the freshly initialized model.
    pub steps: usize,
    pub learning_rate: f64,
    /// Weight of the TBox violation loss.
    pub alpha: f64,
    /// Weight of the ABox concept-assertion loss; role assertions get
    /// `1 - alpha - beta`.
    pub beta: f64,
    /// Anonymous pool elements sampled near random named individuals.
    pub pool_gaussian: usize,
    /// Anonymous pool elements sampled uniformly from (-1, 1)^dim.
    pub pool_uniform: usize,
    /// Ensemble size: models are trained with seeds `seed..seed + models`.
    pub models: usize,
    pub seed: u64,
    /// Weight of the pairwise ranking loss on role assertions (0 disables).
    pub bpr_weight: f64,
    /// Corrupted objects drawn per role assertion per step.
    pub bpr_negatives: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 16,
            hidden: None,
            tnorm: TNormFamily::Product,
            steps: 1000,
            learning_rate: 0.01,
            alpha: 0.4,
            beta: 0.3,
            pool_gaussian: 2,
            pool_uniform: 2,
            models: 1,
            seed: 0,
            bpr_weight: 0.0,
            bpr_negatives: 1,
        }
    }
}

impl TrainConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, TrainError> {
        let config: TrainConfig =
            toml::from_str(text).map_err(|e| TrainError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let fail = |msg: String| Err(TrainError::Config(msg));
        if self.dim < 2 {
            return fail(format!("dim must be at least 2, got {}", self.dim));
        }
        if let Some(hidden) = &self.hidden {
            if hidden.iter().any(|&w| w == 0) {
                return fail("hidden layer widths must be positive".into());
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..=1.0).contains(&self.alpha) || !self.alpha.is_finite() {
            return fail(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.beta) || !self.beta.is_finite() {
            return fail(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if self.alpha + self.beta >= 1.0 {
            return fail(format!(
                "alpha + beta must stay below 1 so every component keeps nonnegative weight, \
                 got {} + {}",
                self.alpha, self.beta
            ));
        }
        if self.models == 0 {
            return fail("models must be at least 1".into());
        }
        if !(self.bpr_weight >= 0.0 && self.bpr_weight.is_finite()) {
            return fail(format!("bpr_weight must be nonnegative, got {}", self.bpr_weight));
        }
        if self.bpr_weight > 0.0 && self.bpr_negatives == 0 {
            return fail("bpr_negatives must be positive when bpr_weight is set".into());
        }
        Ok(())
    }

    /// Hidden widths with the `None` default resolved.
    pub fn hidden_layers(&self) -> Vec<usize> {
        self.hidden.clone().unwrap_or_else(|| vec![self.dim])
    }
}

/// Per-step loss values (weighted total plus unweighted components; a
/// component the ontology does not have is reported as 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub tbox: f64,
    pub abox_concepts: f64,
    pub abox_roles: f64,
    pub ranking: f64,
}

/// A trained model plus everything needed to reproduce it.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub handle: ModelHandle,
    pub seed: u64,
    pub config: TrainConfig,
    pub loss_trace: Vec<LossBreakdown>,
}

impl TrainedModel {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_trace.last().map(|l| l.total)
    }
}

/// Mean of `terms` as a graph node, or `None` when there are no terms.
fn mean_node(graph: &mut Graph, terms: &[NodeId]) -> Result<Option<NodeId>, DiffError> {
    let Some((&first, rest)) = terms.split_first() else { return Ok(None) };
    let mut sum = first;
    for &t in rest {
        sum = graph.add(sum, t)?;
    }
    Ok(Some(graph.mul_const(sum, 1.0 / terms.len() as f64)?))
}

struct StepLoss {
    node: NodeId,
    breakdown: LossBreakdown,
}

/// Build the full loss for one pool into `graph`.
fn build_step_loss(
    graph: &mut Graph,
    handle: &ModelHandle,
    pool: &IndividualPool,
    targets: &[crate::ontology::UnsatTarget],
    concept_assertions: &[(usize, &crate::ontology::ConceptDescription)],
    role_assertions: &[(&str, usize, usize)],
    config: &TrainConfig,
    rng: &mut ChaCha12Rng,
) -> Result<StepLoss, TrainError> {
    let n_named = handle.signature.individuals.len();

    // Violation terms, all through one evaluator so shared subformulas
    // (and every relation atom) are scored once per step.
    let (tbox_terms, concept_terms, role_terms) = {
        let mut eval = Evaluator::new(graph, NeuralAtoms::new(handle, pool));
        let mut tbox_terms = Vec::with_capacity(targets.len() * pool.len());
        for target in targets {
            for element in 0..pool.len() {
                tbox_terms.push(eval.membership(&target.target, element)?);
            }
        }
        let mut concept_terms = Vec::with_capacity(concept_assertions.len());
        for (individual, concept) in concept_assertions {
            let m = eval.membership(concept, *individual)?;
            concept_terms.push(eval.graph().one_minus(m)?);
        }
        let mut role_terms = Vec::with_capacity(role_assertions.len());
        for (relation, subject, object) in role_assertions {
            let m = eval.relation(relation, *subject, *object)?;
            role_terms.push(eval.graph().one_minus(m)?);
        }
        (tbox_terms, concept_terms, role_terms)
    };

    let tbox_loss = mean_node(graph, &tbox_terms)?;
    let concept_loss = mean_node(graph, &concept_terms)?;
    let role_loss = mean_node(graph, &role_terms)?;

    // Renormalize the weights over the components this ontology has.
    let gamma = 1.0 - config.alpha - config.beta;
    let mut present: Vec<(NodeId, f64)> = Vec::new();
    if let Some(node) = tbox_loss {
        present.push((node, config.alpha));
    }
    if let Some(node) = concept_loss {
        present.push((node, config.beta));
    }
    if let Some(node) = role_loss {
        present.push((node, gamma));
    }
    let weight_sum: f64 = present.iter().map(|(_, w)| w).sum();
    if !present.is_empty() && weight_sum <= 0.0 {
        return Err(TrainError::ZeroWeight);
    }

    let mut total: Option<NodeId> = None;
    for (node, weight) in &present {
        let scaled = graph.mul_const(*node, weight / weight_sum)?;
        total = Some(match total {
            None => scaled,
            Some(t) => graph.add(t, scaled)?,
        });
    }

    // Pairwise ranking on role assertions: each asserted pair should
    // outscore the same subject paired with a corrupted object.
    let mut ranking_loss = None;
    if config.bpr_weight > 0.0 && !role_assertions.is_empty() && n_named >= 2 {
        let mut atoms = NeuralAtoms::new(handle, pool);
        let mut terms = Vec::with_capacity(role_assertions.len() * config.bpr_negatives);
        for (relation, subject, object) in role_assertions {
            let pos = atoms.relation_logit(graph, relation, *subject, *object)?;
            for _ in 0..config.bpr_negatives {
                // Corrupt the object among the other named individuals.
                let mut corrupted = rng.gen_range(0..n_named - 1);
                if corrupted >= *object {
                    corrupted += 1;
                }
                let neg = atoms.relation_logit(graph, relation, *subject, corrupted)?;
                let margin = graph.sub(pos, neg)?;
                let ls = graph.log_sigmoid(margin)?;
                terms.push(graph.mul_const(ls, -1.0)?);
            }
        }
        ranking_loss = mean_node(graph, &terms)?;
        if let Some(node) = ranking_loss {
            let scaled = graph.mul_const(node, config.bpr_weight)?;
            total = Some(match total {
                None => scaled,
                Some(t) => graph.add(t, scaled)?,
            });
        }
    }

    let Some(total) = total else {
        return Err(TrainError::Config(
            "the ontology has no axioms to train on (and no ranking loss is enabled)".into(),
        ));
    };

    let read = |n: Option<NodeId>| n.map_or(0.0, |n| graph.scalar_value(n));
    Ok(StepLoss {
        node: total,
        breakdown: LossBreakdown {
            total: graph.scalar_value(total),
            tbox: read(tbox_loss),
            abox_concepts: read(concept_loss),
            abox_roles: read(role_loss),
            ranking: read(ranking_loss),
        },
    })
}

/// Train a single model with the given seed (overriding `config.seed`).
pub fn train_model(
    ontology: &Ontology,
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainedModel, TrainError> {
    config.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let handle = ModelHandle::initialize(
        &ontology.signature,
        config.dim,
        &config.hidden_layers(),
        config.tnorm,
        &mut rng,
    )?;
    train_from(handle, ontology, config, seed, rng)
}

/// The optimization loop, shared between fresh and resumed runs.
fn train_from(
    mut handle: ModelHandle,
    ontology: &Ontology,
    config: &TrainConfig,
    seed: u64,
    mut rng: ChaCha12Rng,
) -> Result<TrainedModel, TrainError> {
    let targets = normalize_tbox(ontology);
    let signature = handle.signature.clone();
    let concept_assertions: Vec<(usize, &crate::ontology::ConceptDescription)> = ontology
        .concept_assertions()
        .map(|(individual, concept)| {
            let idx = signature
                .individuals
                .get(individual)
                .expect("assertions only mention signature individuals");
            (idx, concept)
        })
        .collect();
    let role_assertions: Vec<(&str, usize, usize)> = ontology
        .role_assertions()
        .map(|(relation, subject, object)| {
            let s = signature.individuals.get(subject).expect("declared subject");
            let o = signature.individuals.get(object).expect("declared object");
            (relation, s, o)
        })
        .collect();

    let mut adam = AdamState::new(&handle.params);
    let mut loss_trace = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let pool =
            IndividualPool::sample(&handle, &mut rng, config.pool_gaussian, config.pool_uniform);
        let mut graph = Graph::new();
        let loss = build_step_loss(
            &mut graph,
            &handle,
            &pool,
            &targets,
            &concept_assertions,
            &role_assertions,
            config,
            &mut rng,
        )?;
        if !loss.breakdown.total.is_finite() {
            return Err(TrainError::NonFiniteLoss { step });
        }
        let grads = graph.backward(loss.node, &handle.params)?;
        adam.step(&mut handle.params, &grads, config.learning_rate)?;
        if step % 200 == 0 {
            debug!("seed {seed} step {step}: loss {:.6}", loss.breakdown.total);
        }
        loss_trace.push(loss.breakdown);
    }
    info!(
        "trained seed {seed}: {} steps, final loss {}",
        config.steps,
        loss_trace.last().map_or("n/a".into(), |l| format!("{:.6}", l.total)),
    );
    Ok(TrainedModel { handle, seed, config: config.clone(), loss_trace })
}

/// Train `config.models` models with consecutive seeds starting at
/// `config.seed`. Models are independent, so they are trained on however
/// many worker threads the global pool provides; results do not depend on
/// the thread count.
pub fn train_ensemble(ontology: &Ontology, config: &TrainConfig) -> Result<Vec<TrainedModel>, TrainError> {
    config.validate()?;
    use rayon::prelude::*;
    (0..config.models as u64)
        .into_par_iter()
        .map(|offset| train_model(ontology, config, config.seed + offset))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::parse_ontology;

    fn tiny_ontology() -> Ontology {
        parse_ontology(
            "concept Bird\nconcept Animal\nindividual tweety\n\
             Bird SubClassOf Animal\ntweety : Bird\n",
        )
        .unwrap()
    }

    fn quick_config(steps: usize) -> TrainConfig {
        TrainConfig { dim: 8, steps, learning_rate: 0.05, ..TrainConfig::default() }
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let bad = [
            TrainConfig { dim: 1, ..TrainConfig::default() },
            TrainConfig { learning_rate: 0.0, ..TrainConfig::default() },
            TrainConfig { alpha: 1.1, ..TrainConfig::default() },
            TrainConfig { alpha: 0.7, beta: 0.3, ..TrainConfig::default() },
            TrainConfig { beta: -0.2, ..TrainConfig::default() },
            TrainConfig { models: 0, ..TrainConfig::default() },
            TrainConfig { hidden: Some(vec![8, 0]), ..TrainConfig::default() },
            TrainConfig { bpr_weight: -1.0, ..TrainConfig::default() },
            TrainConfig { bpr_weight: 0.5, bpr_negatives: 0, ..TrainConfig::default() },
        ];
        for config in bad {
            assert!(
                matches!(config.validate(), Err(TrainError::Config(_))),
                "expected rejection: {config:?}"
            );
        }
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn config_loads_from_toml_with_defaults() {
        let config = TrainConfig::from_toml_str(
            "dim = 32\nsteps = 50\ntnorm = \"goedel\"\nhidden = [64, 32]\n",
        )
        .unwrap();
        assert_eq!(config.dim, 32);
        assert_eq!(config.steps, 50);
        assert_eq!(config.tnorm, TNormFamily::Goedel);
        assert_eq!(config.hidden_layers(), vec![64, 32]);
        // Everything else keeps its default.
        assert_eq!(config.learning_rate, 0.01);
        assert_eq!(config.models, 1);

        assert!(TrainConfig::from_toml_str("no_such_field = 3\n").is_err());
        assert!(TrainConfig::from_toml_str("dim = 1\n").is_err());
    }

    #[test]
    fn zero_steps_returns_the_initialized_model() {
        let model = train_model(&tiny_ontology(), &quick_config(0), 7).unwrap();
        assert!(model.loss_trace.is_empty());
        assert_eq!(model.final_loss(), None);
        assert_eq!(model.handle.dim, 8);
    }

    #[test]
    fn loss_decreases_on_a_satisfiable_ontology() {
        let model = train_model(&tiny_ontology(), &quick_config(200), 0).unwrap();
        let first = model.loss_trace[0].total;
        let last = model.final_loss().unwrap();
        assert!(
            last < first * 0.5,
            "expected clear improvement, got {first:.4} -> {last:.4}"
        );
        // The assertion should now hold with high degree.
        let pool = IndividualPool::named(1);
        let bird = crate::ontology::parse_concept("Bird").unwrap();
        let degree = model.handle.concept_degrees(&pool, &bird).unwrap()[0];
        assert!(degree > 0.8, "tweety : Bird trained to degree {degree:.3}");
    }

    #[test]
    fn training_is_bitwise_deterministic_per_seed() {
        let ontology = tiny_ontology();
        let config = quick_config(30);
        let a = train_model(&ontology, &config, 42).unwrap();
        let b = train_model(&ontology, &config, 42).unwrap();
        for (ia, ib) in a.handle.params.ids().zip(b.handle.params.ids()) {
            assert_eq!(a.handle.params.data(ia), b.handle.params.data(ib));
        }
        assert_eq!(a.loss_trace, b.loss_trace);

        let c = train_model(&ontology, &config, 43).unwrap();
        assert_ne!(a.loss_trace, c.loss_trace);
    }

    #[test]
    fn ensemble_matches_individually_trained_seeds() {
        let ontology = tiny_ontology();
        let config = TrainConfig { models: 3, seed: 10, ..quick_config(20) };
        let ensemble = train_ensemble(&ontology, &config).unwrap();
        assert_eq!(ensemble.len(), 3);
        for (offset, model) in ensemble.iter().enumerate() {
            assert_eq!(model.seed, 10 + offset as u64);
            let solo = train_model(&ontology, &config, model.seed).unwrap();
            for (ia, ib) in model.handle.params.ids().zip(solo.handle.params.ids()) {
                assert_eq!(model.handle.params.data(ia), solo.handle.params.data(ib));
            }
        }
    }

    #[test]
    fn ranking_loss_needs_role_assertions_to_fire() {
        // No role assertions: the ranking component stays at zero.
        let config = TrainConfig { bpr_weight: 1.0, ..quick_config(3) };
        let model = train_model(&tiny_ontology(), &config, 1).unwrap();
        assert!(model.loss_trace.iter().all(|l| l.ranking == 0.0));

        let kg = parse_ontology(
            "relation likes\nindividual a\nindividual b\nindividual c\n\
             likes(a, b)\nlikes(b, c)\n",
        )
        .unwrap();
        let model = train_model(&kg, &config, 1).unwrap();
        assert!(model.loss_trace.iter().all(|l| l.ranking > 0.0));
        // Role-only ontology: the role component carries all base weight.
        assert!(model.loss_trace.iter().all(|l| l.tbox == 0.0 && l.abox_concepts == 0.0));
    }

    #[test]
    fn weight_renormalization_covers_missing_components() {
        // TBox only: total must equal the tbox component exactly (weight 1).
        let tbox_only =
            parse_ontology("concept A\nconcept B\nA SubClassOf B\n").unwrap();
        let model = train_model(&tbox_only, &quick_config(3), 5).unwrap();
        for l in &model.loss_trace {
            assert!((l.total - l.tbox).abs() < 1e-12);
        }
    }
}

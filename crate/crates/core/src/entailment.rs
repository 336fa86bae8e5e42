//! Reading entailment off trained models.
//!
//! A trained model assigns every axiom a truth degree; a query is then
//! judged against an *ensemble* of independently trained models:
//!
//! * **Entailed** -- the aggregated degree clears the entailment threshold.
//!   Every model the training procedure found satisfies the query, so no
//!   (approximate) countermodel is known.
//! * **Disproved** -- every model is a countermodel: each one gives the
//!   query a degree at or below `1 - disprove threshold`.
//! * **Unprovable** -- the models disagree; the query is contingent on how
//!   the ontology's open choices are resolved.
//!
//! Truth degrees per axiom form, for one model over a pool `E`:
//!
//! * `C SubClassOf D`: `min` over `E` of `m(e, not C or D)`. This equals
//!   `1 - max m(e, C and not D)` bit for bit (the strongest would-be
//!   counterexample decides the degree).
//! * `a : C`: `m(a, C)`.
//! * `r(a, b)`: `m((a, b), r)`.
//!
//! Quantified queries are sensitive to the evaluation pool, so pools are
//! derived deterministically from the query text and a seed
//! ([`EvalPoolSpec`]): the same query always meets the same anonymous
//! elements, and different queries cannot leak witnesses to each other.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fuzzy::TNormFamily;
use crate::interpreter::{IndividualPool, InterpreterError, LookupModel, ModelHandle};
use crate::ontology::{Axiom, ConceptDescription, Ontology, SymbolKind};

/// Decision thresholds. `entail` is the degree the aggregate must reach for
/// a positive verdict; a query is disproved when every model stays at or
/// below `1 - disprove`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub entail: f64,
    pub disprove: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { entail: 0.7, disprove: 0.7 }
    }
}

/// How per-model degrees combine into one number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    /// The cautious reading: a query holds only as strongly as its weakest
    /// model.
    #[default]
    Min,
    /// The average reading, useful for scoring and ranking.
    Mean,
}

impl Aggregate {
    pub fn apply(self, degrees: &[f64]) -> f64 {
        match self {
            Aggregate::Min => degrees.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregate::Mean => degrees.iter().sum::<f64>() / degrees.len() as f64,
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregate::Min => "min",
            Aggregate::Mean => "mean",
        })
    }
}

impl FromStr for Aggregate {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" => Ok(Aggregate::Min),
            "mean" | "avg" | "average" => Ok(Aggregate::Mean),
            other => Err(format!("unknown aggregate `{other}` (expected `min` or `mean`)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Entailed,
    Disproved,
    Unprovable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Entailed => "entailed",
            Classification::Disproved => "disproved",
            Classification::Unprovable => "unprovable",
        })
    }
}

/// The full answer to one query against an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntailmentVerdict {
    pub query: String,
    pub per_model: Vec<f64>,
    pub aggregate: f64,
    pub classification: Classification,
}

/// Deterministic construction of evaluation pools: all named individuals
/// plus `anonymous` elements drawn uniformly from (-1, 1)^dim by a
/// generator seeded from `seed` and a hash of the query text.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoolSpec {
    pub anonymous: usize,
    pub seed: u64,
}

impl Default for EvalPoolSpec {
    fn default() -> Self {
        EvalPoolSpec { anonymous: 64, seed: 0 }
    }
}

impl EvalPoolSpec {
    /// The pool for `query`. Models of one ensemble share signatures and
    /// widths, so the same pool serves every model and per-model degrees
    /// stay comparable.
    pub fn build(&self, handle: &ModelHandle, query: &str) -> IndividualPool {
        let digest = Sha256::digest(query.as_bytes());
        let prefix = u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"));
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed ^ prefix);
        let mut pool = IndividualPool::named(handle.signature.individuals.len());
        for _ in 0..self.anonymous {
            pool.push_anonymous((0..handle.dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        pool
    }
}

fn require_nonempty(pool: &IndividualPool) -> Result<(), InterpreterError> {
    if pool.is_empty() {
        return Err(InterpreterError::EmptyPool);
    }
    Ok(())
}

/// Degree to which `concept` is satisfiable in the model: the best
/// membership any pool element achieves.
pub fn satisfiability_degree(
    handle: &ModelHandle,
    pool: &IndividualPool,
    concept: &ConceptDescription,
) -> Result<f64, InterpreterError> {
    require_nonempty(pool)?;
    let degrees = handle.concept_degrees(pool, concept)?;
    Ok(degrees.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Truth degree of `sub SubClassOf sup` in the model: the pool element
/// closest to being a counterexample decides.
pub fn subsumption_degree(
    handle: &ModelHandle,
    pool: &IndividualPool,
    sub: &ConceptDescription,
    sup: &ConceptDescription,
) -> Result<f64, InterpreterError> {
    require_nonempty(pool)?;
    let body =
        ConceptDescription::or(ConceptDescription::not(sub.clone()), sup.clone());
    let degrees = handle.concept_degrees(pool, &body)?;
    Ok(degrees.into_iter().fold(f64::INFINITY, f64::min))
}

/// Membership degree of the named individual in `concept`.
pub fn instantiation_degree(
    handle: &ModelHandle,
    pool: &IndividualPool,
    individual: &str,
    concept: &ConceptDescription,
) -> Result<f64, InterpreterError> {
    let idx = handle.signature.individuals.get(individual).ok_or_else(|| {
        InterpreterError::UnknownSymbol { kind: SymbolKind::Individual, name: individual.into() }
    })?;
    let at = pool
        .index_of_named(idx)
        .ok_or_else(|| InterpreterError::NotInPool { name: individual.into() })?;
    let degrees = handle.concept_degrees(pool, concept)?;
    Ok(degrees[at])
}

/// Degree of the role atom `relation(subject, object)` between named
/// individuals.
pub fn role_degree(
    handle: &ModelHandle,
    relation: &str,
    subject: &str,
    object: &str,
) -> Result<f64, InterpreterError> {
    handle.relation_degree(relation, subject, object)
}

/// Truth degree of any axiom form.
pub fn axiom_degree(
    handle: &ModelHandle,
    pool: &IndividualPool,
    axiom: &Axiom,
) -> Result<f64, InterpreterError> {
    match axiom {
        Axiom::Subsumption { sub, sup } => subsumption_degree(handle, pool, sub, sup),
        Axiom::ConceptAssertion { individual, concept } => {
            instantiation_degree(handle, pool, individual, concept)
        }
        Axiom::RoleAssertion { relation, subject, object } => {
            role_degree(handle, relation, subject, object)
        }
    }
}

/// Degree to which the model satisfies the ABox: the weakest assertion
/// (concept or role) decides. An empty ABox is vacuously consistent, so
/// the min over no assertions is 1. A contradiction caps the degree, since
/// no model can push both sides of a clash high at once.
pub fn consistency_degree(
    handle: &ModelHandle,
    pool: &IndividualPool,
    ontology: &Ontology,
) -> Result<f64, InterpreterError> {
    let mut worst = 1.0_f64;
    for axiom in &ontology.abox {
        worst = worst.min(axiom_degree(handle, pool, axiom)?);
    }
    Ok(worst)
}

/// Ensemble-level consistency: the best degree any model achieves. One
/// model satisfying every assertion is enough to call the ABox consistent
/// with the TBox to that degree.
pub fn ensemble_consistency(
    models: &[ModelHandle],
    pool: &IndividualPool,
    ontology: &Ontology,
) -> Result<f64, InterpreterError> {
    assert!(!models.is_empty(), "consistency needs at least one model");
    let mut best = f64::NEG_INFINITY;
    for handle in models {
        best = best.max(consistency_degree(handle, pool, ontology)?);
    }
    Ok(best)
}

/// Combine per-model degrees into a verdict.
///
/// Entailment is checked first: the aggregate must reach `entail`.
/// Otherwise, if *every* model keeps the query at or below `1 - disprove`,
/// the ensemble agrees on refutation. At the default thresholds the two
/// conditions cannot overlap.
pub fn classify(
    query: String,
    per_model: Vec<f64>,
    aggregate: Aggregate,
    thresholds: &Thresholds,
) -> EntailmentVerdict {
    assert!(!per_model.is_empty(), "a verdict needs at least one model");
    let agg = aggregate.apply(&per_model);
    let classification = if agg >= thresholds.entail {
        Classification::Entailed
    } else if per_model.iter().all(|&d| d <= 1.0 - thresholds.disprove) {
        Classification::Disproved
    } else {
        Classification::Unprovable
    };
    EntailmentVerdict { query, per_model, aggregate: agg, classification }
}

/// Judge one axiom against an ensemble, building the query-seeded pool
/// internally.
pub fn entail_axiom(
    models: &[ModelHandle],
    axiom: &Axiom,
    pool_spec: &EvalPoolSpec,
    aggregate: Aggregate,
    thresholds: &Thresholds,
) -> Result<EntailmentVerdict, InterpreterError> {
    assert!(!models.is_empty(), "a verdict needs at least one model");
    let query = axiom.to_string();
    let pool = pool_spec.build(&models[0], &query);
    let per_model: Vec<f64> = models
        .iter()
        .map(|handle| axiom_degree(handle, &pool, axiom))
        .collect::<Result<_, _>>()?;
    Ok(classify(query, per_model, aggregate, thresholds))
}

/// A classical (two-valued) interpretation over a finite domain, evaluated
/// set-theoretically. This is the reference semantics the fuzzy machinery
/// must collapse to on 0/1 degrees, and the checker applied to thresholded
/// trained models.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispInterpretation {
    elements: usize,
    concepts: HashMap<String, Vec<bool>>,
    relations: HashMap<String, Vec<bool>>,
    individuals: HashMap<String, usize>,
}

impl CrispInterpretation {
    pub fn new(elements: usize) -> Self {
        CrispInterpretation {
            elements,
            concepts: HashMap::new(),
            relations: HashMap::new(),
            individuals: HashMap::new(),
        }
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn set_concept(&mut self, name: &str, members: Vec<bool>) -> &mut Self {
        assert_eq!(members.len(), self.elements, "one flag per element");
        self.concepts.insert(name.to_owned(), members);
        self
    }

    /// Row-major `elements x elements` adjacency (row = subject).
    pub fn set_relation(&mut self, name: &str, pairs: Vec<bool>) -> &mut Self {
        assert_eq!(pairs.len(), self.elements * self.elements, "square adjacency matrix");
        self.relations.insert(name.to_owned(), pairs);
        self
    }

    pub fn map_individual(&mut self, name: &str, element: usize) -> &mut Self {
        assert!(element < self.elements, "element out of range");
        self.individuals.insert(name.to_owned(), element);
        self
    }

    fn concept_members(&self, name: &str) -> Result<&[bool], InterpreterError> {
        self.concepts.get(name).map(Vec::as_slice).ok_or_else(|| {
            InterpreterError::UnknownSymbol { kind: SymbolKind::Concept, name: name.into() }
        })
    }

    fn relation_pairs(&self, name: &str) -> Result<&[bool], InterpreterError> {
        self.relations.get(name).map(Vec::as_slice).ok_or_else(|| {
            InterpreterError::UnknownSymbol { kind: SymbolKind::Relation, name: name.into() }
        })
    }

    /// Does `element` belong to the extension of `concept`?
    pub fn holds(
        &self,
        concept: &ConceptDescription,
        element: usize,
    ) -> Result<bool, InterpreterError> {
        Ok(match concept {
            ConceptDescription::Top => true,
            ConceptDescription::Bottom => false,
            ConceptDescription::Name(name) => self.concept_members(name)?[element],
            ConceptDescription::Not(inner) => !self.holds(inner, element)?,
            ConceptDescription::And(a, b) => {
                self.holds(a, element)? && self.holds(b, element)?
            }
            ConceptDescription::Or(a, b) => self.holds(a, element)? || self.holds(b, element)?,
            ConceptDescription::Exists(relation, filler) => {
                let pairs = self.relation_pairs(relation)?;
                let mut found = false;
                for y in 0..self.elements {
                    if pairs[element * self.elements + y] && self.holds(filler, y)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            ConceptDescription::Forall(relation, filler) => {
                let pairs = self.relation_pairs(relation)?;
                let mut all = true;
                for y in 0..self.elements {
                    if pairs[element * self.elements + y] && !self.holds(filler, y)? {
                        all = false;
                        break;
                    }
                }
                all
            }
        })
    }

    pub fn axiom_holds(&self, axiom: &Axiom) -> Result<bool, InterpreterError> {
        Ok(match axiom {
            Axiom::Subsumption { sub, sup } => {
                let mut all = true;
                for e in 0..self.elements {
                    if self.holds(sub, e)? && !self.holds(sup, e)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Axiom::ConceptAssertion { individual, concept } => {
                let e = self.individual_element(individual)?;
                self.holds(concept, e)?
            }
            Axiom::RoleAssertion { relation, subject, object } => {
                let pairs = self.relation_pairs(relation)?;
                let s = self.individual_element(subject)?;
                let o = self.individual_element(object)?;
                pairs[s * self.elements + o]
            }
        })
    }

    fn individual_element(&self, name: &str) -> Result<usize, InterpreterError> {
        self.individuals.get(name).copied().ok_or_else(|| InterpreterError::UnknownSymbol {
            kind: SymbolKind::Individual,
            name: name.into(),
        })
    }

    /// The same interpretation as a 0/1 degree table, for feeding the fuzzy
    /// evaluator.
    pub fn to_lookup(&self, tnorm: TNormFamily) -> LookupModel {
        let mut model = LookupModel::new(tnorm, self.elements);
        let as_degree = |flags: &[bool]| flags.iter().map(|&b| f64::from(u8::from(b))).collect();
        for (name, members) in &self.concepts {
            model.set_concept(name, as_degree(members)).expect("0/1 degrees are in range");
        }
        for (name, pairs) in &self.relations {
            model.set_relation(name, as_degree(pairs)).expect("0/1 degrees are in range");
        }
        model
    }
}

/// Evaluate every axiom of `ontology` classically; `true` means satisfied.
pub fn crisp_check(
    ontology: &Ontology,
    interpretation: &CrispInterpretation,
) -> Result<Vec<bool>, InterpreterError> {
    ontology
        .tbox
        .iter()
        .chain(&ontology.abox)
        .map(|axiom| interpretation.axiom_holds(axiom))
        .collect()
}

/// Read a crisp interpretation off a trained model by thresholding every
/// atomic membership at `tau`. Named individuals keep their pool indices.
pub fn threshold_model(
    handle: &ModelHandle,
    pool: &IndividualPool,
    tau: f64,
) -> Result<CrispInterpretation, InterpreterError> {
    require_nonempty(pool)?;
    let n = pool.len();
    let mut interp = CrispInterpretation::new(n);
    for name in handle.signature.concepts.iter() {
        let concept = ConceptDescription::name(name);
        let degrees = handle.concept_degrees(pool, &concept)?;
        interp.set_concept(name, degrees.into_iter().map(|d| d >= tau).collect());
    }
    // One evaluator pass per relation covers all pairs.
    for name in handle.signature.relations.iter() {
        let mut pairs = Vec::with_capacity(n * n);
        let mut graph = crate::diff::Graph::new();
        let mut eval = crate::interpreter::Evaluator::new(
            &mut graph,
            crate::interpreter::NeuralAtoms::new(handle, pool),
        );
        for s in 0..n {
            for o in 0..n {
                let node = eval.relation(name, s, o)?;
                pairs.push(eval.value(node) >= tau);
            }
        }
        interp.set_relation(name, pairs);
    }
    for (idx, name) in handle.signature.individuals.iter().enumerate() {
        if let Some(at) = pool.index_of_named(idx) {
            interp.map_individual(name, at);
        }
    }
    Ok(interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpreter::Evaluator;
    use crate::ontology::{builtin_family, parse_axiom, parse_concept, parse_ontology};
    use crate::training::{train_model, TrainConfig};

    /// A hand-built classical model of the family ontology: one element per
    /// named individual, memberships closed under the taxonomy, and child
    /// links from the two parents to the two children.
    fn family_crisp_fixture() -> CrispInterpretation {
        let names =
            ["a_male", "a_female", "a_person", "a_parent", "a_child", "a_father", "a_boy",
             "a_mother", "a_girl", "a_grandma"];
        let mut interp = CrispInterpretation::new(10);
        for (e, name) in names.iter().enumerate() {
            interp.map_individual(name, e);
        }
        let members = |xs: &[usize]| {
            let mut flags = vec![false; 10];
            for &x in xs {
                flags[x] = true;
            }
            flags
        };
        // Indices: male 0, female 1, person 2, parent 3, child 4, father 5,
        // boy 6, mother 7, girl 8, grandma 9.
        interp.set_concept("Male", members(&[0, 5, 6]));
        interp.set_concept("Female", members(&[1, 7, 8, 9]));
        interp.set_concept("Person", members(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]));
        interp.set_concept("Parent", members(&[3, 5, 7, 9]));
        interp.set_concept("Child", members(&[4, 6, 8]));
        interp.set_concept("Father", members(&[5]));
        interp.set_concept("Boy", members(&[6]));
        interp.set_concept("Mother", members(&[7, 9]));
        interp.set_concept("Girl", members(&[8]));
        interp.set_concept("Grandma", members(&[9]));
        let mut has_child = vec![false; 100];
        let mut has_parent = vec![false; 100];
        // father -> boy, mother -> girl.
        has_child[5 * 10 + 6] = true;
        has_child[7 * 10 + 8] = true;
        has_parent[6 * 10 + 5] = true;
        has_parent[8 * 10 + 7] = true;
        interp.set_relation("hasChild", has_child);
        interp.set_relation("hasParent", has_parent);
        interp
    }

    #[test]
    fn the_family_fixture_satisfies_every_axiom() {
        let ontology = builtin_family();
        let interp = family_crisp_fixture();
        let results = crisp_check(&ontology, &interp).unwrap();
        assert_eq!(results.len(), 35);
        for (axiom, ok) in ontology.tbox.iter().chain(&ontology.abox).zip(&results) {
            assert!(ok, "fixture violates `{axiom}`");
        }
    }

    #[test]
    fn crisp_check_catches_violations() {
        let ontology = builtin_family();
        let mut interp = family_crisp_fixture();
        // Make a_boy female too: Male and Female overlap now.
        let mut female: Vec<bool> = vec![false; 10];
        for &i in &[1usize, 6, 7, 8, 9] {
            female[i] = true;
        }
        interp.set_concept("Female", female);
        let results = crisp_check(&ontology, &interp).unwrap();
        let violated: Vec<String> = ontology
            .tbox
            .iter()
            .chain(&ontology.abox)
            .zip(&results)
            .filter(|(_, &ok)| !ok)
            .map(|(axiom, _)| axiom.to_string())
            .collect();
        assert!(violated.contains(&"(Male and Female) SubClassOf Nothing".to_string()));
        // A boy who is female is a girl by the TBox, but not in this model.
        assert!(violated.contains(&"(Female and Child) SubClassOf Girl".to_string()));
    }

    #[test]
    fn fuzzy_evaluation_of_a_crisp_model_matches_set_semantics() {
        let interp = family_crisp_fixture();
        let queries = [
            "(Female and Child)",
            "some hasChild.Person",
            "only hasChild.Girl",
            "(Male or not Parent)",
            "some hasChild.(Female and Child)",
            "only hasParent.(Mother and not Grandma)",
            "not (Person and not Parent)",
        ];
        for tnorm in TNormFamily::ALL {
            let mut lookup = interp.to_lookup(tnorm);
            for query in queries {
                let concept = parse_concept(query).unwrap();
                for e in 0..10 {
                    let classical = interp.holds(&concept, e).unwrap();
                    let mut graph = crate::diff::Graph::new();
                    let mut eval = Evaluator::new(&mut graph, &mut lookup);
                    let node = eval.membership(&concept, e).unwrap();
                    let fuzzy = eval.value(node);
                    assert_eq!(
                        fuzzy,
                        f64::from(u8::from(classical)),
                        "{query} at element {e} under {tnorm}"
                    );
                }
            }
        }
    }

    #[test]
    fn classification_thresholds_are_mutually_exclusive_at_defaults() {
        let t = Thresholds::default();
        let v = classify("q".into(), vec![0.9, 0.8], Aggregate::Min, &t);
        assert_eq!(v.classification, Classification::Entailed);
        assert_eq!(v.aggregate, 0.8);

        let v = classify("q".into(), vec![0.25, 0.1], Aggregate::Min, &t);
        assert_eq!(v.classification, Classification::Disproved);

        // One believer, one refuter: contingent.
        let v = classify("q".into(), vec![0.9, 0.1], Aggregate::Min, &t);
        assert_eq!(v.classification, Classification::Unprovable);

        // All models lukewarm: neither side is established.
        let v = classify("q".into(), vec![0.5, 0.45], Aggregate::Min, &t);
        assert_eq!(v.classification, Classification::Unprovable);

        let v = classify("q".into(), vec![0.6, 0.9], Aggregate::Mean, &t);
        assert_eq!(v.aggregate, 0.75);
        assert_eq!(v.classification, Classification::Entailed);
    }

    #[test]
    fn eval_pools_are_query_keyed_and_deterministic() {
        let ontology = builtin_family();
        let model = train_model(&ontology, &TrainConfig { dim: 4, steps: 0, ..Default::default() }, 1)
            .unwrap();
        let spec = EvalPoolSpec { anonymous: 3, seed: 5 };
        let a = spec.build(&model.handle, "Mother SubClassOf Person");
        let b = spec.build(&model.handle, "Mother SubClassOf Person");
        let c = spec.build(&model.handle, "Father SubClassOf Person");
        assert_eq!(a.len(), 13);
        assert_eq!(a.entries(), b.entries());
        assert_ne!(a.entries(), c.entries());
        let different_seed = EvalPoolSpec { anonymous: 3, seed: 6 };
        let d = different_seed.build(&model.handle, "Mother SubClassOf Person");
        assert_ne!(a.entries(), d.entries());
    }

    #[test]
    fn subsumption_degree_equals_one_minus_strongest_counterexample() {
        // Exact duality: min over the pool of m(not C or D) must equal
        // 1 - max over the pool of m(C and not D), bit for bit.
        let ontology = builtin_family();
        for (seed, tnorm) in [(1, TNormFamily::Product), (2, TNormFamily::Goedel),
                              (3, TNormFamily::Lukasiewicz)]
        {
            let config =
                TrainConfig { dim: 6, steps: 0, tnorm, ..Default::default() };
            let model = train_model(&ontology, &config, seed).unwrap();
            let spec = EvalPoolSpec { anonymous: 8, seed };
            for (sub, sup) in [
                ("Mother", "Person"),
                ("(Female and Child)", "Girl"),
                ("some hasChild.Person", "Parent"),
                ("Person", "only hasParent.Person"),
            ] {
                let sub = parse_concept(sub).unwrap();
                let sup = parse_concept(sup).unwrap();
                let query = format!("{sub} SubClassOf {sup}");
                let pool = spec.build(&model.handle, &query);
                let direct = subsumption_degree(&model.handle, &pool, &sub, &sup).unwrap();
                let counterexample = ConceptDescription::and(
                    sub.clone(),
                    ConceptDescription::not(sup.clone()),
                );
                let worst = model
                    .handle
                    .concept_degrees(&pool, &counterexample)
                    .unwrap()
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(direct, 1.0 - worst, "duality broke for `{query}` under {tnorm}");
            }
        }
    }

    #[test]
    fn reflexive_subsumption_is_never_below_one_half() {
        // m(not C or C) >= 1/2 pointwise for all three families, whatever
        // the (untrained) model says about C.
        let ontology = builtin_family();
        for tnorm in TNormFamily::ALL {
            let config = TrainConfig { dim: 6, steps: 0, tnorm, ..Default::default() };
            let model = train_model(&ontology, &config, 9).unwrap();
            let spec = EvalPoolSpec::default();
            for name in ["Mother", "(Male and Parent)", "some hasChild.Female"] {
                let c = parse_concept(name).unwrap();
                let pool = spec.build(&model.handle, &format!("{c} SubClassOf {c}"));
                let degree = subsumption_degree(&model.handle, &pool, &c, &c).unwrap();
                assert!(degree >= 0.5, "C SubClassOf C got {degree} under {tnorm}");
            }
        }
    }

    #[test]
    fn trained_assertions_reach_high_instantiation_degrees() {
        let ontology = parse_ontology(
            "concept Bird\nconcept Animal\nindividual tweety\n\
             Bird SubClassOf Animal\ntweety : Bird\n",
        )
        .unwrap();
        let config = TrainConfig { dim: 8, steps: 250, learning_rate: 0.05, ..Default::default() };
        let model = train_model(&ontology, &config, 0).unwrap();
        let pool = EvalPoolSpec::default().build(&model.handle, "tweety : Bird");
        let bird = parse_concept("Bird").unwrap();
        let animal = parse_concept("Animal").unwrap();
        let d_bird = instantiation_degree(&model.handle, &pool, "tweety", &bird).unwrap();
        assert!(d_bird > 0.7, "asserted membership only reached {d_bird:.3}");
        // The subsumption transfers the assertion.
        let d_animal = instantiation_degree(&model.handle, &pool, "tweety", &animal).unwrap();
        assert!(d_animal > 0.5, "inherited membership only reached {d_animal:.3}");
        // Consistency in this model is the weakest assertion's degree.
        let consistency = consistency_degree(&model.handle, &pool, &ontology).unwrap();
        let assertions: Vec<f64> = ontology
            .abox
            .iter()
            .map(|a| axiom_degree(&model.handle, &pool, a).unwrap())
            .collect();
        let expected = assertions.into_iter().fold(1.0_f64, f64::min);
        assert_eq!(consistency, expected);
        assert!(consistency > 0.5);
        // One model's degree is a lower bound on the ensemble's (max).
        let handles = [model.handle.clone()];
        assert_eq!(ensemble_consistency(&handles, &pool, &ontology).unwrap(), consistency);
        // An empty ABox is vacuously consistent.
        let bare = parse_ontology("concept Bird\nconcept Animal\nBird SubClassOf Animal\n")
            .unwrap();
        let fresh = train_model(&bare, &TrainConfig { dim: 4, steps: 2, ..Default::default() }, 0)
            .unwrap();
        let fresh_pool = EvalPoolSpec::default().build(&fresh.handle, "consistency");
        assert_eq!(consistency_degree(&fresh.handle, &fresh_pool, &bare).unwrap(), 1.0);
    }

    #[test]
    fn entail_axiom_runs_an_ensemble_end_to_end() {
        let ontology = parse_ontology(
            "concept Bird\nconcept Animal\nindividual tweety\n\
             Bird SubClassOf Animal\ntweety : Bird\n",
        )
        .unwrap();
        let config = TrainConfig {
            dim: 8,
            steps: 250,
            learning_rate: 0.05,
            models: 2,
            ..Default::default()
        };
        let models: Vec<ModelHandle> = crate::training::train_ensemble(&ontology, &config)
            .unwrap()
            .into_iter()
            .map(|m| m.handle)
            .collect();
        let axiom = parse_axiom("tweety : Bird").unwrap();
        let verdict = entail_axiom(
            &models,
            &axiom,
            &EvalPoolSpec::default(),
            Aggregate::Min,
            &Thresholds::default(),
        )
        .unwrap();
        assert_eq!(verdict.per_model.len(), 2);
        assert_eq!(verdict.query, "tweety : Bird");
        assert_eq!(verdict.classification, Classification::Entailed);
    }

    #[test]
    fn unknown_names_surface_as_errors() {
        let ontology = builtin_family();
        let model = train_model(&ontology, &TrainConfig { dim: 4, steps: 0, ..Default::default() }, 0)
            .unwrap();
        let pool = IndividualPool::named(10);
        let c = parse_concept("Person").unwrap();
        assert!(matches!(
            instantiation_degree(&model.handle, &pool, "nobody", &c),
            Err(InterpreterError::UnknownSymbol { kind: SymbolKind::Individual, .. })
        ));
        assert!(matches!(
            role_degree(&model.handle, "hasChild", "a_father", "nobody"),
            Err(InterpreterError::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn thresholded_trained_model_is_checkable() {
        // Smoke test of the thresholding bridge: a barely trained model
        // still yields a well-formed crisp interpretation.
        let ontology = builtin_family();
        let model = train_model(
            &ontology,
            &TrainConfig { dim: 6, steps: 30, learning_rate: 0.05, ..Default::default() },
            4,
        )
        .unwrap();
        let pool = IndividualPool::named(10);
        let interp = threshold_model(&model.handle, &pool, 0.5).unwrap();
        assert_eq!(interp.elements(), 10);
        let results = crisp_check(&ontology, &interp).unwrap();
        assert_eq!(results.len(), 35);
    }
}

//! Fuzzy interpretation of concept descriptions over a finite element pool.
//!
//! An [`Interpretation`] supplies degrees for *atoms* (named concepts and
//! relations) as graph nodes; the [`Evaluator`] extends them to arbitrary
//! descriptions with the connective semantics
//!
//! * `not C`      -> 1 − C
//! * `C and D`    -> θ(C, D) for the chosen t-norm θ
//! * `C or D`     -> 1 − θ(1 − C, 1 − D)
//! * `some r.D`   -> max over pool elements y of θ(D(y), r(x, y))
//! * `only r.D`   -> min over pool elements y of (¬r(x, y) ⊔ D(y))
//!
//! Because the same graph operations back both the trainable neural models
//! (atoms are MLP outputs) and plain lookup tables (atoms are constants),
//! one recursion serves training, inference, and the crisp-equivalence
//! tests alike.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::diff::{
    init_mlp, mlp_forward, DiffError, Graph, MlpParams, NodeId, ParamId, ParamStore,
};
use crate::fuzzy::TNormFamily;
use crate::ontology::{ConceptDescription, Signature, SymbolKind};

#[derive(Debug, Error)]
pub enum InterpreterError {
    #[error(transparent)]
    Diff(#[from] DiffError),
    /// A quantifier was evaluated against an empty element pool.
    #[error("cannot evaluate a quantifier over an empty element pool")]
    EmptyPool,
    #[error("unknown {kind} `{name}` (not in the model's signature)")]
    UnknownSymbol { kind: SymbolKind, name: String },
    #[error("named individual `{name}` is not in the evaluation pool")]
    NotInPool { name: String },
    #[error("membership degree for {context} is {value}, outside [0, 1]")]
    DegreeOutOfRange { context: String, value: f64 },
}

/// One element of the interpretation domain.
#[derive(Debug, Clone, PartialEq)]
pub enum PoolEntry {
    /// A named individual, by its signature index. Its representation is
    /// the individual's (trainable) embedding.
    Named(usize),
    /// An anonymous element with a fixed feature vector.
    Anonymous(Vec<f64>),
}

/// The finite domain a model is evaluated over. Quantifiers range over
/// exactly these elements.
#[derive(Debug, Clone, Default)]
pub struct IndividualPool {
    entries: Vec<PoolEntry>,
}

impl IndividualPool {
    /// Pool holding just the `n` named individuals, in signature order.
    pub fn named(n: usize) -> Self {
        IndividualPool { entries: (0..n).map(PoolEntry::Named).collect() }
    }

    pub fn push_anonymous(&mut self, features: Vec<f64>) {
        self.entries.push(PoolEntry::Anonymous(features));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    /// Pool index of named individual `i`, if present.
    pub fn index_of_named(&self, i: usize) -> Option<usize> {
        self.entries.iter().position(|e| matches!(e, PoolEntry::Named(j) if *j == i))
    }

    /// Training-time pool: every named individual plus `gaussian` anonymous
    /// elements perturbed from randomly chosen named embeddings (standard
    /// deviation 0.1 per coordinate) plus `uniform` anonymous elements drawn
    /// from (-1, 1)^dim. Anonymous elements keep quantifiers honest on open
    /// domains: a `some` witness must beat elements that are not simply the
    /// individuals mentioned in the data.
    pub fn sample<R: Rng>(
        handle: &ModelHandle,
        rng: &mut R,
        gaussian: usize,
        uniform: usize,
    ) -> Self {
        let n_named = handle.signature.individuals.len();
        let mut pool = IndividualPool::named(n_named);
        let noise = Normal::new(0.0, 0.1).expect("fixed, valid standard deviation");
        for _ in 0..gaussian {
            let base: Vec<f64> = if n_named == 0 {
                vec![0.0; handle.dim]
            } else {
                handle.params.data(handle.individual_emb[rng.gen_range(0..n_named)]).to_vec()
            };
            pool.push_anonymous(base.iter().map(|b| b + noise.sample(rng)).collect());
        }
        for _ in 0..uniform {
            pool.push_anonymous((0..handle.dim).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        pool
    }

    /// Evaluation-time pool: named individuals plus `uniform` fresh
    /// anonymous elements from (-1, 1)^dim.
    pub fn named_plus_uniform<R: Rng>(handle: &ModelHandle, rng: &mut R, uniform: usize) -> Self {
        Self::sample(handle, rng, 0, uniform)
    }
}

/// Supplies atom degrees as graph nodes. An instance is paired with one
/// [`Graph`] for its lifetime: node handles it returns are only meaningful
/// there.
pub trait Interpretation {
    fn tnorm(&self) -> TNormFamily;
    fn pool_len(&self) -> usize;
    fn concept_atom(
        &mut self,
        graph: &mut Graph,
        concept: &str,
        element: usize,
    ) -> Result<NodeId, InterpreterError>;
    fn relation_atom(
        &mut self,
        graph: &mut Graph,
        relation: &str,
        subject: usize,
        object: usize,
    ) -> Result<NodeId, InterpreterError>;
}

impl<I: Interpretation> Interpretation for &mut I {
    fn tnorm(&self) -> TNormFamily {
        (**self).tnorm()
    }
    fn pool_len(&self) -> usize {
        (**self).pool_len()
    }
    fn concept_atom(
        &mut self,
        graph: &mut Graph,
        concept: &str,
        element: usize,
    ) -> Result<NodeId, InterpreterError> {
        (**self).concept_atom(graph, concept, element)
    }
    fn relation_atom(
        &mut self,
        graph: &mut Graph,
        relation: &str,
        subject: usize,
        object: usize,
    ) -> Result<NodeId, InterpreterError> {
        (**self).relation_atom(graph, relation, subject, object)
    }
}

/// Extends an [`Interpretation`]'s atoms to full concept descriptions,
/// memoizing every (description, element) and relation atom so shared
/// subformulas are evaluated once per graph.
pub struct Evaluator<'g, I> {
    graph: &'g mut Graph,
    source: I,
    memo: HashMap<(ConceptDescription, usize), NodeId>,
    rel_memo: HashMap<(String, usize, usize), NodeId>,
    one: Option<NodeId>,
    zero: Option<NodeId>,
}

impl<'g, I: Interpretation> Evaluator<'g, I> {
    pub fn new(graph: &'g mut Graph, source: I) -> Self {
        Evaluator {
            graph,
            source,
            memo: HashMap::new(),
            rel_memo: HashMap::new(),
            one: None,
            zero: None,
        }
    }

    /// The underlying graph, for composing losses on top of memberships.
    pub fn graph(&mut self) -> &mut Graph {
        self.graph
    }

    pub fn value(&self, node: NodeId) -> f64 {
        self.graph.scalar_value(node)
    }

    pub fn pool_len(&self) -> usize {
        self.source.pool_len()
    }

    fn const_one(&mut self) -> Result<NodeId, InterpreterError> {
        if let Some(n) = self.one {
            return Ok(n);
        }
        let n = self.graph.constant(1.0)?;
        self.one = Some(n);
        Ok(n)
    }

    fn const_zero(&mut self) -> Result<NodeId, InterpreterError> {
        if let Some(n) = self.zero {
            return Ok(n);
        }
        let n = self.graph.constant(0.0)?;
        self.zero = Some(n);
        Ok(n)
    }

    /// θ(a, b) under the source's t-norm, as graph operations.
    pub fn conj(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, InterpreterError> {
        match self.source.tnorm() {
            TNormFamily::Goedel => Ok(self.graph.min(a, b)?),
            TNormFamily::Product => Ok(self.graph.mul(a, b)?),
            TNormFamily::Lukasiewicz => {
                // a − (1 − b), not (a + b) − 1: keeps θ(x, 1) = x exact.
                let nb = self.graph.one_minus(b)?;
                let shifted = self.graph.sub(a, nb)?;
                Ok(self.graph.relu(shifted)?)
            }
        }
    }

    /// 1 − θ(1 − a, 1 − b): the t-conorm, built so that De Morgan's laws
    /// hold exactly in floating point.
    pub fn disj(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, InterpreterError> {
        let na = self.graph.one_minus(a)?;
        let nb = self.graph.one_minus(b)?;
        let meet = self.conj(na, nb)?;
        Ok(self.graph.one_minus(meet)?)
    }

    /// Degree of relation atom `relation(subject, object)`.
    pub fn relation(
        &mut self,
        relation: &str,
        subject: usize,
        object: usize,
    ) -> Result<NodeId, InterpreterError> {
        let key = (relation.to_owned(), subject, object);
        if let Some(&n) = self.rel_memo.get(&key) {
            return Ok(n);
        }
        let n = self.source.relation_atom(self.graph, relation, subject, object)?;
        self.rel_memo.insert(key, n);
        Ok(n)
    }

    /// Membership degree of pool element `element` in `concept`.
    pub fn membership(
        &mut self,
        concept: &ConceptDescription,
        element: usize,
    ) -> Result<NodeId, InterpreterError> {
        let key = (concept.clone(), element);
        if let Some(&n) = self.memo.get(&key) {
            return Ok(n);
        }
        let node = match concept {
            ConceptDescription::Top => self.const_one()?,
            ConceptDescription::Bottom => self.const_zero()?,
            ConceptDescription::Name(name) => {
                self.source.concept_atom(self.graph, name, element)?
            }
            ConceptDescription::Not(inner) => {
                let m = self.membership(inner, element)?;
                self.graph.one_minus(m)?
            }
            ConceptDescription::And(a, b) => {
                let ma = self.membership(a, element)?;
                let mb = self.membership(b, element)?;
                self.conj(ma, mb)?
            }
            ConceptDescription::Or(a, b) => {
                let ma = self.membership(a, element)?;
                let mb = self.membership(b, element)?;
                self.disj(ma, mb)?
            }
            ConceptDescription::Exists(relation, filler) => {
                let n = self.source.pool_len();
                if n == 0 {
                    return Err(InterpreterError::EmptyPool);
                }
                let mut best = None;
                for y in 0..n {
                    let mf = self.membership(filler, y)?;
                    let mr = self.relation(relation, element, y)?;
                    let witness = self.conj(mf, mr)?;
                    best = Some(match best {
                        None => witness,
                        Some(b) => self.graph.max(b, witness)?,
                    });
                }
                best.expect("pool checked non-empty")
            }
            ConceptDescription::Forall(relation, filler) => {
                let n = self.source.pool_len();
                if n == 0 {
                    return Err(InterpreterError::EmptyPool);
                }
                let mut worst = None;
                for y in 0..n {
                    let mr = self.relation(relation, element, y)?;
                    let not_r = self.graph.one_minus(mr)?;
                    let mf = self.membership(filler, y)?;
                    let body = self.disj(not_r, mf)?;
                    worst = Some(match worst {
                        None => body,
                        Some(w) => self.graph.min(w, body)?,
                    });
                }
                worst.expect("pool checked non-empty")
            }
        };
        self.memo.insert(key, node);
        Ok(node)
    }
}

/// A trainable neural model of one ontology: an embedding per signature
/// symbol plus two scoring networks.
///
/// * concept atom:  σ(MLP_c(emb(C) ++ repr(x)))
/// * relation atom: σ(MLP_r((repr(x) + emb(r)) ++ repr(y)))
///
/// where `repr` of a named individual is its embedding and of an anonymous
/// element its fixed feature vector.
#[derive(Debug, Clone)]
pub struct ModelHandle {
    pub signature: Signature,
    pub dim: usize,
    pub hidden: Vec<usize>,
    pub tnorm: TNormFamily,
    pub params: ParamStore,
    pub concept_emb: Vec<ParamId>,
    pub relation_emb: Vec<ParamId>,
    pub individual_emb: Vec<ParamId>,
    pub concept_mlp: MlpParams,
    pub relation_mlp: MlpParams,
}

impl ModelHandle {
    /// Register and randomly initialize all parameters. Embeddings and MLP
    /// weights are drawn uniformly from (-1/√dim, 1/√dim); biases start at
    /// zero. The draw order is fixed (concept embeddings, relation
    /// embeddings, individual embeddings, concept MLP, relation MLP) so a
    /// seed pins the model bit for bit.
    pub fn initialize<R: Rng>(
        signature: &Signature,
        dim: usize,
        hidden: &[usize],
        tnorm: TNormFamily,
        rng: &mut R,
    ) -> Result<Self, DiffError> {
        use crate::diff::uniform_init;
        let bound = 1.0 / (dim as f64).sqrt();
        let mut params = ParamStore::new();
        let emb = |params: &mut ParamStore, rng: &mut R, kind: &str, name: &str| {
            params.add_vector(&format!("{kind}.{name}"), uniform_init(rng, dim, bound))
        };
        let mut concept_emb = Vec::new();
        for name in signature.concepts.iter() {
            concept_emb.push(emb(&mut params, rng, "concept", name)?);
        }
        let mut relation_emb = Vec::new();
        for name in signature.relations.iter() {
            relation_emb.push(emb(&mut params, rng, "relation", name)?);
        }
        let mut individual_emb = Vec::new();
        for name in signature.individuals.iter() {
            individual_emb.push(emb(&mut params, rng, "individual", name)?);
        }
        let mut dims = vec![2 * dim];
        dims.extend_from_slice(hidden);
        dims.push(1);
        let concept_mlp = init_mlp(&mut params, rng, "concept_mlp", &dims, bound)?;
        let relation_mlp = init_mlp(&mut params, rng, "relation_mlp", &dims, bound)?;
        Ok(ModelHandle {
            signature: signature.clone(),
            dim,
            hidden: hidden.to_vec(),
            tnorm,
            params,
            concept_emb,
            relation_emb,
            individual_emb,
            concept_mlp,
            relation_mlp,
        })
    }

    /// Rebuild a handle around an existing parameter store (e.g. loaded
    /// from a checkpoint). Parameter names must match what
    /// [`ModelHandle::initialize`] would have registered.
    pub fn assemble(
        signature: Signature,
        dim: usize,
        hidden: Vec<usize>,
        tnorm: TNormFamily,
        params: ParamStore,
    ) -> Result<Self, DiffError> {
        let lookup = |kind: &str, name: &str| {
            params
                .id(&format!("{kind}.{name}"))
                .ok_or_else(|| DiffError::MissingParam { name: format!("{kind}.{name}") })
        };
        let concept_emb: Vec<ParamId> =
            signature.concepts.iter().map(|n| lookup("concept", n)).collect::<Result<_, _>>()?;
        let relation_emb: Vec<ParamId> =
            signature.relations.iter().map(|n| lookup("relation", n)).collect::<Result<_, _>>()?;
        let individual_emb: Vec<ParamId> = signature
            .individuals
            .iter()
            .map(|n| lookup("individual", n))
            .collect::<Result<_, _>>()?;
        let n_layers = hidden.len() + 1;
        let mlp = |prefix: &str| -> Result<MlpParams, DiffError> {
            let mut layers = Vec::with_capacity(n_layers);
            for layer in 0..n_layers {
                let w = lookup(prefix, &format!("w{layer}"))
                    .map_err(|_| DiffError::MissingParam { name: format!("{prefix}.w{layer}") })?;
                let b = lookup(prefix, &format!("b{layer}"))
                    .map_err(|_| DiffError::MissingParam { name: format!("{prefix}.b{layer}") })?;
                layers.push((w, b));
            }
            Ok(MlpParams { layers })
        };
        let concept_mlp = mlp("concept_mlp")?;
        let relation_mlp = mlp("relation_mlp")?;
        Ok(ModelHandle {
            signature,
            dim,
            hidden,
            tnorm,
            params,
            concept_emb,
            relation_emb,
            individual_emb,
            concept_mlp,
            relation_mlp,
        })
    }

    /// Membership degrees of every pool element in `concept`, on a fresh
    /// graph (inference only, no gradients).
    pub fn concept_degrees(
        &self,
        pool: &IndividualPool,
        concept: &ConceptDescription,
    ) -> Result<Vec<f64>, InterpreterError> {
        let mut graph = Graph::new();
        let mut eval = Evaluator::new(&mut graph, NeuralAtoms::new(self, pool));
        (0..pool.len())
            .map(|x| eval.membership(concept, x).map(|n| eval.value(n)))
            .collect()
    }

    /// Degree of `relation(subject, object)` between two named individuals.
    pub fn relation_degree(
        &self,
        relation: &str,
        subject: &str,
        object: &str,
    ) -> Result<f64, InterpreterError> {
        let pool = IndividualPool::named(self.signature.individuals.len());
        let need = |name: &str| {
            self.signature.individuals.get(name).ok_or_else(|| {
                InterpreterError::UnknownSymbol { kind: SymbolKind::Individual, name: name.into() }
            })
        };
        let (s, o) = (need(subject)?, need(object)?);
        let mut graph = Graph::new();
        let mut eval = Evaluator::new(&mut graph, NeuralAtoms::new(self, &pool));
        let node = eval.relation(relation, s, o)?;
        Ok(eval.value(node))
    }
}

/// Atom source backed by a [`ModelHandle`] and a pool. Create one per
/// graph; element nodes are cached per instance.
pub struct NeuralAtoms<'a> {
    handle: &'a ModelHandle,
    pool: &'a IndividualPool,
    elem_nodes: Vec<Option<NodeId>>,
}

impl<'a> NeuralAtoms<'a> {
    pub fn new(handle: &'a ModelHandle, pool: &'a IndividualPool) -> Self {
        NeuralAtoms { handle, pool, elem_nodes: vec![None; pool.len()] }
    }

    fn element_node(&mut self, graph: &mut Graph, element: usize) -> NodeId {
        if let Some(n) = self.elem_nodes[element] {
            return n;
        }
        let n = match &self.pool.entries()[element] {
            PoolEntry::Named(i) => graph.param(&self.handle.params, self.handle.individual_emb[*i]),
            PoolEntry::Anonymous(v) => {
                debug_assert_eq!(v.len(), self.handle.dim);
                graph.const_vector(v.clone())
            }
        };
        self.elem_nodes[element] = Some(n);
        n
    }

    /// Pre-sigmoid relation score, for ranking losses that compare pairs on
    /// the unsquashed scale.
    pub fn relation_logit(
        &mut self,
        graph: &mut Graph,
        relation: &str,
        subject: usize,
        object: usize,
    ) -> Result<NodeId, InterpreterError> {
        let idx = self.handle.signature.relations.get(relation).ok_or_else(|| {
            InterpreterError::UnknownSymbol { kind: SymbolKind::Relation, name: relation.into() }
        })?;
        let r_emb = graph.param(&self.handle.params, self.handle.relation_emb[idx]);
        let x = self.element_node(graph, subject);
        let y = self.element_node(graph, object);
        let shifted = graph.add(x, r_emb)?;
        let input = graph.concat(shifted, y)?;
        Ok(mlp_forward(graph, &self.handle.params, &self.handle.relation_mlp, input)?)
    }
}

impl Interpretation for NeuralAtoms<'_> {
    fn tnorm(&self) -> TNormFamily {
        self.handle.tnorm
    }

    fn pool_len(&self) -> usize {
        self.pool.len()
    }

    fn concept_atom(
        &mut self,
        graph: &mut Graph,
        concept: &str,
        element: usize,
    ) -> Result<NodeId, InterpreterError> {
        let idx = self.handle.signature.concepts.get(concept).ok_or_else(|| {
            InterpreterError::UnknownSymbol { kind: SymbolKind::Concept, name: concept.into() }
        })?;
        let c_emb = graph.param(&self.handle.params, self.handle.concept_emb[idx]);
        let x = self.element_node(graph, element);
        let input = graph.concat(c_emb, x)?;
        let score = mlp_forward(graph, &self.handle.params, &self.handle.concept_mlp, input)?;
        Ok(graph.sigmoid(score)?)
    }

    fn relation_atom(
        &mut self,
        graph: &mut Graph,
        relation: &str,
        subject: usize,
        object: usize,
    ) -> Result<NodeId, InterpreterError> {
        let score = self.relation_logit(graph, relation, subject, object)?;
        Ok(graph.sigmoid(score)?)
    }
}

/// A fixed table of atom degrees: concept degrees per element and relation
/// degrees per element pair. Used for tests and for evaluating classical
/// (crisp) interpretations through the same machinery as trained models.
#[derive(Debug, Clone)]
pub struct LookupModel {
    tnorm: TNormFamily,
    elements: usize,
    concepts: HashMap<String, Vec<f64>>,
    relations: HashMap<String, Vec<f64>>,
}

impl LookupModel {
    pub fn new(tnorm: TNormFamily, elements: usize) -> Self {
        LookupModel { tnorm, elements, concepts: HashMap::new(), relations: HashMap::new() }
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    /// Set the degree column for a named concept; one value per element.
    pub fn set_concept(
        &mut self,
        name: &str,
        degrees: Vec<f64>,
    ) -> Result<&mut Self, InterpreterError> {
        assert_eq!(degrees.len(), self.elements, "one degree per element");
        for &d in &degrees {
            if !(0.0..=1.0).contains(&d) {
                return Err(InterpreterError::DegreeOutOfRange {
                    context: format!("concept `{name}`"),
                    value: d,
                });
            }
        }
        self.concepts.insert(name.to_owned(), degrees);
        Ok(self)
    }

    /// Set the degree matrix for a relation, row-major `elements x elements`
    /// (row = subject).
    pub fn set_relation(
        &mut self,
        name: &str,
        degrees: Vec<f64>,
    ) -> Result<&mut Self, InterpreterError> {
        assert_eq!(degrees.len(), self.elements * self.elements, "subject-major square matrix");
        for &d in &degrees {
            if !(0.0..=1.0).contains(&d) {
                return Err(InterpreterError::DegreeOutOfRange {
                    context: format!("relation `{name}`"),
                    value: d,
                });
            }
        }
        self.relations.insert(name.to_owned(), degrees);
        Ok(self)
    }
}

impl Interpretation for LookupModel {
    fn tnorm(&self) -> TNormFamily {
        self.tnorm
    }

    fn pool_len(&self) -> usize {
        self.elements
    }

    fn concept_atom(
        &mut self,
        graph: &mut Graph,
        concept: &str,
        element: usize,
    ) -> Result<NodeId, InterpreterError> {
        let col = self.concepts.get(concept).ok_or_else(|| {
            InterpreterError::UnknownSymbol { kind: SymbolKind::Concept, name: concept.into() }
        })?;
        Ok(graph.constant(col[element])?)
    }

    fn relation_atom(
        &mut self,
        graph: &mut Graph,
        relation: &str,
        subject: usize,
        object: usize,
    ) -> Result<NodeId, InterpreterError> {
        let table = self.relations.get(relation).ok_or_else(|| {
            InterpreterError::UnknownSymbol { kind: SymbolKind::Relation, name: relation.into() }
        })?;
        Ok(graph.constant(table[subject * self.elements + object])?)
    }
}

//! ALC ontology representation: concept descriptions, axioms, signatures.
//!
//! An ontology is a TBox of subsumptions `C SubClassOf D` plus an ABox of
//! concept assertions `a : C` and role assertions `r(a, b)`. Axioms are kept
//! in first-occurrence order with set semantics (exact duplicates are dropped
//! and counted). The three signature name spaces — concepts, relations,
//! individuals — are disjoint; reusing a name across kinds is an error.

mod parser;

pub mod family;

pub use family::{builtin_family, entailed_eval_axioms, unprovable_eval_axioms};
pub use parser::{parse_axiom, parse_concept, parse_ontology, parse_ontology_with, ParseError, ParseOptions};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Errors from programmatic ontology construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OntologyError {
    /// A name was used under two different kinds (e.g. concept and relation).
    #[error("`{name}` is used both as {first} and as {second}")]
    KindClash {
        name: String,
        first: SymbolKind,
        second: SymbolKind,
    },
}

/// The three disjoint kinds of signature symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Concept,
    Relation,
    Individual,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Concept => "a concept",
            SymbolKind::Relation => "a relation",
            SymbolKind::Individual => "an individual",
        })
    }
}

/// A concept description in negation-unrestricted ALC syntax.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptDescription {
    /// ⊤, the universal concept.
    Top,
    /// ⊥, the empty concept.
    Bottom,
    /// A named atomic concept.
    Name(String),
    /// Complement ¬C.
    Not(Box<ConceptDescription>),
    /// Intersection C ⊓ D.
    And(Box<ConceptDescription>, Box<ConceptDescription>),
    /// Union C ⊔ D.
    Or(Box<ConceptDescription>, Box<ConceptDescription>),
    /// Existential restriction ∃r.C.
    Exists(String, Box<ConceptDescription>),
    /// Value restriction ∀r.C.
    Forall(String, Box<ConceptDescription>),
}

impl ConceptDescription {
    pub fn name(n: impl Into<String>) -> Self {
        ConceptDescription::Name(n.into())
    }

    pub fn not(c: ConceptDescription) -> Self {
        ConceptDescription::Not(Box::new(c))
    }

    pub fn and(a: ConceptDescription, b: ConceptDescription) -> Self {
        ConceptDescription::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConceptDescription, b: ConceptDescription) -> Self {
        ConceptDescription::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(r: impl Into<String>, c: ConceptDescription) -> Self {
        ConceptDescription::Exists(r.into(), Box::new(c))
    }

    pub fn forall(r: impl Into<String>, c: ConceptDescription) -> Self {
        ConceptDescription::Forall(r.into(), Box::new(c))
    }

    /// Number of AST nodes; handy for generator size bounds in tests.
    pub fn size(&self) -> usize {
        match self {
            ConceptDescription::Top | ConceptDescription::Bottom | ConceptDescription::Name(_) => 1,
            ConceptDescription::Not(c)
            | ConceptDescription::Exists(_, c)
            | ConceptDescription::Forall(_, c) => 1 + c.size(),
            ConceptDescription::And(a, b) | ConceptDescription::Or(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for ConceptDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptDescription::Top => f.write_str("Thing"),
            ConceptDescription::Bottom => f.write_str("Nothing"),
            ConceptDescription::Name(n) => f.write_str(n),
            ConceptDescription::Not(c) => write!(f, "not {c}"),
            ConceptDescription::And(a, b) => write!(f, "({a} and {b})"),
            ConceptDescription::Or(a, b) => write!(f, "({a} or {b})"),
            ConceptDescription::Exists(r, c) => write!(f, "some {r}.{c}"),
            ConceptDescription::Forall(r, c) => write!(f, "only {r}.{c}"),
        }
    }
}

/// A TBox or ABox axiom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// `sub SubClassOf sup`.
    Subsumption {
        sub: ConceptDescription,
        sup: ConceptDescription,
    },
    /// `individual : concept`.
    ConceptAssertion {
        individual: String,
        concept: ConceptDescription,
    },
    /// `relation(subject, object)`.
    RoleAssertion {
        relation: String,
        subject: String,
        object: String,
    },
}

impl Axiom {
    pub fn is_tbox(&self) -> bool {
        matches!(self, Axiom::Subsumption { .. })
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Subsumption { sub, sup } => write!(f, "{sub} SubClassOf {sup}"),
            Axiom::ConceptAssertion { individual, concept } => {
                write!(f, "{individual} : {concept}")
            }
            Axiom::RoleAssertion { relation, subject, object } => {
                write!(f, "{relation}({subject}, {object})")
            }
        }
    }
}

/// An insertion-ordered, duplicate-free set of names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NameSet {
    /// Inserts a name if absent; returns its stable index either way.
    pub fn insert(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

/// The symbol table of an ontology: three disjoint name spaces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: NameSet,
    pub relations: NameSet,
    pub individuals: NameSet,
}

impl Signature {
    /// Looks up which kind a name already has, if any.
    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        if self.concepts.contains(name) {
            Some(SymbolKind::Concept)
        } else if self.relations.contains(name) {
            Some(SymbolKind::Relation)
        } else if self.individuals.contains(name) {
            Some(SymbolKind::Individual)
        } else {
            None
        }
    }

    /// Registers a name under a kind, enforcing cross-kind disjointness.
    pub fn note(&mut self, kind: SymbolKind, name: &str) -> Result<usize, OntologyError> {
        if let Some(existing) = self.kind_of(name) {
            if existing != kind {
                return Err(OntologyError::KindClash {
                    name: name.to_string(),
                    first: existing,
                    second: kind,
                });
            }
        }
        Ok(match kind {
            SymbolKind::Concept => self.concepts.insert(name),
            SymbolKind::Relation => self.relations.insert(name),
            SymbolKind::Individual => self.individuals.insert(name),
        })
    }
}

/// Walks every symbol occurrence in a concept description.
fn visit_concept_symbols<E>(
    c: &ConceptDescription,
    f: &mut impl FnMut(SymbolKind, &str) -> Result<(), E>,
) -> Result<(), E> {
    match c {
        ConceptDescription::Top | ConceptDescription::Bottom => Ok(()),
        ConceptDescription::Name(n) => f(SymbolKind::Concept, n),
        ConceptDescription::Not(inner) => visit_concept_symbols(inner, f),
        ConceptDescription::And(a, b) | ConceptDescription::Or(a, b) => {
            visit_concept_symbols(a, f)?;
            visit_concept_symbols(b, f)
        }
        ConceptDescription::Exists(r, inner) | ConceptDescription::Forall(r, inner) => {
            f(SymbolKind::Relation, r)?;
            visit_concept_symbols(inner, f)
        }
    }
}

/// Walks every symbol occurrence in an axiom.
pub(crate) fn visit_axiom_symbols<E>(
    axiom: &Axiom,
    f: &mut impl FnMut(SymbolKind, &str) -> Result<(), E>,
) -> Result<(), E> {
    match axiom {
        Axiom::Subsumption { sub, sup } => {
            visit_concept_symbols(sub, f)?;
            visit_concept_symbols(sup, f)
        }
        Axiom::ConceptAssertion { individual, concept } => {
            f(SymbolKind::Individual, individual)?;
            visit_concept_symbols(concept, f)
        }
        Axiom::RoleAssertion { relation, subject, object } => {
            f(SymbolKind::Relation, relation)?;
            f(SymbolKind::Individual, subject)?;
            f(SymbolKind::Individual, object)
        }
    }
}

/// Concept and relation names referenced by a description.
pub fn free_symbols(c: &ConceptDescription) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut concepts = BTreeSet::new();
    let mut relations = BTreeSet::new();
    let _ = visit_concept_symbols::<()>(c, &mut |kind, name| {
        match kind {
            SymbolKind::Concept => concepts.insert(name.to_string()),
            SymbolKind::Relation => relations.insert(name.to_string()),
            SymbolKind::Individual => unreachable!("descriptions contain no individuals"),
        };
        Ok(())
    });
    (concepts, relations)
}

/// A parsed, validated ontology.
#[derive(Debug, Clone, Default)]
pub struct Ontology {
    pub signature: Signature,
    /// Subsumption axioms, in first-occurrence order.
    pub tbox: Vec<Axiom>,
    /// Concept and role assertions, in first-occurrence order.
    pub abox: Vec<Axiom>,
    duplicates_dropped: usize,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        // The duplicate counter is load diagnostics, not content.
        self.signature == other.signature && self.tbox == other.tbox && self.abox == other.abox
    }
}

impl Eq for Ontology {}

impl Ontology {
    /// Builds an ontology from axioms, inferring the signature from usage.
    pub fn from_axioms(axioms: Vec<Axiom>) -> Result<Self, OntologyError> {
        Self::with_declared(Signature::default(), axioms)
    }

    /// Builds an ontology from axioms plus an explicitly pre-declared signature.
    pub fn with_declared(
        mut signature: Signature,
        axioms: Vec<Axiom>,
    ) -> Result<Self, OntologyError> {
        for axiom in &axioms {
            visit_axiom_symbols(axiom, &mut |kind, name| signature.note(kind, name).map(|_| ()))?;
        }
        let mut seen = std::collections::HashSet::new();
        let mut tbox = Vec::new();
        let mut abox = Vec::new();
        let mut duplicates_dropped = 0usize;
        for axiom in axioms {
            if !seen.insert(axiom.clone()) {
                duplicates_dropped += 1;
                continue;
            }
            if axiom.is_tbox() {
                tbox.push(axiom);
            } else {
                abox.push(axiom);
            }
        }
        if duplicates_dropped > 0 {
            log::warn!("dropped {duplicates_dropped} duplicate axiom(s) on load");
        }
        Ok(Ontology {
            signature,
            tbox,
            abox,
            duplicates_dropped,
        })
    }

    /// How many exact duplicates were discarded when this ontology was built.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn concept_assertions(&self) -> impl Iterator<Item = (&str, &ConceptDescription)> {
        self.abox.iter().filter_map(|a| match a {
            Axiom::ConceptAssertion { individual, concept } => {
                Some((individual.as_str(), concept))
            }
            _ => None,
        })
    }

    pub fn role_assertions(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.abox.iter().filter_map(|a| match a {
            Axiom::RoleAssertion { relation, subject, object } => {
                Some((relation.as_str(), subject.as_str(), object.as_str()))
            }
            _ => None,
        })
    }

    /// Renders the ontology in the native text format.
    ///
    /// Declarations come first so that symbols used by no axiom survive a
    /// round trip; `parse(render(o)) == o` is a tested invariant.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for name in self.signature.concepts.iter() {
            out.push_str("concept ");
            out.push_str(name);
            out.push('\n');
        }
        for name in self.signature.relations.iter() {
            out.push_str("relation ");
            out.push_str(name);
            out.push('\n');
        }
        for name in self.signature.individuals.iter() {
            out.push_str("individual ");
            out.push_str(name);
            out.push('\n');
        }
        for axiom in self.tbox.iter().chain(self.abox.iter()) {
            out.push_str(&axiom.to_string());
            out.push('\n');
        }
        out
    }
}

/// One TBox axiom rewritten for loss evaluation: `C SubClassOf D` becomes the
/// requirement that `C and not D` is empty, so the description below should
/// have membership zero everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsatTarget {
    /// Index of the source axiom in `ontology.tbox`.
    pub axiom_index: usize,
    /// `And(sub, Not(sup))` for the source subsumption.
    pub target: ConceptDescription,
}

/// Rewrites every TBox axiom into its emptiness target, preserving order.
pub fn normalize_tbox(ontology: &Ontology) -> Vec<UnsatTarget> {
    ontology
        .tbox
        .iter()
        .enumerate()
        .map(|(axiom_index, axiom)| match axiom {
            Axiom::Subsumption { sub, sup } => UnsatTarget {
                axiom_index,
                target: ConceptDescription::and(
                    sub.clone(),
                    ConceptDescription::not(sup.clone()),
                ),
            },
            _ => unreachable!("tbox holds only subsumptions"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(n: &str) -> ConceptDescription {
        ConceptDescription::name(n)
    }

    #[test]
    fn free_symbols_collects_concepts_and_relations() {
        let c = ConceptDescription::and(
            ConceptDescription::exists("r", name("A")),
            ConceptDescription::not(name("B")),
        );
        let (concepts, relations) = free_symbols(&c);
        assert_eq!(
            concepts.into_iter().collect::<Vec<_>>(),
            vec!["A".to_string(), "B".to_string()]
        );
        assert_eq!(relations.into_iter().collect::<Vec<_>>(), vec!["r".to_string()]);
    }

    #[test]
    fn normalization_preserves_count_and_order() {
        let ontology = Ontology::from_axioms(vec![
            Axiom::Subsumption { sub: name("A"), sup: name("B") },
            Axiom::Subsumption { sub: name("B"), sup: ConceptDescription::Bottom },
        ])
        .unwrap();
        let targets = normalize_tbox(&ontology);
        assert_eq!(targets.len(), 2);
        assert_eq!(targets[0].axiom_index, 0);
        assert_eq!(
            targets[0].target,
            ConceptDescription::and(name("A"), ConceptDescription::not(name("B")))
        );
        // Re-normalizing yields the same targets.
        assert_eq!(normalize_tbox(&ontology), targets);
    }

    #[test]
    fn duplicate_axioms_are_dropped_with_a_count() {
        let ax = Axiom::Subsumption { sub: name("A"), sup: name("B") };
        let ontology = Ontology::from_axioms(vec![
            ax.clone(),
            Axiom::ConceptAssertion { individual: "a".into(), concept: name("A") },
            ax.clone(),
            ax,
        ])
        .unwrap();
        assert_eq!(ontology.tbox.len(), 1);
        assert_eq!(ontology.abox.len(), 1);
        assert_eq!(ontology.duplicates_dropped(), 2);
    }

    #[test]
    fn name_kind_clash_is_rejected() {
        let err = Ontology::from_axioms(vec![
            Axiom::Subsumption { sub: name("A"), sup: ConceptDescription::exists("A", name("B")) },
        ])
        .unwrap_err();
        assert!(matches!(err, OntologyError::KindClash { ref name, .. } if name == "A"));
    }

    #[test]
    fn signature_orders_names_by_first_occurrence() {
        let ontology = Ontology::from_axioms(vec![
            Axiom::Subsumption { sub: name("Z"), sup: name("A") },
            Axiom::RoleAssertion {
                relation: "r".into(),
                subject: "b".into(),
                object: "a".into(),
            },
        ])
        .unwrap();
        let concepts: Vec<_> = ontology.signature.concepts.iter().collect();
        assert_eq!(concepts, vec!["Z", "A"]);
        let individuals: Vec<_> = ontology.signature.individuals.iter().collect();
        assert_eq!(individuals, vec!["b", "a"]);
    }
}

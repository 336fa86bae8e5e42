//! The built-in family ontology: a ten-concept taxonomy over two relations,
//! with one named individual asserted into each atomic concept.
//!
//! Alongside the ontology itself this module fixes two labeled axiom sets
//! used by the evaluation command and the test suite: subsumptions that do
//! follow from the TBox (some asserted verbatim, most derived), and
//! subsumptions that are neither derivable nor refutable from what is stated.

use super::{parse_axiom, parse_ontology, Axiom, Ontology};

/// Native-format source of the built-in ontology.
pub const FAMILY_TEXT: &str = "\
# Core taxonomy
Male SubClassOf Person
Female SubClassOf Person
(Male and Female) SubClassOf Nothing
Parent SubClassOf Person
Child SubClassOf Person
(Parent and Child) SubClassOf Nothing
Father SubClassOf Male
Boy SubClassOf Male
(Father and Boy) SubClassOf Nothing
Mother SubClassOf Female
Girl SubClassOf Female
(Mother and Girl) SubClassOf Nothing
Father SubClassOf Parent
Mother SubClassOf Parent
(Father and Mother) SubClassOf Nothing
Boy SubClassOf Child
Girl SubClassOf Child
(Boy and Girl) SubClassOf Nothing
(Female and Parent) SubClassOf Mother
(Male and Parent) SubClassOf Father
(Female and Child) SubClassOf Girl
(Male and Child) SubClassOf Boy
some hasChild.Person SubClassOf Parent
some hasParent.Person SubClassOf Child
Grandma SubClassOf Mother
# One witness individual per atomic concept
a_male : Male
a_female : Female
a_person : Person
a_parent : Parent
a_child : Child
a_father : Father
a_boy : Boy
a_mother : Mother
a_girl : Girl
a_grandma : Grandma
";

/// Parses and returns the built-in family ontology.
pub fn builtin_family() -> Ontology {
    let ontology = parse_ontology(FAMILY_TEXT).expect("built-in ontology parses");
    debug_assert_eq!(ontology.signature.concepts.len(), 10);
    debug_assert_eq!(ontology.signature.relations.len(), 2);
    debug_assert_eq!(ontology.signature.individuals.len(), 10);
    debug_assert_eq!(ontology.tbox.len(), 25);
    debug_assert_eq!(ontology.abox.len(), 10);
    ontology
}

/// Subsumptions entailed by the family TBox.
///
/// The first three are asserted axioms; the rest follow by composing
/// asserted subsumptions (e.g. `Grandma ⊑ Mother ⊑ Female`, or the childless
/// direction of `some hasChild.Person ⊑ Parent` with `Female ⊓ Parent ⊑
/// Mother`).
const ENTAILED: [&str; 10] = [
    "(Female and Child) SubClassOf Girl",
    "(Male and Parent) SubClassOf Father",
    "Father SubClassOf Male",
    "(some hasChild.Person and Female) SubClassOf Mother",
    "(some hasChild.Person and Male) SubClassOf Father",
    "Girl SubClassOf Person",
    "Boy SubClassOf Person",
    "Mother SubClassOf Person",
    "Grandma SubClassOf Female",
    "Grandma SubClassOf Parent",
];

/// Subsumptions that are neither entailed nor refutable from the family
/// ontology. None of them has a forced counterexample among the asserted
/// individuals, and none follows from the TBox, so an open-world reasoner
/// should treat them as undetermined.
const UNPROVABLE: [&str; 6] = [
    "Mother SubClassOf Grandma",
    "Father SubClassOf some hasChild.Person",
    "Mother SubClassOf some hasChild.Person",
    "Child SubClassOf some hasParent.Person",
    "Person SubClassOf some hasChild.Person",
    "Parent SubClassOf some hasChild.Person",
];

fn parse_set(lines: &[&str]) -> Vec<Axiom> {
    lines
        .iter()
        .map(|line| parse_axiom(line).expect("fixed evaluation axiom parses"))
        .collect()
}

/// The fixed positively-labeled (entailed) evaluation set.
pub fn entailed_eval_axioms() -> Vec<Axiom> {
    parse_set(&ENTAILED)
}

/// The fixed unlabeled (unprovable) evaluation set.
pub fn unprovable_eval_axioms() -> Vec<Axiom> {
    parse_set(&UNPROVABLE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::normalize_tbox;

    #[test]
    fn builtin_counts_match_the_documented_shape() {
        let o = builtin_family();
        assert_eq!(o.signature.concepts.len(), 10);
        assert_eq!(o.signature.relations.len(), 2);
        assert_eq!(o.signature.individuals.len(), 10);
        assert_eq!(o.tbox.len(), 25);
        assert_eq!(o.concept_assertions().count(), 10);
        assert_eq!(o.role_assertions().count(), 0);
        assert_eq!(o.duplicates_dropped(), 0);
        assert_eq!(normalize_tbox(&o).len(), 25);
    }

    #[test]
    fn builtin_round_trips_through_render() {
        let o = builtin_family();
        let back = parse_ontology(&o.render()).unwrap();
        assert_eq!(back, o);
    }

    #[test]
    fn evaluation_sets_parse_and_are_subsumptions_over_the_signature() {
        let o = builtin_family();
        for axiom in entailed_eval_axioms().iter().chain(unprovable_eval_axioms().iter()) {
            let Axiom::Subsumption { sub, sup } = axiom else {
                panic!("evaluation sets hold subsumptions only")
            };
            for side in [sub, sup] {
                let (concepts, relations) = crate::ontology::free_symbols(side);
                for c in concepts {
                    assert!(o.signature.concepts.contains(&c), "unknown concept {c}");
                }
                for r in relations {
                    assert!(o.signature.relations.contains(&r), "unknown relation {r}");
                }
            }
        }
    }

    #[test]
    fn entailed_and_unprovable_sets_are_disjoint() {
        let entailed = entailed_eval_axioms();
        for axiom in unprovable_eval_axioms() {
            assert!(!entailed.contains(&axiom));
        }
    }
}

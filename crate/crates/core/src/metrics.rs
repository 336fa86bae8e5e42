//! Evaluation metrics and the inconsistency injector.
//!
//! The threshold-free metrics (AUC, AUPR, Fmax) score how well entailment
//! degrees separate a positive from a negative axiom set; the rank metrics
//! (MRR, hits@k) score link prediction. AUC uses the rank-sum form with
//! average ranks for ties, which is exactly the pairwise win count -- ranks
//! and tie averages are half-integers, so the computation is exact in
//! f64 up to the single final division.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{Axiom, ConceptDescription, Ontology, OntologyError, SymbolKind};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(
        "the ontology declares no disjointness to violate (no axiom of the form \
         `(A and B) SubClassOf Nothing`)"
    )]
    NoDisjointPairs,
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

/// Mean absolute error of degrees against the ideal degree 1 of an
/// entailed axiom. `None` when there are no degrees.
pub fn mae_entailed(degrees: &[f64]) -> Option<f64> {
    if degrees.is_empty() {
        return None;
    }
    Some(degrees.iter().map(|d| (1.0 - d).abs()).sum::<f64>() / degrees.len() as f64)
}

/// Area under the ROC curve: the probability that a random positive
/// outscores a random negative, ties counting half. `None` if either side
/// is empty. Scores must not be NaN.
pub fn auc(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (s, true))
        .chain(negatives.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores must not be NaN"));

    // Sum of positive ranks, averaging ranks within tie groups. Every
    // addend is a half-integer, so the sum is exact.
    let mut rank_sum_pos = 0.0_f64;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // Ranks i+1 ..= j+1 share the average ((i+1) + (j+1)) / 2.
        let avg_rank = (i + j + 2) as f64 / 2.0;
        let pos_in_group = all[i..=j].iter().filter(|(_, is_pos)| *is_pos).count();
        rank_sum_pos += avg_rank * pos_in_group as f64;
        i = j + 1;
    }
    let p = positives.len() as f64;
    let n = negatives.len() as f64;
    Some((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

/// Area under the precision-recall curve by step integration: thresholds
/// sweep the distinct scores downward, and each recall increment is paid at
/// the precision reached there. `None` if either side is empty.
pub fn aupr(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (s, true))
        .chain(negatives.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("scores must not be NaN"));

    let total_pos = positives.len() as f64;
    let mut area = 0.0_f64;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0_f64;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        for (_, is_pos) in &all[i..=j] {
            if *is_pos {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / total_pos;
        let precision = tp as f64 / (tp + fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    Some(area)
}

/// Best F1 over the fixed threshold grid τ = 0, 0.01, ..., 1.00, where a
/// score counts as predicted positive when it reaches τ. An empty
/// prediction set has zero true positives and scores 0 at that threshold.
/// `None` if either side is empty.
pub fn fmax(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let mut best = 0.0_f64;
    for i in 0..=100 {
        let tau = i as f64 / 100.0;
        let tp = positives.iter().filter(|&&s| s >= tau).count();
        if tp == 0 {
            continue;
        }
        let fp = negatives.iter().filter(|&&s| s >= tau).count();
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / positives.len() as f64;
        let f1 = 2.0 * precision * recall / (precision + recall);
        best = best.max(f1);
    }
    Some(best)
}

/// Pessimistic competition rank of a positive score among alternatives:
/// 1 plus the number of alternatives scoring at least as high, so ties
/// count against the positive.
pub fn rank_of(positive: f64, others: &[f64]) -> usize {
    1 + others.iter().filter(|&&s| s >= positive).count()
}

/// Mean reciprocal rank and hits@k over a set of ranks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub count: usize,
    pub mrr: f64,
    pub hits_at_3: f64,
    pub hits_at_10: f64,
    pub hits_at_100: f64,
}

pub fn rank_metrics(ranks: &[usize]) -> Option<RankSummary> {
    if ranks.is_empty() {
        return None;
    }
    let n = ranks.len() as f64;
    let hits = |k: usize| ranks.iter().filter(|&&r| r <= k).count() as f64 / n;
    Some(RankSummary {
        count: ranks.len(),
        mrr: ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n,
        hits_at_3: hits(3),
        hits_at_10: hits(10),
        hits_at_100: hits(100),
    })
}

/// One injected contradiction: a fresh individual asserted into both sides
/// of a declared-disjoint concept pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionRecord {
    pub individual: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionManifest {
    pub seed: u64,
    pub records: Vec<InjectionRecord>,
}

/// Make an ontology inconsistent in a controlled way: `count` times, pick a
/// random disjointness axiom `(A and B) SubClassOf Nothing` and assert a
/// fresh individual into both `A` and `B`. Returns the extended ontology
/// and a manifest of what was injected, deterministically from `seed`.
pub fn inject_inconsistency(
    ontology: &Ontology,
    count: usize,
    seed: u64,
) -> Result<(Ontology, InjectionManifest), MetricsError> {
    let disjoint: Vec<(&ConceptDescription, &ConceptDescription)> = ontology
        .tbox
        .iter()
        .filter_map(|axiom| match axiom {
            Axiom::Subsumption { sub: ConceptDescription::And(a, b), sup }
                if *sup == ConceptDescription::Bottom =>
            {
                Some((a.as_ref(), b.as_ref()))
            }
            _ => None,
        })
        .collect();
    if disjoint.is_empty() {
        return Err(MetricsError::NoDisjointPairs);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut signature = ontology.signature.clone();
    let mut axioms: Vec<Axiom> =
        ontology.tbox.iter().chain(&ontology.abox).cloned().collect();
    let mut records = Vec::with_capacity(count);
    let mut fresh = 0usize;
    for _ in 0..count {
        let (left, right) = disjoint[rng.gen_range(0..disjoint.len())];
        let individual = loop {
            let candidate = format!("inc_{fresh}");
            fresh += 1;
            if signature.kind_of(&candidate).is_none() {
                break candidate;
            }
        };
        signature.note(SymbolKind::Individual, &individual)?;
        axioms.push(Axiom::ConceptAssertion {
            individual: individual.clone(),
            concept: left.clone(),
        });
        axioms.push(Axiom::ConceptAssertion {
            individual: individual.clone(),
            concept: right.clone(),
        });
        records.push(InjectionRecord {
            individual,
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    let injected = Ontology::with_declared(signature, axioms)?;
    Ok((injected, InjectionManifest { seed, records }))
}

//! Scratch probe for sizing the acceptance-suite configurations.

use std::time::Instant;

use falcon_core::entailment::{
    crisp_check, entail_axiom, threshold_model, Aggregate, Classification, EvalPoolSpec,
    Thresholds,
};
use falcon_core::interpreter::{IndividualPool, ModelHandle};
use falcon_core::ontology::{builtin_family, parse_axiom};
use falcon_core::training::{train_ensemble, TrainConfig};

fn main() {
    let ontology = builtin_family();

    // Criterion-4 shape: dim 50, lr 1e-2, 2000 steps, threshold at 0.5.
    let t = Instant::now();
    let config = TrainConfig { dim: 50, steps: 2000, learning_rate: 0.01, ..Default::default() };
    let mut faithful = 0;
    for seed in 0..10u64 {
        let mut c = config.clone();
        c.seed = seed;
        c.models = 1;
        let model = &train_ensemble(&ontology, &c).unwrap()[0];
        let pool = IndividualPool::named(ontology.signature.individuals.len());
        let interp = threshold_model(&model.handle, &pool, 0.5).unwrap();
        let ok = crisp_check(&ontology, &interp).unwrap();
        let all = ok.iter().all(|&b| b);
        if all {
            faithful += 1;
        }
        println!(
            "seed {seed}: loss {:.5}, crisp {}/{}",
            model.final_loss().unwrap(),
            ok.iter().filter(|&&b| b).count(),
            ok.len()
        );
    }
    println!("criterion 4 probe: {faithful}/10 seeds, {:.1}s total", t.elapsed().as_secs_f64());

    // Criterion-5 shape: k=20 ensemble, named + 2 anonymous in the pool.
    let queries = [
        ("(Female and Child) SubClassOf Girl", Classification::Entailed),
        ("(some hasChild.Person and Female) SubClassOf Mother", Classification::Entailed),
        ("Person SubClassOf Parent", Classification::Disproved),
        ("Mother SubClassOf Grandma", Classification::Unprovable),
    ];
    let t = Instant::now();
    let mut good_seeds = 0;
    for base in 0..10u64 {
        let c = TrainConfig {
            dim: 16,
            steps: 1000,
            learning_rate: 0.01,
            models: 20,
            seed: base * 100,
            ..Default::default()
        };
        let models = train_ensemble(&ontology, &c).unwrap();
        let handles: Vec<ModelHandle> = models.into_iter().map(|m| m.handle).collect();
        let spec = EvalPoolSpec { anonymous: 2, seed: 0 };
        let thresholds = Thresholds::default();
        let mut all_ok = true;
        let mut row = String::new();
        for (text, expected) in &queries {
            let axiom = parse_axiom(text).unwrap();
            let v = entail_axiom(&handles, &axiom, &spec, Aggregate::Min, &thresholds).unwrap();
            let extra = if *expected == Classification::Unprovable {
                let hi = v.per_model.iter().any(|&d| d >= 0.7);
                let lo = v.per_model.iter().any(|&d| d <= 0.3);
                hi && lo
            } else {
                true
            };
            let ok = v.classification == *expected && extra;
            all_ok &= ok;
            row.push_str(&format!(" {}{:.2}", if ok { '+' } else { '!' }, v.aggregate));
        }
        if all_ok {
            good_seeds += 1;
        }
        println!("base {base}:{row}  {}", if all_ok { "ok" } else { "MISS" });
    }
    println!("criterion 5 probe: {good_seeds}/10 seeds, {:.1}s total", t.elapsed().as_secs_f64());
}

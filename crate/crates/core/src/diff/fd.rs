//! Central-difference gradient checks.
//!
//! These are test oracles: a function is re-evaluated with each parameter
//! component nudged by ±h, and the resulting slope is compared against the
//! reverse-mode gradient. Callers must avoid comparing at kinks (`min`,
//! `max`, `relu` ties) -- see [`crate::diff::Graph::tie_margin`].

use super::params::{Gradients, ParamStore};
use super::DiffError;

/// Numerically estimate d f / d params with central differences of width `h`.
///
/// `f` is called with perturbed copies of the store and must be
/// deterministic given the parameter values.
pub fn finite_difference_grad<F>(
    store: &ParamStore,
    h: f64,
    mut f: F,
) -> Result<Gradients, DiffError>
where
    F: FnMut(&ParamStore) -> Result<f64, DiffError>,
{
    assert!(h > 0.0, "step width must be positive");
    let mut grads = Gradients::zeros(store);
    let ids: Vec<_> = store.ids().collect();
    let mut probe = store.clone();
    for id in ids {
        for i in 0..store.data(id).len() {
            let base = store.data(id)[i];
            probe.data_mut(id)[i] = base + h;
            let up = f(&probe)?;
            probe.data_mut(id)[i] = base - h;
            let down = f(&probe)?;
            probe.data_mut(id)[i] = base;
            grads.param_mut(id)[i] = (up - down) / (2.0 * h);
        }
    }
    Ok(grads)
}

/// Largest relative disagreement between two gradient sets, using
/// `|a - b| / max(|a|, |b|, 1e-3)` per component.
pub fn max_gradient_discrepancy(a: &Gradients, b: &Gradients) -> f64 {
    let mut worst = 0.0_f64;
    for (ga, gb) in a.iter().zip(b.iter()) {
        for (&x, &y) in ga.iter().zip(gb) {
            let denom = x.abs().max(y.abs()).max(1e-3);
            worst = worst.max((x - y).abs() / denom);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::{Graph, ParamStore};

    #[test]
    fn matches_reverse_mode_on_a_smooth_composite() {
        // f = sigmoid(x0 * x1 + tanh(x2)) * (1 - x0)
        let mut store = ParamStore::new();
        let p = store.add_vector("x", vec![0.3, -0.8, 0.55]).unwrap();

        let eval = |s: &ParamStore| -> Result<(Graph, crate::diff::NodeId), DiffError> {
            let mut g = Graph::new();
            let xs = g.param(s, s.id("x").unwrap());
            let x0 = g.index(xs, 0)?;
            let x1 = g.index(xs, 1)?;
            let x2 = g.index(xs, 2)?;
            let prod = g.mul(x0, x1)?;
            let t = g.tanh(x2)?;
            let sum = g.add(prod, t)?;
            let sig = g.sigmoid(sum)?;
            let nu = g.one_minus(x0)?;
            let out = g.mul(sig, nu)?;
            Ok((g, out))
        };

        let (g, out) = eval(&store).unwrap();
        let exact = g.backward(out, &store).unwrap();
        let numeric = finite_difference_grad(&store, 1e-5, |s| {
            let (g, out) = eval(s)?;
            Ok(g.scalar_value(out))
        })
        .unwrap();
        assert!(max_gradient_discrepancy(&exact, &numeric) < 1e-7);
        assert!(exact.param(p).iter().any(|&v| v != 0.0));
    }

    #[test]
    fn matches_reverse_mode_through_min_max_away_from_ties() {
        let mut store = ParamStore::new();
        store.add_vector("x", vec![0.2, 0.9]).unwrap();

        let eval = |s: &ParamStore| -> Result<(Graph, crate::diff::NodeId), DiffError> {
            let mut g = Graph::new();
            let xs = g.param(s, s.id("x").unwrap());
            let x0 = g.index(xs, 0)?;
            let x1 = g.index(xs, 1)?;
            let lo = g.min(x0, x1)?;
            let hi = g.max(x0, x1)?;
            let out = g.mul(lo, hi)?;
            Ok((g, out))
        };

        let (g, out) = eval(&store).unwrap();
        assert!(g.tie_margin() > 0.5);
        let exact = g.backward(out, &store).unwrap();
        let numeric = finite_difference_grad(&store, 1e-6, |s| {
            let (g, out) = eval(s)?;
            Ok(g.scalar_value(out))
        })
        .unwrap();
        assert!(max_gradient_discrepancy(&exact, &numeric) < 1e-7);
    }

    #[test]
    fn discrepancy_uses_a_relative_scale() {
        let mut store = ParamStore::new();
        let p = store.add_vector("x", vec![0.0, 0.0]).unwrap();
        let mut a = Gradients::zeros(&store);
        let mut b = Gradients::zeros(&store);
        a.param_mut(p).copy_from_slice(&[1000.0, 0.0]);
        b.param_mut(p).copy_from_slice(&[1001.0, 0.0005]);
        let d = max_gradient_discrepancy(&a, &b);
        // 1/1001 relative on the large pair, 0.0005/1e-3 = 0.5 on the tiny one.
        assert!((d - 0.5).abs() < 1e-12);
    }
}

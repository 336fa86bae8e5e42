//! Adam optimizer with bias correction.

use serde::{Deserialize, Serialize};

use super::params::{Gradients, ParamStore};
use super::DiffError;

/// First/second moment estimates plus the step counter. Serialized into
/// checkpoints so a resumed run continues the same trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    pub const DEFAULT_BETA1: f64 = 0.9;
    pub const DEFAULT_BETA2: f64 = 0.999;
    pub const DEFAULT_EPSILON: f64 = 1e-8;

    pub fn new(store: &ParamStore) -> Self {
        Self::with_coefficients(
            store,
            Self::DEFAULT_BETA1,
            Self::DEFAULT_BETA2,
            Self::DEFAULT_EPSILON,
        )
    }

    pub fn with_coefficients(store: &ParamStore, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        let zeros: Vec<Vec<f64>> =
            store.ids().map(|id| vec![0.0; store.data(id).len()]).collect();
        AdamState { beta1, beta2, epsilon, step: 0, m: zeros.clone(), v: zeros }
    }

    /// Steps taken so far.
    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Apply one update in place. Errors if any parameter becomes
    /// non-finite, naming the first offender.
    pub fn step(
        &mut self,
        store: &mut ParamStore,
        grads: &Gradients,
        learning_rate: f64,
    ) -> Result<(), DiffError> {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        let ids: Vec<_> = store.ids().enumerate().collect();
        for (slot, id) in ids {
            let g = grads.param(id);
            let m = &mut self.m[slot];
            let v = &mut self.v[slot];
            let data = store.data_mut(id);
            for i in 0..data.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                data[i] -= learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        store.check_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_roughly_the_learning_rate() {
        // With m_hat = g and v_hat = g^2 after bias correction, the first
        // update is lr * g / (|g| + eps), i.e. lr * sign(g) up to eps.
        let mut store = ParamStore::new();
        let p = store.add_vector("p", vec![1.0, -2.0]).unwrap();
        let mut grads = Gradients::zeros(&store);
        grads.param_mut(p).copy_from_slice(&[0.5, -4.0]);
        let mut adam = AdamState::new(&store);
        adam.step(&mut store, &grads, 0.1).unwrap();
        assert!((store.data(p)[0] - (1.0 - 0.1)).abs() < 1e-6);
        assert!((store.data(p)[1] - (-2.0 + 0.1)).abs() < 1e-6);
        assert_eq!(adam.steps(), 1);
    }

    #[test]
    fn descends_a_quadratic() {
        // Minimize (p - 3)^2 by feeding Adam the analytic gradient.
        let mut store = ParamStore::new();
        let p = store.add_vector("p", vec![0.0]).unwrap();
        let mut adam = AdamState::new(&store);
        for _ in 0..800 {
            let x = store.data(p)[0];
            let mut grads = Gradients::zeros(&store);
            grads.param_mut(p)[0] = 2.0 * (x - 3.0);
            adam.step(&mut store, &grads, 0.05).unwrap();
        }
        assert!((store.data(p)[0] - 3.0).abs() < 1e-2);
    }

    #[test]
    fn zero_gradient_leaves_parameters_in_place() {
        let mut store = ParamStore::new();
        let p = store.add_vector("p", vec![0.7]).unwrap();
        let grads = Gradients::zeros(&store);
        let mut adam = AdamState::new(&store);
        adam.step(&mut store, &grads, 0.1).unwrap();
        assert_eq!(store.data(p)[0], 0.7);
    }

    #[test]
    fn huge_gradients_still_take_a_bounded_step() {
        // Adam normalizes by the gradient scale, so even g = 1e20 moves the
        // parameter by roughly the learning rate, not by 1e19.
        let mut store = ParamStore::new();
        let p = store.add_vector("p", vec![1.0]).unwrap();
        let mut grads = Gradients::zeros(&store);
        grads.param_mut(p)[0] = 1e20;
        let mut adam = AdamState::new(&store);
        adam.step(&mut store, &grads, 0.1).unwrap();
        assert!((store.data(p)[0] - 0.9).abs() < 1e-6);
    }
}

//! Small fully connected networks used for membership scoring.
//!
//! Hidden layers apply `tanh`; the final layer is affine and its first
//! output component is returned *before* any squashing, so callers choose
//! whether to apply a sigmoid on top.

use rand::Rng;

use super::graph::{Graph, NodeId};
use super::params::{uniform_init, ParamId, ParamStore};
use super::DiffError;

/// Parameter handles for one network, layer by layer.
#[derive(Debug, Clone)]
pub struct MlpParams {
    /// `(weight, bias)` per layer; `weight` is `out x in`, `bias` is `out`.
    pub layers: Vec<(ParamId, ParamId)>,
}

/// Register parameters for a network with the given layer widths under
/// `prefix` (e.g. `"concept_mlp"`). `dims` lists input, hidden, and output
/// widths in order, so `[8, 16, 1]` is one hidden layer of 16 units.
///
/// Weights are drawn uniformly from `(-bound, bound)`; biases start at zero.
pub fn init_mlp<R: Rng>(
    store: &mut ParamStore,
    rng: &mut R,
    prefix: &str,
    dims: &[usize],
    bound: f64,
) -> Result<MlpParams, DiffError> {
    assert!(dims.len() >= 2, "an MLP needs at least an input and an output width");
    let mut layers = Vec::with_capacity(dims.len() - 1);
    for (layer, pair) in dims.windows(2).enumerate() {
        let (n_in, n_out) = (pair[0], pair[1]);
        let weight = store.add_matrix(
            &format!("{prefix}.w{layer}"),
            n_out,
            n_in,
            uniform_init(rng, n_out * n_in, bound),
        )?;
        let bias = store.add_vector(&format!("{prefix}.b{layer}"), vec![0.0; n_out])?;
        layers.push((weight, bias));
    }
    Ok(MlpParams { layers })
}

/// Forward pass: returns the first component of the final affine layer as a
/// scalar node (the pre-sigmoid score).
pub fn mlp_forward(
    graph: &mut Graph,
    store: &ParamStore,
    mlp: &MlpParams,
    input: NodeId,
) -> Result<NodeId, DiffError> {
    let mut x = input;
    let last = mlp.layers.len() - 1;
    for (layer, &(weight, bias)) in mlp.layers.iter().enumerate() {
        let w = graph.param(store, weight);
        let b = graph.param(store, bias);
        let wx = graph.matvec(w, x)?;
        let affine = graph.add(wx, b)?;
        x = if layer == last { affine } else { graph.tanh(affine)? };
    }
    graph.index(x, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn hand_computed_two_layer_network() {
        // Hidden: tanh(W1·x + b1) with W1 = [[1, 0], [0, 0]], b1 = 0,
        // x = [1, 2] -> [tanh(1), tanh(0)] = [0.761594..., 0].
        // Output: [[1, 1]]·h + [0] -> tanh(1).
        let mut store = ParamStore::new();
        let w1 = store.add_matrix("m.w0", 2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let b1 = store.add_vector("m.b0", vec![0.0, 0.0]).unwrap();
        let w2 = store.add_matrix("m.w1", 1, 2, vec![1.0, 1.0]).unwrap();
        let b2 = store.add_vector("m.b1", vec![0.0]).unwrap();
        let mlp = MlpParams { layers: vec![(w1, b1), (w2, b2)] };

        let mut g = Graph::new();
        let x = g.const_vector(vec![1.0, 2.0]);
        let out = mlp_forward(&mut g, &store, &mlp, x).unwrap();
        assert!((g.scalar_value(out) - 0.761_594_155_955_764_9).abs() < 1e-15);

        // d out / d b2 = 1; d out / d b1 = [1 - tanh(1)^2, 1].
        let grads = g.backward(out, &store).unwrap();
        assert_eq!(grads.param(b2), &[1.0]);
        let t = 1.0_f64.tanh();
        assert!((grads.param(b1)[0] - (1.0 - t * t)).abs() < 1e-15);
        assert!((grads.param(b1)[1] - 1.0).abs() < 1e-15);
        // d out / d W2 = h = [tanh(1), 0].
        assert!((grads.param(w2)[0] - t).abs() < 1e-15);
        assert_eq!(grads.param(w2)[1], 0.0);
    }

    #[test]
    fn init_shapes_and_bounds() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mlp = init_mlp(&mut store, &mut rng, "net", &[6, 4, 1], 0.5).unwrap();
        assert_eq!(mlp.layers.len(), 2);
        let (w0, b0) = mlp.layers[0];
        assert_eq!(store.shape(w0), crate::diff::Shape::Matrix(4, 6));
        assert_eq!(store.shape(b0), crate::diff::Shape::Vector(4));
        assert!(store.data(w0).iter().all(|v| v.abs() < 0.5));
        assert!(store.data(b0).iter().all(|&v| v == 0.0));
        let (w1, b1) = mlp.layers[1];
        assert_eq!(store.shape(w1), crate::diff::Shape::Matrix(1, 4));
        assert_eq!(store.shape(b1), crate::diff::Shape::Vector(1));
    }

    #[test]
    fn single_layer_network_is_plain_affine() {
        let mut store = ParamStore::new();
        let w = store.add_matrix("a.w0", 1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let b = store.add_vector("a.b0", vec![0.25]).unwrap();
        let mlp = MlpParams { layers: vec![(w, b)] };
        let mut g = Graph::new();
        let x = g.const_vector(vec![1.0, 1.0, 1.0]);
        let out = mlp_forward(&mut g, &store, &mlp, x).unwrap();
        assert_eq!(g.scalar_value(out), 6.25);
    }
}

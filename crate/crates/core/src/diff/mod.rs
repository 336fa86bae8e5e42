//! Reverse-mode automatic differentiation over an append-only graph,
//! plus the pieces trained with it: parameter stores, two-layer scorers,
//! and the Adam optimizer. A finite-difference fallback lives in [`fd`]
//! as an independent oracle for the analytic gradients.

mod adam;
mod fd;
mod graph;
mod mlp;
mod params;

pub use adam::AdamState;
pub use fd::{finite_difference_grad, max_gradient_discrepancy};
pub use graph::{Graph, NodeId, Value};
pub use mlp::{init_mlp, mlp_forward, MlpParams};
pub use params::{uniform_init, Gradients, ParamId, ParamStore, Shape};

use thiserror::Error;

/// Errors raised by graph construction, backprop, and optimizer steps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("shape mismatch in {op}: {details}")]
    ShapeMismatch { op: &'static str, details: String },
    #[error("non-finite value produced at node {node} ({op})")]
    NonFinite { node: usize, op: &'static str },
    #[error("non-finite parameter detected in `{name}` after an optimizer step")]
    NonFiniteParam { name: String },
    #[error("gradient for `{name}` is non-finite")]
    NonFiniteGradient { name: String },
    #[error("parameter `{name}` already exists")]
    DuplicateParam { name: String },
    #[error("parameter `{name}` is missing from the store")]
    MissingParam { name: String },
    #[error("backward pass requires a scalar output node")]
    NonScalarOutput,
}

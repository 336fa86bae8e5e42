//! Append-only evaluation graph with reverse-mode differentiation.
//!
//! Nodes hold their forward value (scalar, vector, or matrix) and are
//! created through the typed constructors below, which evaluate eagerly.
//! [`Graph::backward`] runs one adjoint sweep from a scalar output back to
//! the parameter leaves and returns dense per-parameter gradients.
//!
//! Tie-break rule: `min` and `max` route their gradient to the *left*
//! argument when the two are equal, and `relu` uses derivative 1 at 0.
//! The distance to the nearest such tie during a forward pass is tracked in
//! [`Graph::tie_margin`], which gradient-accuracy tests use to discard
//! instances where a kink would invalidate finite differences.

use super::params::{Gradients, ParamId, ParamStore};
use super::DiffError;

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(u32);

impl NodeId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

/// A node's forward value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
    /// Row-major matrix.
    Matrix { data: Vec<f64>, rows: usize, cols: usize },
}

impl Value {
    fn describe(&self) -> String {
        match self {
            Value::Scalar(_) => "scalar".into(),
            Value::Vector(v) => format!("vector[{}]", v.len()),
            Value::Matrix { rows, cols, .. } => format!("matrix[{rows}x{cols}]"),
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf(ParamId),
    Const,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    OneMinus(NodeId),
    Min(NodeId, NodeId),
    Max(NodeId, NodeId),
    Relu(NodeId),
    Sigmoid(NodeId),
    Tanh(NodeId),
    LogSigmoid(NodeId),
    MulConst(NodeId, f64),
    MatVec(NodeId, NodeId),
    Concat(NodeId, NodeId),
    Index(NodeId, usize),
}

impl Op {
    fn name(&self) -> &'static str {
        match self {
            Op::Leaf(_) => "leaf",
            Op::Const => "const",
            Op::Add(..) => "add",
            Op::Sub(..) => "sub",
            Op::Mul(..) => "mul",
            Op::OneMinus(_) => "one_minus",
            Op::Min(..) => "min",
            Op::Max(..) => "max",
            Op::Relu(_) => "relu",
            Op::Sigmoid(_) => "sigmoid",
            Op::Tanh(_) => "tanh",
            Op::LogSigmoid(_) => "log_sigmoid",
            Op::MulConst(..) => "mul_const",
            Op::MatVec(..) => "matvec",
            Op::Concat(..) => "concat",
            Op::Index(..) => "index",
        }
    }
}

/// Adjoint storage: scalars stay unboxed, arrays are flat.
#[derive(Debug, Clone)]
enum Adj {
    Scalar(f64),
    Arr(Vec<f64>),
}

/// The append-only evaluation graph.
#[derive(Debug, Default)]
pub struct Graph {
    ops: Vec<Op>,
    values: Vec<Value>,
    leaf_cache: std::collections::HashMap<ParamId, NodeId>,
    tie_margin: f64,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn log_sigmoid(x: f64) -> f64 {
    // ln σ(x), computed without overflowing for large |x|.
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph { ops: Vec::new(), values: Vec::new(), leaf_cache: Default::default(), tie_margin: f64::INFINITY }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Smallest distance to a `min`/`max`/`relu` tie seen while building.
    pub fn tie_margin(&self) -> f64 {
        self.tie_margin
    }

    fn push(&mut self, op: Op, value: Value) -> NodeId {
        let id = NodeId(self.ops.len() as u32);
        self.ops.push(op);
        self.values.push(value);
        id
    }

    fn push_scalar(&mut self, op: Op, value: f64) -> Result<NodeId, DiffError> {
        if !value.is_finite() {
            return Err(DiffError::NonFinite { node: self.ops.len(), op: op.name() });
        }
        Ok(self.push(op, Value::Scalar(value)))
    }

    pub fn value(&self, id: NodeId) -> &Value {
        &self.values[id.index()]
    }

    /// Scalar value of a node; panics if the node is not scalar.
    pub fn scalar_value(&self, id: NodeId) -> f64 {
        match self.values[id.index()] {
            Value::Scalar(v) => v,
            ref other => panic!("expected scalar node, found {}", other.describe()),
        }
    }

    fn scalar_of(&self, id: NodeId, op: &'static str) -> Result<f64, DiffError> {
        match self.values[id.index()] {
            Value::Scalar(v) => Ok(v),
            ref other => Err(DiffError::ShapeMismatch {
                op,
                details: format!("expected scalar operand, found {}", other.describe()),
            }),
        }
    }

    fn vector_of(&self, id: NodeId, op: &'static str) -> Result<&[f64], DiffError> {
        match self.values[id.index()] {
            Value::Vector(ref v) => Ok(v),
            ref other => Err(DiffError::ShapeMismatch {
                op,
                details: format!("expected vector operand, found {}", other.describe()),
            }),
        }
    }

    /// A parameter leaf; repeated requests return the same node.
    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> NodeId {
        if let Some(&node) = self.leaf_cache.get(&id) {
            return node;
        }
        let value = match store.shape(id) {
            super::Shape::Vector(_) => Value::Vector(store.data(id).to_vec()),
            super::Shape::Matrix(rows, cols) => {
                Value::Matrix { data: store.data(id).to_vec(), rows, cols }
            }
        };
        let node = self.push(Op::Leaf(id), value);
        self.leaf_cache.insert(id, node);
        node
    }

    pub fn constant(&mut self, value: f64) -> Result<NodeId, DiffError> {
        self.push_scalar(Op::Const, value)
    }

    pub fn const_vector(&mut self, value: Vec<f64>) -> NodeId {
        self.push(Op::Const, Value::Vector(value))
    }

    /// Elementwise addition of two scalars or two equal-length vectors.
    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, DiffError> {
        match (&self.values[a.index()], &self.values[b.index()]) {
            (&Value::Scalar(x), &Value::Scalar(y)) => self.push_scalar(Op::Add(a, b), x + y),
            (Value::Vector(x), Value::Vector(y)) if x.len() == y.len() => {
                let sum: Vec<f64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
                Ok(self.push(Op::Add(a, b), Value::Vector(sum)))
            }
            (x, y) => Err(DiffError::ShapeMismatch {
                op: "add",
                details: format!("{} + {}", x.describe(), y.describe()),
            }),
        }
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "sub")?;
        let y = self.scalar_of(b, "sub")?;
        self.push_scalar(Op::Sub(a, b), x - y)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "mul")?;
        let y = self.scalar_of(b, "mul")?;
        self.push_scalar(Op::Mul(a, b), x * y)
    }

    /// ν(x) = 1 − x. `one_minus(one_minus(x))` collapses to `x` itself, so
    /// double negation is exact by construction rather than up to rounding.
    pub fn one_minus(&mut self, a: NodeId) -> Result<NodeId, DiffError> {
        if let Op::OneMinus(inner) = self.ops[a.index()] {
            return Ok(inner);
        }
        let x = self.scalar_of(a, "one_minus")?;
        self.push_scalar(Op::OneMinus(a), 1.0 - x)
    }

    fn note_tie(&mut self, gap: f64) {
        if gap.abs() < self.tie_margin {
            self.tie_margin = gap.abs();
        }
    }

    pub fn min(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "min")?;
        let y = self.scalar_of(b, "min")?;
        self.note_tie(x - y);
        self.push_scalar(Op::Min(a, b), if x <= y { x } else { y })
    }

    pub fn max(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "max")?;
        let y = self.scalar_of(b, "max")?;
        self.note_tie(x - y);
        self.push_scalar(Op::Max(a, b), if x >= y { x } else { y })
    }

    /// max(x, 0), with derivative 1 at exactly 0.
    pub fn relu(&mut self, a: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "relu")?;
        self.note_tie(x);
        self.push_scalar(Op::Relu(a), x.max(0.0))
    }

    pub fn sigmoid(&mut self, a: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "sigmoid")?;
        self.push_scalar(Op::Sigmoid(a), sigmoid(x))
    }

    /// Elementwise tanh of a scalar or vector.
    pub fn tanh(&mut self, a: NodeId) -> Result<NodeId, DiffError> {
        match &self.values[a.index()] {
            &Value::Scalar(x) => self.push_scalar(Op::Tanh(a), x.tanh()),
            Value::Vector(v) => {
                let out: Vec<f64> = v.iter().map(|x| x.tanh()).collect();
                Ok(self.push(Op::Tanh(a), Value::Vector(out)))
            }
            other => Err(DiffError::ShapeMismatch {
                op: "tanh",
                details: format!("expected scalar or vector, found {}", other.describe()),
            }),
        }
    }

    /// ln σ(x), numerically stable for large |x|.
    pub fn log_sigmoid(&mut self, a: NodeId) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "log_sigmoid")?;
        self.push_scalar(Op::LogSigmoid(a), log_sigmoid(x))
    }

    pub fn mul_const(&mut self, a: NodeId, c: f64) -> Result<NodeId, DiffError> {
        let x = self.scalar_of(a, "mul_const")?;
        self.push_scalar(Op::MulConst(a, c), x * c)
    }

    /// Matrix–vector product; the matrix's column count must equal the
    /// vector's length.
    pub fn matvec(&mut self, m: NodeId, v: NodeId) -> Result<NodeId, DiffError> {
        let (rows, cols) = match self.values[m.index()] {
            Value::Matrix { rows, cols, .. } => (rows, cols),
            ref other => {
                return Err(DiffError::ShapeMismatch {
                    op: "matvec",
                    details: format!("expected matrix, found {}", other.describe()),
                })
            }
        };
        let x_len = self.vector_of(v, "matvec")?.len();
        if cols != x_len {
            return Err(DiffError::ShapeMismatch {
                op: "matvec",
                details: format!("matrix[{rows}x{cols}] times vector[{x_len}]"),
            });
        }
        let Value::Matrix { ref data, .. } = self.values[m.index()] else { unreachable!() };
        let Value::Vector(ref x) = self.values[v.index()] else { unreachable!() };
        let mut out = vec![0.0; rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let row = &data[r * cols..(r + 1) * cols];
            *slot = row.iter().zip(x).map(|(w, xi)| w * xi).sum();
        }
        Ok(self.push(Op::MatVec(m, v), Value::Vector(out)))
    }

    pub fn concat(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, DiffError> {
        let x = self.vector_of(a, "concat")?;
        let y = self.vector_of(b, "concat")?;
        let mut out = Vec::with_capacity(x.len() + y.len());
        out.extend_from_slice(x);
        out.extend_from_slice(y);
        Ok(self.push(Op::Concat(a, b), Value::Vector(out)))
    }

    pub fn index(&mut self, v: NodeId, i: usize) -> Result<NodeId, DiffError> {
        let x = self.vector_of(v, "index")?;
        if i >= x.len() {
            return Err(DiffError::ShapeMismatch {
                op: "index",
                details: format!("index {i} out of bounds for vector[{}]", x.len()),
            });
        }
        let value = x[i];
        self.push_scalar(Op::Index(v, i), value)
    }

    fn adj_len(&self, id: NodeId) -> usize {
        match &self.values[id.index()] {
            Value::Scalar(_) => 1,
            Value::Vector(v) => v.len(),
            Value::Matrix { data, .. } => data.len(),
        }
    }

    fn bump_scalar(&self, adj: &mut [Option<Adj>], id: NodeId, g: f64) {
        match adj[id.index()].get_or_insert(Adj::Scalar(0.0)) {
            Adj::Scalar(slot) => *slot += g,
            Adj::Arr(_) => unreachable!("scalar node with array adjoint"),
        }
    }

    fn arr_slot<'a>(&self, adj: &'a mut [Option<Adj>], id: NodeId) -> &'a mut [f64] {
        let len = self.adj_len(id);
        match adj[id.index()].get_or_insert_with(|| Adj::Arr(vec![0.0; len])) {
            Adj::Arr(slot) => slot,
            Adj::Scalar(_) => unreachable!("array node with scalar adjoint"),
        }
    }

    /// Reverse sweep from a scalar `out`, producing dense gradients aligned
    /// with `store`. Leaves the graph intact, so several outputs can be
    /// differentiated from the same forward pass if needed.
    pub fn backward(&self, out: NodeId, store: &ParamStore) -> Result<Gradients, DiffError> {
        if !matches!(self.values[out.index()], Value::Scalar(_)) {
            return Err(DiffError::NonScalarOutput);
        }
        let mut adj: Vec<Option<Adj>> = vec![None; self.ops.len()];
        adj[out.index()] = Some(Adj::Scalar(1.0));

        for i in (0..=out.index()).rev() {
            let Some(node_adj) = adj[i].take() else { continue };
            match (&self.ops[i], node_adj) {
                (Op::Leaf(_) | Op::Const, node_adj) => {
                    // Restore: leaves are harvested after the sweep.
                    adj[i] = Some(node_adj);
                }
                (&Op::Add(a, b), Adj::Scalar(g)) => {
                    self.bump_scalar(&mut adj, a, g);
                    self.bump_scalar(&mut adj, b, g);
                }
                (&Op::Add(a, b), Adj::Arr(g)) => {
                    for (slot, gi) in self.arr_slot(&mut adj, a).iter_mut().zip(&g) {
                        *slot += gi;
                    }
                    for (slot, gi) in self.arr_slot(&mut adj, b).iter_mut().zip(&g) {
                        *slot += gi;
                    }
                }
                (&Op::Sub(a, b), Adj::Scalar(g)) => {
                    self.bump_scalar(&mut adj, a, g);
                    self.bump_scalar(&mut adj, b, -g);
                }
                (&Op::Mul(a, b), Adj::Scalar(g)) => {
                    let (va, vb) = (self.scalar_value(a), self.scalar_value(b));
                    self.bump_scalar(&mut adj, a, g * vb);
                    self.bump_scalar(&mut adj, b, g * va);
                }
                (&Op::OneMinus(a), Adj::Scalar(g)) => {
                    self.bump_scalar(&mut adj, a, -g);
                }
                (&Op::Min(a, b), Adj::Scalar(g)) => {
                    let winner =
                        if self.scalar_value(a) <= self.scalar_value(b) { a } else { b };
                    self.bump_scalar(&mut adj, winner, g);
                }
                (&Op::Max(a, b), Adj::Scalar(g)) => {
                    let winner =
                        if self.scalar_value(a) >= self.scalar_value(b) { a } else { b };
                    self.bump_scalar(&mut adj, winner, g);
                }
                (&Op::Relu(a), Adj::Scalar(g)) => {
                    if self.scalar_value(a) >= 0.0 {
                        self.bump_scalar(&mut adj, a, g);
                    }
                }
                (&Op::Sigmoid(a), Adj::Scalar(g)) => {
                    let s = self.scalar_value(NodeId(i as u32));
                    self.bump_scalar(&mut adj, a, g * s * (1.0 - s));
                }
                (&Op::Tanh(a), Adj::Scalar(g)) => {
                    let t = self.scalar_value(NodeId(i as u32));
                    self.bump_scalar(&mut adj, a, g * (1.0 - t * t));
                }
                (&Op::Tanh(a), Adj::Arr(g)) => {
                    let Value::Vector(ref t) = self.values[i] else { unreachable!() };
                    for ((slot, gi), ti) in
                        self.arr_slot(&mut adj, a).iter_mut().zip(&g).zip(t)
                    {
                        *slot += gi * (1.0 - ti * ti);
                    }
                }
                (&Op::LogSigmoid(a), Adj::Scalar(g)) => {
                    // d/dx ln σ(x) = σ(−x)
                    self.bump_scalar(&mut adj, a, g * sigmoid(-self.scalar_value(a)));
                }
                (&Op::MulConst(a, c), Adj::Scalar(g)) => {
                    self.bump_scalar(&mut adj, a, g * c);
                }
                (&Op::MatVec(m, v), Adj::Arr(g)) => {
                    let Value::Matrix { ref data, rows, cols } = self.values[m.index()] else {
                        unreachable!()
                    };
                    let Value::Vector(ref x) = self.values[v.index()] else { unreachable!() };
                    {
                        let dm = self.arr_slot(&mut adj, m);
                        for r in 0..rows {
                            let gr = g[r];
                            let row = &mut dm[r * cols..(r + 1) * cols];
                            for (slot, xc) in row.iter_mut().zip(x) {
                                *slot += gr * xc;
                            }
                        }
                    }
                    {
                        let dv = self.arr_slot(&mut adj, v);
                        for r in 0..rows {
                            let gr = g[r];
                            let row = &data[r * cols..(r + 1) * cols];
                            for (slot, w) in dv.iter_mut().zip(row) {
                                *slot += gr * w;
                            }
                        }
                    }
                }
                (&Op::Concat(a, b), Adj::Arr(g)) => {
                    let a_len = self.adj_len(a);
                    for (slot, gi) in self.arr_slot(&mut adj, a).iter_mut().zip(&g[..a_len]) {
                        *slot += gi;
                    }
                    for (slot, gi) in self.arr_slot(&mut adj, b).iter_mut().zip(&g[a_len..]) {
                        *slot += gi;
                    }
                }
                (&Op::Index(v, at), Adj::Scalar(g)) => {
                    self.arr_slot(&mut adj, v)[at] += g;
                }
                (op, node_adj) => {
                    unreachable!(
                        "adjoint shape mismatch at node {i}: op {} with {:?}",
                        op.name(),
                        match node_adj {
                            Adj::Scalar(_) => "scalar adjoint",
                            Adj::Arr(_) => "array adjoint",
                        }
                    )
                }
            }
        }

        let mut grads = Gradients::zeros(store);
        for (i, op) in self.ops.iter().enumerate() {
            if let Op::Leaf(pid) = op {
                match adj[i].take() {
                    Some(Adj::Scalar(g)) => grads.param_mut(*pid)[0] += g,
                    Some(Adj::Arr(g)) => {
                        for (slot, gi) in grads.param_mut(*pid).iter_mut().zip(&g) {
                            *slot += gi;
                        }
                    }
                    None => {}
                }
            }
        }
        grads.check_finite(store)?;
        Ok(grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_with(values: &[(&str, Vec<f64>)]) -> ParamStore {
        let mut store = ParamStore::new();
        for (name, data) in values {
            store.add_vector(name, data.clone()).unwrap();
        }
        store
    }

    #[test]
    fn product_rule_and_leaf_gradients() {
        // f = (1 − x·y) · x with x = 0.5, y = 0.25
        let mut store = ParamStore::new();
        let px = store.add_vector("x", vec![0.5]).unwrap();
        let py = store.add_vector("y", vec![0.25]).unwrap();
        let mut g = Graph::new();
        let xv = g.param(&store, px);
        let yv = g.param(&store, py);
        let x = g.index(xv, 0).unwrap();
        let y = g.index(yv, 0).unwrap();
        let xy = g.mul(x, y).unwrap();
        let nu = g.one_minus(xy).unwrap();
        let f = g.mul(nu, x).unwrap();
        assert!((g.scalar_value(f) - (1.0 - 0.125) * 0.5).abs() < 1e-15);
        let grads = g.backward(f, &store).unwrap();
        // df/dx = (1 − x·y) − x·y = 1 − 2xy, df/dy = −x²
        assert!((grads.param(px)[0] - (1.0 - 2.0 * 0.125)).abs() < 1e-15);
        assert!((grads.param(py)[0] - (-0.25)).abs() < 1e-15);
    }

    #[test]
    fn ties_route_gradient_to_left_argument() {
        let store = store_with(&[("x", vec![0.4]), ("y", vec![0.4])]);
        let (px, py) = (store.id("x").unwrap(), store.id("y").unwrap());
        let mut g = Graph::new();
        let xv = g.param(&store, px);
        let yv = g.param(&store, py);
        let x = g.index(xv, 0).unwrap();
        let y = g.index(yv, 0).unwrap();
        let m = g.min(x, y).unwrap();
        let grads = g.backward(m, &store).unwrap();
        assert_eq!(grads.param(px)[0], 1.0);
        assert_eq!(grads.param(py)[0], 0.0);
        assert_eq!(g.tie_margin(), 0.0);

        // relu'(0) = 1 under the same convention.
        let mut g2 = Graph::new();
        let zero = g2.constant(0.0).unwrap();
        let r = g2.relu(zero).unwrap();
        assert_eq!(g2.scalar_value(r), 0.0);
    }

    #[test]
    fn double_negation_collapses_to_the_same_node() {
        let mut g = Graph::new();
        let x = g.constant(0.1).unwrap();
        let n = g.one_minus(x).unwrap();
        let nn = g.one_minus(n).unwrap();
        assert_eq!(nn, x);
        assert_eq!(g.scalar_value(nn), 0.1);
    }

    #[test]
    fn matvec_gradients_match_hand_computation() {
        // f = (W·x)[0] + (W·x)[1], W 2x2, so df/dW = [[x0, x1], [x0, x1]],
        // df/dx = (column sums of W).
        let mut store = ParamStore::new();
        let pw = store.add_matrix("w", 2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let px = store.add_vector("x", vec![5.0, 6.0]).unwrap();
        let mut g = Graph::new();
        let w = g.param(&store, pw);
        let x = g.param(&store, px);
        let y = g.matvec(w, x).unwrap();
        let y0 = g.index(y, 0).unwrap();
        let y1 = g.index(y, 1).unwrap();
        let f = g.add(y0, y1).unwrap();
        assert_eq!(g.scalar_value(f), (5.0 + 12.0) + (15.0 + 24.0));
        let grads = g.backward(f, &store).unwrap();
        assert_eq!(grads.param(pw), &[5.0, 6.0, 5.0, 6.0]);
        assert_eq!(grads.param(px), &[1.0 + 3.0, 2.0 + 4.0]);
    }

    #[test]
    fn concat_splits_gradient_between_parents() {
        let mut store = ParamStore::new();
        let pa = store.add_vector("a", vec![1.0, 2.0]).unwrap();
        let pb = store.add_vector("b", vec![3.0]).unwrap();
        let mut g = Graph::new();
        let a = g.param(&store, pa);
        let b = g.param(&store, pb);
        let cat = g.concat(a, b).unwrap();
        let last = g.index(cat, 2).unwrap();
        let first = g.index(cat, 0).unwrap();
        let two_first = g.mul_const(first, 2.0).unwrap();
        let f = g.add(last, two_first).unwrap();
        let grads = g.backward(f, &store).unwrap();
        assert_eq!(grads.param(pa), &[2.0, 0.0]);
        assert_eq!(grads.param(pb), &[1.0]);
    }

    #[test]
    fn log_sigmoid_is_stable_far_from_zero() {
        let mut g = Graph::new();
        let big = g.constant(800.0).unwrap();
        let pos = g.log_sigmoid(big).unwrap();
        assert_eq!(g.scalar_value(pos), 0.0);
        let small = g.constant(-800.0).unwrap();
        let neg = g.log_sigmoid(small).unwrap();
        assert_eq!(g.scalar_value(neg), -800.0);
        // Reference value: −ln σ(2) for a score difference of 2.
        let two = g.constant(2.0).unwrap();
        let ls = g.log_sigmoid(two).unwrap();
        assert!((g.scalar_value(ls) - (-0.126_928_011_042_972_6)).abs() < 1e-12);
    }

    #[test]
    fn untouched_parameters_get_zero_gradients() {
        let store = store_with(&[("used", vec![0.3]), ("unused", vec![0.7])]);
        let used = store.id("used").unwrap();
        let mut g = Graph::new();
        let u = g.param(&store, used);
        let x = g.index(u, 0).unwrap();
        let y = g.sigmoid(x).unwrap();
        let grads = g.backward(y, &store).unwrap();
        assert_eq!(grads.param(store.id("unused").unwrap()), &[0.0]);
        assert!(grads.param(used)[0] > 0.0);
    }

    #[test]
    fn shape_mismatches_are_reported() {
        let mut g = Graph::new();
        let s = g.constant(1.0).unwrap();
        let v = g.const_vector(vec![1.0, 2.0]);
        assert!(matches!(g.add(s, v), Err(DiffError::ShapeMismatch { .. })));
        assert!(matches!(g.index(v, 5), Err(DiffError::ShapeMismatch { .. })));
        let w = g.const_vector(vec![1.0, 2.0, 3.0]);
        assert!(matches!(g.add(v, w), Err(DiffError::ShapeMismatch { .. })));
    }

    #[test]
    fn non_scalar_backward_output_is_rejected() {
        let store = ParamStore::new();
        let mut g = Graph::new();
        let v = g.const_vector(vec![1.0]);
        assert!(matches!(g.backward(v, &store), Err(DiffError::NonScalarOutput)));
    }
}

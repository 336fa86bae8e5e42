//! Named, shape-tagged 64-bit parameter arrays.

use super::DiffError;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Handle to one named array inside a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) u32);

impl ParamId {
    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

/// Array shape: flat vectors or row-major matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Vector(usize),
    Matrix(usize, usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Vector(n) => n,
            Shape::Matrix(r, c) => r * c,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Param {
    pub name: String,
    pub shape: Shape,
    pub data: Vec<f64>,
}

/// An ordered collection of named parameter arrays.
///
/// Insertion order is the canonical order everywhere: gradients, optimizer
/// moments, and checkpoints all use it, which keeps runs reproducible.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Param>", into = "Vec<Param>")]
pub struct ParamStore {
    params: Vec<Param>,
    #[serde(skip)]
    index: HashMap<String, ParamId>,
}

impl From<Vec<Param>> for ParamStore {
    fn from(params: Vec<Param>) -> Self {
        let index = params
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), ParamId(i as u32)))
            .collect();
        ParamStore { params, index }
    }
}

impl From<ParamStore> for Vec<Param> {
    fn from(store: ParamStore) -> Self {
        store.params
    }
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, name: &str, shape: Shape, data: Vec<f64>) -> Result<ParamId, DiffError> {
        if self.index.contains_key(name) {
            return Err(DiffError::DuplicateParam { name: name.to_string() });
        }
        assert_eq!(shape.len(), data.len(), "shape/data length mismatch for {name}");
        let id = ParamId(self.params.len() as u32);
        self.params.push(Param { name: name.to_string(), shape, data });
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_vector(&mut self, name: &str, data: Vec<f64>) -> Result<ParamId, DiffError> {
        let shape = Shape::Vector(data.len());
        self.add(name, shape, data)
    }

    pub fn add_matrix(
        &mut self,
        name: &str,
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    ) -> Result<ParamId, DiffError> {
        self.add(name, Shape::Matrix(rows, cols), data)
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.params[id.index()].name
    }

    pub fn shape(&self, id: ParamId) -> Shape {
        self.params[id.index()].shape
    }

    pub fn data(&self, id: ParamId) -> &[f64] {
        &self.params[id.index()].data
    }

    pub fn data_mut(&mut self, id: ParamId) -> &mut [f64] {
        &mut self.params[id.index()].data
    }

    /// Number of parameter arrays.
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn total_len(&self) -> usize {
        self.params.iter().map(|p| p.data.len()).sum()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.params.len() as u32).map(ParamId)
    }

    /// Errors with the first offending name if any value is NaN or infinite.
    pub fn check_finite(&self) -> Result<(), DiffError> {
        for p in &self.params {
            if !p.data.iter().all(|v| v.is_finite()) {
                return Err(DiffError::NonFiniteParam { name: p.name.clone() });
            }
        }
        Ok(())
    }
}

/// Per-parameter gradient arrays, aligned with a store's insertion order.
/// Parameters untouched by a forward pass keep zero gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    data: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros(store: &ParamStore) -> Self {
        Gradients { data: store.params.iter().map(|p| vec![0.0; p.data.len()]).collect() }
    }

    pub fn param(&self, id: ParamId) -> &[f64] {
        &self.data[id.index()]
    }

    pub fn param_mut(&mut self, id: ParamId) -> &mut [f64] {
        &mut self.data[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.iter().map(Vec::as_slice)
    }

    /// Errors with the first offending parameter name if any entry is
    /// NaN or infinite.
    pub fn check_finite(&self, store: &ParamStore) -> Result<(), DiffError> {
        for (i, g) in self.data.iter().enumerate() {
            if !g.iter().all(|v| v.is_finite()) {
                return Err(DiffError::NonFiniteGradient {
                    name: store.name(ParamId(i as u32)).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Samples `len` values uniformly from `(-bound, bound)`.
pub fn uniform_init(rng: &mut impl Rng, len: usize, bound: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-bound..bound)).collect()
}

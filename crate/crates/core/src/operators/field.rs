use std::ops::{Index, IndexMut};

use crate::geometry::Point;
use crate::mesh::{DdfvMesh, Layout};

/// A scalar field in `ℝ^𝒯`: one value per interior primal cell, per
/// boundary (degenerate) primal cell and per dual cell, stored flat in
/// [`Layout`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    layout: Layout,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(layout: Layout) -> Self {
        Self::constant(layout, 0.0)
    }

    pub fn constant(layout: Layout, c: f64) -> Self {
        Self {
            layout,
            values: vec![c; layout.len()],
        }
    }

    pub fn from_vec(layout: Layout, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), layout.len(), "field length does not match layout");
        Self { layout, values }
    }

    /// Samples `f` at every center `x_K`, `x_L`, `x_K*`.
    pub fn from_fn(mesh: &DdfvMesh, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.node_centers().into_iter().map(f).collect();
        Self {
            layout: mesh.layout(),
            values,
        }
    }

    /// Builds a field block by block.
    pub fn from_parts(layout: Layout, primal: &[f64], boundary: &[f64], dual: &[f64]) -> Self {
        assert_eq!(primal.len(), layout.n_primal);
        assert_eq!(boundary.len(), layout.n_boundary);
        assert_eq!(dual.len(), layout.n_dual);
        let mut values = Vec::with_capacity(layout.len());
        values.extend_from_slice(primal);
        values.extend_from_slice(boundary);
        values.extend_from_slice(dual);
        Self { layout, values }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn primal(&self) -> &[f64] {
        &self.values[self.layout.primal_range()]
    }

    pub fn boundary(&self) -> &[f64] {
        &self.values[self.layout.boundary_range()]
    }

    pub fn dual(&self) -> &[f64] {
        &self.values[self.layout.dual_range()]
    }

    pub fn primal_mut(&mut self) -> &mut [f64] {
        let r = self.layout.primal_range();
        &mut self.values[r]
    }

    pub fn boundary_mut(&mut self) -> &mut [f64] {
        let r = self.layout.boundary_range();
        &mut self.values[r]
    }

    pub fn dual_mut(&mut self) -> &mut [f64] {
        let r = self.layout.dual_range();
        &mut self.values[r]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            layout: self.layout,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.layout, other.layout);
        Self {
            layout: self.layout,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Minimum over the cells that carry measure (interior primal and dual).
    pub fn min_measured(&self) -> f64 {
        self.primal()
            .iter()
            .chain(self.dual())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

impl Index<usize> for DiscreteField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for DiscreteField {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

/// One value (scalar or vector) per diamond.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondField<T>(pub Vec<T>);

impl<T> DiamondField<T> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }
}

impl<T> Index<usize> for DiamondField<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl DiamondField<Point> {
    pub fn constant(mesh: &DdfvMesh, v: Point) -> Self {
        Self(vec![v; mesh.diamonds().len()])
    }
}

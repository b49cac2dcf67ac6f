use crate::mesh::{DdfvMesh, Diamond};
use crate::operators::{local_matrices, TensorSpec};

/// Regularity factors and global mesh statistics.
#[derive(Debug, Clone)]
pub struct QualityReport {
    pub theta: Vec<f64>,
    pub theta_tilde: Vec<f64>,
    /// Max over diamonds of both regularity factors.
    pub theta_star: f64,
    /// Max of `θ_D` over interior diamonds; 1 on orthogonal uniform meshes.
    pub theta_interior: f64,
    pub min_sin_alpha: f64,
    pub h: f64,
    pub n_cells: usize,
    pub n_vertices: usize,
    pub n_boundary_edges: usize,
    pub n_diamonds: usize,
    /// Present when a tensor is supplied: `max_D Cond₂(𝔸^D)`.
    pub max_cond: Option<f64>,
    /// `4 θ*² λ^M / λ_m` for the supplied tensor.
    pub cond_bound: Option<f64>,
}

impl QualityReport {
    pub fn cond_bound_holds(&self) -> Option<bool> {
        Some(self.max_cond? < self.cond_bound?)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "cells {}  vertices {}  boundary edges {}  diamonds {}\n\
             h = {:.6e}\ntheta* = {:.6e}\ntheta_D interior max = {:.6e}\nmin sin(alpha) = {:.6e}\n",
            self.n_cells,
            self.n_vertices,
            self.n_boundary_edges,
            self.n_diamonds,
            self.h,
            self.theta_star,
            self.theta_interior,
            self.min_sin_alpha
        );
        if let (Some(c), Some(b)) = (self.max_cond, self.cond_bound) {
            s.push_str(&format!("max cond(A_D) = {c:.6e}  (bound {b:.6e})\n"));
        }
        s
    }
}

pub fn theta(d: &Diamond) -> f64 {
    (d.m_sigma / d.m_sigma_star + d.m_sigma_star / d.m_sigma) / (2.0 * d.sin_alpha)
}

pub fn theta_tilde(d: &Diamond) -> f64 {
    let mut t: f64 = 0.0;
    for (i, &q) in d.quarter.iter().enumerate() {
        if i == 1 && d.is_boundary() {
            continue;
        }
        t = t.max(d.m_d / q);
    }
    t
}

pub fn quality(mesh: &DdfvMesh, tensor: Option<&TensorSpec>) -> QualityReport {
    let theta: Vec<f64> = mesh.diamonds().iter().map(theta).collect();
    let theta_tilde: Vec<f64> = mesh.diamonds().iter().map(theta_tilde).collect();
    let theta_star = theta
        .iter()
        .chain(theta_tilde.iter())
        .fold(1.0_f64, |a, &b| a.max(b));
    let theta_interior = mesh
        .diamonds()
        .iter()
        .zip(&theta)
        .filter(|(d, _)| !d.is_boundary())
        .fold(1.0_f64, |a, (_, &t)| a.max(t));
    let min_sin_alpha = mesh
        .diamonds()
        .iter()
        .map(|d| d.sin_alpha)
        .fold(f64::INFINITY, f64::min);
    let (max_cond, cond_bound) = match tensor.map(|t| (t, local_matrices(mesh, t))) {
        Some((t, Ok(mats))) => {
            let c = mats.iter().map(|a| a.cond2()).fold(0.0, f64::max);
            let (lm, lmax) = t.bounds();
            (Some(c), Some(4.0 * theta_star * theta_star * lmax / lm))
        }
        _ => (None, None),
    };
    QualityReport {
        theta,
        theta_tilde,
        theta_star,
        theta_interior,
        min_sin_alpha,
        h: mesh.size(),
        n_cells: mesh.primal().n_cells(),
        n_vertices: mesh.primal().n_vertices(),
        n_boundary_edges: mesh.boundary_edges().len(),
        n_diamonds: mesh.diamonds().len(),
        max_cond,
        cond_bound,
    }
}

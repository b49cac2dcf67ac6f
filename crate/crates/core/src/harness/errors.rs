//! Space-time error norms against an exact solution.
//!
//! A trajectory is the sequence `u^0, u^1, …, u^N` at times `t^n = nΔt`.
//! All norms below integrate over the time slabs `n ≥ 1`, matching the
//! piecewise-constant-in-time reconstruction of the scheme.

use crate::harness::cases::ExactSolution;
use crate::mesh::DdfvMesh;
use crate::operators::{grad_d, DiscreteField};

/// `|u − u_ex(·, t)|_{2,𝒯}` with `u_ex` sampled at `x_K` and `x_K*`.
pub fn l2_error_at(mesh: &DdfvMesh, u: &DiscreteField, exact: &ExactSolution, t: f64) -> f64 {
    let p: f64 = mesh
        .cell_centers()
        .iter()
        .zip(mesh.cell_areas())
        .zip(u.primal())
        .map(|((x, m), v)| m * (v - exact.eval(*x, t)).powi(2))
        .sum();
    let d: f64 = mesh
        .dual_centers()
        .iter()
        .zip(mesh.dual_areas())
        .zip(u.dual())
        .map(|((x, m), v)| m * (v - exact.eval(*x, t)).powi(2))
        .sum();
    (0.5 * (p + d)).sqrt()
}

/// `Σ_D m_D |∇^D u − ∇u_ex(x_D, t)|²`
pub fn grad_error_sq_at(mesh: &DdfvMesh, u: &DiscreteField, exact: &ExactSolution, t: f64) -> f64 {
    let g = grad_d(mesh, u);
    mesh.diamonds()
        .iter()
        .zip(g.iter())
        .map(|(d, g)| d.m_d * (g - exact.gradient(d.x_d, t)).norm_squared())
        .sum()
}

/// `Σ_{K,K*} m_{K∩K*} (u_K − u_K*)²`
pub fn gap_sq_at(mesh: &DdfvMesh, u: &DiscreteField) -> f64 {
    mesh.overlaps()
        .iter()
        .map(|o| o.area * (u.primal()[o.cell] - u.dual()[o.vertex]).powi(2))
        .sum()
}

/// Streaming accumulator of `erru`, `errgu` and `normU`, fed one state at a time.
#[derive(Debug, Clone, Default)]
pub struct ErrorAccumulator {
    erru: f64,
    errgu_sq: f64,
    gap_sq: f64,
    steps: usize,
}

impl ErrorAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds state `u^n` at `t^n`; `n = 0` is ignored. Without an exact
    /// solution only the primal/dual gap is accumulated.
    pub fn push(&mut self, mesh: &DdfvMesh, n: usize, t: f64, dt: f64, u: &DiscreteField, exact: Option<&ExactSolution>) {
        if n == 0 {
            return;
        }
        if let Some(ex) = exact {
            self.erru = self.erru.max(l2_error_at(mesh, u, ex, t));
            self.errgu_sq += dt * grad_error_sq_at(mesh, u, ex, t);
        }
        self.gap_sq += dt * gap_sq_at(mesh, u);
        self.steps += 1;
    }

    pub fn erru(&self) -> f64 {
        self.erru
    }

    pub fn errgu(&self) -> f64 {
        self.errgu_sq.sqrt()
    }

    pub fn norm_gap(&self) -> f64 {
        self.gap_sq.sqrt()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

fn accumulate(mesh: &DdfvMesh, traj: &[DiscreteField], dt: f64, exact: Option<&ExactSolution>) -> ErrorAccumulator {
    let mut acc = ErrorAccumulator::new();
    for (n, u) in traj.iter().enumerate() {
        acc.push(mesh, n, n as f64 * dt, dt, u, exact);
    }
    acc
}

/// `erru = max_{n≥1} |u^n − u_ex(·, t^n)|_{2,𝒯}`
pub fn error_u(mesh: &DdfvMesh, traj: &[DiscreteField], dt: f64, exact: &ExactSolution) -> f64 {
    accumulate(mesh, traj, dt, Some(exact)).erru()
}

/// `errgu = (Σ_{n≥1} Δt Σ_D m_D |∇^D u^n − ∇u_ex(x_D, t^n)|²)^{1/2}`
pub fn error_gradient(mesh: &DdfvMesh, traj: &[DiscreteField], dt: f64, exact: &ExactSolution) -> f64 {
    accumulate(mesh, traj, dt, Some(exact)).errgu()
}

/// `normU = (Σ_{n≥1} Δt Σ m_{K∩K*} (u_K^n − u_K*^n)²)^{1/2}`, the space-time
/// `L²` distance between the primal and dual reconstructions.
pub fn norm_primal_dual_gap(mesh: &DdfvMesh, traj: &[DiscreteField], dt: f64) -> f64 {
    accumulate(mesh, traj, dt, None).norm_gap()
}

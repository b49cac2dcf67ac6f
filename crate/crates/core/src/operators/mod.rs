//! Discrete operators on a [`DdfvMesh`]: gradient, divergence, brackets,
//! diamond reconstruction, local matrices, penalization, norms and the
//! primal boundary trace.
//!
//! All reductions run in a fixed order (diamond index, then cell index), so
//! results are bit-reproducible.

mod field;
mod tensor;

pub use field::{DiamondField, DiscreteField};
pub use tensor::{Mat2, TensorSpec};

use crate::error::SchemeError;
use crate::geometry::Point;
use crate::mesh::{DdfvMesh, Diamond};

/// `δ^D u = (u_K − u_L, u_K* − u_L*)`.
#[inline]
pub fn delta(d: &Diamond, u: &[f64]) -> [f64; 2] {
    let [k, l, ks, ls] = d.nodes;
    [u[k] - u[l], u[ks] - u[ls]]
}

/// Gradient on one diamond from its four nodal values.
#[inline]
pub fn grad_diamond(d: &Diamond, u: &[f64]) -> Point {
    let [dk, dks] = delta(d, u);
    -(d.normal * (d.m_sigma * dk) + d.dual_normal * (d.m_sigma_star * dks)) / (2.0 * d.m_d)
}

/// `∇^𝔇 u`
pub fn grad_d(mesh: &DdfvMesh, u: &DiscreteField) -> DiamondField<Point> {
    DiamondField(
        mesh.diamonds()
            .iter()
            .map(|d| grad_diamond(d, u.as_slice()))
            .collect(),
    )
}

/// `div^𝒯 ξ`. Zero on `∂𝔐`; dual cells (interior and boundary) collect the
/// fluxes through the dual edges `σ*` only.
pub fn div_t(mesh: &DdfvMesh, xi: &DiamondField<Point>) -> DiscreteField {
    let layout = mesh.layout();
    let mut out = DiscreteField::zeros(layout);
    let v = out.as_mut_slice();
    for (d, x) in mesh.diamonds().iter().zip(xi.iter()) {
        let [k, l, ks, ls] = d.nodes;
        let f = d.m_sigma * x.dot(&d.normal);
        v[k] += f;
        if !d.is_boundary() {
            v[l] -= f;
        }
        let fs = d.m_sigma_star * x.dot(&d.dual_normal);
        v[ks] += fs;
        v[ls] -= fs;
    }
    for (i, m) in mesh.node_measures().into_iter().enumerate() {
        v[i] = if m > 0.0 { v[i] / m } else { 0.0 };
    }
    out
}

/// `⟦u, v⟧_𝒯 = ½ (Σ m_K u_K v_K + Σ m_K* u_K* v_K*)`; `∂𝔐` does not enter.
pub fn bracket_t(mesh: &DdfvMesh, u: &DiscreteField, v: &DiscreteField) -> f64 {
    let p: f64 = mesh
        .cell_areas()
        .iter()
        .zip(u.primal().iter().zip(v.primal()))
        .map(|(m, (a, b))| m * a * b)
        .sum();
    let d: f64 = mesh
        .dual_areas()
        .iter()
        .zip(u.dual().iter().zip(v.dual()))
        .map(|(m, (a, b))| m * a * b)
        .sum();
    0.5 * (p + d)
}

/// `(ξ, φ)_{Λ,𝔇} = Σ m_D ξ_D · Λ^D φ_D`
pub fn inner_lambda(
    mesh: &DdfvMesh,
    lambda: &TensorSpec,
    xi: &DiamondField<Point>,
    phi: &DiamondField<Point>,
) -> f64 {
    mesh.diamonds()
        .iter()
        .zip(xi.iter().zip(phi.iter()))
        .map(|(d, (a, b))| d.m_d * a.dot(&(lambda.diamond_mean(d) * b)))
        .sum()
}

/// `r^D(u) = ¼ (u_K + u_L + u_K* + u_L*)`
#[inline]
pub fn r_diamond(d: &Diamond, u: &[f64]) -> f64 {
    let [k, l, ks, ls] = d.nodes;
    0.25 * (u[k] + u[l] + u[ks] + u[ls])
}

pub fn reconstruct_diamond(mesh: &DdfvMesh, u: &DiscreteField) -> DiamondField<f64> {
    DiamondField(
        mesh.diamonds()
            .iter()
            .map(|d| r_diamond(d, u.as_slice()))
            .collect(),
    )
}

/// Symmetric 2×2 matrix `𝔸^D` of one diamond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMatrix {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl LocalMatrix {
    pub fn new(d: &Diamond, lambda_d: &Mat2) -> Self {
        let n = d.normal;
        let ns = d.dual_normal;
        let s = 1.0 / (4.0 * d.m_d);
        Self {
            a11: s * d.m_sigma * d.m_sigma * n.dot(&(lambda_d * n)),
            a12: s * d.m_sigma * d.m_sigma_star * n.dot(&(lambda_d * ns)),
            a22: s * d.m_sigma_star * d.m_sigma_star * ns.dot(&(lambda_d * ns)),
        }
    }

    #[inline]
    pub fn apply(&self, w: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * w[0] + self.a12 * w[1],
            self.a12 * w[0] + self.a22 * w[1],
        ]
    }

    #[inline]
    pub fn form(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let av = self.apply(v);
        u[0] * av[0] + u[1] * av[1]
    }

    /// Diagonal of `𝔹^D`.
    pub fn b_diag(&self) -> [f64; 2] {
        [
            self.a11.abs() + self.a12.abs(),
            self.a22.abs() + self.a12.abs(),
        ]
    }

    /// `w · 𝔹^D w`
    #[inline]
    pub fn b_form(&self, w: [f64; 2]) -> f64 {
        let b = self.b_diag();
        b[0] * w[0] * w[0] + b[1] * w[1] * w[1]
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * (self.a11 + self.a22);
        let r = (0.25 * (self.a11 - self.a22).powi(2) + self.a12 * self.a12).sqrt();
        (m - r, m + r)
    }

    /// Spectral condition number (infinite when not positive definite).
    pub fn cond2(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

/// `𝔸^D` for every diamond, with `Λ^D` the mean of `Λ` over `D`.
pub fn local_matrices(mesh: &DdfvMesh, lambda: &TensorSpec) -> Result<Vec<LocalMatrix>, SchemeError> {
    lambda.validate()?;
    mesh.diamonds()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let l = lambda.diamond_mean(d);
            if l.symmetric_eigenvalues().min() <= 0.0 {
                return Err(SchemeError::NotSpd(format!("Λ^D not SPD on diamond {i}")));
            }
            Ok(LocalMatrix::new(d, &l))
        })
        .collect()
}

pub fn check_beta(beta: f64) -> Result<(), SchemeError> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(SchemeError::BadBeta(beta))
    }
}

/// `⟦𝒫^𝒯 u, v⟧ = 1/(2 h^β) Σ m_{K∩K*} (u_K − u_K*)(v_K − v_K*)`
pub fn penalization_bracket(
    mesh: &DdfvMesh,
    u: &DiscreteField,
    v: &DiscreteField,
    beta: f64,
) -> Result<f64, SchemeError> {
    check_beta(beta)?;
    let lay = mesh.layout();
    let (u, v) = (u.as_slice(), v.as_slice());
    let s: f64 = mesh
        .overlaps()
        .iter()
        .map(|o| {
            let (k, ks) = (lay.primal(o.cell), lay.dual(o.vertex));
            o.area * (u[k] - u[ks]) * (v[k] - v[ks])
        })
        .sum();
    Ok(s / (2.0 * mesh.size().powf(beta)))
}

/// `𝒫^𝒯 u`, zero on `∂𝔐`.
pub fn penalize(mesh: &DdfvMesh, u: &DiscreteField, beta: f64) -> Result<DiscreteField, SchemeError> {
    check_beta(beta)?;
    let lay = mesh.layout();
    let mut out = DiscreteField::zeros(lay);
    let hb = mesh.size().powf(beta);
    {
        let (o, u) = (out.as_mut_slice(), u.as_slice());
        for ov in mesh.overlaps() {
            let (k, ks) = (lay.primal(ov.cell), lay.dual(ov.vertex));
            let diff = ov.area * (u[k] - u[ks]);
            o[k] += diff;
            o[ks] -= diff;
        }
    }
    for (k, m) in mesh.cell_areas().iter().enumerate() {
        out[lay.primal(k)] /= m * hb;
    }
    for (v, m) in mesh.dual_areas().iter().enumerate() {
        out[lay.dual(v)] /= m * hb;
    }
    Ok(out)
}

/// `|u|_{p,𝒯}` for `p ∈ [1, ∞]`.
pub fn lp_norm(mesh: &DdfvMesh, u: &DiscreteField, p: f64) -> f64 {
    assert!(p >= 1.0, "p must be at least 1");
    if p.is_infinite() {
        return u
            .primal()
            .iter()
            .chain(u.dual())
            .fold(0.0_f64, |a, x| a.max(x.abs()));
    }
    let s: f64 = mesh
        .cell_areas()
        .iter()
        .zip(u.primal())
        .chain(mesh.dual_areas().iter().zip(u.dual()))
        .map(|(m, x)| m * x.abs().powf(p))
        .sum();
    (0.5 * s).powf(1.0 / p)
}

/// `‖∇^h u‖_p` for `p ∈ [1, ∞]`.
pub fn grad_lp_norm(mesh: &DdfvMesh, u: &DiscreteField, p: f64) -> f64 {
    assert!(p >= 1.0, "p must be at least 1");
    let g = grad_d(mesh, u);
    if p.is_infinite() {
        return g.iter().fold(0.0_f64, |a, x| a.max(x.norm()));
    }
    let s: f64 = mesh
        .diamonds()
        .iter()
        .zip(g.iter())
        .map(|(d, x)| d.m_d * x.norm().powf(p))
        .sum();
    s.powf(1.0 / p)
}

/// `‖u‖_{1,p,𝒯}`
pub fn w1p_norm(mesh: &DdfvMesh, u: &DiscreteField, p: f64) -> f64 {
    if p.is_infinite() {
        lp_norm(mesh, u, p) + grad_lp_norm(mesh, u, p)
    } else {
        (lp_norm(mesh, u, p).powf(p) + grad_lp_norm(mesh, u, p).powf(p)).powf(1.0 / p)
    }
}

/// `‖u‖_{1,∞⋆,𝒯} = ‖u‖_{1,∞,𝒯} + ⟦𝒫u, u⟧^{1/2}`
pub fn w1inf_star_norm(mesh: &DdfvMesh, u: &DiscreteField, beta: f64) -> Result<f64, SchemeError> {
    Ok(w1p_norm(mesh, u, f64::INFINITY) + penalization_bracket(mesh, u, u, beta)?.sqrt())
}

/// `(Σ_{n≥1} Δt ‖u^n‖_{1,p,𝒯}^q)^{1/q}` over a trajectory whose first entry is `u^0`.
pub fn lq_w1p_norm(mesh: &DdfvMesh, traj: &[DiscreteField], dt: f64, p: f64, q: f64) -> f64 {
    traj.iter()
        .skip(1)
        .map(|u| dt * w1p_norm(mesh, u, p).powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

/// `max_{n≥1} ‖u^n‖_{1,∞,𝒯}`
pub fn linf_w1inf_norm(mesh: &DdfvMesh, traj: &[DiscreteField]) -> f64 {
    traj.iter()
        .skip(1)
        .map(|u| w1p_norm(mesh, u, f64::INFINITY))
        .fold(0.0, f64::max)
}

/// `max_{n≥1} |u^n|_{p,𝒯}`
pub fn linf_lp_norm(mesh: &DdfvMesh, traj: &[DiscreteField], p: f64) -> f64 {
    traj.iter()
        .skip(1)
        .map(|u| lp_norm(mesh, u, p))
        .fold(0.0, f64::max)
}

/// Primal trace `γ_∂𝔐 u`: one value per boundary edge, with its `L²(∂Ω)` norm.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub values: Vec<f64>,
    pub norm: f64,
}

pub fn trace_boundary(mesh: &DdfvMesh, u: &DiscreteField) -> BoundaryTrace {
    let values = u.boundary().to_vec();
    let norm = mesh
        .boundary_lengths()
        .iter()
        .zip(&values)
        .map(|(m, x)| m * x * x)
        .sum::<f64>()
        .sqrt();
    BoundaryTrace { values, norm }
}

//! Free energy, dissipation, stationary states and the Fisher information.

use crate::error::SchemeError;
use crate::mesh::DdfvMesh;
use crate::operators::{bracket_t, delta, grad_d, inner_lambda, penalization_bracket, r_diamond, DiscreteField, TensorSpec};
use crate::scheme::system::check_positive;
use crate::scheme::Scheme;

/// `H(s) = s log s − s + 1`, with `H(0) = 1`.
pub fn entropy_density(s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        s * s.ln() - s + 1.0
    }
}

/// `𝔼 = ⟦H(u), 1⟧ + ⟦V, u⟧` for `u ≥ 0`.
pub fn energy(mesh: &DdfvMesh, u: &DiscreteField, v: &DiscreteField) -> f64 {
    let one = DiscreteField::constant(mesh.layout(), 1.0);
    bracket_t(mesh, &u.map(entropy_density), &one) + bracket_t(mesh, v, u)
}

/// `⟦u log(u/u∞) − u + u∞, 1⟧`
pub fn relative_energy(mesh: &DdfvMesh, u: &DiscreteField, u_inf: &DiscreteField) -> f64 {
    let one = DiscreteField::constant(mesh.layout(), 1.0);
    let dens = u.zip_map(u_inf, |a, b| {
        let t = if a == 0.0 { 0.0 } else { a * (a / b).ln() };
        t - a + b
    });
    bracket_t(mesh, &dens, &one)
}

pub fn mass(mesh: &DdfvMesh, u: &DiscreteField) -> f64 {
    bracket_t(mesh, u, &DiscreteField::constant(mesh.layout(), 1.0))
}

/// `(Σ m_K u_K, Σ m_K* u_K*)`
pub fn split_masses(mesh: &DdfvMesh, u: &DiscreteField) -> (f64, f64) {
    let p = mesh.cell_areas().iter().zip(u.primal()).map(|(m, x)| m * x).sum();
    let d = mesh.dual_areas().iter().zip(u.dual()).map(|(m, x)| m * x).sum();
    (p, d)
}

/// Dissipation pair `(𝕀, Î)`:
/// `𝕀 = Σ_D r^D δg·𝔸^D δg` with `g = log u + V`, and
/// `Î = Σ_D r^D δ log u·𝔹^D δ log u`. Boundary diamonds are included.
pub fn dissipation(scheme: &Scheme<'_>, u: &DiscreteField) -> Result<(f64, f64), SchemeError> {
    let u = u.as_slice();
    check_positive(u)?;
    let g = scheme.chemical_potential(u)?;
    let lu: Vec<f64> = u.iter().map(|x| x.ln()).collect();
    let mut i = 0.0;
    let mut ih = 0.0;
    for (d, a) in scheme.mesh().diamonds().iter().zip(scheme.local_matrices()) {
        let r = r_diamond(d, u);
        let dg = delta(d, &g);
        i += r * a.form(dg, dg);
        ih += r * a.b_form(delta(d, &lu));
    }
    Ok((i, ih))
}

/// `Σ_D r^D δg·𝔹^D δg`, the upper half of the `𝔸/𝔹` sandwich applied to `𝕀`.
pub fn dissipation_b(scheme: &Scheme<'_>, u: &DiscreteField) -> Result<f64, SchemeError> {
    let g = scheme.chemical_potential(u.as_slice())?;
    Ok(scheme
        .mesh()
        .diamonds()
        .iter()
        .zip(scheme.local_matrices())
        .map(|(d, a)| r_diamond(d, u.as_slice()) * a.b_form(delta(d, &g)))
        .sum())
}

/// `⟦𝒫 g, g⟧` with `g = log u + V`.
pub fn penalization_term(scheme: &Scheme<'_>, u: &DiscreteField) -> Result<f64, SchemeError> {
    let g = DiscreteField::from_vec(u.layout(), scheme.chemical_potential(u.as_slice())?);
    penalization_bracket(scheme.mesh(), &g, &g, scheme.params().beta)
}

/// Discrete equilibrium `u_K = ρ e^{−V_K}`, `u_K* = ρ* e^{−V_K*}` with
/// `Σ m_K u_K = Σ m_K* u_K* = mass`. Boundary cells use `ρ`.
pub fn stationary_state(mesh: &DdfvMesh, v: &DiscreteField, mass: f64) -> DiscreteField {
    stationary_state_split(mesh, v, mass, mass)
}

/// As [`stationary_state`] with separate primal and dual masses. With `κ = 0`
/// the scheme conserves both separately, so this is the equilibrium reached
/// from a given initial state.
pub fn stationary_state_split(mesh: &DdfvMesh, v: &DiscreteField, primal_mass: f64, dual_mass: f64) -> DiscreteField {
    let ev = v.map(|x| (-x).exp());
    let (zp, zd) = split_masses(mesh, &ev);
    let (rho, rho_star) = (primal_mass / zp, dual_mass / zd);
    DiscreteField::from_parts(
        mesh.layout(),
        &ev.primal().iter().map(|x| rho * x).collect::<Vec<_>>(),
        &ev.boundary().iter().map(|x| rho * x).collect::<Vec<_>>(),
        &ev.dual().iter().map(|x| rho_star * x).collect::<Vec<_>>(),
    )
}

/// `‖∇^𝔇 √u‖²_{Λ,𝔇}`
pub fn fisher_norm(mesh: &DdfvMesh, lambda: &TensorSpec, u: &DiscreteField) -> f64 {
    let s = u.map(|x| x.max(0.0).sqrt());
    let g = grad_d(mesh, &s);
    inner_lambda(mesh, lambda, &g, &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::{gen_quad_fvca, gen_uniform_quad};
    use crate::scheme::{project_potential, Potential, SchemeParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn mesh(n: usize) -> DdfvMesh {
        DdfvMesh::build(gen_quad_fvca(n, 0.1).unwrap()).unwrap()
    }

    #[test]
    fn energy_values() {
        let m = mesh(4);
        let z = DiscreteField::zeros(m.layout());
        assert!(energy(&m, &DiscreteField::constant(m.layout(), 1.0), &z).abs() < 1e-14);
        assert!((energy(&m, &DiscreteField::constant(m.layout(), E), &z) - 1.0).abs() < 1e-12);
        assert!((energy(&m, &z, &z) - 1.0).abs() < 1e-12);
        let u = DiscreteField::constant(m.layout(), 0.7);
        assert!(relative_energy(&m, &u, &u).abs() < 1e-15);
    }

    #[test]
    fn stationary_normalisation() {
        let m = mesh(6);
        let z = DiscreteField::zeros(m.layout());
        let u = stationary_state(&m, &z, 3.0);
        assert!(u.as_slice().iter().all(|x| (x - 3.0).abs() < 1e-12));
        let v = project_potential(&m, &Potential::new(|x| -x.y));
        let u = stationary_state(&m, &v, 2.0);
        let (p, d) = split_masses(&m, &u);
        assert!((p - 2.0).abs() < 1e-13 && (d - 2.0).abs() < 1e-13);
        // ρ from a direct sum over the primal cells
        let z: f64 = m.cell_centers().iter().zip(m.cell_areas()).map(|(x, a)| a * x.y.exp()).sum();
        let rho = 2.0 / z;
        let k = 5;
        assert!((u.primal()[k] - rho * m.cell_centers()[k].y.exp()).abs() < 1e-13);
    }

    #[test]
    fn dissipation_values() {
        let m = mesh(4);
        let p = SchemeParams {
            potential: Potential::new(|x| -x.y),
            ..Default::default()
        };
        let s = Scheme::new(&m, p).unwrap();
        let u = stationary_state(&m, s.potential(), 1.0);
        let (i, _) = dissipation(&s, &u).unwrap();
        assert!(i.abs() < 1e-24);
        assert!(fisher_norm(&m, &TensorSpec::Identity, &u) > 0.0);
        let s0 = Scheme::new(&m, SchemeParams::default()).unwrap();
        let c = DiscreteField::constant(m.layout(), 2.0);
        assert_eq!(dissipation(&s0, &c).unwrap(), (0.0, 0.0));
        assert_eq!(fisher_norm(&m, &TensorSpec::Identity, &c), 0.0);
    }

    #[test]
    fn dissipation_sandwich_and_fisher_bound() {
        let m = DdfvMesh::build(gen_uniform_quad(4).unwrap()).unwrap();
        let p = SchemeParams {
            potential: Potential::new(|x| -x.y),
            lambda: TensorSpec::rotated(1.0, 4.0, 0.3),
            ..Default::default()
        };
        let s = Scheme::new(&m, p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let u = DiscreteField::from_vec(m.layout(), (0..m.n_unknowns()).map(|_| rng.gen_range(0.1..3.0)).collect());
            let (i, ih) = dissipation(&s, &u).unwrap();
            let ib = dissipation_b(&s, &u).unwrap();
            assert!(i >= 0.0 && i <= ib * (1.0 + 1e-12));
            assert!(fisher_norm(&m, &s.params().lambda, &u) <= ih * (1.0 + 1e-12));
        }
    }
}

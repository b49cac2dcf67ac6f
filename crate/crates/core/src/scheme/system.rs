//! Residual and Jacobian of one implicit step.
//!
//! Row `i` of the weak residual is the variational form tested with the
//! unit field `e_i`:
//!
//! ```text
//! W_i = m_i/2 [(u_i − u_i^n)/Δt + κ 𝒫_i g] + Σ_D r^D(u) 𝔸^D δ^D g · δ^D e_i,   g = log u + V,
//! ```
//!
//! so `Σ_i ψ_i W_i` is exactly the variational form for any `ψ`. The strong
//! rows divide by `m_i/2`; on a boundary cell `L` the strong row is the
//! closure `m_σ J_D·n = −2 W_L`.

use crate::error::SchemeError;
use crate::mesh::DdfvMesh;
use crate::operators::{delta, local_matrices, r_diamond, DiscreteField, LocalMatrix};
use crate::scheme::SchemeParams;
use crate::solver::{CscMatrix, TripletMatrix};

/// `δ^D e_a` for the four diamond nodes `(K, L, K*, L*)`.
const DELTA_E: [[f64; 2]; 4] = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];

/// The discrete problem on one mesh: geometry, `𝔸^D`, projected potential.
#[derive(Debug, Clone)]
pub struct Scheme<'m> {
    mesh: &'m DdfvMesh,
    params: SchemeParams,
    v: DiscreteField,
    mats: Vec<LocalMatrix>,
    h_beta: f64,
    /// `m_i/2` on measured cells, `−1/2` on boundary cells (strong = weak / scale).
    row_scale: Vec<f64>,
}

impl<'m> Scheme<'m> {
    pub fn new(mesh: &'m DdfvMesh, params: SchemeParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let mut v = crate::scheme::project_potential(mesh, &params.potential);
        if params.shift_potential {
            let m = v.min();
            v.as_mut_slice().iter_mut().for_each(|x| *x -= m);
        }
        let mats = local_matrices(mesh, &params.lambda)?;
        let h_beta = mesh.size().powf(params.beta);
        let row_scale = mesh
            .node_measures()
            .into_iter()
            .map(|m| if m > 0.0 { 0.5 * m } else { -0.5 })
            .collect();
        Ok(Self {
            mesh,
            params,
            v,
            mats,
            h_beta,
            row_scale,
        })
    }

    pub fn mesh(&self) -> &'m DdfvMesh {
        self.mesh
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// Projected potential `V_𝒯`.
    pub fn potential(&self) -> &DiscreteField {
        &self.v
    }

    pub fn local_matrices(&self) -> &[LocalMatrix] {
        &self.mats
    }

    pub fn dt(&self) -> f64 {
        self.params.effective_dt()
    }

    /// `g = log u + V`, failing on a non-positive entry.
    pub fn chemical_potential(&self, u: &[f64]) -> Result<Vec<f64>, SchemeError> {
        check_positive(u)?;
        Ok(u.iter().zip(self.v.as_slice()).map(|(u, v)| u.ln() + v).collect())
    }

    /// Variational rows `W_i`.
    pub fn weak_residual(&self, u_prev: &[f64], u: &[f64]) -> Result<Vec<f64>, SchemeError> {
        let g = self.chemical_potential(u)?;
        let dt = self.dt();
        let mut w = vec![0.0; u.len()];
        for (i, s) in self.row_scale.iter().enumerate() {
            if *s > 0.0 {
                w[i] = s * (u[i] - u_prev[i]) / dt;
            }
        }
        for (d, a) in self.mesh.diamonds().iter().zip(&self.mats) {
            let flux = a.apply(delta(d, &g));
            let r = r_diamond(d, u);
            for (node, de) in d.nodes.iter().zip(DELTA_E) {
                w[*node] += r * (flux[0] * de[0] + flux[1] * de[1]);
            }
        }
        if self.params.kappa > 0.0 {
            let lay = self.mesh.layout();
            let c = self.params.kappa / (2.0 * self.h_beta);
            for o in self.mesh.overlaps() {
                let (k, ks) = (lay.primal(o.cell), lay.dual(o.vertex));
                let p = c * o.area * (g[k] - g[ks]);
                w[k] += p;
                w[ks] -= p;
            }
        }
        Ok(w)
    }

    /// Strong rows: the per-mesh form of the scheme, with the closure
    /// `m_σ J_D·n` on boundary cells.
    pub fn residual(&self, u_prev: &DiscreteField, u: &DiscreteField) -> Result<DiscreteField, SchemeError> {
        let w = self.weak_residual(u_prev.as_slice(), u.as_slice())?;
        Ok(DiscreteField::from_vec(
            self.mesh.layout(),
            w.iter().zip(&self.row_scale).map(|(w, s)| w / s).collect(),
        ))
    }

    /// Jacobian of [`Scheme::weak_residual`] with respect to `u`. The pattern
    /// is the full diamond stencil regardless of the values.
    pub fn jacobian(&self, u: &[f64]) -> Result<CscMatrix, SchemeError> {
        let g = self.chemical_potential(u)?;
        let dt = self.dt();
        let n = u.len();
        let mut t = TripletMatrix::with_capacity(n, n + 16 * self.mats.len() + 4 * self.mesh.overlaps().len());
        for (i, s) in self.row_scale.iter().enumerate() {
            t.push(i, i, if *s > 0.0 { s / dt } else { 0.0 });
        }
        for (d, a) in self.mesh.diamonds().iter().zip(&self.mats) {
            let flux = a.apply(delta(d, &g));
            let r = r_diamond(d, u);
            for (&ra, ea) in d.nodes.iter().zip(DELTA_E) {
                let fa = flux[0] * ea[0] + flux[1] * ea[1];
                for (&cb, eb) in d.nodes.iter().zip(DELTA_E) {
                    t.push(ra, cb, 0.25 * fa + r * a.form(ea, eb) / u[cb]);
                }
            }
        }
        if self.params.kappa > 0.0 {
            let lay = self.mesh.layout();
            let c = self.params.kappa / (2.0 * self.h_beta);
            for o in self.mesh.overlaps() {
                let (k, ks) = (lay.primal(o.cell), lay.dual(o.vertex));
                let dk = c * o.area / u[k];
                let dks = c * o.area / u[ks];
                t.push(k, k, dk);
                t.push(k, ks, -dks);
                t.push(ks, k, -dk);
                t.push(ks, ks, dks);
            }
        }
        Ok(t.to_csc())
    }

    /// Jacobian of the strong residual.
    pub fn jacobian_strong(&self, u: &[f64]) -> Result<CscMatrix, SchemeError> {
        let j = self.jacobian(u)?;
        let e: Vec<_> = j.iter().map(|(i, c, v)| (i, c, v / self.row_scale[i])).collect();
        Ok(CscMatrix::from_triplets(j.dim(), &e))
    }

    /// `T_𝔇(u; a, b) = Σ_D r^D(u) δ^D a · 𝔸^D δ^D b`
    pub fn t_form(&self, u: &[f64], a: &[f64], b: &[f64]) -> f64 {
        self.mesh
            .diamonds()
            .iter()
            .zip(&self.mats)
            .map(|(d, m)| r_diamond(d, u) * m.form(delta(d, a), delta(d, b)))
            .sum()
    }
}

pub(crate) fn check_positive(u: &[f64]) -> Result<(), SchemeError> {
    match u.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        Some(index) => Err(SchemeError::NonPositiveState { index, value: u[index] }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::{gen_kershaw, gen_quad_fvca};
    use crate::operators::{bracket_t, penalize, TensorSpec};
    use crate::scheme::{stationary_state, Potential};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(kappa: f64) -> SchemeParams {
        SchemeParams {
            dt: 0.01,
            t_final: 0.1,
            kappa,
            beta: 1.0,
            lambda: TensorSpec::rotated(1.0, 3.0, 0.5),
            potential: Potential::new(|x| -x.y + 0.3 * x.x * x.x),
            ..Default::default()
        }
    }

    fn random_positive(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(0.5..2.0)).collect()
    }

    #[test]
    fn constant_state_zero_potential_is_fixed_point() {
        let mesh = DdfvMesh::build(gen_quad_fvca(4, 0.1).unwrap()).unwrap();
        let p = SchemeParams {
            potential: Potential::zero(),
            ..params(0.3)
        };
        let s = Scheme::new(&mesh, p).unwrap();
        let u = DiscreteField::constant(mesh.layout(), 1.7);
        let r = s.residual(&u, &u).unwrap();
        assert!(r.as_slice().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn stationary_state_is_fixed_point() {
        let mesh = DdfvMesh::build(gen_kershaw(8, 0.15).unwrap()).unwrap();
        let s = Scheme::new(&mesh, params(0.0)).unwrap();
        let u = stationary_state(&mesh, s.potential(), 2.0);
        let r = s.residual(&u, &u).unwrap();
        assert!(r.as_slice().iter().all(|x| x.abs() < 1e-12), "{:e}", r.as_slice().iter().fold(0.0_f64, |a, x| a.max(x.abs())));
    }

    #[test]
    fn weak_rows_reproduce_variational_form() {
        let mesh = DdfvMesh::build(gen_quad_fvca(3, 0.1).unwrap()).unwrap();
        let s = Scheme::new(&mesh, params(0.4)).unwrap();
        let lay = mesh.layout();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = DiscreteField::from_vec(lay, random_positive(lay.len(), &mut rng));
        let up = DiscreteField::from_vec(lay, random_positive(lay.len(), &mut rng));
        let strong = s.residual(&up, &u).unwrap();
        let g = DiscreteField::from_vec(lay, s.chemical_potential(u.as_slice()).unwrap());
        let pg = penalize(&mesh, &g, 1.0).unwrap();
        let dt = s.dt();
        for _ in 0..10 {
            let psi = DiscreteField::from_vec(lay, (0..lay.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
            // ⟦(u−u^n)/Δt, ψ⟧ + T_𝔇(u; g, ψ) + κ⟦𝒫g, ψ⟧, term by term
            let dudt = u.zip_map(&up, |a, b| (a - b) / dt);
            let form = bracket_t(&mesh, &dudt, &psi)
                + s.t_form(u.as_slice(), g.as_slice(), psi.as_slice())
                + 0.4 * bracket_t(&mesh, &pg, &psi);
            // interior rows via the bracket, boundary closure rows weighted by −ψ_L/2
            let mut lhs = bracket_t(&mesh, &strong, &psi);
            for (r, p) in strong.boundary().iter().zip(psi.boundary()) {
                lhs -= 0.5 * r * p;
            }
            assert!((lhs - form).abs() < 1e-11 * (1.0 + form.abs()), "{lhs} vs {form}");
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mesh = DdfvMesh::build(gen_quad_fvca(3, 0.1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for kappa in [0.0, 0.5] {
            let s = Scheme::new(&mesh, params(kappa)).unwrap();
            let n = mesh.n_unknowns();
            let u = random_positive(n, &mut rng);
            let up = random_positive(n, &mut rng);
            let j = s.jacobian_strong(&u).unwrap();
            let lay = mesh.layout();
            let res = |x: &[f64]| {
                s.residual(&DiscreteField::from_vec(lay, up.clone()), &DiscreteField::from_vec(lay, x.to_vec()))
                    .unwrap()
                    .into_vec()
            };
            for c in 0..n {
                let h = 1e-6 * u[c];
                let mut p = u.clone();
                p[c] += h;
                let mut m = u.clone();
                m[c] -= h;
                let (fp, fm) = (res(&p), res(&m));
                for r in 0..n {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    let an = j.get(r, c);
                    assert!((fd - an).abs() <= 1e-6 * (1.0 + an.abs()), "({r},{c}) fd {fd} an {an}");
                }
            }
        }
    }

    #[test]
    fn jacobian_pattern_is_symmetric_and_mass_diagonal() {
        let mesh = DdfvMesh::build(gen_quad_fvca(4, 0.1).unwrap()).unwrap();
        let s = Scheme::new(&mesh, SchemeParams { potential: Potential::zero(), ..params(0.0) }).unwrap();
        let u = vec![1.3; mesh.n_unknowns()];
        let j = s.jacobian_strong(&u).unwrap();
        for (i, c, _) in j.iter() {
            assert!(j.iter().any(|(a, b, _)| a == c && b == i));
        }
        // at a constant state only the time derivative survives on interior rows
        for i in mesh.layout().primal_range().chain(mesh.layout().dual_range()) {
            let row: f64 = (0..j.dim()).map(|c| j.get(i, c)).sum();
            assert!((row - 1.0 / s.dt()).abs() < 1e-9 / s.dt(), "{row}");
        }
    }

    #[test]
    fn non_positive_state_rejected() {
        let mesh = DdfvMesh::build(gen_quad_fvca(3, 0.1).unwrap()).unwrap();
        let s = Scheme::new(&mesh, params(0.0)).unwrap();
        let mut u = vec![1.0; mesh.n_unknowns()];
        u[4] = 0.0;
        assert!(matches!(s.weak_residual(&u, &u), Err(SchemeError::NonPositiveState { index: 4, .. })));
        assert!(s.jacobian(&u).is_err());
    }
}

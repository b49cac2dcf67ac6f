//! Seeded operator property suite.
//!
//! Every property is evaluated on a small family of meshes drawn from the
//! seed (uniform, smooth quadrangle and Kershaw meshes up to 8×8). The report
//! only contains quantities that depend on the seed, so two runs with the
//! same seed print identical reports.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{polygon_area, Point};
use crate::mesh::generate::{gen_kershaw, gen_quad_fvca, gen_uniform_quad};
use crate::mesh::DdfvMesh;
use crate::operators::{
    bracket_t, delta, div_t, grad_d, inner_lambda, local_matrices, DiamondField, DiscreteField, TensorSpec,
};
use crate::scheme::{stationary_state, Potential, Scheme, SchemeParams};
use crate::solver::l1;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    /// Number of (mesh, sample) instances evaluated.
    pub instances: usize,
    pub max_error: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub seed: u64,
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property suite, seed {}", self.seed)?;
        for i in &self.items {
            writeln!(
                f,
                "{} {:<24} instances {:>4}  max error {:.3e}  tol {:.0e}",
                if i.passed { "PASS" } else { "FAIL" },
                i.name,
                i.instances,
                i.max_error,
                i.tol
            )?;
        }
        write!(f, "{}", if self.passed() { "all properties hold" } else { "some properties FAILED" })
    }
}

struct Tracker {
    name: &'static str,
    tol: f64,
    max: f64,
    n: usize,
}

impl Tracker {
    fn new(name: &'static str, tol: f64) -> Self {
        Self { name, tol, max: 0.0, n: 0 }
    }

    fn add(&mut self, err: f64) {
        // NaN must fail the check
        self.max = if err.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(err) };
        self.n += 1;
    }

    fn finish(self) -> CheckItem {
        CheckItem {
            name: self.name,
            passed: self.max <= self.tol && self.n > 0,
            instances: self.n,
            max_error: self.max,
            tol: self.tol,
        }
    }
}

fn meshes(rng: &mut ChaCha8Rng) -> Vec<DdfvMesh> {
    let mut out = Vec::new();
    for _ in 0..2 {
        out.push(gen_uniform_quad(rng.gen_range(2..=8)).unwrap());
        out.push(gen_quad_fvca(rng.gen_range(4..=8), rng.gen_range(0.0..0.12)).unwrap());
    }
    out.push(gen_kershaw(4, 0.15).unwrap());
    out.push(gen_kershaw(8, rng.gen_range(0.05..0.2)).unwrap());
    out.into_iter().map(|p| DdfvMesh::build(p).expect("generated mesh is admissible")).collect()
}

fn random_tensor(rng: &mut ChaCha8Rng) -> TensorSpec {
    TensorSpec::rotated(rng.gen_range(0.5..2.0), rng.gen_range(0.5..8.0), rng.gen_range(0.0..std::f64::consts::PI))
}

fn random_field(mesh: &DdfvMesh, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> DiscreteField {
    DiscreteField::from_vec(mesh.layout(), (0..mesh.n_unknowns()).map(|_| rng.gen_range(lo..hi)).collect())
}

fn partition_identities(mesh: &DdfvMesh, t: &mut Tracker) {
    let lay = mesh.layout();
    let mut by_node = vec![0.0; lay.len()];
    let mut by_cell = vec![0.0; mesh.cell_areas().len()];
    let mut by_vertex = vec![0.0; mesh.dual_areas().len()];
    for d in mesh.diamonds() {
        for (q, &i) in d.quarter.iter().zip(&d.nodes) {
            by_node[i] += q;
        }
    }
    for o in mesh.overlaps() {
        by_cell[o.cell] += o.area;
        by_vertex[o.vertex] += o.area;
    }
    let mut err: f64 = 0.0;
    for (k, m) in mesh.cell_areas().iter().enumerate() {
        err = err.max((by_node[lay.primal(k)] - m).abs()).max((by_cell[k] - m).abs());
    }
    for (v, m) in mesh.dual_areas().iter().enumerate() {
        let poly = polygon_area(&mesh.dual_polygons()[v]);
        err = err.max((by_node[lay.dual(v)] - m).abs()).max((by_vertex[v] - m).abs()).max((poly - m).abs());
    }
    for l in 0..mesh.boundary_edges().len() {
        err = err.max(by_node[lay.boundary(l)].abs());
    }
    let omega = mesh.primal().total_area();
    let sum_d: f64 = mesh.diamonds().iter().map(|d| d.m_d).sum();
    let sum_k: f64 = mesh.cell_areas().iter().sum();
    let sum_ks: f64 = mesh.dual_areas().iter().sum();
    err = err.max((sum_d - omega).abs()).max((sum_k - omega).abs()).max((sum_ks - omega).abs());
    if !mesh.verify(1e-12).is_empty() {
        err = f64::INFINITY;
    }
    t.add(err);
}

fn diamond_measure(mesh: &DdfvMesh, t: &mut Tracker) {
    let mut err: f64 = 0.0;
    for d in mesh.diamonds() {
        let formula = 0.5 * d.m_sigma * d.m_sigma_star * d.sin_alpha;
        let poly = polygon_area(&d.polygon());
        err = err.max((formula - d.m_d).abs() / d.m_d).max((poly - d.m_d).abs() / d.m_d);
    }
    t.add(err);
}

fn duality(mesh: &DdfvMesh, rng: &mut ChaCha8Rng, t: &mut Tracker) {
    let lay = mesh.layout();
    let xi = DiamondField(
        (0..mesh.diamonds().len())
            .map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    );
    let mut v = random_field(mesh, rng, -1.0, 1.0);
    v.boundary_mut().fill(0.0);
    for (i, &b) in mesh.dual_on_boundary().iter().enumerate() {
        if b {
            v[lay.dual(i)] = 0.0;
        }
    }
    let lhs = bracket_t(mesh, &div_t(mesh, &xi), &v);
    let rhs = -inner_lambda(mesh, &TensorSpec::Identity, &xi, &grad_d(mesh, &v));
    t.add((lhs - rhs).abs() / (1.0 + rhs.abs()));
}

fn affine_exactness(mesh: &DdfvMesh, rng: &mut ChaCha8Rng, t: &mut Tracker) {
    let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let u = DiscreteField::from_fn(mesh, |x| a + b * x.x + c * x.y);
    let g = grad_d(mesh, &u);
    let exact = Point::new(b, c);
    t.add(g.iter().fold(0.0_f64, |m, x| m.max((x - exact).norm())));
}

fn local_matrix_sandwich(mesh: &DdfvMesh, rng: &mut ChaCha8Rng, t: &mut Tracker) {
    let lambda = random_tensor(rng);
    let mats = local_matrices(mesh, &lambda).unwrap();
    let u = random_field(mesh, rng, -1.0, 1.0);
    let v = random_field(mesh, rng, -1.0, 1.0);
    let mut err: f64 = 0.0;
    let mut form = 0.0;
    for (d, a) in mesh.diamonds().iter().zip(&mats) {
        let w = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let q = a.form(w, w);
        let scale = a.a11.abs() + a.a22.abs();
        // 0 ≤ w·𝔸w ≤ w·𝔹w
        err = err.max((-q).max(0.0) / scale).max((q - a.b_form(w)).max(0.0) / scale);
        form += a.form(delta(d, u.as_slice()), delta(d, v.as_slice()));
    }
    // Σ δu·𝔸δv = Σ m_D ∇u·Λ_D∇v
    let reference = inner_lambda(mesh, &lambda, &grad_d(mesh, &u), &grad_d(mesh, &v));
    err = err.max((form - reference).abs() / (1.0 + reference.abs()));
    t.add(err);
}

fn jacobian_fd(mesh: &DdfvMesh, rng: &mut ChaCha8Rng, t: &mut Tracker) {
    let kappa = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.01..1.0) };
    let params = SchemeParams {
        dt: rng.gen_range(1e-3..1e-1),
        kappa,
        beta: rng.gen_range(0.2..1.8),
        lambda: random_tensor(rng),
        potential: Potential::new(|x| -x.y + 0.3 * x.x * x.x),
        ..Default::default()
    };
    let s = Scheme::new(mesh, params).unwrap();
    let n = mesh.n_unknowns();
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
    let up: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
    let j = s.jacobian(&u).unwrap();
    let mut err: f64 = 0.0;
    for c in 0..n {
        let h = 1e-6 * u[c];
        let mut p = u.clone();
        p[c] += h;
        let mut m = u.clone();
        m[c] -= h;
        let fp = s.weak_residual(&up, &p).unwrap();
        let fm = s.weak_residual(&up, &m).unwrap();
        for r in 0..n {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            let an = j.get(r, c);
            err = err.max((fd - an).abs() / (1.0 + an.abs()));
        }
    }
    t.add(err);
}

fn fixed_point(mesh: &DdfvMesh, rng: &mut ChaCha8Rng, t: &mut Tracker) {
    let params = SchemeParams {
        dt: rng.gen_range(1e-3..1e-1),
        lambda: random_tensor(rng),
        potential: Potential::new(|x| -x.y + 0.5 * (3.0 * x.x).sin()),
        ..Default::default()
    };
    let s = Scheme::new(mesh, params).unwrap();
    let u = stationary_state(mesh, s.potential(), rng.gen_range(0.5..2.0));
    t.add(l1(&s.weak_residual(u.as_slice(), u.as_slice()).unwrap()));
}

/// Runs the whole suite for `seed`.
pub fn run_property_suite(seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let meshes = meshes(&mut rng);
    let mut part = Tracker::new("partition_identities", 1e-12);
    let mut md = Tracker::new("diamond_measure", 1e-12);
    let mut dual = Tracker::new("discrete_duality", 1e-12);
    let mut aff = Tracker::new("affine_exactness", 1e-11);
    let mut sand = Tracker::new("local_matrix_sandwich", 1e-12);
    let mut jac = Tracker::new("jacobian_vs_fd", 1e-6);
    let mut fix = Tracker::new("stationary_fixed_point", 1e-10);
    for mesh in &meshes {
        partition_identities(mesh, &mut part);
        diamond_measure(mesh, &mut md);
        for _ in 0..5 {
            duality(mesh, &mut rng, &mut dual);
            affine_exactness(mesh, &mut rng, &mut aff);
            local_matrix_sandwich(mesh, &mut rng, &mut sand);
        }
        jacobian_fd(mesh, &mut rng, &mut jac);
        fixed_point(mesh, &mut rng, &mut fix);
    }
    CheckReport {
        seed,
        items: [part, md, dual, aff, sand, jac, fix].into_iter().map(Tracker::finish).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run_property_suite(42);
        assert!(a.passed(), "{a}");
        assert_eq!(a.items.len(), 7);
        let b = run_property_suite(42);
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn nan_fails() {
        let mut t = Tracker::new("x", 1.0);
        t.add(0.5);
        t.add(f64::NAN);
        t.add(0.1);
        assert!(!t.finish().passed);
        assert!(!Tracker::new("empty", 1.0).finish().passed);
    }
}

use crate::error::SchemeError;
use crate::geometry::{polygon_centroid, triangle_area, Point};
use crate::mesh::DdfvMesh;
use crate::operators::DiscreteField;
use crate::scheme::Potential;

/// Tolerance below which a negative cell mean is treated as round-off and clamped to zero.
pub const NEGATIVE_MEAN_TOL: f64 = 1e-14;

/// Cell means of `u0` on the primal and dual cells; zero on `∂𝔐`.
///
/// Each cell polygon is fan-triangulated from its area centroid and every
/// triangle uses the centroid rule, which is exact for affine `u0`.
pub fn project_initial(mesh: &DdfvMesh, u0: impl Fn(Point) -> f64) -> Result<DiscreteField, SchemeError> {
    let lay = mesh.layout();
    let mut out = vec![0.0; lay.len()];
    let primal = mesh.primal();
    for k in 0..primal.n_cells() {
        out[lay.primal(k)] = polygon_mean(&primal.cell_points(k), &u0);
    }
    for (v, poly) in mesh.dual_polygons().iter().enumerate() {
        out[lay.dual(v)] = polygon_mean(poly, &u0);
    }
    for (i, a) in out.iter_mut().enumerate() {
        if *a < 0.0 {
            if *a < -NEGATIVE_MEAN_TOL {
                return Err(SchemeError::NegativeInitialData { index: i, value: *a });
            }
            *a = 0.0;
        }
    }
    Ok(DiscreteField::from_vec(lay, out))
}

fn polygon_mean(pts: &[Point], f: &impl Fn(Point) -> f64) -> f64 {
    let c = polygon_centroid(pts);
    let mut area = 0.0;
    let mut integral = 0.0;
    for (i, a) in pts.iter().enumerate() {
        let b = &pts[(i + 1) % pts.len()];
        let t = triangle_area(&c, a, b);
        area += t;
        integral += t * f((c + a + b) / 3.0);
    }
    integral / area
}

/// Nodal values `V(x_K)`, `V(x_L)`, `V(x_K*)`.
pub fn project_potential(mesh: &DdfvMesh, v: &Potential) -> DiscreteField {
    DiscreteField::from_fn(mesh, |x| v.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_area;
    use crate::mesh::generate::{gen_kershaw, gen_quad_fvca, gen_uniform_quad};
    use crate::scheme::mass;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_initial_data() {
        let m = DdfvMesh::build(gen_kershaw(8, 0.15).unwrap()).unwrap();
        let u = project_initial(&m, |_| 1.0).unwrap();
        assert!(u.primal().iter().chain(u.dual()).all(|x| (x - 1.0).abs() < 1e-12));
        assert!(u.boundary().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn affine_means_match_polygon_integrals() {
        let m = DdfvMesh::build(gen_quad_fvca(6, 0.15).unwrap()).unwrap();
        let f = |x: Point| 2.0 + 0.5 * x.x - 1.5 * x.y;
        let u = project_initial(&m, f).unwrap();
        // an affine function integrates to area × value at the area centroid
        for (k, c) in m.primal().cells().iter().enumerate() {
            let pts: Vec<Point> = c.iter().map(|&v| m.primal().vertices()[v]).collect();
            assert!((polygon_area(&pts) - m.cell_areas()[k]).abs() < 1e-14);
            assert!((u.primal()[k] - f(polygon_centroid(&pts))).abs() < 1e-12);
        }
        for (v, poly) in m.dual_polygons().iter().enumerate() {
            assert!((u.dual()[v] - f(polygon_centroid(poly))).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_converges_to_integral() {
        // ∫ e^{x+y} over the unit square is (e − 1)²
        let exact = (std::f64::consts::E - 1.0).powi(2);
        let errs: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| {
                let m = DdfvMesh::build(gen_quad_fvca(n, 0.1).unwrap()).unwrap();
                let u = project_initial(&m, |x| (x.x + x.y).exp()).unwrap();
                (mass(&m, &u) - exact).abs()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.0 && errs[1] / errs[2] > 3.0, "{errs:?}");
    }

    #[test]
    fn negative_data_rejected() {
        let m = DdfvMesh::build(gen_uniform_quad(2).unwrap()).unwrap();
        assert!(matches!(
            project_initial(&m, |x| x.x - 0.5),
            Err(SchemeError::NegativeInitialData { .. })
        ));
    }

    #[test]
    fn potential_nodes() {
        let m = DdfvMesh::build(gen_uniform_quad(2).unwrap()).unwrap();
        let v = project_potential(&m, &Potential::new(|x| -x.y));
        // the centre vertex (0.5, 0.5) has index 4
        assert_eq!(v.dual()[4], -0.5);
        assert!(project_potential(&m, &Potential::zero()).as_slice().iter().all(|&x| x == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.gen_range(4..8);
            let m = DdfvMesh::build(gen_quad_fvca(n, rng.gen_range(0.0..0.12)).unwrap()).unwrap();
            let f = |x: Point| (3.0 * x.x).sin() + x.y * x.y;
            let v = project_potential(&m, &Potential::new(f));
            let i = rng.gen_range(0..m.n_unknowns());
            assert_eq!(v[i], f(m.node_centers()[i]));
        }
    }
}

//! Reference test cases on the unit square.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::SchemeError;
use crate::geometry::Point;
use crate::mesh::DdfvMesh;
use crate::operators::{DiscreteField, TensorSpec};
use crate::scheme::{project_initial, project_potential, stationary_state, Potential, SchemeParams};
use crate::solver::NewtonConfig;

pub type SpaceTimeFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
pub type SpaceTimeGrad = Arc<dyn Fn(Point, f64) -> Point + Send + Sync>;

/// Exact solution `u(x, t)` together with its spatial gradient.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: SpaceTimeFn,
    pub grad: SpaceTimeGrad,
}

impl ExactSolution {
    pub fn eval(&self, x: Point, t: f64) -> f64 {
        (self.u)(x, t)
    }

    pub fn gradient(&self, x: Point, t: f64) -> Point {
        (self.grad)(x, t)
    }
}

/// How the initial state is built on a mesh.
#[derive(Clone)]
pub enum InitialData {
    /// Cell means of a function.
    Function(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
    /// The discrete equilibrium `ρ e^{−V}` with the given mass.
    Equilibrium { mass: f64 },
}

#[derive(Clone)]
pub struct TestCase {
    pub name: String,
    /// `(x_min, x_max, y_min, y_max)`; every generated family lives on the unit square.
    pub domain: [f64; 4],
    pub exact: Option<ExactSolution>,
    pub initial: InitialData,
    pub potential: Potential,
    pub lambda: TensorSpec,
    pub t_final: f64,
}

impl fmt::Debug for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestCase")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .field("lambda", &self.lambda)
            .field("t_final", &self.t_final)
            .finish()
    }
}

pub const UNIT_SQUARE: [f64; 4] = [0.0, 1.0, 0.0, 1.0];

/// Decay rate `π² + 1/4` of the transient part of [`exact_case`].
pub const EXACT_ALPHA: f64 = PI * PI + 0.25;

fn exact_u(x: Point, t: f64) -> f64 {
    let y = x.y;
    (-EXACT_ALPHA * t + 0.5 * y).exp() * (PI * (PI * y).cos() + 0.5 * (PI * y).sin()) + PI * (y - 0.5).exp()
}

fn exact_grad(x: Point, t: f64) -> Point {
    let y = x.y;
    let dy = (-EXACT_ALPHA * t + 0.5 * y).exp() * (PI * (PI * y).cos() + (0.25 - PI * PI) * (PI * y).sin())
        + PI * (y - 0.5).exp();
    Point::new(0.0, dy)
}

/// Drift-diffusion benchmark with `V = −x₂`, `Λ = I`, `T = 1/4` and
/// `u(x, t) = e^{−αt + x₂/2}(π cos πx₂ + ½ sin πx₂) + π e^{x₂ − 1/2}`.
pub fn exact_case() -> TestCase {
    TestCase {
        name: "exact".into(),
        domain: UNIT_SQUARE,
        exact: Some(ExactSolution {
            u: Arc::new(exact_u),
            grad: Arc::new(exact_grad),
        }),
        initial: InitialData::Function(Arc::new(|x| exact_u(x, 0.0))),
        potential: Potential::new(|x| -x.y),
        lambda: TensorSpec::Identity,
        t_final: 0.25,
    }
}

/// `u ≡ 1`, `V ≡ 0`: the exact solution is constant.
pub fn constant_case() -> TestCase {
    TestCase {
        name: "constant".into(),
        domain: UNIT_SQUARE,
        exact: Some(ExactSolution {
            u: Arc::new(|_, _| 1.0),
            grad: Arc::new(|_, _| Point::new(0.0, 0.0)),
        }),
        initial: InitialData::Function(Arc::new(|_| 1.0)),
        potential: Potential::zero(),
        lambda: TensorSpec::Identity,
        t_final: 0.25,
    }
}

/// Pure diffusion of a nonuniform bump, no exact solution.
pub fn relaxation_case() -> TestCase {
    TestCase {
        name: "relaxation".into(),
        domain: UNIT_SQUARE,
        exact: None,
        initial: InitialData::Function(Arc::new(|x| 1.0 + 0.8 * (PI * x.x).cos() * (PI * x.y).cos())),
        potential: Potential::zero(),
        lambda: TensorSpec::Identity,
        t_final: 1.0,
    }
}

/// Starts at the discrete equilibrium of `V = −x₂` with unit mass.
pub fn equilibrium_case() -> TestCase {
    TestCase {
        name: "equilibrium".into(),
        domain: UNIT_SQUARE,
        exact: None,
        initial: InitialData::Equilibrium { mass: 1.0 },
        potential: Potential::new(|x| -x.y),
        lambda: TensorSpec::Identity,
        t_final: 0.25,
    }
}

pub const CASE_NAMES: [&str; 4] = ["exact", "constant", "relaxation", "equilibrium"];

pub fn case_by_name(name: &str) -> Option<TestCase> {
    match name {
        "exact" => Some(exact_case()),
        "constant" => Some(constant_case()),
        "relaxation" => Some(relaxation_case()),
        "equilibrium" => Some(equilibrium_case()),
        _ => None,
    }
}

impl TestCase {
    pub fn with_lambda(mut self, lambda: TensorSpec) -> Self {
        self.lambda = lambda;
        self
    }

    /// Scheme parameters for this case with the remaining knobs at their defaults.
    pub fn params(&self, dt: f64, t_final: f64, kappa: f64, beta: f64, newton: NewtonConfig) -> SchemeParams {
        SchemeParams {
            dt,
            t_final,
            kappa,
            beta,
            lambda: self.lambda.clone(),
            potential: self.potential.clone(),
            shift_potential: false,
            newton,
        }
    }

    /// `u^0` on `mesh`.
    pub fn initial_state(&self, mesh: &DdfvMesh) -> Result<DiscreteField, SchemeError> {
        match &self.initial {
            InitialData::Function(f) => project_initial(mesh, |x| f(x)),
            InitialData::Equilibrium { mass } => {
                Ok(stationary_state(mesh, &project_potential(mesh, &self.potential), *mass))
            }
        }
    }

    /// Nodal samples of the exact solution at time `t`, if one is known.
    pub fn sample_exact(&self, mesh: &DdfvMesh, t: f64) -> Option<DiscreteField> {
        let ex = self.exact.as_ref()?;
        Some(DiscreteField::from_fn(mesh, |x| ex.eval(x, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::gen_uniform_quad;

    #[test]
    fn exact_case_values() {
        assert!((EXACT_ALPHA - 10.1196044).abs() < 1e-6);
        let c = exact_case();
        let ex = c.exact.unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!(ex.eval(Point::new(x, 1.0), 0.0).abs() < 1e-14);
        }
        let y = 0.37;
        let late = ex.eval(Point::new(0.2, y), 5.0);
        assert!((late - PI * (y - 0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn exact_case_solves_the_equation() {
        // ∂t u = ∂yy u − ∂y u for V = −y and zero flux ∂y u − u at y ∈ {0, 1}
        let ex = exact_case().exact.unwrap();
        let h = 1e-4;
        for &(y, t) in &[(0.2, 0.0), (0.5, 0.1), (0.9, 0.25)] {
            let p = |y: f64, t: f64| ex.eval(Point::new(0.4, y), t);
            let ut = (p(y, t + h) - p(y, t - h)) / (2.0 * h);
            let uy = (p(y + h, t) - p(y - h, t)) / (2.0 * h);
            let uyy = (p(y + h, t) - 2.0 * p(y, t) + p(y - h, t)) / (h * h);
            assert!((ut - (uyy - uy)).abs() < 1e-4 * (1.0 + ut.abs()), "{ut} vs {}", uyy - uy);
            assert!((ex.gradient(Point::new(0.4, y), t).y - uy).abs() < 1e-6);
            assert_eq!(ex.gradient(Point::new(0.4, y), t).x, 0.0);
        }
        for y in [0.0, 1.0] {
            for t in [0.0, 0.1] {
                let flux = ex.gradient(Point::new(0.5, y), t).y - ex.eval(Point::new(0.5, y), t);
                assert!(flux.abs() < 1e-12, "{flux}");
            }
        }
    }

    #[test]
    fn initial_states() {
        let m = DdfvMesh::build(gen_uniform_quad(4).unwrap()).unwrap();
        for name in CASE_NAMES {
            let c = case_by_name(name).unwrap();
            let u = c.initial_state(&m).unwrap();
            assert!(u.min_measured() > 0.0, "{name}");
        }
        assert!(case_by_name("nope").is_none());
        let u = constant_case().sample_exact(&m, 0.1).unwrap();
        assert!(u.as_slice().iter().all(|&x| x == 1.0));
        assert!(relaxation_case().sample_exact(&m, 0.0).is_none());
    }
}

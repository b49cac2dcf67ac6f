//! Structured mesh families on the unit square.

use std::f64::consts::PI;

use crate::error::MeshError;
use crate::geometry::{polygon_area, Point};
use crate::mesh::PrimalMesh;

/// Default amplitude of the smooth quadrangle family.
pub const DEFAULT_QUAD_AMPLITUDE: f64 = 0.1;
/// Default zigzag slope of the Kershaw family.
pub const DEFAULT_KERSHAW_DISTORTION: f64 = 0.15;

/// Mesh family selector used by the studies and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshFamily {
    Uniform,
    /// Smooth sinusoidal distortion with the given amplitude.
    Quad(f64),
    /// Layered zigzag distortion with the given slope.
    Kershaw(f64),
}

impl MeshFamily {
    pub fn generate(&self, n: usize) -> Result<PrimalMesh, MeshError> {
        match *self {
            MeshFamily::Uniform => gen_uniform_quad(n),
            MeshFamily::Quad(a) => gen_quad_fvca(n, a),
            MeshFamily::Kershaw(d) => gen_kershaw(n, d),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeshFamily::Uniform => "uniform",
            MeshFamily::Quad(_) => "quad",
            MeshFamily::Kershaw(_) => "kershaw",
        }
    }

    /// Parses `uniform`, `quad` or `kershaw`, with the default parameter
    /// unless `param` is given.
    pub fn parse(name: &str, param: Option<f64>) -> Option<Self> {
        match name {
            "uniform" => Some(MeshFamily::Uniform),
            "quad" | "quad_fvca" | "smooth" => {
                Some(MeshFamily::Quad(param.unwrap_or(DEFAULT_QUAD_AMPLITUDE)))
            }
            "kershaw" => Some(MeshFamily::Kershaw(param.unwrap_or(DEFAULT_KERSHAW_DISTORTION))),
            _ => None,
        }
    }
}

/// `n × n` square cells on `(0,1)²`. Vertex `(i, j)` has index `j (n+1) + i`.
pub fn gen_uniform_quad(n: usize) -> Result<PrimalMesh, MeshError> {
    if n < 1 {
        return Err(MeshError::BadParameter("n must be at least 1".into()));
    }
    structured(n, |xi, eta, _, _| Point::new(xi, eta))
}

/// Smoothly distorted quadrangles:
/// `(ξ, η) ↦ (ξ + a sin2πξ sin2πη, η + a sin2πξ sin2πη)`.
pub fn gen_quad_fvca(n: usize, amplitude: f64) -> Result<PrimalMesh, MeshError> {
    if n < 2 {
        return Err(MeshError::BadParameter("n must be at least 2".into()));
    }
    if !(0.0..0.25).contains(&amplitude) {
        return Err(MeshError::BadParameter(format!(
            "amplitude {amplitude} must lie in [0, 0.25)"
        )));
    }
    structured(n, |xi, eta, _, _| {
        let s = amplitude * (2.0 * PI * xi).sin() * (2.0 * PI * eta).sin();
        Point::new(xi + s, eta + s)
    })
}

/// Kershaw-type layered zigzag mesh.
///
/// The `n/4` horizontal layers (at least one) each carry one period of a
/// triangle wave `w(η)` of unit slope. Interior vertical grid lines are
/// displaced by `±distortion · w(η)`, alternating sign from one line to
/// the next, so consecutive columns alternately widen and narrow and every
/// vertical line zigzags with slope `distortion`. Boundary vertices stay
/// put.
pub fn gen_kershaw(n: usize, distortion: f64) -> Result<PrimalMesh, MeshError> {
    if n < 2 {
        return Err(MeshError::BadParameter("n must be at least 2".into()));
    }
    if !(0.0..0.25).contains(&distortion) {
        return Err(MeshError::BadParameter(format!(
            "distortion {distortion} must lie in [0, 0.25)"
        )));
    }
    let layers = (n / 4).max(1) as f64;
    structured(n, |xi, eta, i, _| {
        if i == 0 || i == n {
            return Point::new(xi, eta);
        }
        let period = 1.0 / layers;
        let phase = (eta / period).fract() * period;
        let w = phase.min(period - phase);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        Point::new(xi + sign * distortion * w, eta)
    })
}

fn structured(
    n: usize,
    map: impl Fn(f64, f64, usize, usize) -> Point,
) -> Result<PrimalMesh, MeshError> {
    let nf = n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(map(i as f64 / nf, j as f64 / nf, i, j));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    for (c, cell) in cells.iter().enumerate() {
        let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
        if polygon_area(&pts) <= 0.0 {
            return Err(MeshError::DegenerateCell(c));
        }
    }
    PrimalMesh::new(vertices, cells)
}

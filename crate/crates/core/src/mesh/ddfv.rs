//! The DDFV three-mesh structure: primal cells (interior and degenerate
//! boundary cells), dual cells around the vertices, and diamonds.
//!
//! Unknowns are numbered in one flat index space, see [`Layout`]:
//! interior primal cells first, then one degenerate cell per boundary edge,
//! then one dual cell per vertex.

use crate::error::MeshError;
use crate::geometry::{cross, perp_left, perp_right, polygon_area, polygon_centroid, segment_params, triangle_area, Point};
use crate::mesh::PrimalMesh;

/// Admissibility threshold on `sin α_D`.
pub const SIN_ALPHA_TOL: f64 = 1e-10;

/// Sizes of the three blocks of a discrete field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_primal: usize,
    pub n_boundary: usize,
    pub n_dual: usize,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.n_primal + self.n_boundary + self.n_dual
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn primal(&self, k: usize) -> usize {
        k
    }

    #[inline]
    pub fn boundary(&self, l: usize) -> usize {
        self.n_primal + l
    }

    #[inline]
    pub fn dual(&self, v: usize) -> usize {
        self.n_primal + self.n_boundary + v
    }

    pub fn primal_range(&self) -> std::ops::Range<usize> {
        0..self.n_primal
    }

    pub fn boundary_range(&self) -> std::ops::Range<usize> {
        self.n_primal..self.n_primal + self.n_boundary
    }

    pub fn dual_range(&self) -> std::ops::Range<usize> {
        self.n_primal + self.n_boundary..self.len()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary_range().contains(&i)
    }
}

/// Second primal neighbour of a diamond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Interior(usize),
    /// Degenerate cell of the given boundary edge.
    Boundary(usize),
}

/// One diamond `D = D_{σ,σ*}` with vertices `x_K, x_K*, x_L, x_L*`.
///
/// Orientation: `(tangent, normal)` = `(τ_{K*,L*}, n_{σK})` and
/// `(dual_normal, dual_tangent)` = `(n_{σ*K*}, τ_{K,L})` are direct bases.
#[derive(Debug, Clone)]
pub struct Diamond {
    pub k: usize,
    pub l: Neighbor,
    pub k_star: usize,
    pub l_star: usize,
    /// Flat unknown indices of `(K, L, K*, L*)`.
    pub nodes: [usize; 4],
    pub x_k: Point,
    pub x_l: Point,
    pub x_k_star: Point,
    pub x_l_star: Point,
    /// `σ ∩ σ*`
    pub x_d: Point,
    pub m_sigma: f64,
    pub m_sigma_star: f64,
    pub m_d: f64,
    pub sin_alpha: f64,
    pub normal: Point,
    pub dual_normal: Point,
    pub tangent: Point,
    pub dual_tangent: Point,
    /// `m(D∩K), m(D∩L), m(D∩K*), m(D∩L*)`; the second entry is zero for boundary diamonds.
    pub quarter: [f64; 4],
    /// Area of the triangles `(x_K, x_D, x_K*)`, `(x_K, x_D, x_L*)`, `(x_L, x_D, x_K*)`, `(x_L, x_D, x_L*)`.
    pub overlap: [f64; 4],
    pub diameter: f64,
    /// Area centroid of the diamond.
    pub barycenter: Point,
}

impl Diamond {
    pub fn is_boundary(&self) -> bool {
        matches!(self.l, Neighbor::Boundary(_))
    }

    /// Vertices in counter-clockwise order (three for boundary diamonds).
    pub fn polygon(&self) -> Vec<Point> {
        if self.is_boundary() {
            vec![self.x_k, self.x_l_star, self.x_k_star]
        } else {
            vec![self.x_k, self.x_l_star, self.x_l, self.x_k_star]
        }
    }
}

/// Area of `K ∩ K*` for one incident (primal cell, vertex) pair.
#[derive(Debug, Clone, Copy)]
pub struct Overlap {
    pub cell: usize,
    pub vertex: usize,
    pub area: f64,
}

/// Immutable geometric database of a DDFV mesh.
#[derive(Debug, Clone)]
pub struct DdfvMesh {
    primal: PrimalMesh,
    layout: Layout,
    cell_centers: Vec<Point>,
    cell_areas: Vec<f64>,
    boundary_edges: Vec<[usize; 2]>,
    boundary_centers: Vec<Point>,
    boundary_lengths: Vec<f64>,
    dual_areas: Vec<f64>,
    dual_on_boundary: Vec<bool>,
    dual_polygons: Vec<Vec<Point>>,
    diamonds: Vec<Diamond>,
    overlaps: Vec<Overlap>,
    size: f64,
    area: f64,
}

impl DdfvMesh {
    pub fn build(primal: PrimalMesh) -> Result<Self, MeshError> {
        let nk = primal.n_cells();
        let nv = primal.n_vertices();
        let verts = primal.vertices().to_vec();

        let mut cell_centers = Vec::with_capacity(nk);
        let mut cell_areas = Vec::with_capacity(nk);
        for c in 0..nk {
            let pts = primal.cell_points(c);
            let a = polygon_area(&pts);
            if !(a > 0.0) {
                return Err(MeshError::NegativeArea { cell: c, area: a });
            }
            cell_areas.push(a);
            cell_centers.push(polygon_centroid(&pts));
        }

        let boundary_edges = primal.boundary_edges().to_vec();
        let nb = boundary_edges.len();
        let boundary_centers: Vec<Point> = boundary_edges
            .iter()
            .map(|&[a, b]| (verts[a] + verts[b]) * 0.5)
            .collect();
        let boundary_lengths: Vec<f64> = boundary_edges
            .iter()
            .map(|&[a, b]| (verts[b] - verts[a]).norm())
            .collect();
        let boundary_index: std::collections::HashMap<(usize, usize), usize> = boundary_edges
            .iter()
            .enumerate()
            .map(|(i, &[a, b])| ((a.min(b), a.max(b)), i))
            .collect();

        let layout = Layout {
            n_primal: nk,
            n_boundary: nb,
            n_dual: nv,
        };

        let mut diamonds = Vec::new();
        let mut dual_on_boundary = vec![false; nv];
        for &[a, b] in &boundary_edges {
            dual_on_boundary[a] = true;
            dual_on_boundary[b] = true;
        }

        for (&(a, b), owners) in primal.edges().iter() {
            // K is the owner with the smallest index; it traverses p -> q
            let &(k, p, q) = owners
                .sides
                .iter()
                .min_by_key(|s| s.0)
                .expect("edge without owner");
            let (l, x_l) = match owners.sides.iter().find(|s| s.0 != k) {
                Some(&(c, _, _)) => (Neighbor::Interior(c), cell_centers[c]),
                None => {
                    let bi = boundary_index[&(a, b)];
                    (Neighbor::Boundary(bi), boundary_centers[bi])
                }
            };
            // K lies to the right of K* -> L*, so K* = q and L* = p
            let (ks, ls) = (q, p);
            let x_k = cell_centers[k];
            let x_ks = verts[ks];
            let x_ls = verts[ls];
            let nodes = [
                layout.primal(k),
                match l {
                    Neighbor::Interior(c) => layout.primal(c),
                    Neighbor::Boundary(bi) => layout.boundary(bi),
                },
                layout.dual(ks),
                layout.dual(ls),
            ];
            diamonds.push(make_diamond(k, l, ks, ls, nodes, x_k, x_l, x_ks, x_ls)?);
        }

        let mut dual_areas = vec![0.0; nv];
        let mut overlap_acc: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for d in &diamonds {
            dual_areas[d.k_star] += d.quarter[2];
            dual_areas[d.l_star] += d.quarter[3];
            *overlap_acc.entry((d.k, d.k_star)).or_default() += d.overlap[0];
            *overlap_acc.entry((d.k, d.l_star)).or_default() += d.overlap[1];
            if let Neighbor::Interior(l) = d.l {
                *overlap_acc.entry((l, d.k_star)).or_default() += d.overlap[2];
                *overlap_acc.entry((l, d.l_star)).or_default() += d.overlap[3];
            }
        }
        let overlaps = overlap_acc
            .into_iter()
            .map(|((cell, vertex), area)| Overlap { cell, vertex, area })
            .collect();

        let mut dual_points: Vec<Vec<Point>> = vec![Vec::new(); nv];
        for d in &diamonds {
            for v in [d.k_star, d.l_star] {
                for x in [d.x_k, d.x_l] {
                    if !dual_points[v].iter().any(|p| (p - x).norm() < 1e-14) {
                        dual_points[v].push(x);
                    }
                }
            }
        }
        let dual_polygons = dual_points
            .into_iter()
            .enumerate()
            .map(|(v, pts)| dual_polygon(verts[v], pts, dual_on_boundary[v]))
            .collect();

        let size = diamonds.iter().map(|d| d.diameter).fold(0.0, f64::max);
        let area = cell_areas.iter().sum();

        Ok(Self {
            primal,
            layout,
            cell_centers,
            cell_areas,
            boundary_edges,
            boundary_centers,
            boundary_lengths,
            dual_areas,
            dual_on_boundary,
            dual_polygons,
            diamonds,
            overlaps,
            size,
            area,
        })
    }

    pub fn primal(&self) -> &PrimalMesh {
        &self.primal
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn n_unknowns(&self) -> usize {
        self.layout.len()
    }

    pub fn cell_centers(&self) -> &[Point] {
        &self.cell_centers
    }

    pub fn cell_areas(&self) -> &[f64] {
        &self.cell_areas
    }

    /// Vertex pairs of the boundary edges (one degenerate cell each).
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn boundary_centers(&self) -> &[Point] {
        &self.boundary_centers
    }

    pub fn boundary_lengths(&self) -> &[f64] {
        &self.boundary_lengths
    }

    pub fn dual_centers(&self) -> &[Point] {
        self.primal.vertices()
    }

    pub fn dual_areas(&self) -> &[f64] {
        &self.dual_areas
    }

    pub fn dual_on_boundary(&self) -> &[bool] {
        &self.dual_on_boundary
    }

    /// Dual cell outlines, vertices sorted by angle around the vertex.
    pub fn dual_polygons(&self) -> &[Vec<Point>] {
        &self.dual_polygons
    }

    pub fn diamonds(&self) -> &[Diamond] {
        &self.diamonds
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.overlaps
    }

    /// `size(T) = max_D d_D`.
    pub fn size(&self) -> f64 {
        self.size
    }

    /// `m(Ω)`
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_lengths.iter().sum()
    }

    /// Center of every unknown in flat order (`x_K`, `x_L`, `x_K*`).
    pub fn node_centers(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.n_unknowns());
        out.extend_from_slice(&self.cell_centers);
        out.extend_from_slice(&self.boundary_centers);
        out.extend_from_slice(self.primal.vertices());
        out
    }

    /// Measure of every unknown in flat order; zero on boundary cells.
    pub fn node_measures(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_unknowns());
        out.extend_from_slice(&self.cell_areas);
        out.extend(std::iter::repeat_n(0.0, self.layout.n_boundary));
        out.extend_from_slice(&self.dual_areas);
        out
    }

    /// Checks the partition and orientation identities, returning the list of defects.
    pub fn verify(&self, tol: f64) -> Vec<String> {
        let mut defects = Vec::new();
        let omega = self.area;
        let scale = tol * omega.max(1.0);
        let sum_dual: f64 = self.dual_areas.iter().sum();
        let sum_diamond: f64 = self.diamonds.iter().map(|d| d.m_d).sum();
        let sum_overlap: f64 = self.overlaps.iter().map(|o| o.area).sum();
        for (name, s) in [("dual", sum_dual), ("diamond", sum_diamond), ("overlap", sum_overlap)] {
            if (s - omega).abs() > scale {
                defects.push(format!("{name} areas sum to {s:.16e}, expected {omega:.16e}"));
            }
        }
        for (i, d) in self.diamonds.iter().enumerate() {
            let formula = 0.5 * d.m_sigma * d.m_sigma_star * d.sin_alpha;
            if (formula - d.m_d).abs() > tol * d.m_d {
                defects.push(format!("diamond {i}: m_D = {:e} but ½ m_σ m_σ* sin α = {formula:e}", d.m_d));
            }
            if (d.quarter[0] + d.quarter[1] - d.m_d).abs() > tol * d.m_d
                || (d.quarter[2] + d.quarter[3] - d.m_d).abs() > tol * d.m_d
            {
                defects.push(format!("diamond {i}: quarter diamonds do not add up"));
            }
            if d.sin_alpha <= SIN_ALPHA_TOL {
                defects.push(format!("diamond {i}: sin α = {:e}", d.sin_alpha));
            }
            for v in [d.normal, d.dual_normal, d.tangent, d.dual_tangent] {
                if (v.norm() - 1.0).abs() > 1e-12 {
                    defects.push(format!("diamond {i}: basis vector not unit"));
                }
            }
            if cross(&d.tangent, &d.normal) <= 0.0 || cross(&d.dual_normal, &d.dual_tangent) <= 0.0 {
                defects.push(format!("diamond {i}: basis not direct"));
            }
            if d.normal.dot(&(d.x_d - d.x_k)) <= 0.0 {
                defects.push(format!("diamond {i}: n_σK not outward K"));
            }
        }
        defects
    }
}

#[allow(clippy::too_many_arguments)]
fn make_diamond(
    k: usize,
    l: Neighbor,
    k_star: usize,
    l_star: usize,
    nodes: [usize; 4],
    x_k: Point,
    x_l: Point,
    x_k_star: Point,
    x_l_star: Point,
) -> Result<Diamond, MeshError> {
    let fail = |reason: String| MeshError::NonConvexDiamond {
        a: k_star.min(l_star),
        b: k_star.max(l_star),
        reason,
    };
    let sigma = x_l_star - x_k_star;
    let sigma_star = x_l - x_k;
    let m_sigma = sigma.norm();
    let m_sigma_star = sigma_star.norm();
    if m_sigma_star <= 0.0 {
        return Err(fail("coincident primal centers".into()));
    }
    let tangent = sigma / m_sigma;
    let dual_tangent = sigma_star / m_sigma_star;
    let normal = perp_left(&tangent);
    let dual_normal = perp_right(&dual_tangent);
    let sin_alpha = cross(&tangent, &dual_tangent);
    if sin_alpha <= SIN_ALPHA_TOL {
        return Err(fail(format!("sin α = {sin_alpha:e}")));
    }
    let (s, t) = segment_params(&x_k_star, &x_l_star, &x_k, &x_l)
        .ok_or_else(|| fail("parallel diagonals".into()))?;
    let eps = 1e-12;
    if !(-eps..=1.0 + eps).contains(&s) || !(-eps..=1.0 + eps).contains(&t) {
        return Err(fail(format!("diagonals do not intersect (s = {s:.3}, t = {t:.3})")));
    }
    let x_d = x_k_star + sigma * s;
    let boundary = matches!(l, Neighbor::Boundary(_));

    let m_d = 0.5 * m_sigma * m_sigma_star * sin_alpha;
    let quarter = [
        triangle_area(&x_k, &x_l_star, &x_k_star),
        if boundary { 0.0 } else { triangle_area(&x_l, &x_k_star, &x_l_star) },
        triangle_area(&x_k_star, &x_k, &x_l),
        triangle_area(&x_l_star, &x_l, &x_k),
    ];
    let overlap = [
        triangle_area(&x_k, &x_d, &x_k_star).abs(),
        triangle_area(&x_k, &x_d, &x_l_star).abs(),
        if boundary { 0.0 } else { triangle_area(&x_l, &x_d, &x_k_star).abs() },
        if boundary { 0.0 } else { triangle_area(&x_l, &x_d, &x_l_star).abs() },
    ];
    let pts: Vec<Point> = if boundary {
        vec![x_k, x_l_star, x_k_star]
    } else {
        vec![x_k, x_l_star, x_l, x_k_star]
    };
    let mut diameter: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            diameter = diameter.max((pts[i] - pts[j]).norm());
        }
    }
    let barycenter = polygon_centroid(&pts);

    Ok(Diamond {
        k,
        l,
        k_star,
        l_star,
        nodes,
        x_k,
        x_l,
        x_k_star,
        x_l_star,
        x_d,
        m_sigma,
        m_sigma_star,
        m_d,
        sin_alpha,
        normal,
        dual_normal,
        tangent,
        dual_tangent,
        quarter,
        overlap,
        diameter,
        barycenter,
    })
}

/// Sorts the surrounding centers by angle around the vertex; boundary
/// vertices are closed through the vertex itself, opening the loop at the
/// largest angular gap.
fn dual_polygon(center: Point, mut pts: Vec<Point>, boundary: bool) -> Vec<Point> {
    let angle = |p: &Point| (p.y - center.y).atan2(p.x - center.x);
    pts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    if !boundary || pts.len() < 2 {
        return pts;
    }
    let n = pts.len();
    let mut best = (0, f64::MIN);
    for i in 0..n {
        let a0 = angle(&pts[i]);
        let mut a1 = angle(&pts[(i + 1) % n]);
        if a1 <= a0 {
            a1 += 2.0 * std::f64::consts::PI;
        }
        if a1 - a0 > best.1 {
            best = (i, a1 - a0);
        }
    }
    pts.rotate_left((best.0 + 1) % n);
    pts.push(center);
    pts
}

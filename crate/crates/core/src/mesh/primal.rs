use std::collections::{BTreeMap, VecDeque};

use crate::error::MeshError;
use crate::geometry::{polygon_area, segments_cross, Point};

/// A polygonal partition of a connected domain: vertex coordinates and
/// counter-clockwise vertex loops. Boundary edges are derived.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    boundary_edges: Vec<[usize; 2]>,
}

/// Owners of an undirected edge, keyed by its sorted vertex pair.
#[derive(Debug, Clone)]
pub(crate) struct EdgeOwners {
    /// `(cell, a, b)` where `a -> b` is the traversal direction inside the cell.
    pub sides: Vec<(usize, usize, usize)>,
}

impl PrimalMesh {
    /// Builds and validates a mesh. Cells must be counter-clockwise.
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        for (c, cell) in cells.iter().enumerate() {
            check_loop(c, cell, vertices.len())?;
            let area = polygon_area(&loop_points(&vertices, cell));
            if !(area > 0.0) {
                return Err(MeshError::NegativeArea { cell: c, area });
            }
        }
        Self::finish(vertices, cells)
    }

    /// Like [`PrimalMesh::new`] but flips clockwise cells, returning one
    /// warning per flipped cell.
    pub fn new_reoriented(
        vertices: Vec<Point>,
        mut cells: Vec<Vec<usize>>,
    ) -> Result<(Self, Vec<String>), MeshError> {
        let mut warnings = Vec::new();
        for (c, cell) in cells.iter_mut().enumerate() {
            check_loop(c, cell, vertices.len())?;
            let area = polygon_area(&loop_points(&vertices, cell));
            if area < 0.0 {
                cell.reverse();
                warnings.push(format!("cell {c} was clockwise and has been reoriented"));
            } else if area == 0.0 {
                return Err(MeshError::NegativeArea { cell: c, area });
            }
        }
        Ok((Self::finish(vertices, cells)?, warnings))
    }

    fn finish(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        if cells.is_empty() {
            return Err(MeshError::Validation("mesh has no cells".into()));
        }
        for (c, cell) in cells.iter().enumerate() {
            if !is_simple(&loop_points(&vertices, cell)) {
                return Err(MeshError::Validation(format!("cell {c} is not a simple polygon")));
            }
        }
        let mut used = vec![false; vertices.len()];
        for cell in &cells {
            for &v in cell {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::Validation(format!("vertex {v} is not used by any cell")));
        }

        let edges = edge_map(&cells);
        let mut boundary_edges = Vec::new();
        for (&(a, b), owners) in &edges {
            match owners.sides.as_slice() {
                [(_, p, q)] => boundary_edges.push([*p, *q]),
                [(_, p1, _), (_, p2, _)] => {
                    if p1 == p2 {
                        return Err(MeshError::Validation(format!(
                            "edge ({a}, {b}) is traversed in the same direction by both cells"
                        )));
                    }
                }
                _ => return Err(MeshError::NonManifoldEdge(a, b)),
            }
        }

        // connectivity through shared edges
        let mut adj = vec![Vec::new(); cells.len()];
        for owners in edges.values() {
            if let [(c1, _, _), (c2, _, _)] = owners.sides.as_slice() {
                adj[*c1].push(*c2);
                adj[*c2].push(*c1);
            }
        }
        let mut seen = vec![false; cells.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(MeshError::Validation("cells do not form a connected domain".into()));
        }

        Ok(Self {
            vertices,
            cells,
            boundary_edges,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Boundary edges, oriented as in their (counter-clockwise) owner cell.
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        loop_points(&self.vertices, &self.cells[c])
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        polygon_area(&self.cell_points(c))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_area(c)).sum()
    }

    pub(crate) fn edges(&self) -> BTreeMap<(usize, usize), EdgeOwners> {
        edge_map(&self.cells)
    }
}

fn check_loop(c: usize, cell: &[usize], nv: usize) -> Result<(), MeshError> {
    if cell.len() < 3 {
        return Err(MeshError::Validation(format!("cell {c} has fewer than 3 vertices")));
    }
    if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
        return Err(MeshError::Validation(format!(
            "cell {c} references missing vertex {v}"
        )));
    }
    for i in 0..cell.len() {
        for j in i + 1..cell.len() {
            if cell[i] == cell[j] {
                return Err(MeshError::Validation(format!(
                    "cell {c} repeats vertex {}",
                    cell[i]
                )));
            }
        }
    }
    Ok(())
}

fn loop_points(vertices: &[Point], cell: &[usize]) -> Vec<Point> {
    cell.iter().map(|&v| vertices[v]).collect()
}

fn is_simple(pts: &[Point]) -> bool {
    let n = pts.len();
    for i in 0..n {
        let (p, q) = (pts[i], pts[(i + 1) % n]);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (pts[j], pts[(j + 1) % n]);
            if segments_cross(&p, &q, &a, &b) {
                return false;
            }
        }
    }
    true
}

fn edge_map(cells: &[Vec<usize>]) -> BTreeMap<(usize, usize), EdgeOwners> {
    let mut map: BTreeMap<(usize, usize), EdgeOwners> = BTreeMap::new();
    for (c, cell) in cells.iter().enumerate() {
        let k = cell.len();
        for i in 0..k {
            let (a, b) = (cell[i], cell[(i + 1) % k]);
            map.entry((a.min(b), a.max(b)))
                .or_insert_with(|| EdgeOwners { sides: Vec::new() })
                .sides
                .push((c, a, b));
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn single_cell() {
        let m = PrimalMesh::new(square(), vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(m.boundary_edges().len(), 4);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clockwise_rejected_by_strict_constructor() {
        let err = PrimalMesh::new(square(), vec![vec![0, 3, 2, 1]]).unwrap_err();
        assert!(matches!(err, MeshError::NegativeArea { .. }));
    }

    #[test]
    fn clockwise_reoriented() {
        let (m, w) = PrimalMesh::new_reoriented(square(), vec![vec![0, 3, 2, 1]]).unwrap();
        assert_eq!(w.len(), 1);
        assert!(m.cell_area(0) > 0.0);
    }

    #[test]
    fn missing_vertex() {
        let err = PrimalMesh::new(square(), vec![vec![0, 1, 7]]).unwrap_err();
        assert!(matches!(err, MeshError::Validation(_)));
    }

    #[test]
    fn non_manifold_edge() {
        // three triangles sharing the edge (0,1)
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 1.0),
            Point::new(0.5, -1.0),
            Point::new(0.5, 2.0),
        ];
        let err = PrimalMesh::new(v, vec![vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]]).unwrap_err();
        assert!(matches!(
            err,
            MeshError::NonManifoldEdge(0, 1) | MeshError::Validation(_)
        ));
    }

    #[test]
    fn disconnected() {
        let mut v = square();
        v.extend([
            Point::new(2.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 1.0),
        ]);
        let err = PrimalMesh::new(v, vec![vec![0, 1, 2, 3], vec![4, 5, 6]]).unwrap_err();
        assert!(matches!(err, MeshError::Validation(_)));
    }

    #[test]
    fn self_intersecting_cell_rejected() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 2.0),
            Point::new(1.0, -1.0),
            Point::new(0.0, 2.0),
        ];
        let err = PrimalMesh::new(v, vec![vec![0, 1, 2, 3, 4]]).unwrap_err();
        assert!(matches!(err, MeshError::Validation(_)));
    }
}

//! Plain-text mesh format.
//!
//! ```text
//! # optional comment lines
//! vertices N
//! x y            (N lines)
//! cells M
//! k i1 ... ik    (M lines, 0-based vertex indices, counter-clockwise)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::MeshError;
use crate::geometry::Point;
use crate::mesh::PrimalMesh;

/// Result of reading a mesh: the mesh and any non-fatal warnings
/// (reoriented cells).
#[derive(Debug, Clone)]
pub struct ReadMesh {
    pub mesh: PrimalMesh,
    pub warnings: Vec<String>,
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<ReadMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn write_mesh(mesh: &PrimalMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn format_mesh(mesh: &PrimalMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", mesh.n_vertices());
    for v in mesh.vertices() {
        // {:e} on f64 prints the shortest representation that round-trips
        let _ = writeln!(s, "{:e} {:e}", v.x, v.y);
    }
    let _ = writeln!(s, "cells {}", mesh.n_cells());
    for c in mesh.cells() {
        let _ = write!(s, "{}", c.len());
        for v in c {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s
}

pub fn parse_mesh(text: &str) -> Result<ReadMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let nv = header(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next_line(&mut lines, "vertex block")?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| perr(ln, format!("bad coordinate: {e}")))?;
        if xs.len() != 2 || !xs.iter().all(|x| x.is_finite()) {
            return Err(perr(ln, "expected two finite coordinates".into()));
        }
        vertices.push(Point::new(xs[0], xs[1]));
    }

    let nc = header(&mut lines, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = next_line(&mut lines, "cell block")?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| perr(ln, format!("bad index: {e}")))?;
        let (&k, rest) = ids
            .split_first()
            .ok_or_else(|| perr(ln, "empty cell line".into()))?;
        if rest.len() != k {
            return Err(perr(ln, format!("cell declares {k} vertices but lists {}", rest.len())));
        }
        if let Some(&v) = rest.iter().find(|&&v| v >= nv) {
            return Err(perr(ln, format!("cell references missing vertex {v}")));
        }
        cells.push(rest.to_vec());
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "trailing content after cell block".into()));
    }
    let (mesh, warnings) = PrimalMesh::new_reoriented(vertices, cells)?;
    Ok(ReadMesh { mesh, warnings })
}

fn perr(line: usize, msg: String) -> MeshError {
    MeshError::Parse { line, msg }
}

fn next_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &str,
) -> Result<(usize, &'a str), MeshError> {
    lines
        .next()
        .ok_or_else(|| perr(0, format!("unexpected end of file in {what}")))
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<usize, MeshError> {
    let (ln, l) = next_line(lines, &format!("`{key}` header"))?;
    let mut it = l.split_whitespace();
    if it.next() != Some(key) {
        return Err(perr(ln, format!("expected `{key} <count>`")));
    }
    it.next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(ln, format!("bad `{key}` count")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate::{gen_kershaw, gen_uniform_quad};

    #[test]
    fn round_trip_uniform() {
        let m = gen_uniform_quad(2).unwrap();
        let r = parse_mesh(&format_mesh(&m)).unwrap();
        assert_eq!(r.mesh, m);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = gen_kershaw(8, 0.2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("k.mesh");
        write_mesh(&m, &p).unwrap();
        assert_eq!(read_mesh(&p).unwrap().mesh, m);
    }

    #[test]
    fn missing_vertex_is_parse_error() {
        let text = "vertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 5\n";
        match parse_mesh(text) {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_and_bad_counts() {
        let text = "# a triangle\nvertices 3\n0 0\n1 0\n# inline\n0 1\ncells 1\n3 0 1 2\n";
        assert_eq!(parse_mesh(text).unwrap().mesh.n_cells(), 1);
        let text = "vertices 3\n0 0\n1 0\n0 1\ncells 1\n4 0 1 2\n";
        assert!(matches!(parse_mesh(text), Err(MeshError::Parse { line: 6, .. })));
        let text = "vertices 2\n0 0\n";
        assert!(matches!(parse_mesh(text), Err(MeshError::Parse { .. })));
        let text = "vertices 3\n0 0\n1 x\n0 1\ncells 1\n3 0 1 2\n";
        assert!(matches!(parse_mesh(text), Err(MeshError::Parse { line: 3, .. })));
    }

    #[test]
    fn clockwise_cell_reoriented_with_warning() {
        let text = "vertices 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n4 0 3 2 1\n";
        let r = parse_mesh(text).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.mesh.cell_area(0) > 0.0);
    }
}

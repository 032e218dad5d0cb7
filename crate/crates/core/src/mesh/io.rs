//! Plain-text mesh format.
//!
//! ```text
//! ntri-mesh 1
//! <vertex count>
//! x1 x2            (one line per vertex)
//! <triangle count>
//! i j k            (0-based, counterclockwise)
//! <boundary edge count>
//! i j tag
//! ```
//! Coordinates are written with 17 significant digits so a write/read cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::mesh::{BoundaryEdge, Triangulation};
use crate::{Error, Point, Result};

pub const HEADER: &str = "ntri-mesh 1";

pub fn to_string(mesh: &Triangulation) -> String {
    let mut s = String::with_capacity(64 * (mesh.n_vertices() + mesh.n_triangles()));
    s.push_str(HEADER);
    s.push('\n');
    let _ = writeln!(s, "{}", mesh.n_vertices());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e}", p.x, p.y);
    }
    let _ = writeln!(s, "{}", mesh.n_triangles());
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "{}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {} {}", e.a, e.b, e.tag);
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        loop {
            let (i, l) = self.inner.next().ok_or(Error::Parse { line: self.line + 1, msg: "unexpected end of file".into() })?;
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok(l);
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, msg: msg.into() }
    }

    fn count(&mut self) -> Result<usize> {
        let l = self.next()?;
        l.parse().map_err(|_| self.err(format!("expected a count, found {l:?}")))
    }

    fn fields<T: std::str::FromStr, const N: usize>(&mut self) -> Result<[T; N]> {
        let l = self.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != N {
            return Err(self.err(format!("expected {N} fields, found {}", parts.len())));
        }
        let mut out = Vec::with_capacity(N);
        for p in parts {
            out.push(p.parse::<T>().map_err(|_| self.err(format!("cannot parse {p:?}")))?);
        }
        out.try_into().map_err(|_| self.err("field count"))
    }
}

pub fn from_str(text: &str) -> Result<Triangulation> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    let header = lines.next()?;
    if header != HEADER {
        return Err(lines.err(format!("expected header {HEADER:?}, found {header:?}")));
    }
    let nv = lines.count()?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let [x, y] = lines.fields::<f64, 2>()?;
        vertices.push(Point::new(x, y));
    }
    let nt = lines.count()?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let t = lines.fields::<usize, 3>()?;
        if t.iter().any(|&v| v >= nv) {
            return Err(lines.err("triangle index out of range"));
        }
        triangles.push(t);
    }
    let nb = lines.count()?;
    let mut boundary_edges = Vec::with_capacity(nb);
    for _ in 0..nb {
        let [a, b, tag] = lines.fields::<usize, 3>()?;
        if a >= nv || b >= nv {
            return Err(lines.err("boundary edge index out of range"));
        }
        boundary_edges.push(BoundaryEdge { a, b, tag });
    }
    Ok(Triangulation { vertices, triangles, boundary_edges })
}

pub fn write(mesh: &Triangulation, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_string(mesh))?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<Triangulation> {
    from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;
    use proptest::prelude::*;

    #[test]
    fn enneper_mesh_round_trips_exactly() {
        let m = Triangulation::with_triangle_count(&catalog::enneper().chart, 150).unwrap();
        let text = to_string(&m);
        assert!(text.starts_with("ntri-mesh 1\n"));
        assert_eq!(from_str(&text).unwrap(), m);
        assert_eq!(to_string(&from_str(&text).unwrap()), text);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(matches!(from_str("mesh 2\n0\n0\n0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn truncated_file_is_rejected() {
        assert!(from_str("ntri-mesh 1\n2\n0 0\n").is_err());
    }

    proptest! {
        #[test]
        fn coordinates_round_trip_bitwise(xs in proptest::collection::vec((any::<f64>(), any::<f64>()), 1..20)) {
            let xs: Vec<(f64, f64)> = xs.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
            let mesh = Triangulation {
                vertices: xs.iter().map(|&(a, b)| Point::new(a, b)).collect(),
                triangles: vec![],
                boundary_edges: vec![],
            };
            let back = from_str(&to_string(&mesh)).unwrap();
            for (p, q) in mesh.vertices.iter().zip(&back.vertices) {
                prop_assert_eq!(p.x.to_bits(), q.x.to_bits());
                prop_assert_eq!(p.y.to_bits(), q.y.to_bits());
            }
        }
    }
}

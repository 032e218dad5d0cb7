//! Bowyer–Watson Delaunay triangulation of a point set.

use std::collections::HashMap;

use crate::geometry::domain::orient;
use crate::mesh::edge_key;
use crate::Point;

fn in_circumcircle(a: &Point, b: &Point, c: &Point, p: &Point) -> bool {
    let (ax, ay) = (a.x - p.x, a.y - p.y);
    let (bx, by) = (b.x - p.x, b.y - p.y);
    let (cx, cy) = (c.x - p.x, c.y - p.y);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    det > 0.0
}

/// Counterclockwise Delaunay triangles over `points` (indices into `points`).
pub(crate) fn triangulate(points: &[Point]) -> Vec<[usize; 3]> {
    let n = points.len();
    let mut lo = Point::repeat(f64::INFINITY);
    let mut hi = Point::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let center = (lo + hi) * 0.5;
    let span = (hi - lo).max().max(1e-12) * 100.0;
    let mut pts = points.to_vec();
    pts.push(center + Point::new(-span, -span));
    pts.push(center + Point::new(span, -span));
    pts.push(center + Point::new(0.0, span));

    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    for i in 0..n {
        let p = pts[i];
        let (mut bad, mut good): (Vec<[usize; 3]>, Vec<[usize; 3]>) =
            tris.into_iter().partition(|t| in_circumcircle(&pts[t[0]], &pts[t[1]], &pts[t[2]], &p));
        // near-cocircular points can make the cavity non-star-shaped; shrink it until
        // every boundary edge sees the new point
        loop {
            let mut count: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
            for t in &bad {
                for k in 0..3 {
                    let (a, b) = (t[k], t[(k + 1) % 3]);
                    count.entry(edge_key(a, b)).and_modify(|e| e.2 += 1).or_insert((a, b, 1));
                }
            }
            let mut boundary: Vec<(usize, usize)> =
                count.values().filter(|e| e.2 == 1).map(|e| (e.0, e.1)).collect();
            boundary.sort_unstable();
            let hidden = boundary.iter().find(|&&(a, b)| orient(&pts[a], &pts[b], &p) <= 0.0).copied();
            match hidden {
                Some((a, b)) if bad.len() > 1 => {
                    let k = bad.iter().position(|t| (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b)).unwrap();
                    good.push(bad.swap_remove(k));
                }
                _ => {
                    tris = good;
                    for (a, b) in boundary {
                        if orient(&pts[a], &pts[b], &p) > 0.0 {
                            tris.push([a, b, i]);
                        }
                    }
                    break;
                }
            }
        }
    }
    tris.retain(|t| t.iter().all(|&v| v < n));
    tris
}

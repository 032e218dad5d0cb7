//! Remeshing toward edges of uniform length in a Riemannian metric.
//!
//! Each iteration splits long edges at their Riemannian midpoint, collapses short interior
//! edges, flips edges that improve metric quality and relaxes vertex positions with a
//! length-weighted Laplacian. Vertices on glued sides move in the quotient: a vertex and
//! its partner on the opposite side are split, moved and checked together.

use std::collections::{HashMap, HashSet};

use crate::geometry::domain::orient;
use crate::geometry::{ChartDomain, DomainShape, MetricField};
use crate::mesh::{edge_key, metric_quality, riemannian_edge_length, side, BoundaryEdge, Gluing, Triangulation};
use crate::{Error, Point, Result};

#[derive(Debug, Clone)]
pub struct AdaptOptions {
    /// Desired Riemannian edge length.
    pub target_h: f64,
    pub iterations: usize,
    /// Split edges longer than `split_factor · target_h`.
    pub split_factor: f64,
    /// Collapse edges shorter than `collapse_factor · target_h`.
    pub collapse_factor: f64,
    /// No operation may leave a triangle below this metric quality unless it already was.
    pub quality_floor: f64,
    pub smoothing_sweeps: usize,
    pub relaxation: f64,
}

impl AdaptOptions {
    pub fn new(target_h: f64, iterations: usize) -> Self {
        Self {
            target_h,
            iterations,
            split_factor: 1.4,
            collapse_factor: 0.6,
            quality_floor: 0.1,
            smoothing_sweeps: 3,
            relaxation: 0.5,
        }
    }
}

const SIDE_TOL: f64 = 1e-9;

/// Adapt `mesh` so that its edges have comparable length in `metric`.
///
/// The returned mesh satisfies every [`Triangulation::validate`] invariant, keeps glued
/// vertices glued, and never has a larger max/min Riemannian edge-length ratio than the
/// input (the best iterate is returned).
pub fn adapt(mesh: &Triangulation, metric: &MetricField, domain: &ChartDomain, opts: &AdaptOptions) -> Result<Triangulation> {
    mesh.validate()?;
    if !(opts.target_h > 0.0) {
        return Err(Error::InvalidMesh(format!("target_h must be positive, got {}", opts.target_h)));
    }
    let mut r = Remesher::new(mesh, metric, domain, opts);
    let mut best = mesh.clone();
    let mut best_ratio = mesh.edge_length_ratio(metric);
    for _ in 0..opts.iterations {
        r.split_pass();
        r.collapse_pass();
        r.flip_pass();
        for _ in 0..opts.smoothing_sweeps {
            r.smooth_pass();
        }
        r.flip_pass();
        let current = r.to_mesh();
        current.validate()?;
        let ratio = current.edge_length_ratio(metric);
        if ratio <= best_ratio {
            best_ratio = ratio;
            best = current;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Interior,
    /// On one glued side (not a corner); slides along it together with its partner.
    Glued(usize),
    Fixed,
}

struct Remesher<'a> {
    metric: &'a MetricField,
    domain: &'a ChartDomain,
    opts: &'a AdaptOptions,
    rect: Option<(Point, Point)>,
    gluing: Gluing,
    pts: Vec<Point>,
    tris: Vec<[usize; 3]>,
    /// Boundary edges keyed by sorted pair; value keeps the ccw orientation and tag.
    bnd: HashMap<(usize, usize), BoundaryEdge>,
}

impl<'a> Remesher<'a> {
    fn new(mesh: &Triangulation, metric: &'a MetricField, domain: &'a ChartDomain, opts: &'a AdaptOptions) -> Self {
        let rect = match domain.shape {
            DomainShape::Rectangle { min, max } => Some((min, max)),
            DomainShape::Curved(_) => None,
        };
        let bnd = mesh.boundary_edges.iter().map(|e| (edge_key(e.a, e.b), *e)).collect();
        Self {
            metric,
            domain,
            opts,
            rect,
            gluing: if rect.is_some() { domain.gluing } else { Gluing::None },
            pts: mesh.vertices.clone(),
            tris: mesh.triangles.clone(),
            bnd,
        }
    }

    fn to_mesh(&self) -> Triangulation {
        let mut boundary_edges: Vec<BoundaryEdge> = self.bnd.values().copied().collect();
        boundary_edges.sort_by_key(|e| (e.tag, e.a, e.b));
        Triangulation { vertices: self.pts.clone(), triangles: self.tris.clone(), boundary_edges }
    }

    fn len(&self, a: usize, b: usize) -> f64 {
        riemannian_edge_length(self.metric, &self.pts[a], &self.pts[b])
    }

    fn quality(&self, t: &[usize; 3]) -> f64 {
        metric_quality(self.metric, &self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]])
    }

    fn quality_at(&self, t: &[usize; 3], moved: &HashMap<usize, Point>) -> f64 {
        let p = |v: usize| moved.get(&v).copied().unwrap_or(self.pts[v]);
        metric_quality(self.metric, &p(t[0]), &p(t[1]), &p(t[2]))
    }

    fn sides_of(&self, p: &Point) -> Vec<usize> {
        let Some((lo, hi)) = self.rect else { return vec![] };
        let mut s = Vec::new();
        if (p.y - lo.y).abs() <= SIDE_TOL {
            s.push(side::BOTTOM);
        }
        if (p.x - hi.x).abs() <= SIDE_TOL {
            s.push(side::RIGHT);
        }
        if (p.y - hi.y).abs() <= SIDE_TOL {
            s.push(side::TOP);
        }
        if (p.x - lo.x).abs() <= SIDE_TOL {
            s.push(side::LEFT);
        }
        s
    }

    fn kinds(&self) -> Vec<Kind> {
        let mut on_boundary = vec![false; self.pts.len()];
        for e in self.bnd.values() {
            on_boundary[e.a] = true;
            on_boundary[e.b] = true;
        }
        (0..self.pts.len())
            .map(|v| {
                if !on_boundary[v] {
                    return Kind::Interior;
                }
                let sides = self.sides_of(&self.pts[v]);
                if self.gluing != Gluing::None && sides.len() == 1 {
                    Kind::Glued(sides[0])
                } else {
                    Kind::Fixed
                }
            })
            .collect()
    }

    /// Image of a point on glued side `s` on the opposite side.
    fn map_across(&self, s: usize, p: &Point) -> Point {
        let (lo, hi) = self.rect.expect("gluing needs a rectangle");
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        match (s, self.gluing) {
            (side::LEFT, _) => Point::new(hi.x, p.y),
            (side::RIGHT, _) => Point::new(lo.x, p.y),
            (side::BOTTOM, Gluing::PeriodicBoth) => Point::new(p.x, hi.y),
            (side::TOP, Gluing::PeriodicBoth) => Point::new(p.x, lo.y),
            (side::BOTTOM, Gluing::KleinFlip) => Point::new(lo.x + hi.x - p.x, hi.y),
            (side::TOP, Gluing::KleinFlip) => Point::new(lo.x + hi.x - p.x, lo.y),
            _ => {
                let _ = (w, h);
                unreachable!("side {s} is not glued")
            }
        }
    }

    /// Map a position near the opposite side of `s` into the frame of side `s`.
    fn pull_back(&self, s: usize, q: &Point) -> Point {
        let (lo, hi) = self.rect.expect("gluing needs a rectangle");
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        match (s, self.gluing) {
            (side::LEFT, _) => Point::new(q.x - w, q.y),
            (side::RIGHT, _) => Point::new(q.x + w, q.y),
            (side::BOTTOM, Gluing::PeriodicBoth) => Point::new(q.x, q.y - h),
            (side::TOP, Gluing::PeriodicBoth) => Point::new(q.x, q.y + h),
            (side::BOTTOM, Gluing::KleinFlip) => Point::new(lo.x + hi.x - q.x, q.y - h),
            (side::TOP, Gluing::KleinFlip) => Point::new(lo.x + hi.x - q.x, q.y + h),
            _ => unreachable!("side {s} is not glued"),
        }
    }

    /// Displacement of the partner when a vertex on side `s` moves by `d` (tangential).
    fn map_displacement(&self, s: usize, d: &Point) -> Point {
        match (s, self.gluing) {
            (side::BOTTOM | side::TOP, Gluing::KleinFlip) => Point::new(-d.x, d.y),
            _ => *d,
        }
    }

    fn find_vertex(&self, p: &Point, among: &[usize]) -> Option<usize> {
        among.iter().copied().find(|&v| (self.pts[v] - p).norm() <= 1e-8)
    }

    fn boundary_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.bnd.values().flat_map(|e| [e.a, e.b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn edge_triangles(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in self.tris.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push(t);
            }
        }
        map
    }

    fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut stars = vec![Vec::new(); self.pts.len()];
        for (t, tri) in self.tris.iter().enumerate() {
            for &v in tri {
                stars[v].push(t);
            }
        }
        stars
    }

    fn riemannian_midpoint(&self, a: &Point, b: &Point) -> Point {
        let total = riemannian_edge_length(self.metric, a, b);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if riemannian_edge_length(self.metric, a, &(a + (b - a) * mid)) < 0.5 * total {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        a + (b - a) * (0.5 * (lo + hi))
    }

    /// Replace edge `(a, b)` by `(a, m), (m, b)` in its triangles (`m` already pushed).
    fn split_in_triangles(&mut self, a: usize, b: usize, m: usize, tris: &[usize], locked: &mut HashSet<usize>) {
        for &t in tris {
            let tri = self.tris[t];
            let k = (0..3).find(|&k| edge_key(tri[k], tri[(k + 1) % 3]) == edge_key(a, b)).unwrap();
            let (p, q, r) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            self.tris[t] = [p, m, r];
            self.tris.push([m, q, r]);
            locked.insert(t);
            locked.insert(self.tris.len() - 1);
        }
        if let Some(e) = self.bnd.remove(&edge_key(a, b)) {
            self.bnd.insert(edge_key(e.a, m), BoundaryEdge { a: e.a, b: m, tag: e.tag });
            self.bnd.insert(edge_key(m, e.b), BoundaryEdge { a: m, b: e.b, tag: e.tag });
        }
    }

    fn split_pass(&mut self) {
        let limit = self.opts.split_factor * self.opts.target_h;
        let edges = self.edge_triangles();
        let mut candidates: Vec<((usize, usize), f64)> =
            edges.keys().map(|&(a, b)| ((a, b), self.len(a, b))).filter(|&(_, l)| l > limit).collect();
        candidates.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let boundary = self.boundary_vertices();
        let mut locked: HashSet<usize> = HashSet::new();

        for ((a, b), _) in candidates {
            let tris = &edges[&(a, b)];
            if tris.iter().any(|t| locked.contains(t)) {
                continue;
            }
            let tris = tris.clone();
            let (pa, pb) = (self.pts[a], self.pts[b]);
            let Some(edge) = self.bnd.get(&(a, b)).copied() else {
                let m = self.riemannian_midpoint(&pa, &pb);
                self.pts.push(m);
                let mi = self.pts.len() - 1;
                self.split_in_triangles(a, b, mi, &tris, &mut locked);
                continue;
            };

            let glued = self.gluing != Gluing::None && self.rect.is_some();
            if !glued {
                let mut m = self.riemannian_midpoint(&pa, &pb);
                if let Some(curve) = self.domain.curve(edge.tag) {
                    m = curve.project(&m);
                }
                let tri = self.tris[tris[0]];
                let c = *tri.iter().find(|&&v| v != a && v != b).unwrap();
                let (first, second) = if edge.a == a { (pa, pb) } else { (pb, pa) };
                if orient(&first, &m, &self.pts[c]) <= 0.0 || orient(&m, &second, &self.pts[c]) <= 0.0 {
                    continue;
                }
                self.pts.push(m);
                let mi = self.pts.len() - 1;
                self.split_in_triangles(a, b, mi, &tris, &mut locked);
                continue;
            }

            // glued side: split the partner edge at the mapped point as well
            let s = edge.tag;
            let Some(qa) = self.find_vertex(&self.map_across(s, &pa), &boundary) else { continue };
            let Some(qb) = self.find_vertex(&self.map_across(s, &pb), &boundary) else { continue };
            let Some(partner_tris) = edges.get(&edge_key(qa, qb)) else { continue };
            if partner_tris.iter().any(|t| locked.contains(t)) || !self.bnd.contains_key(&edge_key(qa, qb)) {
                continue;
            }
            let partner_tris = partner_tris.clone();
            let m = self.riemannian_midpoint(&pa, &pb);
            let m = self.snap_to_side(s, m);
            let m_image = self.map_across(s, &m);
            self.pts.push(m);
            let mi = self.pts.len() - 1;
            self.pts.push(m_image);
            let mj = self.pts.len() - 1;
            self.split_in_triangles(a, b, mi, &tris, &mut locked);
            self.split_in_triangles(qa, qb, mj, &partner_tris, &mut locked);
        }
    }

    fn snap_to_side(&self, s: usize, mut p: Point) -> Point {
        let (lo, hi) = self.rect.unwrap();
        match s {
            side::BOTTOM => p.y = lo.y,
            side::TOP => p.y = hi.y,
            side::LEFT => p.x = lo.x,
            side::RIGHT => p.x = hi.x,
            _ => {}
        }
        p
    }

    fn collapse_pass(&mut self) {
        let limit = self.opts.collapse_factor * self.opts.target_h;
        let max_len = self.opts.split_factor * self.opts.target_h;
        let kinds = self.kinds();
        let edges = self.edge_triangles();
        let stars = self.vertex_triangles();
        let mut candidates: Vec<((usize, usize), f64)> = edges
            .iter()
            .filter(|(_, ts)| ts.len() == 2)
            .map(|(&(a, b), _)| ((a, b), self.len(a, b)))
            .filter(|&(_, l)| l < limit)
            .collect();
        candidates.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));

        let mut dirty = vec![false; self.pts.len()];
        let mut dead_tris: HashSet<usize> = HashSet::new();
        let mut dead_verts: HashSet<usize> = HashSet::new();

        for ((a, b), _) in candidates {
            if dirty[a] || dirty[b] {
                continue;
            }
            let mut attempts = Vec::new();
            if kinds[b] == Kind::Interior {
                attempts.push((b, a));
            }
            if kinds[a] == Kind::Interior {
                attempts.push((a, b));
            }
            for (gone, keep) in attempts {
                if let Some(new_tris) = self.try_collapse(gone, keep, &stars, max_len) {
                    for (t, tri) in new_tris {
                        match tri {
                            Some(tri) => self.tris[t] = tri,
                            None => {
                                dead_tris.insert(t);
                            }
                        }
                    }
                    dead_verts.insert(gone);
                    for &t in stars[gone].iter().chain(&stars[keep]) {
                        for &v in &self.tris[t] {
                            dirty[v] = true;
                        }
                    }
                    dirty[gone] = true;
                    dirty[keep] = true;
                    break;
                }
            }
        }
        if dead_verts.is_empty() {
            return;
        }
        self.compact(&dead_tris, &dead_verts);
    }

    /// Triangle updates for collapsing `gone` onto `keep`, if the result stays valid.
    #[allow(clippy::type_complexity)]
    fn try_collapse(&self, gone: usize, keep: usize, stars: &[Vec<usize>], max_len: f64) -> Option<Vec<(usize, Option<[usize; 3]>)>> {
        let neighbors = |v: usize| -> HashSet<usize> {
            stars[v].iter().flat_map(|&t| self.tris[t]).filter(|&w| w != v).collect()
        };
        let (ng, nk) = (neighbors(gone), neighbors(keep));
        let shared: Vec<usize> = ng.intersection(&nk).copied().collect();
        let removed: Vec<usize> = stars[gone].iter().copied().filter(|&t| self.tris[t].contains(&keep)).collect();
        if removed.len() != 2 || shared.len() != 2 {
            return None;
        }
        let target = self.pts[keep];
        let mut updates = Vec::new();
        for &t in &stars[gone] {
            if removed.contains(&t) {
                updates.push((t, None));
                continue;
            }
            let tri = self.tris[t].map(|v| if v == gone { keep } else { v });
            let p = tri.map(|v| if v == keep { target } else { self.pts[v] });
            if orient(&p[0], &p[1], &p[2]) <= 0.0 {
                return None;
            }
            let q_new = metric_quality(self.metric, &p[0], &p[1], &p[2]);
            if q_new < self.opts.quality_floor.min(self.quality(&self.tris[t])) {
                return None;
            }
            for &v in &tri {
                if v != keep && riemannian_edge_length(self.metric, &target, &self.pts[v]) > max_len {
                    return None;
                }
            }
            updates.push((t, Some(tri)));
        }
        Some(updates)
    }

    fn compact(&mut self, dead_tris: &HashSet<usize>, dead_verts: &HashSet<usize>) {
        let mut remap = vec![usize::MAX; self.pts.len()];
        let mut pts = Vec::with_capacity(self.pts.len() - dead_verts.len());
        for (i, p) in self.pts.iter().enumerate() {
            if !dead_verts.contains(&i) {
                remap[i] = pts.len();
                pts.push(*p);
            }
        }
        self.pts = pts;
        self.tris = self
            .tris
            .iter()
            .enumerate()
            .filter(|(t, _)| !dead_tris.contains(t))
            .map(|(_, tri)| tri.map(|v| remap[v]))
            .collect();
        self.bnd = self
            .bnd
            .values()
            .map(|e| {
                let e = BoundaryEdge { a: remap[e.a], b: remap[e.b], tag: e.tag };
                (edge_key(e.a, e.b), e)
            })
            .collect();
    }

    fn flip_pass(&mut self) {
        let edges = self.edge_triangles();
        let mut keys: Vec<(usize, usize)> = edges.iter().filter(|(_, ts)| ts.len() == 2).map(|(k, _)| *k).collect();
        keys.sort_unstable();
        let mut locked: HashSet<usize> = HashSet::new();
        let mut created: HashSet<(usize, usize)> = HashSet::new();
        for (a, b) in keys {
            if self.bnd.contains_key(&(a, b)) {
                continue;
            }
            let ts = &edges[&(a, b)];
            let (t1, t2) = (ts[0], ts[1]);
            if locked.contains(&t1) || locked.contains(&t2) {
                continue;
            }
            let (tri1, tri2) = (self.tris[t1], self.tris[t2]);
            // orient so that tri1 = (p, q, c) traverses p → q
            let k = (0..3).find(|&k| edge_key(tri1[k], tri1[(k + 1) % 3]) == (a, b)).unwrap();
            let (p, q, c) = (tri1[k], tri1[(k + 1) % 3], tri1[(k + 2) % 3]);
            let d = *tri2.iter().find(|&&v| v != p && v != q).unwrap();
            if c == d || edges.contains_key(&edge_key(c, d)) || created.contains(&edge_key(c, d)) {
                continue;
            }
            let new1 = [p, d, c];
            let new2 = [d, q, c];
            let pos = |t: &[usize; 3]| orient(&self.pts[t[0]], &self.pts[t[1]], &self.pts[t[2]]);
            if pos(&new1) <= 0.0 || pos(&new2) <= 0.0 {
                continue;
            }
            let before = self.quality(&tri1).min(self.quality(&tri2));
            let after = self.quality(&new1).min(self.quality(&new2));
            if after > before * (1.0 + 1e-9) + 1e-12 {
                self.tris[t1] = new1;
                self.tris[t2] = new2;
                locked.insert(t1);
                locked.insert(t2);
                created.insert(edge_key(c, d));
            }
        }
    }

    fn smooth_pass(&mut self) {
        let kinds = self.kinds();
        let stars = self.vertex_triangles();
        let boundary = self.boundary_vertices();
        let neighbors: Vec<Vec<usize>> = (0..self.pts.len())
            .map(|v| {
                let mut n: Vec<usize> = stars[v].iter().flat_map(|&t| self.tris[t]).filter(|&w| w != v).collect();
                n.sort_unstable();
                n.dedup();
                n
            })
            .collect();

        for v in 0..self.pts.len() {
            match kinds[v] {
                Kind::Fixed => continue,
                Kind::Interior => {
                    let ring: Vec<Point> = neighbors[v].iter().map(|&w| self.pts[w]).collect();
                    let d = self.relaxation_step(&self.pts[v], &ring);
                    let mut moved = HashMap::new();
                    moved.insert(v, self.pts[v] + d);
                    if self.acceptable(&moved, &[&stars[v]]) {
                        self.pts[v] += d;
                    }
                }
                Kind::Glued(s) => {
                    let Some(partner) = self.find_vertex(&self.map_across(s, &self.pts[v]), &boundary) else {
                        continue;
                    };
                    if kinds[partner] != Kind::Glued(opposite(s)) {
                        continue;
                    }
                    let mut ring: Vec<Point> = neighbors[v].iter().map(|&w| self.pts[w]).collect();
                    for &w in &neighbors[partner] {
                        let q = self.pull_back(s, &self.pts[w]);
                        if ring.iter().all(|r| (r - q).norm() > 1e-8) {
                            ring.push(q);
                        }
                    }
                    let mut d = self.relaxation_step(&self.pts[v], &ring);
                    match s {
                        side::BOTTOM | side::TOP => d.y = 0.0,
                        _ => d.x = 0.0,
                    }
                    let dp = self.map_displacement(s, &d);
                    let mut moved = HashMap::new();
                    moved.insert(v, self.pts[v] + d);
                    moved.insert(partner, self.pts[partner] + dp);
                    if self.acceptable(&moved, &[&stars[v], &stars[partner]]) {
                        self.pts[v] += d;
                        self.pts[partner] += dp;
                    }
                }
            }
        }
    }

    fn relaxation_step(&self, x: &Point, ring: &[Point]) -> Point {
        if ring.is_empty() {
            return Point::zeros();
        }
        let lengths: Vec<f64> = ring.iter().map(|q| riemannian_edge_length(self.metric, x, q)).collect();
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        let mut d = Point::zeros();
        for (q, l) in ring.iter().zip(&lengths) {
            if *l > 0.0 {
                d += (q - x) * (1.0 - mean / l);
            }
        }
        d * (self.opts.relaxation / ring.len() as f64)
    }

    fn acceptable(&self, moved: &HashMap<usize, Point>, stars: &[&Vec<usize>]) -> bool {
        for star in stars {
            for &t in star.iter() {
                let tri = self.tris[t];
                let p = |v: usize| moved.get(&v).copied().unwrap_or(self.pts[v]);
                if orient(&p(tri[0]), &p(tri[1]), &p(tri[2])) <= 0.0 {
                    return false;
                }
                let q_new = self.quality_at(&tri, moved);
                let q_old = self.quality(&tri);
                if q_new < self.opts.quality_floor.min(q_old) {
                    return false;
                }
            }
        }
        true
    }
}

fn opposite(s: usize) -> usize {
    (s + 2) % 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;
    use crate::mesh::{identify, target_spacing};

    fn riemannian_area(metric: &MetricField, mesh: &Triangulation) -> f64 {
        (0..mesh.n_triangles())
            .map(|t| {
                let [a, b, c] = mesh.corners(t);
                mesh.signed_area(t) * metric.density(&((a + b + c) / 3.0)).unwrap()
            })
            .sum()
    }

    #[test]
    fn flat_mesh_is_a_fixed_point() {
        let m = catalog::flat_torus();
        let mesh = Triangulation::structured(&m.chart, 12).unwrap();
        let h = std::f64::consts::TAU / 12.0;
        let out = adapt(&mesh, &m.metric, &m.chart, &AdaptOptions::new(1.2 * h, 4)).unwrap();
        out.validate().unwrap();
        let before = mesh.edge_length_ratio(&m.metric);
        assert!(out.edge_length_ratio(&m.metric) <= before * 1.05);
    }

    #[test]
    fn torus_adaptation_improves_uniformity() {
        let m = catalog::standard_torus();
        let mesh = Triangulation::structured(&m.chart, 20).unwrap();
        let before = mesh.edge_length_ratio(&m.metric);
        let h = target_spacing(riemannian_area(&m.metric, &mesh), 800);
        let out = adapt(&mesh, &m.metric, &m.chart, &AdaptOptions::new(h, 6)).unwrap();
        out.validate().unwrap();
        let after = out.edge_length_ratio(&m.metric);
        assert!(after < before, "{after} vs {before}");
        identify(&out, m.chart.gluing, 1e-8).unwrap();
        assert!(out.min_quality(&m.metric) >= 0.1);
    }

    #[test]
    fn klein_adaptation_keeps_gluing() {
        let m = catalog::klein_bottle();
        let mesh = Triangulation::structured(&m.chart, 16).unwrap();
        let before = mesh.edge_length_ratio(&m.metric);
        let h = target_spacing(riemannian_area(&m.metric, &mesh), 600);
        let out = adapt(&mesh, &m.metric, &m.chart, &AdaptOptions::new(h, 6)).unwrap();
        out.validate().unwrap();
        assert!(out.edge_length_ratio(&m.metric) < before);
        let id = identify(&out, m.chart.gluing, 1e-8).unwrap();
        assert!(id.n_classes < out.n_vertices());
    }

    #[test]
    fn enneper_adaptation_stays_valid() {
        let m = catalog::enneper();
        let mesh = Triangulation::with_triangle_count(&m.chart, 300).unwrap();
        let h = target_spacing(riemannian_area(&m.metric, &mesh), 300);
        let out = adapt(&mesh, &m.metric, &m.chart, &AdaptOptions::new(h, 4)).unwrap();
        out.validate().unwrap();
        assert!(out.edge_length_ratio(&m.metric) <= mesh.edge_length_ratio(&m.metric));
    }
}

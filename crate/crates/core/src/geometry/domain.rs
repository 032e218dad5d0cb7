use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::mesh::Gluing;
use crate::{Error, Point, Result};

/// A parametric boundary arc `t ↦ point`, `t ∈ [t0, t1]`.
#[derive(Clone)]
pub struct BoundaryCurve {
    pub tag: usize,
    pub t0: f64,
    pub t1: f64,
    f: Arc<dyn Fn(f64) -> Point + Send + Sync>,
}

impl fmt::Debug for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryCurve(tag {}, [{}, {}])", self.tag, self.t0, self.t1)
    }
}

impl BoundaryCurve {
    pub fn new(tag: usize, t0: f64, t1: f64, f: impl Fn(f64) -> Point + Send + Sync + 'static) -> Self {
        Self { tag, t0, t1, f: Arc::new(f) }
    }

    pub fn eval(&self, t: f64) -> Point {
        (self.f)(t)
    }

    pub fn start(&self) -> Point {
        self.eval(self.t0)
    }

    pub fn end(&self) -> Point {
        self.eval(self.t1)
    }

    /// Arclength by dense polygonal sampling.
    pub fn length(&self) -> f64 {
        let n = 2048;
        (0..n)
            .map(|i| {
                let a = self.param(i as f64 / n as f64);
                let b = self.param((i + 1) as f64 / n as f64);
                (self.eval(b) - self.eval(a)).norm()
            })
            .sum()
    }

    fn param(&self, s: f64) -> f64 {
        self.t0 + s * (self.t1 - self.t0)
    }

    /// `n + 1` points at (approximately) equal arclength spacing, endpoints included.
    pub fn resample(&self, n: usize) -> Vec<Point> {
        let fine = 4096;
        let mut cumulative = Vec::with_capacity(fine + 1);
        cumulative.push(0.0);
        let mut prev = self.start();
        for i in 1..=fine {
            let p = self.eval(self.param(i as f64 / fine as f64));
            let last = *cumulative.last().unwrap();
            cumulative.push(last + (p - prev).norm());
            prev = p;
        }
        let total = *cumulative.last().unwrap();
        let mut out = Vec::with_capacity(n + 1);
        let mut seg = 0;
        for k in 0..=n {
            let target = total * k as f64 / n as f64;
            while seg + 1 < fine && cumulative[seg + 1] < target {
                seg += 1;
            }
            let span = cumulative[seg + 1] - cumulative[seg];
            let frac = if span > 0.0 { ((target - cumulative[seg]) / span).clamp(0.0, 1.0) } else { 0.0 };
            let s = (seg as f64 + frac) / fine as f64;
            out.push(self.eval(self.param(s)));
        }
        out[0] = self.start();
        out[n] = self.end();
        out
    }

    /// Orthogonal projection of `p` onto the arc (closest sampled parameter, then refined).
    pub fn project(&self, p: &Point) -> Point {
        let n = 512;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=n {
            let t = self.param(i as f64 / n as f64);
            let d = (self.eval(t) - p).norm_squared();
            if d < best.0 {
                best = (d, t);
            }
        }
        let (mut lo, mut hi) = (
            (best.1 - (self.t1 - self.t0) / n as f64).max(self.t0.min(self.t1)),
            (best.1 + (self.t1 - self.t0) / n as f64).min(self.t1.max(self.t0)),
        );
        // golden section on the bracket
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if (self.eval(a) - p).norm_squared() < (self.eval(b) - p).norm_squared() {
                hi = b;
            } else {
                lo = a;
            }
        }
        self.eval(0.5 * (lo + hi))
    }
}

#[derive(Debug, Clone)]
pub enum DomainShape {
    Rectangle { min: Point, max: Point },
    /// Closed loop of arcs, traversed counterclockwise.
    Curved(Vec<BoundaryCurve>),
}

/// Parameter domain of a single chart together with its boundary identification.
#[derive(Debug, Clone)]
pub struct ChartDomain {
    pub shape: DomainShape,
    pub gluing: Gluing,
}

impl ChartDomain {
    pub fn rectangle(min: Point, max: Point, gluing: Gluing) -> Self {
        Self { shape: DomainShape::Rectangle { min, max }, gluing }
    }

    /// The square `[0, 2π]²`.
    pub fn periodic_square(gluing: Gluing) -> Self {
        let tau = std::f64::consts::TAU;
        Self::rectangle(Point::zeros(), Point::new(tau, tau), gluing)
    }

    pub fn curved(curves: Vec<BoundaryCurve>) -> Result<Self> {
        let d = Self { shape: DomainShape::Curved(curves), gluing: Gluing::None };
        d.validate()?;
        Ok(d)
    }

    /// Boundary polygon with `per_curve` segments on every arc (rectangle: its corners).
    pub fn polygon(&self, per_curve: usize) -> Vec<Point> {
        match &self.shape {
            DomainShape::Rectangle { min, max } => {
                vec![*min, Point::new(max.x, min.y), *max, Point::new(min.x, max.y)]
            }
            DomainShape::Curved(curves) => {
                let mut pts = Vec::new();
                for c in curves {
                    let s = c.resample(per_curve);
                    pts.extend_from_slice(&s[..per_curve]);
                }
                pts
            }
        }
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.polygon(1024))
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let poly = self.polygon(256);
        let mut lo = Point::repeat(f64::INFINITY);
        let mut hi = Point::repeat(f64::NEG_INFINITY);
        for p in &poly {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match &self.shape {
            DomainShape::Rectangle { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
            DomainShape::Curved(_) => point_in_polygon(p, &self.polygon(256)),
        }
    }

    /// Uniform random point at least `margin` (relative to the bounding box) away from the
    /// boundary polygon.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R, margin: f64) -> Point {
        let (lo, hi) = self.bounding_box();
        let poly = self.polygon(256);
        let scale = (hi - lo).norm();
        loop {
            let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if point_in_polygon(&p, &poly) && distance_to_polygon(&p, &poly) >= margin * scale {
                return p;
            }
        }
    }

    /// Closed loop without self-intersections (checked on a polygonal approximation).
    pub fn validate(&self) -> Result<()> {
        match &self.shape {
            DomainShape::Rectangle { min, max } => {
                if !(max.x > min.x && max.y > min.y) {
                    return Err(Error::DegenerateDomain(format!("empty rectangle {min:?}..{max:?}")));
                }
            }
            DomainShape::Curved(curves) => {
                if curves.is_empty() {
                    return Err(Error::DegenerateDomain("no boundary curves".into()));
                }
                for (i, c) in curves.iter().enumerate() {
                    let next = &curves[(i + 1) % curves.len()];
                    let gap = (c.end() - next.start()).norm();
                    if gap > 1e-9 {
                        return Err(Error::DegenerateDomain(format!(
                            "boundary arc {} does not connect to arc {} (gap {gap:e})",
                            c.tag, next.tag
                        )));
                    }
                }
                let poly = self.polygon(64);
                if polygon_area(&poly) <= 0.0 {
                    return Err(Error::DegenerateDomain("boundary is not counterclockwise".into()));
                }
                let n = poly.len();
                for i in 0..n {
                    for j in i + 2..n {
                        if i == 0 && j == n - 1 {
                            continue;
                        }
                        if segments_cross(&poly[i], &poly[(i + 1) % n], &poly[j], &poly[(j + 1) % n]) {
                            return Err(Error::DegenerateDomain(format!(
                                "boundary self-intersects near ({}, {})",
                                poly[i].x, poly[i].y
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn curve(&self, tag: usize) -> Option<&BoundaryCurve> {
        match &self.shape {
            DomainShape::Curved(curves) => curves.iter().find(|c| c.tag == tag),
            DomainShape::Rectangle { .. } => None,
        }
    }
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n).map(|i| cross(&poly[i], &poly[(i + 1) % n])).sum::<f64>()
}

#[inline]
pub(crate) fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

#[inline]
pub(crate) fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(&(b - a), &(c - a))
}

fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

pub fn point_in_polygon(p: &Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

pub fn distance_to_polygon(p: &Point, poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (&poly[i], &poly[(i + 1) % n]);
            let ab = b - a;
            let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            (a + ab * t - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    #[test]
    fn enneper_domain_is_a_valid_closed_loop() {
        let m = catalog::enneper();
        m.chart.validate().unwrap();
        assert!(m.chart.contains(&Point::zeros()));
        assert!(!m.chart.contains(&Point::new(0.9, 0.9)));
    }

    #[test]
    fn broken_loop_is_rejected() {
        let a = BoundaryCurve::new(0, 0.0, 1.0, |t| Point::new(t, 0.0));
        let b = BoundaryCurve::new(1, 0.0, 1.0, |t| Point::new(1.0 - t, 0.5));
        assert!(ChartDomain::curved(vec![a, b]).is_err());
    }

    #[test]
    fn resample_hits_endpoints() {
        let c = BoundaryCurve::new(0, 0.0, std::f64::consts::PI, |t| Point::new(t.cos(), t.sin()));
        let pts = c.resample(10);
        assert_eq!(pts.len(), 11);
        assert!((pts[10] - Point::new(-1.0, 0.0)).norm() < 1e-15);
        let gaps: Vec<f64> = pts.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let (lo, hi) = gaps.iter().fold((f64::MAX, 0.0f64), |(l, h), &g| (l.min(g), h.max(g)));
        assert!(hi / lo < 1.001);
    }
}

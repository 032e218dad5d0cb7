//! Surfaces with known Killing and conformal Killing fields.

use std::fmt;
use std::sync::Arc;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::geometry::domain::{BoundaryCurve, ChartDomain};
use crate::geometry::metric::MetricField;
use crate::mesh::Gluing;
use crate::{Error, Mat2, Point, Result};

type VecFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
type JacFn = Arc<dyn Fn(&Point) -> Mat2 + Send + Sync>;

/// Vector field in chart coordinates with its Jacobian `du[(k, j)] = ∂_j u^k`.
#[derive(Clone)]
pub struct AnalyticVectorField {
    pub name: String,
    u: VecFn,
    du: JacFn,
}

impl fmt::Debug for AnalyticVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticVectorField({})", self.name)
    }
}

impl AnalyticVectorField {
    pub fn new(
        name: impl Into<String>,
        u: impl Fn(&Point) -> Point + Send + Sync + 'static,
        du: impl Fn(&Point) -> Mat2 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), u: Arc::new(u), du: Arc::new(du) }
    }

    pub fn constant(name: impl Into<String>, value: Point) -> Self {
        Self::new(name, move |_| value, |_| Mat2::zeros())
    }

    pub fn value(&self, x: &Point) -> Point {
        (self.u)(x)
    }

    pub fn jacobian(&self, x: &Point) -> Mat2 {
        (self.du)(x)
    }
}

/// A chart, its metric and the analytic fields known on it.
#[derive(Debug, Clone)]
pub struct Manifold {
    pub name: String,
    pub chart: ChartDomain,
    pub metric: MetricField,
    pub known_killing: Vec<AnalyticVectorField>,
    /// Conformal Killing fields that are not Killing.
    pub known_conformal_killing: Vec<AnalyticVectorField>,
}

pub const NAMES: [&str; 4] = ["enneper", "flat_torus", "standard_torus", "klein_bottle"];

pub fn by_name(name: &str) -> Result<Manifold> {
    match name {
        "enneper" => Ok(enneper()),
        "flat_torus" => Ok(flat_torus()),
        "standard_torus" => Ok(standard_torus()),
        "klein_bottle" => Ok(klein_bottle()),
        other => Err(Error::Config(format!(
            "unknown manifold {other:?}; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

/// Enneper's minimal surface in isothermal coordinates, `g = (1 + |x|²)² I`, on the
/// six-arc domain bounded by two half-ellipses, two unit-circle quarters and two segments.
pub fn enneper() -> Manifold {
    let metric = MetricField::new(
        |x| {
            let w = 1.0 + x.norm_squared();
            Mat2::identity() * (w * w)
        },
        |x| {
            let w = 1.0 + x.norm_squared();
            [Mat2::identity() * (4.0 * w * x.x), Mat2::identity() * (4.0 * w * x.y)]
        },
    )
    .with_d2g(|x| {
        let w = 1.0 + x.norm_squared();
        let mut out = [[Mat2::zeros(); 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                let delta = if k == l { 4.0 * w } else { 0.0 };
                out[k][l] = Mat2::identity() * (8.0 * x[k] * x[l] + delta);
            }
        }
        out
    })
    .with_curvature(|x| -4.0 / (1.0 + x.norm_squared()).powi(4));

    let curves = vec![
        BoundaryCurve::new(1, 0.0, FRAC_PI_2, |t| Point::new(0.5 * (t.cos() + 1.0), t.sin())),
        BoundaryCurve::new(2, 0.0, 0.5, |t| Point::new(0.5 - t, 1.0)),
        BoundaryCurve::new(3, FRAC_PI_2, PI, |t| Point::new(t.cos(), t.sin())),
        BoundaryCurve::new(4, 0.0, FRAC_PI_2, |t| Point::new(-0.5 * (t.cos() + 1.0), -t.sin())),
        BoundaryCurve::new(5, -0.5, 0.0, |t| Point::new(t, -1.0)),
        BoundaryCurve::new(6, 1.5 * PI, TAU, |t| Point::new(t.cos(), t.sin())),
    ];
    let chart = ChartDomain::curved(curves).expect("Enneper boundary is a closed loop");

    Manifold {
        name: "enneper".into(),
        chart,
        metric,
        known_killing: vec![AnalyticVectorField::new(
            "rotation",
            |x| Point::new(-x.y, x.x),
            |_| Mat2::new(0.0, -1.0, 1.0, 0.0),
        )],
        known_conformal_killing: vec![],
    }
}

pub fn flat_torus() -> Manifold {
    Manifold {
        name: "flat_torus".into(),
        chart: ChartDomain::periodic_square(Gluing::PeriodicBoth),
        metric: MetricField::euclidean(),
        known_killing: vec![
            AnalyticVectorField::constant("translation_x1", Point::new(1.0, 0.0)),
            AnalyticVectorField::constant("translation_x2", Point::new(0.0, 1.0)),
        ],
        known_conformal_killing: vec![],
    }
}

/// Torus of revolution with profile `(2 + cos x1, sin x1)`.
pub fn standard_torus() -> Manifold {
    let metric = MetricField::diagonal_in_x1(
        |_| [1.0, 0.0, 0.0],
        |t| {
            let (s, c) = t.sin_cos();
            let f = 2.0 + c;
            [f * f, -2.0 * f * s, 2.0 * s * s - 2.0 * f * c]
        },
    )
    .with_curvature(|x| {
        let c = x.x.cos();
        c / (2.0 + c)
    });
    Manifold {
        name: "standard_torus".into(),
        chart: ChartDomain::periodic_square(Gluing::PeriodicBoth),
        metric,
        known_killing: vec![AnalyticVectorField::constant("rotation", Point::new(0.0, 1.0))],
        known_conformal_killing: vec![AnalyticVectorField::new(
            "rotated_rotation",
            |x| Point::new(2.0 + x.x.cos(), 0.0),
            |x| Mat2::new(-x.x.sin(), 0.0, 0.0, 0.0),
        )],
    }
}

// a(x1) = 3 cos² x1 + 16 cos x1 + 17 and its first two derivatives.
fn klein_a(t: f64) -> [f64; 3] {
    let (s, c) = t.sin_cos();
    [3.0 * c * c + 16.0 * c + 17.0, -s * (6.0 * c + 16.0), 6.0 * s * s - 6.0 * c * c - 16.0 * c]
}

/// Klein bottle with the metric induced by its standard embedding in R⁴.
pub fn klein_bottle() -> Manifold {
    let metric = MetricField::diagonal_in_x1(
        |_| [1.0, 0.0, 0.0],
        |t| {
            let a = klein_a(t);
            [0.25 * a[0], 0.25 * a[1], 0.25 * a[2]]
        },
    )
    .with_curvature(|x| {
        // g = dx1² + f² dx2² with f = √a / 2 gives κ = −f''/f
        let [a, da, d2a] = klein_a(x.x);
        -d2a / (2.0 * a) + da * da / (4.0 * a * a)
    });
    Manifold {
        name: "klein_bottle".into(),
        chart: ChartDomain::periodic_square(Gluing::KleinFlip),
        metric,
        known_killing: vec![AnalyticVectorField::constant("rotation", Point::new(0.0, 1.0))],
        known_conformal_killing: vec![AnalyticVectorField::new(
            "rotated_rotation",
            |x| Point::new(-0.5 * klein_a(x.x)[0].sqrt(), 0.0),
            |x| {
                let [a, da, _] = klein_a(x.x);
                Mat2::new(-da / (4.0 * a.sqrt()), 0.0, 0.0, 0.0)
            },
        )],
    }
}

/// Profile curve `x1 ↦ (c1, c2)` with first and second derivatives.
#[derive(Clone)]
pub struct Profile {
    pub c1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub c2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub dc1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub dc2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2c1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2c2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// Surface of revolution `(c1 cos x2, c1 sin x2, c2)` over `[0, 2π]²`, periodic in both
/// directions (closed profile). Second partials of the metric are taken by differences.
pub fn surface_of_revolution(profile: Profile) -> Result<Manifold> {
    for i in 0..=256 {
        let t = TAU * i as f64 / 256.0;
        let speed = (profile.dc1)(t).powi(2) + (profile.dc2)(t).powi(2);
        if !(speed > 0.0) {
            return Err(Error::InvalidProfile(format!("|c'|² = {speed} at x1 = {t}")));
        }
        if !((profile.c1)(t) > 0.0) {
            return Err(Error::InvalidProfile(format!("c1 = {} ≤ 0 at x1 = {t}", (profile.c1)(t))));
        }
    }
    let p = profile.clone();
    let q = profile.clone();
    let metric = MetricField::new(
        move |x| {
            let t = x.x;
            Mat2::new((p.dc1)(t).powi(2) + (p.dc2)(t).powi(2), 0.0, 0.0, (p.c1)(t).powi(2))
        },
        move |x| {
            let t = x.x;
            let e = 2.0 * ((q.dc1)(t) * (q.d2c1)(t) + (q.dc2)(t) * (q.d2c2)(t));
            let g = 2.0 * (q.c1)(t) * (q.dc1)(t);
            [Mat2::new(e, 0.0, 0.0, g), Mat2::zeros()]
        },
    );
    let r = profile.clone();
    let rotated = AnalyticVectorField::new(
        "rotated_rotation",
        {
            let r = r.clone();
            move |x| {
                let speed = ((r.dc1)(x.x).powi(2) + (r.dc2)(x.x).powi(2)).sqrt();
                Point::new((r.c1)(x.x) / speed, 0.0)
            }
        },
        move |x| {
            let t = x.x;
            let (dc1, dc2) = ((r.dc1)(t), (r.dc2)(t));
            let speed = (dc1 * dc1 + dc2 * dc2).sqrt();
            let dot = dc1 * (r.d2c1)(t) + dc2 * (r.d2c2)(t);
            Mat2::new(dc1 / speed - (r.c1)(t) * dot / speed.powi(3), 0.0, 0.0, 0.0)
        },
    );
    Ok(Manifold {
        name: "surface_of_revolution".into(),
        chart: ChartDomain::periodic_square(Gluing::PeriodicBoth),
        metric,
        known_killing: vec![AnalyticVectorField::constant("rotation", Point::new(0.0, 1.0))],
        known_conformal_killing: vec![rotated],
    })
}

/// Torus metric with a non-rotational perturbation, `diag(1, (2 + cos x1 + ε cos x2)²)`.
/// Has no Killing fields for `ε ≠ 0`.
pub fn perturbed_torus(eps: f64) -> Manifold {
    let metric = MetricField::new(
        move |x| {
            let f = 2.0 + x.x.cos() + eps * x.y.cos();
            Mat2::new(1.0, 0.0, 0.0, f * f)
        },
        move |x| {
            let f = 2.0 + x.x.cos() + eps * x.y.cos();
            let (f1, f2) = (-x.x.sin(), -eps * x.y.sin());
            [Mat2::new(0.0, 0.0, 0.0, 2.0 * f * f1), Mat2::new(0.0, 0.0, 0.0, 2.0 * f * f2)]
        },
    )
    .with_d2g(move |x| {
        let f = 2.0 + x.x.cos() + eps * x.y.cos();
        let (f1, f2) = (-x.x.sin(), -eps * x.y.sin());
        let (f11, f22) = (-x.x.cos(), -eps * x.y.cos());
        let entry = |v: f64| Mat2::new(0.0, 0.0, 0.0, v);
        [
            [entry(2.0 * (f1 * f1 + f * f11)), entry(2.0 * f1 * f2)],
            [entry(2.0 * f1 * f2), entry(2.0 * (f2 * f2 + f * f22))],
        ]
    });
    Manifold {
        name: "perturbed_torus".into(),
        chart: ChartDomain::periodic_square(Gluing::PeriodicBoth),
        metric,
        known_killing: vec![],
        known_conformal_killing: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::differential::{c_operator, gaussian_curvature, rotate_k, s_operator};
    use rand::SeedableRng;

    fn all() -> Vec<Manifold> {
        vec![enneper(), flat_torus(), standard_torus(), klein_bottle()]
    }

    fn samples(m: &Manifold, n: usize) -> Vec<Point> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        (0..n).map(|_| m.chart.sample_interior(&mut rng, 1e-3)).collect()
    }

    #[test]
    fn catalog_metric_values() {
        let g = standard_torus().metric.g(&Point::new(0.0, 1.0));
        assert_eq!(g, Mat2::new(1.0, 0.0, 0.0, 9.0));
        let g = klein_bottle().metric.g(&Point::new(0.0, 2.0));
        assert_eq!(g, Mat2::new(1.0, 0.0, 0.0, 9.0));
        assert_eq!(enneper().metric.g(&Point::zeros()), Mat2::identity());
    }

    #[test]
    fn names_resolve() {
        for name in NAMES {
            assert_eq!(by_name(name).unwrap().name, name);
        }
        assert!(matches!(by_name("sphere"), Err(Error::Config(_))));
    }

    #[test]
    fn known_fields_satisfy_their_equations() {
        for m in all() {
            for x in samples(&m, 1000) {
                for f in &m.known_killing {
                    let s = s_operator(&m.metric, &x, &f.value(&x), &f.jacobian(&x)).unwrap();
                    assert!(s.abs().max() <= 1e-10, "{} {}", m.name, f.name);
                }
                for f in &m.known_conformal_killing {
                    let c = c_operator(&m.metric, &x, &f.value(&x), &f.jacobian(&x)).unwrap();
                    assert!(c.abs().max() <= 1e-10, "{} {}", m.name, f.name);
                }
            }
        }
    }

    #[test]
    fn christoffel_symmetry_on_catalog() {
        for m in all() {
            for x in samples(&m, 1000) {
                let g = crate::geometry::christoffel(&m.metric, &x).unwrap();
                for k in 0..2 {
                    assert!((g.get(k, 0, 1) - g.get(k, 1, 0)).abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn rotated_killing_fields_are_conformal() {
        let h = 1e-5;
        for m in all() {
            for f in &m.known_killing {
                for x in samples(&m, 200) {
                    let v = rotate_k(&m.metric, &x, &f.value(&x)).unwrap();
                    let mut dv = Mat2::zeros();
                    for j in 0..2 {
                        let mut e = Point::zeros();
                        e[j] = h;
                        let plus = rotate_k(&m.metric, &(x + e), &f.value(&(x + e))).unwrap();
                        let minus = rotate_k(&m.metric, &(x - e), &f.value(&(x - e))).unwrap();
                        dv.set_column(j, &((plus - minus) / (2.0 * h)));
                    }
                    let c = c_operator(&m.metric, &x, &v, &dv).unwrap();
                    assert!(c.abs().max() <= 1e-8, "{} {} {}", m.name, f.name, c.abs().max());
                }
            }
        }
    }

    #[test]
    fn enneper_curvature_matches_closed_form() {
        let m = enneper();
        for x in samples(&m, 1000) {
            let brioschi = gaussian_curvature(&m.metric, &x).unwrap();
            let exact = -4.0 / (1.0 + x.norm_squared()).powi(4);
            assert!((brioschi - exact).abs() <= 1e-8);
        }
    }

    #[test]
    fn closed_form_curvatures_agree_with_brioschi() {
        for m in [standard_torus(), klein_bottle()] {
            for x in samples(&m, 200) {
                let a = gaussian_curvature(&m.metric, &x).unwrap();
                let b = m.metric.closed_form_curvature(&x).unwrap();
                assert!((a - b).abs() < 1e-12, "{}", m.name);
            }
        }
    }

    #[test]
    fn enneper_isothermal_killing_system() {
        // u¹λ₁ + u²λ₂ + 2u²₂ = 0, u¹₂ + u²₁ = 0, u¹₁ − u²₂ = 0 with λ = 2 ln(1 + |x|²)
        let m = enneper();
        let f = &m.known_killing[0];
        for x in samples(&m, 1000) {
            let u = f.value(&x);
            let du = f.jacobian(&x);
            let w = 1.0 + x.norm_squared();
            let (l1, l2) = (4.0 * x.x / w, 4.0 * x.y / w);
            assert!((u.x * l1 + u.y * l2 + 2.0 * du[(1, 1)]).abs() <= 1e-10);
            assert!((du[(0, 1)] + du[(1, 0)]).abs() <= 1e-10);
            assert!((du[(0, 0)] - du[(1, 1)]).abs() <= 1e-10);
        }
    }

    #[test]
    fn torus_as_surface_of_revolution() {
        let p = Profile {
            c1: Arc::new(|t: f64| 2.0 + t.cos()),
            c2: Arc::new(|t: f64| t.sin()),
            dc1: Arc::new(|t: f64| -t.sin()),
            dc2: Arc::new(|t: f64| t.cos()),
            d2c1: Arc::new(|t: f64| -t.cos()),
            d2c2: Arc::new(|t: f64| -t.sin()),
        };
        let rev = surface_of_revolution(p).unwrap();
        let torus = standard_torus();
        for x in samples(&rev, 50) {
            assert!((rev.metric.g(&x) - torus.metric.g(&x)).abs().max() < 1e-14);
            let k = gaussian_curvature(&rev.metric, &x).unwrap();
            assert!((k - torus.metric.closed_form_curvature(&x).unwrap()).abs() < 1e-8);
            let v = &rev.known_conformal_killing[0];
            let c = c_operator(&rev.metric, &x, &v.value(&x), &v.jacobian(&x)).unwrap();
            assert!(c.abs().max() < 1e-12);
        }
    }

    #[test]
    fn degenerate_profile_is_rejected() {
        let p = Profile {
            c1: Arc::new(|t: f64| t.cos()),
            c2: Arc::new(|t: f64| t.sin()),
            dc1: Arc::new(|t: f64| -t.sin()),
            dc2: Arc::new(|t: f64| t.cos()),
            d2c1: Arc::new(|t: f64| -t.cos()),
            d2c2: Arc::new(|t: f64| -t.sin()),
        };
        assert!(matches!(surface_of_revolution(p), Err(Error::InvalidProfile(_))));
    }
}

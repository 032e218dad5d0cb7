//! The full pipeline for one manifold and resolution: mesh, optional adaptation,
//! assembly, eigensolve and error analysis.

use serde::{Deserialize, Serialize};

use crate::analysis::{ricci_identity_residual, subspace_error, ConvergenceRow, Norm, VectorField};
use crate::eigen::{solve_smallest, zero_eigenspace, SolverConfig, Spectrum, ZeroEigenspace};
use crate::fem::{assemble, DiscreteField, ElementOrder, FeSpace, Problem, System};
use crate::geometry::{AnalyticVectorField, Manifold};
use crate::mesh::{adapt, target_spacing, AdaptOptions, Triangulation};
use crate::Result;

/// Tolerance for matching glued vertices.
pub const GLUING_TOL: f64 = 1e-8;

/// Relative triangle-count mismatch accepted between adapted and unadapted meshes.
const MATCH_TOL: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// Structured `n × n` grid (or spacing `1/n` of the chart extent on curved charts).
    Grid(usize),
    /// Roughly this many triangles.
    Triangles(usize),
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub manifold: Manifold,
    pub problem: Problem,
    pub element: ElementOrder,
    pub resolution: Resolution,
    pub adapt: bool,
    pub adapt_iterations: usize,
    pub solver: SolverConfig,
    pub gap_factor: f64,
}

impl Experiment {
    pub fn new(manifold: Manifold, problem: Problem, element: ElementOrder, resolution: Resolution) -> Self {
        Self {
            manifold,
            problem,
            element,
            resolution,
            adapt: false,
            adapt_iterations: 6,
            solver: SolverConfig::default(),
            gap_factor: 1e3,
        }
    }

    pub fn adapted(mut self, on: bool) -> Self {
        self.adapt = on;
        self
    }

    /// Analytic fields spanning the expected zero eigenspace.
    pub fn exact_fields(&self) -> Vec<&AnalyticVectorField> {
        let mut out: Vec<&AnalyticVectorField> = self.manifold.known_killing.iter().collect();
        if self.problem == Problem::Conformal {
            out.extend(&self.manifold.known_conformal_killing);
        }
        out
    }

    pub fn mesh(&self) -> Result<Triangulation> {
        let chart = &self.manifold.chart;
        let mesh = match self.resolution {
            Resolution::Grid(n) => Triangulation::structured(chart, n)?,
            Resolution::Triangles(count) => Triangulation::with_triangle_count(chart, count)?,
        };
        if !self.adapt {
            return Ok(mesh);
        }
        // rescale the target length until the adapted mesh matches the unadapted size
        let target = mesh.n_triangles();
        let miss = |m: &Triangulation| (m.n_triangles() as f64 / target as f64 - 1.0).abs();
        let mut h = target_spacing(mesh.riemannian_area(&self.manifold.metric)?, target);
        let mut best: Option<Triangulation> = None;
        for _ in 0..4 {
            let out = adapt(&mesh, &self.manifold.metric, chart, &AdaptOptions::new(h, self.adapt_iterations))?;
            h *= (out.n_triangles() as f64 / target as f64).sqrt();
            if best.as_ref().is_none_or(|b| miss(&out) < miss(b)) {
                best = Some(out);
            }
            if best.as_ref().is_some_and(|b| miss(b) < MATCH_TOL) {
                break;
            }
        }
        Ok(best.unwrap())
    }

    pub fn run(&self) -> Result<Run> {
        let mesh = self.mesh()?;
        self.run_on(&mesh)
    }

    pub fn run_on(&self, mesh: &Triangulation) -> Result<Run> {
        let metric = &self.manifold.metric;
        let space = FeSpace::new(mesh, self.element, self.manifold.chart.gluing, GLUING_TOL)?;
        let system = assemble(&space, metric, self.problem)?;
        let spectrum = solve_smallest(&system.stiffness, &system.mass, &self.solver)?;
        let zero = zero_eigenspace(&spectrum, self.gap_factor);

        let exact = self.exact_fields();
        let modes: Vec<DiscreteField> = spectrum
            .eigenvectors
            .iter()
            .take(exact.len())
            .map(|v| DiscreteField::new(&space, v.clone()))
            .collect::<Result<_>>()?;
        let computed: Vec<&dyn VectorField> = modes.iter().map(|f| f as &dyn VectorField).collect();
        let exact_dyn: Vec<&dyn VectorField> = exact.iter().map(|f| *f as &dyn VectorField).collect();
        let mut errors = Vec::with_capacity(exact.len());
        if !exact.is_empty() && computed.len() == exact.len() {
            let l2 = subspace_error(&computed, &exact_dyn, mesh, metric, Norm::L2)?;
            let h1 = subspace_error(&computed, &exact_dyn, mesh, metric, Norm::H1)?;
            for (i, f) in exact.iter().enumerate() {
                errors.push(FieldError {
                    name: f.name.clone(),
                    eigenvalue: spectrum.eigenvalues[i].abs(),
                    l2_rel: l2[i],
                    h1_rel: h1[i],
                });
            }
        }
        let ricci = modes
            .iter()
            .map(|f| ricci_identity_residual(f, mesh, metric, self.problem))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Run {
            h: mesh.max_edge_length(metric),
            ntri: mesh.n_triangles(),
            edge_ratio: mesh.edge_length_ratio(metric),
            system,
            spectrum,
            zero,
            errors,
            ricci,
            space,
        })
    }
}

/// Errors of one analytic field against the span of the computed low modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub name: String,
    /// `|λ_i|`, the `i`-th smallest eigenvalue for the `i`-th exact field.
    pub eigenvalue: f64,
    pub l2_rel: f64,
    pub h1_rel: f64,
}

#[derive(Debug)]
pub struct Run {
    pub space: FeSpace,
    pub system: System,
    pub spectrum: Spectrum,
    pub zero: ZeroEigenspace,
    /// One entry per exact field, measured against the span of the first modes.
    pub errors: Vec<FieldError>,
    /// Integral identity residual of each of those modes.
    pub ricci: Vec<f64>,
    /// Maximum Riemannian edge length.
    pub h: f64,
    pub ntri: usize,
    pub edge_ratio: f64,
}

impl Run {
    pub fn mesh(&self) -> &Triangulation {
        &self.space.mesh
    }

    pub fn mode(&self, i: usize) -> DiscreteField<'_> {
        DiscreteField { space: &self.space, values: self.spectrum.eigenvectors[i].clone() }
    }

    pub fn zero_modes(&self) -> Vec<DiscreteField<'_>> {
        self.zero.indices.iter().map(|&i| self.mode(i)).collect()
    }

    /// Convergence row for error entry `i`.
    pub fn row(&self, i: usize) -> Option<ConvergenceRow> {
        self.errors.get(i).map(|e| ConvergenceRow {
            h: self.h,
            ntri: self.ntri,
            eigenvalue: e.eigenvalue,
            l2_rel: e.l2_rel,
            h1_rel: e.h1_rel,
        })
    }
}

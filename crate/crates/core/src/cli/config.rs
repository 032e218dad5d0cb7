use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::{Experiment, Resolution};
use crate::eigen::SolverConfig;
use crate::fem::{ElementOrder, Problem};
use crate::geometry::catalog;
use crate::mesh::Triangulation;
use crate::{Error, Result};

/// Everything one run needs. Read from JSON; command-line flags override fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// One of the catalog names.
    pub manifold: String,
    pub problem: Problem,
    pub element: ElementOrder,
    /// Grid subdivisions per chart side. Exclusive with `target_h`.
    pub n: Option<usize>,
    /// Desired Riemannian edge length.
    pub target_h: Option<f64>,
    pub adapt: bool,
    pub adapt_iterations: usize,
    pub eigen: SolverConfig,
    /// Ratio that separates the zero cluster from the rest of the spectrum.
    pub gap_factor: f64,
    /// Grid sizes for a convergence study.
    pub resolutions: Vec<usize>,
    pub outputs: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            manifold: "standard_torus".into(),
            problem: Problem::Killing,
            element: ElementOrder::P2,
            n: None,
            target_h: None,
            adapt: false,
            adapt_iterations: 6,
            eigen: SolverConfig::default(),
            gap_factor: 1e3,
            resolutions: Vec::new(),
            outputs: PathBuf::from("out"),
        }
    }
}

pub const DEFAULT_N: usize = 16;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        catalog::by_name(&self.manifold)?;
        match (self.n, self.target_h) {
            (Some(_), Some(_)) => return Err(Error::Config("give either n or target_h, not both".into())),
            (Some(0), _) => return Err(Error::Config("n must be at least 1".into())),
            (_, Some(h)) if !(h > 0.0) => return Err(Error::Config(format!("target_h must be positive, got {h}"))),
            _ => {}
        }
        if !(self.gap_factor > 1.0) {
            return Err(Error::Config(format!("gap_factor must exceed 1, got {}", self.gap_factor)));
        }
        self.eigen.validate()
    }

    pub fn resolution(&self) -> Result<Resolution> {
        if let Some(h) = self.target_h {
            let m = catalog::by_name(&self.manifold)?;
            let area = Triangulation::structured(&m.chart, DEFAULT_N)?.riemannian_area(&m.metric)?;
            // equilateral triangles of side h
            let count = (4.0 * area / (3f64.sqrt() * h * h)).round().max(2.0) as usize;
            return Ok(Resolution::Triangles(count));
        }
        Ok(Resolution::Grid(self.n.unwrap_or(DEFAULT_N)))
    }

    pub fn experiment(&self) -> Result<Experiment> {
        self.validate()?;
        let mut e = Experiment::new(catalog::by_name(&self.manifold)?, self.problem, self.element, self.resolution()?);
        e.adapt = self.adapt;
        e.adapt_iterations = self.adapt_iterations;
        e.solver = self.eigen.clone();
        e.gap_factor = self.gap_factor;
        Ok(e)
    }
}

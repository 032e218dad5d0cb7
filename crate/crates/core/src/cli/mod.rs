//! Command-line front end: `solve`, `convergence`, `export` and `mesh`.
//!
//! Every command reads an optional JSON [`ExperimentConfig`], applies flag overrides and
//! writes its files under the output directory. Exit codes: 0 success, 2 configuration
//! error, 3 numerical failure, 1 I/O error.

mod config;
pub mod vtk;

pub use config::{ExperimentConfig, DEFAULT_N};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{ConvergenceStudy, Experiment, FieldError, Resolution, Run, GLUING_TOL};
use crate::eigen::SolverConfig;
use crate::fem::{DiscreteField, ElementOrder, FeSpace, Problem};
use crate::mesh::io as mesh_io;
use crate::{Error, ErrorCategory, Result};

#[derive(Debug, Parser)]
#[command(name = "killing", version, about = "Killing and conformal Killing fields by finite elements")]
pub struct Cli {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub outputs: Option<PathBuf>,
    /// Seed of the eigensolver's start block.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one eigenproblem; writes spectrum.csv, fields.vtk and report.json.
    Solve(Overrides),
    /// Solve on a sequence of grids; writes convergence.csv and orders.csv.
    Convergence {
        #[command(flatten)]
        overrides: Overrides,
        /// Grid sizes, e.g. 6,8,12,16.
        #[arg(long, value_delimiter = ',')]
        resolutions: Vec<usize>,
    },
    /// Write the analytic fields (and optionally computed modes) as VTK.
    Export {
        #[command(flatten)]
        overrides: Overrides,
        /// Use this mesh file instead of generating one.
        #[arg(long)]
        mesh_file: Option<PathBuf>,
        /// Also solve and export this many of the lowest modes.
        #[arg(long, default_value_t = 0)]
        modes: usize,
    },
    /// Generate (and optionally adapt) a mesh; writes mesh.txt and mesh.vtk.
    Mesh(Overrides),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub manifold: Option<String>,
    /// K or CK.
    #[arg(long)]
    pub problem: Option<Problem>,
    /// P1 or P2.
    #[arg(long)]
    pub element: Option<ElementOrder>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub target_h: Option<f64>,
    #[arg(long, conflicts_with = "no_adapt")]
    pub adapt: bool,
    #[arg(long)]
    pub no_adapt: bool,
    #[arg(long)]
    pub adapt_iterations: Option<usize>,
    /// Number of eigenpairs.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub gap_factor: Option<f64>,
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(m) = &self.manifold {
            c.manifold = m.clone();
        }
        if let Some(p) = self.problem {
            c.problem = p;
        }
        if let Some(e) = self.element {
            c.element = e;
        }
        if let Some(n) = self.n {
            c.n = Some(n);
            c.target_h = None;
        }
        if let Some(h) = self.target_h {
            c.target_h = Some(h);
            c.n = None;
        }
        if self.adapt {
            c.adapt = true;
        }
        if self.no_adapt {
            c.adapt = false;
        }
        if let Some(i) = self.adapt_iterations {
            c.adapt_iterations = i;
        }
        let e: &mut SolverConfig = &mut c.eigen;
        if let Some(k) = self.k {
            e.k = k;
        }
        if let Some(t) = self.tol {
            e.tol = t;
        }
        if let Some(s) = self.shift {
            e.shift = s;
        }
        if let Some(m) = self.max_iterations {
            e.max_iterations = m;
        }
        if let Some(g) = self.gap_factor {
            c.gap_factor = g;
        }
    }
}

pub fn exit_code(category: ErrorCategory) -> i32 {
    match category {
        ErrorCategory::Config => 2,
        ErrorCategory::Numerical => 3,
        ErrorCategory::Io => 1,
    }
}

/// Parse arguments, run the command and return the process exit code. Errors are printed
/// to stderr as one JSON object with `category` and `message`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let category = e.category();
            eprintln!("{}", serde_json::json!({ "category": category.to_string(), "message": e.to_string() }));
            exit_code(category)
        }
    }
}

fn load_config(cli: &Cli, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut c = match &cli.config {
        Some(path) => ExperimentConfig::from_json(
            &std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        )?,
        None => ExperimentConfig::default(),
    };
    overrides.apply(&mut c);
    if let Some(dir) = &cli.outputs {
        c.outputs = dir.clone();
    }
    if let Some(seed) = cli.seed {
        c.eigen.seed = seed;
    }
    c.validate()?;
    Ok(c)
}

pub fn execute(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match &cli.command {
        Command::Solve(o) => cmd_solve(&load_config(cli, o)?).map(|_| ()),
        Command::Convergence { overrides, resolutions } => {
            let mut c = load_config(cli, overrides)?;
            if !resolutions.is_empty() {
                c.resolutions = resolutions.clone();
            }
            cmd_convergence(&c).map(|_| ())
        }
        Command::Export { overrides, mesh_file, modes } => cmd_export(&load_config(cli, overrides)?, mesh_file.as_deref(), *modes),
        Command::Mesh(o) => cmd_mesh(&load_config(cli, o)?),
    }
}

/// Order of magnitude in table style, e.g. `1e-7`.
pub fn magnitude(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    format!("1e{}", v.abs().log10().round() as i64)
}

#[derive(Debug, Clone, Serialize)]
pub struct Magnitudes {
    pub name: String,
    pub eigenvalue: String,
    pub l2_rel: String,
    pub h1_rel: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub manifold: String,
    pub problem: Problem,
    pub element: ElementOrder,
    pub adapted: bool,
    pub ntri: usize,
    pub n_dofs: usize,
    /// Maximum Riemannian edge length.
    pub h: f64,
    pub edge_length_ratio: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub zero_mode_count: usize,
    pub zero_gap: Option<f64>,
    pub zero_inconclusive: bool,
    pub errors: Vec<FieldError>,
    pub ricci_residuals: Vec<f64>,
    pub magnitudes: Vec<Magnitudes>,
    pub solver: SolverConfig,
    pub gap_factor: f64,
}

impl Report {
    pub fn new(config: &ExperimentConfig, run: &Run) -> Self {
        Self {
            manifold: config.manifold.clone(),
            problem: config.problem,
            element: config.element,
            adapted: config.adapt,
            ntri: run.ntri,
            n_dofs: run.space.n_dofs(),
            h: run.h,
            edge_length_ratio: run.edge_ratio,
            eigenvalues: run.spectrum.eigenvalues.clone(),
            residuals: run.spectrum.residuals.clone(),
            converged: run.spectrum.converged,
            iterations: run.spectrum.iterations,
            zero_mode_count: run.zero.count(),
            zero_gap: run.zero.gap,
            zero_inconclusive: run.zero.inconclusive,
            errors: run.errors.clone(),
            ricci_residuals: run.ricci.clone(),
            magnitudes: run
                .errors
                .iter()
                .map(|e| Magnitudes {
                    name: e.name.clone(),
                    eigenvalue: magnitude(e.eigenvalue),
                    l2_rel: magnitude(e.l2_rel),
                    h1_rel: magnitude(e.h1_rel),
                })
                .collect(),
            solver: config.eigen.clone(),
            gap_factor: config.gap_factor,
        }
    }
}

fn output_dir(config: &ExperimentConfig) -> Result<&Path> {
    std::fs::create_dir_all(&config.outputs)?;
    Ok(&config.outputs)
}

/// Fields written by `solve`: the zero modes, or the lowest mode when none were found.
fn exported_modes(run: &Run) -> Vec<(String, DiscreteField<'_>)> {
    let count = run.zero.count().max(1).min(run.spectrum.len());
    (0..count).map(|i| (format!("mode_{i}"), run.mode(i))).collect()
}

pub fn cmd_solve(config: &ExperimentConfig) -> Result<Report> {
    let run = config.experiment()?.run()?;
    let dir = output_dir(config)?;
    std::fs::write(dir.join("spectrum.csv"), run.spectrum.to_csv())?;
    let modes = exported_modes(&run);
    let refs: Vec<(&str, &DiscreteField)> = modes.iter().map(|(n, f)| (n.as_str(), f)).collect();
    std::fs::write(dir.join("fields.vtk"), vtk::fields_vtk(&run.space, &refs, "low modes"))?;
    let report = Report::new(config, &run);
    if !report.converged {
        eprintln!("warning: eigensolver stopped after {} steps without converging; results are partial", report.iterations);
    }
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    println!(
        "{} {:?} {:?}: {} triangles, {} dofs, zero modes {}, eigenvalues {:?}",
        config.manifold,
        config.problem,
        config.element,
        report.ntri,
        report.n_dofs,
        report.zero_mode_count,
        report.eigenvalues
    );
    Ok(report)
}

/// Per exact field, the study over `config.resolutions`; the last entry is written as
/// `convergence.csv`/`orders.csv`, every entry also as `convergence_<name>.csv`.
pub fn cmd_convergence(config: &ExperimentConfig) -> Result<Vec<(String, ConvergenceStudy)>> {
    if config.resolutions.len() < 4 {
        return Err(Error::Config(format!("a convergence study needs at least 4 resolutions, got {}", config.resolutions.len())));
    }
    let base = config.experiment()?;
    let names: Vec<String> = base.exact_fields().iter().map(|f| f.name.clone()).collect();
    if names.is_empty() {
        return Err(Error::Config(format!("{} has no analytic fields to compare against", config.manifold)));
    }
    let dir = output_dir(config)?;
    let mut rows = vec![Vec::new(); names.len()];
    let mut failures = String::new();
    for &n in &config.resolutions {
        let e = Experiment { resolution: Resolution::Grid(n), ..base.clone() };
        match e.run() {
            Ok(run) => {
                for (i, r) in rows.iter_mut().enumerate() {
                    r.extend(run.row(i));
                }
                println!("n = {n}: {} triangles, errors {:?}", run.ntri, run.errors);
            }
            Err(err) => failures.push_str(&format!("{n},{:?}\n", err.to_string())),
        }
    }
    let studies: Vec<(String, ConvergenceStudy)> = names.into_iter().zip(rows).map(|(n, r)| (n, ConvergenceStudy::new(r))).collect();
    for (name, s) in &studies {
        std::fs::write(dir.join(format!("convergence_{name}.csv")), s.to_csv())?;
        std::fs::write(dir.join(format!("orders_{name}.csv")), s.orders_csv())?;
    }
    if let Some((_, last)) = studies.last() {
        last.write(dir)?;
    }
    if !failures.is_empty() {
        std::fs::write(dir.join("failures.csv"), format!("resolution,error\n{failures}"))?;
        return Err(Error::Internal(format!("some resolutions failed, see {}", dir.join("failures.csv").display())));
    }
    Ok(studies)
}

pub fn cmd_export(config: &ExperimentConfig, mesh_file: Option<&Path>, modes: usize) -> Result<()> {
    let experiment = config.experiment()?;
    let mesh = match mesh_file {
        Some(p) => mesh_io::read(p)?,
        None => experiment.mesh()?,
    };
    let dir = output_dir(config)?;
    let space = FeSpace::new(&mesh, config.element, experiment.manifold.chart.gluing, GLUING_TOL)?;
    let exact: Vec<(String, DiscreteField)> =
        experiment.exact_fields().iter().map(|f| (f.name.clone(), DiscreteField::interpolate(&space, f))).collect();
    let run = if modes > 0 { Some(experiment.run_on(&mesh)?) } else { None };
    let computed: Vec<(String, DiscreteField)> = match &run {
        Some(r) => (0..modes.min(r.spectrum.len())).map(|i| (format!("mode_{i}"), DiscreteField { space: &space, values: r.spectrum.eigenvectors[i].clone() })).collect(),
        None => Vec::new(),
    };
    let refs: Vec<(&str, &DiscreteField)> = exact.iter().chain(&computed).map(|(n, f)| (n.as_str(), f)).collect();
    std::fs::write(dir.join("export.vtk"), vtk::fields_vtk(&space, &refs, &config.manifold))?;
    Ok(())
}

pub fn cmd_mesh(config: &ExperimentConfig) -> Result<()> {
    let experiment = config.experiment()?;
    let mesh = experiment.mesh()?;
    let dir = output_dir(config)?;
    mesh_io::write(&mesh, dir.join("mesh.txt"))?;
    std::fs::write(dir.join("mesh.vtk"), vtk::mesh_vtk(&mesh, &config.manifold))?;
    let metric = &experiment.manifold.metric;
    println!(
        "{}",
        serde_json::json!({
            "vertices": mesh.n_vertices(),
            "triangles": mesh.n_triangles(),
            "max_edge_length": mesh.max_edge_length(metric),
            "edge_length_ratio": mesh.edge_length_ratio(metric),
            "min_quality": mesh.min_quality(metric),
        })
    );
    Ok(())
}

//! Smallest eigenpairs of the symmetric pencil `A x = λ M x`.

pub mod amd;
pub mod cholesky;
mod dense;
mod lanczos;

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fem::SymSparseMatrix;
use crate::{Error, Result};

pub use cholesky::CholeskyFactor;
pub use dense::{dense_solve, dense_solve_matrices, symmetric_eigen};
pub use lanczos::solve_smallest;

/// Eigenpairs in ascending order with `M`-orthonormal vectors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖A x − λ M x‖ / ‖M x‖`.
    pub residuals: Vec<f64>,
    /// False when the iteration limit was reached before every pair met the tolerance.
    pub converged: bool,
    pub iterations: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub(crate) fn push(&mut self, lambda: f64, vector: Vec<f64>, residual: f64) {
        self.eigenvalues.push(lambda);
        self.eigenvectors.push(vector);
        self.residuals.push(residual);
    }

    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self {
            eigenvalues: self.eigenvalues[..k].to_vec(),
            eigenvectors: self.eigenvectors[..k].to_vec(),
            residuals: self.residuals[..k].to_vec(),
            converged: self.converged,
            iterations: self.iterations,
        }
    }

    /// CSV with header `index,eigenvalue,residual`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "index,eigenvalue,residual")?;
        for (i, (l, r)) in self.eigenvalues.iter().zip(&self.residuals).enumerate() {
            writeln!(w, "{i},{l:.17e},{r:.6e}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    /// Largest deviation of `XᵀMX` from the identity.
    pub fn orthonormality_defect(&self, m: &SymSparseMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, x) in self.eigenvectors.iter().enumerate() {
            let mx = m.mul_vec(x);
            for (j, y) in self.eigenvectors.iter().enumerate() {
                let g: f64 = y.iter().zip(&mx).map(|(a, b)| a * b).sum();
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Number of eigenpairs requested.
    pub k: usize,
    /// Residual tolerance, relative to `max(1, |λ|)`.
    pub tol: f64,
    /// Spectral shift `σ < 0`; `A − σM` is factored.
    pub shift: f64,
    /// Maximum number of block steps.
    pub max_iterations: usize,
    /// Block size; 0 picks `max(k, 4)`.
    pub block_size: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { k: 6, tol: 1e-10, shift: -1.0, max_iterations: 300, block_size: 0, seed: 0x5eed }
    }
}

impl SolverConfig {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.shift < 0.0) {
            return Err(Error::Config(format!("shift must be negative, got {}", self.shift)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn effective_block_size(&self) -> usize {
        if self.block_size == 0 {
            self.k.max(4)
        } else {
            self.block_size
        }
    }
}

/// Near-zero cluster at the bottom of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroEigenspace {
    /// Indices of the zero modes (a prefix of the spectrum).
    pub indices: Vec<usize>,
    /// Ratio `λ_{m} / λ_{m−1}` across the chosen gap.
    pub gap: Option<f64>,
    /// No ratio reached the gap factor; `indices` is empty.
    pub inconclusive: bool,
}

impl ZeroEigenspace {
    pub fn count(&self) -> usize {
        self.indices.len()
    }

    pub fn vectors<'s>(&self, spectrum: &'s Spectrum) -> Vec<&'s Vec<f64>> {
        self.indices.iter().map(|&i| &spectrum.eigenvectors[i]).collect()
    }
}

/// Split off the near-zero eigenvalues.
///
/// Consecutive ratios `λ_{i+1} / max(λ_i, τ)` with `τ = 1e-12 · max|λ|` are scanned and the
/// cut is placed after the last ratio `≥ gap_factor`. Taking the last such gap keeps a
/// cluster like `(1e-16, 1e-7, 0.3)` together, where the rounding-level and
/// discretization-level zero modes are themselves separated by a large ratio.
pub fn zero_eigenspace(spectrum: &Spectrum, gap_factor: f64) -> ZeroEigenspace {
    zero_count_of(&spectrum.eigenvalues, gap_factor)
}

pub fn zero_count_of(eigenvalues: &[f64], gap_factor: f64) -> ZeroEigenspace {
    let scale = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let floor = (1e-12 * scale).max(f64::MIN_POSITIVE);
    let mut cut = None;
    for i in 0..eigenvalues.len().saturating_sub(1) {
        let ratio = eigenvalues[i + 1] / eigenvalues[i].max(floor);
        if ratio >= gap_factor {
            cut = Some((i + 1, ratio));
        }
    }
    match cut {
        Some((m, ratio)) => ZeroEigenspace { indices: (0..m).collect(), gap: Some(ratio), inconclusive: false },
        None => ZeroEigenspace { indices: vec![], gap: None, inconclusive: true },
    }
}

/// Cosines of the principal angles between the spans of two `M`-orthonormal sets,
/// ascending (the smallest cosine belongs to the largest angle).
pub fn principal_cosines(x: &[Vec<f64>], y: &[Vec<f64>], m: &SymSparseMatrix) -> Vec<f64> {
    let my: Vec<Vec<f64>> = y.iter().map(|v| m.mul_vec(v)).collect();
    let c = DMatrix::<f64>::from_fn(x.len(), y.len(), |i, j| x[i].iter().zip(&my[j]).map(|(a, b)| a * b).sum());
    let mut s: Vec<f64> = c.svd(false, false).singular_values.iter().map(|v: &f64| v.min(1.0)).collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Largest principal angle (radians) between two equally sized `M`-orthonormal sets.
pub fn max_principal_angle(x: &[Vec<f64>], y: &[Vec<f64>], m: &SymSparseMatrix) -> f64 {
    if x.len() != y.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    // sin of the largest angle from the part of `y` outside span(x), which stays accurate
    // for tiny angles where 1 − cos² cancels
    let mx: Vec<Vec<f64>> = x.iter().map(|v| m.mul_vec(v)).collect();
    let residuals: Vec<Vec<f64>> = y
        .iter()
        .map(|v| {
            let mut r = v.clone();
            for (xi, mxi) in x.iter().zip(&mx) {
                let c: f64 = mxi.iter().zip(v).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(xi).for_each(|(ri, xv)| *ri -= c * xv);
            }
            r
        })
        .collect();
    let mr: Vec<Vec<f64>> = residuals.iter().map(|r| m.mul_vec(r)).collect();
    let g = DMatrix::from_fn(y.len(), y.len(), |i, j| residuals[i].iter().zip(&mr[j]).map(|(a, b)| a * b).sum());
    let (vals, _) = symmetric_eigen(&g);
    vals.last().map_or(0.0, |v| v.max(0.0).sqrt().min(1.0).asin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_eigenspace_examples() {
        assert_eq!(zero_count_of(&[1e-12, 0.8, 1.9], 1e3).count(), 1);
        assert_eq!(zero_count_of(&[1e-11, 3e-11, 0.5], 1e3).count(), 2);
        let z = zero_count_of(&[0.3, 0.7, 1.1], 1e3);
        assert_eq!(z.count(), 0);
        assert!(z.inconclusive);
        assert_eq!(zero_count_of(&[1e-16, 1e-7, 0.3, 0.5], 1e3).count(), 2);
        assert_eq!(zero_count_of(&[-3e-15, 2e-15, 0.2], 1e3).count(), 2);
    }

    #[test]
    fn csv_format() {
        let mut s = Spectrum::default();
        s.push(0.5, vec![1.0], 1e-12);
        let csv = s.to_csv();
        assert!(csv.starts_with("index,eigenvalue,residual\n0,5.00000000000000000e-1,"));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { shift: 1.0, ..SolverConfig::default() }.validate().is_err());
        assert!(SolverConfig { k: 0, ..SolverConfig::default() }.validate().is_err());
    }
}

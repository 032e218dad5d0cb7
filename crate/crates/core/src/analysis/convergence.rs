use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Columns whose errors all sit below this are at rounding level; their fitted order says
/// nothing about discretization error.
pub const SATURATION_LEVEL: f64 = 1e-11;

/// Least-squares slope of `log ε` against `log h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub order: f64,
    pub points: usize,
    pub saturated: bool,
}

/// Fit `ε ≈ C h^k`. Nonpositive errors are dropped; at least four rows must remain.
pub fn fit_order(h: &[f64], eps: &[f64]) -> Result<ColumnFit> {
    if h.len() != eps.len() {
        return Err(Error::DimensionMismatch(format!("{} spacings, {} errors", h.len(), eps.len())));
    }
    let pts: Vec<(f64, f64)> =
        h.iter().zip(eps).filter(|(h, e)| **h > 0.0 && **e > 0.0 && e.is_finite()).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("{} usable rows, need at least 4", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("all spacings are equal".into()));
    }
    let saturated = eps.iter().all(|e| e.abs() <= SATURATION_LEVEL);
    Ok(ColumnFit { order: sxy / sxx, points: pts.len(), saturated })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// Maximum Riemannian edge length.
    pub h: f64,
    pub ntri: usize,
    /// `|λ_h|` of the zero mode.
    pub eigenvalue: f64,
    pub l2_rel: f64,
    pub h1_rel: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
}

pub const COLUMNS: [&str; 3] = ["eigenvalue", "l2_rel", "h1_rel"];

impl ConvergenceStudy {
    pub fn new(mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by(|a, b| b.h.total_cmp(&a.h));
        Self { rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match name {
                "eigenvalue" => r.eigenvalue,
                "l2_rel" => r.l2_rel,
                _ => r.h1_rel,
            })
            .collect()
    }

    /// Fitted order for each of eigenvalue, L² and H¹ columns.
    pub fn orders(&self) -> [Result<ColumnFit>; 3] {
        let h: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        COLUMNS.map(|c| fit_order(&h, &self.column(c)))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,ntri,eigenvalue,l2_rel,h1_rel\n");
        for r in &self.rows {
            let _ = writeln!(s, "{:.17e},{},{:.17e},{:.17e},{:.17e}", r.h, r.ntri, r.eigenvalue, r.l2_rel, r.h1_rel);
        }
        s
    }

    pub fn orders_csv(&self) -> String {
        let mut s = String::from("column,order,points,saturated\n");
        for (name, fit) in COLUMNS.iter().zip(self.orders()) {
            match fit {
                Ok(f) => {
                    let _ = writeln!(s, "{name},{:.6},{},{}", f.order, f.points, f.saturated);
                }
                Err(_) => {
                    let _ = writeln!(s, "{name},nan,0,false");
                }
            }
        }
        s
    }

    /// Writes `convergence.csv` and `orders.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("convergence.csv"), self.to_csv())?;
        std::fs::write(dir.join("orders.csv"), self.orders_csv())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_square_law() {
        let h = [0.25, 0.125, 0.0625, 0.03125];
        let e: Vec<f64> = h.iter().map(|h| h * h).collect();
        let f = fit_order(&h, &e).unwrap();
        assert!((f.order - 2.0).abs() < 1e-12);
        assert!(!f.saturated);
    }

    #[test]
    fn noisy_planted_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h: Vec<f64> = (0..8).map(|i| 0.5 * 0.8f64.powi(i)).collect();
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h.powf(3.81) * (1.0 + rng.gen_range(-0.01..0.01))).collect();
        let k = fit_order(&h, &e).unwrap().order;
        assert!((3.6..=4.0).contains(&k), "{k}");
    }

    #[test]
    fn noise_free_slopes_are_recovered() {
        for k in [1.0, 2.5, 4.25, 6.0] {
            let h: Vec<f64> = (0..6).map(|i| 0.7f64.powi(i)).collect();
            let e: Vec<f64> = h.iter().map(|h| 0.3 * h.powf(k)).collect();
            assert!((fit_order(&h, &e).unwrap().order - k).abs() < 1e-6);
        }
    }

    #[test]
    fn too_few_positive_rows() {
        let h = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let e = [1e-3, 0.0, -1.0, 1e-5, 1e-6];
        assert!(matches!(fit_order(&h, &e), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn rounding_level_columns_are_flagged() {
        let h = [1.0, 0.5, 0.25, 0.125];
        let e = [3e-15, 1e-15, 4e-15, 2e-15];
        assert!(fit_order(&h, &e).unwrap().saturated);
    }

    #[test]
    fn csv_layout() {
        let study = ConvergenceStudy::new(
            (0..4)
                .map(|i| {
                    let h = 0.5f64.powi(i);
                    ConvergenceRow { h, ntri: 8 << (2 * i), eigenvalue: h.powi(4), l2_rel: h.powi(3), h1_rel: h.powi(2) }
                })
                .rev()
                .collect(),
        );
        assert_eq!(study.rows[0].h, 1.0);
        let csv = study.to_csv();
        assert!(csv.starts_with("h,ntri,eigenvalue,l2_rel,h1_rel\n1.00000000000000000e0,8,"));
        let orders = study.orders_csv();
        assert!(orders.contains("eigenvalue,4.000000,4,false"));
        assert!(orders.contains("h1_rel,2.000000,4,false"));
    }
}

use std::io::Write;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Accumulates `(row, col, value)` contributions with `row ≤ col`.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Add `value` at `(i, j)`; the entry is stored in the upper triangle.
    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let bad = if i >= self.n { Some(i) } else if j >= self.n { Some(j) } else { None };
        if let Some(index) = bad {
            return Err(Error::DofOutOfRange { index, n: self.n });
        }
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((r, c, value));
        Ok(())
    }

    pub fn build(mut self) -> SymSparseMatrix {
        // stable sort keeps the summation order of duplicates fixed
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SymSparseMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

/// Symmetric matrix storing the upper triangle row by row (equivalently the lower
/// triangle column by column).
#[derive(Debug, Clone, PartialEq)]
pub struct SymSparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymSparseMatrix {
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut b = TripletBuilder::new(n);
        for &(i, j, v) in triplets {
            b.add(i, j, v)?;
        }
        Ok(b.build())
    }

    pub fn identity(n: usize) -> Self {
        Self { n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: vec![1.0; n] }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::identity(d.len());
        m.values.copy_from_slice(d);
        m
    }

    /// Upper triangle of a dense symmetric matrix (exact zeros dropped).
    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            for j in i..n {
                if a[(i, j)] != 0.0 || i == j {
                    b.entries.push((i, j, a[(i, j)]));
                }
            }
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored (upper-triangle) nonzeros.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterate stored entries `(i, j, a_ij)` with `i ≤ j`.
    pub fn iter_upper(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let cols = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match cols.binary_search(&c) {
            Ok(p) => self.values[self.row_ptr[r] + p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                let a = self.values[p];
                acc += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
            y[i] += acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A y` without forming `A y` densely.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                let a = self.values[p];
                s += if i == j { a * x[i] * y[i] } else { a * (x[i] * y[j] + x[j] * y[i]) };
            }
        }
        s
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.bilinear(x, x)
    }

    /// `α A + β B`.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        let mut b = TripletBuilder::new(self.n);
        b.entries.extend(self.iter_upper().map(|(i, j, v)| (i, j, alpha * v)));
        b.entries.extend(other.iter_upper().map(|(i, j, v)| (i, j, beta * v)));
        Ok(b.build())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.iter_upper() {
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        a
    }

    /// Coordinate text format, one `i j value` line per nonzero of the full matrix.
    pub fn write_coordinate(&self, mut w: impl Write) -> Result<()> {
        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * self.nnz());
        for (i, j, v) in self.iter_upper() {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by_key(|&(i, j, _)| (i, j));
        for (i, j, v) in full {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }

    pub fn read_coordinate(n: usize, text: &str) -> Result<Self> {
        let mut b = TripletBuilder::new(n);
        for (line, l) in text.lines().enumerate() {
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
            if parts.len() != 3 {
                return Err(err("expected `i j value`"));
            }
            let i: usize = parts[0].parse().map_err(|_| err("bad row index"))?;
            let j: usize = parts[1].parse().map_err(|_| err("bad column index"))?;
            let v: f64 = parts[2].parse().map_err(|_| err("bad value"))?;
            if i <= j {
                b.add(i, j, v)?;
            }
        }
        Ok(b.build())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> SymSparseMatrix {
        SymSparseMatrix::from_triplets(3, &[(0, 0, 2.0), (1, 0, -1.0), (0, 1, 0.5), (2, 2, 3.0), (1, 1, 1.0)]).unwrap()
    }

    #[test]
    fn duplicates_are_summed_into_upper_triangle() {
        let a = sample();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 1), -0.5);
        assert_eq!(a.get(1, 0), -0.5);
        assert_eq!(a.get(0, 2), 0.0);
    }

    #[test]
    fn out_of_range_is_reported() {
        assert!(matches!(
            SymSparseMatrix::from_triplets(2, &[(0, 2, 1.0)]),
            Err(Error::DofOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn coordinate_round_trip() {
        let a = sample();
        let mut buf = Vec::new();
        a.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(SymSparseMatrix::read_coordinate(3, &text).unwrap(), a);
    }

    proptest! {
        #[test]
        fn matvec_matches_dense(xs in proptest::collection::vec(-10.0f64..10.0, 3)) {
            let a = sample();
            let d = a.to_dense();
            let y = a.mul_vec(&xs);
            let yd = &d * nalgebra::DVector::from_column_slice(&xs);
            for i in 0..3 {
                prop_assert!((y[i] - yd[i]).abs() < 1e-12);
            }
            let q = a.quadratic_form(&xs);
            let qd = nalgebra::DVector::from_column_slice(&xs).dot(&yd);
            prop_assert!((q - qd).abs() < 1e-10 * (1.0 + qd.abs()));
        }
    }
}

//! Up-looking sparse Cholesky `P A Pᵀ = L Lᵀ` with an elimination-tree symbolic phase.

use crate::eigen::amd::{amd_order, invert};
use crate::fem::SymSparseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    perm: Vec<usize>,
    /// Column pointers / row indices / values of `L`; the diagonal is first in each column.
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
}

/// Upper triangle of `P A Pᵀ` by columns: `(col_ptr, row_idx, values)`.
fn permuted_upper_columns(a: &SymSparseMatrix, pinv: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let n = a.dim();
    let mut count = vec![0usize; n + 1];
    for (i, j, _) in a.iter_upper() {
        count[pinv[i].max(pinv[j]) + 1] += 1;
    }
    for k in 0..n {
        count[k + 1] += count[k];
    }
    let cp = count.clone();
    let mut next = count;
    let mut ri = vec![0; a.nnz()];
    let mut vx = vec![0.0; a.nnz()];
    for (i, j, v) in a.iter_upper() {
        let (r, c) = {
            let (pi, pj) = (pinv[i], pinv[j]);
            (pi.min(pj), pi.max(pj))
        };
        ri[next[c]] = r;
        vx[next[c]] = v;
        next[c] += 1;
    }
    (cp, ri, vx)
}

fn etree(n: usize, cp: &[usize], ri: &[usize]) -> Vec<Option<usize>> {
    let mut parent = vec![None; n];
    let mut ancestor: Vec<Option<usize>> = vec![None; n];
    for k in 0..n {
        for &r in &ri[cp[k]..cp[k + 1]] {
            let mut i = r;
            while i < k {
                let next = ancestor[i];
                ancestor[i] = Some(k);
                match next {
                    None => {
                        parent[i] = Some(k);
                        break;
                    }
                    Some(nx) => i = nx,
                }
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of `L` (excluding the diagonal), written to `stack[top..]`.
fn ereach(k: usize, cp: &[usize], ri: &[usize], parent: &[Option<usize>], stack: &mut [usize], flag: &mut [usize], tag: usize) -> usize {
    let n = stack.len();
    let mut top = n;
    flag[k] = tag;
    let mut path = Vec::new();
    for &r in &ri[cp[k]..cp[k + 1]] {
        let mut i = r;
        if i > k {
            continue;
        }
        path.clear();
        while flag[i] != tag {
            path.push(i);
            flag[i] = tag;
            match parent[i] {
                Some(p) => i = p,
                None => break,
            }
        }
        for &v in path.iter().rev() {
            top -= 1;
            stack[top] = v;
        }
    }
    top
}

impl CholeskyFactor {
    /// Factor with an approximate-minimum-degree ordering.
    pub fn factor(a: &SymSparseMatrix) -> Result<Self> {
        Self::factor_with(a, amd_order(a))
    }

    pub fn factor_with(a: &SymSparseMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::DimensionMismatch(format!("permutation of length {} for n = {n}", perm.len())));
        }
        let pinv = invert(&perm);
        let (cp, ri, vx) = permuted_upper_columns(a, &pinv);
        let parent = etree(n, &cp, &ri);

        // column counts from the row patterns
        let mut stack = vec![0usize; n];
        let mut flag = vec![usize::MAX; n];
        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(k, &cp, &ri, &parent, &mut stack, &mut flag, k);
            for &i in &stack[top..] {
                counts[i] += 1;
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + counts[k];
        }
        let nnz = lp[n];
        let mut li = vec![0usize; nnz];
        let mut lx = vec![0.0; nnz];
        let mut next: Vec<usize> = lp[..n].to_vec();
        let mut x = vec![0.0; n];
        flag.iter_mut().for_each(|f| *f = usize::MAX);

        for k in 0..n {
            let top = ereach(k, &cp, &ri, &parent, &mut stack, &mut flag, k);
            x[k] = 0.0;
            for p in cp[k]..cp[k + 1] {
                x[ri[p]] += vx[p];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..] {
                let lki = x[i] / lx[lp[i]];
                x[i] = 0.0;
                for q in lp[i] + 1..next[i] {
                    x[li[q]] -= lx[q] * lki;
                }
                d -= lki * lki;
                li[next[i]] = k;
                lx[next[i]] = lki;
                next[i] += 1;
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: perm[k], value: d });
            }
            li[next[k]] = k;
            lx[next[k]] = d.sqrt();
            next[k] += 1;
        }
        Ok(Self { n, perm, lp, li, lx })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros of `L`.
    pub fn nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = (0..n).map(|k| b[self.perm[k]]).collect();
        // L y = P b
        for j in 0..n {
            y[j] /= self.lx[self.lp[j]];
            let yj = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p]] -= self.lx[p] * yj;
            }
        }
        // Lᵀ z = y
        for j in (0..n).rev() {
            let mut s = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                s -= self.lx[p] * y[self.li[p]];
            }
            y[j] = s / self.lx[self.lp[j]];
        }
        for k in 0..n {
            b[self.perm[k]] = y[k];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

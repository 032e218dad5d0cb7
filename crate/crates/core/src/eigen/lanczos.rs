//! Block shift-and-invert Lanczos with full reorthogonalization and thick restarts.
//!
//! The operator `T = (A − σM)⁻¹ M` is self-adjoint in the `M` inner product and maps the
//! smallest eigenvalues `λ` of the pencil to the largest `θ = 1 / (λ − σ)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::{dense_solve, symmetric_eigen, CholeskyFactor, SolverConfig, Spectrum};
use crate::fem::SymSparseMatrix;
use crate::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Basis {
    v: Vec<Vec<f64>>,
    mv: Vec<Vec<f64>>,
}

impl Basis {
    fn len(&self) -> usize {
        self.v.len()
    }

    /// Two passes of classical Gram–Schmidt against the basis; returns the coefficients.
    fn orthogonalize(&self, z: &mut [f64]) -> Vec<f64> {
        let mut coef = vec![0.0; self.len()];
        for _ in 0..2 {
            let c: Vec<f64> = self.mv.iter().map(|mv| dot(mv, z)).collect();
            for (i, ci) in c.iter().enumerate() {
                axpy(-ci, &self.v[i], z);
                coef[i] += ci;
            }
        }
        coef
    }
}

/// `k` smallest eigenpairs of `A x = λ M x` (`A` symmetric positive semidefinite, `M` SPD).
pub fn solve_smallest(a: &SymSparseMatrix, m: &SymSparseMatrix, config: &SolverConfig) -> Result<Spectrum> {
    config.validate()?;
    let n = a.dim();
    if m.dim() != n {
        return Err(Error::DimensionMismatch(format!("A is {n}×{n}, M is {0}×{0}", m.dim())));
    }
    let k = config.k.min(n);
    let b = config.effective_block_size().min(n);
    let max_dim = (k + 3 * b).max(2 * k + 2 * b).max(24);
    if n <= max_dim + b {
        let mut s = dense_solve(a, m)?.truncated(k);
        s.iterations = 0;
        return Ok(s);
    }

    let shifted = a.linear_combination(1.0, m, -config.shift)?;
    let factor = CholeskyFactor::factor(&shifted)
        .map_err(|e| Error::Internal(format!("factorization of A − σM failed: {e}")))?;
    let apply = |x: &Vec<f64>| factor.solve(&m.mul_vec(x));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut basis = Basis { v: Vec::new(), mv: Vec::new() };
    let mut h = DMatrix::<f64>::zeros(0, 0);

    let first: Vec<Vec<f64>> = (0..b).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let block = next_block(&basis, first, m, &mut rng);
    let mut last = append(&mut basis, &mut h, block, m);

    let mut best = Spectrum::default();
    for iteration in 1..=config.max_iterations {
        let mut z: Vec<Vec<f64>> = last.clone().into_par_iter().map(|j| apply(&basis.v[j])).collect();
        for (col, zj) in last.iter().zip(z.iter_mut()) {
            let coef = basis.orthogonalize(zj);
            for (i, c) in coef.iter().enumerate() {
                h[(i, *col)] = *c;
            }
        }
        let dim = basis.len();
        for &col in &last {
            for i in 0..dim {
                if !last.contains(&i) {
                    h[(col, i)] = h[(i, col)];
                }
            }
        }
        for &p in &last {
            for &q in &last {
                if p < q {
                    let avg = 0.5 * (h[(p, q)] + h[(q, p)]);
                    h[(p, q)] = avg;
                    h[(q, p)] = avg;
                }
            }
        }

        // Rayleigh–Ritz on the projected operator, largest θ first
        let (theta, y) = symmetric_eigen(&h);
        let order: Vec<usize> = (0..dim).rev().collect();
        let ritz = |c: usize| -> Vec<f64> {
            let mut x = vec![0.0; n];
            for (i, vi) in basis.v.iter().enumerate() {
                axpy(y[(i, c)], vi, &mut x);
            }
            x
        };
        let mut pairs: Vec<(f64, Vec<f64>, f64)> = order[..k]
            .par_iter()
            .map(|&c| {
                let mut x = ritz(c);
                let mx = m.mul_vec(&x);
                let s = dot(&x, &mx).sqrt();
                x.iter_mut().for_each(|v| *v /= s);
                let ax = a.mul_vec(&x);
                let mx: Vec<f64> = mx.iter().map(|v| v / s).collect();
                let lambda = dot(&x, &ax);
                let r: Vec<f64> = ax.iter().zip(&mx).map(|(p, q)| p - lambda * q).collect();
                (lambda, x, norm(&r) / norm(&mx))
            })
            .collect();
        let done = pairs.iter().all(|(l, _, r)| *r <= config.tol * l.abs().max(1.0));
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        best = Spectrum { converged: done, iterations: iteration, ..Spectrum::default() };
        for (l, x, r) in pairs {
            best.push(l, x, r);
        }
        if done {
            return Ok(best);
        }

        let block = next_block(&basis, z, m, &mut rng);
        if dim + block.len() > max_dim {
            let keep = (max_dim - 2 * b).max(k + b).min(dim);
            let kept: Vec<usize> = order[..keep].to_vec();
            let new_v: Vec<Vec<f64>> = kept.iter().map(|&c| ritz(c)).collect();
            let new_mv: Vec<Vec<f64>> = kept
                .iter()
                .map(|&c| {
                    let mut x = vec![0.0; n];
                    for (i, mvi) in basis.mv.iter().enumerate() {
                        axpy(y[(i, c)], mvi, &mut x);
                    }
                    x
                })
                .collect();
            basis = Basis { v: new_v, mv: new_mv };
            h = DMatrix::from_fn(keep, keep, |i, j| if i == j { theta[kept[i]] } else { 0.0 });
        }
        last = append(&mut basis, &mut h, block, m);
    }
    Ok(best)
}

/// `M`-orthonormalize a block against the basis and itself, replacing deflated columns
/// by fresh random directions.
fn next_block(basis: &Basis, mut z: Vec<Vec<f64>>, m: &SymSparseMatrix, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = z.first().map_or(0, Vec::len);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(z.len());
    let mut out_m: Vec<Vec<f64>> = Vec::with_capacity(z.len());
    for zj in z.iter_mut() {
        for attempt in 0..5 {
            if attempt > 0 {
                *zj = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            }
            let before = dot(zj, &m.mul_vec(zj)).sqrt();
            for _ in 0..2 {
                basis.orthogonalize(zj);
                for (q, mq) in out.iter().zip(&out_m) {
                    let c = dot(mq, zj);
                    axpy(-c, q, zj);
                }
            }
            let mz = m.mul_vec(zj);
            let after = dot(zj, &mz).sqrt();
            if after > 1e-8 * before && after > 0.0 {
                zj.iter_mut().for_each(|v| *v /= after);
                out_m.push(mz.iter().map(|v| v / after).collect());
                out.push(std::mem::take(zj));
                break;
            }
        }
    }
    out
}

fn append(basis: &mut Basis, h: &mut DMatrix<f64>, block: Vec<Vec<f64>>, m: &SymSparseMatrix) -> Vec<usize> {
    let start = basis.len();
    for q in block {
        basis.mv.push(m.mul_vec(&q));
        basis.v.push(q);
    }
    let dim = basis.len();
    let old = std::mem::replace(h, DMatrix::zeros(dim, dim));
    h.view_mut((0, 0), (start, start)).copy_from(&old.view((0, 0), (start, start)));
    (start..dim).collect()
}

//! Approximate minimum degree ordering on the quotient graph.
//!
//! Eliminated variables become elements; a variable's degree is bounded by its remaining
//! variable neighbours plus the sizes of its adjacent elements outside the newest one,
//! `|A_i| + |L_p \ i| + Σ_e |L_e \ L_p|`.

use std::collections::BTreeSet;

use crate::fem::SymSparseMatrix;

const LIVE: u8 = 0;
const ELEMENT: u8 = 1;
const ABSORBED: u8 = 2;

/// Fill-reducing permutation: `perm[k]` is the original index eliminated at step `k`.
pub fn amd_order(a: &SymSparseMatrix) -> Vec<usize> {
    let n = a.dim();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in a.iter_upper() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let mut elts: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut lvars: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut status = vec![LIVE; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut heap: BTreeSet<(usize, usize)> = (0..n).map(|i| (degree[i], i)).collect();

    let mut mark = vec![0usize; n];
    let mut wmark = vec![0usize; n];
    let mut w = vec![0usize; n];
    let mut stamp = 0usize;
    let mut perm = Vec::with_capacity(n);
    let mut live = n;

    while let Some((_, p)) = heap.pop_first() {
        perm.push(p);
        live -= 1;
        status[p] = ELEMENT;
        stamp += 1;
        mark[p] = stamp;

        let mut lp = Vec::new();
        for &v in &adj[p] {
            if status[v] == LIVE && mark[v] != stamp {
                mark[v] = stamp;
                lp.push(v);
            }
        }
        for e in std::mem::take(&mut elts[p]) {
            if status[e] != ELEMENT {
                continue;
            }
            for &v in &lvars[e] {
                if status[v] == LIVE && mark[v] != stamp {
                    mark[v] = stamp;
                    lp.push(v);
                }
            }
            status[e] = ABSORBED;
            lvars[e] = Vec::new();
        }
        adj[p] = Vec::new();

        // |L_e \ L_p| for every element touching L_p
        for &i in &lp {
            for &e in &elts[i] {
                if status[e] != ELEMENT {
                    continue;
                }
                if wmark[e] != stamp {
                    wmark[e] = stamp;
                    w[e] = lvars[e].len();
                }
                w[e] -= 1;
            }
        }
        for &i in &lp {
            for &e in &elts[i] {
                if status[e] == ELEMENT && wmark[e] == stamp && w[e] == 0 {
                    // L_e ⊆ L_p: absorbed into the new element
                    status[e] = ABSORBED;
                    lvars[e] = Vec::new();
                }
            }
        }
        for &i in &lp {
            elts[i].retain(|&e| status[e] == ELEMENT);
            adj[i].retain(|&v| status[v] == LIVE && mark[v] != stamp);
            let mut d = adj[i].len() + lp.len() - 1;
            for &e in &elts[i] {
                d += w[e];
            }
            elts[i].push(p);
            let d = d.min(live.saturating_sub(1));
            heap.remove(&(degree[i], i));
            degree[i] = d;
            heap.insert((d, i));
        }
        lvars[p] = lp;
    }
    perm
}

/// Inverse permutation.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::cholesky::CholeskyFactor;
    use crate::fem::TripletBuilder;

    pub(crate) fn grid_laplacian(n: usize) -> SymSparseMatrix {
        let id = |i: usize, j: usize| i * n + j;
        let mut b = TripletBuilder::new(n * n);
        for i in 0..n {
            for j in 0..n {
                b.add(id(i, j), id(i, j), 4.0).unwrap();
                if i + 1 < n {
                    b.add(id(i, j), id(i + 1, j), -1.0).unwrap();
                }
                if j + 1 < n {
                    b.add(id(i, j), id(i, j + 1), -1.0).unwrap();
                }
            }
        }
        b.build()
    }

    #[test]
    fn ordering_is_a_permutation() {
        let a = grid_laplacian(12);
        let mut p = amd_order(&a);
        assert_eq!(p.len(), 144);
        p.sort_unstable();
        assert_eq!(p, (0..144).collect::<Vec<_>>());
    }

    #[test]
    fn ordering_reduces_fill_on_a_grid() {
        let a = grid_laplacian(30);
        let natural: Vec<usize> = (0..900).collect();
        let fill_natural = CholeskyFactor::factor_with(&a, natural).unwrap().nnz();
        let fill_amd = CholeskyFactor::factor_with(&a, amd_order(&a)).unwrap().nnz();
        assert!(fill_amd * 10 < fill_natural * 7, "{fill_amd} vs {fill_natural}");
    }
}

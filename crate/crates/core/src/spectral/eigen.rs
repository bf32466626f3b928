use alloc::vec;
use alloc::vec::Vec;

use super::Laplacian;
use crate::error::{Error, Result};
use crate::math::sqrt;

/// Eigenvalues closer than this are treated as one repeated eigenvalue.
pub const EIGENVALUE_TIE: f64 = 1e-9;

const MAX_QL_ITERATIONS: usize = 64;

/// Orthonormal eigenvectors of a symmetric matrix, ascending eigenvalues.
///
/// Canonical form: every repeated-eigenvalue subspace is re-spanned by
/// Gram-Schmidt over the coordinate axes in index order, and every column
/// has its largest-magnitude entry positive (first index on ties). Encoder
/// and decoder rely on this to derive identical bases from identical
/// Laplacians.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Column-major: column `k` is `vectors[k * n..(k + 1) * n]`.
    vectors: Vec<f64>,
}

impl EigenBasis {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// `U[i][k]`, component `i` of eigenvector `k`.
    #[inline]
    pub fn entry(&self, i: usize, k: usize) -> f64 {
        self.vectors[k * self.n + i]
    }

    /// Builds a basis from raw columns without checks. Intended for tests
    /// and for callers that already hold an orthonormal basis.
    pub fn from_columns(eigenvalues: Vec<f64>, columns: Vec<Vec<f64>>) -> Self {
        let n = eigenvalues.len();
        let vectors = columns.into_iter().flatten().collect::<Vec<f64>>();
        assert_eq!(vectors.len(), n * n);
        EigenBasis { n, eigenvalues, vectors }
    }
}

/// Eigen-decomposition of a graph Laplacian.
pub fn eigendecompose(l: &Laplacian) -> Result<EigenBasis> {
    eigendecompose_dense(l.dim(), &l.to_dense())
}

/// Eigen-decomposition of a dense symmetric row-major `n x n` matrix by
/// Householder tridiagonalisation followed by implicit QL iterations.
pub fn eigendecompose_dense(n: usize, matrix: &[f64]) -> Result<EigenBasis> {
    if n == 0 {
        return Err(Error::invalid("cannot decompose an empty matrix"));
    }
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, actual: matrix.len() });
    }
    let mut v = matrix.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e);
    // ql_implicit rotates columns of V; work on the transpose so each
    // rotation touches two contiguous rows.
    let mut vt = transpose(n, &v);
    ql_implicit(n, &mut vt, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend_from_slice(&vt[k * n..(k + 1) * n]);
    }
    let mut basis = EigenBasis { n, eigenvalues, vectors };
    canonicalize(&mut basis);
    Ok(basis)
}

fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// accumulating the orthogonal transform in `v` (row-major, `v[i*n+j]`).
/// On return `d` holds the diagonal and `e[1..]` the sub-diagonal.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal `(d, e)`. `vt` is the transposed
/// accumulated transform: row `k` becomes eigenvector `k`.
fn ql_implicit(n: usize, vt: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::DecompositionFailure { size: n });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = vt.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_next = &mut hi[..n];
                    for k in 0..n {
                        let hk = row_next[k];
                        row_next[k] = s * row_i[k] + c * hk;
                        row_i[k] = c * row_i[k] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn canonicalize(basis: &mut EigenBasis) {
    let n = basis.n;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && basis.eigenvalues[end] - basis.eigenvalues[end - 1] < EIGENVALUE_TIE {
            end += 1;
        }
        if end - start > 1 {
            respan_subspace(basis, start, end);
        }
        start = end;
    }
    for k in 0..n {
        let col = &mut basis.vectors[k * n..(k + 1) * n];
        let max = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lead = col.iter().position(|v| v.abs() >= max * (1.0 - 1e-9)).unwrap_or(0);
        if col[lead] < 0.0 {
            col.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Replaces columns `start..end` by the Gram-Schmidt orthonormalisation of
/// the coordinate axes projected onto their span, axes taken in index order.
fn respan_subspace(basis: &mut EigenBasis, start: usize, end: usize) {
    let n = basis.n;
    let m = end - start;
    let old: Vec<Vec<f64>> = (start..end).map(|k| basis.column(k).to_vec()).collect();
    let mut fresh: Vec<Vec<f64>> = Vec::with_capacity(m);
    for axis in 0..n {
        if fresh.len() == m {
            break;
        }
        // Projection of e_axis onto the subspace: sum_k old_k[axis] * old_k.
        let mut v = vec![0.0; n];
        for q in &old {
            let c = q[axis];
            if c != 0.0 {
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi += c * qi;
                }
            }
        }
        for _ in 0..2 {
            for u in &fresh {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = sqrt(v.iter().map(|x| x * x).sum());
        if norm > 1e-4 {
            v.iter_mut().for_each(|x| *x /= norm);
            fresh.push(v);
        }
    }
    if fresh.len() < m {
        return;
    }
    let mean = (start..end).map(|k| basis.eigenvalues[k]).sum::<f64>() / m as f64;
    for (offset, col) in fresh.into_iter().enumerate() {
        let k = start + offset;
        basis.vectors[k * n..(k + 1) * n].copy_from_slice(&col);
        basis.eigenvalues[k] = mean;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{laplacian, LocalGraph};

    fn check(n: usize, a: &[f64], b: &EigenBasis) {
        let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n).map(|k| b.entry(i, k) * b.eigenvalues()[k] * b.entry(j, k)).sum();
                assert!((rec - a[i * n + j]).abs() <= 1e-8 * scale, "reconstruction at ({i},{j})");
                let gram: f64 = (0..n).map(|k| b.entry(k, i) * b.entry(k, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram - expect).abs() <= 1e-8, "orthonormality at ({i},{j})");
            }
        }
        assert!(b.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn path_of_two() {
        let l = laplacian(&LocalGraph::from_edges(2, &[(0, 1)], vec![0.0; 2]));
        let b = eigendecompose(&l).unwrap();
        assert!(b.eigenvalues()[0].abs() < 1e-12);
        assert!((b.eigenvalues()[1] - 2.0).abs() < 1e-12);
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((b.entry(0, 0) - r).abs() < 1e-12 && (b.entry(1, 0) - r).abs() < 1e-12);
        assert!((b.entry(0, 1) - r).abs() < 1e-12 && (b.entry(1, 1) + r).abs() < 1e-12);
    }

    #[test]
    fn connected_graph_has_constant_null_vector() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)];
        let l = laplacian(&LocalGraph::from_edges(5, &edges, vec![0.0; 5]));
        let b = eigendecompose(&l).unwrap();
        assert!(b.eigenvalues()[0].abs() < 1e-12);
        assert!(b.eigenvalues()[1] > 1e-9);
        let c = 1.0 / 5f64.sqrt();
        assert!(b.column(0).iter().all(|v| (v - c).abs() < 1e-12));
        check(5, &l.to_dense(), &b);
    }

    #[test]
    fn random_twelve_vertex_graph_reconstructs() {
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        let mut edges: Vec<(usize, usize)> = (1..12).map(|i| (next() % i, i)).collect();
        for _ in 0..10 {
            edges.push((next() % 12, next() % 12));
        }
        let l = laplacian(&LocalGraph::from_edges(12, &edges, vec![0.0; 12]));
        let b = eigendecompose(&l).unwrap();
        check(12, &l.to_dense(), &b);
    }

    #[test]
    fn repeated_eigenvalues_are_canonical() {
        // Three isolated vertices plus an edge: nullspace of dimension 4.
        let l = laplacian(&LocalGraph::from_edges(5, &[(3, 4)], vec![0.0; 5]));
        let b = eigendecompose(&l).unwrap();
        check(5, &l.to_dense(), &b);
        for k in 0..3 {
            let col = b.column(k);
            assert!((col[k] - 1.0).abs() < 1e-12, "column {k} is axis {k}");
        }
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((b.column(3)[3] - r).abs() < 1e-12 && (b.column(3)[4] - r).abs() < 1e-12);
    }

    #[test]
    fn decomposition_is_bit_reproducible() {
        let edges: Vec<(usize, usize)> = (0..30).map(|i| (i, (i * 7 + 3) % 31)).collect();
        let l = laplacian(&LocalGraph::from_edges(31, &edges, vec![0.0; 31]));
        assert_eq!(eigendecompose(&l).unwrap(), eigendecompose(&l).unwrap());
    }

    #[test]
    fn singleton_matrix() {
        let b = eigendecompose_dense(1, &[0.0]).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0]);
        assert_eq!(b.column(0), &[1.0]);
    }
}

//! Extremal eigensolvers for the real-symmetric reference Hamiltonians.
//!
//! Dense problems go through `nalgebra`'s symmetric eigendecomposition;
//! larger ones use a Lanczos iteration with full reorthogonalization over a
//! sparse row representation.

use nalgebra::{DMatrix, RealField};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest dimension handled by the dense solver.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

/// Above this dimension groundstates come from Lanczos instead.
pub const DENSE_GROUNDSTATE_LIMIT: usize = 1024;

/// Row-compressed real sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseRows<T> {
    pub dim: usize,
    pub rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseRows<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    /// Adds `value` at `(row, col)`, merging with an existing entry.
    pub fn add(&mut self, row: usize, col: usize, value: T) {
        let r = &mut self.rows[row];
        match r.iter_mut().find(|(c, _)| *c == col) {
            Some((_, v)) => *v += value,
            None => r.push((col, value)),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.rows[row]
            .iter()
            .find(|(c, _)| *c == col)
            .map_or(T::zero(), |&(_, v)| v)
    }

    pub fn sort_rows(&mut self) {
        for r in &mut self.rows {
            r.sort_by_key(|&(c, _)| c);
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn max_abs(&self) -> T {
        self.rows
            .iter()
            .flatten()
            .fold(T::zero(), |m, &(_, v)| m.max(v.abs()))
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    /// Largest element-wise deviation `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::from_element(self.dim, self.dim, T::zero());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += v;
            }
        }
        m
    }
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Real + RealField>(m: &DMatrix<T>) -> Vec<T> {
    let mut ev: Vec<T> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
    ev
}

/// Lowest eigenpair of a dense symmetric matrix.
pub fn dense_lowest<T: Real + RealField>(m: &DMatrix<T>) -> (T, Vec<T>) {
    let eig = m.clone().symmetric_eigen();
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |(bi, bv), (i, &v)| {
            if v < bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let v: Vec<T> = eig.eigenvectors.column(idx).iter().copied().collect();
    (eig.eigenvalues[idx], v)
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn normalize<T: Real>(v: &mut [T]) -> T {
    let n = Float::sqrt(dot(v, v));
    if n > T::zero() {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

use num_traits::Float;

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
pub fn lanczos_lowest<T: Real + RealField>(
    h: &SparseRows<T>,
    tol: T,
    max_restarts: usize,
) -> Result<(T, Vec<T>)> {
    let dim = h.dim;
    let krylov = dim.min(120);
    // Deterministic, non-degenerate start vector.
    let mut start: Vec<T> = (0..dim)
        .map(|i| T::one() + T::lit(((i * 7919) % 104_729) as f64 / 104_729.0))
        .collect();
    normalize(&mut start);

    let mut w = vec![T::zero(); dim];
    for _ in 0..max_restarts.max(1) {
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(krylov);
        let mut alpha = Vec::with_capacity(krylov);
        let mut beta: Vec<T> = Vec::with_capacity(krylov);
        basis.push(start.clone());
        for j in 0..krylov {
            h.matvec(&basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Full reorthogonalization, twice for stability.
            for _ in 0..2 {
                for q in &basis {
                    let p = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, &qi)| *wi -= p * qi);
                }
            }
            if j + 1 == krylov {
                break;
            }
            let b = normalize(&mut w);
            if b < T::lit(1e-13) {
                break;
            }
            beta.push(b);
            basis.push(w.clone());
        }
        let m = alpha.len();
        let mut t = DMatrix::from_element(m, m, T::zero());
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (theta, y) = dense_lowest(&t);
        let mut ritz = vec![T::zero(); dim];
        for (q, &c) in basis.iter().zip(&y) {
            ritz.iter_mut().zip(q).for_each(|(r, &qi)| *r += c * qi);
        }
        normalize(&mut ritz);
        h.matvec(&ritz, &mut w);
        let resid = Float::sqrt(
            w.iter()
                .zip(&ritz)
                .map(|(&hv, &v)| {
                    let d = hv - theta * v;
                    d * d
                })
                .sum::<T>(),
        );
        if resid < tol || m < krylov {
            return Ok((theta, ritz));
        }
        start = ritz;
    }
    Err(Error::NoConvergence(format!(
        "Lanczos did not reach residual {} in {} restarts",
        tol, max_restarts
    )))
}

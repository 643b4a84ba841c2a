//! Sparse symmetric matrices on a [`FockBasis`] and their assembly from
//! normal-ordered ladder monomials.

use rayon::prelude::*;

use super::basis::FockBasis;
use crate::sum::KahanSum;

/// One ladder operator acting on mode `usize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Applies `ops[0] ops[1] ... ops[k-1]` to `occ` in place, rightmost first.
///
/// Returns the amplitude, or `None` if an annihilator hits an empty mode or an
/// occupation would overflow `u8`.
pub fn apply(ops: &[Ladder], occ: &mut [u8]) -> Option<f64> {
    let mut amp = 1.0;
    for op in ops.iter().rev() {
        match *op {
            Ladder::Annihilate(i) => {
                let n = occ[i];
                if n == 0 {
                    return None;
                }
                amp *= (n as f64).sqrt();
                occ[i] = n - 1;
            }
            Ladder::Create(i) => {
                let n = occ[i].checked_add(1)?;
                amp *= (n as f64).sqrt();
                occ[i] = n;
            }
        }
    }
    Some(amp)
}

/// Symmetric matrix in compressed-row form.
///
/// Built from a generator of matrix elements `A[i][j]`; the stored matrix is
/// `factor * (A + A^T)`, with both triangles written from one value so the
/// result is exactly symmetric.
#[derive(Debug, Clone)]
pub struct SparseSymmetricOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    /// Generated elements whose target state lies outside the basis.
    pub dropped: usize,
}

impl SparseSymmetricOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Assembles `factor * (A + A^T)`. `column(j, out)` pushes
    /// `(i, A[i][j])` for the ket `j`; targets are basis indices or `None`
    /// when the image leaves the truncated space.
    pub fn assemble<F>(basis: &FockBasis, factor: f64, column: F) -> Self
    where
        F: Fn(usize, &mut Vec<(Option<usize>, f64)>) + Sync,
    {
        let dim = basis.len();
        let cols: Vec<(Vec<(u32, u32, f64)>, usize)> = (0..dim)
            .into_par_iter()
            .map(|j| {
                let mut raw = Vec::new();
                column(j, &mut raw);
                let mut dropped = 0;
                let mut out = Vec::with_capacity(raw.len());
                for (i, v) in raw {
                    match i {
                        Some(i) => {
                            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                            out.push((lo as u32, hi as u32, v));
                        }
                        None => dropped += 1,
                    }
                }
                (out, dropped)
            })
            .collect();
        let dropped = cols.iter().map(|c| c.1).sum();
        let mut trip: Vec<(u32, u32, f64)> = cols.into_iter().flat_map(|c| c.0).collect();
        // Stable sort keeps generation order inside each key, so the merged
        // sums do not depend on the thread count.
        trip.sort_by_key(|t| (t.0, t.1));
        let mut merged: Vec<(u32, u32, f64)> = Vec::new();
        let mut acc = KahanSum::new();
        for (k, t) in trip.iter().enumerate() {
            acc.add(t.2);
            let last = k + 1 == trip.len() || (trip[k + 1].0, trip[k + 1].1) != (t.0, t.1);
            if last {
                let mut v = acc.value();
                if t.0 == t.1 {
                    v *= 2.0;
                }
                let v = factor * v;
                if v != 0.0 {
                    merged.push((t.0, t.1, v));
                }
                acc = KahanSum::new();
            }
        }
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); dim];
        for &(lo, hi, v) in &merged {
            rows[lo as usize].push((hi, v));
            if lo != hi {
                rows[hi as usize].push((lo, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols_out = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (c, v) in r {
                cols_out.push(c);
                vals.push(v);
            }
            row_ptr.push(cols_out.len());
        }
        Self {
            dim,
            row_ptr,
            cols: cols_out,
            vals,
            dropped,
        }
    }

    /// Diagonal matrix.
    pub fn diagonal(d: &[f64]) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for (i, &v) in d.iter().enumerate() {
            if v != 0.0 {
                cols.push(i as u32);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim: d.len(),
            row_ptr,
            cols,
            vals,
            dropped: 0,
        }
    }

    /// Dense symmetric input; only the upper triangle is read.
    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let dim = a.len();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = if i <= j { a[i][j] } else { a[j][i] };
                if v != 0.0 {
                    cols.push(j as u32);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            dropped: 0,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`, rows in parallel, each row summed in column order.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .into_par_iter()
            .map(|i| self.row(i).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// Largest absolute row sum, a bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|e| e.1.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|A[i][j] - A[j][i]|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `<x, A y>`.
    pub fn expectation(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::sum::ksum(self.matvec(y).iter().zip(x).map(|(a, b)| a * b))
    }
}

//! Extremal eigenpair and resolvent solves for [`SparseSymmetricOperator`].

use nalgebra::{DMatrix, SymmetricEigen};

use super::operator::SparseSymmetricOperator;
use crate::error::{Error, Result};
use crate::sum::ksum;

const MAX_SUBSPACE: usize = 40;
const DEFAULT_MAX_ITER: usize = 2000;
/// Preconditioner denominators below this are left unscaled.
const SHIFT_FLOOR: f64 = 1e-10;
/// A new direction keeping less than this fraction outside the subspace is
/// numerically dependent.
const STALL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    ksum(a.iter().zip(b).map(|(x, y)| x * y))
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Removes the components along `basis` (orthonormal), twice for stability.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(v, -c, b);
        }
    }
}

/// Normalizes `v`, removes the `basis` components and normalizes again.
/// Returns the norm fraction left after the projection.
fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    let n0 = norm(v);
    if n0 == 0.0 || !n0.is_finite() {
        return 0.0;
    }
    v.iter_mut().for_each(|e| *e /= n0);
    orthogonalize(v, basis);
    let n1 = norm(v);
    if n1 > 0.0 {
        v.iter_mut().for_each(|e| *e /= n1);
    }
    n1
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenpair by Davidson iteration with a diagonal preconditioner.
///
/// Starts from the unit vector on the smallest diagonal entry and stops when
/// `||A x - lambda x|| <= tol * max(1, ||A||)`.
pub fn ground_state(op: &SparseSymmetricOperator, tol: f64) -> Result<GroundState> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    let diag = op.diag();
    let scale = op.norm_bound().max(1.0);
    let start = diag
        .iter()
        .enumerate()
        .fold(0, |best, (i, &d)| if d < diag[best] { i } else { best });
    let mut v0 = vec![0.0; dim];
    v0[start] = 1.0;
    let mut basis = vec![v0];
    let mut images = vec![op.matvec(&basis[0])];
    let mut last_res = f64::INFINITY;
    for iter in 1..=DEFAULT_MAX_ITER {
        let k = basis.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            dot(&basis[a], &images[b])
        });
        let eig = SymmetricEigen::new(t);
        let lowest = eig.eigenvalues.iter().enumerate().fold(0, |best, (i, &e)| {
            if e < eig.eigenvalues[best] {
                i
            } else {
                best
            }
        });
        let theta = eig.eigenvalues[lowest];
        let y = eig.eigenvectors.column(lowest);
        let mut x = vec![0.0; dim];
        let mut ax = vec![0.0; dim];
        for i in 0..k {
            axpy(&mut x, y[i], &basis[i]);
            axpy(&mut ax, y[i], &images[i]);
        }
        let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        let res = norm(&r);
        last_res = res;
        if res <= tol * scale {
            let nx = norm(&x);
            x.iter_mut().for_each(|e| *e /= nx);
            // Fix the sign so the largest component is positive.
            let big = x
                .iter()
                .fold(0.0f64, |m, e| if e.abs() > m.abs() { *e } else { m });
            if big < 0.0 {
                x.iter_mut().for_each(|e| *e = -*e);
            }
            return Ok(GroundState {
                energy: theta,
                vector: x,
                residual: res,
                iterations: iter,
            });
        }
        let mut corr: Vec<f64> = r
            .iter()
            .zip(&diag)
            .map(|(ri, di)| {
                let d = theta - di;
                if d.abs() < SHIFT_FLOOR {
                    *ri
                } else {
                    ri / d
                }
            })
            .collect();
        if basis.len() >= MAX_SUBSPACE {
            let nx = norm(&x);
            x.iter_mut().for_each(|e| *e /= nx);
            let ax_n: Vec<f64> = ax.iter().map(|e| e / nx).collect();
            basis = vec![x];
            images = vec![ax_n];
        }
        let mut nc = orthonormalize(&mut corr, &basis);
        if nc < STALL {
            // Preconditioned step lies in the subspace; use the raw residual.
            corr = r;
            nc = orthonormalize(&mut corr, &basis);
            if nc < STALL {
                break;
            }
        }
        images.push(op.matvec(&corr));
        basis.push(corr);
    }
    Err(Error::EigenNonConvergence {
        iterations: DEFAULT_MAX_ITER,
        residual: last_res,
    })
}

/// Second-order energy `<V g, (E0 - G0)^-1 Q0 V g>` for the ground vector `g`
/// of `g0` with energy `e0`, `Q0 = 1 - |g><g|`.
///
/// Solves `(G0 - E0) x = Q0 V g` on the complement of `g` by projected,
/// Jacobi-preconditioned conjugate gradients and returns `-<Q0 V g, x>`.
pub fn rs_pt2(
    g0: &SparseSymmetricOperator,
    v: &SparseSymmetricOperator,
    e0: f64,
    gs0: &[f64],
    tol: f64,
) -> Result<f64> {
    let project = |x: &mut Vec<f64>| {
        let c = dot(gs0, x);
        axpy(x, -c, gs0);
    };
    let mut b = v.matvec(gs0);
    project(&mut b);
    let bn = norm(&b);
    if bn == 0.0 {
        return Ok(0.0);
    }
    let prec: Vec<f64> = g0
        .diag()
        .iter()
        .map(|d| (d - e0).max(SHIFT_FLOOR))
        .collect();
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y = g0.matvec(x);
        axpy(&mut y, -e0, x);
        y
    };
    let mut x = vec![0.0; b.len()];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&prec).map(|(a, p)| a / p).collect();
    project(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let max_iter = 10 * b.len() + 100;
    for _ in 0..max_iter {
        let mut ap = apply(&p);
        project(&mut ap);
        let alpha = rz / dot(&p, &ap);
        axpy(&mut x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        if norm(&r) <= tol * bn {
            return Ok(-dot(&b, &x));
        }
        z = r.iter().zip(&prec).map(|(a, p)| a / p).collect();
        project(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(Error::LinearSolveNonConvergence {
        iterations: max_iter,
        residual: norm(&r) / bn,
    })
}

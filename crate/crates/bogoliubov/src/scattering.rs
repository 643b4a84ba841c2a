//! Momentum-space scattering equation on the lattice ball,
//!
//! `p^2 eta_p + (1/2N) sum_q vhat_N(p - q) eta_q = -vhat_N(p)/2`,
//!
//! solved by damped fixed-point iteration from the first Born term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::sum::par_ksum;

pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Extra sweeps after reaching `tol`, kept while the defect still drops.
const POLISH_SWEEPS: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringSolution {
    pub eta: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub damping: f64,
}

/// First Born value `-vhat_N(p) / (2 p^2)`, the closure used beyond the cutoff.
pub fn eta_tail(model: &Model, abs_p: f64) -> f64 {
    -model.v_at(abs_p) / (2.0 * abs_p * abs_p)
}

fn defect(model: &Model, eta: &[f64], conv: &[f64]) -> Vec<f64> {
    let inv2n = 0.5 / model.n;
    (0..eta.len())
        .map(|i| model.lattice.p2(i) * eta[i] + inv2n * conv[i] + 0.5 * model.v(i))
        .collect()
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn solve_eta(model: &Model, tol: f64, max_iter: usize) -> Result<ScatteringSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be > 0")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
    }
    let m = model.len();
    let lat = &model.lattice;
    let mut eta: Vec<f64> = (0..m).map(|i| -model.v(i) / (2.0 * lat.p2(i))).collect();
    let mut omega = 1.0;
    let mut conv = model.convolve(&eta);
    let mut res = max_abs(&defect(model, &eta, &conv));
    let mut iterations = 1;
    let mut polish = 0;
    loop {
        if res <= tol {
            if polish == POLISH_SWEEPS || res == 0.0 {
                break;
            }
            polish += 1;
        } else if iterations >= max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: res,
            });
        }
        let next: Vec<f64> = (0..m)
            .map(|i| {
                let target = (-model.v(i) - conv[i] / model.n) / (2.0 * lat.p2(i));
                eta[i] + omega * (target - eta[i])
            })
            .collect();
        let next_conv = model.convolve(&next);
        let next_res = max_abs(&defect(model, &next, &next_conv));
        iterations += 1;
        if res <= tol {
            if next_res >= res {
                break;
            }
        } else if next_res > res {
            omega *= 0.5;
        }
        eta = next;
        conv = next_conv;
        res = next_res;
        if iterations >= max_iter && res <= tol {
            break;
        }
    }
    Ok(ScatteringSolution {
        eta,
        iterations,
        residual: res,
        damping: omega,
    })
}

/// Max-norm defect of the scattering equation for a given table.
pub fn residual(model: &Model, eta: &[f64]) -> f64 {
    let conv = model.convolve(eta);
    max_abs(&defect(model, eta, &conv))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScatteringLength {
    /// Full box value `a` with the Born continuum tail included.
    pub a_box: f64,
    /// `sum_{p in ball} vhat_N(p) eta_p`.
    pub ball_sum: f64,
    /// Continuum Born estimate of the same sum beyond the cutoff.
    pub tail_sum: f64,
}

impl ScatteringLength {
    /// `8 pi a` without the continuum tail.
    pub fn eight_pi_a_ball(&self, v0: f64, n: f64) -> f64 {
        v0 + self.ball_sum / n
    }
}

/// `8 pi a = vhat(0) + (1/N) sum_{p != 0} vhat_N(p) eta_p`.
pub fn scattering_length(model: &Model, sol: &ScatteringSolution) -> ScatteringLength {
    let ball_sum = par_ksum(model.len(), |i| model.v(i) * sol.eta[i]);
    let tail_sum = model
        .tail()
        .integrate(|p| model.v_at(p) * eta_tail(model, p));
    let eight_pi_a = model.v0() + (ball_sum + tail_sum) / model.n;
    ScatteringLength {
        a_box: eight_pi_a / (8.0 * std::f64::consts::PI),
        ball_sum,
        tail_sum,
    }
}

/// `(1/2N) sum_{p != 0} vhat_N(p)^2 / p^2`, the second Born term of `vhat(0) - 8 pi a`.
pub fn born2(model: &Model) -> (f64, f64) {
    let ball =
        par_ksum(model.len(), |i| model.v(i).powi(2) / model.lattice.p2(i)) / (2.0 * model.n);
    let tail = model.tail().integrate(|p| model.v_at(p).powi(2) / (p * p)) / (2.0 * model.n);
    (ball, tail)
}

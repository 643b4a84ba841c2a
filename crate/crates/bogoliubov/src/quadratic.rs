//! Bogoliubov coefficient tables and the scalar constants built from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::scattering::ScatteringSolution;
use crate::sum::{ksum, par_ksum};
use crate::tail::angular_rule;

/// Ball sum and continuum tail of one lattice sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Split {
    pub ball: f64,
    pub tail: f64,
}

impl Split {
    pub fn total(&self) -> f64 {
        self.ball + self.tail
    }

    pub fn scaled(&self, k: f64) -> Split {
        Split {
            ball: k * self.ball,
            tail: k * self.tail,
        }
    }
}

/// `sinh(x) - x` to full relative precision.
///
/// The direct difference loses `log10(6 / x^2)` digits, so `|x| < 1` sums
/// the odd Taylor series from `x^3 / 6` instead.
pub fn sinh_minus_id(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return x.sinh() - x;
    }
    let x2 = x * x;
    let mut term = x * x2 / 6.0;
    let mut acc = 0.0f64;
    let mut k = 3.0;
    while term.abs() > 1e-17 * acc.abs() || acc == 0.0 {
        acc += term;
        term *= x2 / ((k + 1.0) * (k + 2.0));
        k += 2.0;
        if term == 0.0 {
            break;
        }
    }
    acc
}

/// `sinh(eta) cosh(eta) - eta`.
pub fn sc_minus_eta(eta: f64) -> f64 {
    0.5 * sinh_minus_id(2.0 * eta)
}

/// Coefficients attached to one momentum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Coeffs {
    pub v: f64,
    pub eta: f64,
    pub s: f64,
    pub c: f64,
    pub f: f64,
    pub g: f64,
    pub tau: f64,
    pub st: f64,
    pub ct: f64,
    pub e: f64,
}

/// `tau = (1/4) ln((1 - G/F)/(1 + G/F)) = -atanh(G/F) / 2`.
pub fn tau_of(f: f64, g: f64) -> Option<f64> {
    let r = g / f;
    if !(f > 0.0) || !(r.abs() < 1.0) {
        return None;
    }
    Some(-0.5 * r.atanh())
}

/// `sqrt(F^2 - G^2)` without forming the squares.
pub fn dispersion(f: f64, g: f64) -> f64 {
    ((f - g) * (f + g)).sqrt()
}

/// Closed-form dispersion `sqrt(p^4 + 2 p^2 v)`.
pub fn dispersion_closed(p2: f64, v: f64) -> f64 {
    (p2 * (p2 + 2.0 * v)).sqrt()
}

/// First-Born coefficients at a momentum outside the solved ball.
///
/// The convolution terms of `F` and `G` are dropped and `e` uses the closed
/// form.
pub fn asymptotic(model: &Model, abs_p: f64) -> Coeffs {
    asymptotic_from(model.v_at(abs_p), abs_p * abs_p)
}

pub fn asymptotic_from(v: f64, p2: f64) -> Coeffs {
    let eta = -v / (2.0 * p2);
    let (s, c) = (eta.sinh(), eta.cosh());
    let f = (2.0 * eta).cosh() * p2 + (2.0 * eta).exp() * v;
    // 2 eta p^2 = -v, so sinh(2 eta) p^2 + e^{2 eta} v regroups without cancellation.
    let g = p2 * sinh_minus_id(2.0 * eta) + v * (2.0 * eta).exp_m1();
    let tau = -0.5 * (g / f).atanh();
    Coeffs {
        v,
        eta,
        s,
        c,
        f,
        g,
        tau,
        st: tau.sinh(),
        ct: tau.cosh(),
        e: dispersion_closed(p2, v),
    }
}

/// Per-momentum Bogoliubov tables on the lattice ball.
#[derive(Debug, Clone, Serialize)]
pub struct BogoliubovTables {
    pub eta: Vec<f64>,
    pub s: Vec<f64>,
    pub c: Vec<f64>,
    /// `c_p s_p`.
    pub cs: Vec<f64>,
    /// `(vhat_N * cs)_p`, `q != p`.
    pub conv_cs: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub tau: Vec<f64>,
    pub st: Vec<f64>,
    pub ct: Vec<f64>,
    pub e: Vec<f64>,
}

/// Elementwise `(sinh eta, cosh eta)`.
pub fn hyperbolics(eta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (
        eta.iter().map(|x| x.sinh()).collect(),
        eta.iter().map(|x| x.cosh()).collect(),
    )
}

/// `(vhat_N * cs)_p = sum_{q != p, q != 0} vhat_N(p - q) c_q s_q` over the ball.
pub fn cs_convolution(model: &Model, cs: &[f64]) -> Vec<f64> {
    model.convolve_offdiag(cs)
}

/// `F_p` and `G_p` from the hyperbolics and the `cs` convolution.
pub fn coefficients_fg(model: &Model, eta: &[f64], conv_cs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let inv_n = 1.0 / model.n;
    (0..eta.len())
        .map(|i| {
            let p2 = model.lattice.p2(i);
            let v = model.v(i);
            let x = 2.0 * eta[i];
            let (sh2, ch2, ex2) = (x.sinh(), x.cosh(), x.exp());
            let f = ch2 * p2 + ex2 * v + inv_n * conv_cs[i] * sh2;
            let g = sh2 * p2 + ex2 * v + inv_n * conv_cs[i] * ch2;
            (f, g)
        })
        .unzip()
}

/// `tau_p` with `tanh(2 tau_p) = -G_p / F_p`.
pub fn tau_table(model: &Model, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    f.iter()
        .zip(g)
        .enumerate()
        .map(|(i, (&fi, &gi))| {
            tau_of(fi, gi).ok_or(Error::DiagonalizationFailure {
                n: model.lattice.n(i),
                ratio: gi / fi,
                big_n: model.n,
                kappa: model.pot.kappa,
            })
        })
        .collect()
}

impl BogoliubovTables {
    pub fn build(model: &Model, sol: &ScatteringSolution) -> Result<Self> {
        let eta = sol.eta.clone();
        let (s, c) = hyperbolics(&eta);
        let cs: Vec<f64> = eta.iter().map(|x| 0.5 * (2.0 * x).sinh()).collect();
        let conv_cs = cs_convolution(model, &cs);
        let (f, g) = coefficients_fg(model, &eta, &conv_cs);
        let tau = tau_table(model, &f, &g)?;
        let st = tau.iter().map(|t| t.sinh()).collect();
        let ct = tau.iter().map(|t| t.cosh()).collect();
        let e = f.iter().zip(&g).map(|(&a, &b)| dispersion(a, b)).collect();
        Ok(Self {
            eta,
            s,
            c,
            cs,
            conv_cs,
            f,
            g,
            tau,
            st,
            ct,
            e,
        })
    }

    pub fn coeffs(&self, model: &Model, i: usize) -> Coeffs {
        Coeffs {
            v: model.v(i),
            eta: self.eta[i],
            s: self.s[i],
            c: self.c[i],
            f: self.f[i],
            g: self.g[i],
            tau: self.tau[i],
            st: self.st[i],
            ct: self.ct[i],
            e: self.e[i],
        }
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}

/// Bogoliubov ground energy `E0 = (1/2) sum (-F + sqrt(F^2 - G^2))`.
pub fn bogoliubov_ground_energy(model: &Model, t: &BogoliubovTables) -> Split {
    let term = |f: f64, g: f64, e: f64| -0.5 * g * g / (f + e);
    Split {
        ball: par_ksum(t.len(), |i| term(t.f[i], t.g[i], t.e[i])),
        tail: model.tail().integrate(|p| {
            let a = asymptotic(model, p);
            term(a.f, a.g, dispersion(a.f, a.g))
        }),
    }
}

/// The five sums of the constant `C`, kept apart for diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstantC {
    /// `(N - 1) vhat(0) / 2`.
    pub mean_field: f64,
    /// `sum (p^2 + vhat_N) s^2`.
    pub kinetic: Split,
    /// `sum vhat_N c s`.
    pub pairing: Split,
    /// `(1/2N) sum (vhat_N * cs) c s`, ball only.
    pub convolution: f64,
    /// `-(1/N) sum vhat_N (cs/2 + c s^3)`.
    pub cubic: Split,
}

impl ConstantC {
    /// `C - (N - 1) vhat(0) / 2`.
    pub fn reduced(&self) -> f64 {
        ksum([
            self.kinetic.ball,
            self.kinetic.tail,
            self.pairing.ball,
            self.pairing.tail,
            self.convolution,
            self.cubic.ball,
            self.cubic.tail,
        ])
    }

    pub fn total(&self) -> f64 {
        self.mean_field + self.reduced()
    }
}

pub fn constant_c(model: &Model, t: &BogoliubovTables) -> ConstantC {
    let n = model.n;
    let m = t.len();
    let p2 = |i| model.lattice.p2(i);
    let kin = |p2: f64, v: f64, s: f64| (p2 + v) * s * s;
    let cub = |v: f64, s: f64, c: f64| -(v * (0.5 * c * s + c * s * s * s)) / n;
    let tail = model.tail();
    ConstantC {
        mean_field: 0.5 * (n - 1.0) * model.v0(),
        kinetic: Split {
            ball: par_ksum(m, |i| kin(p2(i), model.v(i), t.s[i])),
            tail: tail.integrate(|p| {
                let a = asymptotic(model, p);
                kin(p * p, a.v, a.s)
            }),
        },
        pairing: Split {
            ball: par_ksum(m, |i| model.v(i) * t.cs[i]),
            tail: tail.integrate(|p| {
                let a = asymptotic(model, p);
                a.v * a.c * a.s
            }),
        },
        convolution: par_ksum(m, |i| t.conv_cs[i] * t.cs[i]) / (2.0 * n),
        cubic: Split {
            ball: par_ksum(m, |i| cub(model.v(i), t.s[i], t.c[i])),
            tail: tail.integrate(|p| {
                let a = asymptotic(model, p);
                cub(a.v, a.s, a.c)
            }),
        },
    }
}

/// Summand of `E00` in the cancellation-free form
/// `v^3 (S + 3 p^2) / (p^2 + S)^3`, `S = sqrt(p^4 + 2 p^2 v)`, halved.
pub fn e00_summand(p2: f64, v: f64) -> f64 {
    let s = dispersion_closed(p2, v);
    0.5 * v * v * v * (s + 3.0 * p2) / (p2 + s).powi(3)
}

/// `E00 = (1/2) sum (-p^2 - v + sqrt(p^4 + 2 p^2 v) + v^2 / (2 p^2))` with `v = vhat(0)`.
pub fn e00(model: &Model) -> Split {
    let v = model.v0();
    Split {
        ball: par_ksum(model.len(), |i| e00_summand(model.lattice.p2(i), v)),
        tail: model.tail().integrate(|p| e00_summand(p * p, v)),
    }
}

/// `sum_{|q| > K} vhat_N(p - q) w(q)` for two weights at once, by radial
/// nodes and an angular average.
fn angular_tail(model: &Model, abs_p: f64, w1: &[f64], w2: &[f64]) -> (f64, f64) {
    let ang = angular_rule();
    let grid = model.tail();
    let (mut a1, mut a2) = (crate::sum::KahanSum::new(), crate::sum::KahanSum::new());
    for (k, (&q, &wt)) in grid.nodes.iter().zip(&grid.weights).enumerate() {
        let mut avg = 0.0;
        for &(t, wa) in &ang {
            let d2 = (abs_p * abs_p + q * q - 2.0 * abs_p * q * t).max(0.0);
            avg += wa * model.v_at(d2.sqrt());
        }
        a1.add(wt * avg * w1[k]);
        a2.add(wt * avg * w2[k]);
    }
    (a1.value(), a2.value())
}

/// Helper sums of `E01`, kept for diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct E01Parts {
    /// `-(1/2N) sum_{p != q} vhat_N(p-q) (s_p c_p - eta_p)[s_q c_q + vhat_N(q)/q^2]`.
    pub first: f64,
    /// `(1/N) sum_{p != q} vhat_N(p)^2 vhat_N(p-q) s_q c_q / (S_p (p^2 + S_p))`.
    pub second: f64,
    /// Share of both sums coming from inner momenta beyond the cutoff.
    pub inner_tail: f64,
    /// Continuum estimate of the outer terms with `|p| > K2`, not included.
    pub outer_tail_estimate: f64,
}

impl E01Parts {
    pub fn total(&self) -> f64 {
        self.first + self.second
    }
}

/// `A_p = -(1/N) [2 vhat_N(p) (vhat_N * cs)_p + (vhat_N * cs)_p^2 / N]`.
pub fn a_p(model: &Model, t: &BogoliubovTables, i: usize) -> f64 {
    let x = t.conv_cs[i];
    -(2.0 * model.v(i) * x + x * x / model.n) / model.n
}

/// `B_p = A_p vhat_N(p) / (S_p (p^2 + S_p))`.
pub fn b_p(model: &Model, t: &BogoliubovTables, i: usize) -> f64 {
    let p2 = model.lattice.p2(i);
    let s = dispersion_closed(p2, model.v(i));
    a_p(model, t, i) * model.v(i) / (s * (p2 + s))
}

/// `E01` with the outer momentum in the `K2` ball and the inner momentum over
/// the full ball plus its continuum tail.
pub fn e01(model: &Model, t: &BogoliubovTables, k2: f64) -> E01Parts {
    let lat = &model.lattice;
    let m2 = lat.prefix_len(k2);
    let n = model.n;
    let w1: Vec<f64> = (0..t.len())
        .map(|i| t.cs[i] + model.v(i) / lat.p2(i))
        .collect();
    let q1 = model.convolve_offdiag(&w1);
    let q2 = &t.conv_cs;

    let grid = model.tail();
    let coeffs: Vec<_> = grid.nodes.iter().map(|&q| asymptotic(model, q)).collect();
    let w1_tail: Vec<f64> = coeffs
        .iter()
        .zip(&grid.nodes)
        .map(|(a, q)| a.c * a.s + a.v / (q * q))
        .collect();
    let w2_tail: Vec<f64> = coeffs.iter().map(|a| a.c * a.s).collect();
    // Angular averages depend on |p| only, so evaluate once per shell.
    let shells: Vec<_> = lat
        .shells()
        .iter()
        .take_while(|(_, r)| r.start < m2)
        .cloned()
        .collect();
    let shell_tails: Vec<(f64, f64)> = shells
        .par_iter()
        .map(|(n2, _)| {
            let ap = crate::lattice::TWO_PI * (*n2 as f64).sqrt();
            angular_tail(model, ap, &w1_tail, &w2_tail)
        })
        .collect();
    let mut tail1 = vec![0.0; m2];
    let mut tail2 = vec![0.0; m2];
    for ((_, r), (a, b)) in shells.iter().zip(&shell_tails) {
        for i in r.clone() {
            if i < m2 {
                tail1[i] = *a;
                tail2[i] = *b;
            }
        }
    }
    let outer1 = |i: usize| -sc_minus_eta(t.eta[i]) / (2.0 * n);
    let outer2 = |i: usize| {
        let p2 = lat.p2(i);
        let s = dispersion_closed(p2, model.v(i));
        model.v(i).powi(2) / (s * (p2 + s)) / n
    };
    let first = par_ksum(m2, |i| outer1(i) * (q1[i] + tail1[i]));
    let second = par_ksum(m2, |i| outer2(i) * (q2[i] + tail2[i]));
    let inner_tail = par_ksum(m2, |i| outer1(i) * tail1[i] + outer2(i) * tail2[i]);
    // Outer tail: p beyond K2 with the inner sums frozen at the boundary shell.
    let edge = shells.last().map(|(_, r)| r.start).unwrap_or(0);
    let q1_edge = q1[edge] + tail1[edge];
    let q2_edge = q2[edge] + tail2[edge];
    let k2_eff = crate::lattice::effective_radius(m2);
    let outer_tail_estimate = crate::tail::TailGrid::new(k2_eff, model.scale, model.pot.radius)
        .integrate(|p| {
            let a = asymptotic(model, p);
            let s = dispersion_closed(p * p, a.v);
            -sc_minus_eta(a.eta) / (2.0 * n) * q1_edge + a.v * a.v / (s * (p * p + s)) / n * q2_edge
        });
    E01Parts {
        first,
        second,
        inner_tail,
        outer_tail_estimate,
    }
}

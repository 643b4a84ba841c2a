//! Beyond-Bogoliubov pieces: the cubic vertex `f(p, q)`, `E_pert~`,
//! `<chi0, G2 chi0>`, the constant `C_{N,beta}` and `E_corr`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{add, DenseIndex, TWO_PI};
use crate::model::Model;
use crate::quadratic::{
    asymptotic, asymptotic_from, bogoliubov_ground_energy, constant_c, dispersion_closed, e00, e01,
    sc_minus_eta, BogoliubovTables, Coeffs, ConstantC, E01Parts, Split,
};
use crate::scattering::{scattering_length, ScatteringSolution};
use crate::sum::{ksum, par_ksum, KahanSum};
use crate::tail::{angular_rule, TailGrid};

/// End of the finite radial grid of the continuum part of `E_pert~`, in units
/// of `R |q| / N^beta`. Every term of `f` carries `vhat_N` at a large
/// momentum, so the summand decays like that argument to the power -8 and
/// the neglected part is below `1e-10` of the integral.
const PERT_DECAY_ARG: f64 = 24.0;

/// Amplitude of `a+_q a+_p a+_{-p-q}` in `U_tau G1~ U_tau* Omega`, times `sqrt(N)`.
///
/// `a`, `b`, `c` hold the coefficients at `p`, `q` and `p + q`. The value is
/// symmetric under every permutation of the three arguments.
#[inline]
pub fn f_vertex(a: &Coeffs, b: &Coeffs, c: &Coeffs) -> f64 {
    let rotated = a.v * (a.ct + a.st) * (c.ct * b.st + b.ct * c.st)
        + b.v * (b.ct + b.st) * (c.ct * a.st + a.ct * c.st)
        + c.v * (c.ct + c.st) * (a.ct * b.st + b.ct * a.st);
    let bare = a.v * a.c * (c.c * b.s + b.c * c.s)
        + b.v * b.c * (c.c * a.s + a.c * c.s)
        + c.v * c.c * (a.c * b.s + b.c * a.s);
    (c.c * a.c * b.c * rotated + (a.ct * b.ct * c.ct + a.st * b.st * c.st) * bare) / 6.0
}

/// `f(p, q)` for lattice points, with `p + q` looked up in the ball.
pub fn f_pq(model: &Model, t: &BogoliubovTables, p: [i32; 3], q: [i32; 3]) -> Result<f64> {
    let s = add(&p, &q);
    if p == [0; 3] || q == [0; 3] || s == [0; 3] {
        return Err(Error::ZeroMomentumArgument);
    }
    let coeff = |n: [i32; 3]| -> Coeffs {
        match model.lattice.index_of(&n) {
            Some(i) => t.coeffs(model, i),
            None => {
                let n2 = crate::lattice::dot(&n, &n) as f64;
                asymptotic(model, TWO_PI * n2.sqrt())
            }
        }
    };
    Ok(f_vertex(&coeff(p), &coeff(q), &coeff(s)))
}

#[inline]
fn pert_term(a: &Coeffs, b: &Coeffs, c: &Coeffs) -> f64 {
    let f = f_vertex(a, b, c);
    f * f / (a.e + b.e + c.e)
}

/// Pieces of `E_pert~ = -(6/N) sum_{p+q != 0} f(p,q)^2 / (e(p+q) + e(p) + e(q))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EPert {
    pub value: f64,
    /// Contribution with the inner momentum on the lattice ball.
    pub lattice: f64,
    /// Contribution with the inner momentum in the continuum beyond the ball.
    pub continuum: f64,
    /// Estimate of the omitted triples with all three momenta beyond `K2`.
    pub uncovered_estimate: f64,
}

/// Triples `(p, q, -p-q)` with at least one momentum in the `K2` ball.
///
/// Each triple is counted through its members inside the `K2` ball with
/// weight `1/m`, `m` the number of such members; symmetry of the summand then
/// gives the full sum as three times the sum over `p` in the `K2` ball.
pub fn e_pert_tilde(model: &Model, t: &BogoliubovTables, k2: f64) -> EPert {
    let lat = &model.lattice;
    let m2 = lat.prefix_len(k2);
    let n2_k2 = lat.norm2(m2.max(1) - 1);
    let nk2 = (n2_k2 as f64).sqrt().floor() as i32;
    let half = lat.nmax() + nk2;
    let dense = DenseIndex::new(lat, half);
    let coeffs: Vec<Coeffs> = (0..t.len()).map(|i| t.coeffs(model, i)).collect();
    let max_out = 3 * half * half;
    let outside: Vec<Coeffs> = (0..=max_out)
        .map(|n2| {
            if n2 == 0 {
                Coeffs::default()
            } else {
                asymptotic_from(
                    model.v_at(TWO_PI * (n2 as f64).sqrt()),
                    TWO_PI * TWO_PI * n2 as f64,
                )
            }
        })
        .collect();
    let in_k2 = |n2: i32| n2 <= n2_k2;

    // The inner sum at p is invariant under the cubic group, which preserves
    // the ball, the radial tables and the K2 weights; evaluate it once per
    // orbit, keyed by the sorted absolute components.
    let orbit_key = |n: [i32; 3]| {
        let mut k = n.map(i32::abs);
        k.sort_unstable();
        k
    };
    let mut reps: Vec<usize> = Vec::new();
    let mut rep_of = vec![0usize; m2];
    let mut seen = std::collections::HashMap::new();
    for (i, slot) in rep_of.iter_mut().enumerate() {
        *slot = *seen.entry(orbit_key(lat.n(i))).or_insert_with(|| {
            reps.push(i);
            reps.len() - 1
        });
    }
    let rep_values: Vec<f64> = reps
        .par_iter()
        .map(|&i| {
            let p = lat.n(i);
            let a = &coeffs[i];
            let mut acc = KahanSum::new();
            for (j, q) in lat.points().iter().enumerate() {
                let s = add(&p, q);
                if s == [0; 3] {
                    continue;
                }
                let s2 = crate::lattice::dot(&s, &s);
                let c = match dense.get(&s) {
                    Some(k) => &coeffs[k],
                    None => &outside[s2 as usize],
                };
                let m = 1 + in_k2(lat.norm2(j)) as i32 + in_k2(s2) as i32;
                acc.add(pert_term(a, &coeffs[j], c) / m as f64);
            }
            acc.value()
        })
        .collect();
    let lattice_part: Vec<f64> = rep_of.iter().map(|&r| rep_values[r]).collect();

    // Continuum inner momentum: coefficients at |q| and |p + q| are radial, so
    // precompute them per shell of the K2 ball.
    let grid = TailGrid::with_decay(
        model.lattice.effective_radius(),
        model.scale,
        model.pot.radius,
        PERT_DECAY_ARG,
    );
    let ang = angular_rule();
    let q_coeffs: Vec<Coeffs> = grid.nodes.iter().map(|&q| asymptotic(model, q)).collect();
    let bound_k2 = TWO_PI * (n2_k2 as f64).sqrt() * (1.0 + 1e-12);
    let shells: Vec<_> = lat
        .shells()
        .iter()
        .take_while(|(_, r)| r.start < m2)
        .cloned()
        .collect();
    let per_shell: Vec<f64> = shells
        .par_iter()
        .map(|(n2, range)| {
            let ap = TWO_PI * (*n2 as f64).sqrt();
            let mut s_coeffs = Vec::with_capacity(grid.len() * ang.len());
            for (k, &q) in grid.nodes.iter().enumerate() {
                for &(tc, wa) in &ang {
                    let s = (ap * ap + q * q + 2.0 * ap * q * tc).max(0.0).sqrt();
                    let m = 1 + (q <= bound_k2) as i32 + (s <= bound_k2) as i32;
                    s_coeffs.push((k, asymptotic(model, s), grid.weights[k] * wa / m as f64));
                }
            }
            let mut orbit_size = std::collections::BTreeMap::new();
            for i in range.clone() {
                *orbit_size.entry(reps[rep_of[i]]).or_insert(0usize) += 1;
            }
            let mut acc = KahanSum::new();
            for (&i, &count) in &orbit_size {
                let a = &coeffs[i];
                let mut inner = KahanSum::new();
                for (k, c, w) in &s_coeffs {
                    inner.add(w * pert_term(a, &q_coeffs[*k], c));
                }
                acc.add(count as f64 * inner.value());
            }
            acc.value()
        })
        .collect();
    let pref = -18.0 / model.n;
    let lattice_v = pref * ksum(lattice_part.iter().copied());
    let continuum_v = pref * ksum(per_shell.iter().copied());
    // Extrapolate the outermost shell, per point, with the p^-4 decay of the
    // summand. This overestimates the omitted region, which also needs the
    // other two momenta beyond K2.
    let uncovered_estimate = match shells.last() {
        Some((n2, range)) => {
            let edge = ksum(range.clone().map(|i| lattice_part[i])) + per_shell[shells.len() - 1];
            let per_point = pref * edge / range.len() as f64;
            let k = TWO_PI * (*n2 as f64).sqrt();
            let k2_eff = crate::lattice::effective_radius(m2);
            per_point * k.powi(4) / (2.0 * PI * PI * k2_eff)
        }
        None => 0.0,
    };
    EPert {
        value: lattice_v + continuum_v,
        lattice: lattice_v,
        continuum: continuum_v,
        uncovered_estimate,
    }
}

/// `E_pert~` with all of `p`, `q`, `p + q` restricted to the ball.
pub fn e_pert_restricted(model: &Model, t: &BogoliubovTables) -> f64 {
    let lat = &model.lattice;
    let coeffs: Vec<Coeffs> = (0..t.len()).map(|i| t.coeffs(model, i)).collect();
    let s = par_ksum(lat.len(), |i| {
        let p = lat.n(i);
        let mut acc = KahanSum::new();
        for (j, q) in lat.points().iter().enumerate() {
            let s = add(&p, q);
            if s == [0; 3] {
                continue;
            }
            if let Some(k) = lat.index_of(&s) {
                acc.add(pert_term(&coeffs[i], &coeffs[j], &coeffs[k]));
            }
        }
        acc.value()
    });
    -6.0 / model.n * s
}

/// Both Wick contractions of `<chi0, G2 chi0>`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct G2Expectation {
    /// `(1/2N) sum v(r) c_{p+r}^2 c_p^2 st_{p+r} st_p ct_{p+r} ct_p`.
    pub direct: f64,
    /// `(1/2N) sum v(r) c_{p+r}^2 c_p^2 st_{p+r}^2 st_p^2`.
    pub exchange: f64,
}

impl G2Expectation {
    pub fn total(&self) -> f64 {
        self.direct + self.exchange
    }
}

/// `<chi0, G2 chi0>` over the ball, `p` and `p + r` both in the ball.
pub fn g2_expectation(model: &Model, t: &BogoliubovTables) -> G2Expectation {
    let m = t.len();
    let h: Vec<f64> = (0..m)
        .map(|i| t.c[i] * t.c[i] * t.st[i] * t.ct[i])
        .collect();
    let h2: Vec<f64> = (0..m).map(|i| (t.c[i] * t.st[i]).powi(2)).collect();
    let (ch, ch2) = model.convolve_offdiag_pair(&h, &h2);
    let k = 0.5 / model.n;
    G2Expectation {
        direct: k * par_ksum(m, |i| h[i] * ch[i]),
        exchange: k * par_ksum(m, |i| h2[i] * ch2[i]),
    }
}

/// Inner sum `sum_{p != 0} vhat_N(p)^2 / (2 p^2)` of `E_corr`.
pub fn inner_sum(model: &Model) -> Split {
    Split {
        ball: par_ksum(model.len(), |i| {
            model.v(i).powi(2) / (2.0 * model.lattice.p2(i))
        }),
        tail: model
            .tail()
            .integrate(|p| model.v_at(p).powi(2) / (2.0 * p * p)),
    }
}

/// `C_{N,beta} = C1 + C2` with the pieces kept apart.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CConstant {
    /// `(1/2) sum (s c - eta)`.
    pub c1_eta: Split,
    /// `vhat(0)^2 sum 1 / (S_0 (p^2 + S_0))`, `S_0 = sqrt(p^4 + 2 p^2 vhat(0))`.
    pub c1_v0: Split,
    /// `4 sum (c st + ct s)^2`.
    pub c2: Split,
    /// `4 sum (c st + 2 ct s)^2`, the coefficient as printed in the theorem.
    pub c2_as_printed: Split,
}

impl CConstant {
    pub fn c1(&self) -> f64 {
        self.c1_eta.total() + self.c1_v0.total()
    }

    pub fn c2(&self) -> f64 {
        self.c2.total()
    }

    pub fn total(&self) -> f64 {
        self.c1() + self.c2()
    }
}

pub fn c1_v0_summand(p2: f64, v0: f64) -> f64 {
    let s = dispersion_closed(p2, v0);
    v0 * v0 / (s * (p2 + s))
}

pub fn c_constant(model: &Model, t: &BogoliubovTables) -> CConstant {
    let m = t.len();
    let v0 = model.v0();
    let tail = model.tail();
    let c2_term = |c: f64, st: f64, ct: f64, s: f64, k: f64| 4.0 * (c * st + k * ct * s).powi(2);
    let c2_split = |k: f64| Split {
        ball: par_ksum(m, |i| c2_term(t.c[i], t.st[i], t.ct[i], t.s[i], k)),
        tail: tail.integrate(|p| {
            let a = asymptotic(model, p);
            c2_term(a.c, a.st, a.ct, a.s, k)
        }),
    };
    CConstant {
        c1_eta: Split {
            ball: 0.5 * par_ksum(m, |i| sc_minus_eta(t.eta[i])),
            tail: 0.5 * tail.integrate(|p| sc_minus_eta(asymptotic(model, p).eta)),
        },
        c1_v0: Split {
            ball: par_ksum(m, |i| c1_v0_summand(model.lattice.p2(i), v0)),
            tail: tail.integrate(|p| c1_v0_summand(p * p, v0)),
        },
        c2: c2_split(1.0),
        c2_as_printed: c2_split(2.0),
    }
}

/// `E_corr = C_{N,beta} * (-(1/2N) sum vhat_N(p)^2 / (2 p^2))`.
pub fn e_corr(c: f64, model: &Model) -> f64 {
    c * (-inner_sum(model).total() / (2.0 * model.n))
}

/// `sum sinh^2(eta_p + tau_p)`, the expected number of excitations.
pub fn depletion(model: &Model, t: &BogoliubovTables) -> Split {
    Split {
        ball: par_ksum(t.len(), |i| (t.eta[i] + t.tau[i]).sinh().powi(2)),
        tail: model.tail().integrate(|p| {
            let a = asymptotic(model, p);
            (a.eta + a.tau).sinh().powi(2)
        }),
    }
}

/// Continuum tails of the single sums, reported next to the totals.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Tails {
    pub vhat_eta: f64,
    pub e00: f64,
    pub e0: f64,
    pub constant_c: f64,
    pub c1: f64,
    pub c2: f64,
    pub inner_sum: f64,
    pub depletion: f64,
    pub e01_inner: f64,
}

/// Diagnostics and truncation metadata attached to every report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub radius: f64,
    pub cutoff_k: f64,
    pub cutoff_k2: f64,
    pub lattice_points: usize,
    pub k2_points: usize,
    pub k_eff: f64,
    pub scattering_iterations: usize,
    pub scattering_residual: f64,
    pub scattering_damping: f64,
    pub tails: Tails,
    pub e01_parts: E01Parts,
    pub e_pert_parts: EPert,
    pub g2_parts: G2Expectation,
    pub c_parts: CConstant,
    pub constant_c_parts: ConstantC,
    pub c2_as_printed: f64,
    /// `sum vhat_N(p)^2 / (2 p^2)`, ball plus tail.
    pub inner_sum: f64,
    pub depletion_fraction: f64,
    /// `|total_A - total_B|` evaluated directly, without removing the common
    /// mean-field term first.
    pub route_discrepancy_naive: f64,
}

/// Energy expansion at one `(N, beta, kappa, R, K, K2)`.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    #[serde(rename = "N")]
    pub n: f64,
    pub beta: f64,
    pub kappa: f64,
    pub a_box: f64,
    /// `4 pi (N - 1) a`.
    pub leading: f64,
    #[serde(rename = "E00")]
    pub e00: f64,
    #[serde(rename = "E01")]
    pub e01: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "E_corr")]
    pub e_corr: f64,
    pub g2_expect: f64,
    pub e_pert_tilde: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "C_const")]
    pub c_const: f64,
    /// `leading + E00 + E_corr`.
    #[serde(rename = "total_A")]
    pub total_a: f64,
    /// `C + E0 + E_pert~ + g2_expect`.
    #[serde(rename = "total_B")]
    pub total_b: f64,
    pub route_discrepancy: f64,
    pub depletion: f64,
    pub t_scatter_ms: f64,
    pub t_sums_ms: f64,
    pub meta: ReportMeta,
}

/// Assembles the report from a solved model.
///
/// The route discrepancy drops the mean-field term `(N - 1) vhat(0) / 2`
/// shared by both totals before subtracting, so it is not swamped by the
/// rounding of an `O(N)` number.
pub fn assemble_report(
    model: &Model,
    sol: &ScatteringSolution,
    t: &BogoliubovTables,
    k2: f64,
) -> Result<EnergyReport> {
    let m = model.len();
    if sol.eta.len() != m || t.len() != m {
        return Err(Error::InconsistentLattice(format!(
            "lattice has {m} points, scattering table {}, Bogoliubov tables {}",
            sol.eta.len(),
            t.len()
        )));
    }
    if k2 > model.lattice.cutoff() * (1.0 + 1e-12) {
        return Err(Error::InconsistentLattice(format!(
            "K2 = {k2} exceeds K = {}",
            model.lattice.cutoff()
        )));
    }
    let n = model.n;
    let a = scattering_length(model, sol);
    let leading_reduced = 0.5 * (n - 1.0) / n * (a.ball_sum + a.tail_sum);
    let leading = 0.5 * (n - 1.0) * (model.v0() + (a.ball_sum + a.tail_sum) / n);
    let e00 = e00(model);
    let e01 = e01(model, t, k2);
    let cc = c_constant(model, t);
    let inner = inner_sum(model);
    let corr = cc.total() * (-inner.total() / (2.0 * n));
    let g2 = g2_expectation(model, t);
    let pert = e_pert_tilde(model, t, k2);
    let e0 = bogoliubov_ground_energy(model, t);
    let big_c = constant_c(model, t);
    let depl = depletion(model, t);
    let total_a = leading + e00.total() + corr;
    let total_b = big_c.total() + e0.total() + pert.value + g2.total();
    let route_a = ksum([leading_reduced, e00.total(), corr]);
    let route_b = ksum([big_c.reduced(), e0.total(), pert.value, g2.total()]);
    Ok(EnergyReport {
        n,
        beta: model.beta,
        kappa: model.pot.kappa,
        a_box: a.a_box,
        leading,
        e00: e00.total(),
        e01: e01.total(),
        c1: cc.c1(),
        c2: cc.c2(),
        e_corr: corr,
        g2_expect: g2.total(),
        e_pert_tilde: pert.value,
        e0: e0.total(),
        c_const: big_c.total(),
        total_a,
        total_b,
        route_discrepancy: (route_a - route_b).abs(),
        depletion: depl.total(),
        t_scatter_ms: 0.0,
        t_sums_ms: 0.0,
        meta: ReportMeta {
            radius: model.pot.radius,
            cutoff_k: model.lattice.cutoff(),
            cutoff_k2: k2,
            lattice_points: m,
            k2_points: model.lattice.prefix_len(k2),
            k_eff: model.tail().k_eff,
            scattering_iterations: sol.iterations,
            scattering_residual: sol.residual,
            scattering_damping: sol.damping,
            tails: Tails {
                vhat_eta: a.tail_sum,
                e00: e00.tail,
                e0: e0.tail,
                constant_c: big_c.kinetic.tail + big_c.pairing.tail + big_c.cubic.tail,
                c1: cc.c1_eta.tail + cc.c1_v0.tail,
                c2: cc.c2.tail,
                inner_sum: inner.tail,
                depletion: depl.tail,
                e01_inner: e01.inner_tail,
            },
            e01_parts: e01,
            e_pert_parts: pert,
            g2_parts: g2,
            c_parts: cc,
            constant_c_parts: big_c,
            c2_as_printed: cc.c2_as_printed.total(),
            inner_sum: inner.total(),
            depletion_fraction: depl.total() / n,
            route_discrepancy_naive: (total_a - total_b).abs(),
        },
    })
}

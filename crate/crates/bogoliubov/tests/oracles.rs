//! Closed forms and fast paths against independent brute-force evaluations.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector};

use bogoliubov::corrections::{e_pert_tilde, g2_expectation, inner_sum};
use bogoliubov::lattice::{LatticeBall, TWO_PI};
use bogoliubov::quadratic::{asymptotic, e01, BogoliubovTables, Coeffs};
use bogoliubov::scattering::{eta_tail, residual, scattering_length, solve_eta};
use bogoliubov::{Model, Potential};

fn model(kappa: f64, radius: f64, k: f64, n: f64, beta: f64) -> Model {
    Model::new(Potential::new(kappa, radius).unwrap(), k, n, beta).unwrap()
}

fn diff(a: [i32; 3], b: [i32; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    TWO_PI * ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64).sqrt()
}

/// `sinh(x) cosh(x) - x` by its Taylor series.
fn sc_minus_x(x: f64) -> f64 {
    let y = 2.0 * x;
    let (mut term, mut acc, mut k) = (y * y * y / 6.0, 0.0, 3.0);
    while term.abs() > 1e-300 && k < 80.0 {
        acc += term;
        term *= y * y / ((k + 1.0) * (k + 2.0));
        k += 2.0;
    }
    0.5 * acc
}

#[test]
fn lattice_count_radius_ten() {
    let lat = LatticeBall::new(TWO_PI * 10.0).unwrap();
    let mut count = 0;
    for x in -10i32..=10 {
        for y in -10i32..=10 {
            for z in -10i32..=10 {
                let r2 = x * x + y * y + z * z;
                count += (r2 > 0 && r2 <= 100) as usize;
            }
        }
    }
    assert_eq!(count, 4168);
    assert_eq!(lat.len(), count);
}

#[test]
fn vhat_against_radial_quadrature() {
    let (kappa, r, k) = (1.0, 0.4, TWO_PI);
    let rule = GaussLegendre::new(60).unwrap();
    // indicator transform 4 pi int_0^R r^2 sin(kr)/(kr) dr, on 8 panels
    let mut ind = 0.0;
    for j in 0..8 {
        let (a, b) = (r * j as f64 / 8.0, r * (j + 1) as f64 / 8.0);
        ind += rule.integrate(a, b, |x| 4.0 * PI * x * x * (k * x).sin() / (k * x));
    }
    let expect = kappa * ind * ind;
    let got = Potential { kappa, radius: r }.vhat(k);
    assert!((got / expect - 1.0).abs() <= 1e-10, "{got} {expect}");
}

/// Solves `2 p^2 eta_p + (1/N) sum_q vhat_N(p - q) eta_q = -vhat_N(p)` densely.
fn dense_eta(m: &Model) -> Vec<f64> {
    let lat = &m.lattice;
    let len = lat.len();
    let a = DMatrix::from_fn(len, len, |i, j| {
        let v = m.pot.vhat(diff(lat.n(i), lat.n(j)) / m.scale) / m.n;
        v + if i == j { 2.0 * lat.p2(i) } else { 0.0 }
    });
    let b = DVector::from_fn(len, |i, _| -m.pot.vhat(lat.abs_p(i) / m.scale));
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

#[test]
fn eta_matches_dense_solve_first_shell() {
    let m = model(0.5, 0.2, TWO_PI, 100.0, 0.6);
    let sol = solve_eta(&m, 1e-14, 200).unwrap();
    let dense = dense_eta(&m);
    assert_eq!(dense.len(), 6);
    for (a, b) in sol.eta.iter().zip(&dense) {
        assert!((a - b).abs() <= 1e-12, "{a} {b}");
    }
}

#[test]
fn eta_matches_dense_solve_up_to_200_points() {
    for (k2, kappa) in [(2, 3.0), (3, 10.0), (5, 30.0), (9, 30.0), (11, 100.0)] {
        let m = model(kappa, 0.25, TWO_PI * (k2 as f64).sqrt(), 1000.0, 0.7);
        assert!(m.len() <= 200);
        let sol = solve_eta(&m, 1e-11, 200).unwrap();
        let dense = dense_eta(&m);
        let err = sol
            .eta
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-9, "K^2 = {k2}: {err}");
    }
}

#[test]
fn residual_of_born_table_matches_double_loop() {
    let m = model(2.0, 0.25, TWO_PI * 3.0, 500.0, 0.7);
    let lat = &m.lattice;
    let born: Vec<f64> = (0..lat.len())
        .map(|i| -m.v(i) / (2.0 * lat.p2(i)))
        .collect();
    let mut expect = 0.0f64;
    for i in 0..lat.len() {
        let mut s = 0.0;
        for j in 0..lat.len() {
            s += m.pot.vhat(diff(lat.n(i), lat.n(j)) / m.scale) * born[j];
        }
        expect = expect.max((s / (2.0 * m.n)).abs());
    }
    let got = residual(&m, &born);
    // p^2 eta + v/2 cancels to rounding of v, not of the residual.
    assert!(
        (got - expect).abs() <= 1e-15 * m.v0() + 1e-12 * expect,
        "{got} {expect}"
    );
}

#[test]
fn fft_convolution_matches_double_loop() {
    // Large enough for the FFT path.
    let m = model(1.0, 0.25, TWO_PI * 12.0, 1e4, 0.75);
    let lat = &m.lattice;
    assert!(lat.len() > bogoliubov::conv::DIRECT_LIMIT);
    let h = |i: usize| ((i * 7919) % 1009) as f64 / 1009.0 - 0.5;
    let x: Vec<f64> = (0..lat.len()).map(|i| h(i) + h(lat.neg(i))).collect();
    let fast = m.convolve(&x);
    let pts = lat.points();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in (0..lat.len()).step_by(37) {
        let mut s = 0.0;
        for j in 0..lat.len() {
            s += m.pot.vhat(diff(pts[i], pts[j]) / m.scale) * x[j];
        }
        worst = worst.max((fast[i] - s).abs());
        scale = scale.max(s.abs());
    }
    assert!(worst <= 1e-12 * scale, "{worst} {scale}");
}

fn solved(kappa: f64, k: f64, n: f64) -> (Model, BogoliubovTables) {
    let m = model(kappa, 0.25, k, n, 0.7);
    let sol = solve_eta(&m, 1e-13, 300).unwrap();
    let t = BogoliubovTables::build(&m, &sol).unwrap();
    (m, t)
}

#[test]
fn e01_ball_part_matches_double_loop() {
    let (m, t) = solved(200.0, TWO_PI * 3.0, 500.0);
    let lat = &m.lattice;
    let k2 = TWO_PI * 2.0;
    let parts = e01(&m, &t, k2);
    let (mut first, mut second) = (0.0, 0.0);
    for i in 0..lat.len() {
        if lat.abs_p(i) > k2 * (1.0 + 1e-12) {
            continue;
        }
        let (p2, v) = (lat.p2(i), m.v(i));
        let s = (p2 * p2 + 2.0 * p2 * v).sqrt();
        let (mut q1, mut q2) = (0.0, 0.0);
        for j in 0..lat.len() {
            if j == i {
                continue;
            }
            let w = m.pot.vhat(diff(lat.n(i), lat.n(j)) / m.scale);
            let cs = t.eta[j].sinh() * t.eta[j].cosh();
            q1 += w * (cs + m.v(j) / lat.p2(j));
            q2 += w * cs;
        }
        first += -sc_minus_x(t.eta[i]) / (2.0 * m.n) * q1;
        second += v * v / (s * (p2 + s)) / m.n * q2;
    }
    let got = parts.total() - parts.inner_tail;
    let expect = first + second;
    assert!((got / expect - 1.0).abs() < 1e-10, "{got} {expect}");
}

#[test]
fn g2_matches_double_loop() {
    let (m, t) = solved(200.0, TWO_PI * 3.0, 500.0);
    let lat = &m.lattice;
    let (mut direct, mut exchange) = (0.0, 0.0);
    for i in 0..lat.len() {
        for j in 0..lat.len() {
            if i == j {
                continue;
            }
            let w = m.pot.vhat(diff(lat.n(i), lat.n(j)) / m.scale);
            let (ci, cj) = (t.eta[i].cosh(), t.eta[j].cosh());
            let (si, sj) = ((t.tau[i]).sinh(), (t.tau[j]).sinh());
            let (ki, kj) = ((t.tau[i]).cosh(), (t.tau[j]).cosh());
            direct += w * ci * ci * cj * cj * si * ki * sj * kj;
            exchange += w * (ci * si * cj * sj).powi(2);
        }
    }
    let g = g2_expectation(&m, &t);
    let k = 0.5 / m.n;
    assert!((g.direct / (k * direct) - 1.0).abs() < 1e-11);
    assert!((g.exchange / (k * exchange) - 1.0).abs() < 1e-11);
}

#[test]
fn inner_sum_ball_matches_loop() {
    let m = model(0.1, 0.25, TWO_PI * 5.0, 1e4, 0.75);
    let mut s = 0.0;
    for i in 0..m.len() {
        let v = m.pot.vhat(m.lattice.abs_p(i) / m.scale);
        s += v * v / (2.0 * m.lattice.p2(i));
    }
    assert!((inner_sum(&m).ball / s - 1.0).abs() < 1e-13);
}

/// `-(18/N) sum_{p in K2} sum_q f^2 / (e + e + e) / m` with `q` over a large
/// lattice box instead of the ball plus continuum.
#[test]
fn e_pert_against_extended_lattice_sum() {
    // Small N^beta so the potential has decayed well inside the box.
    let m = model(300.0, 0.25, TWO_PI * 4.0, 100.0, 0.5);
    let t = BogoliubovTables::build(&m, &solve_eta(&m, 1e-13, 300).unwrap()).unwrap();
    let lat = &m.lattice;
    let k2 = TWO_PI * 2.0;
    let coeff = |n: [i32; 3]| -> Coeffs {
        match lat.index_of(&n) {
            Some(i) => t.coeffs(&m, i),
            None => asymptotic(
                &m,
                TWO_PI * ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64).sqrt(),
            ),
        }
    };
    let in_k2 = |n: [i32; 3]| n[0] * n[0] + n[1] * n[1] + n[2] * n[2] <= 4;
    let box_half = 40;
    let mut acc = 0.0;
    for &p in lat.points().iter().filter(|&&p| in_k2(p)) {
        let a = coeff(p);
        for x in -box_half..=box_half {
            for y in -box_half..=box_half {
                for z in -box_half..=box_half {
                    let q = [x, y, z];
                    let s = [p[0] + x, p[1] + y, p[2] + z];
                    if q == [0; 3] || s == [0; 3] {
                        continue;
                    }
                    let (b, c) = (coeff(q), coeff(s));
                    let f = bogoliubov::corrections::f_vertex(&a, &b, &c);
                    let mult = 1 + in_k2(q) as i32 + in_k2(s) as i32;
                    acc += f * f / (a.e + b.e + c.e) / mult as f64;
                }
            }
        }
    }
    let expect = -18.0 / m.n * acc;
    let got = e_pert_tilde(&m, &t, k2).value;
    // The continuum stands in for lattice q beyond K; measured gap 7e-4.
    assert!((got / expect - 1.0).abs() < 2e-3, "{got} {expect}");
}

#[test]
fn eta_tail_at_boundary_shell() {
    let (n, beta) = (1e4, 0.75);
    let m = model(0.1, 0.25, TWO_PI * 10.0, n, beta);
    let sol = solve_eta(&m, 1e-11, 200).unwrap();
    let lat = &m.lattice;
    let bound = 5.0 * n.powf(beta - 1.0) * m.v0();
    let (_, last) = lat.shells().last().unwrap().clone();
    for i in last {
        let gap = (sol.eta[i] - eta_tail(&m, lat.abs_p(i))).abs();
        assert!(gap <= bound / lat.p2(i), "{gap}");
    }
}

#[test]
fn scattering_length_below_vhat0() {
    let m = model(0.1, 0.25, TWO_PI * 10.0, 1e4, 0.75);
    let sol = solve_eta(&m, 1e-11, 200).unwrap();
    let a = scattering_length(&m, &sol);
    assert!(8.0 * PI * a.a_box < m.v0());
    assert!(a.ball_sum < 0.0 && a.tail_sum < 0.0);
}

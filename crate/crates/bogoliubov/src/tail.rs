//! Continuum estimates of lattice sums outside a momentum ball.
//!
//! A lattice sum of a radial summand over `|p| > K` is replaced by
//! `(2 pi)^-3 * integral_{|p| > k_eff} g(|p|) d^3p`, where `k_eff` is the
//! radius of the continuum ball whose volume matches the number of cells
//! inside the lattice ball.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::sum::KahanSum;

const SEGMENT_NODES: usize = 16;
const ANGLE_NODES: usize = 16;
const GEOMETRIC_RATIO: f64 = 1.5;
/// `vhat(u)^2` has decayed below `1e-8 vhat(0)^2` once `R u` exceeds this.
const DECAY_ARG: f64 = 200.0;

fn legendre(n: usize) -> &'static [(f64, f64)] {
    static SEG: OnceLock<GaussLegendre> = OnceLock::new();
    static ANG: OnceLock<GaussLegendre> = OnceLock::new();
    let cell = if n == SEGMENT_NODES { &SEG } else { &ANG };
    cell.get_or_init(|| GaussLegendre::new(n).expect("degree >= 2"))
        .as_node_weight_pairs()
}

/// Radial nodes and measure weights for `|p| > k_eff`.
///
/// `sum_i weight_i g(node_i)` approximates `(2 pi^2)^-1 * int p^2 g(p) dp`.
#[derive(Debug, Clone)]
pub struct TailGrid {
    pub k_eff: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TailGrid {
    /// `scale` is `N^beta` and `radius` the potential radius; together they
    /// set the oscillation length and the decay point of `vhat_N`.
    pub fn new(k_eff: f64, scale: f64, radius: f64) -> Self {
        Self::with_decay(k_eff, scale, radius, DECAY_ARG)
    }

    /// Grid whose finite part ends where `R |p| / N^beta = decay`.
    pub fn with_decay(k_eff: f64, scale: f64, radius: f64, decay: f64) -> Self {
        let p_max = (scale * decay / radius).max(8.0 * k_eff);
        // One period of the `vhat_N` oscillation per segment.
        let width = scale * PI / radius;
        let rule = legendre(SEGMENT_NODES);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut a = k_eff;
        while a < p_max {
            let b = (a * GEOMETRIC_RATIO).min(a + width).min(p_max);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            for &(x, w) in rule {
                let p = mid + half * x;
                nodes.push(p);
                weights.push(w * half * p * p / (2.0 * PI * PI));
            }
            a = b;
        }
        // [p_max, inf) through p = p_max / x, x in (0, 1].
        for &(x, w) in rule {
            let t = 0.5 * (x + 1.0);
            let p = p_max / t;
            nodes.push(p);
            weights.push(0.5 * w * p_max / (t * t) * p * p / (2.0 * PI * PI));
        }
        Self {
            k_eff,
            nodes,
            weights,
        }
    }

    /// Continuum estimate of `sum_{|p| > K} g(|p|)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        let mut acc = KahanSum::new();
        for (p, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * g(*p));
        }
        acc.value()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes `t` and weights (summing to 1) for the angular average over
/// `cos(angle) in [-1, 1]`.
pub fn angular_rule() -> Vec<(f64, f64)> {
    legendre(ANGLE_NODES)
        .iter()
        .map(|&(t, w)| (t, 0.5 * w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_tail() {
        // sum over |p| > k of p^-4 in the continuum: 1 / (2 pi^2 k)
        let g = TailGrid::new(10.0, 100.0, 0.25);
        let v = g.integrate(|p| p.powi(-4));
        let exact = 1.0 / (2.0 * PI * PI * 10.0);
        assert!((v / exact - 1.0).abs() < 1e-13, "{v} {exact}");
    }

    #[test]
    fn oscillating_tail() {
        // squared ball profile over p^2, the shape of the Born tails
        let (k, s, r) = (5.0, 40.0, 0.25);
        let g = TailGrid::new(k, s, r);
        let f = |p: f64| crate::potential::ball_profile(r * p / s).powi(2) / (p * p);
        let v = g.integrate(f);
        let fine = GaussLegendre::new(200).unwrap();
        let mut reference = 0.0;
        let mut a = k;
        while a < 1e7 {
            let b = (a * 1.05).min(a + 20.0);
            reference += fine.integrate(a, b, |p| p * p * f(p));
            a = b;
        }
        reference /= 2.0 * PI * PI;
        assert!((v / reference - 1.0).abs() < 1e-7, "{v} {reference}");
    }

    #[test]
    fn angular_weights_normalized() {
        let s: f64 = angular_rule().iter().map(|x| x.1).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }
}

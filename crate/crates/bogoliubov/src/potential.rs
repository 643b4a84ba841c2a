//! Ball self-convolution potential `v = kappa * 1_{B_R} * 1_{B_R}` and its
//! Fourier transform at scaled momenta.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeBall;

/// Radial positive-type pair potential with closed-form Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub kappa: f64,
    pub radius: f64,
}

impl Potential {
    pub fn new(kappa: f64, radius: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must be >= 0"
            )));
        }
        if !(radius > 0.0 && radius <= 0.25) {
            return Err(Error::InvalidParameter(format!(
                "R = {radius} must lie in (0, 1/4]"
            )));
        }
        Ok(Self { kappa, radius })
    }

    /// `vhat(0) = kappa * |B_R|^2`.
    pub fn vhat0(&self) -> f64 {
        let vol = 4.0 * PI * self.radius.powi(3) / 3.0;
        self.kappa * vol * vol
    }

    /// `vhat(p) = kappa * [4 pi R^3 g(R|p|)]^2` with `g(r) = (sin r - r cos r)/r^3`.
    pub fn vhat(&self, abs_p: f64) -> f64 {
        let b = 4.0 * PI * self.radius.powi(3) * ball_profile(self.radius * abs_p);
        self.kappa * b * b
    }

    /// `vhat(p / N^beta)`.
    pub fn vhat_scaled(&self, abs_p: f64, scale: f64) -> f64 {
        self.vhat(abs_p / scale)
    }
}

/// `(sin r - r cos r) / r^3`, continued by its power series near zero.
pub fn ball_profile(r: f64) -> f64 {
    let r = r.abs();
    if r < 0.5 {
        // sum_k (-1)^(k+1) 2k r^(2k-2) / (2k+1)!
        let r2 = r * r;
        let mut term = 1.0 / 3.0;
        let mut acc = term;
        let mut k = 1.0f64;
        while k < 12.0 {
            let next = -term * r2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
            acc += next;
            term = next;
            k += 1.0;
        }
        acc
    } else {
        (r.sin() - r * r.cos()) / (r * r * r)
    }
}

/// Scaling factor `N^beta` after validating the exponent.
pub fn scale_factor(n: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BetaOutOfRange(beta));
    }
    if !(n >= 2.0) {
        return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
    }
    Ok(n.powf(beta))
}

/// `vhat_N(p) = vhat(p / N^beta)` on every point of a lattice ball and at zero.
#[derive(Debug, Clone)]
pub struct ScaledPotentialTable {
    pub n: f64,
    pub beta: f64,
    pub scale: f64,
    pub at_zero: f64,
    pub values: Vec<f64>,
}

impl ScaledPotentialTable {
    pub fn new(pot: &Potential, lattice: &LatticeBall, n: f64, beta: f64) -> Result<Self> {
        let scale = scale_factor(n, beta)?;
        let values = (0..lattice.len())
            .map(|i| pot.vhat_scaled(lattice.abs_p(i), scale))
            .collect();
        Ok(Self {
            n,
            beta,
            scale,
            at_zero: pot.vhat0(),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TWO_PI;

    #[test]
    fn value_at_zero() {
        let p = Potential::new(1.0, 0.2).unwrap();
        let expect = (4.0 * PI * 0.008 / 3.0f64).powi(2);
        assert!((p.vhat(0.0) - expect).abs() < 1e-16);
        assert_eq!(p.vhat0(), p.vhat(0.0));
    }

    #[test]
    fn unit_ball_value() {
        // Radius 1 is outside the torus regime, so bypass the constructor.
        let p = Potential {
            kappa: 1.0,
            radius: 1.0,
        };
        assert!((p.vhat(0.0) - (4.0 * PI / 3.0f64).powi(2)).abs() < 1e-12);
        assert!((p.vhat(0.0) - 17.5460).abs() < 1e-4);
    }

    #[test]
    fn zero_coupling() {
        let p = Potential::new(0.0, 0.2).unwrap();
        for k in [0.0, 1.0, 100.0] {
            assert_eq!(p.vhat(k), 0.0);
        }
    }

    #[test]
    fn series_matches_closed_form_at_switch() {
        for r in [0.3f64, 0.45, 0.4999] {
            let direct = (r.sin() - r * r.cos()) / (r * r * r);
            assert!((ball_profile(r) - direct).abs() < 1e-15);
        }
        let r = 0.5f64;
        let series_side = ball_profile(r - 1e-13);
        assert!((series_side - ball_profile(r)).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Potential::new(-1.0, 0.2).is_err());
        assert!(Potential::new(1.0, 0.3).is_err());
        assert_eq!(
            scale_factor(100.0, 1.2).unwrap_err(),
            Error::BetaOutOfRange(1.2)
        );
    }

    #[test]
    fn large_n_limit() {
        let p = Potential::new(1.0, 0.2).unwrap();
        let s = scale_factor(1e8, 0.9).unwrap();
        let v = p.vhat_scaled(TWO_PI, s);
        assert!((v - p.vhat0()).abs() <= 1e-6 * p.vhat0());
    }

    #[test]
    fn scaled_table_path() {
        let pot = Potential::new(0.7, 0.2).unwrap();
        let lat = LatticeBall::new(TWO_PI).unwrap();
        let t = ScaledPotentialTable::new(&pot, &lat, 1e3, 0.5).unwrap();
        let i = lat.index_of(&[1, 0, 0]).unwrap();
        assert_eq!(t.values[i], pot.vhat(TWO_PI / 1e3f64.sqrt()));
        assert_eq!(t.at_zero, pot.vhat0());
    }
}

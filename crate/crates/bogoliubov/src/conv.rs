//! Lattice convolution `(k * x)_p = sum_{q in ball} k(p - q) x_q`.
//!
//! Small balls use a direct double loop. Larger balls use a circular FFT on a
//! cubic grid of side `L >= 4 nmax + 1`, which is wide enough that differences
//! `p - q` never alias.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::lattice::{LatticeBall, TWO_PI};
use crate::potential::Potential;
use crate::sum::KahanSum;

/// Ball size at or below which the direct loop is used.
pub const DIRECT_LIMIT: usize = 5000;

/// Kernel values `k(2 pi d)` on the cube `|d_i| <= 2 nmax`.
#[derive(Debug, Clone)]
pub struct Kernel {
    half: i32,
    side: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn from_fn<F: Fn([i32; 3]) -> f64 + Sync>(nmax: i32, f: F) -> Self {
        let half = 2 * nmax;
        let side = (2 * half + 1) as usize;
        let data = (0..side * side * side)
            .into_par_iter()
            .map(|lin| {
                let x = (lin / (side * side)) as i32 - half;
                let y = ((lin / side) % side) as i32 - half;
                let z = (lin % side) as i32 - half;
                f([x, y, z])
            })
            .collect();
        Self { half, side, data }
    }

    /// `vhat(2 pi |d| / scale)` for all differences of points in `lattice`.
    pub fn scaled_potential(pot: &Potential, lattice: &LatticeBall, scale: f64) -> Self {
        Self::from_fn(lattice.nmax(), |d| {
            let n2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64;
            pot.vhat_scaled(TWO_PI * n2.sqrt(), scale)
        })
    }

    #[inline]
    pub fn get(&self, d: [i32; 3]) -> f64 {
        let s = self.side;
        let ix = (d[0] + self.half) as usize;
        let iy = (d[1] + self.half) as usize;
        let iz = (d[2] + self.half) as usize;
        self.data[(ix * s + iy) * s + iz]
    }

    pub fn half(&self) -> i32 {
        self.half
    }
}

/// Direct `O(M^2)` convolution, each output summed in canonical order.
pub fn convolve_direct(lattice: &LatticeBall, kernel: &Kernel, x: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), lattice.len());
    assert!(kernel.half() >= 2 * lattice.nmax());
    (0..lattice.len())
        .into_par_iter()
        .map(|i| {
            let p = lattice.n(i);
            let mut acc = KahanSum::new();
            for (j, q) in lattice.points().iter().enumerate() {
                acc.add(kernel.get([p[0] - q[0], p[1] - q[1], p[2] - q[2]]) * x[j]);
            }
            acc.value()
        })
        .collect()
}

/// FFT convolution engine for a fixed lattice and kernel.
pub struct FftConvolver {
    side: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
    slots: Vec<usize>,
}

impl std::fmt::Debug for FftConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftConvolver")
            .field("side", &self.side)
            .finish()
    }
}

/// Smallest `L >= min` whose only prime factors are 2, 3 and 5.
pub fn fft_side(min: usize) -> usize {
    (min..)
        .find(|&l| {
            let mut m = l;
            for f in [2, 3, 5] {
                while m % f == 0 {
                    m /= f;
                }
            }
            m == 1
        })
        .unwrap()
}

impl FftConvolver {
    pub fn new(lattice: &LatticeBall, kernel: &Kernel) -> Self {
        let nmax = lattice.nmax();
        assert!(kernel.half() >= 2 * nmax);
        let side = fft_side((4 * nmax + 1) as usize);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(side);
        let inv = planner.plan_fft_inverse(side);
        let wrap = |c: i32| c.rem_euclid(side as i32) as usize;
        let mut grid = vec![Complex64::new(0.0, 0.0); side * side * side];
        let h = 2 * nmax;
        for x in -h..=h {
            for y in -h..=h {
                for z in -h..=h {
                    grid[(wrap(x) * side + wrap(y)) * side + wrap(z)] =
                        Complex64::new(kernel.get([x, y, z]), 0.0);
                }
            }
        }
        let slots = lattice
            .points()
            .iter()
            .map(|n| (wrap(n[0]) * side + wrap(n[1])) * side + wrap(n[2]))
            .collect();
        let mut conv = Self {
            side,
            fwd,
            inv,
            kernel_hat: Vec::new(),
            slots,
        };
        conv.transform(&mut grid, false);
        conv.kernel_hat = grid;
        conv
    }

    pub fn side(&self) -> usize {
        self.side
    }

    fn transform(&self, grid: &mut [Complex64], inverse: bool) {
        let s = self.side;
        let plan = if inverse { &self.inv } else { &self.fwd };
        // z lines are contiguous.
        grid.par_chunks_mut(s).for_each(|line| plan.process(line));
        // y lines: stride s inside each x plane.
        grid.par_chunks_mut(s * s).for_each(|plane| {
            let mut buf = vec![Complex64::new(0.0, 0.0); s];
            for z in 0..s {
                for y in 0..s {
                    buf[y] = plane[y * s + z];
                }
                plan.process(&mut buf);
                for y in 0..s {
                    plane[y * s + z] = buf[y];
                }
            }
        });
        // x lines: stride s*s, gathered per (y, z) column.
        let cols: Vec<Vec<Complex64>> = (0..s * s)
            .into_par_iter()
            .map(|yz| {
                let mut buf: Vec<Complex64> = (0..s).map(|x| grid[x * s * s + yz]).collect();
                plan.process(&mut buf);
                buf
            })
            .collect();
        for (yz, col) in cols.iter().enumerate() {
            for (x, v) in col.iter().enumerate() {
                grid[x * s * s + yz] = *v;
            }
        }
    }

    fn convolve_complex(&self, x: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
        let s = self.side;
        let mut grid = vec![Complex64::new(0.0, 0.0); s * s * s];
        for (slot, v) in self.slots.iter().zip(x) {
            grid[*slot] = v;
        }
        self.transform(&mut grid, false);
        grid.par_iter_mut()
            .zip(self.kernel_hat.par_iter())
            .for_each(|(g, k)| *g *= k);
        self.transform(&mut grid, true);
        let norm = 1.0 / (s * s * s) as f64;
        self.slots.iter().map(|&slot| grid[slot] * norm).collect()
    }

    pub fn convolve(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.slots.len());
        self.convolve_complex(x.iter().map(|&v| Complex64::new(v, 0.0)))
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    /// Two convolutions in one transform, `x` as the real and `y` as the
    /// imaginary part. The kernel is real and even, so its transform is real
    /// and the two parts do not mix.
    ///
    /// Rounding spreads across both parts, so `y` is rescaled by a power of
    /// two to the magnitude of `x` first.
    pub fn convolve_pair(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert!(x.len() == self.slots.len() && y.len() == self.slots.len());
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let (mx, my) = (max_abs(x), max_abs(y));
        let shift = if mx > 0.0 && my > 0.0 {
            ((mx / my).log2().round() as i32).clamp(-1000, 1000)
        } else {
            0
        };
        let up = 2f64.powi(shift);
        let out = self.convolve_complex(x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b * up)));
        let down = 2f64.powi(-shift);
        out.into_iter().map(|c| (c.re, c.im * down)).unzip()
    }
}

/// Picks the direct loop for small balls and the FFT otherwise.
#[derive(Debug)]
pub enum Convolver {
    Direct,
    Fft(FftConvolver),
}

impl Convolver {
    pub fn new(lattice: &LatticeBall, kernel: &Kernel) -> Self {
        if lattice.len() <= DIRECT_LIMIT {
            Convolver::Direct
        } else {
            Convolver::Fft(FftConvolver::new(lattice, kernel))
        }
    }

    pub fn convolve(&self, lattice: &LatticeBall, kernel: &Kernel, x: &[f64]) -> Vec<f64> {
        match self {
            Convolver::Direct => convolve_direct(lattice, kernel, x),
            Convolver::Fft(f) => f.convolve(x),
        }
    }

    pub fn convolve_pair(
        &self,
        lattice: &LatticeBall,
        kernel: &Kernel,
        x: &[f64],
        y: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        match self {
            Convolver::Direct => (
                convolve_direct(lattice, kernel, x),
                convolve_direct(lattice, kernel, y),
            ),
            Convolver::Fft(f) => f.convolve_pair(x, y),
        }
    }
}

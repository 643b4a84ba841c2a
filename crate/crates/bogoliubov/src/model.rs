//! Shared per-run state: lattice, scaled potential table and convolution
//! engine for one `(potential, K, N, beta)` choice.

use crate::conv::{Convolver, Kernel};
use crate::error::Result;
use crate::lattice::LatticeBall;
use crate::potential::{Potential, ScaledPotentialTable};
use crate::tail::TailGrid;

#[derive(Debug)]
pub struct Model {
    pub pot: Potential,
    pub n: f64,
    pub beta: f64,
    pub scale: f64,
    pub lattice: LatticeBall,
    pub vhat: ScaledPotentialTable,
    kernel: Kernel,
    conv: Convolver,
    tail: TailGrid,
}

impl Model {
    pub fn new(pot: Potential, cutoff: f64, n: f64, beta: f64) -> Result<Self> {
        let lattice = LatticeBall::new(cutoff)?;
        Self::with_lattice(pot, lattice, n, beta)
    }

    pub fn with_lattice(pot: Potential, lattice: LatticeBall, n: f64, beta: f64) -> Result<Self> {
        let vhat = ScaledPotentialTable::new(&pot, &lattice, n, beta)?;
        let scale = vhat.scale;
        let kernel = Kernel::scaled_potential(&pot, &lattice, scale);
        let conv = Convolver::new(&lattice, &kernel);
        let tail = TailGrid::new(lattice.effective_radius(), scale, pot.radius);
        Ok(Self {
            pot,
            n,
            beta,
            scale,
            lattice,
            vhat,
            kernel,
            conv,
            tail,
        })
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// `vhat_N` at point `i`.
    #[inline]
    pub fn v(&self, i: usize) -> f64 {
        self.vhat.values[i]
    }

    /// `vhat_N(2 pi d)` for a lattice difference `d`.
    #[inline]
    pub fn v_diff(&self, d: [i32; 3]) -> f64 {
        self.kernel.get(d)
    }

    /// `vhat_N` at an arbitrary momentum magnitude.
    #[inline]
    pub fn v_at(&self, abs_p: f64) -> f64 {
        self.pot.vhat_scaled(abs_p, self.scale)
    }

    pub fn v0(&self) -> f64 {
        self.vhat.at_zero
    }

    /// `sum_{q in ball} vhat_N(p - q) x_q`, the `q = p` term included.
    ///
    /// `x` must be even, `x_p = x_-p`. The output is averaged over `p` and
    /// `-p`, so it is exactly even despite FFT rounding.
    pub fn convolve(&self, x: &[f64]) -> Vec<f64> {
        self.check_even(x);
        let mut out = self.conv.convolve(&self.lattice, &self.kernel, x);
        self.symmetrize(&mut out);
        out
    }

    /// [`Model::convolve`] of two inputs at the cost of one.
    pub fn convolve_pair(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.check_even(x);
        self.check_even(y);
        let (mut a, mut b) = self.conv.convolve_pair(&self.lattice, &self.kernel, x, y);
        self.symmetrize(&mut a);
        self.symmetrize(&mut b);
        (a, b)
    }

    fn check_even(&self, x: &[f64]) {
        debug_assert!(
            (0..x.len()).all(|i| x[i] == x[self.lattice.neg(i)]),
            "odd input"
        );
    }

    fn symmetrize(&self, out: &mut [f64]) {
        for i in 0..out.len() {
            let j = self.lattice.neg(i);
            if i < j {
                let m = 0.5 * (out[i] + out[j]);
                out[i] = m;
                out[j] = m;
            }
        }
    }

    fn drop_diagonal(&self, c: Vec<f64>, x: &[f64]) -> Vec<f64> {
        let d = self.v0();
        c.into_iter().zip(x).map(|(c, xi)| c - d * xi).collect()
    }

    /// Same sum with `q = p` removed.
    pub fn convolve_offdiag(&self, x: &[f64]) -> Vec<f64> {
        self.drop_diagonal(self.convolve(x), x)
    }

    /// [`Model::convolve_offdiag`] of two inputs at the cost of one.
    pub fn convolve_offdiag_pair(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.convolve_pair(x, y);
        (self.drop_diagonal(a, x), self.drop_diagonal(b, y))
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn tail(&self) -> &TailGrid {
        &self.tail
    }
}

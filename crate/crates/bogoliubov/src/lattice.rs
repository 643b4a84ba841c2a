//! Truncated momentum lattice `{p = 2*pi*n : n in Z^3, 0 < |p| <= K}`.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Points of the punctured momentum ball in canonical order.
///
/// Canonical order is ascending `|n|^2`, then lexicographic on `n`. Every
/// lattice sum in the crate walks points in this order.
#[derive(Debug, Clone)]
pub struct LatticeBall {
    cutoff: f64,
    nmax: i32,
    points: Vec<[i32; 3]>,
    norm2: Vec<i32>,
    index: HashMap<[i32; 3], usize>,
    neg: Vec<usize>,
    shells: Vec<(i32, std::ops::Range<usize>)>,
}

impl LatticeBall {
    /// Enumerates all nonzero `n` with `2*pi*|n| <= cutoff`.
    pub fn new(cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff >= TWO_PI * (1.0 - 1e-12)) {
            return Err(Error::CutoffTooSmall(cutoff));
        }
        let rmax = cutoff / TWO_PI;
        let bound = rmax * rmax * (1.0 + 1e-12);
        let nmax = rmax.floor() as i32 + 1;
        let mut points = Vec::new();
        for x in -nmax..=nmax {
            for y in -nmax..=nmax {
                for z in -nmax..=nmax {
                    let n2 = x * x + y * y + z * z;
                    if n2 > 0 && (n2 as f64) <= bound {
                        points.push([x, y, z]);
                    }
                }
            }
        }
        points.sort_by_key(|n| (n[0] * n[0] + n[1] * n[1] + n[2] * n[2], *n));
        Ok(Self::from_sorted(cutoff, points))
    }

    fn from_sorted(cutoff: f64, points: Vec<[i32; 3]>) -> Self {
        let norm2: Vec<i32> = points.iter().map(|n| dot(n, n)).collect();
        let index: HashMap<[i32; 3], usize> =
            points.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let neg = points
            .iter()
            .map(|n| index[&[-n[0], -n[1], -n[2]]])
            .collect();
        let mut shells: Vec<(i32, std::ops::Range<usize>)> = Vec::new();
        for (i, &n2) in norm2.iter().enumerate() {
            match shells.last_mut() {
                Some((m, r)) if *m == n2 => r.end = i + 1,
                _ => shells.push((n2, i..i + 1)),
            }
        }
        let nmax = points
            .iter()
            .flat_map(|n| n.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0);
        Self {
            cutoff,
            nmax,
            points,
            norm2,
            index,
            neg,
            shells,
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Largest coordinate magnitude of any point.
    pub fn nmax(&self) -> i32 {
        self.nmax
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[i32; 3]] {
        &self.points
    }

    pub fn n(&self, i: usize) -> [i32; 3] {
        self.points[i]
    }

    /// `|n|^2` of point `i`.
    pub fn norm2(&self, i: usize) -> i32 {
        self.norm2[i]
    }

    /// `|p|^2 = 4 pi^2 |n|^2` of point `i`.
    pub fn p2(&self, i: usize) -> f64 {
        TWO_PI * TWO_PI * self.norm2[i] as f64
    }

    pub fn abs_p(&self, i: usize) -> f64 {
        TWO_PI * (self.norm2[i] as f64).sqrt()
    }

    pub fn index_of(&self, n: &[i32; 3]) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Position of `-n_i`.
    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }

    /// `(|n|^2, index range)` for each shell in ascending order.
    pub fn shells(&self) -> &[(i32, std::ops::Range<usize>)] {
        &self.shells
    }

    /// Number of leading points with `2*pi*|n| <= k`.
    ///
    /// Because of the canonical order a smaller ball is always a prefix.
    pub fn prefix_len(&self, k: f64) -> usize {
        let r = k / TWO_PI;
        let bound = r * r * (1.0 + 1e-12);
        self.norm2.partition_point(|&n2| (n2 as f64) <= bound)
    }

    /// Radius of the continuum ball holding as many cells as the lattice ball
    /// plus the zero mode, in momentum units.
    pub fn effective_radius(&self) -> f64 {
        effective_radius(self.len())
    }
}

/// Dense lookup table from `n` in the cube `|n_i| <= half` to ball positions.
#[derive(Debug, Clone)]
pub struct DenseIndex {
    half: i32,
    side: usize,
    slots: Vec<u32>,
}

impl DenseIndex {
    const EMPTY: u32 = u32::MAX;

    pub fn new(lattice: &LatticeBall, half: i32) -> Self {
        let half = half.max(lattice.nmax());
        let side = (2 * half + 1) as usize;
        let mut slots = vec![Self::EMPTY; side * side * side];
        for (i, n) in lattice.points().iter().enumerate() {
            slots[Self::lin(half, side, n)] = i as u32;
        }
        Self { half, side, slots }
    }

    #[inline]
    fn lin(half: i32, side: usize, n: &[i32; 3]) -> usize {
        let x = (n[0] + half) as usize;
        let y = (n[1] + half) as usize;
        let z = (n[2] + half) as usize;
        (x * side + y) * side + z
    }

    /// Position of `n` in the ball, `None` if outside the ball.
    ///
    /// Panics if `n` leaves the cube.
    #[inline]
    pub fn get(&self, n: &[i32; 3]) -> Option<usize> {
        let s = self.slots[Self::lin(self.half, self.side, n)];
        (s != Self::EMPTY).then_some(s as usize)
    }
}

/// Radius `k` with `(4 pi / 3) k^3 / (2 pi)^3 = points + 1`.
pub fn effective_radius(points: usize) -> f64 {
    TWO_PI * (3.0 * (points as f64 + 1.0) / (4.0 * PI)).cbrt()
}

#[inline]
pub fn dot(a: &[i32; 3], b: &[i32; 3]) -> i32 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add(a: &[i32; 3], b: &[i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &[i32; 3], b: &[i32; 3]) -> [i32; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn negate(a: &[i32; 3]) -> [i32; 3] {
    [-a[0], -a[1], -a[2]]
}

//! Mode sets and the zero-momentum sector of the truncated excitation Fock space.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{add, negate, LatticeBall};

pub const MAX_MODES: usize = 30;
pub const DEFAULT_BASIS_LIMIT: usize = 2_000_000;

/// Ordered momenta, closed under negation, without the zero mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    modes: Vec<[i32; 3]>,
    neg: Vec<usize>,
    index: HashMap<[i32; 3], usize>,
}

impl ModeSet {
    pub fn new(modes: Vec<[i32; 3]>) -> Result<Self> {
        if modes.len() > MAX_MODES {
            return Err(Error::InvalidModeSet(format!(
                "{} modes, at most {MAX_MODES} allowed",
                modes.len()
            )));
        }
        let mut index = HashMap::new();
        for (i, n) in modes.iter().enumerate() {
            if *n == [0; 3] {
                return Err(Error::InvalidModeSet("zero mode".into()));
            }
            if index.insert(*n, i).is_some() {
                return Err(Error::InvalidModeSet(format!("duplicate mode {n:?}")));
            }
        }
        let neg = modes
            .iter()
            .map(|n| {
                index
                    .get(&negate(n))
                    .copied()
                    .ok_or_else(|| Error::InvalidModeSet(format!("{n:?} without its negative")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { modes, neg, index })
    }

    /// The pair `{n, -n}`.
    pub fn pair(n: [i32; 3]) -> Result<Self> {
        Self::new(vec![n, negate(&n)])
    }

    /// The first `count` shells of the lattice, in canonical order.
    pub fn shells(count: usize) -> Result<Self> {
        let mut r2 = 1;
        let mut found = 0;
        let mut modes = Vec::new();
        while found < count {
            let ball = LatticeBall::new(crate::lattice::TWO_PI * (r2 as f64).sqrt())?;
            modes = ball.points().to_vec();
            found = ball.shells().len();
            r2 += 1;
        }
        Self::new(modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[[i32; 3]] {
        &self.modes
    }

    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }

    pub fn index_of(&self, n: &[i32; 3]) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Index of `modes[i] + modes[j]`, if in the set.
    pub fn sum(&self, i: usize, j: usize) -> Option<usize> {
        self.index_of(&add(&self.modes[i], &self.modes[j]))
    }
}

/// Occupation vectors with at most `n_max` excitations and zero total momentum.
///
/// States are stored flat, `len()` rows of `modes.len()` occupations, in the
/// depth-first order of the enumeration. The vacuum is always state 0.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: ModeSet,
    n_max: usize,
    occ: Vec<u8>,
    index: HashMap<Box<[u8]>, u32>,
}

impl FockBasis {
    pub fn new(modes: ModeSet, n_max: usize, limit: usize) -> Result<Self> {
        if n_max > u8::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "n_max = {n_max} exceeds {}",
                u8::MAX
            )));
        }
        let m = modes.len();
        // suffix_reach[i][d]: largest |n_d| among modes i.. for momentum pruning
        let mut suffix_reach = vec![[0i32; 3]; m + 1];
        for i in (0..m).rev() {
            for d in 0..3 {
                suffix_reach[i][d] = suffix_reach[i + 1][d].max(modes.modes[i][d].abs());
            }
        }
        let mut occ = Vec::new();
        let mut count = 0usize;
        let mut cur = vec![0u8; m];
        let mut stack = Enumerator {
            modes: &modes,
            reach: &suffix_reach,
            limit,
            occ: &mut occ,
            count: &mut count,
            cur: &mut cur,
        };
        stack.descend(0, n_max as i32, [0; 3])?;
        let index = (0..count)
            .map(|i| {
                (
                    occ[i * m..(i + 1) * m].to_vec().into_boxed_slice(),
                    i as u32,
                )
            })
            .collect();
        Ok(Self {
            modes,
            n_max,
            occ,
            index,
        })
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn state(&self, i: usize) -> &[u8] {
        let m = self.modes.len();
        &self.occ[i * m..(i + 1) * m]
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).map(|&i| i as usize)
    }

    /// Total number of excitations in state `i`.
    pub fn particles(&self, i: usize) -> usize {
        self.state(i).iter().map(|&k| k as usize).sum()
    }

    pub fn momentum(&self, i: usize) -> [i32; 3] {
        self.state(i)
            .iter()
            .zip(self.modes.modes())
            .fold([0; 3], |acc, (&k, n)| add(&acc, &n.map(|x| x * k as i32)))
    }
}

struct Enumerator<'a> {
    modes: &'a ModeSet,
    reach: &'a [[i32; 3]],
    limit: usize,
    occ: &'a mut Vec<u8>,
    count: &'a mut usize,
    cur: &'a mut Vec<u8>,
}

impl Enumerator<'_> {
    fn descend(&mut self, i: usize, left: i32, mom: [i32; 3]) -> Result<()> {
        let m = self.modes.len();
        if i == m {
            if mom == [0; 3] {
                *self.count += 1;
                if *self.count > self.limit {
                    return Err(Error::BasisTooLarge {
                        dim: *self.count,
                        limit: self.limit,
                    });
                }
                self.occ.extend_from_slice(self.cur);
            }
            return Ok(());
        }
        let n = self.modes.modes[i];
        for k in 0..=left {
            let next = add(&mom, &n.map(|x| x * k));
            let rest = left - k;
            let r = self.reach[i + 1];
            if (0..3).all(|d| next[d].abs() <= rest * r[d]) {
                self.cur[i] = k as u8;
                self.descend(i + 1, rest, next)?;
            }
        }
        self.cur[i] = 0;
        Ok(())
    }
}

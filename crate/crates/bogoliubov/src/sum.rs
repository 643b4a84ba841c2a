//! Compensated summation with a reduction order that does not depend on the
//! number of worker threads.

use rayon::prelude::*;

/// Fixed chunk length for parallel reductions.
pub const CHUNK: usize = 2048;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sequential compensated sum in iteration order.
pub fn ksum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// Compensated sum of `f(0) + ... + f(n-1)`.
///
/// Each fixed-size chunk is summed on its own, then the chunk partials are
/// combined sequentially in index order, so the bits of the result are the
/// same for every thread count.
pub fn par_ksum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            ksum((lo..hi).map(&f))
        })
        .collect();
    ksum(partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = xs.iter().sum();
        assert_eq!(naive, 1.0);
        assert!((ksum(xs) - (1.0 + 1e-12)).abs() < 1e-24);
    }

    #[test]
    fn par_matches_chunked_sequential() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let n = 3 * CHUNK + 17;
        let a = par_ksum(n, f);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| par_ksum(n, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(par_ksum(0, |_| 1.0), 0.0);
        assert_eq!(ksum(std::iter::empty()), 0.0);
    }
}

//! Matrix representations of the quadratic, cubic and quartic Hamiltonians.

use std::collections::HashMap;

use super::basis::{FockBasis, ModeSet};
use super::operator::{apply, Ladder, SparseSymmetricOperator};
use crate::error::{Error, Result};
use crate::lattice::{add, sub};
use crate::model::Model;
use crate::quadratic::BogoliubovTables;

/// Per-mode coefficients plus the potential on mode differences.
#[derive(Debug, Clone)]
pub struct ModeTables {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// `vhat_N` at each mode.
    pub v: Vec<f64>,
    pub s: Vec<f64>,
    pub c: Vec<f64>,
    pub st: Vec<f64>,
    pub ct: Vec<f64>,
    /// `vhat_N` at every nonzero difference of two modes.
    pub v_diff: HashMap<[i32; 3], f64>,
    pub n: f64,
}

impl ModeTables {
    /// Only `F` and `G` set; enough for the quadratic Hamiltonian.
    pub fn quadratic(f: Vec<f64>, g: Vec<f64>) -> Self {
        let m = f.len();
        Self {
            f,
            g,
            v: vec![0.0; m],
            s: vec![0.0; m],
            c: vec![1.0; m],
            st: vec![0.0; m],
            ct: vec![1.0; m],
            v_diff: HashMap::new(),
            n: 1.0,
        }
    }

    /// Restriction of the lattice tables to `modes`, all of which must lie
    /// in the model's ball.
    pub fn restrict(model: &Model, t: &BogoliubovTables, modes: &ModeSet) -> Result<Self> {
        let idx: Vec<usize> = modes
            .modes()
            .iter()
            .map(|n| {
                model
                    .lattice
                    .index_of(n)
                    .ok_or_else(|| Error::InvalidModeSet(format!("{n:?} outside the lattice ball")))
            })
            .collect::<Result<_>>()?;
        let pick = |x: &[f64]| idx.iter().map(|&i| x[i]).collect::<Vec<_>>();
        let mut v_diff = HashMap::new();
        for a in modes.modes() {
            for b in modes.modes() {
                let d = sub(a, b);
                if d != [0; 3] {
                    v_diff.insert(d, model.v_diff(d));
                }
            }
        }
        Ok(Self {
            f: pick(&t.f),
            g: pick(&t.g),
            v: idx.iter().map(|&i| model.v(i)).collect(),
            s: pick(&t.s),
            c: pick(&t.c),
            st: pick(&t.st),
            ct: pick(&t.ct),
            v_diff,
            n: model.n,
        })
    }

    /// Same tables with `tau = 0`.
    pub fn untwisted(&self) -> Self {
        Self {
            st: vec![0.0; self.st.len()],
            ct: vec![1.0; self.ct.len()],
            ..self.clone()
        }
    }
}

fn push(
    basis: &FockBasis,
    j: usize,
    ops: &[Ladder],
    coef: f64,
    out: &mut Vec<(Option<usize>, f64)>,
) {
    if coef == 0.0 {
        return;
    }
    let mut s = basis.state(j).to_vec();
    if let Some(a) = apply(ops, &mut s) {
        let target = if s.iter().map(|&k| k as usize).sum::<usize>() <= basis.n_max() {
            basis.index_of(&s)
        } else {
            None
        };
        out.push((target, coef * a));
    }
}

/// `sum F_p a+_p a_p + (1/2) sum G_p (a+_p a+_{-p} + a_p a_{-p})`.
pub fn build_g0(basis: &FockBasis, t: &ModeTables) -> SparseSymmetricOperator {
    let modes = basis.modes();
    SparseSymmetricOperator::assemble(basis, 1.0, |j, out| {
        let occ = basis.state(j);
        let diag: f64 = occ.iter().zip(&t.f).map(|(&k, f)| k as f64 * f).sum();
        out.push((Some(j), 0.5 * diag));
        for i in 0..modes.len() {
            push(
                basis,
                j,
                &[Ladder::Create(i), Ladder::Create(modes.neg(i))],
                0.5 * t.g[i],
                out,
            );
        }
    })
}

/// Number of excitations.
pub fn number_operator(basis: &FockBasis) -> SparseSymmetricOperator {
    let d: Vec<f64> = (0..basis.len())
        .map(|i| basis.particles(i) as f64)
        .collect();
    SparseSymmetricOperator::diagonal(&d)
}

/// Cubic vertex, restricted to triples inside the mode set:
/// `(1/sqrt N) sum vhat(p) c_{p+q} c_p (c_q a+_{p+q} a+_{-p} a_q
///   + s_q a+_{p+q} a+_{-p} a+_{-q}) + h.c.`
pub fn build_g1_tilde(basis: &FockBasis, t: &ModeTables) -> SparseSymmetricOperator {
    let modes = basis.modes();
    let m = modes.len();
    // (p, q, p+q) index triples with every member in the set
    let mut triples = Vec::new();
    for p in 0..m {
        for q in 0..m {
            if let Some(pq) = modes.sum(p, q) {
                let mp = modes.neg(p);
                let mq = modes.neg(q);
                let n = modes.modes();
                debug_assert_eq!(add(&n[pq], &n[mp]), n[q]);
                let base = t.v[p] * t.c[pq] * t.c[p] / t.n.sqrt();
                triples.push((pq, mp, q, mq, base));
            }
        }
    }
    SparseSymmetricOperator::assemble(basis, 1.0, |j, out| {
        for &(pq, mp, q, mq, base) in &triples {
            push(
                basis,
                j,
                &[
                    Ladder::Create(pq),
                    Ladder::Create(mp),
                    Ladder::Annihilate(q),
                ],
                base * t.c[q],
                out,
            );
            push(
                basis,
                j,
                &[Ladder::Create(pq), Ladder::Create(mp), Ladder::Create(mq)],
                base * t.s[q],
                out,
            );
        }
    })
}

/// `(1/2N) sum vhat(r) c_{p+r} c_q c_p c_{q+r} a+_{p+r} a+_q a_p a_{q+r}`
/// with `p, q, p+r, q+r` in the mode set and `r != 0`.
pub fn build_g2(basis: &FockBasis, t: &ModeTables) -> SparseSymmetricOperator {
    let modes = basis.modes();
    let m = modes.len();
    let n = modes.modes();
    SparseSymmetricOperator::assemble(basis, 0.5, |j, out| {
        let occ = basis.state(j);
        for p in (0..m).filter(|&p| occ[p] > 0) {
            for k in (0..m).filter(|&k| occ[k] > 0) {
                for q in 0..m {
                    if q == k {
                        continue;
                    }
                    let r = sub(&n[k], &n[q]);
                    let Some(pr) = modes.index_of(&add(&n[p], &r)) else {
                        continue;
                    };
                    debug_assert_eq!(add(&n[pr], &n[q]), add(&n[p], &n[k]));
                    let coef = t.v_diff[&r] * t.c[pr] * t.c[q] * t.c[p] * t.c[k] / (2.0 * t.n);
                    push(
                        basis,
                        j,
                        &[
                            Ladder::Create(pr),
                            Ladder::Create(q),
                            Ladder::Annihilate(p),
                            Ladder::Annihilate(k),
                        ],
                        coef,
                        out,
                    );
                }
            }
        }
    })
}

//! Closed forms against the Fock-space reference on restricted mode sets.

use serde::{Deserialize, Serialize};

use crate::corrections::{e_pert_restricted, g2_expectation};
use crate::error::{Error, Result};
use crate::fock::{
    build_g0, build_g1_tilde, build_g2, ground_state, number_operator, rs_pt2, FockBasis, ModeSet,
    ModeTables,
};
use crate::lattice::{dot, TWO_PI};
use crate::model::Model;
use crate::potential::Potential;
use crate::quadratic::{bogoliubov_ground_energy, BogoliubovTables};
use crate::scattering::solve_eta;
use crate::sum::ksum;

/// Eigen residual tolerance relative to the operator norm bound. The projected
/// eigenproblem limits the attainable residual to about `1e-12` of the norm.
pub const EIG_TOL: f64 = 1e-11;
/// Relative gap treated as converged when checking monotone convergence.
pub const NOISE_FLOOR: f64 = 1e-9;
/// Relative residual tolerance of the resolvent solve.
pub const LIN_TOL: f64 = 1e-12;

/// Parameters of an oracle run.
///
/// The mode set is the first `shells` lattice shells and the model lattice
/// is exactly that ball, so the restricted closed forms and the Fock space
/// see the same momenta.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_shells")]
    pub shells: usize,
    #[serde(default = "default_n_max")]
    pub n_max: Vec<usize>,
    #[serde(default = "default_pair_n_max")]
    pub pair_n_max: usize,
    #[serde(default = "default_n")]
    pub n: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_basis_limit")]
    pub basis_limit: usize,
    #[serde(default = "default_pert_tol")]
    pub pert_rel_tol: f64,
    #[serde(default = "default_g2_tol")]
    pub g2_rel_tol: f64,
}

fn default_shells() -> usize {
    2
}
fn default_n_max() -> Vec<usize> {
    vec![5, 7, 9]
}
fn default_pair_n_max() -> usize {
    40
}
fn default_n() -> f64 {
    1000.0
}
fn default_beta() -> f64 {
    0.6
}
fn default_kappa() -> f64 {
    10000.0
}
fn default_radius() -> f64 {
    0.2
}
fn default_basis_limit() -> usize {
    crate::fock::DEFAULT_BASIS_LIMIT
}
fn default_pert_tol() -> f64 {
    1e-5
}
fn default_g2_tol() -> f64 {
    1e-6
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            shells: default_shells(),
            n_max: default_n_max(),
            pair_n_max: default_pair_n_max(),
            n: default_n(),
            beta: default_beta(),
            kappa: default_kappa(),
            radius: default_radius(),
            basis_limit: default_basis_limit(),
            pert_rel_tol: default_pert_tol(),
            g2_rel_tol: default_g2_tol(),
        }
    }
}

/// Model, tables and mode set shared by every `n_max` of a sweep.
#[derive(Debug)]
pub struct OracleSetup {
    pub model: Model,
    pub tables: BogoliubovTables,
    pub modes: ModeSet,
    pub mode_tables: ModeTables,
}

impl OracleSetup {
    pub fn new(spec: &OracleSpec) -> Result<Self> {
        let modes = ModeSet::shells(spec.shells)?;
        let r2 = modes.modes().iter().map(|n| dot(n, n)).max().unwrap_or(1);
        let pot = Potential::new(spec.kappa, spec.radius)?;
        let model = Model::new(pot, TWO_PI * (r2 as f64).sqrt(), spec.n, spec.beta)?;
        if model.len() != modes.len() {
            return Err(Error::InconsistentLattice(format!(
                "{} modes against {} lattice points",
                modes.len(),
                model.len()
            )));
        }
        let sol = solve_eta(&model, 1e-14, 500)?;
        let tables = BogoliubovTables::build(&model, &sol)?;
        let mode_tables = ModeTables::restrict(&model, &tables, &modes)?;
        Ok(Self {
            model,
            tables,
            modes,
            mode_tables,
        })
    }

    /// Restricted closed forms, independent of `n_max`.
    pub fn closed_forms(&self) -> ClosedForms {
        let t = &self.tables;
        let amplitude = {
            let m = &self.model;
            let mut acc = Vec::new();
            let coeffs: Vec<_> = (0..t.len()).map(|i| t.coeffs(m, i)).collect();
            for i in 0..t.len() {
                for j in 0..t.len() {
                    if let Some(k) = self.modes.sum(i, j) {
                        let f = crate::corrections::f_vertex(&coeffs[i], &coeffs[j], &coeffs[k]);
                        acc.push(f * f);
                    }
                }
            }
            6.0 / m.n * ksum(acc)
        };
        ClosedForms {
            e0: bogoliubov_ground_energy(&self.model, t).ball,
            e_pert: e_pert_restricted(&self.model, t),
            g2: g2_expectation(&self.model, t).total(),
            number: ksum(t.st.iter().map(|s| s * s)),
            amplitude_norm: amplitude,
            depletion: ksum((0..t.len()).map(|i| (t.eta[i] + t.tau[i]).sinh().powi(2))),
        }
    }

    pub fn run(&self, n_max: usize, limit: usize) -> Result<FockValues> {
        let basis = FockBasis::new(self.modes.clone(), n_max, limit)?;
        let g0 = build_g0(&basis, &self.mode_tables);
        let gs = ground_state(&g0, EIG_TOL)?;
        let g1 = build_g1_tilde(&basis, &self.mode_tables);
        let g2 = build_g2(&basis, &self.mode_tables);
        let num = number_operator(&basis);
        let g1x = g1.matvec(&gs.vector);
        Ok(FockValues {
            n_max,
            dim: basis.len(),
            e0: gs.energy,
            e_pert: rs_pt2(&g0, &g1, gs.energy, &gs.vector, LIN_TOL)?,
            g2: g2.expectation(&gs.vector, &gs.vector),
            number: num.expectation(&gs.vector, &gs.vector),
            amplitude_norm: ksum(g1x.iter().map(|x| x * x)),
        })
    }

    /// Depletion from the squeezed ground state of each `{p, -p}` pair with
    /// angle `eta_p + tau_p`.
    pub fn depletion(&self, n_max: usize) -> Result<f64> {
        let mut parts = Vec::new();
        for (i, n) in self.modes.modes().iter().enumerate() {
            if self.modes.neg(i) < i {
                continue;
            }
            let theta = self.tables.eta[i] + self.tables.tau[i];
            let basis = FockBasis::new(ModeSet::pair(*n)?, n_max, usize::MAX)?;
            let g = -(2.0 * theta).tanh();
            let op = build_g0(&basis, &ModeTables::quadratic(vec![1.0; 2], vec![g; 2]));
            let gs = ground_state(&op, EIG_TOL)?;
            parts.push(number_operator(&basis).expectation(&gs.vector, &gs.vector));
        }
        Ok(ksum(parts))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedForms {
    pub e0: f64,
    pub e_pert: f64,
    pub g2: f64,
    /// `sum sinh^2 tau` over the modes, the excitation number of the rotated vacuum.
    pub number: f64,
    /// `(6/N) sum f^2` over in-set triples.
    pub amplitude_norm: f64,
    pub depletion: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FockValues {
    pub n_max: usize,
    pub dim: usize,
    pub e0: f64,
    pub e_pert: f64,
    pub g2: f64,
    pub number: f64,
    pub amplitude_norm: f64,
}

/// One compared quantity: closed form, Fock value per `n_max`, final gap.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub closed_form: f64,
    pub n_max: Vec<usize>,
    pub oracle: Vec<f64>,
    pub rel_gap: f64,
    pub tolerance: Option<f64>,
    /// Gaps shrink with every step of the sweep.
    pub monotone: bool,
    pub pass: bool,
}

impl ComparisonRow {
    fn new(
        quantity: &str,
        closed: f64,
        n_max: &[usize],
        oracle: Vec<f64>,
        tol: Option<f64>,
    ) -> Self {
        let gaps: Vec<f64> = oracle.iter().map(|o| (o - closed).abs()).collect();
        let rel_gap = relative_gap(*oracle.last().unwrap_or(&f64::NAN), closed);
        // Gaps at the solver noise floor count as converged.
        let floor = NOISE_FLOOR * closed.abs();
        let monotone = gaps.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
        let pass = match tol {
            Some(t) => rel_gap <= t,
            None => true,
        };
        Self {
            quantity: quantity.into(),
            closed_form: closed,
            n_max: n_max.to_vec(),
            oracle,
            rel_gap,
            tolerance: tol,
            monotone,
            pass,
        }
    }
}

/// `|a - b| / |b|`, zero when both vanish.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Closed form against the two-mode Fock ground energy, `-F + sqrt(F^2 - G^2)`.
pub fn pair_ground_energy(f: f64, g: f64, n_max: usize) -> Result<(f64, f64)> {
    let basis = FockBasis::new(ModeSet::pair([1, 0, 0])?, n_max, usize::MAX)?;
    let op = build_g0(&basis, &ModeTables::quadratic(vec![f; 2], vec![g; 2]));
    let gs = ground_state(&op, EIG_TOL)?;
    Ok((gs.energy, -f + crate::quadratic::dispersion(f, g)))
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub spec: OracleSpec,
    pub modes: usize,
    pub closed: ClosedForms,
    pub sweep: Vec<FockValues>,
    pub rows: Vec<ComparisonRow>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

pub fn run_oracle(spec: &OracleSpec) -> Result<OracleReport> {
    if spec.n_max.is_empty() {
        return Err(Error::RejectedConfig("oracle n_max list is empty".into()));
    }
    let setup = OracleSetup::new(spec)?;
    let closed = setup.closed_forms();
    let sweep = spec
        .n_max
        .iter()
        .map(|&n| setup.run(n, spec.basis_limit))
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&FockValues) -> f64| sweep.iter().map(f).collect::<Vec<_>>();
    let (pe, pc) = pair_ground_energy(
        setup.mode_tables.f[0],
        setup.mode_tables.g[0],
        spec.pair_n_max,
    )?;
    let pair_row = ComparisonRow {
        quantity: "pair_E0".into(),
        closed_form: pc,
        n_max: vec![spec.pair_n_max],
        oracle: vec![pe],
        rel_gap: relative_gap(pe, pc),
        tolerance: Some(1e-9),
        monotone: true,
        pass: (pe - pc).abs() <= 1e-9,
    };
    let depl = setup.depletion(spec.pair_n_max)?;
    let rows = vec![
        pair_row,
        ComparisonRow::new("E0", closed.e0, &spec.n_max, pick(|v| v.e0), None),
        ComparisonRow::new(
            "e_pert_tilde",
            closed.e_pert,
            &spec.n_max,
            pick(|v| v.e_pert),
            Some(spec.pert_rel_tol),
        ),
        ComparisonRow::new(
            "g2_expect",
            closed.g2,
            &spec.n_max,
            pick(|v| v.g2),
            Some(spec.g2_rel_tol),
        ),
        ComparisonRow::new(
            "rotated_number",
            closed.number,
            &spec.n_max,
            pick(|v| v.number),
            None,
        ),
        ComparisonRow::new(
            "amplitude_norm",
            closed.amplitude_norm,
            &spec.n_max,
            pick(|v| v.amplitude_norm),
            None,
        ),
        ComparisonRow::new(
            "depletion",
            closed.depletion,
            &[spec.pair_n_max],
            vec![depl],
            Some(1e-9),
        ),
    ];
    Ok(OracleReport {
        spec: spec.clone(),
        modes: setup.modes.len(),
        closed,
        sweep,
        rows,
    })
}

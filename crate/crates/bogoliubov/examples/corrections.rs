//! Second-order pieces: perturbative double sum, quartic expectation and the
//! constant of the closed-form correction.

use bogoliubov::corrections::{c_constant, e_corr, e_pert_tilde, g2_expectation};
use bogoliubov::lattice::TWO_PI;
use bogoliubov::quadratic::BogoliubovTables;
use bogoliubov::scattering::solve_eta;
use bogoliubov::{Model, Potential};

fn main() -> bogoliubov::Result<()> {
    let n: f64 = std::env::args()
        .nth(1)
        .map_or(1e4, |s| s.parse().expect("N"));
    let model = Model::new(Potential::new(0.1, 0.25)?, TWO_PI * 20.0, n, 0.75)?;
    let t = BogoliubovTables::build(&model, &solve_eta(&model, 1e-11, 500)?)?;
    let pert = e_pert_tilde(&model, &t, TWO_PI * 10.0);
    let g2 = g2_expectation(&model, &t);
    let c = c_constant(&model, &t);
    println!(
        "E_pert~     {:.10e}  (lattice {:.4e}, continuum {:.4e})",
        pert.value, pert.lattice, pert.continuum
    );
    println!(
        "<G2>        {:.10e}  (direct {:.4e}, exchange {:.4e})",
        g2.total(),
        g2.direct,
        g2.exchange
    );
    println!(
        "C1 + C2     {:.10e}  (C1 {:.4e}, C2 {:.4e})",
        c.total(),
        c.c1(),
        c.c2()
    );
    println!("E_corr      {:.10e}", e_corr(c.total(), &model));
    Ok(())
}

//! Lattice scattering solution and the box scattering length.

use bogoliubov::lattice::TWO_PI;
use bogoliubov::scattering::{born2, eta_tail, scattering_length, solve_eta};
use bogoliubov::{Model, Potential};

fn main() -> bogoliubov::Result<()> {
    let kappa: f64 = std::env::args()
        .nth(1)
        .map_or(0.1, |s| s.parse().expect("kappa"));
    let model = Model::new(Potential::new(kappa, 0.25)?, TWO_PI * 20.0, 1e4, 0.75)?;
    let sol = solve_eta(&model, 1e-11, 500)?;
    println!(
        "{} points, {} iterations, residual {:.3e}, damping {}",
        model.len(),
        sol.iterations,
        sol.residual,
        sol.damping
    );
    let a = scattering_length(&model, &sol);
    let (ball, tail) = born2(&model);
    let deficit = model.v0() - 8.0 * std::f64::consts::PI * a.a_box;
    println!("vhat(0)        {:.16e}", model.v0());
    println!(
        "8 pi a         {:.16e}",
        8.0 * std::f64::consts::PI * a.a_box
    );
    println!(
        "vhat(0) - 8pia {deficit:.6e}  second Born term {:.6e}",
        ball + tail
    );
    let last = model.len() - 1;
    let p = model.lattice.abs_p(last);
    println!(
        "eta at |p| = {p:.2}: {:.6e}, Born closure {:.6e}",
        sol.eta[last],
        eta_tail(&model, p)
    );
    Ok(())
}

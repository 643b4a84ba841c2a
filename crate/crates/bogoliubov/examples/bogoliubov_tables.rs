//! Bogoliubov coefficient tables on the first shells.

use bogoliubov::lattice::TWO_PI;
use bogoliubov::quadratic::BogoliubovTables;
use bogoliubov::scattering::solve_eta;
use bogoliubov::{Model, Potential};

fn main() -> bogoliubov::Result<()> {
    let kappa: f64 = std::env::args()
        .nth(1)
        .map_or(50.0, |s| s.parse().expect("kappa"));
    let model = Model::new(Potential::new(kappa, 0.25)?, TWO_PI * 10.0, 1e4, 0.75)?;
    let t = BogoliubovTables::build(&model, &solve_eta(&model, 1e-11, 500)?)?;
    println!(
        "{:>4} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "|n|^2", "eta", "F", "G", "tau", "e"
    );
    for (n2, range) in model.lattice.shells().iter().take(8) {
        let i = range.start;
        println!(
            "{n2:>4} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            t.eta[i], t.f[i], t.g[i], t.tau[i], t.e[i]
        );
    }
    Ok(())
}

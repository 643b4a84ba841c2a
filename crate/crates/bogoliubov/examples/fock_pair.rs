//! Two-mode Fock ground energy against `-F + sqrt(F^2 - G^2)` as the basis grows.

use bogoliubov::oracle::pair_ground_energy;

fn main() -> bogoliubov::Result<()> {
    let (f, g) = (40.0, -12.0);
    for n_max in [4, 8, 16, 24, 32, 40] {
        let (fock, closed) = pair_ground_energy(f, g, n_max)?;
        println!(
            "n_max {n_max:>2}  fock {fock:.15}  closed {closed:.15}  gap {:.3e}",
            (fock - closed).abs()
        );
    }
    Ok(())
}

//! Momentum ball of `2 pi Z^3`: shells, multiplicities and negation pairing.

use bogoliubov::lattice::{LatticeBall, TWO_PI};

fn main() -> bogoliubov::Result<()> {
    let radius: f64 = std::env::args()
        .nth(1)
        .map_or(3.0, |s| s.parse().expect("radius in units of 2 pi"));
    let lat = LatticeBall::new(TWO_PI * radius)?;
    println!(
        "{} nonzero points with |n| <= {radius}, effective radius {:.4}",
        lat.len(),
        lat.effective_radius()
    );
    for (n2, range) in lat.shells() {
        let first = range.start;
        println!(
            "|n|^2 = {n2:>3}  points {:>3}  first {:?}  partner {:?}",
            range.len(),
            lat.n(first),
            lat.n(lat.neg(first))
        );
    }
    Ok(())
}

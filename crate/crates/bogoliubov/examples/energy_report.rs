//! Full energy expansion at the reference parameters, printed as JSON.

use bogoliubov::config::RunConfig;
use bogoliubov::report::{compute_energy, to_json};

fn main() -> bogoliubov::Result<()> {
    let n: f64 = std::env::args()
        .nth(1)
        .map_or(1e4, |s| s.parse().expect("N"));
    let cfg = RunConfig::from_toml("N = 10000\nbeta = 0.75\nkappa = 0.1\nR = 0.25\n")?;
    let report = compute_energy(&cfg, n, false)?;
    print!("{}", to_json(&report));
    Ok(())
}

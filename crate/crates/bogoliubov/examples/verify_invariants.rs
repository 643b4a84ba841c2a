//! Named invariant checks with their margins.

use bogoliubov::config::RunConfig;
use bogoliubov::verify::run_verify;

fn main() -> bogoliubov::Result<()> {
    let kappa: f64 = std::env::args()
        .nth(1)
        .map_or(0.1, |s| s.parse().expect("kappa"));
    let cfg = RunConfig::from_toml(&format!(
        "N = 10000\nbeta = 0.75\nkappa = {kappa}\nR = 0.25\ncutoff_K = \"16pi\"\ncutoff_K2 = \"8pi\"\n"
    ))?;
    let report = run_verify(&cfg)?;
    for c in &report.checks {
        println!(
            "{:<26} {}  value {:>11.3e}  threshold {:>11.3e}  {}",
            c.name,
            if c.pass { "ok  " } else { "FAIL" },
            c.value,
            c.threshold,
            c.detail
        );
    }
    Ok(())
}

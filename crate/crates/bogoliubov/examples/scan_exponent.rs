//! Scan over N and the fitted exponent of |E_corr| and |E01|.

use bogoliubov::config::RunConfig;
use bogoliubov::report::compute_energy;

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn main() -> bogoliubov::Result<()> {
    let beta: f64 = std::env::args()
        .nth(1)
        .map_or(0.8, |s| s.parse().expect("beta"));
    let cfg = RunConfig::from_toml(&format!(
        "N_list = [1e3, 1e4, 1e5]\nbeta = {beta}\nkappa = 0.1\nR = 0.25\ncutoff_K = \"20pi\"\ncutoff_K2 = \"10pi\"\n"
    ))?;
    let mut corr = Vec::new();
    let mut e01 = Vec::new();
    for n in cfg.scan_ns()? {
        let r = compute_energy(&cfg, n, false)?;
        println!(
            "N {n:>8.0e}  E_corr {:.6e}  E01 {:.6e}  route gap {:.3e}",
            r.e_corr, r.e01, r.route_discrepancy
        );
        corr.push((n.log10(), r.e_corr.abs().log10()));
        e01.push((n.log10(), r.e01.abs().log10()));
    }
    println!(
        "slopes: E_corr {:.4}, E01 {:.4}, beta - 1 = {:.2}",
        slope(&corr),
        slope(&e01),
        beta - 1.0
    );
    Ok(())
}

//! Fock-space reference against the restricted closed forms.

use bogoliubov::oracle::{run_oracle, OracleSpec};

fn main() -> bogoliubov::Result<()> {
    let mut spec = OracleSpec::default();
    if let Some(k) = std::env::args().nth(1) {
        spec.kappa = k.parse().expect("kappa");
    }
    let report = run_oracle(&spec)?;
    for v in &report.sweep {
        println!("n_max {:>2}  dim {:>6}", v.n_max, v.dim);
    }
    for r in &report.rows {
        println!(
            "{:<16} closed {:>24.16e}  oracle {:?}  rel gap {:.3e}  monotone {}  {}",
            r.quantity,
            r.closed_form,
            r.oracle,
            r.rel_gap,
            r.monotone,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}

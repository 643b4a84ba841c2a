//! End-to-end energy runs and their JSON and CSV renderings.

use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::corrections::{assemble_report, EnergyReport};
use crate::error::Result;
use crate::model::Model;
use crate::potential::Potential;
use crate::quadratic::BogoliubovTables;
use crate::scattering::solve_eta;

pub const CSV_COLUMNS: [&str; 20] = [
    "N",
    "beta",
    "kappa",
    "a_box",
    "leading",
    "E00",
    "E01",
    "C1",
    "C2",
    "E_corr",
    "g2_expect",
    "e_pert_tilde",
    "E0",
    "C_const",
    "total_A",
    "total_B",
    "route_discrepancy",
    "depletion",
    "t_scatter_ms",
    "t_sums_ms",
];

/// Runs the full pipeline at particle number `n`.
///
/// With `deterministic` the two wall-time fields are written as zero, so the
/// report depends on the configuration only.
pub fn compute_energy(cfg: &RunConfig, n: f64, deterministic: bool) -> Result<EnergyReport> {
    let pot = Potential::new(cfg.kappa, cfg.radius)?;
    let start = Instant::now();
    let model = Model::new(pot, cfg.cutoff_k.value(), n, cfg.beta)?;
    let sol = solve_eta(&model, cfg.scattering.tol, cfg.scattering.max_iter)?;
    let t_scatter = start.elapsed();
    let start = Instant::now();
    let tables = BogoliubovTables::build(&model, &sol)?;
    let mut report = assemble_report(&model, &sol, &tables, cfg.cutoff_k2.value())?;
    let t_sums = start.elapsed();
    if !deterministic {
        report.t_scatter_ms = t_scatter.as_secs_f64() * 1e3;
        report.t_sums_ms = t_sums.as_secs_f64() * 1e3;
    }
    Ok(report)
}

/// Fixed 17-significant-digit rendering; negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn csv_row(r: &EnergyReport) -> String {
    [
        r.n,
        r.beta,
        r.kappa,
        r.a_box,
        r.leading,
        r.e00,
        r.e01,
        r.c1,
        r.c2,
        r.e_corr,
        r.g2_expect,
        r.e_pert_tilde,
        r.e0,
        r.c_const,
        r.total_a,
        r.total_b,
        r.route_discrepancy,
        r.depletion,
        r.t_scatter_ms,
        r.t_sums_ms,
    ]
    .iter()
    .map(|&x| fmt_num(x))
    .collect::<Vec<_>>()
    .join(",")
}

/// A row that failed during a scan.
#[derive(Debug, Clone, Serialize)]
pub struct FailedRow {
    #[serde(rename = "N")]
    pub n: f64,
    pub error: String,
}

/// Output record: report(s) with the config hash embedded.
#[derive(Debug, Clone, Serialize)]
pub struct Record<T: Serialize> {
    pub config_hash: String,
    pub config: RunConfig,
    pub deterministic: bool,
    pub result: T,
}

/// Pretty JSON with every float rendered like the CSV columns.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    let mut out = String::new();
    write_json(&v, 0, &mut out);
    out.push('\n');
    out
}

fn write_json(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => out.push_str(&i.to_string()),
            (_, Some(u)) => out.push_str(&u.to_string()),
            _ => out.push_str(&fmt_num(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(o) => {
            if o.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

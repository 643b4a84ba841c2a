//! Run configuration: a TOML file with the physical parameters, cutoffs,
//! solver settings, an optional oracle block and output paths.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::TWO_PI;
use crate::oracle::OracleSpec;
use crate::scattering::{DEFAULT_MAX_ITER, DEFAULT_TOL};

/// A momentum cutoff, either a number or a multiple of pi such as `"40pi"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Value(f64),
    Text(PiMultiple),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PiMultiple(pub f64);

impl TryFrom<String> for PiMultiple {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        let t = s.trim();
        let head = t
            .strip_suffix("pi")
            .ok_or_else(|| format!("cutoff {s:?} is neither a number nor of the form \"<x>pi\""))?;
        let head = head.trim().trim_end_matches('*').trim();
        let x = if head.is_empty() {
            1.0
        } else {
            head.parse().map_err(|e| format!("{s:?}: {e}"))?
        };
        Ok(Self(x))
    }
}

impl From<PiMultiple> for String {
    fn from(p: PiMultiple) -> String {
        format!("{}pi", p.0)
    }
}

impl Cutoff {
    pub fn value(&self) -> f64 {
        match self {
            Cutoff::Value(v) => *v,
            Cutoff::Text(p) => p.0 * std::f64::consts::PI,
        }
    }
}

fn default_radius() -> f64 {
    0.25
}
fn default_k() -> Cutoff {
    Cutoff::Text(PiMultiple(40.0))
}
fn default_k2() -> Cutoff {
    Cutoff::Text(PiMultiple(20.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringSettings {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

impl Default for ScatteringSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Particle number of a single run.
    #[serde(rename = "N", default)]
    pub n: Option<f64>,
    /// Particle numbers of a scan.
    #[serde(rename = "N_list", default)]
    pub n_list: Option<Vec<f64>>,
    pub beta: f64,
    pub kappa: f64,
    #[serde(rename = "R", default = "default_radius")]
    pub radius: f64,
    #[serde(rename = "cutoff_K", default = "default_k")]
    pub cutoff_k: Cutoff,
    #[serde(rename = "cutoff_K2", default = "default_k2")]
    pub cutoff_k2: Cutoff,
    #[serde(default)]
    pub scattering: ScatteringSettings,
    #[serde(default)]
    pub oracle: Option<OracleSpec>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::RejectedConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::RejectedConfig(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks the invariants; returns warnings that do not stop a run.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::BetaOutOfRange(self.beta));
        }
        if self.beta <= 0.5 {
            warnings.push(format!("beta = {} is outside (1/2, 1)", self.beta));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {} must be >= 0",
                self.kappa
            )));
        }
        if !(self.radius > 0.0 && self.radius <= 0.25) {
            return Err(Error::InvalidParameter(format!(
                "R = {} outside (0, 1/4]",
                self.radius
            )));
        }
        let (k, k2) = (self.cutoff_k.value(), self.cutoff_k2.value());
        if !(k >= TWO_PI * (1.0 - 1e-12)) {
            return Err(Error::CutoffTooSmall(k));
        }
        if !(k2 >= TWO_PI * (1.0 - 1e-12)) {
            return Err(Error::CutoffTooSmall(k2));
        }
        if k2 > k * (1.0 + 1e-12) {
            return Err(Error::RejectedConfig(format!(
                "cutoff_K2 = {k2} exceeds cutoff_K = {k}"
            )));
        }
        if !(self.scattering.tol > 0.0) || self.scattering.max_iter == 0 {
            return Err(Error::RejectedConfig(
                "scattering tol must be > 0 and max_iter >= 1".into(),
            ));
        }
        for &n in self.n.iter().chain(self.n_list.iter().flatten()) {
            if !(n >= 2.0 && n.is_finite()) {
                return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
            }
        }
        Ok(warnings)
    }

    /// `N` for a single run: `N` or the sole entry of `N_list`.
    pub fn single_n(&self) -> Result<f64> {
        match (&self.n, &self.n_list) {
            (Some(n), _) => Ok(*n),
            (None, Some(l)) if l.len() == 1 => Ok(l[0]),
            _ => Err(Error::RejectedConfig("a single N is required".into())),
        }
    }

    /// `N` values of a scan; at least two are required.
    pub fn scan_ns(&self) -> Result<Vec<f64>> {
        match &self.n_list {
            Some(l) if l.len() >= 2 => Ok(l.clone()),
            Some(l) => Err(Error::RejectedConfig(format!(
                "scan needs at least 2 values of N, got {}",
                l.len()
            ))),
            None => Err(Error::RejectedConfig("scan needs N_list".into())),
        }
    }

    /// SHA-256 of the canonical JSON form, so formatting of the file does
    /// not change the hash.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "N = 10000\nbeta = 0.75\nkappa = 0.1\n";

    #[test]
    fn defaults_and_pi_cutoffs() {
        let c = RunConfig::from_toml(BASE).unwrap();
        assert_eq!(c.radius, 0.25);
        assert_eq!(c.cutoff_k.value(), 40.0 * std::f64::consts::PI);
        assert_eq!(c.cutoff_k2.value(), 20.0 * std::f64::consts::PI);
        let c =
            RunConfig::from_toml(&format!("{BASE}cutoff_K = \"8pi\"\ncutoff_K2 = 7.0\n")).unwrap();
        assert_eq!(c.cutoff_k.value(), 8.0 * std::f64::consts::PI);
        assert_eq!(c.cutoff_k2.value(), 7.0);
    }

    #[test]
    fn rejects_bad_beta_and_cutoffs() {
        assert_eq!(
            RunConfig::from_toml("N = 100\nbeta = 1.2\nkappa = 0.1\n").unwrap_err(),
            Error::BetaOutOfRange(1.2)
        );
        assert!(
            RunConfig::from_toml(&format!("{BASE}cutoff_K = \"4pi\"\ncutoff_K2 = \"8pi\"\n"))
                .is_err()
        );
        assert!(RunConfig::from_toml("N = 100\nbeta = 0.7\nkappa = -1\n").is_err());
        assert!(RunConfig::from_toml(&format!("{BASE}unknown = 1\n")).is_err());
    }

    #[test]
    fn warns_outside_regime() {
        let c = RunConfig::from_toml("N = 100\nbeta = 0.3\nkappa = 0.1\n").unwrap();
        assert_eq!(c.validate().unwrap().len(), 1);
    }

    #[test]
    fn scan_needs_two_values() {
        let c = RunConfig::from_toml("N_list = [1000.0]\nbeta = 0.8\nkappa = 0.1\n").unwrap();
        assert!(matches!(c.scan_ns(), Err(Error::RejectedConfig(_))));
        assert_eq!(c.single_n().unwrap(), 1000.0);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RunConfig::from_toml(BASE).unwrap();
        let b = RunConfig::from_toml("kappa=0.1\n\n beta =0.75\nN=10000\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let c = RunConfig::from_toml("N = 10000\nbeta = 0.75\nkappa = 0.2\n").unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}

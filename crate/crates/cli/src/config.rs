//! Experiment configuration, read from a flat TOML file.
//!
//! ```toml
//! domain = "interval"
//! bounds = [0.0, 1.0]
//! grid = 201
//! family = "sup_bernstein"
//! phi = "identity"
//! limit = "composition"
//! schedule = [4, 8, 16, 32, 64, 128, 256]
//! probes = ["abs(x-0.5)", "sin(3*x)"]
//! norm = "sup"
//! seed = 42
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Hypothesis gate, then the Korovkin test set and probes.
    #[default]
    Korovkin,
    /// Rotation averages against the circle mean, without the gate.
    Weyl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Interval,
    Box,
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormTag {
    #[default]
    Sup,
    L1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bounds {
    Interval([f64; 2]),
    Box(Vec<[f64; 2]>),
}

/// A number, or a named constant such as `golden`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentKind,
    pub domain: DomainTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    pub grid: usize,
    #[serde(default = "default_family")]
    pub family: String,
    #[serde(default = "default_phi")]
    pub phi: String,
    #[serde(default = "default_distortion")]
    pub distortion: String,
    #[serde(default = "default_limit")]
    pub limit: String,
    pub schedule: Vec<usize>,
    #[serde(default)]
    pub probes: Vec<String>,
    #[serde(default)]
    pub norm: NormTag,
    /// Convergence tolerance; defaults by norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Deficit override for Korovkin runs; rotation angle for `weyl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_panels")]
    pub quadrature_panels: usize,
    #[serde(default = "default_true")]
    pub axioms: bool,
    #[serde(default = "default_axiom_samples")]
    pub axiom_samples: usize,
    #[serde(default = "default_apriori_epsilon")]
    pub apriori_epsilon: Vec<f64>,
}

fn default_family() -> String {
    "sup_bernstein".into()
}
fn default_phi() -> String {
    "identity".into()
}
fn default_distortion() -> String {
    "identity".into()
}
fn default_limit() -> String {
    "identity".into()
}
fn default_refinement() -> usize {
    2
}
fn default_resolution() -> usize {
    korovkin::choquet::DEFAULT_RESOLUTION
}
fn default_panels() -> usize {
    8
}
fn default_true() -> bool {
    true
}
fn default_axiom_samples() -> usize {
    20
}
fn default_apriori_epsilon() -> Vec<f64> {
    vec![0.1]
}

impl ExperimentConfig {
    pub fn from_toml(src: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    /// Structural checks; specs are parsed when the experiment is built.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.schedule.is_empty() {
            return bad("schedule is empty".into());
        }
        if self.schedule[0] == 0 || self.schedule.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!(
                "schedule {:?} must be strictly increasing positive integers",
                self.schedule
            ));
        }
        if self.grid < 2 {
            return bad(format!("grid {} must be at least 2", self.grid));
        }
        for (name, v) in [
            ("tolerance", self.tolerance),
            ("hypothesis_tolerance", self.hypothesis_tolerance),
        ] {
            if let Some(t) = v {
                if !(t >= 0.0 && t.is_finite()) {
                    return bad(format!("{name} {t} must be a nonnegative number"));
                }
            }
        }
        if self.apriori_epsilon.iter().any(|e| !(*e > 0.0)) {
            return bad("apriori_epsilon entries must be positive".into());
        }
        match (self.domain, &self.bounds) {
            (DomainTag::Box, None) => return bad("box domain needs bounds = [[lo, hi], ...]".into()),
            (DomainTag::Box, Some(Bounds::Interval(_))) => {
                return bad("box domain needs bounds = [[lo, hi], ...]".into())
            }
            (DomainTag::Interval, Some(Bounds::Box(_))) => return bad("interval domain needs bounds = [lo, hi]".into()),
            _ => {}
        }
        if self.experiment == ExperimentKind::Weyl && self.domain != DomainTag::Circle {
            return bad("weyl experiments need domain = \"circle\"".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        domain = "interval"
        grid = 11
        schedule = [1, 2]
    "#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.family, "sup_bernstein");
        assert_eq!(c.norm, NormTag::Sup);
        assert_eq!(c.resolution, 256);
        assert_eq!(c.apriori_epsilon, vec![0.1]);
        assert!(c.bounds.is_none());
    }

    #[test]
    fn alpha_forms() {
        let c = ExperimentConfig::from_toml(&format!("{MINIMAL}\nalpha = \"golden\"")).unwrap();
        assert_eq!(c.alpha, Some(AlphaSpec::Named("golden".into())));
        let c = ExperimentConfig::from_toml(&format!("{MINIMAL}\nalpha = 0.5")).unwrap();
        assert_eq!(c.alpha, Some(AlphaSpec::Value(0.5)));
    }

    #[test]
    fn box_bounds() {
        let src = "domain = \"box\"\nbounds = [[0.0, 1.0], [0.0, 1.0]]\ngrid = 5\nschedule = [2]";
        let c = ExperimentConfig::from_toml(src).unwrap();
        assert_eq!(c.bounds, Some(Bounds::Box(vec![[0.0, 1.0], [0.0, 1.0]])));
    }

    #[test]
    fn rejects_bad_configs() {
        for src in [
            "domain = \"interval\"\ngrid = 11\nschedule = [4, 2]",
            "domain = \"interval\"\ngrid = 11\nschedule = []",
            "domain = \"interval\"\ngrid = 11\nschedule = [\"a\"]",
            "domain = \"interval\"\ngrid = 11\nschedule = [2]\nunknown = 1",
            "domain = \"sphere\"\ngrid = 11\nschedule = [2]",
            "domain = \"box\"\ngrid = 11\nschedule = [2]",
            "domain = \"interval\"\ngrid = 11\nschedule = [2]\nexperiment = \"weyl\"",
            "domain = \"interval\"\ngrid = 11\nschedule = [2]\ntolerance = -1.0",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(src), Err(CliError::Config(_))),
                "{src}"
            );
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::from_toml(&format!("{MINIMAL}\nprobes = [\"x^2\"]\nalpha = 1.5")).unwrap();
        let again = ExperimentConfig::from_toml(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}

//! TOML scenario configuration with strict key checking.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::fieldcore::{Grid1D, PhysParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Unset values fall back to the scenario's own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: Option<usize>,
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub c: f64,
    pub hbar: f64,
    pub omega: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            hbar: 1.0,
            omega: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Plane,
    Standing,
    Gaussian,
    GwPlane,
    GwGaussian,
}

impl FieldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::Plane => "plane",
            FieldKind::Standing => "standing",
            FieldKind::Gaussian => "gaussian",
            FieldKind::GwPlane => "gw_plane",
            FieldKind::GwGaussian => "gw_gaussian",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub kind: Option<FieldKind>,
    /// Carrier wavenumber; defaults to `omega / c`.
    pub k: Option<f64>,
    pub sigma: Option<f64>,
    pub amplitude: Option<f64>,
    pub center: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub delta_t_probe: Option<f64>,
    pub rho_min: Option<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report_path: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Config {
        key: path.into(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    /// Parses and validates a TOML document. Unknown keys fail with their full path.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_error("<document>", e.to_string()))?;
        let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            config_error(key, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Minimal config for a registered scenario, all other values defaulted.
    pub fn for_scenario(name: &str) -> Self {
        Self {
            scenario: name.to_string(),
            grid: GridConfig::default(),
            physics: PhysicsConfig::default(),
            field: FieldConfig::default(),
            run: RunConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let info = super::registry::find(&self.scenario)
            .ok_or_else(|| config_error("scenario", format!("unknown scenario `{}`", self.scenario)))?;

        let finite_positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(config_error(key, format!("must be finite and positive, got {v}")))
            }
        };
        finite_positive("physics.c", self.physics.c)?;
        finite_positive("physics.hbar", self.physics.hbar)?;
        finite_positive("physics.omega", self.physics.omega)?;
        if let Some(l) = self.grid.length {
            finite_positive("grid.length", l)?;
        }
        if let Some(n) = self.grid.n {
            if n < 8 || n % 2 != 0 {
                return Err(config_error("grid.n", format!("must be even and at least 8, got {n}")));
            }
        }
        for (key, v) in [
            ("field.sigma", self.field.sigma),
            ("field.amplitude", self.field.amplitude),
            ("run.dt", self.run.dt),
            ("run.delta_t_probe", self.run.delta_t_probe),
            ("run.rho_min", self.run.rho_min),
        ] {
            if let Some(v) = v {
                finite_positive(key, v)?;
            }
        }
        for (key, v) in [("field.k", self.field.k), ("field.center", self.field.center)] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(config_error(key, format!("must be finite, got {v}")));
                }
            }
        }
        if self.run.steps == Some(0) {
            return Err(config_error("run.steps", "must be at least 1"));
        }
        if let Some(kind) = self.field.kind {
            if !info.field_kinds.contains(&kind) {
                return Err(config_error(
                    "field.kind",
                    format!("`{}` is not supported by scenario `{}`", kind.as_str(), info.name),
                ));
            }
        }
        for (name, &tol) in &self.run.tolerances {
            let key = format!("run.tolerances.{name}");
            match info.checks.iter().find(|c| c.name == name) {
                None => {
                    return Err(config_error(key, format!("no check `{name}` in scenario `{}`", info.name)));
                }
                Some(c) if c.kind == super::CheckKind::Flag => {
                    return Err(config_error(key, format!("`{name}` is a flag and takes no tolerance")));
                }
                Some(_) => {}
            }
            finite_positive(&key, tol)?;
        }
        Ok(())
    }

    pub fn params(&self) -> PhysParams {
        PhysParams::new(self.physics.c, self.physics.hbar, self.physics.omega).expect("validated")
    }

    pub fn grid_or(&self, n: usize, length: f64) -> Result<Grid1D, ScenarioError> {
        Grid1D::new(self.grid.n.unwrap_or(n), self.grid.length.unwrap_or(length))
            .map_err(|e| config_error("grid", e.to_string()))
    }

    /// Default grid of `n` samples over `[0, 2 pi)`.
    pub fn periodic_grid(&self, n: usize) -> Result<Grid1D, ScenarioError> {
        self.grid_or(n, 2.0 * PI)
    }

    pub fn kind_or(&self, default: FieldKind) -> FieldKind {
        self.field.kind.unwrap_or(default)
    }

    /// Slice separation for two-slice checks, `1e-4 / omega` unless configured.
    pub fn probe_dt(&self) -> f64 {
        self.run
            .delta_t_probe
            .unwrap_or(crate::madelung::DEFAULT_PROBE_OMEGA_DT / self.physics.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let c = ScenarioConfig::from_toml_str("scenario = \"complementarity\"\n").unwrap();
        assert_eq!(c.physics, PhysicsConfig::default());
        assert_eq!(c.grid.n, None);
    }

    #[test]
    fn unknown_key_names_its_path() {
        let text = "scenario = \"complementarity\"\n[physics]\nomega = 2.0\nomega_2 = 3.0\n";
        match ScenarioConfig::from_toml_str(text) {
            Err(ScenarioError::Config { key, message }) => {
                assert!(key.contains("omega_2") || message.contains("omega_2"), "{key}: {message}");
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_scenario_and_tolerance_rejected() {
        assert!(ScenarioConfig::from_toml_str("scenario = \"nope\"\n").is_err());
        let text = "scenario = \"complementarity\"\n[run.tolerances]\nmade_up = 1.0\n";
        assert!(matches!(
            ScenarioConfig::from_toml_str(text),
            Err(ScenarioError::Config { .. })
        ));
        let text = "scenario = \"complementarity\"\n[run.tolerances]\nhj_residual = -1.0\n";
        assert!(ScenarioConfig::from_toml_str(text).is_err());
    }

    #[test]
    fn non_finite_and_bad_grid_rejected() {
        assert!(ScenarioConfig::from_toml_str("scenario = \"complementarity\"\n[physics]\nc = nan\n").is_err());
        assert!(ScenarioConfig::from_toml_str("scenario = \"complementarity\"\n[grid]\nn = 7\n").is_err());
        assert!(ScenarioConfig::from_toml_str("scenario = \"complementarity\"\n[field]\nkind = \"gw_plane\"\n").is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let mut c = ScenarioConfig::for_scenario("gw_graviton");
        c.grid.n = Some(128);
        c.run.tolerances.insert("hj_residual".into(), 1e-9);
        let back = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }
}

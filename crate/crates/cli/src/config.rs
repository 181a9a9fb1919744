//! The JSON run file and its translation into core types.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use wqed_core::{ChainConfig, Direction, InitialCondition, PulseSpec};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chain: ChainSection,
    pub initial: InitialSection,
    pub horizon: f64,
    pub grid: GridSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub n: usize,
    pub omega: f64,
    pub j0: f64,
    pub separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    ExcitedQubit,
    Pulse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Defaults to `right`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_points: Option<usize>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<f64>,
    pub t_points: Option<usize>,
    pub x_points: Option<usize>,
    pub omega: Option<f64>,
    pub j0: Option<f64>,
    pub separation: Option<f64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(CliError::Runtime)?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(v) = o.horizon {
            self.horizon = v;
        }
        if let Some(v) = o.t_points {
            self.grid.t_points = v;
        }
        if let Some(v) = o.x_points {
            self.grid.x_points = Some(v);
        }
        if let Some(v) = o.omega {
            self.chain.omega = v;
        }
        if let Some(v) = o.j0 {
            self.chain.j0 = v;
        }
        if let Some(v) = o.separation {
            self.chain.separation = v;
        }
        self.validate()
    }

    fn floats(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("chain.omega", self.chain.omega),
            ("chain.j0", self.chain.j0),
            ("chain.separation", self.chain.separation),
            ("horizon", self.horizon),
        ];
        v.extend(self.initial.sigma.map(|s| ("initial.sigma", s)));
        v.extend(self.initial.x0.map(|s| ("initial.x0", s)));
        v
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some((name, value)) = self.floats().into_iter().find(|(_, v)| !v.is_finite()) {
            return Err(usage(format!("{name} must be finite, got {value}")));
        }
        if self.horizon <= 0.0 {
            return Err(usage(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.grid.t_points < 2 {
            return Err(usage("grid.t_points must be at least 2"));
        }
        if self.grid.x_points == Some(0) {
            return Err(usage("grid.x_points must be positive"));
        }
        self.chain()?;
        self.initial_condition()?;
        Ok(())
    }

    pub fn chain(&self) -> Result<ChainConfig, CliError> {
        let c = &self.chain;
        ChainConfig::uniform(c.n, c.omega, c.j0, c.separation).map_err(|e| usage(format!("chain: {e}")))
    }

    pub fn initial_condition(&self) -> Result<InitialCondition, CliError> {
        let i = &self.initial;
        let init = match i.kind {
            InitialKind::ExcitedQubit => {
                let q = i.qubit.ok_or_else(|| usage("initial.qubit is required for excited_qubit"))?;
                InitialCondition::ExcitedQubit(q)
            }
            InitialKind::Pulse => {
                let sigma = i.sigma.ok_or_else(|| usage("initial.sigma is required for pulse"))?;
                let x0 = i.x0.ok_or_else(|| usage("initial.x0 is required for pulse"))?;
                let dir = i.direction.unwrap_or(Direction::Right);
                InitialCondition::IncidentPulse(
                    PulseSpec::decaying_exponential(sigma, x0, dir).map_err(|e| usage(format!("initial: {e}")))?,
                )
            }
        };
        init.validate(&self.chain()?).map_err(|e| usage(format!("initial: {e}")))?;
        Ok(init)
    }

    /// `t_points` evenly spaced times on `[0, horizon]`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.grid.t_points;
        (0..n).map(|k| self.horizon * k as f64 / (n - 1) as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FERMI: &str = r#"{
        "chain": {"n": 2, "omega": 200.0, "j0": 1.0, "separation": 1.0},
        "initial": {"kind": "excited_qubit", "qubit": 0},
        "horizon": 5.0,
        "grid": {"t_points": 11}
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::parse(FERMI).unwrap();
        assert_eq!(cfg.chain().unwrap().num_qubits(), 2);
        assert_eq!(cfg.initial_condition().unwrap(), InitialCondition::ExcitedQubit(0));
        assert_eq!(cfg.times().len(), 11);
        assert_eq!(cfg.times()[10], 5.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = FERMI.replace("\"horizon\"", "\"extra\": 1, \"horizon\"");
        assert!(matches!(RunConfig::parse(&bad), Err(CliError::Usage(_))));
        let bad = FERMI.replace("\"qubit\": 0", "\"qubit\": 0, \"phase\": 1");
        assert!(matches!(RunConfig::parse(&bad), Err(CliError::Usage(_))));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse(&FERMI.replace("\"horizon\": 5.0", "\"horizon\": -1")).is_err());
        assert!(RunConfig::parse(&FERMI.replace("\"qubit\": 0", "\"qubit\": 7")).is_err());
        assert!(RunConfig::parse(&FERMI.replace("\"j0\": 1.0", "\"j0\": 1e999")).is_err());
        let pulse = FERMI.replace(r#""kind": "excited_qubit", "qubit": 0"#, r#""kind": "pulse", "sigma": 1.0"#);
        assert!(RunConfig::parse(&pulse).is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = RunConfig::parse(FERMI).unwrap();
        cfg.apply(&Overrides { horizon: Some(2.0), omega: Some(10.0), ..Default::default() }).unwrap();
        assert_eq!(cfg.horizon, 2.0);
        assert_eq!(cfg.chain().unwrap().omega(), 10.0);
        assert!(cfg.apply(&Overrides { t_points: Some(1), ..Default::default() }).is_err());
    }
}

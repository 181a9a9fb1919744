//! Geometry of the qubit chain and the single-excitation initial conditions.
//!
//! Units: `ħ = v_g = 1`; rates are in units of the coupling `J0`
//! (the single-emitter decay rate is `γ0 = 2 J0`), lengths and times in `1/J0`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("a chain needs at least one qubit")]
    Empty,
    #[error("{name} must be finite and positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("qubit positions must be finite and strictly increasing")]
    Positions,
    #[error("qubit index {index} out of range for a chain of {n} qubits")]
    QubitIndex { index: usize, n: usize },
}

/// Propagation direction of a photon (or branch of the field).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }

    /// `+1` for right-moving, `-1` for left-moving.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Right => 1.0,
            Direction::Left => -1.0,
        }
    }
}

/// Identical qubits (transition energy `omega`, coupling `j0`) at fixed
/// positions along the waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    omega: f64,
    j0: f64,
    positions: Vec<f64>,
}

impl ChainConfig {
    /// `n` qubits at `x_m = m * separation`.
    pub fn uniform(n: usize, omega: f64, j0: f64, separation: f64) -> Result<Self, ConfigError> {
        if !(separation.is_finite() && separation >= 0.0) {
            return Err(ConfigError::Negative { name: "separation", value: separation });
        }
        let positions = (0..n).map(|m| m as f64 * separation).collect();
        Self::with_positions(omega, j0, positions)
    }

    pub fn with_positions(omega: f64, j0: f64, positions: Vec<f64>) -> Result<Self, ConfigError> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ConfigError::NotPositive { name: "omega", value: omega });
        }
        if !(j0.is_finite() && j0 > 0.0) {
            return Err(ConfigError::NotPositive { name: "j0", value: j0 });
        }
        if positions.is_empty() {
            return Err(ConfigError::Empty);
        }
        if positions.iter().any(|x| !x.is_finite()) || positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Positions);
        }
        Ok(Self { omega, j0, positions })
    }

    pub fn num_qubits(&self) -> usize {
        self.positions.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn j0(&self) -> f64 {
        self.j0
    }

    pub fn gamma0(&self) -> f64 {
        2.0 * self.j0
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, qubit: usize) -> f64 {
        self.positions[qubit]
    }

    /// Smallest distance between neighbouring qubits (`None` for a single qubit).
    pub fn min_separation(&self) -> Option<f64> {
        self.positions.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }

    /// Set when `omega < 10 j0`: the rotating-wave picture behind the model
    /// assumes `γ0 ≪ Ω`, although nothing downstream depends on it.
    pub fn weak_rwa_warning(&self) -> bool {
        self.omega < 10.0 * self.j0
    }

    pub fn check_qubit(&self, index: usize) -> Result<(), ConfigError> {
        if index < self.num_qubits() {
            Ok(())
        } else {
            Err(ConfigError::QubitIndex { index, n: self.num_qubits() })
        }
    }
}

/// Shape of an incident single-photon pulse.
///
/// A right-moving pulse with front at `x_f = x_first - x0` is
/// `ψ_R(x, 0) = √(2σ) e^{σ (x - x_f)} e^{iΩ (x - x_f)}` for `x < x_f`; the left-moving
/// one mirrors it about the last qubit. The carrier phase is referenced to the front.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PulseSpec {
    pub sigma: f64,
    pub x0: f64,
    pub direction: Direction,
}

impl PulseSpec {
    pub fn decaying_exponential(sigma: f64, x0: f64, direction: Direction) -> Result<Self, ConfigError> {
        let spec = Self { sigma, x0, direction };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(ConfigError::NotPositive { name: "sigma", value: self.sigma });
        }
        if !(self.x0.is_finite() && self.x0 > 0.0) {
            return Err(ConfigError::NotPositive { name: "x0", value: self.x0 });
        }
        Ok(())
    }

    /// Position of the pulse front at `t = 0`.
    pub fn front(&self, cfg: &ChainConfig) -> f64 {
        match self.direction {
            Direction::Right => cfg.position(0) - self.x0,
            Direction::Left => cfg.position(cfg.num_qubits() - 1) + self.x0,
        }
    }

    /// Index of the first qubit the pulse reaches.
    pub fn first_qubit(&self, cfg: &ChainConfig) -> usize {
        match self.direction {
            Direction::Right => 0,
            Direction::Left => cfg.num_qubits() - 1,
        }
    }

    /// Free-space profile of the pulse relative to its front, `u = (x - x_f)` signed
    /// along the direction of travel (so the pulse lives on `u < 0`).
    pub fn envelope(&self, omega: f64, u: f64) -> C64 {
        if u >= 0.0 {
            return C64::new(0.0, 0.0);
        }
        (2.0 * self.sigma).sqrt() * (self.sigma * u).exp() * C64::new(0.0, omega * u).exp()
    }

    /// Initial field `ψ_{R/L}(x, 0)` of this pulse on its own branch.
    pub fn initial_field(&self, cfg: &ChainConfig, x: f64) -> C64 {
        let u = self.direction.sign() * (x - self.front(cfg));
        self.envelope(cfg.omega(), u)
    }
}

/// Single-excitation initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    ExcitedQubit(usize),
    IncidentPulse(PulseSpec),
}

impl InitialCondition {
    pub fn validate(&self, cfg: &ChainConfig) -> Result<(), ConfigError> {
        match self {
            InitialCondition::ExcitedQubit(q) => cfg.check_qubit(*q),
            InitialCondition::IncidentPulse(p) => p.validate(),
        }
    }

    /// Light-travel time from the initial excitation to `qubit`.
    pub fn light_distance(&self, cfg: &ChainConfig, qubit: usize) -> f64 {
        match self {
            InitialCondition::ExcitedQubit(q) => (cfg.position(qubit) - cfg.position(*q)).abs(),
            InitialCondition::IncidentPulse(p) => (cfg.position(qubit) - p.front(cfg)).abs(),
        }
    }
}

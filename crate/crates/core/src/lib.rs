//! Closed-form single-photon dynamics of qubit chains coupled to a 1-D waveguide,
//! built from diagrams of scattering events.
//!
//! Units: `ħ = v_g = 1`, rates in units of the coupling `J0`.

pub mod chain;
pub mod diagrams;
pub mod evaluator;
pub mod fermi;
pub mod momentum;
pub mod oracle;
pub mod poly;
pub mod scattering;
pub mod terms;

pub use chain::{ChainConfig, ConfigError, Direction, InitialCondition, PulseSpec};
pub use diagrams::{enumerate_diagrams, Diagram, DiagramError, FinisherSpec, UnitCell};
pub use evaluator::{Engine, FieldProfile};
pub use momentum::{AlgebraError, RationalFn};
pub use terms::{DelayedTerm, Label, TimeSeriesAmplitude};

//! Unit cells, cascades and the fractal-tree enumeration of diagrams.
//!
//! A diagram is `starter · propagator* · finisher`. Propagators alternate between
//! free propagation to the next qubit and a scattering cell (transmit or reflect)
//! at that qubit. Every qubit encounter can also end the cascade with a qubit
//! finisher, and every photon leaving a qubit (or the pulse front) can end it with
//! a field finisher on the segment it enters.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainConfig, ConfigError, Direction, InitialCondition, PulseSpec};
use crate::momentum::{self, AlgebraError, RationalFn};
use crate::terms::{Label, Support, TimeSeriesAmplitude};

/// Default cap on the number of enumerated diagrams.
pub const DEFAULT_DIAGRAM_CAP: usize = 1_000_000;

const LENGTH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("free propagation of length {length} does not reach the next qubit (expected {expected})")]
    Length { length: f64, expected: f64 },
    #[error("the photon leaves the chain; no qubit ahead")]
    Exits,
    #[error("cell {cell} cannot follow the current cascade state")]
    Sequence { cell: String },
    #[error("x = {x} lies outside segment {segment}")]
    OutsideSegment { x: f64, segment: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("more than {cap} diagrams below the horizon")]
    HorizonTooLarge { cap: usize },
    #[error("diagram produced an upper half-plane pole at {pole}")]
    UpperHalfPlane { pole: C64 },
    #[error("horizon must be finite and positive, got {0}")]
    Horizon(f64),
}

/// Where an outgoing photon was last scattered or created.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum Source {
    PulseFront,
    Qubit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum UnitCell {
    /// `emit` is the direction of the emitted photon; `None` only for the
    /// diagram in which the qubit keeps its excitation.
    StarterExcited { qubit: usize, emit: Option<Direction> },
    StarterPulse { spec: PulseSpec },
    FreeProp { length: f64 },
    Transmit { qubit: usize },
    Reflect { qubit: usize },
    FinishQubit { qubit: usize },
    FinishField { branch: Direction, from: Source },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    Initial,
    /// Qubit still excited, nothing emitted.
    Holding(usize),
    Leaving(Source),
    Arriving(usize),
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramState {
    pub f: RationalFn,
    pub delay: f64,
    pub position: f64,
    pub direction: Option<Direction>,
    pub phase: Phase,
}

impl DiagramState {
    pub fn initial() -> Self {
        Self { f: RationalFn::one(), delay: 0.0, position: 0.0, direction: None, phase: Phase::Initial }
    }
}

/// Next qubit strictly ahead of `position` in direction `dir`.
pub fn next_qubit(cfg: &ChainConfig, position: f64, dir: Direction) -> Option<usize> {
    let xs = cfg.positions();
    match dir {
        Direction::Right => xs.iter().position(|&x| x > position + LENGTH_TOL),
        Direction::Left => xs.iter().rposition(|&x| x < position - LENGTH_TOL),
    }
}

/// Segment a photon enters when it leaves `from` along `branch`.
/// Segment `s` lies between qubits `s-1` and `s`.
pub fn field_segment(cfg: &ChainConfig, branch: Direction, from: Source) -> usize {
    match (branch, from) {
        (Direction::Right, Source::Qubit(q)) => q + 1,
        (Direction::Left, Source::Qubit(q)) => q,
        (Direction::Right, Source::PulseFront) => 0,
        (Direction::Left, Source::PulseFront) => cfg.num_qubits(),
    }
}

/// Closed interval of `x` covered by a segment; the outer segments are unbounded.
pub fn segment_bounds(cfg: &ChainConfig, segment: usize) -> (f64, f64) {
    let xs = cfg.positions();
    let lo = if segment == 0 { f64::NEG_INFINITY } else { xs[segment - 1] };
    let hi = xs.get(segment).copied().unwrap_or(f64::INFINITY);
    (lo, hi)
}

fn out_of_sequence(cell: &UnitCell) -> DiagramError {
    GeometryError::Sequence { cell: format!("{cell:?}") }.into()
}

pub fn apply_cell(cfg: &ChainConfig, state: &DiagramState, cell: &UnitCell) -> Result<DiagramState, DiagramError> {
    let j0 = cfg.j0();
    let mut s = state.clone();
    match (state.phase, *cell) {
        (Phase::Initial, UnitCell::StarterExcited { qubit, emit }) => {
            cfg.check_qubit(qubit)?;
            s.f = momentum::coeff_e(j0);
            s.position = cfg.position(qubit);
            s.direction = emit;
            s.phase = match emit {
                Some(_) => Phase::Leaving(Source::Qubit(qubit)),
                None => Phase::Holding(qubit),
            };
        }
        (Phase::Initial, UnitCell::StarterPulse { spec }) => {
            spec.validate()?;
            s.f = momentum::pulse_spectrum(&spec).0;
            s.position = spec.front(cfg);
            s.direction = Some(spec.direction);
            s.phase = Phase::Leaving(Source::PulseFront);
        }
        (Phase::Leaving(_), UnitCell::FreeProp { length }) => {
            let dir = state.direction.ok_or_else(|| out_of_sequence(cell))?;
            let next = next_qubit(cfg, state.position, dir).ok_or(GeometryError::Exits)?;
            let expected = (cfg.position(next) - state.position).abs();
            let matches = (length - expected).abs() <= LENGTH_TOL * (1.0 + expected);
            if !matches {
                return Err(GeometryError::Length { length, expected }.into());
            }
            s.delay += length;
            s.position = cfg.position(next);
            s.phase = Phase::Arriving(next);
        }
        (Phase::Arriving(q), UnitCell::Transmit { qubit }) if q == qubit => {
            s.f = state.f.mul(&momentum::coeff_t(j0));
            s.phase = Phase::Leaving(Source::Qubit(q));
        }
        (Phase::Arriving(q), UnitCell::Reflect { qubit }) if q == qubit => {
            s.f = state.f.mul(&momentum::coeff_r(j0));
            s.direction = state.direction.map(Direction::flip);
            s.phase = Phase::Leaving(Source::Qubit(q));
        }
        (Phase::Arriving(q) | Phase::Holding(q), UnitCell::FinishQubit { qubit }) if q == qubit => {
            s.phase = Phase::Finished;
        }
        (Phase::Leaving(src), UnitCell::FinishField { branch, from })
            if src == from && state.direction == Some(branch) =>
        {
            s.phase = Phase::Finished;
        }
        _ => return Err(out_of_sequence(cell)),
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub cells: Vec<UnitCell>,
    pub total_delay: f64,
}

impl Diagram {
    /// Builds a diagram, checking the cascade and caching its delay.
    pub fn new(cfg: &ChainConfig, cells: Vec<UnitCell>) -> Result<Self, DiagramError> {
        let state = fold_cells(cfg, &cells)?;
        if state.phase != Phase::Finished {
            return Err(GeometryError::Sequence { cell: "missing finisher".into() }.into());
        }
        Ok(Self { cells, total_delay: state.delay })
    }

    pub fn finisher(&self) -> Option<&UnitCell> {
        self.cells.last()
    }

    /// Number of transmit and reflect cells.
    pub fn scattering_counts(&self) -> (u32, u32) {
        self.cells.iter().fold((0, 0), |(t, r), c| match c {
            UnitCell::Transmit { .. } => (t + 1, r),
            UnitCell::Reflect { .. } => (t, r + 1),
            _ => (t, r),
        })
    }

    /// The qubit keeps its initial excitation (starter directly followed by its finisher).
    pub fn is_holding(&self) -> bool {
        matches!(self.cells.first(), Some(UnitCell::StarterExcited { emit: None, .. }))
    }
}

/// Left fold of [`apply_cell`] over `cells`, stopping at the finisher.
pub fn fold_cells(cfg: &ChainConfig, cells: &[UnitCell]) -> Result<DiagramState, DiagramError> {
    cells.iter().try_fold(DiagramState::initial(), |s, c| apply_cell(cfg, &s, c))
}

/// State just before the finisher.
fn open_state(cfg: &ChainConfig, d: &Diagram) -> Result<DiagramState, DiagramError> {
    let n = d.cells.len().saturating_sub(1);
    fold_cells(cfg, &d.cells[..n])
}

fn reject_anticausal(series: &TimeSeriesAmplitude) -> Result<(), DiagramError> {
    match series.terms.iter().find(|t| t.support == Support::AntiCausal) {
        Some(t) => Err(DiagramError::UpperHalfPlane { pole: t.pole }),
        None => Ok(()),
    }
}

/// Kernel multiplying `f` at a qubit finisher. The excited qubit's own diagram uses
/// `i/√J0` so that its starter `√J0/(Δ+iJ0)` yields `e^{-(J0+iΩ)t} Θ(t)`.
pub fn excitation_kernel(j0: f64, holding: bool) -> RationalFn {
    if holding {
        RationalFn::constant(C64::new(0.0, 1.0 / j0.sqrt()))
    } else {
        momentum::coeff_e(j0)
    }
}

/// Qubit amplitude carried by a diagram ending in [`UnitCell::FinishQubit`].
pub fn finish_excitation(cfg: &ChainConfig, d: &Diagram) -> Result<TimeSeriesAmplitude, DiagramError> {
    let qubit = match d.finisher() {
        Some(UnitCell::FinishQubit { qubit }) => *qubit,
        other => return Err(GeometryError::Sequence { cell: format!("{other:?}") }.into()),
    };
    let state = fold_cells(cfg, &d.cells)?;
    let f = state.f.mul(&excitation_kernel(cfg.j0(), d.is_holding()));
    let terms = momentum::inverse_transform(&f, state.delay, cfg.omega())?;
    let series = TimeSeriesAmplitude::from_terms(Label::Qubit(qubit), terms);
    reject_anticausal(&series)?;
    Ok(series)
}

/// Field branch, segment and reference point of a diagram ending in a field finisher.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldAnchor {
    pub branch: Direction,
    pub segment: usize,
    /// Position of the last scatterer (or the pulse front).
    pub reference: f64,
}

/// Field amplitude of the diagram at the reference point; the value at `x` is
/// obtained by shifting the delay by `±(x - reference)`.
pub fn field_series(cfg: &ChainConfig, d: &Diagram) -> Result<(FieldAnchor, TimeSeriesAmplitude), DiagramError> {
    let (branch, from) = match d.finisher() {
        Some(UnitCell::FinishField { branch, from }) => (*branch, *from),
        other => return Err(GeometryError::Sequence { cell: format!("{other:?}") }.into()),
    };
    let state = open_state(cfg, d)?;
    let segment = field_segment(cfg, branch, from);
    let terms = momentum::inverse_transform(&state.f, state.delay, cfg.omega())?;
    let series = TimeSeriesAmplitude::from_terms(Label::Field { branch, segment }, terms);
    reject_anticausal(&series)?;
    Ok((FieldAnchor { branch, segment, reference: state.position }, series))
}

/// Field amplitude of the diagram at position `x`, which must lie in the segment
/// the diagram's photon occupies. The window Π of the segment is not applied.
pub fn finish_field(cfg: &ChainConfig, d: &Diagram, x: f64) -> Result<TimeSeriesAmplitude, DiagramError> {
    let (anchor, mut series) = field_series(cfg, d)?;
    let (lo, hi) = segment_bounds(cfg, anchor.segment);
    if !(x >= lo && x <= hi) {
        return Err(GeometryError::OutsideSegment { x, segment: anchor.segment }.into());
    }
    let shift = anchor.branch.sign() * (x - anchor.reference);
    for term in &mut series.terms {
        term.delay += shift;
    }
    Ok(series)
}

/// Which diagrams the enumerator should emit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FinisherSpec {
    Qubit(usize),
    Field { branch: Direction, segment: usize },
    Any,
}

impl FinisherSpec {
    fn wants_qubit(&self, q: usize) -> bool {
        matches!(self, FinisherSpec::Any) || *self == FinisherSpec::Qubit(q)
    }

    fn wants_field(&self, branch: Direction, segment: usize) -> bool {
        matches!(self, FinisherSpec::Any) || *self == FinisherSpec::Field { branch, segment }
    }
}

struct Frame {
    cells: Vec<UnitCell>,
    delay: f64,
    source: Source,
    position: f64,
    direction: Direction,
}

struct Walk<'a> {
    cfg: &'a ChainConfig,
    target: FinisherSpec,
    horizon: f64,
    cap: usize,
    out: Vec<Diagram>,
}

impl Walk<'_> {
    fn emit(&mut self, mut cells: Vec<UnitCell>, finisher: UnitCell, delay: f64) -> Result<(), DiagramError> {
        if self.out.len() >= self.cap {
            return Err(DiagramError::HorizonTooLarge { cap: self.cap });
        }
        cells.push(finisher);
        self.out.push(Diagram { cells, total_delay: delay });
        Ok(())
    }

    /// Depth-first walk of the binary tree of transmit/reflect choices.
    fn run(&mut self, root: Frame) -> Result<(), DiagramError> {
        let mut stack = vec![root];
        let mut visited = 0usize;
        while let Some(fr) = stack.pop() {
            visited += 1;
            if visited > self.cap.saturating_mul(16) {
                return Err(DiagramError::HorizonTooLarge { cap: self.cap });
            }
            let segment = field_segment(self.cfg, fr.direction, fr.source);
            if self.target.wants_field(fr.direction, segment) {
                let finisher = UnitCell::FinishField { branch: fr.direction, from: fr.source };
                self.emit(fr.cells.clone(), finisher, fr.delay)?;
            }
            let Some(next) = next_qubit(self.cfg, fr.position, fr.direction) else {
                continue; // the photon leaves the chain
            };
            let x_next = self.cfg.position(next);
            let length = (x_next - fr.position).abs();
            let delay = fr.delay + length;
            if delay >= self.horizon {
                continue;
            }
            let mut cells = fr.cells;
            cells.push(UnitCell::FreeProp { length });
            if self.target.wants_qubit(next) {
                self.emit(cells.clone(), UnitCell::FinishQubit { qubit: next }, delay)?;
            }
            let mut reflected = cells.clone();
            reflected.push(UnitCell::Reflect { qubit: next });
            stack.push(Frame {
                cells: reflected,
                delay,
                source: Source::Qubit(next),
                position: x_next,
                direction: fr.direction.flip(),
            });
            cells.push(UnitCell::Transmit { qubit: next });
            stack.push(Frame { cells, delay, source: Source::Qubit(next), position: x_next, direction: fr.direction });
        }
        Ok(())
    }
}

/// All diagrams for `target` whose total delay is strictly below `horizon`,
/// sorted by delay and then by cell sequence.
pub fn enumerate_diagrams(
    cfg: &ChainConfig,
    init: &InitialCondition,
    target: FinisherSpec,
    horizon: f64,
    cap: usize,
) -> Result<Vec<Diagram>, DiagramError> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(DiagramError::Horizon(horizon));
    }
    init.validate(cfg)?;
    let mut walk = Walk { cfg, target, horizon, cap, out: Vec::new() };
    match *init {
        InitialCondition::ExcitedQubit(q) => {
            if target.wants_qubit(q) {
                let starter = UnitCell::StarterExcited { qubit: q, emit: None };
                walk.emit(vec![starter], UnitCell::FinishQubit { qubit: q }, 0.0)?;
            }
            for dir in [Direction::Right, Direction::Left] {
                walk.run(Frame {
                    cells: vec![UnitCell::StarterExcited { qubit: q, emit: Some(dir) }],
                    delay: 0.0,
                    source: Source::Qubit(q),
                    position: cfg.position(q),
                    direction: dir,
                })?;
            }
        }
        InitialCondition::IncidentPulse(spec) => {
            walk.run(Frame {
                cells: vec![UnitCell::StarterPulse { spec }],
                delay: 0.0,
                source: Source::PulseFront,
                position: spec.front(cfg),
                direction: spec.direction,
            })?;
        }
    }
    let mut out = walk.out;
    out.sort_by(|a, b| {
        a.total_delay
            .total_cmp(&b.total_delay)
            .then_with(|| a.cells.partial_cmp(&b.cells).unwrap_or(std::cmp::Ordering::Equal))
    });
    log::debug!("enumerated {} diagrams below t = {horizon}", out.len());
    Ok(out)
}

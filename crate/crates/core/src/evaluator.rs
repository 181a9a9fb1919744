//! Observables assembled from diagrams: qubit amplitudes, the piecewise field
//! `ψ_{R/L}(x, t)`, the total norm and causality probes.

use std::collections::hash_map::{Entry, HashMap};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainConfig, Direction, InitialCondition};
use crate::diagrams::{
    self, enumerate_diagrams, excitation_kernel, field_segment, segment_bounds, DiagramError,
    FinisherSpec, Source, UnitCell, DEFAULT_DIAGRAM_CAP,
};
use crate::momentum::{self, RationalFn};
use crate::poly;
use crate::terms::{heaviside, DelayedTerm, Label, Support, TimeSeriesAmplitude};

/// Right- or left-moving field on one segment, expressed through the series at
/// the segment's reference point: `ψ(x, t) = series(t ∓ (x - reference))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSeries {
    pub branch: Direction,
    pub segment: usize,
    pub reference: f64,
    pub series: TimeSeriesAmplitude,
}

impl FieldSeries {
    /// Branch value at `x`, ignoring the segment window.
    pub fn eval(&self, x: f64, t: f64) -> C64 {
        self.series.eval(t - self.branch.sign() * (x - self.reference))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub psi_r: C64,
    pub psi_l: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub t: f64,
    pub samples: Vec<FieldSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kernel {
    Holding,
    Qubit,
    Field,
}

/// All amplitudes of one configuration, exact for `t < horizon`.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: ChainConfig,
    init: InitialCondition,
    horizon: f64,
    qubits: Vec<TimeSeriesAmplitude>,
    fields: Vec<FieldSeries>,
    diagram_count: usize,
}

fn starter_f(cfg: &ChainConfig, init: &InitialCondition) -> RationalFn {
    match init {
        InitialCondition::ExcitedQubit(_) => momentum::coeff_e(cfg.j0()),
        InitialCondition::IncidentPulse(spec) => momentum::pulse_spectrum(spec).0,
    }
}

fn power(f: &RationalFn, n: u32) -> RationalFn {
    (0..n).fold(RationalFn::one(), |acc, _| acc.mul(f))
}

impl Engine {
    pub fn new(cfg: &ChainConfig, init: &InitialCondition, horizon: f64) -> Result<Self, DiagramError> {
        Self::with_cap(cfg, init, horizon, DEFAULT_DIAGRAM_CAP)
    }

    pub fn with_cap(cfg: &ChainConfig, init: &InitialCondition, horizon: f64, cap: usize) -> Result<Self, DiagramError> {
        let diagrams = enumerate_diagrams(cfg, init, FinisherSpec::Any, horizon, cap)?;
        let n = cfg.num_qubits();
        let mut qubits: Vec<_> = (0..n).map(|q| TimeSeriesAmplitude::new(Label::Qubit(q))).collect();
        let mut fields: Vec<FieldSeries> = Vec::new();
        for segment in 0..=n {
            for branch in [Direction::Right, Direction::Left] {
                let reference = match (branch, init) {
                    (Direction::Right, _) if segment > 0 => cfg.position(segment - 1),
                    (Direction::Left, _) if segment < n => cfg.position(segment),
                    (_, InitialCondition::IncidentPulse(spec)) => spec.front(cfg),
                    _ => f64::NAN,
                };
                fields.push(FieldSeries {
                    branch,
                    segment,
                    reference,
                    series: TimeSeriesAmplitude::new(Label::Field { branch, segment }),
                });
            }
        }

        // f depends only on the starter and the numbers of transmissions and reflections
        let starter = starter_f(cfg, init);
        let (t, r) = (momentum::coeff_t(cfg.j0()), momentum::coeff_r(cfg.j0()));
        let mut cache: HashMap<(Kernel, u32, u32), Vec<DelayedTerm>> = HashMap::new();
        for d in &diagrams {
            let (nt, nr) = d.scattering_counts();
            let kernel = match d.finisher() {
                Some(UnitCell::FinishQubit { .. }) if d.is_holding() => Kernel::Holding,
                Some(UnitCell::FinishQubit { .. }) => Kernel::Qubit,
                _ => Kernel::Field,
            };
            let key = (kernel, nt, nr);
            let terms = match cache.entry(key) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => {
                    let mut f = starter.mul(&power(&t, nt)).mul(&power(&r, nr));
                    if kernel != Kernel::Field {
                        f = f.mul(&excitation_kernel(cfg.j0(), kernel == Kernel::Holding));
                    }
                    let terms = momentum::inverse_transform(&f, 0.0, cfg.omega())?;
                    if let Some(bad) = terms.iter().find(|t| t.support == Support::AntiCausal) {
                        return Err(DiagramError::UpperHalfPlane { pole: bad.pole });
                    }
                    e.insert(terms)
                }
            };
            let shifted = terms.iter().map(|term| DelayedTerm { delay: d.total_delay, ..term.clone() });
            match d.finisher() {
                Some(UnitCell::FinishQubit { qubit }) => qubits[*qubit].extend(shifted),
                Some(UnitCell::FinishField { branch, from }) => {
                    let segment = field_segment(cfg, *branch, *from);
                    fields[Self::field_index(segment, *branch)].series.extend(shifted);
                }
                _ => unreachable!("enumerator only emits finished diagrams"),
            }
        }
        for s in &mut qubits {
            s.canonicalize();
        }
        for f in &mut fields {
            f.series.canonicalize();
        }
        log::debug!("engine: {} diagrams, horizon {horizon}", diagrams.len());
        Ok(Self { cfg: cfg.clone(), init: *init, horizon, qubits, fields, diagram_count: diagrams.len() })
    }

    fn field_index(segment: usize, branch: Direction) -> usize {
        2 * segment + usize::from(branch == Direction::Left)
    }

    pub fn config(&self) -> &ChainConfig {
        &self.cfg
    }

    pub fn initial_condition(&self) -> &InitialCondition {
        &self.init
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn diagram_count(&self) -> usize {
        self.diagram_count
    }

    pub fn qubit_series(&self, qubit: usize) -> &TimeSeriesAmplitude {
        &self.qubits[qubit]
    }

    pub fn field_series(&self, branch: Direction, segment: usize) -> &FieldSeries {
        &self.fields[Self::field_index(segment, branch)]
    }

    pub fn excitation(&self, qubit: usize, t: f64) -> C64 {
        self.qubits[qubit].eval(t)
    }

    /// `(ψ_R, ψ_L)` at `x` with the segment windows `Θ(x - x_{s-1}) - Θ(x - x_s)`
    /// (half weight on each side exactly at a qubit).
    pub fn field(&self, x: f64, t: f64) -> (C64, C64) {
        let mut out = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for segment in 0..=self.cfg.num_qubits() {
            let (lo, hi) = segment_bounds(&self.cfg, segment);
            let w = window(x, lo, hi);
            if w == 0.0 {
                continue;
            }
            out.0 += w * self.field_series(Direction::Right, segment).eval(x, t);
            out.1 += w * self.field_series(Direction::Left, segment).eval(x, t);
        }
        out
    }

    pub fn profile(&self, t: f64, xs: &[f64]) -> FieldProfile {
        let samples = xs
            .iter()
            .map(|&x| {
                let (psi_r, psi_l) = self.field(x, t);
                FieldSample { x, psi_r, psi_l }
            })
            .collect();
        FieldProfile { t, samples }
    }

    /// `Σ_Q |e_Q|² + ∫ (|ψ_R|² + |ψ_L|²) dx`, integrated in closed form per segment.
    pub fn norm(&self, t: f64) -> f64 {
        let qubits: f64 = self.qubits.iter().map(|s| s.eval_right(t).norm_sqr()).sum();
        let mut field = 0.0;
        for fs in &self.fields {
            if fs.series.terms.is_empty() {
                continue;
            }
            let (a, b) = segment_bounds(&self.cfg, fs.segment);
            // retarded time s = t ∓ (x - reference) over the segment
            let (s_lo, s_hi) = match fs.branch {
                Direction::Right => (t - (b - fs.reference), t - (a - fs.reference)),
                Direction::Left => (t + (a - fs.reference), t + (b - fs.reference)),
            };
            field += series_norm(&fs.series.terms, s_lo, s_hi);
        }
        qubits + field
    }
}

fn window(x: f64, lo: f64, hi: f64) -> f64 {
    let a = if lo.is_finite() { heaviside(x - lo) } else { 1.0 };
    let b = if hi.is_finite() { heaviside(x - hi) } else { 0.0 };
    a - b
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `∫_0^w h^m e^{-c h} dh` for `Re c > 0`; `w` may be infinite.
fn moment(m: usize, c: C64, w: f64) -> C64 {
    if w <= 0.0 {
        return C64::new(0.0, 0.0);
    }
    let full = factorial(m) / c.powi(m as i32 + 1);
    if w.is_infinite() {
        return full;
    }
    let x = c * w;
    if x.norm() > m as f64 + 30.0 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..=m {
            term *= x / k as f64;
            sum += term;
        }
        full * (1.0 - (-x).exp() * sum)
    } else {
        // w^{m+1} e^{-x} Σ_k x^k / ((m+1)(m+2)...(m+1+k))
        let mut term = C64::new(1.0 / (m + 1) as f64, 0.0);
        let mut sum = term;
        let mut k = 1;
        loop {
            term *= x / (m + 1 + k) as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() && k as f64 > x.norm() {
                break;
            }
            k += 1;
        }
        w.powi(m as i32 + 1) * (-x).exp() * sum
    }
}

/// `∫_{s_lo}^{s_hi} |Σ_i term_i(s)|² ds` for causal terms.
fn series_norm(terms: &[DelayedTerm], s_lo: f64, s_hi: f64) -> f64 {
    let i_unit = C64::new(0.0, 1.0);
    let mut total = 0.0;
    for (i, a) in terms.iter().enumerate() {
        for (j, b) in terms.iter().enumerate().skip(i) {
            let lo = s_lo.max(a.delay).max(b.delay);
            if lo >= s_hi {
                continue;
            }
            let w = s_hi - lo;
            let qa = a.pole + a.carrier;
            let qb = b.pole + b.carrier;
            let pa = poly::taylor_shift_real(&a.poly, lo - a.delay);
            let pb: Vec<C64> = poly::taylor_shift_real(&b.poly, lo - b.delay).iter().map(|z| z.conj()).collect();
            let phase = (-i_unit * qa * (lo - a.delay)).exp() * (-i_unit * qb * (lo - b.delay)).exp().conj();
            let c = i_unit * (qa - qb.conj());
            let moments: Vec<C64> = (0..pa.len() + pb.len()).map(|m| moment(m, c, w)).collect();
            let mut acc = C64::new(0.0, 0.0);
            for (m, x) in pa.iter().enumerate() {
                for (n, y) in pb.iter().enumerate() {
                    acc += x * y * moments[m + n];
                }
            }
            let v = (phase * acc).re;
            total += if i == j { v } else { 2.0 * v };
        }
    }
    total
}

/// Qubit amplitude exact for `t < horizon`.
pub fn excitation_amplitude(
    cfg: &ChainConfig,
    init: &InitialCondition,
    qubit: usize,
    horizon: f64,
) -> Result<TimeSeriesAmplitude, DiagramError> {
    excitation_amplitude_capped(cfg, init, qubit, horizon, DEFAULT_DIAGRAM_CAP)
}

pub fn excitation_amplitude_capped(
    cfg: &ChainConfig,
    init: &InitialCondition,
    qubit: usize,
    horizon: f64,
    cap: usize,
) -> Result<TimeSeriesAmplitude, DiagramError> {
    cfg.check_qubit(qubit)?;
    let mut out = TimeSeriesAmplitude::new(Label::Qubit(qubit));
    for d in enumerate_diagrams(cfg, init, FinisherSpec::Qubit(qubit), horizon, cap)? {
        out.extend(diagrams::finish_excitation(cfg, &d)?.terms);
    }
    out.canonicalize();
    Ok(out)
}

/// Smallest horizon strictly above `t`.
fn horizon_after(t: f64) -> f64 {
    t + 1e-9 * (1.0 + t.abs())
}

pub fn field_profile(cfg: &ChainConfig, init: &InitialCondition, t: f64, xs: &[f64]) -> Result<FieldProfile, DiagramError> {
    let horizon = horizon_after(t.max(0.0));
    Ok(Engine::new(cfg, init, horizon)?.profile(t, xs))
}

pub fn total_norm(cfg: &ChainConfig, init: &InitialCondition, t: f64) -> Result<f64, DiagramError> {
    let horizon = horizon_after(t.max(0.0));
    Ok(Engine::new(cfg, init, horizon)?.norm(t))
}

/// Largest `|e_qubit(t)|` on a fine grid over `(0, d)`, `d` being the light-travel
/// time from the initial excitation to `qubit`.
pub fn causality_probe(cfg: &ChainConfig, init: &InitialCondition, qubit: usize) -> Result<f64, DiagramError> {
    cfg.check_qubit(qubit)?;
    let d = init.light_distance(cfg, qubit);
    if d <= 0.0 {
        return Ok(0.0);
    }
    let series = excitation_amplitude(cfg, init, qubit, 2.0 * d + 1.0)?;
    const POINTS: usize = 4000;
    Ok((1..POINTS).map(|k| series.eval(d * k as f64 / POINTS as f64).norm()).fold(0.0, f64::max))
}

/// Uniform grid over the closed segment `[lo, hi]`.
pub fn segment_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        n => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Source of the right- or left-moving field on a segment, if any.
pub fn segment_source(cfg: &ChainConfig, init: &InitialCondition, branch: Direction, segment: usize) -> Option<Source> {
    let n = cfg.num_qubits();
    match (branch, init) {
        (Direction::Right, _) if segment > 0 => Some(Source::Qubit(segment - 1)),
        (Direction::Left, _) if segment < n => Some(Source::Qubit(segment)),
        (_, InitialCondition::IncidentPulse(spec)) if spec.direction == branch => Some(Source::PulseFront),
        _ => None,
    }
}

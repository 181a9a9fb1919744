//! Direct integration of the qubit delay equations, independent of the diagram
//! machinery. In the rotating frame `α_j = e_j e^{iΩt}`,
//!
//! ```text
//! α̇_j(t) = -i√J0 ψ_in(x_j, t) e^{iΩt} - J0 Σ_n e^{iΩ d_nj} Θ(t - d_nj) α_n(t - d_nj),
//! ```
//!
//! with `d_nj = |x_n - x_j|`. Classic RK4 and the method of steps: the step must
//! divide every delay so delayed reads at whole steps are exact mesh values; the
//! half-step reads use cubic Hermite interpolation on one-sided derivatives.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainConfig, ConfigError, Direction, InitialCondition, PulseSpec};
use crate::terms::heaviside;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MESH_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("time step {dt} exceeds the limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("delay {delay} is not a whole number of steps of {dt}")]
    OffMesh { delay: f64, dt: f64 },
    #[error("time {t} outside the integrated range [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },
    #[error("time step and horizon must be finite and positive")]
    BadStep,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Qubit amplitudes on the mesh `t_k = k dt`, with the one-sided derivatives
/// needed for Hermite interpolation across kinks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DdeHistory {
    pub dt: f64,
    pub omega: f64,
    /// `alpha[q][k] = α_q(k dt)`.
    pub alpha: Vec<Vec<C64>>,
    deriv_left: Vec<Vec<C64>>,
    deriv_right: Vec<Vec<C64>>,
}

impl DdeHistory {
    pub fn steps(&self) -> usize {
        self.alpha[0].len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    /// Rotating-frame amplitude; zero before `t = 0`.
    pub fn alpha_at(&self, qubit: usize, t: f64) -> Result<C64, OracleError> {
        if t < 0.0 {
            return Ok(ZERO);
        }
        let horizon = self.horizon();
        if t > horizon * (1.0 + 1e-12) {
            return Err(OracleError::OutOfRange { t, horizon });
        }
        let pos = t / self.dt;
        let k = (pos.round() as usize).min(self.steps());
        if (pos - k as f64).abs() < 1e-9 {
            return Ok(self.alpha[qubit][k]);
        }
        let m = (pos.floor() as usize).min(self.steps() - 1);
        Ok(self.hermite(qubit, m, pos - m as f64))
    }

    fn hermite(&self, q: usize, m: usize, s: f64) -> C64 {
        let (y0, y1) = (self.alpha[q][m], self.alpha[q][m + 1]);
        let (d0, d1) = (self.deriv_right[q][m] * self.dt, self.deriv_left[q][m + 1] * self.dt);
        let s2 = s * s;
        let s3 = s2 * s;
        y0 * (2.0 * s3 - 3.0 * s2 + 1.0) + d0 * (s3 - 2.0 * s2 + s) + y1 * (-2.0 * s3 + 3.0 * s2) + d1 * (s3 - s2)
    }

    /// Lab-frame amplitude `e_q(t) = α_q(t) e^{-iΩt}`.
    pub fn excitation(&self, qubit: usize, t: f64) -> Result<C64, OracleError> {
        Ok(self.alpha_at(qubit, t)? * C64::from_polar(1.0, -self.omega * t))
    }
}

fn on_mesh(value: f64, dt: f64) -> Result<usize, OracleError> {
    let k = (value / dt).round();
    if (value / dt - k).abs() > MESH_TOL * (1.0 + k.abs()) {
        return Err(OracleError::OffMesh { delay: value, dt });
    }
    Ok(k as usize)
}

/// Largest step the integrator accepts for this chain.
pub fn max_step(cfg: &ChainConfig) -> f64 {
    let rate_limit = 0.05 / cfg.gamma0();
    match cfg.min_separation() {
        Some(l) => rate_limit.min(l / 8.0),
        None => rate_limit,
    }
}

/// Time at which a pulse front reaches `x` (on its own branch).
fn arrival(cfg: &ChainConfig, spec: &PulseSpec, x: f64) -> f64 {
    spec.direction.sign() * (x - spec.front(cfg))
}

struct Problem<'a> {
    cfg: &'a ChainConfig,
    pulse: Option<PulseSpec>,
    /// `delays[j][n]` in steps, and the phase `e^{iΩ d_nj}`.
    delays: Vec<Vec<(usize, C64)>>,
    arrivals: Vec<usize>,
    dt: f64,
}

impl Problem<'_> {
    /// Drive `-i√J0 ψ_in(x_j, t) e^{iΩt}` while the pulse is on at qubit `j`.
    fn drive(&self, j: usize, t: f64) -> C64 {
        let Some(spec) = &self.pulse else { return ZERO };
        let a = self.arrivals[j] as f64 * self.dt;
        let tau = t - a;
        let phase = C64::from_polar(1.0, self.cfg.omega() * arrival(self.cfg, spec, self.cfg.position(j)));
        C64::new(0.0, -self.cfg.j0().sqrt()) * (2.0 * spec.sigma).sqrt() * (-spec.sigma * tau).exp() * phase
    }

    /// Right-hand side on step `k` (which fixes every switch) at `t = (k + s) dt`.
    /// `current` holds `α(t)`; delayed values come from `hist` or, for `s = 1/2`,
    /// from Hermite interpolation.
    fn rhs(&self, k: usize, s: f64, current: &[C64], hist: &DdeHistory) -> Vec<C64> {
        let n = current.len();
        let j0 = self.cfg.j0();
        (0..n)
            .map(|j| {
                let mut acc = if self.pulse.is_some() && k >= self.arrivals[j] {
                    self.drive(j, (k as f64 + s) * self.dt)
                } else {
                    ZERO
                };
                for (m, &(d, phase)) in self.delays[j].iter().enumerate() {
                    if d == 0 {
                        acc -= j0 * current[m];
                    } else if k >= d {
                        // α_m((k - d + s) dt), at or before the current step start
                        let base = k - d;
                        let delayed = if s == 0.0 {
                            hist.alpha[m][base]
                        } else if s == 1.0 {
                            hist.alpha[m][base + 1]
                        } else {
                            hist.hermite(m, base, s)
                        };
                        acc -= j0 * phase * delayed;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Integrate the delay equations on `[0, t_f]` with step `dt`.
#[allow(clippy::needless_range_loop)] // per-qubit indices across several buffers
pub fn integrate_chain(cfg: &ChainConfig, init: &InitialCondition, t_f: f64, dt: f64) -> Result<DdeHistory, OracleError> {
    init.validate(cfg)?;
    if !(dt.is_finite() && dt > 0.0 && t_f.is_finite() && t_f > 0.0) {
        return Err(OracleError::BadStep);
    }
    let limit = max_step(cfg);
    if dt > limit * (1.0 + 1e-12) {
        return Err(OracleError::StepTooLarge { dt, limit });
    }
    let n = cfg.num_qubits();
    let xs = cfg.positions();
    let mut delays = Vec::with_capacity(n);
    for j in 0..n {
        let row = (0..n)
            .map(|m| {
                let d = (xs[m] - xs[j]).abs();
                Ok((on_mesh(d, dt)?, C64::from_polar(1.0, cfg.omega() * d)))
            })
            .collect::<Result<Vec<_>, OracleError>>()?;
        delays.push(row);
    }
    let pulse = match init {
        InitialCondition::IncidentPulse(spec) => Some(*spec),
        InitialCondition::ExcitedQubit(_) => None,
    };
    let arrivals = match &pulse {
        Some(spec) => xs.iter().map(|&x| on_mesh(arrival(cfg, spec, x), dt)).collect::<Result<Vec<_>, _>>()?,
        None => vec![0; n],
    };
    let problem = Problem { cfg, pulse, delays, arrivals, dt };

    let steps = (t_f / dt).ceil() as usize;
    let mut y0 = vec![ZERO; n];
    if let InitialCondition::ExcitedQubit(q) = init {
        y0[*q] = C64::new(1.0, 0.0);
    }
    let mut hist = DdeHistory {
        dt,
        omega: cfg.omega(),
        alpha: (0..n).map(|q| {
            let mut v = Vec::with_capacity(steps + 1);
            v.push(y0[q]);
            v
        }).collect(),
        deriv_left: vec![vec![ZERO]; n],
        deriv_right: vec![Vec::with_capacity(steps + 1); n],
    };

    let axpy = |y: &[C64], h: f64, k: &[C64]| -> Vec<C64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let mut y = y0;
    for k in 0..steps {
        let k1 = problem.rhs(k, 0.0, &y, &hist);
        for q in 0..n {
            hist.deriv_right[q].push(k1[q]);
        }
        let k2 = problem.rhs(k, 0.5, &axpy(&y, 0.5 * dt, &k1), &hist);
        let k3 = problem.rhs(k, 0.5, &axpy(&y, 0.5 * dt, &k2), &hist);
        let k4 = problem.rhs(k, 1.0, &axpy(&y, dt, &k3), &hist);
        y = (0..n).map(|q| y[q] + dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q])).collect();
        for q in 0..n {
            hist.alpha[q].push(y[q]);
        }
        // derivative at the end of this step, still on this step's side of every switch
        let left = problem.rhs(k, 1.0, &y, &hist);
        for q in 0..n {
            hist.deriv_left[q].push(left[q]);
        }
    }
    // one-sided derivative past the last point, for interpolation at the horizon
    let last = problem.rhs(steps, 0.0, &y, &hist);
    for q in 0..n {
        hist.deriv_right[q].push(last[q]);
    }
    Ok(hist)
}

/// `e^{-γ0 |t|/2}`.
pub fn single_qubit_alpha(t: f64, gamma0: f64) -> f64 {
    (-0.5 * gamma0 * t.abs()).exp()
}

/// RK4 solution of `dα/dt = -(γ0/2) sign(t) α`, `α(0) = 1`, integrated from 0
/// towards `t` in either direction. The sign is taken on the side of the step.
pub fn single_qubit_alpha_ode(t: f64, gamma0: f64, dt: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let steps = (t.abs() / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let sign = t.signum();
    let f = |a: f64| -0.5 * gamma0 * sign * a;
    let mut a = 1.0;
    for _ in 0..steps {
        let k1 = f(a);
        let k2 = f(a + 0.5 * h * k1);
        let k3 = f(a + 0.5 * h * k2);
        let k4 = f(a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    a
}

/// Field from the qubit histories:
/// `ψ_R(x,t) = ψ_R(x - t, 0) - i√J0 Σ_Q e_Q(t - (x - x_Q)) Θ(x - x_Q)` and its mirror.
pub fn reconstruct_field(
    history: &DdeHistory,
    cfg: &ChainConfig,
    init: &InitialCondition,
    x: f64,
    t: f64,
) -> Result<(C64, C64), OracleError> {
    if t > history.horizon() * (1.0 + 1e-12) || t < 0.0 {
        return Err(OracleError::OutOfRange { t, horizon: history.horizon() });
    }
    let mut psi_r = ZERO;
    let mut psi_l = ZERO;
    if let InitialCondition::IncidentPulse(spec) = init {
        match spec.direction {
            Direction::Right => psi_r += spec.initial_field(cfg, x - t),
            Direction::Left => psi_l += spec.initial_field(cfg, x + t),
        }
    }
    let coupling = C64::new(0.0, -cfg.j0().sqrt());
    for (q, &xq) in cfg.positions().iter().enumerate() {
        let wr = heaviside(x - xq);
        let sr = t - (x - xq);
        if wr != 0.0 && sr >= 0.0 {
            psi_r += coupling * wr * heaviside(sr) * history.excitation(q, sr)?;
        }
        let wl = heaviside(xq - x);
        let sl = t - (xq - x);
        if wl != 0.0 && sl >= 0.0 {
            psi_l += coupling * wl * heaviside(sl) * history.excitation(q, sl)?;
        }
    }
    Ok((psi_r, psi_l))
}

/// Largest `|α_q(t)|` on mesh points strictly before the light-travel time to `qubit`.
pub fn causality_probe(history: &DdeHistory, cfg: &ChainConfig, init: &InitialCondition, qubit: usize) -> f64 {
    let d = init.light_distance(cfg, qubit);
    history.alpha[qubit]
        .iter()
        .enumerate()
        .take_while(|(k, _)| (*k as f64) * history.dt < d * (1.0 - 1e-12))
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log dt`.
    pub order: f64,
}

impl ConvergenceReport {
    pub fn passes(&self, min_order: f64) -> bool {
        self.order >= min_order && self.errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// Step ladder used when none is given: four halvings starting from the largest
/// power-of-two fraction of the spacing that respects the step limit.
pub fn default_ladder(cfg: &ChainConfig) -> Vec<f64> {
    let mut dt = match cfg.min_separation() {
        Some(l) => l / 32.0,
        None => 0.04 / cfg.gamma0(),
    };
    let limit = max_step(cfg);
    while dt > limit {
        dt /= 2.0;
    }
    (0..4).map(|k| dt / f64::from(1u32 << k)).collect()
}

/// Maximum error of the oracle against `reference(qubit, t)` (lab-frame `e_q`) on
/// the coarsest mesh, for each step in `dts`.
pub fn convergence_study(
    cfg: &ChainConfig,
    init: &InitialCondition,
    t_f: f64,
    dts: &[f64],
    reference: impl Fn(usize, f64) -> C64,
) -> Result<ConvergenceReport, OracleError> {
    let coarse = dts.iter().copied().fold(0.0, f64::max);
    let samples = (t_f / coarse).floor() as usize;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let hist = integrate_chain(cfg, init, t_f, dt)?;
        let mut worst: f64 = 0.0;
        for k in 1..=samples {
            let t = k as f64 * coarse;
            for q in 0..cfg.num_qubits() {
                worst = worst.max((hist.excitation(q, t)? - reference(q, t)).norm());
            }
        }
        errors.push(worst);
    }
    let pts: Vec<(f64, f64)> = dts.iter().zip(&errors).map(|(d, e)| (d.ln(), e.max(1e-300).ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - mx) * (y - my), d + (x - mx).powi(2)));
    let order = if den > 0.0 { num / den } else { f64::NAN };
    Ok(ConvergenceReport { dts: dts.to_vec(), errors, order })
}

/// Markovian solution `α(t) = exp(-J0 M t) α(0)` with `M_{jl} = e^{iΩ|x_j - x_l|}`,
/// the limit of the delay equations when every delay is dropped.
pub fn markovian_chain(cfg: &ChainConfig, source: usize, t: f64) -> Result<Vec<C64>, OracleError> {
    cfg.check_qubit(source)?;
    let n = cfg.num_qubits();
    let xs = cfg.positions();
    let m = DMatrix::from_fn(n, n, |j, l| C64::from_polar(-cfg.j0() * t, cfg.omega() * (xs[j] - xs[l]).abs()));
    let u = m.exp();
    Ok((0..n).map(|j| u[(j, source)]).collect())
}

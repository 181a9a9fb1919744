//! Scattering parameters of the chain, their complex poles, and the check that
//! none lies in the upper half of the `Δ` plane.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::momentum::{self, RationalFn};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A transfer function of the detuning `Δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TransferFn {
    Rational(RationalFn),
    /// `T(Δ) = t² e^{ikL} / (1 - r² e^{2ikL})`, `k = Ω + Δ`: the sum over all
    /// transmission diagrams of two qubits a distance `separation` apart.
    TwoQubitFabryPerot { j0: f64, omega: f64, separation: f64 },
}

/// Rectangle of the complex `Δ` plane searched for poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Newton seeds per side.
    pub grid: usize,
}

impl SearchWindow {
    /// `[-20, 20] × [-20, 2]` in units of `J0`, 40 × 40 seeds.
    pub fn default_for(j0: f64) -> Self {
        Self { re_min: -20.0 * j0, re_max: 20.0 * j0, im_min: -20.0 * j0, im_max: 2.0 * j0, grid: 40 }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn seeds(&self) -> impl Iterator<Item = C64> + '_ {
        let n = self.grid.max(1);
        let step = move |lo: f64, hi: f64, k: usize| lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
        (0..n).flat_map(move |a| (0..n).map(move |b| C64::new(step(self.re_min, self.re_max, a), step(self.im_min, self.im_max, b))))
    }
}

fn fp_parts(j0: f64, omega: f64, separation: f64, delta: C64) -> (C64, C64, C64) {
    let t = delta / (delta + I * j0);
    let r = -I * j0 / (delta + I * j0);
    let phase = (I * (omega + delta) * separation).exp();
    (t, r, phase)
}

/// `(Δ + iJ0)² + J0² e^{2i(Ω+Δ)L}`: the denominator `1 - r² e^{2ikL}` times
/// `(Δ + iJ0)²`, an entire function with the same zeros.
fn fp_entire_denominator(j0: f64, omega: f64, separation: f64, delta: C64) -> C64 {
    let a = delta + I * j0;
    a * a + j0 * j0 * (2.0 * I * (omega + delta) * separation).exp()
}

impl TransferFn {
    pub fn eval(&self, delta: C64) -> Option<C64> {
        match self {
            TransferFn::Rational(f) => f.eval(delta).ok(),
            TransferFn::TwoQubitFabryPerot { j0, omega, separation } => {
                let (t, r, phase) = fp_parts(*j0, *omega, *separation, delta);
                let den = 1.0 - r * r * phase * phase;
                (den != C64::new(0.0, 0.0)).then(|| t * t * phase / den)
            }
        }
    }

    /// `|1 - r² e^{2ikL}|` for the Fabry-Perot kind; for rationals the distance
    /// to the nearest pole.
    pub fn denominator_residual(&self, delta: C64) -> f64 {
        match self {
            TransferFn::Rational(f) => {
                f.poles().iter().map(|p| (delta - p.location).norm()).fold(f64::INFINITY, f64::min)
            }
            TransferFn::TwoQubitFabryPerot { j0, omega, separation } => {
                let (_, r, phase) = fp_parts(*j0, *omega, *separation, delta);
                (1.0 - r * r * phase * phase).norm()
            }
        }
    }
}

/// Transmission through two qubits.
pub fn chain_transmission(j0: f64, omega: f64, separation: f64) -> TransferFn {
    TransferFn::TwoQubitFabryPerot { j0, omega, separation }
}

/// `Σ_{n ≤ n_max} t² (r² e^{2ikL})^n e^{ikL}`, the truncated diagram sum.
pub fn transmission_partial_sum(j0: f64, omega: f64, separation: f64, delta: C64, n_max: usize) -> C64 {
    let (t, r, phase) = fp_parts(j0, omega, separation, delta);
    let ratio = r * r * phase * phase;
    let mut term = t * t * phase;
    let mut sum = C64::new(0.0, 0.0);
    for _ in 0..=n_max {
        sum += term;
        term *= ratio;
    }
    sum
}

const NEWTON_ITERS: usize = 50;
const DEDUP_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-10;

fn newton(g: impl Fn(C64) -> C64, seed: C64) -> Option<C64> {
    let mut z = seed;
    for _ in 0..NEWTON_ITERS {
        let h = 1e-7 * (1.0 + z.norm());
        let d = (g(z + h) - g(z - h)) / (2.0 * h);
        let step = g(z) / d;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Poles inside `window`, sorted by real then imaginary part.
///
/// For the Fabry-Perot kind these are the roots of `1 - r² e^{2ikL}`, found by
/// Newton iteration from a grid of seeds. When `ΩL` is a multiple of `π` one root
/// sits at `Δ = 0`, where the numerator `t²` vanishes as well.
pub fn find_poles(f: &TransferFn, window: &SearchWindow) -> Vec<C64> {
    let mut poles: Vec<C64> = match f {
        TransferFn::Rational(r) => {
            if r.has_proper_part() {
                r.poles().iter().map(|p| p.location).filter(|z| window.contains(*z)).collect()
            } else {
                Vec::new()
            }
        }
        TransferFn::TwoQubitFabryPerot { j0, omega, separation } => {
            let g = |z: C64| fp_entire_denominator(*j0, *omega, *separation, z);
            let mut found: Vec<C64> = Vec::new();
            let mut failed = 0usize;
            for seed in window.seeds() {
                match newton(g, seed) {
                    Some(z) if window.contains(z) && f.denominator_residual(z) < ROOT_TOL => found.push(z),
                    Some(_) => {}
                    None => failed += 1,
                }
            }
            if failed > 0 {
                log::debug!("{failed} Newton seeds did not converge");
            }
            found
        }
    };
    poles.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut unique: Vec<C64> = Vec::new();
    for z in poles {
        if !unique.iter().any(|u| (u - z).norm() < DEDUP_TOL) {
            unique.push(z);
        }
    }
    unique
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoUhpReport {
    pub pass: bool,
    pub poles: Vec<C64>,
    /// Largest imaginary part among the poles, if any were found.
    pub worst_im: Option<f64>,
}

/// Passes iff every pole found in `window` has `Im ≤ margin`.
pub fn check_no_uhp(f: &TransferFn, window: &SearchWindow, margin: f64) -> NoUhpReport {
    let poles = find_poles(f, window);
    let worst_im = poles.iter().map(|z| z.im).reduce(f64::max);
    NoUhpReport { pass: worst_im.is_none_or(|w| w <= margin), poles, worst_im }
}

/// `t_k`, `r_k` and `e_k` of one qubit as transfer functions.
pub fn single_qubit_coefficients(j0: f64) -> [TransferFn; 3] {
    [
        TransferFn::Rational(momentum::coeff_t(j0)),
        TransferFn::Rational(momentum::coeff_r(j0)),
        TransferFn::Rational(momentum::coeff_e(j0)),
    ]
}

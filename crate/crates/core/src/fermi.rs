//! Closed forms for two qubits at `x = ∓L/2` with the left one (`-1`) initially
//! excited, and the Markovian limit of the same problem.
//!
//! Every series is finite at finite `t`: terms switch on at `τ_n = 0` and the
//! delays grow linearly in `n`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::chain::{ChainConfig, ConfigError};
use crate::terms::{heaviside, DelayedTerm};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// The two-qubit chain these formulas describe.
pub fn fermi_config(j0: f64, omega: f64, l: f64) -> Result<ChainConfig, ConfigError> {
    ChainConfig::with_positions(omega, j0, vec![-l / 2.0, l / 2.0])
}

/// `(τJ0)^k / d!` for `τ ≥ 0`, with `0^0 = 1`.
fn power_over_factorial(x: f64, k: u32, d: u32) -> f64 {
    if k == 0 {
        return 1.0 / factorial(d);
    }
    if x <= 0.0 {
        return 0.0;
    }
    if d <= 60 && x < 50.0 {
        x.powi(k as i32) / factorial(d)
    } else {
        (k as f64 * x.ln() - ln_gamma(d as f64 + 1.0)).exp()
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `e^{-(J0+iΩ)τ}`.
fn decay(tau: f64, j0: f64, omega: f64) -> C64 {
    (C64::new(-j0, -omega) * tau).exp()
}

/// Largest `n` with `t - (a n + b) L ≥ 0`, or `None` if none.
fn last_index(t: f64, l: f64, a: f64, b: f64) -> Option<u32> {
    let n = ((t / l - b) / a).floor();
    (n >= 0.0).then_some(n as u32)
}

/// `Π_L(x) = Θ(x + L/2) - Θ(x - L/2)`.
fn inner_window(x: f64, l: f64) -> f64 {
    heaviside(x + l / 2.0) - heaviside(x - l / 2.0)
}

/// Sum over `n` of `g(n, τ_n) Θ(τ_n)` with `τ_n = t0 - (a n + b) L`; for `L = 0`
/// every term is active and the sum runs until it converges.
fn delayed_sum(t0: f64, l: f64, a: f64, b: f64, mut g: impl FnMut(u32, f64) -> C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    if l == 0.0 {
        if t0 < 0.0 {
            return sum;
        }
        let step = heaviside(t0);
        let mut n = 0u32;
        loop {
            let v = g(n, t0);
            sum += step * v;
            if n as f64 > 2.0 * t0 + 10.0 && v.norm() <= 1e-18 * sum.norm() {
                return sum;
            }
            n += 1;
        }
    }
    let Some(last) = last_index(t0, l, a, b) else { return sum };
    for n in 0..=last {
        let tau = t0 - (a * f64::from(n) + b) * l;
        let w = heaviside(tau);
        if w != 0.0 {
            sum += w * g(n, tau);
        }
    }
    sum
}

/// `e_1(t) = -Σ (τ_n J0)^{2n+1}/(2n+1)! e^{-(J0+iΩ)τ_n} Θ(τ_n)`, `τ_n = t - (2n+1)L`.
pub fn fermi_e1(t: f64, j0: f64, omega: f64, l: f64) -> C64 {
    delayed_sum(t, l, 2.0, 1.0, |n, tau| {
        -power_over_factorial(tau * j0, 2 * n + 1, 2 * n + 1) * decay(tau, j0, omega)
    })
}

/// `e_{-1}(t) = Σ (τ_n J0)^{2n}/(2n)! e^{-(J0+iΩ)τ_n} Θ(τ_n)`, `τ_n = t - 2nL`.
pub fn fermi_e_m1(t: f64, j0: f64, omega: f64, l: f64) -> C64 {
    delayed_sum(t, l, 2.0, 0.0, |n, tau| power_over_factorial(tau * j0, 2 * n, 2 * n) * decay(tau, j0, omega))
}

/// Qubit amplitudes and the four field components at one point of space-time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiState {
    pub e_m1: C64,
    pub e_p1: C64,
    /// Right-moving, between the qubits.
    pub psi_ri: C64,
    /// Right-moving, right of both qubits.
    pub psi_re: C64,
    /// Left-moving, between the qubits.
    pub psi_li: C64,
    /// Left-moving, left of both qubits.
    pub psi_le: C64,
}

impl FermiState {
    pub fn psi_r(&self) -> C64 {
        self.psi_ri + self.psi_re
    }

    pub fn psi_l(&self) -> C64 {
        self.psi_li + self.psi_le
    }
}

pub fn fermi_full_state(t: f64, x: f64, j0: f64, omega: f64, l: f64) -> FermiState {
    let sq = j0.sqrt();
    let half = l / 2.0;

    let inner = inner_window(x, l);
    let psi_ri = if inner == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        -I * sq
            * inner
            * delayed_sum(t - (x + half), l, 2.0, 0.0, |n, tau| {
                power_over_factorial(tau * j0, 2 * n, 2 * n) * decay(tau, j0, omega)
            })
    };
    let psi_li = if inner == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        I * sq
            * inner
            * delayed_sum(t + (x - half), l, 2.0, 1.0, |n, tau| {
                power_over_factorial(tau * j0, 2 * n + 1, 2 * n + 1) * decay(tau, j0, omega)
            })
    };

    let right = heaviside(x - half);
    let psi_re = if right == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        I * sq
            * right
            * delayed_sum(t - (x - half), l, 2.0, 1.0, |n, tau| {
                let k = 2 * n + 1;
                let p = power_over_factorial(tau * j0, k, k) - f64::from(k) * power_over_factorial(tau * j0, 2 * n, k);
                p * decay(tau, j0, omega)
            })
    };

    let left = heaviside(-(x + half));
    let psi_le = if left == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        -I * sq
            * left
            * delayed_sum(t + (x + half), l, 2.0, 0.0, |n, tau| {
                let k = 2 * n;
                let mut p = power_over_factorial(tau * j0, k, k);
                if n > 0 {
                    p -= f64::from(k) * power_over_factorial(tau * j0, k - 1, k);
                }
                p * decay(tau, j0, omega)
            })
    };

    FermiState {
        e_m1: fermi_e_m1(t, j0, omega, l),
        e_p1: fermi_e1(t, j0, omega, l),
        psi_ri,
        psi_re,
        psi_li,
        psi_le,
    }
}

fn monomial_term(delay: f64, j0: f64, omega: f64, power: u32, coeff: f64) -> DelayedTerm {
    let mut poly = vec![C64::new(0.0, 0.0); power as usize + 1];
    poly[power as usize] = C64::new(coeff * j0.powi(power as i32), 0.0);
    DelayedTerm::causal(delay, C64::new(0.0, -j0), poly, omega)
}

/// The `e_1` series as explicit terms with delay below `horizon`.
pub fn fermi_e1_terms(j0: f64, omega: f64, l: f64, horizon: f64) -> Vec<DelayedTerm> {
    (0..)
        .map(|n: u32| (n, f64::from(2 * n + 1) * l))
        .take_while(|&(_, d)| d < horizon)
        .map(|(n, d)| monomial_term(d, j0, omega, 2 * n + 1, -1.0 / factorial(2 * n + 1)))
        .collect()
}

/// The `e_{-1}` series as explicit terms with delay below `horizon`.
pub fn fermi_e_m1_terms(j0: f64, omega: f64, l: f64, horizon: f64) -> Vec<DelayedTerm> {
    (0..)
        .map(|n: u32| (n, f64::from(2 * n) * l))
        .take_while(|&(_, d)| d < horizon)
        .map(|(n, d)| monomial_term(d, j0, omega, 2 * n, 1.0 / factorial(2 * n)))
        .collect()
}

/// `e_1` with every delay dropped, `-e^{-(J0+iΩ)t} sinh(J0 t e^{iθ})`.
pub fn fermi_e1_undelayed(t: f64, j0: f64, omega: f64, theta: f64) -> C64 {
    if t <= 0.0 {
        return C64::new(0.0, 0.0);
    }
    -decay(t, j0, omega) * (C64::from_polar(j0 * t, theta)).sinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveRates {
    pub gamma1: C64,
    pub gamma2: C64,
    pub theta: f64,
}

/// `Γ_{1/2} = γ0 (1 ± e^{iθ})`.
pub fn collective_rates(gamma0: f64, theta: f64) -> CollectiveRates {
    let phase = C64::from_polar(1.0, theta);
    CollectiveRates { gamma1: gamma0 * (1.0 + phase), gamma2: gamma0 * (1.0 - phase), theta }
}

/// `e^{-iΩt}/2 (e^{-Γ1 t/2} - e^{-Γ2 t/2})` for `t > 0`, zero otherwise.
pub fn markovian_e1(t: f64, gamma0: f64, theta: f64, omega: f64) -> C64 {
    if t <= 0.0 {
        return C64::new(0.0, 0.0);
    }
    let rates = collective_rates(gamma0, theta);
    let carrier = C64::from_polar(0.5, -omega * t);
    carrier * ((-rates.gamma1 * t / 2.0).exp() - (-rates.gamma2 * t / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn e1_boundaries() {
        assert_eq!(fermi_e1(0.7, 1.0, 200.0, 1.0), C64::new(0.0, 0.0));
        assert_eq!(fermi_e1(1.0, 1.0, 200.0, 1.0), C64::new(0.0, 0.0));
        let v = fermi_e1(2.0, 1.0, 0.0, 1.0);
        assert!((v - C64::new(-(-1f64).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn initial_values() {
        let s = fermi_full_state(0.0, 0.0, 1.0, 200.0, 1.0);
        assert_eq!(s.e_m1, C64::new(0.5, 0.0));
        assert_eq!(s.e_p1, C64::new(0.0, 0.0));
        assert_eq!(s.psi_ri, C64::new(0.0, 0.0));
        assert_eq!(s.psi_le, C64::new(0.0, 0.0));
        assert_eq!(fermi_e_m1(1e-12, 1.0, 0.0, 1.0).re, (-1e-12f64).exp());
    }

    #[test]
    fn supports() {
        let (j0, om, l) = (1.0, 200.0, 1.0);
        for x in [-3.0, -0.6, 0.6, 4.0] {
            let s = fermi_full_state(2.3, x, j0, om, l);
            assert_eq!(s.psi_ri, C64::new(0.0, 0.0));
            assert_eq!(s.psi_li, C64::new(0.0, 0.0));
        }
        let s = fermi_full_state(2.3, 0.0, j0, om, l);
        assert_eq!((s.psi_re, s.psi_le), (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        // right-moving front at x = -L/2 + t
        assert_eq!(fermi_full_state(0.3, -0.1, j0, om, l).psi_ri, C64::new(0.0, 0.0));
        assert!(fermi_full_state(0.3, -0.3, j0, om, l).psi_ri.norm() > 0.0);
    }

    #[test]
    fn emitted_field_jumps_at_the_source() {
        let (j0, om, l) = (1.3, 50.0, 0.8);
        for t in [0.3, 1.1, 2.9, 5.0] {
            let x = -l / 2.0;
            let inside = fermi_full_state(t, x + 1e-12, j0, om, l);
            let outside = fermi_full_state(t, x - 1e-12, j0, om, l);
            let jump_r = inside.psi_r() - outside.psi_r();
            let jump_l = inside.psi_l() - outside.psi_l();
            assert!((jump_r + I * j0.sqrt() * inside.e_m1).norm() < 1e-9);
            assert!((jump_l - I * j0.sqrt() * inside.e_m1).norm() < 1e-9);
        }
    }

    #[test]
    fn rates() {
        let r = collective_rates(2.0, 0.0);
        assert!((r.gamma1 - C64::new(4.0, 0.0)).norm() < 1e-15 && r.gamma2.norm() < 1e-15);
        let r = collective_rates(2.0, PI);
        assert!(r.gamma1.norm() < 1e-15 && (r.gamma2 - C64::new(4.0, 0.0)).norm() < 1e-15);
        let r = collective_rates(2.0, PI / 2.0);
        assert!((r.gamma1 - C64::new(2.0, 2.0)).norm() < 1e-15);
        assert!((r.gamma1 + r.gamma2 - C64::new(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn markov_limits() {
        assert_eq!(markovian_e1(0.0, 2.0, 1.0, 5.0), C64::new(0.0, 0.0));
        assert!((markovian_e1(200.0, 2.0, PI, 5.0).norm() - 0.5).abs() < 1e-12);
        for t in [0.1, 0.9, 3.0] {
            let a = markovian_e1(t, 2.0, 0.4, 7.0);
            let b = fermi_e1_undelayed(t, 1.0, 7.0, 0.4);
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_separation_is_the_sinh_form() {
        for t in [0.2, 1.0, 4.0, 11.0] {
            let a = fermi_e1(t, 1.0, 3.0, 0.0);
            let b = fermi_e1_undelayed(t, 1.0, 3.0, 0.0);
            assert!((a - b).norm() < 1e-13, "{t}: {a} {b}");
        }
    }

    #[test]
    fn term_lists_agree_with_direct_sums() {
        let (j0, om, l) = (1.0, 200.0, 1.0);
        let e1 = fermi_e1_terms(j0, om, l, 20.0);
        let em1 = fermi_e_m1_terms(j0, om, l, 20.0);
        assert_eq!(e1.len(), 10);
        assert_eq!(em1.len(), 10);
        for t in [0.5, 3.3, 12.0, 19.9] {
            let a: C64 = e1.iter().map(|x| x.eval(t)).sum();
            let b: C64 = em1.iter().map(|x| x.eval(t)).sum();
            assert!((a - fermi_e1(t, j0, om, l)).norm() < 1e-14);
            assert!((b - fermi_e_m1(t, j0, om, l)).norm() < 1e-14);
        }
    }

    #[test]
    fn long_times_stay_finite() {
        let v = fermi_e1(400.0, 1.0, 200.0, 0.3);
        assert!(v.is_finite() && v.norm() < 1.0);
    }
}

//! Closed-form time-domain terms `Θ(τ) P(τ) e^{-i p τ} e^{-i Ω τ}` with `τ = t - delay`,
//! and sums of them.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chain::Direction;

/// Heaviside step with the midpoint convention `Θ(0) = 1/2`.
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Which half-line a term lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Support {
    /// `Θ(τ)`: produced by lower half-plane poles.
    Causal,
    /// `Θ(-τ)`: produced by upper half-plane poles. Never emitted by diagram cascades.
    AntiCausal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayedTerm {
    pub delay: f64,
    pub pole: C64,
    /// Coefficients of `P(τ)`, lowest power first.
    pub poly: Vec<C64>,
    pub carrier: f64,
    pub support: Support,
}

impl DelayedTerm {
    pub fn causal(delay: f64, pole: C64, poly: Vec<C64>, carrier: f64) -> Self {
        Self { delay, pole, poly, carrier, support: Support::Causal }
    }

    fn step(&self, tau: f64) -> f64 {
        match self.support {
            Support::Causal => heaviside(tau),
            Support::AntiCausal => heaviside(-tau),
        }
    }

    /// Value without the step factor.
    pub fn envelope(&self, tau: f64) -> C64 {
        let p = horner(&self.poly, tau);
        p * (C64::new(0.0, -1.0) * (self.pole + self.carrier) * tau).exp()
    }

    pub fn eval(&self, t: f64) -> C64 {
        let tau = t - self.delay;
        let w = self.step(tau);
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        w * self.envelope(tau)
    }

    /// Right-continuous value (`Θ(0) → 1` for causal terms); used for observables
    /// that are continuous in time such as the norm.
    pub fn eval_right(&self, t: f64) -> C64 {
        let tau = t - self.delay;
        let on = match self.support {
            Support::Causal => tau >= 0.0,
            Support::AntiCausal => tau < 0.0,
        };
        if on {
            self.envelope(tau)
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }
}

pub(crate) fn horner(coeffs: &[C64], x: f64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

/// What an amplitude describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Qubit(usize),
    /// Field branch on segment `segment` (segment `s` lies between qubits `s-1` and `s`).
    Field { branch: Direction, segment: usize },
    Unlabelled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesAmplitude {
    pub terms: Vec<DelayedTerm>,
    pub label: Label,
}

impl TimeSeriesAmplitude {
    pub fn new(label: Label) -> Self {
        Self { terms: Vec::new(), label }
    }

    pub fn from_terms(label: Label, terms: Vec<DelayedTerm>) -> Self {
        Self { terms, label }
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    pub fn eval_right(&self, t: f64) -> C64 {
        self.terms.iter().map(|term| term.eval_right(t)).sum()
    }

    pub fn extend(&mut self, terms: impl IntoIterator<Item = DelayedTerm>) {
        self.terms.extend(terms);
    }

    /// Earliest time at which any causal term switches on.
    pub fn earliest_delay(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter(|t| t.support == Support::Causal)
            .map(|t| t.delay)
            .reduce(f64::min)
    }

    pub fn has_anticausal(&self) -> bool {
        self.terms.iter().any(|t| t.support == Support::AntiCausal)
    }

    /// Sort by (delay, pole) and merge terms sharing delay, pole, carrier and
    /// support by adding their polynomials. Zero polynomials are dropped.
    pub fn canonicalize(&mut self) {
        const TOL: f64 = 1e-12;
        self.terms.sort_by(|a, b| {
            a.delay
                .total_cmp(&b.delay)
                .then(a.pole.re.total_cmp(&b.pole.re))
                .then(a.pole.im.total_cmp(&b.pole.im))
        });
        let mut merged: Vec<DelayedTerm> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            if let Some(last) = merged.last_mut() {
                let scale = 1.0 + last.delay.abs().max(last.pole.norm());
                if (last.delay - term.delay).abs() <= TOL * scale
                    && (last.pole - term.pole).norm() <= TOL * scale
                    && last.carrier == term.carrier
                    && last.support == term.support
                {
                    if term.poly.len() > last.poly.len() {
                        last.poly.resize(term.poly.len(), C64::new(0.0, 0.0));
                    }
                    for (a, b) in last.poly.iter_mut().zip(&term.poly) {
                        *a += b;
                    }
                    continue;
                }
            }
            merged.push(term);
        }
        merged.retain(|t| t.poly.iter().any(|c| *c != C64::new(0.0, 0.0)));
        self.terms = merged;
    }
}

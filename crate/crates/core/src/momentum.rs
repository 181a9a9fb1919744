//! Rational functions of the detuned momentum `Δ = E_k - Ω`, the single-qubit
//! scattering coefficients, and the residue-calculus inverse transform
//!
//! ```text
//! (1/2π) ∫ dΔ f(Δ) e^{-iΔτ}
//! ```
//!
//! that turns the accumulated `f(Δ)` of a diagram into [`DelayedTerm`]s.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::PulseSpec;
use crate::poly;
use crate::terms::{DelayedTerm, Support};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative distance below which two poles are the same pole.
pub const POLE_MERGE_TOL: f64 = 1e-12;
/// Absolute distance below which two unmerged poles make partial fractions unreliable.
pub const POLE_SEPARATION_MIN: f64 = 1e-9;
/// Relative tolerance of the built-in partial-fraction reconstruction check.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("rational function is not strictly proper")]
    NotStrictlyProper,
    #[error("distinct poles only {separation:e} apart")]
    IllConditioned { separation: f64 },
    #[error("pole {pole} lies on the real axis; the transform needs regularisation")]
    RealAxisPole { pole: C64 },
    #[error("evaluated at the pole {pole}")]
    AtPole { pole: C64 },
    #[error("partial-fraction reconstruction error {error:e} exceeds tolerance")]
    ReconstructionFailed { error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: C64,
    pub multiplicity: u32,
}

/// `constant + prefactor * N(Δ) / Π (Δ - p_i)^{m_i}` with `deg N < Σ m_i`.
///
/// Keeping the constant apart lets `t_k = 1 - iJ0/(Δ + iJ0)` live in the same
/// algebra while every proper part stays strictly proper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    constant: C64,
    prefactor: C64,
    numerator: Vec<C64>,
    poles: Vec<Pole>,
}

/// One piece `coefficient / (Δ - pole)^order` of a partial-fraction expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialFraction {
    pub pole: C64,
    pub order: u32,
    pub coefficient: C64,
}

fn same_pole(a: C64, b: C64) -> bool {
    (a - b).norm() < POLE_MERGE_TOL * (1.0 + a.norm())
}

/// Merge coincident poles and sort by real, then imaginary part.
fn canonical_poles(raw: impl IntoIterator<Item = Pole>) -> Vec<Pole> {
    let mut out: Vec<Pole> = Vec::new();
    for p in raw {
        if p.multiplicity == 0 {
            continue;
        }
        match out.iter_mut().find(|q| same_pole(q.location, p.location)) {
            Some(q) => q.multiplicity += p.multiplicity,
            None => out.push(p),
        }
    }
    out.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    out
}

fn denominator_poly(poles: &[Pole]) -> Vec<C64> {
    poles
        .iter()
        .fold(vec![ONE], |acc, p| poly::mul(&acc, &poly::linear_power(p.location, p.multiplicity)))
}

fn total_order(poles: &[Pole]) -> u32 {
    poles.iter().map(|p| p.multiplicity).sum()
}

impl RationalFn {
    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn constant(c: C64) -> Self {
        Self { constant: c, prefactor: ZERO, numerator: Vec::new(), poles: Vec::new() }
    }

    /// Strictly proper `prefactor * N / Π (Δ - p)^m`.
    pub fn proper(prefactor: C64, numerator: Vec<C64>, poles: Vec<Pole>) -> Result<Self, AlgebraError> {
        let poles = canonical_poles(poles);
        let numerator = poly::trim(numerator);
        if let Some(d) = poly::degree(&numerator) {
            if d as u32 >= total_order(&poles) {
                return Err(AlgebraError::NotStrictlyProper);
            }
        }
        Ok(Self::from_parts(ZERO, prefactor, numerator, poles))
    }

    /// Proper (not necessarily strictly) ratio; a numerator of full degree is split
    /// into its constant limit plus a strictly proper remainder.
    pub fn from_ratio(prefactor: C64, numerator: Vec<C64>, poles: Vec<Pole>) -> Result<Self, AlgebraError> {
        let poles = canonical_poles(poles);
        let numerator = poly::trim(numerator);
        let order = total_order(&poles) as usize;
        match poly::degree(&numerator) {
            Some(d) if d > order => Err(AlgebraError::NotStrictlyProper),
            Some(d) if d == order => {
                let lead = numerator[d];
                let den = denominator_poly(&poles);
                let rem = poly::add(&numerator, &poly::scale(&den, -lead));
                let mut rem = poly::trim(rem);
                rem.truncate(order);
                Ok(Self::from_parts(prefactor * lead, prefactor, rem, poles))
            }
            _ => Ok(Self::from_parts(ZERO, prefactor, numerator, poles)),
        }
    }

    /// `coefficient / (Δ - location)^order`.
    pub fn pole_term(coefficient: C64, location: C64, order: u32) -> Self {
        Self::from_parts(ZERO, coefficient, vec![ONE], vec![Pole { location, multiplicity: order }])
    }

    fn from_parts(constant: C64, prefactor: C64, numerator: Vec<C64>, poles: Vec<Pole>) -> Self {
        let numerator = poly::trim(numerator);
        if prefactor == ZERO || numerator.is_empty() {
            return Self::constant(constant);
        }
        Self { constant, prefactor, numerator, poles }
    }

    pub fn constant_part(&self) -> C64 {
        self.constant
    }

    pub fn prefactor(&self) -> C64 {
        self.prefactor
    }

    pub fn numerator(&self) -> &[C64] {
        &self.numerator
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn has_proper_part(&self) -> bool {
        !self.numerator.is_empty()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.constant == ZERO
    }

    /// Strictly proper remainder with the constant dropped.
    pub fn proper_part(&self) -> Self {
        Self { constant: ZERO, ..self.clone() }
    }

    pub fn eval(&self, delta: C64) -> Result<C64, AlgebraError> {
        if !self.has_proper_part() {
            return Ok(self.constant);
        }
        let mut den = ONE;
        for p in &self.poles {
            let d = delta - p.location;
            if d.norm() <= 1e-14 * (1.0 + p.location.norm()) {
                return Err(AlgebraError::AtPole { pole: p.location });
            }
            den *= d.powu(p.multiplicity);
        }
        Ok(self.constant + self.prefactor * poly::eval(&self.numerator, delta) / den)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_parts(self.constant * s, self.prefactor * s, self.numerator.clone(), self.poles.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let c = self.constant * other.constant;
        match (self.has_proper_part(), other.has_proper_part()) {
            (false, false) => Self::constant(c),
            (true, false) => Self::from_parts(
                c,
                self.prefactor * other.constant,
                self.numerator.clone(),
                self.poles.clone(),
            ),
            (false, true) => Self::from_parts(
                c,
                other.prefactor * self.constant,
                other.numerator.clone(),
                other.poles.clone(),
            ),
            (true, true) => {
                // (c1 + a1 N1/D1)(c2 + a2 N2/D2)
                //   = c1 c2 + a1 a2 [N1 N2 + (c1/a1) N2 D1 + (c2/a2) N1 D2] / (D1 D2)
                let mut num = poly::mul(&self.numerator, &other.numerator);
                if self.constant != ZERO {
                    let d1 = denominator_poly(&self.poles);
                    let extra = poly::mul(&other.numerator, &d1);
                    num = poly::add(&num, &poly::scale(&extra, self.constant / self.prefactor));
                }
                if other.constant != ZERO {
                    let d2 = denominator_poly(&other.poles);
                    let extra = poly::mul(&self.numerator, &d2);
                    num = poly::add(&num, &poly::scale(&extra, other.constant / other.prefactor));
                }
                let poles = canonical_poles(self.poles.iter().chain(&other.poles).copied());
                Self::from_parts(c, self.prefactor * other.prefactor, num, poles)
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let c = self.constant + other.constant;
        if !self.has_proper_part() {
            return Self { constant: c, ..other.clone() };
        }
        if !other.has_proper_part() {
            return Self { constant: c, ..self.clone() };
        }
        // least common denominator: maximum multiplicity of each pole
        let mut lcd: Vec<Pole> = self.poles.clone();
        for p in &other.poles {
            match lcd.iter_mut().find(|q| same_pole(q.location, p.location)) {
                Some(q) => q.multiplicity = q.multiplicity.max(p.multiplicity),
                None => lcd.push(*p),
            }
        }
        let lift = |f: &Self| -> Vec<C64> {
            let missing = lcd.iter().map(|q| {
                let have = f
                    .poles
                    .iter()
                    .find(|p| same_pole(p.location, q.location))
                    .map_or(0, |p| p.multiplicity);
                Pole { location: q.location, multiplicity: q.multiplicity - have }
            });
            let cofactor = denominator_poly(&missing.collect::<Vec<_>>());
            poly::scale(&poly::mul(&f.numerator, &cofactor), f.prefactor)
        };
        let num = poly::add(&lift(self), &lift(other));
        Self::from_parts(c, ONE, num, canonical_poles(lcd))
    }
}

/// `t_k = Δ/(Δ + iJ0)`, stored as `1 + (-iJ0)/(Δ + iJ0)`.
pub fn coeff_t(j0: f64) -> RationalFn {
    let mut t = coeff_r(j0);
    t.constant = ONE;
    t
}

/// `r_k = -iJ0/(Δ + iJ0)`.
pub fn coeff_r(j0: f64) -> RationalFn {
    RationalFn::pole_term(C64::new(0.0, -j0), C64::new(0.0, -j0), 1)
}

/// `e_k = √J0/(Δ + iJ0)`.
pub fn coeff_e(j0: f64) -> RationalFn {
    RationalFn::pole_term(C64::new(j0.sqrt(), 0.0), C64::new(0.0, -j0), 1)
}

/// Spectrum of the decaying-exponential pulse, `√(2σ)/(σ - iΔ)`, together with
/// the delay `x0` its front needs to reach the first qubit.
pub fn pulse_spectrum(p: &PulseSpec) -> (RationalFn, f64) {
    let f = RationalFn::pole_term(I * (2.0 * p.sigma).sqrt(), C64::new(0.0, -p.sigma), 1);
    (f, p.x0)
}

/// Taylor coefficients `0..len` of `(h + d)^{-m}` about `h = 0`.
fn inverse_power_series(d: C64, m: u32, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c = d.powi(-(m as i32));
    for k in 0..len {
        out.push(c);
        c *= -((m as usize + k) as f64) / ((k + 1) as f64) / d;
    }
    out
}

fn truncated_mul(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sample points for the reconstruction check, spread over the scale of the poles.
fn check_points(scale: f64) -> impl Iterator<Item = f64> {
    (0..16).map(move |k| {
        let u = std::f64::consts::PI * ((k as f64 + 0.5) / 16.0 - 0.5);
        scale * u.tan() + 0.137 * scale
    })
}

/// Expand a strictly proper `f` as `Σ c / (Δ - p)^m`.
///
/// Coefficients come from the Taylor expansion of `(Δ - p)^M f(Δ)` about each
/// pole; the result is checked against `f` at 16 real points.
pub fn partial_fractions(f: &RationalFn) -> Result<Vec<PartialFraction>, AlgebraError> {
    if !f.is_strictly_proper() {
        return Err(AlgebraError::NotStrictlyProper);
    }
    if !f.has_proper_part() {
        return Ok(Vec::new());
    }
    let poles = f.poles();
    for (i, a) in poles.iter().enumerate() {
        for b in &poles[i + 1..] {
            let sep = (a.location - b.location).norm();
            if sep < POLE_SEPARATION_MIN {
                return Err(AlgebraError::IllConditioned { separation: sep });
            }
        }
    }

    let mut out = Vec::new();
    for (i, p) in poles.iter().enumerate() {
        let len = p.multiplicity as usize;
        let mut series = poly::taylor_shift(f.numerator(), p.location);
        series.resize(series.len().max(len), ZERO);
        series.truncate(len);
        for (j, q) in poles.iter().enumerate() {
            if i != j {
                let s = inverse_power_series(p.location - q.location, q.multiplicity, len);
                series = truncated_mul(&series, &s, len);
            }
        }
        for (j, g) in series.into_iter().enumerate() {
            out.push(PartialFraction {
                pole: p.location,
                order: p.multiplicity - j as u32,
                coefficient: f.prefactor() * g,
            });
        }
    }

    let scale = 1.0 + poles.iter().map(|p| p.location.norm()).fold(0.0, f64::max);
    for x in check_points(scale) {
        let x = C64::new(x, 0.0);
        let direct = f.eval(x)?;
        let mut sum = ZERO;
        let mut mag = 0.0;
        for pf in &out {
            let v = pf.coefficient / (x - pf.pole).powu(pf.order);
            sum += v;
            mag += v.norm();
        }
        let error = (sum - direct).norm();
        if error > RECONSTRUCTION_TOL * (direct.norm() + mag) {
            return Err(AlgebraError::ReconstructionFailed { error });
        }
    }
    Ok(out)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Closed form of `(1/2π) ∫ dΔ f(Δ) e^{-iΔτ}` times the carrier `e^{-iΩτ}`,
/// with `τ = t - delay`, one [`DelayedTerm`] per pole.
///
/// Lower half-plane poles give causal terms (contour closed downward for `τ > 0`);
/// upper half-plane poles give anti-causal terms. Real-axis poles are rejected.
pub fn inverse_transform(f: &RationalFn, delay: f64, carrier: f64) -> Result<Vec<DelayedTerm>, AlgebraError> {
    let pieces = partial_fractions(f)?;
    let mut terms: Vec<DelayedTerm> = Vec::new();
    for p in f.poles() {
        let z = p.location;
        if z.im.abs() <= POLE_MERGE_TOL * (1.0 + z.norm()) {
            return Err(AlgebraError::RealAxisPole { pole: z });
        }
        let (support, sign) = if z.im < 0.0 { (Support::Causal, -I) } else { (Support::AntiCausal, I) };
        let mut coeffs = vec![ZERO; p.multiplicity as usize];
        for pf in pieces.iter().filter(|pf| pf.pole == z) {
            // C/(Δ-p)^m  ->  ±i C (-iτ)^{m-1}/(m-1)! e^{-ipτ}
            let k = pf.order - 1;
            coeffs[k as usize] += sign * pf.coefficient * (-I).powu(k) / factorial(k);
        }
        terms.push(DelayedTerm { delay, pole: z, poly: poly::trim(coeffs), carrier, support });
    }
    terms.retain(|t| !t.poly.is_empty());
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Direction;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn resonant_coefficients() {
        let (t, r, e) = (coeff_t(1.0), coeff_r(1.0), coeff_e(1.0));
        assert!(t.eval(ZERO).unwrap().norm() < 1e-15);
        assert!((r.eval(ZERO).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((e.eval(ZERO).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(e.eval(c(0.0, -1.0)), Err(AlgebraError::AtPole { pole: c(0.0, -1.0) }));
    }

    #[test]
    fn energy_conservation_on_real_axis() {
        let j0 = 0.7;
        let (t, r) = (coeff_t(j0), coeff_r(j0));
        for k in -200..=200 {
            let d = c(k as f64 * 0.05, 0.0);
            let s = t.eval(d).unwrap().norm_sqr() + r.eval(d).unwrap().norm_sqr();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn transmission_equals_ratio_form() {
        let j0 = 1.3;
        let direct = RationalFn::from_ratio(ONE, vec![ZERO, ONE], vec![Pole { location: c(0.0, -j0), multiplicity: 1 }]).unwrap();
        let t = coeff_t(j0);
        for x in [-2.0, 0.1, 3.0] {
            assert!((direct.eval(c(x, 0.0)).unwrap() - t.eval(c(x, 0.0)).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn products_merge_poles() {
        let rr = coeff_r(1.0).mul(&coeff_r(1.0));
        assert_eq!(rr.poles(), &[Pole { location: c(0.0, -1.0), multiplicity: 2 }]);
        assert!((rr.prefactor() - c(-1.0, 0.0)).norm() < 1e-15);

        let starter = coeff_e(1.0);
        let worked = starter.mul(&coeff_e(1.0));
        assert_eq!(worked.poles(), &[Pole { location: c(0.0, -1.0), multiplicity: 2 }]);
        assert!((worked.prefactor() - ONE).norm() < 1e-15);

        let f = coeff_t(2.0).mul(&coeff_e(2.0));
        assert_eq!(f.mul(&RationalFn::one()), f);
    }

    #[test]
    fn transmission_products_stay_exact() {
        let j0 = 1.0;
        let mut f = coeff_e(j0);
        for _ in 0..4 {
            f = f.mul(&coeff_t(j0));
        }
        assert!(f.is_strictly_proper());
        for x in [-3.0, -0.2, 0.0, 0.4, 5.0] {
            let d = c(x, 0.0);
            let expect = j0.sqrt() * d.powu(4) / (d + c(0.0, j0)).powu(5);
            assert!((f.eval(d).unwrap() - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn lorentzian_partial_fractions() {
        let j0 = 1.0;
        let f = RationalFn::proper(
            c(j0, 0.0),
            vec![ONE],
            vec![Pole { location: c(0.0, -j0), multiplicity: 1 }, Pole { location: c(0.0, j0), multiplicity: 1 }],
        )
        .unwrap();
        let pf = partial_fractions(&f).unwrap();
        let at = |z: C64| pf.iter().find(|p| p.pole == z).unwrap().coefficient;
        assert!((at(c(0.0, -j0)) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((at(c(0.0, j0)) - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn pure_pole_is_its_own_expansion() {
        let f = RationalFn::pole_term(c(1.0, 0.0), c(0.0, -1.0), 2);
        let pf = partial_fractions(&f).unwrap();
        assert_eq!(pf.iter().filter(|p| p.coefficient != ZERO).count(), 1);
        assert_eq!(pf[0], PartialFraction { pole: c(0.0, -1.0), order: 2, coefficient: c(1.0, 0.0) });
    }

    #[test]
    fn transmission_is_not_strictly_proper() {
        assert_eq!(partial_fractions(&coeff_t(1.0)), Err(AlgebraError::NotStrictlyProper));
        assert_eq!(
            RationalFn::proper(ONE, vec![ZERO, ONE], vec![Pole { location: c(0.0, -1.0), multiplicity: 1 }]),
            Err(AlgebraError::NotStrictlyProper)
        );
    }

    #[test]
    fn nearly_coincident_poles_are_rejected() {
        let f = RationalFn::proper(
            ONE,
            vec![ONE],
            vec![
                Pole { location: c(0.0, -1.0), multiplicity: 1 },
                Pole { location: c(1e-10, -1.0), multiplicity: 1 },
            ],
        )
        .unwrap();
        assert!(matches!(partial_fractions(&f), Err(AlgebraError::IllConditioned { .. })));
    }

    #[test]
    fn worked_transform() {
        let (j0, om, l) = (1.0, 200.0, 1.0);
        let f = coeff_e(j0).mul(&coeff_e(j0));
        let terms = inverse_transform(&f, l, om).unwrap();
        assert_eq!(terms.len(), 1);
        let t = &terms[0];
        assert_eq!(t.delay, l);
        assert_eq!(t.pole, c(0.0, -j0));
        assert_eq!(t.support, Support::Causal);
        assert!(t.poly[0].norm() < 1e-15);
        assert!((t.poly[1] - c(-j0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_sided_exponential() {
        let j0 = 1.0;
        let f = RationalFn::proper(
            c(2.0 * j0, 0.0),
            vec![ONE],
            vec![Pole { location: c(0.0, -j0), multiplicity: 1 }, Pole { location: c(0.0, j0), multiplicity: 1 }],
        )
        .unwrap();
        let terms = inverse_transform(&f, 0.0, 0.0).unwrap();
        assert_eq!(terms.len(), 2);
        for t in [-2.0, -0.5, 0.3, 1.7] {
            let v: C64 = terms.iter().map(|term| term.eval(t)).sum();
            assert!((v - c((-j0 * f64::abs(t)).exp(), 0.0)).norm() < 1e-14);
        }
        assert!(terms.iter().any(|t| t.support == Support::AntiCausal));
    }

    #[test]
    fn third_order_feedback_term() {
        let j0 = 1.0;
        let r2 = coeff_r(j0).mul(&coeff_r(j0));
        let f = r2.mul(&coeff_e(j0)).mul(&coeff_e(j0));
        let terms = inverse_transform(&f, 3.0, 0.0).unwrap();
        assert_eq!(terms.len(), 1);
        for tau in [0.2, 1.0, 2.5] {
            let expect = -(tau * j0).powi(3) / 6.0 * (-j0 * tau).exp();
            assert!((terms[0].eval(3.0 + tau) - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn real_axis_pole_is_rejected() {
        let f = RationalFn::pole_term(ONE, c(0.5, 0.0), 1);
        assert!(matches!(inverse_transform(&f, 0.0, 0.0), Err(AlgebraError::RealAxisPole { .. })));
    }

    #[test]
    fn pulse_spectrum_shape() {
        let p = PulseSpec::decaying_exponential(1.0, 5.0, Direction::Right).unwrap();
        let (f, delay) = pulse_spectrum(&p);
        assert_eq!(delay, 5.0);
        assert_eq!(f.poles(), &[Pole { location: c(0.0, -1.0), multiplicity: 1 }]);
        assert!(f.poles().iter().all(|p| p.location.im < 0.0));
        // √(2σ)/(σ - iΔ) at Δ = 0.3
        let d = c(0.3, 0.0);
        let expect = 2f64.sqrt() / (c(1.0, 0.0) - I * d);
        assert!((f.eval(d).unwrap() - expect).norm() < 1e-15);
        // broad pulses flatten and vanish pointwise
        let wide = PulseSpec::decaying_exponential(1e6, 5.0, Direction::Right).unwrap();
        assert!(pulse_spectrum(&wide).0.eval(d).unwrap().norm() < 2e-3);
    }

    #[test]
    fn addition_over_common_denominator() {
        let a = RationalFn::pole_term(c(1.0, 0.5), c(0.0, -1.0), 2);
        let b = RationalFn::pole_term(c(-0.3, 0.0), c(1.0, -2.0), 1).add(&RationalFn::constant(c(2.0, 0.0)));
        let s = a.add(&b);
        for x in [-1.0, 0.0, 2.0] {
            let d = c(x, 0.0);
            let expect = a.eval(d).unwrap() + b.eval(d).unwrap();
            assert!((s.eval(d).unwrap() - expect).norm() < 1e-14);
        }
        assert_eq!(s.constant_part(), c(2.0, 0.0));
    }
}

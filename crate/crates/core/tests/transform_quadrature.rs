//! The residue-calculus transform against brute-force quadrature of
//! `(1/2π) ∫ f(Δ) e^{-iΔτ} dΔ`, plus algebraic round trips.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use wqed_core::momentum::{inverse_transform, partial_fractions, Pole, RationalFn};
use wqed_core::terms::{Label, TimeSeriesAmplitude};

const W: f64 = 200.0;

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn eval_real(f: &RationalFn, x: f64) -> C64 {
    f.eval(C64::new(x, 0.0)).unwrap()
}

/// `k`-th derivative along the real axis by central differences.
fn derivative(f: &RationalFn, x: f64, k: usize) -> C64 {
    let h: f64 = 2.0;
    let g = |y: f64| eval_real(f, y);
    match k {
        0 => g(x),
        1 => (g(x + h) - g(x - h)) / (2.0 * h),
        2 => (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h),
        _ => (g(x + 2.0 * h) - 2.0 * g(x + h) + 2.0 * g(x - h) - g(x - 2.0 * h)) / (2.0 * h.powi(3)),
    }
}

/// Composite Gauss-Legendre on [-W, W] plus the asymptotic tails
/// `∫_W^∞ g e^{-iτΔ} = e^{-iτW} Σ_k g^{(k)}(W)/(iτ)^{k+1}`.
fn quadrature(f: &RationalFn, tau: f64) -> C64 {
    let nodes = gauss_legendre(16);
    let panel = 0.1;
    let panels = (2.0 * W / panel) as usize;
    let kernel = |x: f64| eval_real(f, x) * C64::from_polar(1.0, -x * tau);
    let mut sum = C64::new(0.0, 0.0);
    for p in 0..panels {
        let a = -W + p as f64 * panel;
        let mid = a + 0.5 * panel;
        for &(x, w) in &nodes {
            sum += w * 0.5 * panel * kernel(mid + 0.5 * panel * x);
        }
    }
    let it = C64::new(0.0, tau);
    let mut tail = C64::new(0.0, 0.0);
    for k in 0..4 {
        let den = it.powu(k as u32 + 1);
        tail += C64::from_polar(1.0, -tau * W) * derivative(f, W, k) / den;
        tail -= C64::from_polar(1.0, tau * W) * derivative(f, -W, k) / den;
    }
    (sum + tail) / (2.0 * PI)
}

fn closed_form(f: &RationalFn, tau: f64) -> C64 {
    let terms = inverse_transform(f, 0.0, 0.0).unwrap();
    terms.iter().map(|t| t.eval(tau)).sum()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn quadrature_reproduces_known_transforms() {
    // J0/(Δ+iJ0)^2 -> -J0 τ e^{-J0 τ}
    let f = RationalFn::pole_term(c(1.0, 0.0), c(0.0, -1.0), 2);
    for tau in [0.5, 1.0, 3.0] {
        let q = quadrature(&f, tau);
        assert!((q - c(-tau * (-tau).exp(), 0.0)).norm() < 1e-5, "{tau}: {q}");
    }
}

fn pole_strategy() -> impl Strategy<Value = Pole> {
    (-3.0..3.0f64, 0.1..3.0f64, prop::bool::ANY, 1u32..=2).prop_map(|(re, im, upper, m)| Pole {
        location: c(re, if upper { im } else { -im }),
        multiplicity: m,
    })
}

fn rational_strategy() -> impl Strategy<Value = RationalFn> {
    prop::collection::vec(pole_strategy(), 1..=3).prop_flat_map(|poles| {
        let order: u32 = poles.iter().map(|p| p.multiplicity).sum();
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=order as usize).prop_map(move |coeffs| {
            let num = coeffs.into_iter().map(|(a, b)| c(a, b)).collect();
            RationalFn::proper(c(1.0, 0.0), num, poles.clone()).unwrap()
        })
    })
}

fn well_separated(f: &RationalFn) -> bool {
    let p = f.poles();
    (0..p.len()).all(|i| (i + 1..p.len()).all(|j| (p[i].location - p[j].location).norm() > 0.05))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn residues_match_quadrature(f in rational_strategy(), tau in 0.1..10.0f64) {
        prop_assume!(well_separated(&f));
        let q = quadrature(&f, tau);
        let r = closed_form(&f, tau);
        prop_assert!((q - r).norm() < 1e-4, "tau {}: quadrature {} residues {}", tau, q, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partial_fraction_round_trip(f in rational_strategy(), xs in prop::collection::vec(-20.0..20.0f64, 32)) {
        prop_assume!(well_separated(&f));
        let pieces = partial_fractions(&f).unwrap();
        for x in xs {
            let d = c(x, 0.0);
            let direct = f.eval(d).unwrap();
            let mut sum = c(0.0, 0.0);
            let mut mag = 0.0;
            for p in &pieces {
                let v = p.coefficient / (d - p.pole).powu(p.order);
                sum += v;
                mag += v.norm();
            }
            prop_assert!((sum - direct).norm() <= 1e-10 * (direct.norm() + mag));
        }
    }

    #[test]
    fn transform_is_linear(a in rational_strategy(), b in rational_strategy(), delay in -2.0..5.0f64) {
        prop_assume!(well_separated(&a) && well_separated(&b));
        let sum = a.add(&b);
        prop_assume!(well_separated(&sum));
        let whole = inverse_transform(&sum, delay, 3.0).unwrap();
        let mut parts = inverse_transform(&a, delay, 3.0).unwrap();
        parts.extend(inverse_transform(&b, delay, 3.0).unwrap());
        let mut lhs = TimeSeriesAmplitude::from_terms(Label::Unlabelled, whole);
        let mut rhs = TimeSeriesAmplitude::from_terms(Label::Unlabelled, parts);
        lhs.canonicalize();
        rhs.canonicalize();
        for t in [-3.0, -0.5, 0.7, 2.0, 6.5] {
            let (x, y) = (lhs.eval(t), rhs.eval(t));
            prop_assert!((x - y).norm() < 1e-9 * (1.0 + x.norm()));
        }
    }
}

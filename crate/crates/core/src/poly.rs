//! Dense complex polynomials, lowest power first.

use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn eval(p: &[C64], x: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

pub fn scale(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|&c| c * s).collect()
}

/// Drops exactly-zero leading coefficients.
pub fn trim(mut p: Vec<C64>) -> Vec<C64> {
    while p.last() == Some(&ZERO) {
        p.pop();
    }
    p
}

/// Degree, with the zero polynomial reported as `None`.
pub fn degree(p: &[C64]) -> Option<usize> {
    p.iter().rposition(|&c| c != ZERO)
}

/// `(x - root)^power` expanded.
pub fn linear_power(root: C64, power: u32) -> Vec<C64> {
    let factor = [-root, C64::new(1.0, 0.0)];
    (0..power).fold(vec![C64::new(1.0, 0.0)], |acc, _| mul(&acc, &factor))
}

/// Coefficients of `q(h) = p(a + h)`.
pub fn taylor_shift(p: &[C64], a: C64) -> Vec<C64> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let next = c[j + 1];
            c[j] += a * next;
        }
    }
    c
}

/// Same as [`taylor_shift`] for a real shift.
pub fn taylor_shift_real(p: &[C64], a: f64) -> Vec<C64> {
    taylor_shift(p, C64::new(a, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, -1.0)];
        let a = c(0.3, -1.2);
        let q = taylor_shift(&p, a);
        for h in [c(0.0, 0.0), c(1.0, 0.0), c(-0.7, 0.4)] {
            assert!((eval(&q, h) - eval(&p, a + h)).norm() < 1e-12);
        }
    }

    #[test]
    fn linear_power_roots() {
        let p = linear_power(c(0.0, -1.0), 3);
        assert_eq!(p.len(), 4);
        assert!(eval(&p, c(0.0, -1.0)).norm() < 1e-15);
        assert!((eval(&p, c(1.0, 0.0)) - c(1.0, 1.0).powi(3)).norm() < 1e-14);
    }

    #[test]
    fn degree_and_trim() {
        assert_eq!(degree(&[ZERO, ZERO]), None);
        assert_eq!(degree(&[c(1.0, 0.0), ZERO]), Some(0));
        assert_eq!(trim(vec![c(1.0, 0.0), ZERO]).len(), 1);
        assert_eq!(mul(&[], &[c(1.0, 0.0)]), Vec::<C64>::new());
        assert_eq!(add(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]), vec![c(1.0, 0.0), c(2.0, 0.0)]);
    }
}

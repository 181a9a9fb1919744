//! Pass/fail bookkeeping for the acceptance run.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

/// Collects outcomes and prints one line per criterion as each completes.
#[derive(Default)]
pub struct Report {
    outcomes: Vec<Outcome>,
}

impl Report {
    /// Runs `check`, which returns `(pass, detail)`, and appends the wall time.
    pub fn run(&mut self, id: u32, name: &'static str, check: impl FnOnce() -> (bool, String)) {
        let start = Instant::now();
        let (pass, detail) = check();
        let detail = format!("{detail} [{:.2}s]", start.elapsed().as_secs_f64());
        let outcome = Outcome { id, name, pass, detail };
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{outcome}");
        let _ = out.flush();
        self.outcomes.push(outcome);
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }
}

/// Largest `|a(t) - b(t)|` over `ts`.
pub fn max_deviation(ts: impl IntoIterator<Item = f64>, a: impl Fn(f64) -> C64, b: impl Fn(f64) -> C64) -> f64 {
    ts.into_iter().map(|t| (a(t) - b(t)).norm()).fold(0.0, f64::max)
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |k| lo + step * k as f64)
}

/// Interior local maxima of `ys` sampled at `ts`.
pub fn local_maxima(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..ys.len().saturating_sub(1))
        .filter(|&k| ys[k] > ys[k - 1] && ys[k] >= ys[k + 1])
        .map(|k| ts[k])
        .collect()
}

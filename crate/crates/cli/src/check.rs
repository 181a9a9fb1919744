//! Self-checks behind `wqed check`; each returns `{pass, details}`.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Value};
use wqed_core::evaluator::causality_probe;
use wqed_core::oracle::{self, integrate_chain};
use wqed_core::scattering::{chain_transmission, check_no_uhp, single_qubit_coefficients, SearchWindow};
use wqed_core::{ChainConfig, Engine, InitialCondition};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum What {
    Causality,
    NoUhp,
    Oracle,
    Norm,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub what: What,
    pub pass: bool,
    pub details: Value,
}

const ORACLE_TOL: f64 = 1e-5;
const MIN_ORDER: f64 = 3.5;
const NORM_TOL: f64 = 1e-6;
const NORM_SAMPLES: usize = 50;
const UHP_MARGIN: f64 = 1e-9;

pub fn run(what: What, cfg: &ChainConfig, init: &InitialCondition, horizon: f64, cap: usize) -> Result<CheckReport, CliError> {
    let (pass, details) = match what {
        What::Causality => causality(cfg, init)?,
        What::NoUhp => no_uhp(cfg),
        What::Oracle => oracle_cmp(cfg, init, horizon, cap)?,
        What::Norm => norm(cfg, init, horizon, cap)?,
    };
    Ok(CheckReport { what, pass, details })
}

fn causality(cfg: &ChainConfig, init: &InitialCondition) -> Result<(bool, Value), CliError> {
    let mut rows = Vec::new();
    let mut pass = true;
    for q in 0..cfg.num_qubits() {
        let d = init.light_distance(cfg, q);
        if d == 0.0 {
            continue;
        }
        let max_abs = causality_probe(cfg, init, q).map_err(CliError::from_diagram)?;
        pass &= max_abs == 0.0;
        rows.push(json!({"qubit": q, "light_time": d, "max_abs_before": max_abs}));
    }
    Ok((pass, json!({"qubits": rows})))
}

fn poles_json(poles: &[num_complex::Complex64]) -> Value {
    Value::Array(poles.iter().map(|z| json!([z.re, z.im])).collect())
}

fn no_uhp(cfg: &ChainConfig) -> (bool, Value) {
    let j0 = cfg.j0();
    let window = SearchWindow::default_for(j0);
    let mut table = Vec::new();
    let mut pass = true;
    let mut record = |label: String, rep: wqed_core::scattering::NoUhpReport| {
        pass &= rep.pass;
        table.push(json!({"function": label, "pass": rep.pass, "worst_im": rep.worst_im, "poles": poles_json(&rep.poles)}));
    };
    for (name, f) in ["t", "r", "e"].into_iter().zip(single_qubit_coefficients(j0)) {
        record(format!("single-qubit {name}"), check_no_uhp(&f, &window, UHP_MARGIN));
    }
    if let Some(l) = cfg.min_separation() {
        let f = chain_transmission(j0, cfg.omega(), l);
        record(format!("two-qubit transmission L={l}"), check_no_uhp(&f, &window, UHP_MARGIN));
    }
    // θ = ΩL sweep; θ = 0 is taken as 2π to keep Ω positive
    for theta in [2.0 * PI, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI] {
        for l in [0.1, 1.0, 5.0] {
            let l = l / j0;
            let f = chain_transmission(j0, theta / l, l);
            record(format!("sweep theta={theta:.6} L={l}"), check_no_uhp(&f, &window, UHP_MARGIN));
        }
    }
    let window_json = json!([window.re_min, window.re_max, window.im_min, window.im_max]);
    (pass, json!({"margin": UHP_MARGIN, "window": window_json, "table": table}))
}

/// `L/256`, halved while above the integrator's step limit; a single qubit uses
/// the finest ladder step.
fn comparison_step(cfg: &ChainConfig, ladder: &[f64]) -> f64 {
    match cfg.min_separation() {
        Some(l) => {
            let mut dt = l / 256.0;
            while dt > oracle::max_step(cfg) {
                dt /= 2.0;
            }
            dt
        }
        None => *ladder.last().expect("ladder is never empty"),
    }
}

fn oracle_cmp(cfg: &ChainConfig, init: &InitialCondition, horizon: f64, cap: usize) -> Result<(bool, Value), CliError> {
    let engine = Engine::with_cap(cfg, init, horizon + 1e-9 * (1.0 + horizon), cap).map_err(CliError::from_diagram)?;
    let ladder = oracle::default_ladder(cfg);
    let dt = comparison_step(cfg, &ladder);
    let hist = integrate_chain(cfg, init, horizon, dt).map_err(|e| CliError::Usage(format!("oracle: {e}")))?;
    let mut max_err: f64 = 0.0;
    for k in 1..=hist.steps() {
        let t = k as f64 * dt;
        for q in 0..cfg.num_qubits() {
            let o = hist.excitation(q, t).map_err(|e| CliError::Runtime(e.into()))?;
            max_err = max_err.max((engine.excitation(q, t) - o).norm());
        }
    }
    let study = oracle::convergence_study(cfg, init, horizon, &ladder, |q, t| engine.excitation(q, t))
        .map_err(|e| CliError::Runtime(e.into()))?;
    let pass = max_err < ORACLE_TOL && study.passes(MIN_ORDER);
    let details = json!({
        "dt": dt,
        "max_error": max_err,
        "tolerance": ORACLE_TOL,
        "ladder": study.dts,
        "ladder_errors": study.errors,
        "order": study.order,
    });
    Ok((pass, details))
}

fn norm(cfg: &ChainConfig, init: &InitialCondition, horizon: f64, cap: usize) -> Result<(bool, Value), CliError> {
    let engine = Engine::with_cap(cfg, init, horizon + 1e-9 * (1.0 + horizon), cap).map_err(CliError::from_diagram)?;
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for k in 1..=NORM_SAMPLES {
        let t = horizon * k as f64 / NORM_SAMPLES as f64;
        let dev = (engine.norm(t) - 1.0).abs();
        if dev > worst {
            worst = dev;
            at = t;
        }
    }
    let pass = worst <= NORM_TOL;
    Ok((pass, json!({"samples": NORM_SAMPLES, "max_deviation": worst, "at_t": at, "tolerance": NORM_TOL})))
}

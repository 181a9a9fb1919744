//! Observables, time-grid evaluation and CSV formatting.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use wqed_core::{ChainConfig, Engine};

/// A column group of the simulate output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// `e:i`, the amplitude of qubit `i`.
    Excitation(usize),
    /// `field:x`, `ψ_R + ψ_L` at `x`; plain `field` is the chain midpoint.
    Field(Option<f64>),
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "field" {
            return Ok(Observable::Field(None));
        }
        if let Some(i) = s.strip_prefix("e:") {
            return i.parse().map(Observable::Excitation).map_err(|_| format!("bad qubit index in '{s}'"));
        }
        if let Some(x) = s.strip_prefix("field:") {
            return match x.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Observable::Field(Some(v))),
                _ => Err(format!("bad position in '{s}'")),
            };
        }
        Err(format!("unknown observable '{s}' (expected e:<qubit>, field or field:<x>)"))
    }
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::Excitation(q) => format!("e:{q}"),
            Observable::Field(None) => "field".into(),
            Observable::Field(Some(x)) => format!("field:{x}"),
        }
    }

    pub fn check(&self, cfg: &ChainConfig) -> Result<(), String> {
        match self {
            Observable::Excitation(q) => cfg.check_qubit(*q).map_err(|e| e.to_string()),
            Observable::Field(_) => Ok(()),
        }
    }

    fn eval(&self, engine: &Engine, t: f64) -> C64 {
        match *self {
            Observable::Excitation(q) => engine.excitation(q, t),
            Observable::Field(x) => {
                let x = x.unwrap_or_else(|| midpoint(engine.config()));
                let (r, l) = engine.field(x, t);
                r + l
            }
        }
    }
}

pub fn midpoint(cfg: &ChainConfig) -> f64 {
    let xs = cfg.positions();
    0.5 * (xs[0] + xs[xs.len() - 1])
}

/// Comma-separated observables; an empty list is an error.
pub fn parse_observables(list: &str) -> Result<Vec<Observable>, String> {
    let items: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err("the observable list is empty".into());
    }
    items.into_iter().map(Observable::from_str).collect()
}

/// Fixed 17-significant-digit formatting.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(obs: &[Observable]) -> String {
    let mut h = String::from("t");
    for o in obs {
        let l = o.label();
        let _ = write!(h, ",{l}.re,{l}.im,{l}.abs2");
    }
    h
}

fn row(engine: &Engine, obs: &[Observable], t: f64) -> String {
    let mut line = num(t);
    for o in obs {
        let v = o.eval(engine, t);
        let _ = write!(line, ",{},{},{}", num(v.re), num(v.im), num(v.norm_sqr()));
    }
    line
}

/// CSV text for `obs` on `times`. Rows are evaluated in parallel and emitted in
/// time order.
pub fn simulate_csv(engine: &Engine, obs: &[Observable], times: &[f64]) -> String {
    let rows: Vec<String> = times.par_iter().map(|&t| row(engine, obs, t)).collect();
    let mut out = header(obs);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

/// Long-format field snapshot: `t,x,psi_r.re,psi_r.im,psi_l.re,psi_l.im,density`.
pub fn profile_csv(engine: &Engine, times: &[f64], xs: &[f64]) -> String {
    let blocks: Vec<String> = times
        .par_iter()
        .map(|&t| {
            let mut s = String::new();
            for sample in engine.profile(t, xs).samples {
                let (r, l) = (sample.psi_r, sample.psi_l);
                let density = r.norm_sqr() + l.norm_sqr();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    num(t),
                    num(sample.x),
                    num(r.re),
                    num(r.im),
                    num(l.re),
                    num(l.im),
                    num(density)
                );
            }
            s
        })
        .collect();
    let mut out = String::from("t,x,psi_r.re,psi_r.im,psi_l.re,psi_l.im,density\n");
    for b in blocks {
        out.push_str(&b);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use wqed_core::InitialCondition;

    #[test]
    fn observable_syntax() {
        assert_eq!("e:3".parse::<Observable>().unwrap(), Observable::Excitation(3));
        assert_eq!("field".parse::<Observable>().unwrap(), Observable::Field(None));
        assert_eq!("field:-1.5".parse::<Observable>().unwrap(), Observable::Field(Some(-1.5)));
        assert!("e:x".parse::<Observable>().is_err());
        assert!("energy".parse::<Observable>().is_err());
        assert!(parse_observables(" , ").is_err());
        assert_eq!(parse_observables("e:0,e:1").unwrap().len(), 2);
    }

    #[test]
    fn header_layout() {
        let obs = parse_observables("e:0,field").unwrap();
        assert_eq!(header(&obs), "t,e:0.re,e:0.im,e:0.abs2,field.re,field.im,field.abs2");
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn rows_in_time_order() {
        let cfg = ChainConfig::uniform(1, 5.0, 1.0, 0.0).unwrap();
        let engine = Engine::new(&cfg, &InitialCondition::ExcitedQubit(0), 2.0).unwrap();
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.03).collect();
        let csv = simulate_csv(&engine, &[Observable::Excitation(0)], &times);
        let ts: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(ts, times);
    }
}

use crate::error::{Error, Result};
use std::str::FromStr;

/// Closed-form adjoints for Riemann data (1+a)(1 − H(x)), whose entropy
/// solution is a single shock x_s(t) = (1+a)t/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticCase {
    /// J = ½∫ u(T)² over `region` (closed; `None` is the whole line).
    RiemannDecay { region: Option<(f64, f64)> },
    /// J = (1/2T)∫∫ u² over space-time.
    StationaryAverage,
}

impl FromStr for AnalyticCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "riemann_decay" => Ok(AnalyticCase::RiemannDecay { region: None }),
            "stationary_average" => Ok(AnalyticCase::StationaryAverage),
            other => Err(Error::Structural(format!("unknown analytic case '{other}'"))),
        }
    }
}

/// u*(x, t) by characteristics: slope 1+a left of the shock, 0 right of it,
/// and (1+a)/2 along the shock itself, which fills the shadow triangle.
pub fn analytic_adjoint_oracle(case: &AnalyticCase, x: f64, t: f64, t_final: f64, a: f64) -> Result<f64> {
    let s = 1.0 + a;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("left state 1+a = {s} must be positive")));
    }
    if !(t >= 0.0 && t <= t_final) {
        return Err(Error::Range(format!("t = {t} outside [0, {t_final}]")));
    }
    let shock = |tau: f64| 0.5 * s * tau;
    // time at which the characteristic through (x, t) meets the shock, if before T
    let hit = if x < shock(t) {
        let tau = 2.0 * t - 2.0 * x / s;
        (tau < t_final).then_some(tau)
    } else if x > shock(t) {
        (x < shock(t_final)).then(|| 2.0 * x / s)
    } else {
        Some(t)
    };
    Ok(match *case {
        AnalyticCase::RiemannDecay { region } => {
            let inside = |y: f64| region.is_none_or(|(lo, hi)| y >= lo && y <= hi);
            let on_shock = if inside(shock(t_final)) { 0.5 * s } else { 0.0 };
            match hit {
                Some(_) => on_shock,
                None if x < shock(t) && inside(x + s * (t_final - t)) => s,
                None => 0.0,
            }
        }
        AnalyticCase::StationaryAverage => {
            // source ū/T accumulated backward from u*(T) = 0
            let on_shock = |tau: f64| 0.5 * s * (t_final - tau) / t_final;
            match hit {
                Some(tau) if x < shock(t) => s * (tau - t) / t_final + on_shock(tau),
                Some(tau) => on_shock(tau),
                None if x < shock(t) => s * (t_final - t) / t_final,
                None => 0.0,
            }
        }
    })
}

//! Trace norms H^σ, H^σ_*, and the radius-free semi-norms 𝒩^σ and 𝐍^σ_p.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scatter::{FieldTrace, ModeCoefficients};
use crate::specfun::sup_abs_jn;

/// Which (semi-)norm a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    H,
    HStar,
    NScript,
    NBold(u32),
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::H => f.write_str("H"),
            NormKind::HStar => f.write_str("H*"),
            NormKind::NScript => f.write_str("N"),
            NormKind::NBold(p) => write!(f, "N_{p}"),
        }
    }
}

/// A norm value with the truncation it was summed to and a bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub kind: NormKind,
    pub sigma: f64,
    /// largest |n| included, `None` when the support is finite and fully summed
    pub truncation: Option<u32>,
    pub tail_bound: f64,
}

fn weight(n: i64, sigma: f64) -> f64 {
    (1.0 + n.unsigned_abs() as f64).powf(sigma)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Sobolev index must be finite, got {sigma}")))
    }
}

fn trace_norm(trace: &FieldTrace, sigma: f64, kind: NormKind) -> Result<NormValue> {
    check_sigma(sigma)?;
    let skip_mean = kind == NormKind::HStar;
    let sum: f64 = trace
        .coefficients
        .iter()
        .filter(|(n, _)| !(skip_mean && **n == 0))
        .map(|(n, c)| (c.norm() * weight(*n, sigma)).powi(2))
        .sum();
    let value = (2.0 * PI).sqrt() * sum.sqrt();
    let tail = trace.tail.map_or(0.0, |t| t.weighted(sigma));
    if !tail.is_finite() || (tail > 0.0 && tail >= value) {
        return Err(Error::Accuracy(format!(
            "{kind} norm of the {} trace: tail bound {tail:e} not below the value {value:e}",
            trace.kind
        )));
    }
    Ok(NormValue {
        value,
        kind,
        sigma,
        truncation: trace.tail.map(|_| trace.truncation),
        tail_bound: tail,
    })
}

/// √(2π)·√(Σ|c_n|²(1+|n|)^{2σ}).
pub fn h_sigma(trace: &FieldTrace, sigma: f64) -> Result<NormValue> {
    trace_norm(trace, sigma, NormKind::H)
}

/// H^σ norm with the mean (n = 0 coefficient) removed.
pub fn h_sigma_star(trace: &FieldTrace, sigma: f64) -> Result<NormValue> {
    trace_norm(trace, sigma, NormKind::HStar)
}

/// Orders and coefficients of an incident field, cut at `truncation` for plane waves.
fn incident_terms(modes: &ModeCoefficients, truncation: Option<u32>) -> Result<Vec<(i64, f64)>> {
    let t = match (modes.max_order(), truncation) {
        (Some(s), None) => s,
        (Some(s), Some(t)) => t.min(s),
        (None, Some(t)) => t,
        (None, None) => {
            return Err(Error::Parameter(
                "plane-wave modes need an explicit truncation".into(),
            ))
        }
    };
    Ok(modes
        .orders(t)
        .into_iter()
        .map(|n| (n, modes.coefficient(n).norm()))
        .filter(|(_, a)| *a > 0.0)
        .collect())
}

/// Amplitude shared by every order of a plane wave.
fn plane_amplitude(modes: &ModeCoefficients) -> Option<f64> {
    modes.is_plane_wave().then(|| modes.coefficient(0).norm())
}

/// 𝒩^σ(u^i) = √(2π)·√(Σ_{n≠0}|a_n|²·sup_x|J_n(x)|²·(1+|n|)^{2σ}).
///
/// Plane waves are summed to `truncation`; the rest is bounded with
/// sup|J_n| ≤ (6/7)(1+n)^{-1/3}, which only converges for σ < 1/6.
pub fn n_script(modes: &ModeCoefficients, sigma: f64, truncation: Option<u32>) -> Result<NormValue> {
    check_sigma(sigma)?;
    let mut sum = 0.0;
    for (n, a) in incident_terms(modes, truncation)? {
        if n == 0 {
            continue;
        }
        sum += (a * sup_abs_jn(n.unsigned_abs() as u32)? * weight(n, sigma)).powi(2);
    }
    let tail_bound = match plane_amplitude(modes) {
        Some(amp) => {
            let t = truncation.unwrap_or(0) as f64;
            // Σ_{n>t} (1+n)^p ≤ ∫_t^∞ (1+s)^p ds for p = 2σ − 2/3 < −1
            let p = 2.0 * sigma - 2.0 / 3.0;
            if p < -1.0 {
                let integral = (1.0 + t).powf(p + 1.0) / -(p + 1.0);
                (2.0 * PI).sqrt() * (2.0 * (6.0 / 7.0_f64).powi(2) * amp * amp * integral).sqrt()
            } else {
                f64::INFINITY
            }
        }
        None => 0.0,
    };
    Ok(NormValue {
        value: (2.0 * PI).sqrt() * sum.sqrt(),
        kind: NormKind::NScript,
        sigma,
        truncation: modes.is_plane_wave().then(|| truncation.unwrap_or(0)),
        tail_bound,
    })
}

/// 𝐍^σ_p(u^i) = √(2π)·sup_{|n|≥p} |a_n|·sup_x|J_n(x)|·(1+|n|)^σ.
pub fn n_bold(modes: &ModeCoefficients, sigma: f64, p: u32, truncation: Option<u32>) -> Result<NormValue> {
    check_sigma(sigma)?;
    if p == 0 {
        return Err(Error::Parameter("p must be a positive integer".into()));
    }
    let mut best = 0.0_f64;
    for (n, a) in incident_terms(modes, truncation)? {
        if n.unsigned_abs() < p as u64 {
            continue;
        }
        best = best.max(a * sup_abs_jn(n.unsigned_abs() as u32)? * weight(n, sigma));
    }
    let tail_bound = match plane_amplitude(modes) {
        Some(amp) => {
            let t = truncation.unwrap_or(0).max(p - 1) as f64;
            if sigma <= 1.0 / 3.0 {
                (2.0 * PI).sqrt() * amp * 6.0 / 7.0 * (2.0 + t).powf(sigma - 1.0 / 3.0)
            } else {
                f64::INFINITY
            }
        }
        None => 0.0,
    };
    Ok(NormValue {
        value: (2.0 * PI).sqrt() * best,
        kind: NormKind::NBold(p),
        sigma,
        truncation: modes.is_plane_wave().then(|| truncation.unwrap_or(0)),
        tail_bound,
    })
}

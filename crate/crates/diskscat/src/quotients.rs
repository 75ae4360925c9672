//! Normalised logarithmic derivatives of J_n and Y_n.
//!
//! For n ≥ 1, g_n(x) = (x/n)·J'_n/J_n and k_n(x) = −(x/n)·Y'_n/Y_n; for n = 0
//! the factor x/n is replaced by x. With n₊ = max(n, 1) both read
//! g_n = (x/n₊)·J'_n/J_n and k_n = −(x/n₊)·Y'_n/Y_n.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, brent};
use crate::specfun::{eval_scaled, first_y_zero, phase_from_scaled, Scaled};

/// Relative radius around a zero inside which the quotients refuse to evaluate.
pub const POLE_RADIUS: f64 = 1e-10;
/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Lower constant in k_n + g_n ≥ κ⁺·√(1 − x²/n²), from the product bound 2.09.
pub const KAPPA_PLUS: f64 = 4.0 / 2.09;

/// g_n and k_n at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientSample {
    pub order: u32,
    pub argument: f64,
    pub g: f64,
    pub k: f64,
}

/// Calibration constants of one order. Entries undefined for n = 0 are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub order: u32,
    /// n^{1/3}·g_n(n)
    pub c_n: Option<f64>,
    /// unique point of (0, n) with k_n(κ) = √(1 − κ²/n²)
    pub kappa_n: Option<f64>,
    /// n − (4/5)n^{1/3}, with the value 1/2 at n = 1
    pub chi_n: Option<f64>,
    /// maximiser of x/k_n(x) on (0, n); for n = 0 the root of
    /// k₀(ζ) = 1/2 + √(1 − 4ζ²)/2
    pub zeta_n: f64,
    pub kappa_plus: f64,
    pub euler_gamma: f64,
}

pub(crate) fn n_plus(n: u32) -> f64 {
    n.max(1) as f64
}

fn pole_index(n: u32, x: f64, s: &Scaled, of_j: bool) -> u32 {
    let th = phase_from_scaled(n, x, s);
    let k = if of_j {
        (th + 0.5 * PI) / PI
    } else {
        th / PI + 1.0
    };
    k.round().max(1.0) as u32
}

pub(crate) fn g_from_scaled(n: u32, x: f64, s: &Scaled) -> Result<f64> {
    if s.j == 0.0 || (s.j / s.jp).abs() < POLE_RADIUS * x {
        return Err(Error::Pole {
            order: n,
            index: pole_index(n, x, s, true),
            zero: x - s.j / s.jp,
            x,
        });
    }
    Ok(x / n_plus(n) * s.jp_over_j())
}

pub(crate) fn k_from_scaled(n: u32, x: f64, s: &Scaled) -> Result<f64> {
    if s.y == 0.0 || (s.y / s.yp).abs() < POLE_RADIUS * x {
        return Err(Error::Pole {
            order: n,
            index: pole_index(n, x, s, false),
            zero: x - s.y / s.yp,
            x,
        });
    }
    Ok(-x / n_plus(n) * s.yp_over_y())
}

/// g_n(x).
pub fn g(n: u32, x: f64) -> Result<f64> {
    let s = eval_scaled(n, x)?;
    g_from_scaled(n, x, &s)
}

/// k_n(x).
pub fn k(n: u32, x: f64) -> Result<f64> {
    let s = eval_scaled(n, x)?;
    k_from_scaled(n, x, &s)
}

/// Both quotients at once.
pub fn sample(n: u32, x: f64) -> Result<QuotientSample> {
    let s = eval_scaled(n, x)?;
    Ok(QuotientSample {
        order: n,
        argument: x,
        g: g_from_scaled(n, x, &s)?,
        k: k_from_scaled(n, x, &s)?,
    })
}

/// Right-hand side of the Riccati equation for g_n.
pub fn g_ode_rhs(n: u32, x: f64, g: f64) -> f64 {
    let np = n_plus(n);
    let nn = (n as f64).powi(2);
    nn / (np * x) - x / np - np / x * g * g
}

/// Right-hand side of the Riccati equation for k_n.
pub fn k_ode_rhs(n: u32, x: f64, k: f64) -> f64 {
    let np = n_plus(n);
    let nn = (n as f64).powi(2);
    x / np - nn / (np * x) + np / x * k * k
}

/// φ_n(λ, x) = g_n(λx)/k_n(x) on (0, y_{n,1}) for λ > 1.
pub fn phi(n: u32, lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::Domain(format!("contrast must exceed 1, got {lambda}")));
    }
    let y1 = first_y_zero(n)?;
    if !(x > 0.0 && x < y1) {
        return Err(Error::Domain(format!("x = {x} outside (0, y_{{{n},1}} = {y1})")));
    }
    Ok(g(n, lambda * x)? / k(n, x)?)
}

fn chi(n: u32) -> f64 {
    if n == 1 {
        0.5
    } else {
        let nu = n as f64;
        nu - 0.8 * nu.cbrt()
    }
}

fn kappa(n: u32) -> Result<f64> {
    let nu = n as f64;
    let f = |x: f64| -> Result<f64> { Ok(k(n, x)? - (1.0 - (x / nu).powi(2)).sqrt()) };
    let hi = nu;
    let mut lo = (nu - 1.6 * nu.cbrt()).max(0.05 * nu);
    while f(lo)? >= 0.0 {
        lo *= 0.5;
        if lo < 1e-6 * nu {
            return Err(Error::Numeric(format!("no bracket for kappa_{n}")));
        }
    }
    brent(f, lo, hi, 1e-14 * nu)
}

/// Sign of d/dx (x/k_n): n·k(1 − n·k) + n² − x².
fn zeta_slope(n: u32, x: f64) -> Result<f64> {
    let nu = n as f64;
    let kk = k(n, x)?;
    Ok(nu * kk * (1.0 - nu * kk) + nu * nu - x * x)
}

fn zeta_positive(n: u32, kappa_n: f64) -> Result<f64> {
    let nu = n as f64;
    let lo = kappa_n;
    let hi = nu * (1.0 - 1e-12);
    let x = crate::roots::golden_max(|x| Ok(x / k(n, x)?), lo, hi, 1e-9 * nu)?;
    // polish on the derivative sign, which changes from + to − at the maximum
    let a = (x - 1e-6 * nu).max(lo);
    let b = (x + 1e-6 * nu).min(hi);
    if zeta_slope(n, a)? > 0.0 && zeta_slope(n, b)? < 0.0 {
        brent(|t| zeta_slope(n, t), a, b, 1e-14 * nu)
    } else if zeta_slope(n, lo)? > 0.0 && zeta_slope(n, hi)? < 0.0 {
        brent(|t| zeta_slope(n, t), lo, hi, 1e-14 * nu)
    } else {
        Err(Error::Numeric(format!("derivative sign check failed for zeta_{n}")))
    }
}

fn zeta_zero() -> Result<f64> {
    let f = |x: f64| -> Result<f64> {
        Ok(k(0, x)? - 0.5 - 0.5 * (1.0 - 4.0 * x * x).max(0.0).sqrt())
    };
    bisect(f, 0.05, 0.45, 1e-15)
}

/// Calibration constants c_n, κ_n, χ_n, ζ_n (ζ₀ for n = 0).
pub fn critical_constants(n: u32) -> Result<CriticalConstants> {
    if n == 0 {
        return Ok(CriticalConstants {
            order: 0,
            c_n: None,
            kappa_n: None,
            chi_n: None,
            zeta_n: zeta_zero()?,
            kappa_plus: KAPPA_PLUS,
            euler_gamma: EULER_GAMMA,
        });
    }
    let nu = n as f64;
    let kap = kappa(n)?;
    Ok(CriticalConstants {
        order: n,
        c_n: Some(nu.cbrt() * g(n, nu)?),
        kappa_n: Some(kap),
        chi_n: Some(chi(n)),
        zeta_n: zeta_positive(n, kap)?,
        kappa_plus: KAPPA_PLUS,
        euler_gamma: EULER_GAMMA,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_limits() {
        assert!((g(3, 1e-6).unwrap() - 1.0).abs() < 1e-10);
        assert!((k(2, 1e-5).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pole_is_reported() {
        let j = crate::specfun::j_zero(2, 1).unwrap();
        match g(2, j * (1.0 + 1e-12)) {
            Err(Error::Pole { order, index, zero, .. }) => {
                assert_eq!((order, index), (2, 1));
                assert!((zero - j).abs() < 1e-12);
            }
            other => panic!("expected pole, got {other:?}"),
        }
        let y = crate::specfun::y_zero(0, 2).unwrap();
        assert!(matches!(k(0, y), Err(Error::Pole { index: 2, .. })));
    }

    #[test]
    fn kappa_one_and_zeta_zero() {
        let c1 = critical_constants(1).unwrap();
        assert!((c1.kappa_n.unwrap() - 0.52).abs() < 0.01);
        let c0 = critical_constants(0).unwrap();
        assert!((c0.zeta_n - 0.3135).abs() < 5e-4);
        assert!((c0.zeta_n / k(0, c0.zeta_n).unwrap() - 0.3524).abs() < 5e-4);
        const { assert!(KAPPA_PLUS > 1.91) };
    }

    #[test]
    fn phi_domain() {
        assert!(phi(1, 0.5, 0.1).is_err());
        assert!(phi(1, 2.0, 10.0).is_err());
    }
}

//! Cylinder functions of integer order: values, modulus/phase form, zeros.

mod bessel;
mod zeros;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use bessel::{eval_scaled, ldexp, Scaled};
pub use bessel::{MAX_ARG, MAX_ORDER};
pub use zeros::{
    clear_zero_cache, first_jp_zero, first_y_zero, j_zero, jp_zero, load_zero_cache, load_zero_cache_file,
    save_zero_cache, y_zero, zeros, ZeroTable,
};

/// J_n, Y_n and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderValues {
    pub order: u32,
    pub argument: f64,
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

impl CylinderValues {
    /// J·Y' − J'·Y, which should equal 2/(πx).
    pub fn wronskian(&self) -> f64 {
        self.j * self.yp - self.jp * self.y
    }
}

/// Modulus and continuous phase of H_n = J_n + iY_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelPolar {
    pub modulus: f64,
    pub phase: f64,
}

/// Evaluates J_n, Y_n, J'_n, Y'_n.
///
/// Fails with a domain error outside `0 < x <= MAX_ARG`, `n <= MAX_ORDER`, or
/// when a value leaves the normal double range.
pub fn eval_cylinder(n: u32, x: f64) -> Result<CylinderValues> {
    let s = eval_scaled(n, x)?;
    let j = ldexp(s.j, s.jexp);
    let jp = ldexp(s.jp, s.jexp);
    let y = ldexp(s.y, s.yexp);
    let yp = ldexp(s.yp, s.yexp);
    if !y.is_finite() || !yp.is_finite() || (s.j != 0.0 && j.abs() < f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "J_{n}({x}) or Y_{n}({x}) leaves the double range"
        )));
    }
    Ok(CylinderValues {
        order: n,
        argument: x,
        j,
        y,
        jp,
        yp,
    })
}

/// Rough phase from the Debye form, good to well under π/2; used only to
/// pick the branch of the arctangent.
fn approximate_phase(n: u32, x: f64) -> f64 {
    let nu = n as f64;
    if x <= nu {
        return -FRAC_PI_2;
    }
    let r = (x * x - nu * nu).sqrt();
    r - nu * (nu / x).acos() - FRAC_PI_4
}

/// Continuous phase of H_n from already computed scaled values.
pub(crate) fn phase_from_scaled(n: u32, x: f64, s: &Scaled) -> f64 {
    let (m, e) = s.y_over_j();
    let base = ldexp(m, e).atan();
    if n > 0 && x <= n as f64 {
        // no zero of J_n lies below its order
        return base;
    }
    let branch = ((approximate_phase(n, x) - base) / PI).round();
    base + branch.max(0.0) * PI
}

/// Continuous phase θ_n(x) with θ_n(0+) = −π/2.
pub fn phase(n: u32, x: f64) -> Result<f64> {
    let s = eval_scaled(n, x)?;
    Ok(phase_from_scaled(n, x, &s))
}

/// Modulus/phase pair of the Hankel function.
pub fn eval_hankel_polar(n: u32, x: f64) -> Result<HankelPolar> {
    let v = eval_cylinder(n, x)?;
    let s = eval_scaled(n, x)?;
    Ok(HankelPolar {
        modulus: v.j.hypot(v.y),
        phase: phase_from_scaled(n, x, &s),
    })
}

/// sup over x > 0 of |J_n(x)|: 1 for n = 0, J_n(j'_{n,1}) otherwise.
pub fn sup_abs_jn(n: u32) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let x = first_jp_zero(n)?;
    Ok(eval_cylinder(n, x)?.j.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_limits() {
        let v = eval_cylinder(0, 1e-8).unwrap();
        assert!((v.j - 1.0).abs() < 1e-15);
        assert!(v.jp.abs() < 1e-8);
        let v = eval_cylinder(5, 1e-3).unwrap();
        assert!(v.j.abs() < 1e-17);
    }

    #[test]
    fn recurrence_consistency() {
        for &x in &[0.3, 2.5, 7.0, 40.0, 900.0] {
            for n in 1..30u32 {
                let a = eval_cylinder(n - 1, x).unwrap();
                let b = eval_cylinder(n, x).unwrap();
                let c = eval_cylinder(n + 1, x).unwrap();
                let lhs = a.j + c.j;
                let rhs = 2.0 * n as f64 / x * b.j;
                let scale = a.j.abs().max(c.j.abs()).max(rhs.abs());
                assert!((lhs - rhs).abs() <= 1e-13 * scale, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn phase_starts_at_minus_half_pi() {
        assert!((phase(1, 1e-6).unwrap() + FRAC_PI_2).abs() < 1e-9);
        assert!((phase(0, 1e-6).unwrap() + FRAC_PI_2).abs() < 0.2);
    }

    #[test]
    fn phase_large_argument() {
        for n in [0u32, 3, 10] {
            let x = 5000.0;
            let th = phase(n, x).unwrap();
            let approx = x - (2.0 * n as f64 + 1.0) * FRAC_PI_4;
            assert!((th - approx).abs() < 0.05, "n={n}");
        }
    }

    #[test]
    fn phase_at_turning_point() {
        let t = (-phase(30, 30.0).unwrap()).tan();
        assert!(t > 3f64.sqrt() && t < 1.8);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        assert!(matches!(eval_cylinder(0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(eval_cylinder(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_cylinder(501, 1.0), Err(Error::Domain(_))));
        assert!(matches!(eval_cylinder(2, 2e4), Err(Error::Domain(_))));
        assert!(matches!(eval_cylinder(400, 0.01), Err(Error::Domain(_))));
    }

    #[test]
    fn sup_of_j1() {
        assert!((sup_abs_jn(1).unwrap() - 0.581_865_224_281_596_4).abs() < 1e-12);
        assert_eq!(sup_abs_jn(0).unwrap(), 1.0);
    }
}

//! Integer-order J and Y with derivatives.
//!
//! The ratio J'_n/J_n comes from the continued fraction of the three-term
//! recurrence, which is then run downwards to a low order `mu`. There J_mu and
//! Y_mu are fixed by the Temme series (x < 2) or by the complex continued
//! fraction of Steed's method (x >= 2), normalised through the Wronskian.
//! Y is finally carried upward by forward recurrence, which is stable.
//!
//! Values are kept as mantissa/exponent pairs so that quotients stay
//! available when J_n underflows or Y_n overflows.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: u32 = 500;
/// Largest supported argument.
pub const MAX_ARG: f64 = 1.0e4;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1.0e-16;
const FPMIN: f64 = 1.0e-300;
const CF1_MAX_ITER: usize = 200_000;
const SERIES_MAX_ITER: usize = 10_000;
const RESCALE_EXP: i32 = 600;

/// Multiply by an integral power of two without intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= f64::from_bits(((1000 + 1023) as u64) << 52);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= f64::from_bits(((-1000 + 1023) as u64) << 52);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    if e >= -1022 {
        x * f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        // two steps keep the subnormal range reachable
        x * f64::from_bits(((-1022 + 1023) as u64) << 52) * f64::from_bits(((e + 1022 + 1023) as u64) << 52)
    }
}

/// J_n, J'_n, Y_n, Y'_n as mantissas with power-of-two exponents:
/// J = j·2^jexp and Y = y·2^yexp.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scaled {
    pub j: f64,
    pub jp: f64,
    pub jexp: i32,
    pub y: f64,
    pub yp: f64,
    pub yexp: i32,
}

impl Scaled {
    /// Y_n/J_n as a mantissa/exponent pair.
    pub fn y_over_j(&self) -> (f64, i32) {
        (self.y / self.j, self.yexp - self.jexp)
    }

    /// Same values with |j| and |y| moved into [1, 2).
    pub fn normalized(&self) -> Scaled {
        let shift = |m: f64| if m == 0.0 || !m.is_finite() { 0 } else { m.abs().log2().floor() as i32 };
        let (sj, sy) = (shift(self.j), shift(self.y));
        Scaled {
            j: ldexp(self.j, -sj),
            jp: ldexp(self.jp, -sj),
            jexp: self.jexp + sj,
            y: ldexp(self.y, -sy),
            yp: ldexp(self.yp, -sy),
            yexp: self.yexp + sy,
        }
    }

    /// J'_n/J_n.
    pub fn jp_over_j(&self) -> f64 {
        self.jp / self.j
    }

    /// Y'_n/Y_n.
    pub fn yp_over_y(&self) -> f64 {
        self.yp / self.y
    }
}

pub(crate) fn check_args(n: u32, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("argument must be positive and finite, got {x}")));
    }
    if x > MAX_ARG * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("argument {x} exceeds the supported maximum {MAX_ARG}")));
    }
    if n > MAX_ORDER {
        return Err(Error::Domain(format!("order {n} exceeds the supported maximum {MAX_ORDER}")));
    }
    Ok(())
}

/// Arguments from which the Hankel expansion replaces the continued fraction.
pub(crate) fn asymptotic_threshold(n: u32) -> f64 {
    let nu = n as f64;
    (0.6 * nu * nu).max(40.0)
}

/// Hankel's expansion for x ≫ n²: J, Y, J', Y' from the P, Q, R, S series.
fn hankel_expansion(n: u32, x: f64) -> Scaled {
    let mu = 4.0 * (n as f64).powi(2);
    let (mut p, mut q, mut r, mut s) = (1.0, 0.0, 1.0, 0.0);
    // a_k/x^k and b_k/x^k, signs folded in below
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let b = a * (mu + 4.0 * kf * kf - 1.0) / (8.0 * kf * x);
        a *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
        let size = a.abs().max(b.abs());
        if size > last {
            break;
        }
        last = size;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
            r += sign * b;
        } else {
            q += sign * a;
            s += sign * b;
        }
        if size < 1e-17 {
            break;
        }
    }
    // ω = x − (2n+1)π/4; the shift is an odd multiple of π/4, so expand the
    // difference instead of rounding ω
    let (sx, cx) = x.sin_cos();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (ss, cc) = match (2 * n as u64 + 1) % 8 {
        1 => (h, h),
        3 => (h, -h),
        5 => (-h, -h),
        _ => (-h, h),
    };
    let sn = sx * cc - cx * ss;
    let cs = cx * cc + sx * ss;
    let amp = (2.0 / (PI * x)).sqrt();
    Scaled {
        j: amp * (p * cs - q * sn),
        jp: -amp * (r * sn + s * cs),
        jexp: 0,
        y: amp * (p * sn + q * cs),
        yp: amp * (r * cs - s * sn),
        yexp: 0,
    }
}

pub(crate) fn eval_scaled(n: u32, x: f64) -> Result<Scaled> {
    check_args(n, x)?;
    if x >= asymptotic_threshold(n) {
        return Ok(hankel_expansion(n, x));
    }
    eval_recurrence(n, x)
}

fn eval_recurrence(n: u32, x: f64) -> Result<Scaled> {
    let nu = n as f64;
    let nl: u32 = if x < 2.0 {
        n
    } else {
        ((nu - x + 1.5).floor().max(0.0)) as u32
    };
    let mu = (n - nl) as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // continued fraction for J'_n/J_n
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for i in 1..=CF1_MAX_ITER {
        // formed afresh: accumulating 2/x drifts over thousands of terms
        let b = xi2 * (nu + i as f64);
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!("continued fraction for J'/J failed at n={n}, x={x}")));
    }

    // downward recurrence to order mu, rescaled against overflow
    let mut rjl = isign;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut jscale: i32 = 0;
    for l in ((n - nl + 1)..=n).rev() {
        let t = l as f64 * xi * rjl + rjpl;
        rjpl = (l - 1) as f64 * xi * t - rjl;
        rjl = t;
        if rjl.abs() > ldexp(1.0, RESCALE_EXP) {
            rjl = ldexp(rjl, -RESCALE_EXP);
            rjpl = ldexp(rjpl, -RESCALE_EXP);
            jscale += RESCALE_EXP;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, rymu, ry1) = if x < 2.0 {
        // Temme series at mu = 0
        let x2 = 0.5 * x;
        let dl = -x2.ln();
        let mut ff = 2.0 / PI * (dl - EULER_GAMMA);
        let mut p = 1.0 / PI;
        let mut q = 1.0 / PI;
        let mut cc = 1.0;
        let dd = -x2 * x2;
        let mut sum = ff;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..SERIES_MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi);
            cc *= dd / fi;
            p /= fi;
            q /= fi;
            let del = cc * ff;
            sum += del;
            let del1 = cc * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Numeric(format!("Y series failed to converge at x={x}")));
        }
        let rymu = -sum;
        let ry1 = -sum1 * xi2;
        let rymup = -ry1;
        let rjmu = w / (rymup - f * rymu);
        (rjmu, rymu, ry1)
    } else {
        // Steed's complex continued fraction for p + iq = (J' + iY')/(J + iY)
        let mut a = 0.25 - mu * mu;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fct = a * xi / (p * p + q * q);
        let mut cr = br + q * fct;
        let mut ci = bi + p * fct;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..SERIES_MAX_ITER {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fct = a / (cr * cr + ci * ci);
            cr = br + cr * fct;
            ci = bi - ci * fct;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Numeric(format!("Steed continued fraction failed at x={x}")));
        }
        let gam = (p - f) / q;
        let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
        let rymu = rjmu * gam;
        let rymup = rjmu * (gam * p + q);
        let ry1 = mu * xi * rymu - rymup;
        (rjmu, rymu, ry1)
    };

    let fct = rjmu / rjl;
    let j = rjl1 * fct;
    let jp = rjp1 * fct;

    // upward recurrence for Y, rescaled against overflow
    let mut ym = rymu;
    let mut y1 = ry1;
    let mut yscale: i32 = 0;
    for i in 1..=nl {
        let t = (mu + i as f64) * xi2 * y1 - ym;
        ym = y1;
        y1 = t;
        if y1.abs() > ldexp(1.0, RESCALE_EXP) {
            ym = ldexp(ym, -RESCALE_EXP);
            y1 = ldexp(y1, -RESCALE_EXP);
            yscale += RESCALE_EXP;
        }
    }
    let yp = nu * xi * ym - y1;

    Ok(Scaled {
        j,
        jp,
        jexp: -jscale,
        y: ym,
        yp,
        yexp: yscale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_matches_recurrence_past_threshold() {
        let mut worst = 0.0_f64;
        for n in (0..=120).step_by(3) {
            let t = asymptotic_threshold(n);
            for f in [1.0, 1.07, 1.5, 3.0] {
                let x = t * f;
                if x > MAX_ARG {
                    continue;
                }
                let a = hankel_expansion(n, x);
                let b = eval_recurrence(n, x).unwrap();
                let (bj, by) = (ldexp(b.j, b.jexp), ldexp(b.y, b.yexp));
                let (bjp, byp) = (ldexp(b.jp, b.jexp), ldexp(b.yp, b.yexp));
                let m = bj.hypot(by);
                let md = bjp.hypot(byp);
                let e = ((a.j - bj).hypot(a.y - by) / m).max((a.jp - bjp).hypot(a.yp - byp) / md);
                worst = worst.max(e);
            }
        }
        assert!(worst < 1e-12, "worst {worst:e}");
    }

    #[test]
    fn large_argument_reference_values() {
        // 40-digit values
        let cases = [
            (105, 9922.5, [7.211_874_581_119_733e-3, -3.485_924_355_151_204e-3, 3.485_365_728_189_310e-3, 7.211_646_467_149_396e-3]),
            (24, 1036.8, [2.249_247_409_565_652e-2, -1.040_561_444_344_250_6e-2, 1.039_197_455_084_473_4e-2, 2.249_147_059_441_308e-2]),
        ];
        for (n, x, want) in cases {
            let s = eval_scaled(n, x).unwrap();
            let got = [ldexp(s.j, s.jexp), ldexp(s.y, s.yexp), ldexp(s.jp, s.jexp), ldexp(s.yp, s.yexp)];
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-15 * w.abs(), "n={n} x={x}: {g:e} vs {w:e}");
            }
        }
    }

    #[test]
    fn ldexp_matches_powers() {
        assert_eq!(ldexp(1.0, 10), 1024.0);
        assert_eq!(ldexp(3.0, -2), 0.75);
        assert_eq!(ldexp(1.0, 2000), f64::INFINITY);
        assert_eq!(ldexp(1.0, -2000), 0.0);
        assert_eq!(ldexp(ldexp(1.5, 900), -900), 1.5);
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
    }

    #[test]
    fn low_order_reference_values() {
        // tabulated values (Abramowitz & Stegun, table 9.1)
        let s = eval_scaled(0, 1.0).unwrap();
        assert!((s.j - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((s.y - 0.088_256_964_215_676_96).abs() < 1e-15);
        let s = eval_scaled(1, 10.0).unwrap();
        assert!((s.j - 0.043_472_746_168_861_44).abs() < 1e-15);
        assert!((s.y - 0.249_015_424_206_953_9).abs() < 1e-15);
    }

    #[test]
    fn deep_overflow_regime_is_scaled() {
        let s = eval_scaled(300, 1.0).unwrap();
        assert!(s.jexp < 0 && s.yexp > 0);
        assert!(s.j.is_finite() && s.y.is_finite());
    }
}

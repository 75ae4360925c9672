//! Bracketed scalar root finders.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Brent's method on `[a, b]`; `f(a)` and `f(b)` must differ in sign.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numeric(format!(
            "no sign change on [{a:e}, {b:e}]: f = ({fa:e}, {fb:e})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Numeric(format!(
        "brent did not converge; last bracket [{b:e}, {c:e}]"
    )))
}

/// Newton iteration safeguarded by the bracket `[lo, hi]`, falling back to
/// bisection whenever a step leaves the bracket or stalls.
///
/// `fdf` returns the pair `(f(x), f'(x))`.
pub fn newton_bisect<F>(mut fdf: F, lo: f64, hi: f64, x0: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (mut lo, mut hi) = (lo, hi);
    let (flo, _) = fdf(lo)?;
    let (fhi, _) = fdf(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numeric(format!(
            "no sign change on [{lo:e}, {hi:e}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    let rising = fhi > 0.0;
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut last_step = hi - lo;
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        let step_ok = dfx != 0.0
            && newton.is_finite()
            && newton > lo
            && newton < hi
            && (newton - x).abs() < 0.5 * last_step.abs();
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        last_step = next - x;
        let tol = xtol + 4.0 * f64::EPSILON * x.abs();
        x = next;
        if last_step.abs() <= tol || (hi - lo) <= tol {
            return Ok(x);
        }
    }
    Err(Error::Numeric(format!(
        "safeguarded Newton did not converge; last bracket [{lo:e}, {hi:e}]"
    )))
}

/// Plain bisection for a sign change on `[a, b]`.
pub fn bisect<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa.signum() == fb.signum() {
        return Err(Error::Numeric(format!(
            "no sign change on [{a:e}, {b:e}]: f = ({fa:e}, {fb:e})"
        )));
    }
    let neg_left = fa < 0.0;
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_left {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

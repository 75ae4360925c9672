//! Independent reference values: ascending series summed in double-double.

#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    pub fn powi(self, n: u32) -> Dd {
        let mut r = Dd::from(1.0);
        for _ in 0..n {
            r = r * self;
        }
        r
    }
    pub fn exp(self) -> Dd {
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * Dd::from(k);
        let r = r / Dd::from(1024.0);
        let mut term = Dd::from(1.0);
        let mut sum = Dd::from(1.0);
        for i in 1..30 {
            term = term * r / Dd::from(i as f64);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum * Dd::from(2f64.powi(k as i32))
    }
    pub fn ln(self) -> Dd {
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..3 {
            y = y + self * (-y).exp() - Dd::from(1.0);
        }
        y
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (s, e) = quick_two_sum(s, e + f);
        Dd { hi: s, lo: e }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (s, e) = quick_two_sum(p, e);
        Dd { hi: s, lo: e }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from(q2);
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from(q3)
    }
}

pub const PI: Dd = Dd::new(std::f64::consts::PI, 1.224_646_799_147_353_2e-16);
pub const LN2: Dd = Dd::new(std::f64::consts::LN_2, 2.319_046_813_846_299_6e-17);
pub const EULER: Dd = Dd::new(0.577_215_664_901_532_9, -4.942_915_152_430_645e-18);

const TERMS: usize = 200;

fn factorial(n: u32) -> Dd {
    let mut f = Dd::from(1.0);
    for i in 2..=n {
        f = f * Dd::from(i as f64);
    }
    f
}

/// J_n(x) from its ascending series.
pub fn j_dd(n: u32, x: f64) -> Dd {
    let h = Dd::from(x) / Dd::from(2.0);
    let q = -(h * h);
    let mut term = h.powi(n) / factorial(n);
    let mut sum = term;
    for k in 1..TERMS {
        term = term * q / Dd::from((k as f64) * ((n as usize + k) as f64));
        sum = sum + term;
    }
    sum
}

/// Y_n(x) from its ascending series.
pub fn y_dd(n: u32, x: f64) -> Dd {
    let h = Dd::from(x) / Dd::from(2.0);
    let q = -(h * h);
    // finite part
    let mut finite = Dd::from(0.0);
    for k in 0..n {
        let c = factorial(n - k - 1) / factorial(k);
        let p = (2 * k as i32) - n as i32;
        let hp = if p >= 0 {
            h.powi(p as u32)
        } else {
            Dd::from(1.0) / h.powi((-p) as u32)
        };
        finite = finite + c * hp;
    }
    // digamma terms psi(k+1) + psi(n+k+1)
    let mut hk = Dd::from(0.0);
    let mut hnk = Dd::from(0.0);
    for i in 1..=n {
        hnk = hnk + Dd::from(1.0) / Dd::from(i as f64);
    }
    let mut term = h.powi(n) / factorial(n);
    let mut series = (hk + hnk - EULER - EULER) * term;
    for k in 1..TERMS {
        hk = hk + Dd::from(1.0) / Dd::from(k as f64);
        hnk = hnk + Dd::from(1.0) / Dd::from((n as usize + k) as f64);
        term = term * q / Dd::from((k as f64) * ((n as usize + k) as f64));
        series = series + (hk + hnk - EULER - EULER) * term;
    }
    let two = Dd::from(2.0);
    (two * h.ln() * j_dd(n, x) - finite - series) / PI
}

pub fn jp_dd(n: u32, x: f64) -> Dd {
    if n == 0 {
        -j_dd(1, x)
    } else {
        (j_dd(n - 1, x) - j_dd(n + 1, x)) / Dd::from(2.0)
    }
}

pub fn yp_dd(n: u32, x: f64) -> Dd {
    if n == 0 {
        -y_dd(1, x)
    } else {
        (y_dd(n - 1, x) - y_dd(n + 1, x)) / Dd::from(2.0)
    }
}

/// Bisection on the sign of a double-double function.
pub fn bisect_dd<F: Fn(f64) -> Dd>(f: F, mut a: f64, mut b: f64) -> f64 {
    let left_neg = f(a).hi < 0.0;
    assert_ne!(left_neg, f(b).hi < 0.0, "no sign change");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m).hi < 0.0) == left_neg {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Relative error with an absolute floor for values near a zero.
pub fn rel_err(got: f64, want: f64, abs_floor: f64) -> f64 {
    (got - want).abs() / want.abs().max(abs_floor)
}

//! Complex numbers with an extra power-of-two exponent.

use num_complex::Complex64;

use crate::specfun::ldexp;

/// m·2^e with |m| kept near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Wide {
    pub m: Complex64,
    pub e: i32,
}

impl Wide {
    pub fn new(m: Complex64, e: i32) -> Wide {
        Wide { m, e }.normalized()
    }

    pub fn real(x: f64, e: i32) -> Wide {
        Wide::new(Complex64::new(x, 0.0), e)
    }

    /// a·2^ea + i·b·2^eb
    pub fn from_parts(a: f64, ea: i32, b: f64, eb: i32) -> Wide {
        let e = ea.max(eb);
        Wide::new(Complex64::new(ldexp(a, ea - e), ldexp(b, eb - e)), e)
    }

    fn normalized(self) -> Wide {
        let mag = self.m.re.abs().max(self.m.im.abs());
        if mag == 0.0 || !mag.is_finite() {
            return self;
        }
        let shift = mag.log2().floor() as i32;
        Wide {
            m: Complex64::new(ldexp(self.m.re, -shift), ldexp(self.m.im, -shift)),
            e: self.e + shift,
        }
    }

    pub fn mul(self, o: Wide) -> Wide {
        Wide::new(self.m * o.m, self.e + o.e)
    }

    pub fn div(self, o: Wide) -> Wide {
        Wide::new(self.m / o.m, self.e - o.e)
    }

    pub fn scale(self, c: Complex64) -> Wide {
        Wide::new(self.m * c, self.e)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(ldexp(self.m.re, self.e), ldexp(self.m.im, self.e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_beyond_double_range() {
        let big = Wide::real(1.5, 1500);
        let small = Wide::real(2.0, -1490);
        let p = big.mul(small).to_complex();
        assert!((p.re - 3.0 * 1024.0).abs() < 1e-9);
        let q = big.div(Wide::real(3.0, 1499)).to_complex();
        assert!((q.re - 1.0).abs() < 1e-15);
    }
}

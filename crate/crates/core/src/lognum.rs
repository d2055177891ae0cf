//! Sign/log-magnitude scalar arithmetic.
//!
//! Spectral integrals substituted into logarithmic coordinates need function
//! values at arguments like t = e^(10^8), far outside f64 range. `LogNum`
//! stores a number as a sign and the natural log of its magnitude, so
//! products, quotients and powers act on exponents and stay representable.
//! Sums use log-sum-exp. Accuracy is limited by the f64 resolution of the
//! stored exponent: a value with ln|x| ~ L carries a relative error of
//! roughly L * 2^-52, which is the documented precision floor of the tail
//! integrals built on top of this type.

/// A real number x represented as (sign, ln|x|). Zero has `ln = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNum {
    sign: i8,
    ln: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        sign: 0,
        ln: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogNum {
                sign: if x > 0.0 { 1 } else { -1 },
                ln: x.abs().ln(),
            }
        }
    }

    /// Build a positive number directly from its natural log.
    pub fn from_ln(ln: f64) -> Self {
        LogNum { sign: 1, ln }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    /// ln|x| of the stored value; `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.ln
    }

    pub fn neg(self) -> Self {
        LogNum {
            sign: -self.sign,
            ln: self.ln,
        }
    }

    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (hi, lo) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        let d = lo.ln - hi.ln; // <= 0
        if self.sign == other.sign {
            LogNum {
                sign: hi.sign,
                ln: hi.ln + d.exp().ln_1p(),
            }
        } else {
            // Opposite signs: |hi| - |lo|, sign follows hi.
            let m = -d.exp_m1(); // 1 - e^d in (0, 1]
            if m == 0.0 {
                Self::ZERO
            } else {
                LogNum {
                    sign: hi.sign,
                    ln: hi.ln + m.ln(),
                }
            }
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        LogNum {
            sign: self.sign * other.sign,
            ln: self.ln + other.ln,
        }
    }

    pub fn div(self, other: Self) -> Result<Self, &'static str> {
        if other.sign == 0 {
            return Err("division by zero");
        }
        if self.sign == 0 {
            return Ok(Self::ZERO);
        }
        Ok(LogNum {
            sign: self.sign * other.sign,
            ln: self.ln - other.ln,
        })
    }

    /// x^a for real exponent a. Requires x > 0 unless a is an exact integer.
    pub fn pow(self, a: f64) -> Result<Self, &'static str> {
        if self.sign == 0 {
            return if a > 0.0 {
                Ok(Self::ZERO)
            } else {
                Err("zero raised to nonpositive power")
            };
        }
        if self.sign < 0 {
            if a.fract() == 0.0 {
                let odd = (a as i64) % 2 != 0;
                return Ok(LogNum {
                    sign: if odd { -1 } else { 1 },
                    ln: a * self.ln,
                });
            }
            return Err("negative base with non-integer exponent");
        }
        Ok(LogNum {
            sign: 1,
            ln: a * self.ln,
        })
    }

    /// Natural log; requires x > 0. The result is an ordinary-size number
    /// even when x itself is astronomically large.
    pub fn ln_val(self) -> Result<Self, &'static str> {
        if self.sign <= 0 {
            return Err("log of nonpositive value");
        }
        Ok(Self::from_f64(self.ln))
    }

    pub fn exp_val(self) -> Self {
        LogNum {
            sign: 1,
            ln: self.to_f64(),
        }
    }

    /// sin(x); the argument must be of ordinary size for this to be meaningful.
    pub fn sin_val(self) -> Self {
        Self::from_f64(self.to_f64().sin())
    }

    pub fn sqrt_val(self) -> Result<Self, &'static str> {
        if self.sign < 0 {
            return Err("sqrt of negative value");
        }
        self.pow(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn roundtrip_and_arithmetic() {
        // exp(ln x) carries a relative error of about |ln x| * 2^-52.
        for &x in &[3.5, -2.0, 1e-200, 7e150, 0.0] {
            assert!(close(LogNum::from_f64(x).to_f64(), x, 1e-12));
        }
        let a = LogNum::from_f64(3.0);
        let b = LogNum::from_f64(-5.0);
        assert!(close(a.add(b).to_f64(), -2.0, 1e-15));
        assert!(close(a.mul(b).to_f64(), -15.0, 1e-15));
        assert!(close(a.sub(b).to_f64(), 8.0, 1e-15));
        assert!(close(b.div(a).unwrap().to_f64(), -5.0 / 3.0, 1e-15));
    }

    #[test]
    fn huge_range_products_stay_representable() {
        // (1e280 * 1e280) / 1e300 = 1e260 without overflow.
        let x = LogNum::from_f64(1e280);
        let y = x.mul(x).div(LogNum::from_f64(1e300)).unwrap();
        assert!(close(y.to_f64(), 1e260, 1e-12));
    }

    #[test]
    fn log_of_huge_argument() {
        // ln(t) with ln t = 5e8: t itself is unrepresentable but its log is fine.
        let t = LogNum::from_ln(5e8);
        assert!(close(t.ln_val().unwrap().to_f64(), 5e8, 1e-15));
    }

    #[test]
    fn cancellation_to_zero() {
        let a = LogNum::from_f64(1.25);
        assert!(a.sub(a).is_zero());
    }

    #[test]
    fn pow_negative_integer_exponent() {
        let a = LogNum::from_f64(-2.0);
        assert!(close(a.pow(3.0).unwrap().to_f64(), -8.0, 1e-15));
        assert!(close(a.pow(2.0).unwrap().to_f64(), 4.0, 1e-15));
        assert!(a.pow(0.5).is_err());
    }
}

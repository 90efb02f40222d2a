//! Complex scalars with a separate power-of-√2 ledger.
//!
//! Rewrites and decompositions multiply in factors of √2 constantly; keeping
//! those in an integer exponent means the floating coefficient stays close
//! to unit magnitude even after hundreds of them.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `e^{ikπ/4}` for `k = 0..8`, written out so that phases which should
/// cancel (`1 + e^{iπ}`) do so exactly.
const EIGHTH_ROOTS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (0.0, 1.0),
    (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    (-1.0, 0.0),
    (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    (0.0, -1.0),
    (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

/// `e^{ikπ/4}` as a plain complex number.
pub fn eighth_root(k: u8) -> Complex64 {
    let (re, im) = EIGHTH_ROOTS[(k & 7) as usize];
    Complex64::new(re, im)
}

/// Value `coeff · (√2)^sqrt2_pow`, or exactly zero.
///
/// A nonzero coefficient is kept with modulus in `[1/2, 2)`; rescaling only
/// ever moves factors of 2 between the coefficient and the exponent, which
/// is exact in binary floating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarC {
    coeff: Complex64,
    sqrt2_pow: i32,
    is_zero: bool,
}

impl Default for ScalarC {
    fn default() -> Self {
        ScalarC::one()
    }
}

impl ScalarC {
    pub fn one() -> Self {
        ScalarC {
            coeff: Complex64::new(1.0, 0.0),
            sqrt2_pow: 0,
            is_zero: false,
        }
    }

    pub fn zero() -> Self {
        ScalarC {
            coeff: Complex64::new(0.0, 0.0),
            sqrt2_pow: 0,
            is_zero: true,
        }
    }

    pub fn new(coeff: Complex64, sqrt2_pow: i32) -> Self {
        let mut s = ScalarC {
            coeff,
            sqrt2_pow,
            is_zero: false,
        };
        s.renormalize();
        s
    }

    pub fn from_complex(c: Complex64) -> Self {
        ScalarC::new(c, 0)
    }

    /// `(√2)^p`.
    pub fn sqrt2_pow(p: i32) -> Self {
        ScalarC::new(Complex64::new(1.0, 0.0), p)
    }

    /// `e^{ikπ/4}`.
    pub fn phase(k: u8) -> Self {
        ScalarC::new(eighth_root(k), 0)
    }

    /// `1 + e^{ikπ/4}`: the value of a legless Z-spider.
    pub fn one_plus_phase(k: u8) -> Self {
        ScalarC::new(Complex64::new(1.0, 0.0) + eighth_root(k), 0)
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn exponent(&self) -> i32 {
        self.sqrt2_pow
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    fn renormalize(&mut self) {
        if self.is_zero {
            return;
        }
        let c = self.coeff;
        if !(c.re.is_finite() && c.im.is_finite()) || (c.re == 0.0 && c.im == 0.0) {
            *self = ScalarC::zero();
            return;
        }
        let mut m = c.norm();
        while m >= 2.0 {
            self.coeff /= 2.0;
            self.sqrt2_pow += 2;
            m /= 2.0;
        }
        while m < 0.5 {
            self.coeff *= 2.0;
            self.sqrt2_pow -= 2;
            m *= 2.0;
        }
    }

    pub fn mul_sqrt2_pow(&mut self, p: i32) {
        if !self.is_zero {
            self.sqrt2_pow += p;
        }
    }

    pub fn mul_phase(&mut self, k: u8) {
        *self *= ScalarC::phase(k);
    }

    /// The plain complex value; may under/overflow for extreme exponents.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero {
            return Complex64::new(0.0, 0.0);
        }
        self.coeff * sqrt2_power_f64(self.sqrt2_pow)
    }

    /// Magnitude in log2, or `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero {
            return f64::NEG_INFINITY;
        }
        self.coeff.norm().log2() + 0.5 * self.sqrt2_pow as f64
    }

    pub fn conj(&self) -> Self {
        ScalarC {
            coeff: self.coeff.conj(),
            ..*self
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero {
            None
        } else {
            Some(ScalarC::new(self.coeff.inv(), -self.sqrt2_pow))
        }
    }

    /// Relative comparison `|a - b| ≤ tol · max(1, |a|, |b|)` done on the
    /// complex values.
    pub fn approx_eq(&self, other: &ScalarC, tol: f64) -> bool {
        let a = self.to_complex();
        let b = other.to_complex();
        let scale = 1.0f64.max(a.norm()).max(b.norm());
        (a - b).norm() <= tol * scale
    }
}

fn sqrt2_power_f64(p: i32) -> f64 {
    let half = p.div_euclid(2);
    let base = 2f64.powi(half);
    if p.rem_euclid(2) == 1 {
        base * std::f64::consts::SQRT_2
    } else {
        base
    }
}

impl Mul for ScalarC {
    type Output = ScalarC;

    fn mul(self, rhs: ScalarC) -> ScalarC {
        if self.is_zero || rhs.is_zero {
            return ScalarC::zero();
        }
        ScalarC::new(self.coeff * rhs.coeff, self.sqrt2_pow + rhs.sqrt2_pow)
    }
}

impl MulAssign for ScalarC {
    fn mul_assign(&mut self, rhs: ScalarC) {
        *self = *self * rhs;
    }
}

impl Add for ScalarC {
    type Output = ScalarC;

    fn add(self, rhs: ScalarC) -> ScalarC {
        if self.is_zero {
            return rhs;
        }
        if rhs.is_zero {
            return self;
        }
        let p = self.sqrt2_pow.max(rhs.sqrt2_pow);
        let a = self.coeff * sqrt2_power_f64(self.sqrt2_pow - p);
        let b = rhs.coeff * sqrt2_power_f64(rhs.sqrt2_pow - p);
        ScalarC::new(a + b, p)
    }
}

impl AddAssign for ScalarC {
    fn add_assign(&mut self, rhs: ScalarC) {
        *self = *self + rhs;
    }
}

impl Neg for ScalarC {
    type Output = ScalarC;

    fn neg(self) -> ScalarC {
        ScalarC {
            coeff: -self.coeff,
            ..self
        }
    }
}

impl Sum for ScalarC {
    fn sum<I: Iterator<Item = ScalarC>>(iter: I) -> ScalarC {
        iter.fold(ScalarC::zero(), |acc, x| acc + x)
    }
}

impl From<Complex64> for ScalarC {
    fn from(c: Complex64) -> Self {
        ScalarC::from_complex(c)
    }
}

impl fmt::Display for ScalarC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "0")
        } else {
            write!(
                f,
                "({:+.12}{:+.12}i)·√2^{}",
                self.coeff.re, self.coeff.im, self.sqrt2_pow
            )
        }
    }
}

//! Exact arithmetic over the Gaussian rationals Q(i).
//!
//! Every coefficient in the exact layer of the crate is a `GaussRat`. Both
//! components are arbitrary-precision rationals kept in canonical reduced
//! form by `num_rational::BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// An element of Q(i), stored as `re + im * i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussRat {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussRat {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    /// `a/b + (c/d) i` from machine integers.
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussRat {
            re: BigRational::new(BigInt::from(a), BigInt::from(b)),
            im: BigRational::new(BigInt::from(c), BigInt::from(d)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True when the value lies in Q (the imaginary part vanishes).
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_positive_rational(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    pub fn is_negative_rational(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }

    /// True when the value is in Z (a rational integer).
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Rational norm `re^2 + im^2`; zero iff the value is zero.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero in Q(i)");
        let n = self.norm();
        GaussRat {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact square root in Q(i), when one exists.
    ///
    /// Solves `(a + bi)^2 = self` over Q; returns `None` when the root is
    /// irrational (which certifies the non-square status exactly).
    pub fn sqrt_exact(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(GaussRat::zero());
        }
        if self.im.is_zero() {
            if self.re.is_positive() {
                let a = rational_sqrt(&self.re)?;
                return Some(GaussRat::new(a, BigRational::zero()));
            } else {
                let b = rational_sqrt(&(-self.re.clone()))?;
                return Some(GaussRat::new(BigRational::zero(), b));
            }
        }
        // z^2 = c with c.im != 0: |z|^2 = sqrt(|c|^2) must be rational, and
        // a^2 = (c.re + |z|^2)/2 must be a rational square.
        let s = rational_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        let a2 = (&self.re + &s) / &two;
        if a2.is_negative() {
            return None;
        }
        let a = rational_sqrt(&a2)?;
        if a.is_zero() {
            return None;
        }
        let b = &self.im / (&two * &a);
        Some(GaussRat::new(a, b))
    }

    /// Is this value a square in Q(i)? Decided exactly.
    pub fn is_square(&self) -> bool {
        self.sqrt_exact().is_some()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let (re, im) = self.to_f64_pair();
        num_complex::Complex64::new(re, im)
    }
}

/// Exact square root of a nonnegative rational, if rational.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // Scale down huge numerator/denominator pairs before conversion so the
    // quotient stays finite whenever the true value is representable.
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let bits_n = r.numer().bits() as i64;
    let bits_d = r.denom().bits() as i64;
    let shift = (bits_n.max(bits_d) - 900).max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}*i", self.re, self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a, 'b> $trait<&'b GaussRat> for &'a GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: &'b GaussRat) -> GaussRat {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: GaussRat) -> GaussRat {
                $trait::$method(&self, &rhs)
            }
        }
        impl<'b> $trait<&'b GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: &'b GaussRat) -> GaussRat {
                $trait::$method(&self, rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| GaussRat::new(&a.re + &b.re, &a.im + &b.im));
binop!(Sub, sub, |a, b| GaussRat::new(&a.re - &b.re, &a.im - &b.im));
binop!(Mul, mul, |a, b| GaussRat::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));
binop!(Div, div, |a, b| a * &b.inv());

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}
impl<'a> Neg for &'a GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}
impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, rhs: &GaussRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, rhs: &GaussRat) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussRat::from_parts(3, 2, 1, 3); // 3/2 + i/3
        let b = GaussRat::from_parts(-1, 1, 2, 1);
        let q = &(&a * &b) / &b;
        assert_eq!(q, a);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn exact_sqrt() {
        // (2+3i)^2 = -5+12i
        let c = GaussRat::from_parts(-5, 1, 12, 1);
        let r = c.sqrt_exact().unwrap();
        assert_eq!(&r * &r, c);
        // i is a square: ((1+i)/sqrt2)^2 -- not rational, so i is NOT a square in Q(i)
        assert!(!GaussRat::i().is_square());
        // -1 is a square: i^2
        assert_eq!(
            GaussRat::from_int(-1).sqrt_exact().unwrap(),
            GaussRat::i()
        );
        assert!(GaussRat::from_frac(9, 4).is_square());
        assert!(!GaussRat::from_frac(2, 1).is_square());
    }
}

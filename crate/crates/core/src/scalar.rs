//! Exact Gaussian-rational scalars.
//!
//! Every coefficient in this crate is an element of `Q(i)`: a pair of
//! arbitrary-precision rationals `re + im*i`. No rounding ever occurs, so
//! scalar equality is decidable and all downstream identity checks are exact.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A Gaussian rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `num/den` as a real rational. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    /// `(re_n/re_d) + (im_n/im_d) i`.
    pub fn gaussian(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        assert!(re_d != 0 && im_d != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(re_n), BigInt::from(re_d)),
            im: BigRational::new(BigInt::from(im_n), BigInt::from(im_d)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Squared modulus `re^2 + im^2`, a non-negative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero; use [`Scalar::try_inv`] when the
    /// input may vanish.
    pub fn inv(&self) -> Self {
        self.try_inv().expect("division by zero scalar")
    }

    pub fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar {
            re: self.re + &rhs.re,
            im: self.im + &rhs.im,
        }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl<'a, 'b> Mul<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'b Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self * &rhs.inv()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rat(r: &BigRational) -> String {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.im.is_zero() {
            write!(f, "{}", rat(&self.re))
        } else if self.re.is_zero() {
            if self.im.is_one() {
                write!(f, "i")
            } else if (-&self.im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{}i", rat(&self.im))
            }
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", rat(&self.re), rat(&-&self.im))
        } else {
            write!(f, "{}+{}i", rat(&self.re), rat(&self.im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-20i64..=20, 1i64..=7, -20i64..=20, 1i64..=7)
            .prop_map(|(a, b, c, d)| Scalar::gaussian(a, b, c, d))
    }

    proptest! {
        #[test]
        fn field_mul_commutes(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn field_distributes(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            let lhs = &a * &(b.clone() + &c);
            let rhs = &a * &b + &(&a * &c);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conj_is_involution(a in arb_scalar()) {
            prop_assert_eq!(a.conj().conj(), a);
        }

        #[test]
        fn conj_is_multiplicative(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        }

        #[test]
        fn inverse_cancels(a in arb_scalar()) {
            prop_assume!(!a.is_zero());
            prop_assert!((&a * &a.inv()).is_one());
        }
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::gaussian(1, 2, -3, 4).to_string(), "1/2-3/4i");
        assert_eq!(Scalar::i().to_string(), "i");
        assert_eq!(Scalar::zero().to_string(), "0");
    }
}

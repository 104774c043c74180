//! Arbitrary-precision rationals in canonical form.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ScalarRing;
use crate::{Error, Result};

/// An exact rational number `p/q` with `gcd(|p|, q) = 1` and `q >= 1`.
///
/// Canonical form is maintained by construction (the backing
/// `BigRational` reduces eagerly), so equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "denominator must be nonzero");
        Rational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn from_big(numerator: BigInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "denominator must be nonzero");
        Rational(BigRational::new(numerator, denominator))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn inverse(&self) -> Option<Rational> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn pow(&self, e: u32) -> Rational {
        Rational(num_traits::pow::pow(self.0.clone(), e as usize))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<'a, 'b> Div<&'b Rational> for &'a Rational {
    type Output = Rational;
    /// Panics on a zero divisor; use [`Rational::checked_div`] when the
    /// divisor is not known to be nonzero.
    fn div(self, rhs: &'b Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `"p"` or `"p/q"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse {
            pos: 0,
            msg: format!("{msg}: {s:?}"),
        };
        match s.split_once('/') {
            None => {
                let n: BigInt = s.parse().map_err(|_| bad("invalid integer"))?;
                Ok(Rational::from_bigint(n))
            }
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad("invalid numerator"))?;
                let q: BigInt = q.trim().parse().map_err(|_| bad("invalid denominator"))?;
                if q.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Rational::from_big(p, q))
            }
        }
    }
}

/// The field ℚ.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct RationalField;

impl ScalarRing for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn one(&self) -> Rational {
        Rational::one()
    }

    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn neg(&self, a: &Rational) -> Rational {
        -a
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }

    fn from_rational(&self, q: &Rational) -> Rational {
        q.clone()
    }

    fn div_rational(&self, a: &Rational, q: &Rational) -> Rational {
        a / q
    }

    fn inverse(&self, a: &Rational) -> Option<Rational> {
        a.inverse()
    }

    fn roots_of_unity(&self, l: u32) -> Vec<Rational> {
        if l % 2 == 0 {
            vec![Rational::one(), Rational::from_integer(-1)]
        } else {
            vec![Rational::one()]
        }
    }

    fn elem_to_json(&self, a: &Rational) -> serde_json::Value {
        serde_json::Value::String(a.to_string())
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Rational> {
        match v {
            serde_json::Value::String(s) => s.parse(),
            serde_json::Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::Invalid(format!("not an exact integer: {n}")))?;
                Ok(Rational::from_integer(i))
            }
            other => Err(Error::Invalid(format!("expected rational, got {other}"))),
        }
    }

    fn format_elem(&self, a: &Rational) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fraction_arithmetic() {
        let a = Rational::new(1, 3);
        let b = Rational::new(1, 6);
        assert_eq!(&a + &b, Rational::new(1, 2));
        assert_eq!(Rational::new(2, 4), Rational::new(1, 2));
        assert_eq!(
            &Rational::new(3, 2) * &Rational::new(5, 2),
            Rational::new(15, 4)
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = Rational::one();
        assert_eq!(a.checked_div(&Rational::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["-7/3", "0", "15/4", "-2"] {
            let q: Rational = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        assert_eq!("4/6".parse::<Rational>().unwrap().to_string(), "2/3");
    }

    #[test]
    fn rational_roots_of_unity() {
        let f = RationalField;
        assert_eq!(f.roots_of_unity(2).len(), 2);
        assert_eq!(f.roots_of_unity(3), vec![Rational::one()]);
    }

    #[test]
    fn divide_multiples_back_out() {
        let f = RationalField;
        let x = Rational::new(7, 9);
        for n in 1..=50i64 {
            let nx = f.mul(&f.integer(n), &x);
            assert_eq!(f.div_rational(&nx, &Rational::from_integer(n)), x);
        }
    }
}

//! Exact coefficient algebras.
//!
//! Every series coefficient in this crate lives in some commutative
//! ℚ-algebra of characteristic zero. The [`ScalarRing`] trait is the
//! contract all of them satisfy; the concrete instances are
//! [`RationalField`], [`PolyRing`] (sparse polynomials over ℚ in at most
//! two indeterminates) and [`CyclotomicField`] (ℚ(ζ_m) in the power
//! basis).

mod cyclotomic;
mod polyutil;
mod qpoly;
mod rational;

pub use cyclotomic::{CycElem, CyclotomicField};
pub use qpoly::{PolyRing, QPoly};
pub use rational::{Rational, RationalField};

pub use cyclotomic::cyclotomic_polynomial;

use crate::Result;

/// A commutative ℚ-algebra with exact arithmetic.
///
/// The ring value itself is a lightweight descriptor (field modulus,
/// polynomial arity, ...); elements are plain data. All operations are
/// exact; `inverse` is total on nonzero elements exactly for the field
/// instances.
pub trait ScalarRing: Clone + PartialEq + std::fmt::Debug {
    type Elem: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Embeds a rational number.
    fn from_rational(&self, q: &Rational) -> Self::Elem;
    /// Exact division by a nonzero rational.
    ///
    /// Panics if `q` is zero; callers must check the divisor first.
    fn div_rational(&self, a: &Self::Elem, q: &Rational) -> Self::Elem;
    /// Multiplicative inverse, when one exists in the ring.
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// All solutions of `z^l = 1` in the ring.
    fn roots_of_unity(&self, l: u32) -> Vec<Self::Elem>;
    fn elem_to_json(&self, a: &Self::Elem) -> serde_json::Value;
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Self::Elem>;
    /// Human-readable form used by text reports.
    fn format_elem(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn integer(&self, n: i64) -> Self::Elem {
        self.from_rational(&Rational::from_integer(n))
    }

    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// A root of unity of multiplicative order exactly `l`, if the ring
    /// contains one.
    fn primitive_root_of_unity(&self, l: u32) -> Option<Self::Elem> {
        self.roots_of_unity(l)
            .into_iter()
            .find(|c| (1..l).all(|k| !self.is_one(&self.pow(c, k as u64))))
    }
}

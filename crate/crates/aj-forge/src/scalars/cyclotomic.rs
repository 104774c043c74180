//! The cyclotomic fields ℚ(ζ_m) in the power basis `1, ζ, …, ζ^{φ(m)−1}`
//! modulo the m-th cyclotomic polynomial. Reduction happens after every
//! multiplication; inversion goes through the extended Euclidean
//! algorithm in ℚ[z].

use std::fmt;

use super::polyutil::{self, Poly};
use super::qpoly::QPoly;
use super::{Rational, ScalarRing};
use crate::{Error, Result};

/// The m-th cyclotomic polynomial Φ_m (dense, monic).
///
/// Computed by exact division: Φ_m = (z^m − 1) / Π_{d|m, d<m} Φ_d.
fn cyclotomic_dense(m: u32) -> Poly {
    assert!(m >= 1);
    // z^m - 1
    let mut num = vec![Rational::zero(); m as usize + 1];
    num[0] = Rational::from_integer(-1);
    num[m as usize] = Rational::one();
    let mut den: Poly = vec![Rational::one()];
    for d in 1..m {
        if m % d == 0 {
            den = polyutil::mul(&den, &cyclotomic_dense(d));
        }
    }
    let (q, r) = polyutil::divrem(&num, &den);
    debug_assert!(r.is_empty());
    q
}

/// The m-th cyclotomic polynomial as a univariate sparse polynomial.
pub fn cyclotomic_polynomial(m: u32) -> QPoly {
    let dense = cyclotomic_dense(m);
    let mut p = QPoly::zero(1);
    for (i, c) in dense.into_iter().enumerate() {
        p = p.add(&QPoly::monomial(1, [i as u32, 0], c));
    }
    p
}

/// An element of ℚ(ζ_m): coordinates in the power basis, always of
/// length φ(m) for the field that created it.
#[derive(Clone, PartialEq, Eq)]
pub struct CycElem {
    pub coords: Vec<Rational>,
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// ℚ(ζ_m), represented by its modulus Φ_m.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclotomicField {
    m: u32,
    modulus: Poly,
}

impl CyclotomicField {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1);
        CyclotomicField {
            m,
            modulus: cyclotomic_dense(m),
        }
    }

    pub fn modulus_m(&self) -> u32 {
        self.m
    }

    /// φ(m), the dimension over ℚ.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn from_poly(&self, p: &Poly) -> CycElem {
        let (_, mut r) = polyutil::divrem(p, &self.modulus);
        r.resize(self.degree(), Rational::zero());
        CycElem { coords: r }
    }

    /// ζ_m itself.
    pub fn zeta(&self) -> CycElem {
        let z = vec![Rational::zero(), Rational::one()];
        self.from_poly(&z)
    }

    fn elem_poly(a: &CycElem) -> Poly {
        polyutil::trim(a.coords.clone())
    }

    /// Every root of unity in the field: the cyclic group generated by
    /// −ζ (odd m) or ζ (even m).
    pub fn all_roots_of_unity(&self) -> Vec<CycElem> {
        let gen = if self.m % 2 == 0 {
            self.zeta()
        } else {
            self.neg(&self.zeta())
        };
        let order = if self.m % 2 == 0 { self.m } else { 2 * self.m };
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = self.one();
        for _ in 0..order {
            out.push(cur.clone());
            cur = self.mul(&cur, &gen);
        }
        debug_assert!(self.is_one(&cur));
        out
    }
}

impl ScalarRing for CyclotomicField {
    type Elem = CycElem;

    fn zero(&self) -> CycElem {
        CycElem {
            coords: vec![Rational::zero(); self.degree()],
        }
    }

    fn one(&self) -> CycElem {
        let mut e = self.zero();
        e.coords[0] = Rational::one();
        e
    }

    fn is_zero(&self, a: &CycElem) -> bool {
        a.coords.iter().all(Rational::is_zero)
    }

    fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        CycElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    fn neg(&self, a: &CycElem) -> CycElem {
        CycElem {
            coords: a.coords.iter().map(|x| -x).collect(),
        }
    }

    fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let p = polyutil::mul(&Self::elem_poly(a), &Self::elem_poly(b));
        self.from_poly(&p)
    }

    fn from_rational(&self, q: &Rational) -> CycElem {
        let mut e = self.zero();
        e.coords[0] = q.clone();
        e
    }

    fn div_rational(&self, a: &CycElem, q: &Rational) -> CycElem {
        let inv = q.inverse().expect("division by zero");
        CycElem {
            coords: a.coords.iter().map(|x| x * &inv).collect(),
        }
    }

    fn inverse(&self, a: &CycElem) -> Option<CycElem> {
        if self.is_zero(a) {
            return None;
        }
        // phi_m is irreducible over q, so gcd(a, phi_m) = 1 and the
        // bezout coefficient of a is the inverse
        let (g, u, _) = polyutil::ext_gcd(&Self::elem_poly(a), &self.modulus);
        debug_assert_eq!(g, vec![Rational::one()]);
        Some(self.from_poly(&u))
    }

    fn roots_of_unity(&self, l: u32) -> Vec<CycElem> {
        self.all_roots_of_unity()
            .into_iter()
            .filter(|z| self.is_one(&self.pow(z, l as u64)))
            .collect()
    }

    fn elem_to_json(&self, a: &CycElem) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "coords": a.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<CycElem> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Invalid("expected {m, coords} object".into()))?;
        let m = obj
            .get("m")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Invalid("missing field modulus m".into()))?;
        if m != self.m as u64 {
            return Err(Error::Invalid(format!(
                "element lives in Q(zeta_{m}), active field is Q(zeta_{})",
                self.m
            )));
        }
        let coords = obj
            .get("coords")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Invalid("missing coords".into()))?;
        if coords.len() != self.degree() {
            return Err(Error::Invalid(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        let coords = coords
            .iter()
            .map(|c| super::RationalField.elem_from_json(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycElem { coords })
    }

    fn format_elem(&self, a: &CycElem) -> String {
        format!("{a:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        let z = QPoly::var(1, 0);
        let one = QPoly::constant(1, Rational::one());
        assert_eq!(cyclotomic_polynomial(1), z.sub(&one));
        assert_eq!(cyclotomic_polynomial(2), z.add(&one));
        assert_eq!(cyclotomic_polynomial(4), z.mul(&z).add(&one));
        // phi_6 = z^2 - z + 1
        assert_eq!(cyclotomic_polynomial(6), z.mul(&z).sub(&z).add(&one));
        // phi_12 = z^4 - z^2 + 1
        let z2 = z.mul(&z);
        assert_eq!(
            cyclotomic_polynomial(12),
            z2.mul(&z2).sub(&z2).add(&one)
        );
    }

    #[test]
    fn zeta_is_primitive() {
        for m in 1..=12u32 {
            let f = CyclotomicField::new(m);
            let z = f.zeta();
            assert!(f.is_one(&f.pow(&z, m as u64)), "zeta_{m}^{m} != 1");
            for k in 1..m {
                assert!(!f.is_one(&f.pow(&z, k as u64)), "zeta_{m}^{k} == 1");
            }
        }
    }

    #[test]
    fn field_inverses() {
        let f = CyclotomicField::new(5);
        let a = f.add(&f.zeta(), &f.integer(3));
        let inv = f.inverse(&a).unwrap();
        assert!(f.is_one(&f.mul(&a, &inv)));
        assert_eq!(f.inverse(&f.zero()), None);
    }

    #[test]
    fn roots_of_unity_counts() {
        // in q(zeta_l) the equation z^l = 1 has exactly l solutions
        for l in 1..=10u32 {
            let f = CyclotomicField::new(l);
            let roots = f.roots_of_unity(l);
            assert_eq!(roots.len(), l as usize, "l = {l}");
            // closed under multiplication
            for a in &roots {
                for b in &roots {
                    assert!(roots.contains(&f.mul(a, b)));
                }
            }
        }
        // over q(zeta_3): z^3 = 1 has the three powers of zeta
        let f = CyclotomicField::new(3);
        let roots = f.roots_of_unity(3);
        assert!(roots.contains(&f.one()));
        assert!(roots.contains(&f.zeta()));
        assert!(roots.contains(&f.mul(&f.zeta(), &f.zeta())));
    }

    #[test]
    fn primitive_root_lookup() {
        let f = CyclotomicField::new(4);
        let i = f.primitive_root_of_unity(4).unwrap();
        assert!(f.is_one(&f.pow(&i, 4)));
        assert!(!f.is_one(&f.pow(&i, 2)));
        // no primitive cube root in q(zeta_4)
        assert!(f.primitive_root_of_unity(3).is_none());
        assert!(super::super::RationalField.primitive_root_of_unity(2).is_some());
    }

    #[test]
    fn json_round_trip() {
        let f = CyclotomicField::new(8);
        let a = f.add(&f.zeta(), &f.from_rational(&Rational::new(-3, 7)));
        let v = f.elem_to_json(&a);
        assert_eq!(f.elem_from_json(&v).unwrap(), a);
    }
}

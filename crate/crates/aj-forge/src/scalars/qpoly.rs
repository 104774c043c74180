//! Sparse polynomials over ℚ in at most two indeterminates.
//!
//! Two slots are enough for everything the solvers need symbolically:
//! the universal polynomials `Q(y, t)` and the flow checks in
//! `ℚ[t₁, t₂]`. Zero coefficients are never stored, so equality is
//! structural.

use std::collections::BTreeMap;
use std::fmt;

use super::{Rational, ScalarRing};
use crate::{Error, Result};

pub const MAX_ARITY: usize = 2;

/// Exponent vector; the unused slot stays zero for univariate polynomials.
type Exp = [u32; MAX_ARITY];

#[derive(Clone, PartialEq, Eq)]
pub struct QPoly {
    arity: usize,
    terms: BTreeMap<Exp, Rational>,
}

impl QPoly {
    pub fn zero(arity: usize) -> Self {
        assert!(arity >= 1 && arity <= MAX_ARITY);
        QPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = QPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert([0, 0], c);
        }
        p
    }

    /// The indeterminate with index `var` (0-based).
    pub fn var(arity: usize, var: usize) -> Self {
        assert!(var < arity);
        let mut exp = [0u32; MAX_ARITY];
        exp[var] = 1;
        let mut p = QPoly::zero(arity);
        p.terms.insert(exp, Rational::one());
        p
    }

    pub fn monomial(arity: usize, exp: [u32; MAX_ARITY], c: Rational) -> Self {
        let mut p = QPoly::zero(arity);
        if exp[arity..].iter().any(|&e| e != 0) {
            panic!("exponent in unused slot");
        }
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0, 0])
    }

    pub fn coeff(&self, exp: Exp) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Rational)> {
        self.terms.iter()
    }

    pub fn check_same_arity(&self, other: &QPoly) -> Result<()> {
        if self.arity != other.arity {
            Err(Error::ArityMismatch(self.arity, other.arity))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(*e).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        QPoly {
            arity: self.arity,
            terms,
        }
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut terms: BTreeMap<Exp, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1]];
                let entry = terms.entry(e).or_insert_with(Rational::zero);
                *entry += &(ca * cb);
                if entry.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        QPoly {
            arity: self.arity,
            terms,
        }
    }

    pub fn scale(&self, c: &Rational) -> QPoly {
        if c.is_zero() {
            return QPoly::zero(self.arity);
        }
        QPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, q)| (*e, q * c)).collect(),
        }
    }

    pub fn div_rational(&self, c: &Rational) -> QPoly {
        assert!(!c.is_zero(), "division by zero");
        self.scale(&c.inverse().unwrap())
    }

    /// Substitutes `images[i]` for variable `i`; all images must share
    /// `target_arity`. This covers both composition in one variable and
    /// relabelling into a different arity.
    pub fn map_vars(&self, target_arity: usize, images: &[QPoly]) -> QPoly {
        assert_eq!(images.len(), self.arity);
        assert!(images.iter().all(|p| p.arity == target_arity));
        let mut acc = QPoly::zero(target_arity);
        for (e, c) in &self.terms {
            let mut term = QPoly::constant(target_arity, c.clone());
            for (i, image) in images.iter().enumerate() {
                for _ in 0..e[i] {
                    term = term.mul(image);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Evaluates at rational points (`values.len()` must equal the arity).
    pub fn eval(&self, values: &[Rational]) -> Rational {
        assert_eq!(values.len(), self.arity);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in values.iter().enumerate() {
                t *= &v.pow(e[i]);
            }
            acc += &t;
        }
        acc
    }

    /// Evaluates with the variables sent to elements of an arbitrary
    /// scalar ring.
    pub fn eval_in<R: ScalarRing>(&self, ring: &R, values: &[R::Elem]) -> R::Elem {
        assert_eq!(values.len(), self.arity);
        let mut acc = ring.zero();
        for (e, c) in &self.terms {
            let mut t = ring.from_rational(c);
            for (i, v) in values.iter().enumerate() {
                t = ring.mul(&t, &ring.pow(v, e[i] as u64));
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e[0] + e[1])
            .max()
            .unwrap_or(0)
    }

    /// Degree in one variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn format_with(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.arity);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // highest total degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse((e[0] + e[1], e[0])));
        for (i, (e, c)) in terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars: Vec<String> = (0..self.arity)
                .filter(|&j| e[j] > 0)
                .map(|j| {
                    if e[j] == 1 {
                        names[j].to_string()
                    } else {
                        format!("{}^{}", names[j], e[j])
                    }
                })
                .collect();
            if vars.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = if self.arity == 1 { &["t"] } else { &["y", "t"] };
        write!(f, "{}", self.format_with(names))
    }
}

/// The polynomial ring ℚ[t] or ℚ[y, t] as a scalar algebra.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PolyRing {
    pub arity: usize,
}

impl PolyRing {
    pub fn univariate() -> Self {
        PolyRing { arity: 1 }
    }

    pub fn bivariate() -> Self {
        PolyRing { arity: 2 }
    }
}

impl ScalarRing for PolyRing {
    type Elem = QPoly;

    fn zero(&self) -> QPoly {
        QPoly::zero(self.arity)
    }

    fn one(&self) -> QPoly {
        QPoly::constant(self.arity, Rational::one())
    }

    fn is_zero(&self, a: &QPoly) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a.add(b)
    }

    fn neg(&self, a: &QPoly) -> QPoly {
        a.neg()
    }

    fn mul(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a.mul(b)
    }

    fn from_rational(&self, q: &Rational) -> QPoly {
        QPoly::constant(self.arity, q.clone())
    }

    fn div_rational(&self, a: &QPoly, q: &Rational) -> QPoly {
        a.div_rational(q)
    }

    fn inverse(&self, a: &QPoly) -> Option<QPoly> {
        // only nonzero constants are units in q[t1,...,tn]
        if a.is_constant() && !a.is_zero() {
            Some(QPoly::constant(
                self.arity,
                a.coeff([0, 0]).inverse().unwrap(),
            ))
        } else {
            None
        }
    }

    fn roots_of_unity(&self, l: u32) -> Vec<QPoly> {
        let mut out = vec![self.one()];
        if l % 2 == 0 {
            out.push(QPoly::constant(self.arity, Rational::from_integer(-1)));
        }
        out
    }

    fn elem_to_json(&self, a: &QPoly) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = a
            .terms()
            .map(|(e, c)| {
                serde_json::json!([
                    e[..self.arity].iter().collect::<Vec<_>>(),
                    c.to_string()
                ])
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<QPoly> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Invalid("expected polynomial term list".into()))?;
        let mut p = QPoly::zero(self.arity);
        for row in rows {
            let pair = row
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Invalid("expected [exponents, coeff] pair".into()))?;
            let exps = pair[0]
                .as_array()
                .ok_or_else(|| Error::Invalid("expected exponent vector".into()))?;
            if exps.len() != self.arity {
                return Err(Error::ArityMismatch(exps.len(), self.arity));
            }
            let mut e = [0u32; MAX_ARITY];
            for (i, x) in exps.iter().enumerate() {
                e[i] = x
                    .as_u64()
                    .ok_or_else(|| Error::Invalid("exponents must be non-negative".into()))?
                    as u32;
            }
            let c = RationalFieldJson::coeff(&pair[1])?;
            p = p.add(&QPoly::monomial(self.arity, e, c));
        }
        Ok(p)
    }

    fn format_elem(&self, a: &QPoly) -> String {
        let names: &[&str] = if self.arity == 1 { &["t"] } else { &["y", "t"] };
        a.format_with(names)
    }
}

struct RationalFieldJson;

impl RationalFieldJson {
    fn coeff(v: &serde_json::Value) -> Result<Rational> {
        use super::RationalField;
        RationalField.elem_from_json(v)
    }
}

//! The ring of truncated formal power series over a scalar algebra,
//! together with the substitution groups sitting inside it.
//!
//! A value represents `c_0 + c_1 x + ... + c_M x^M` where `M` is the
//! truncation bound: either the ring modulus `s` of `k[[x]]_s`
//! (arithmetic mod `x^{s+1}`) or a working precision `N` standing in
//! for the untruncated ring. Every algorithm in this crate is a
//! prefix-stable recurrence, so computing the untruncated case at
//! finite working precision is semantically faithful: raising `N` never
//! changes already-computed coefficients.

use std::fmt;

use crate::comb::{self, Selector};
use crate::scalars::{Rational, ScalarRing};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Truncation {
    /// The ring k[[x]]_s.
    Finite(usize),
    /// k[[x]] computed to a working precision of N coefficients.
    Infinite(usize),
}

impl Truncation {
    /// Highest stored exponent (s or N).
    pub fn bound(&self) -> usize {
        match *self {
            Truncation::Finite(m) | Truncation::Infinite(m) => m,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Truncation::Finite(_))
    }

    pub fn with_bound(&self, m: usize) -> Truncation {
        match self {
            Truncation::Finite(_) => Truncation::Finite(m),
            Truncation::Infinite(_) => Truncation::Infinite(m),
        }
    }
}

/// A truncated formal power series with dense coefficient storage
/// `c_0 ..= c_M`.
#[derive(Clone, PartialEq)]
pub struct Series<R: ScalarRing> {
    ring: R,
    trunc: Truncation,
    coeffs: Vec<R::Elem>,
}

impl<R: ScalarRing> Series<R> {
    pub fn new(ring: R, trunc: Truncation, mut coeffs: Vec<R::Elem>) -> Self {
        coeffs.resize(trunc.bound() + 1, ring.zero());
        Series {
            ring,
            trunc,
            coeffs,
        }
    }

    pub fn zero(ring: R, trunc: Truncation) -> Self {
        Series::new(ring, trunc, Vec::new())
    }

    pub fn one(ring: R, trunc: Truncation) -> Self {
        let one = ring.one();
        Series::new(ring, trunc, vec![one])
    }

    /// The identity of substitution, `x`.
    pub fn identity(ring: R, trunc: Truncation) -> Self {
        let mono = Series::monomial(ring, trunc, 1);
        mono
    }

    /// `x^k` (zero if k exceeds the bound).
    pub fn monomial(ring: R, trunc: Truncation, k: usize) -> Self {
        let mut s = Series::zero(ring, trunc);
        if k <= trunc.bound() {
            s.coeffs[k] = s.ring.one();
        }
        s
    }

    /// The linear series `L_c = c x`.
    pub fn linear(ring: R, trunc: Truncation, c: R::Elem) -> Self {
        let mut s = Series::zero(ring, trunc);
        if trunc.bound() >= 1 {
            s.coeffs[1] = c;
        }
        s
    }

    pub fn from_rationals(ring: R, trunc: Truncation, coeffs: &[Rational]) -> Self {
        let elems = coeffs.iter().map(|q| ring.from_rational(q)).collect();
        Series::new(ring, trunc, elems)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// Highest stored exponent M.
    pub fn bound(&self) -> usize {
        self.trunc.bound()
    }

    pub fn coeff(&self, j: usize) -> &R::Elem {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, j: usize, c: R::Elem) {
        self.coeffs[j] = c;
    }

    /// Least exponent with nonzero coefficient; `None` encodes the
    /// order of the zero series (min of the empty set).
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.ring.is_zero(c))
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }

    fn check_compatible(&self, other: &Series<R>) -> Result<()> {
        if self.trunc != other.trunc || self.ring != other.ring {
            Err(Error::TruncationMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Series<R>) -> Result<Series<R>> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Ok(Series {
            ring: self.ring.clone(),
            trunc: self.trunc,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Series<R>) -> Result<Series<R>> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series<R> {
        Series {
            ring: self.ring.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| self.ring.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Series<R> {
        Series {
            ring: self.ring.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Series<R>) -> Result<Series<R>> {
        self.check_compatible(other)?;
        let m = self.bound();
        let mut coeffs = vec![self.ring.zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > m {
                    break;
                }
                coeffs[i + j] = self.ring.add(&coeffs[i + j], &self.ring.mul(a, b));
            }
        }
        Ok(Series {
            ring: self.ring.clone(),
            trunc: self.trunc,
            coeffs,
        })
    }

    /// Termwise derivative. The bound is kept, so the top coefficient
    /// of the result is only meaningful when the input's top
    /// coefficient was; callers working mod x^{s+1} should read the
    /// result mod x^s.
    pub fn derivative(&self) -> Series<R> {
        let m = self.bound();
        let mut coeffs = vec![self.ring.zero(); m + 1];
        for k in 0..m {
            coeffs[k] = self
                .ring
                .mul(&self.ring.integer((k + 1) as i64), &self.coeffs[k + 1]);
        }
        Series {
            ring: self.ring.clone(),
            trunc: self.trunc,
            coeffs,
        }
    }

    /// Substitution `f ∘ g`, Horner-style: `c_0 + g·(c_1 + g·(c_2 + …))`.
    pub fn compose(&self, g: &Series<R>) -> Result<Series<R>> {
        self.check_compatible(g)?;
        if !matches!(g.order(), Some(o) if o >= 1) {
            return Err(Error::OrderViolation);
        }
        let m = self.bound();
        let mut acc = Series::zero(self.ring.clone(), self.trunc);
        for j in (0..=m).rev() {
            acc = acc.mul(g)?;
            acc.coeffs[0] = self.ring.add(&acc.coeffs[0], &self.coeffs[j]);
        }
        Ok(acc)
    }

    /// Substitution computed coefficientwise from the multinomial
    /// expansion over the index families; independent of [`compose`]
    /// and kept solely as a cross-validation oracle.
    pub fn compose_via_multinomial(&self, g: &Series<R>) -> Result<Series<R>> {
        self.check_compatible(g)?;
        if !matches!(g.order(), Some(o) if o >= 1) {
            return Err(Error::OrderViolation);
        }
        let r = &self.ring;
        let m = self.bound();
        let mut out = Series::zero(r.clone(), self.trunc);
        out.coeffs[0] = self.coeffs[0].clone();
        for n in 1..=m {
            let mut dn = r.zero();
            for i in 1..=n {
                let ai = &self.coeffs[i];
                if r.is_zero(ai) {
                    continue;
                }
                let mut inner = r.zero();
                for v in comb::enumerate(n as u32, i as u32, Selector::Full).iter() {
                    let mut term = r.from_rational(&Rational::from_bigint(v.weight.clone()));
                    for j in 1..=n {
                        let u = v.u(j as u32);
                        if u > 0 {
                            term = r.mul(&term, &r.pow(&g.coeffs[j], u as u64));
                        }
                    }
                    inner = r.add(&inner, &term);
                }
                dn = r.add(&dn, &r.mul(ai, &inner));
            }
            out.coeffs[n] = dn;
        }
        Ok(out)
    }

    /// Multiplicative inverse: solves `f · g = 1` triangularly.
    pub fn reciprocal(&self) -> Result<Series<R>> {
        let r = &self.ring;
        let c0_inv = r
            .inverse(&self.coeffs[0])
            .ok_or(Error::NonInvertibleConstant)?;
        let m = self.bound();
        let mut g = vec![r.zero(); m + 1];
        g[0] = c0_inv.clone();
        for n in 1..=m {
            let mut acc = r.zero();
            for k in 1..=n {
                acc = r.add(&acc, &r.mul(&self.coeffs[k], &g[n - k]));
            }
            g[n] = r.neg(&r.mul(&c0_inv, &acc));
        }
        Ok(Series {
            ring: r.clone(),
            trunc: self.trunc,
            coeffs: g,
        })
    }

    /// Inverse under substitution; requires a Γ element (c₀ = 0, c₁
    /// invertible). Solves `f ∘ g = x` degree by degree.
    pub fn compositional_inverse(&self) -> Result<Series<R>> {
        let r = &self.ring;
        if !r.is_zero(&self.coeffs[0]) {
            return Err(Error::NonzeroConstantTerm);
        }
        let c1_inv = r
            .inverse(&self.coeffs[1])
            .ok_or(Error::NonInvertibleLinear)?;
        let m = self.bound();
        let mut g = Series::zero(r.clone(), self.trunc);
        if m >= 1 {
            g.coeffs[1] = c1_inv.clone();
        }
        for n in 2..=m {
            // with g known below degree n, the x^n coefficient of f∘g is
            // c1·g_n + e_n where e_n doesn't involve g_n
            let e = self.compose(&g)?.coeffs[n].clone();
            g.coeffs[n] = r.neg(&r.mul(&c1_inv, &e));
        }
        Ok(g)
    }

    /// The projection π onto a smaller bound (prefix copy).
    pub fn project(&self, target: usize) -> Result<Series<R>> {
        if target > self.bound() {
            return Err(Error::ProjectionRange {
                target,
                current: self.bound(),
            });
        }
        Ok(Series {
            ring: self.ring.clone(),
            trunc: self.trunc.with_bound(target),
            coeffs: self.coeffs[..=target].to_vec(),
        })
    }

    /// Re-embeds into a larger bound, padding with zeros. This is only
    /// meaningful under infinite truncation (where the value is a
    /// prefix of a well-defined untruncated series); finite rings have
    /// no canonical section, so the caller must know what it is doing.
    pub fn extend(&self, target: usize) -> Series<R> {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(target + 1, self.ring.zero());
        Series {
            ring: self.ring.clone(),
            trunc: self.trunc.with_bound(target),
            coeffs,
        }
    }

    /// Validates membership in Γ: ord = 1 with invertible c₁.
    pub fn check_gamma(&self) -> Result<()> {
        if !self.ring.is_zero(&self.coeffs[0]) {
            return Err(Error::NonzeroConstantTerm);
        }
        if self.bound() < 1 || self.ring.inverse(&self.coeffs[1]).is_none() {
            return Err(Error::NonInvertibleLinear);
        }
        Ok(())
    }

    /// Validates membership in Γ₁: additionally c₁ = 1.
    pub fn check_gamma1(&self) -> Result<()> {
        self.check_gamma()?;
        if !self.ring.is_one(&self.coeffs[1]) {
            return Err(Error::NonInvertibleLinear);
        }
        Ok(())
    }

    /// Structural semicanonical test: c_j = 0 for every j ≢ 1 mod l.
    pub fn is_semicanonical(&self, l: u32) -> bool {
        self.coeffs.iter().enumerate().skip(1).all(|(j, c)| {
            j as u32 % l == 1 % l || self.ring.is_zero(c)
        })
    }

    /// Semicanonical test by the defining commutation property:
    /// `f ∘ L_c = L_c ∘ f` for a primitive l-th root of unity c. Errors
    /// when the active scalar algebra has no such root.
    pub fn is_semicanonical_by_commutation(&self, l: u32) -> Result<bool> {
        let c = self
            .ring
            .primitive_root_of_unity(l)
            .ok_or(Error::NoPrimitiveRoot(l))?;
        let lc = Series::linear(self.ring.clone(), self.trunc, c);
        Ok(self.compose(&lc)? == lc.compose(self)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let trunc = match self.trunc {
            Truncation::Finite(s) => serde_json::json!({ "finite": s }),
            Truncation::Infinite(n) => serde_json::json!({ "infinite": n }),
        };
        serde_json::json!({
            "truncation": trunc,
            "coeffs": self
                .coeffs
                .iter()
                .map(|c| self.ring.elem_to_json(c))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(ring: R, v: &serde_json::Value) -> Result<Series<R>> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Invalid("expected series object".into()))?;
        let t = obj
            .get("truncation")
            .and_then(|t| t.as_object())
            .ok_or_else(|| Error::Invalid("missing truncation".into()))?;
        let trunc = if let Some(s) = t.get("finite").and_then(|x| x.as_u64()) {
            Truncation::Finite(s as usize)
        } else if let Some(n) = t.get("infinite").and_then(|x| x.as_u64()) {
            Truncation::Infinite(n as usize)
        } else {
            return Err(Error::Invalid("truncation must be finite or infinite".into()));
        };
        let coeffs = obj
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Invalid("missing coeffs".into()))?
            .iter()
            .map(|c| ring.elem_from_json(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Series::new(ring, trunc, coeffs))
    }

    /// Canonical text form in the series literal grammar; round-trips
    /// exactly through [`parse_series`] when all coefficients are
    /// rational images.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            let lit = self.ring.format_elem(c);
            let (sign, mag) = match lit.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", lit),
            };
            if out.is_empty() {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            let is_one = mag == "1";
            match j {
                0 => out.push_str(&mag),
                _ => {
                    if !is_one {
                        out.push_str(&mag);
                        out.push('*');
                    }
                    out.push('x');
                    if j > 1 {
                        out.push_str(&format!("^{j}"));
                    }
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl<R: ScalarRing> fmt::Debug for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())?;
        match self.trunc {
            Truncation::Finite(s) => write!(f, " (mod x^{})", s + 1),
            Truncation::Infinite(n) => write!(f, " (+ O(x^{}))", n + 1),
        }
    }
}

/// Parses a series literal: `term (('+'|'-') term)*` with
/// `term := rational | rational '*'? 'x' ('^' uint)? | 'x' ('^' uint)?`,
/// whitespace-insensitive. Exponents above the bound are reduced away
/// (the ring works mod x^{bound+1}).
pub fn parse_series<R: ScalarRing>(ring: R, trunc: Truncation, text: &str) -> Result<Series<R>> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut series = Series::zero(ring.clone(), trunc);
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let err = |pos: usize, msg: &str| Error::Parse {
        pos,
        msg: msg.to_string(),
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(err(pos, "empty series literal"));
    }
    let mut first = true;
    while pos < bytes.len() {
        // sign
        let mut negative = false;
        skip_ws(&mut pos);
        match bytes.get(pos) {
            Some(b'+') => pos += 1,
            Some(b'-') => {
                negative = true;
                pos += 1;
            }
            _ if first => {}
            _ => return Err(err(pos, "expected '+' or '-' between terms")),
        }
        first = false;
        skip_ws(&mut pos);

        // optional rational literal
        let start = pos;
        while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'/') {
            pos += 1;
        }
        let mut coeff = if pos > start {
            let lit = std::str::from_utf8(&bytes[start..pos]).unwrap();
            lit.parse::<Rational>().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { pos: start, msg },
                other => other,
            })?
        } else {
            Rational::one()
        };
        let saw_coeff = pos > start;
        skip_ws(&mut pos);
        if bytes.get(pos) == Some(&b'*') {
            if !saw_coeff {
                return Err(err(pos, "'*' without coefficient"));
            }
            pos += 1;
            skip_ws(&mut pos);
        }

        // optional x power
        let mut exponent = 0usize;
        let saw_x = bytes.get(pos) == Some(&b'x');
        if saw_x {
            pos += 1;
            exponent = 1;
            skip_ws(&mut pos);
            if bytes.get(pos) == Some(&b'^') {
                pos += 1;
                skip_ws(&mut pos);
                let dstart = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == dstart {
                    return Err(err(pos, "expected exponent after '^'"));
                }
                exponent = std::str::from_utf8(&bytes[dstart..pos])
                    .unwrap()
                    .parse::<usize>()
                    .map_err(|_| err(dstart, "exponent out of range"))?;
            }
        }
        if !saw_coeff && !saw_x {
            return Err(err(pos, "expected term"));
        }
        if negative {
            coeff = -coeff;
        }
        if exponent <= series.bound() {
            let old = series.coeff(exponent).clone();
            let add = ring.from_rational(&coeff);
            series.set_coeff(exponent, ring.add(&old, &add));
        }
        skip_ws(&mut pos);
    }
    Ok(series)
}

//! Dense univariate polynomial helpers over ℚ, used by the cyclotomic
//! field construction (minimal-polynomial division and inversion via the
//! extended Euclidean algorithm).
//!
//! A polynomial is a coefficient vector `c[0] + c[1] z + ...` with no
//! trailing zeros (the zero polynomial is the empty vector).

use super::Rational;

pub type Poly = Vec<Rational>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
    p
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += &(ca * cb);
        }
    }
    trim(out)
}

pub fn sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize(b.len(), Rational::zero());
    }
    for (i, cb) in b.iter().enumerate() {
        out[i] -= cb;
    }
    trim(out)
}

pub fn scale(a: &Poly, c: &Rational) -> Poly {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|x| x * c).collect()
}

/// Euclidean division: returns `(quotient, remainder)` with
/// `deg r < deg b`. Panics if `b` is zero.
pub fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let db = b.len() - 1;
    let lead_inv = b[db].inverse().expect("leading coefficient is nonzero");
    let mut r = a.clone();
    let mut q = vec![Rational::zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] * &lead_inv;
        let shift = dr - db;
        for (i, cb) in b.iter().enumerate() {
            r[shift + i] -= &(&factor * cb);
        }
        q[shift] = factor;
        r = trim(r);
    }
    (trim(q), r)
}

/// Extended gcd: returns `(g, u, v)` with `u a + v b = g` and `g` monic
/// (or zero when both inputs are zero).
pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut u0: Poly = vec![Rational::one()];
    let mut u1: Poly = Vec::new();
    let mut v0: Poly = Vec::new();
    let mut v1: Poly = vec![Rational::one()];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let u = sub(&u0, &mul(&q, &u1));
        let v = sub(&v0, &mul(&q, &v1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u;
        v0 = v1;
        v1 = v;
    }
    if let Some(lead) = r0.last().cloned() {
        let inv = lead.inverse().unwrap();
        r0 = scale(&r0, &inv);
        u0 = scale(&u0, &inv);
        v0 = scale(&v0, &inv);
    }
    (r0, u0, v0)
}

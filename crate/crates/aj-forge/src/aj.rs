//! The solver engine for `(H ∘ Φ)(x) = Φ'(x) · H(x)` in `k[[x]]_s`:
//! residual verification, the coefficient system, conjugation of
//! generators, normal forms `(T, δ)`, and the solution-family
//! constructors for every `(l, s)` regime.
//!
//! Throughout, a generator is normalized to
//! `H = x^{l+1} + Σ_{j≥l+2} h_j x^j` and `l = ord(H) − 1`. The linear
//! coefficient of a solution is constrained to `c₁^{l+1} = c₁`, i.e.
//! `c₁ ∈ E_l` for `l ≥ 1` and `c₁ ∈ k*` for `l = 0`.

use std::collections::{BTreeMap, BTreeSet};

use crate::comb::{self, Selector};
use crate::scalars::{QPoly, Rational, ScalarRing};
use crate::series::{Series, Truncation};
use crate::{Error, Result};

/// A normalized generator: `ord(H) = l + 1` and `h_{l+1} = 1`.
#[derive(Clone, PartialEq, Debug)]
pub struct Generator<R: ScalarRing> {
    h: Series<R>,
    l: u32,
}

impl<R: ScalarRing> Generator<R> {
    pub fn series(&self) -> &Series<R> {
        &self.h
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn ring(&self) -> &R {
        self.h.ring()
    }

    pub fn truncation(&self) -> Truncation {
        self.h.truncation()
    }
}

/// Divides out the leading coefficient `h_{l+1}` (the equations for `H`
/// and `H/h_{l+1}` have the same solutions) and records `l`.
pub fn normalize_generator<R: ScalarRing>(h: &Series<R>) -> Result<(Generator<R>, R::Elem)> {
    let ord = h.order().ok_or(Error::ZeroSeries)?;
    if ord < 1 {
        return Err(Error::OrderViolation);
    }
    let ring = h.ring().clone();
    let lead = h.coeff(ord).clone();
    let inv = ring.inverse(&lead).ok_or(Error::NonInvertibleLeading)?;
    Ok((
        Generator {
            h: h.scale(&inv),
            l: (ord - 1) as u32,
        },
        lead,
    ))
}

/// `(H ∘ Φ) − Φ'·H` mod `x^{bound+1}`; zero exactly when Φ solves the
/// equation for `H`. `H` need not be normalized, but must have order
/// ≥ 1 so that the product with the truncated derivative is exact.
pub fn aj_residual<R: ScalarRing>(h: &Series<R>, phi: &Series<R>) -> Result<Series<R>> {
    if h.truncation() != phi.truncation() {
        return Err(Error::TruncationMismatch);
    }
    if h.order() == Some(0) {
        return Err(Error::OrderViolation);
    }
    let lhs = h.compose(phi)?;
    let rhs = phi.derivative().mul(h)?;
    lhs.sub(&rhs)
}

/// One row of the coefficient system: the degree-`n` equation
///
/// ```text
/// Σ_{i=l+1}^n h_i Σ_{U_{n,i}} B Π_{j=1}^{n−i+1} c_j^{u_j}
///     = Σ_{i=l+1}^n h_i (n−i+1) c_{n−i+1}
/// ```
///
/// returned as lhs − rhs. The row only involves `c_j` for `j ≤ n − l`.
fn eq_row<R: ScalarRing>(gen: &Generator<R>, phi: &Series<R>, n: usize) -> R::Elem {
    let r = gen.ring();
    let l = gen.l as usize;
    let mut acc = r.zero();
    for i in (l + 1)..=n {
        let hi = gen.h.coeff(i);
        if r.is_zero(hi) {
            continue;
        }
        let mut inner = r.zero();
        for v in comb::enumerate(n as u32, i as u32, Selector::Full).iter() {
            let mut term = r.from_rational(&Rational::from_bigint(v.weight.clone()));
            for j in 1..=n {
                let u = v.u(j as u32);
                if u > 0 {
                    term = r.mul(&term, &r.pow(phi.coeff(j), u as u64));
                }
            }
            inner = r.add(&inner, &term);
        }
        let rhs = r.mul(&r.integer((n - i + 1) as i64), phi.coeff(n - i + 1));
        acc = r.add(&acc, &r.mul(hi, &r.sub(&inner, &rhs)));
    }
    acc
}

/// The full coefficient system for `n ∈ |l+1, bound|`; each entry is
/// `(n, lhs − rhs)`. All rows vanish iff [`aj_residual`] vanishes —
/// the two are computed by independent algorithms and cross-checked in
/// the tests.
pub fn coefficient_system<R: ScalarRing>(
    gen: &Generator<R>,
    phi: &Series<R>,
) -> Result<Vec<(usize, R::Elem)>> {
    if gen.truncation() != phi.truncation() {
        return Err(Error::TruncationMismatch);
    }
    let l = gen.l as usize;
    let s = phi.bound();
    Ok(((l + 1)..=s).map(|n| (n, eq_row(gen, phi, n))).collect())
}

/// `H̃ = (T')^{−1}·(H ∘ T)` for `T ∈ Γ^s_1`. `Φ` solves the equation
/// for `H` exactly when `T^{∘−1}∘Φ∘T` solves it for `H̃`.
pub fn conjugate_generator<R: ScalarRing>(h: &Series<R>, t: &Series<R>) -> Result<Series<R>> {
    t.check_gamma1()?;
    let ht = h.compose(t)?;
    let recip = t.derivative().reciprocal()?;
    recip.mul(&ht)
}

/// Output of [`normal_form`]: `T ∈ Γ^s_1` with
/// `conjugate_generator(H, T) = x^{l+1} + δ·x^{2l+1}` exactly, plus the
/// record of every coefficient of `T` that the construction left free.
#[derive(Clone, PartialEq, Debug)]
pub struct NormalFormData<R: ScalarRing> {
    pub t: Series<R>,
    pub delta: R::Elem,
    pub l: u32,
    /// The arbitrary `v` indices fixed during construction (`v_{l+1}`
    /// for `l ≥ 2`, `v₂` for `l = 1`, tail `v_{s−l+1..s}` for finite s)
    /// with the values used; defaults are zero.
    pub free_choices: BTreeMap<usize, R::Elem>,
}

impl<R: ScalarRing> NormalFormData<R> {
    /// `x^{l+1} + δ·x^{2l+1}` at the truncation of `T`.
    pub fn normal_generator(&self) -> Series<R> {
        let ring = self.t.ring().clone();
        let trunc = self.t.truncation();
        let l = self.l as usize;
        let mut h = Series::monomial(ring.clone(), trunc, l + 1);
        if l >= 1 && 2 * l + 1 <= trunc.bound() {
            h.set_coeff(2 * l + 1, self.delta.clone());
        }
        h
    }
}

#[derive(Clone, Copy)]
enum Route {
    Horner,
    Multinomial,
}

/// `[x^n]( (H∘T) − T'·(x^{l+1} + δ·x^{2l+1}) )` — the degree-n residual
/// of the conjugation identity for the current partial `T`.
fn conj_row<R: ScalarRing>(
    h: &Series<R>,
    t: &Series<R>,
    delta: &R::Elem,
    l: usize,
    n: usize,
    route: Route,
) -> Result<R::Elem> {
    let ht = match route {
        Route::Horner => h.compose(t)?,
        Route::Multinomial => h.compose_via_multinomial(t)?,
    };
    let tp = t.derivative();
    let r = h.ring();
    let mut rhs = tp.coeff(n - l - 1).clone();
    if n >= 2 * l + 1 {
        rhs = r.add(&rhs, &r.mul(delta, tp.coeff(n - 2 * l - 1)));
    }
    Ok(r.sub(ht.coeff(n), &rhs))
}

fn normal_form_route<R: ScalarRing>(
    gen: &Generator<R>,
    overrides: &BTreeMap<usize, R::Elem>,
    route: Route,
) -> Result<NormalFormData<R>> {
    let r = gen.ring().clone();
    let l = gen.l as usize;
    let trunc = gen.truncation();
    let s = trunc.bound();
    // in working-precision mode the rows are extended by l so that every
    // coefficient of T up to the bound is pinned down by its row
    let (work, h) = match trunc {
        Truncation::Finite(_) => (trunc, gen.h.clone()),
        Truncation::Infinite(n) => (Truncation::Infinite(n + l), gen.h.extend(n + l)),
    };
    let mut t = Series::identity(r.clone(), work);
    let mut delta = r.zero();
    let mut free: BTreeMap<usize, R::Elem> = BTreeMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();

    for n in (l + 2)..=work.bound() {
        let m = n - l;
        // the degree-n row is linear in the unknown v_m with integer
        // slope 2l+1−n; the single degenerate row (n = 2l+1) leaves
        // v_{l+1} free and defines δ instead
        let slope = 2 * l as i64 + 1 - n as i64;
        if slope != 0 {
            let e = conj_row(&h, &t, &delta, l, n, route)?;
            t.set_coeff(m, r.div_rational(&r.neg(&e), &Rational::from_integer(slope)));
        } else {
            let v = overrides.get(&m).cloned().unwrap_or_else(|| r.zero());
            if overrides.contains_key(&m) {
                used.insert(m);
            }
            t.set_coeff(m, v.clone());
            free.insert(m, v);
            delta = conj_row(&h, &t, &r.zero(), l, n, route)?;
        }
    }

    // rows never reach the top l coefficients of T in a finite ring;
    // they are genuinely free
    if trunc.is_finite() && l >= 1 {
        for m in (s - l + 1).max(2)..=s {
            if free.contains_key(&m) {
                continue;
            }
            let v = overrides.get(&m).cloned().unwrap_or_else(|| r.zero());
            if overrides.contains_key(&m) {
                used.insert(m);
            }
            t.set_coeff(m, v.clone());
            free.insert(m, v);
        }
    }

    if let Some(k) = overrides.keys().find(|k| !used.contains(k)) {
        return Err(Error::ParamMismatch(format!(
            "v_{k} is determined by the normal form, not a free choice"
        )));
    }

    let t = if trunc.is_finite() { t } else { t.project(s)? };
    Ok(NormalFormData {
        t,
        delta,
        l: gen.l,
        free_choices: free,
    })
}

/// Computes `T ∈ Γ^s_1` and `δ` with
/// `conjugate_generator(H, T) = x^{l+1} + δ·x^{2l+1}` exactly.
/// `δ = 0` is forced when `l = 0` or `s ≤ 2l`; for `l = 0` the `T` is
/// unique. Free coefficients default to zero and may be overridden by
/// index; overriding a determined index is an error.
pub fn normal_form<R: ScalarRing>(
    gen: &Generator<R>,
    overrides: &BTreeMap<usize, R::Elem>,
) -> Result<NormalFormData<R>> {
    normal_form_route(gen, overrides, Route::Horner)
}

/// Same construction with every substitution evaluated through the
/// multinomial-expansion oracle instead of Horner composition; kept as
/// an independent route for cross-validation.
pub fn normal_form_multinomial_route<R: ScalarRing>(
    gen: &Generator<R>,
    overrides: &BTreeMap<usize, R::Elem>,
) -> Result<NormalFormData<R>> {
    normal_form_route(gen, overrides, Route::Multinomial)
}

/// Parameters that select one solution out of the family.
#[derive(Clone, PartialEq, Debug)]
pub struct SolveParams<R: ScalarRing> {
    /// `c₁ ∈ E_l` (`l ≥ 1`) or `c₁ ∈ k*` (`l = 0`).
    pub c1: R::Elem,
    /// Required exactly when `l ≥ 1` and (s infinite or `s ≥ 2l+1`).
    pub c_lp1: Option<R::Elem>,
    /// Coefficients at `x^{s−l+1}..x^s`; required exactly when `s` is
    /// finite and `l ≥ 1`.
    pub tail: Vec<R::Elem>,
}

impl<R: ScalarRing> SolveParams<R> {
    pub fn linear(c1: R::Elem) -> Self {
        SolveParams {
            c1,
            c_lp1: None,
            tail: Vec::new(),
        }
    }
}

/// A solution together with the parameters that produced it.
#[derive(Clone, PartialEq, Debug)]
pub struct AJSolution<R: ScalarRing> {
    pub phi: Series<R>,
    pub params: SolveParams<R>,
    /// Arbitrary coefficient choices made along the way (seeds of the
    /// direct recurrence, normal-form free coefficients).
    pub free_choices: BTreeMap<usize, R::Elem>,
}

/// The `l = 0` solution `Φ_{c₁} = c₁x + Σ_{n≥2} (c₁²−c₁)·K_n x^n`,
/// with `K_n = K_n(c₁; h₂,…,h_n)` evaluated by the recurrence
///
/// ```text
/// K₂ = h₂,
/// (n−1)·K_n = h_n Σ_{j=0}^{n−2} c₁^j
///     + Σ_{i=2}^{n−1} h_i ( Σ_{U_{n,i}} B c₁^{u₁}(c₁²−c₁)^{i−u₁−1}
///                             Π_{j=2}^{n−i+1} K_j^{u_j}
///                           − (n−i+1)·K_{n−i+1} ).
/// ```
pub fn solve_l0<R: ScalarRing>(gen: &Generator<R>, c1: &R::Elem) -> Result<AJSolution<R>> {
    if gen.l != 0 {
        return Err(Error::ParamMismatch("this constructor requires l = 0".into()));
    }
    let r = gen.ring().clone();
    r.inverse(c1).ok_or(Error::ZeroC1)?;
    let s = gen.h.bound();
    let y2y = r.sub(&r.mul(c1, c1), c1);
    let mut k = vec![r.zero(); s + 1];
    if s >= 2 {
        k[2] = gen.h.coeff(2).clone();
    }
    for n in 3..=s {
        let mut geo = r.zero();
        for j in 0..=(n - 2) {
            geo = r.add(&geo, &r.pow(c1, j as u64));
        }
        let mut acc = r.mul(gen.h.coeff(n), &geo);
        for i in 2..=(n - 1) {
            let hi = gen.h.coeff(i);
            if r.is_zero(hi) {
                continue;
            }
            let mut inner = r.zero();
            for v in comb::enumerate(n as u32, i as u32, Selector::Full).iter() {
                let u1 = v.u(1);
                // u1 <= i−1 here since i < n
                let mut term = r.from_rational(&Rational::from_bigint(v.weight.clone()));
                term = r.mul(&term, &r.pow(c1, u1 as u64));
                term = r.mul(&term, &r.pow(&y2y, (v.i - u1 - 1) as u64));
                for j in 2..=(n - i + 1) {
                    let u = v.u(j as u32);
                    if u > 0 {
                        term = r.mul(&term, &r.pow(&k[j], u as u64));
                    }
                }
                inner = r.add(&inner, &term);
            }
            let sub = r.mul(&r.integer((n - i + 1) as i64), &k[n - i + 1]);
            acc = r.add(&acc, &r.mul(hi, &r.sub(&inner, &sub)));
        }
        k[n] = r.div_rational(&acc, &Rational::from_integer((n - 1) as i64));
    }
    let mut phi = Series::linear(r.clone(), gen.truncation(), c1.clone());
    for n in 2..=s {
        phi.set_coeff(n, r.mul(&y2y, &k[n]));
    }
    Ok(AJSolution {
        phi,
        params: SolveParams::linear(c1.clone()),
        free_choices: BTreeMap::new(),
    })
}

/// The same `l = 0` solution built the structural way:
/// `T ∘ L_{c₁} ∘ T^{∘−1}` with the unique normal-form `T`. Must agree
/// with [`solve_l0`] exactly.
pub fn solve_l0_conjugation<R: ScalarRing>(
    gen: &Generator<R>,
    c1: &R::Elem,
) -> Result<AJSolution<R>> {
    if gen.l != 0 {
        return Err(Error::ParamMismatch("this constructor requires l = 0".into()));
    }
    let r = gen.ring().clone();
    r.inverse(c1).ok_or(Error::ZeroC1)?;
    let nf = normal_form(gen, &BTreeMap::new())?;
    let lc = Series::linear(r, gen.truncation(), c1.clone());
    let tinv = nf.t.compositional_inverse()?;
    let phi = nf.t.compose(&lc.compose(&tinv)?)?;
    Ok(AJSolution {
        phi,
        params: SolveParams::linear(c1.clone()),
        free_choices: BTreeMap::new(),
    })
}

/// The universal polynomials `Q_{rl+1}(y, t)` of the semicanonical
/// solution family for `H̃ = x^{l+1} + t·x^{2l+1}`.
#[derive(Clone, PartialEq, Debug)]
pub struct QPolyTable {
    pub l: u32,
    entries: Vec<QPoly>,
}

impl QPolyTable {
    /// `Q_{rl+1}` for `r ∈ |1, r_max|`.
    pub fn entry(&self, r: usize) -> &QPoly {
        &self.entries[r - 1]
    }

    pub fn r_max(&self) -> usize {
        self.entries.len()
    }
}

/// Builds the table by the recurrence (`n = (r+1)l+1`, `r ≥ 2`):
///
/// ```text
/// Q_{l+1} = y,
/// (r−1)l · Q_{rl+1} = Σ_{Ǔ^{l+1}_{n,l+1}}  B Π_j Q_{jl+1}^{u_{jl+1}}
///                   + t·Σ_{U^{l+1}_{n,2l+1}} B Π_j Q_{jl+1}^{u_{jl+1}}
///                   − t·((r−1)l+1)·Q_{(r−1)l+1}
/// ```
///
/// where every index vector is supported on position 1 (exponent on
/// `c̃₁ = 1`, hence dropped) and positions `jl+1 ≤ (r−1)l+1`.
pub fn q_poly_table(l: u32, r_max: usize) -> QPolyTable {
    assert!(l >= 1 && r_max >= 1);
    let tv = QPoly::var(2, 1);
    let mut entries = vec![QPoly::var(2, 0)];
    for rr in 2..=r_max {
        let n = (rr + 1) * l as usize + 1;
        let mut acc = QPoly::zero(2);
        for (i, sel, with_t) in [
            (l + 1, Selector::Check(l), false),
            (2 * l + 1, Selector::Mod(l), true),
        ] {
            let mut sum = QPoly::zero(2);
            for v in comb::enumerate(n as u32, i, sel).iter() {
                let mut term = QPoly::constant(2, Rational::from_bigint(v.weight.clone()));
                for j in 1..rr {
                    let u = v.u((j * l as usize + 1) as u32);
                    for _ in 0..u {
                        term = term.mul(&entries[j - 1]);
                    }
                }
                sum = sum.add(&term);
            }
            if with_t {
                sum = sum.mul(&tv);
            }
            acc = acc.add(&sum);
        }
        let drag = (rr - 1) * l as usize + 1;
        acc = acc.sub(
            &tv.mul(&entries[rr - 2])
                .scale(&Rational::from_integer(drag as i64)),
        );
        entries.push(acc.div_rational(&Rational::from_integer(((rr - 1) * l as usize) as i64)));
    }
    QPolyTable { l, entries }
}

/// The semicanonical solution
/// `Φ̃ = x + c_{l+1}·x^{l+1} + Σ_{p≥2} Q_{pl+1}(c_{l+1}, δ)·x^{pl+1}`
/// of the equation for `H̃ = x^{l+1} + δ·x^{2l+1}`. For finite
/// `s ≤ 2l` the generator degenerates to `x^{l+1}` in the ring, so
/// `δ = 0` is required.
pub fn solve_normalform_s1<R: ScalarRing>(
    ring: R,
    trunc: Truncation,
    l: u32,
    delta: &R::Elem,
    c_lp1: &R::Elem,
) -> Result<AJSolution<R>> {
    assert!(l >= 1);
    let s = trunc.bound();
    if trunc.is_finite() && s <= 2 * l as usize && !ring.is_zero(delta) {
        return Err(Error::DeltaMustVanish);
    }
    let mut phi = Series::identity(ring.clone(), trunc);
    let r_max = if s >= l as usize + 1 {
        (s - 1) / l as usize
    } else {
        0
    };
    if r_max >= 1 {
        let table = q_poly_table(l, r_max);
        for p in 1..=r_max {
            let val = table
                .entry(p)
                .eval_in(&ring, &[c_lp1.clone(), delta.clone()]);
            phi.set_coeff(p * l as usize + 1, val);
        }
    }
    Ok(AJSolution {
        phi,
        params: SolveParams {
            c1: ring.one(),
            c_lp1: Some(c_lp1.clone()),
            tail: Vec::new(),
        },
        free_choices: BTreeMap::new(),
    })
}

/// Solves the coefficient system row by row. The recurrence closes only
/// for `l = 1` or `l ≥ 2` with finite `s ≤ 2l`; outside that range the
/// degree-`(2l+1)` obstruction cannot be discharged and the normal-form
/// path must be used instead.
///
/// `seeds` supplies the coefficients the recurrence leaves free: `c₂`
/// for `l = 1` (its row degenerates to `0 = 0`) and the tail
/// `c_{s−l+1..s}` for finite `s`; unset seeds default to zero.
pub fn solve_direct_recurrence<R: ScalarRing>(
    gen: &Generator<R>,
    c1: &R::Elem,
    seeds: &BTreeMap<usize, R::Elem>,
) -> Result<AJSolution<R>> {
    let l = gen.l as usize;
    let trunc = gen.truncation();
    let s = trunc.bound();
    let r = gen.ring().clone();
    let closes = l == 1 || (l >= 2 && trunc.is_finite() && s <= 2 * l);
    if !closes {
        return Err(Error::RecurrenceOutOfRange);
    }
    if !r.is_one(&r.pow(c1, l as u64)) {
        return Err(Error::C1NotRootOfUnity(gen.l));
    }
    let mut phi = Series::linear(r.clone(), trunc, c1.clone());
    let mut free: BTreeMap<usize, R::Elem> = BTreeMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for n in (l + 2)..=s {
        let m = n - l;
        // with c1^l = 1 the row is linear in c_m with slope 2l+1−n
        let slope = 2 * l as i64 + 1 - n as i64;
        let e = eq_row(gen, &phi, n);
        if slope != 0 {
            phi.set_coeff(m, r.div_rational(&r.neg(&e), &Rational::from_integer(slope)));
        } else {
            // l = 1, n = 3: the row reads 0·c₂ = h₃(c₁³−c₁) = 0
            if !r.is_zero(&e) {
                return Err(Error::NotASolution);
            }
            let v = seeds.get(&m).cloned().unwrap_or_else(|| r.zero());
            if seeds.contains_key(&m) {
                used.insert(m);
            }
            phi.set_coeff(m, v.clone());
            free.insert(m, v);
        }
    }
    if trunc.is_finite() {
        for m in (s - l + 1).max(2)..=s {
            if free.contains_key(&m) {
                continue;
            }
            let v = seeds.get(&m).cloned().unwrap_or_else(|| r.zero());
            if seeds.contains_key(&m) {
                used.insert(m);
            }
            phi.set_coeff(m, v.clone());
            free.insert(m, v);
        }
    }
    if let Some(k) = seeds.keys().find(|k| !used.contains(k)) {
        return Err(Error::ParamMismatch(format!(
            "c_{k} is determined by the recurrence, not a seed"
        )));
    }
    Ok(AJSolution {
        phi,
        params: SolveParams::linear(c1.clone()),
        free_choices: free,
    })
}

/// The general constructor: assembles the semicanonical solution `Φ̂`
/// for `x^{l+1} + δ·x^{2l+1}` in the applicable regime —
///
/// * infinite s: `c₁x + Σ_{p≥1} c₁·Q_{pl+1}(c₁^{−1}c_{l+1}, δ)·x^{pl+1}`;
/// * finite `s ≥ 2l+1`: the same prefix up to `r = max{r : rl+1 ≤ s}`
///   with the free tail `c_{s−l+1..s}` added on top;
/// * finite `s ≤ 2l`: `c₁x + Σ_{j=s−l+1}^s c_j·x^j` (here `δ = 0`);
///
/// and conjugates back through the normal-form transform `T`.
pub fn solve_full<R: ScalarRing>(
    gen: &Generator<R>,
    params: &SolveParams<R>,
) -> Result<AJSolution<R>> {
    if gen.l == 0 {
        if params.c_lp1.is_some() || !params.tail.is_empty() {
            return Err(Error::ParamMismatch(
                "l = 0 solutions take only the parameter c1".into(),
            ));
        }
        return solve_l0(gen, &params.c1);
    }
    let r = gen.ring().clone();
    let l = gen.l as usize;
    let trunc = gen.truncation();
    let s = trunc.bound();
    if !r.is_one(&r.pow(&params.c1, l as u64)) {
        return Err(Error::C1NotRootOfUnity(gen.l));
    }
    let finite = trunc.is_finite();
    let needs_lp1 = !finite || s >= 2 * l + 1;
    if needs_lp1 != params.c_lp1.is_some() {
        return Err(Error::ParamMismatch(if needs_lp1 {
            "c_{l+1} is required in this regime".into()
        } else {
            "c_{l+1} is part of the tail when s <= 2l".into()
        }));
    }
    let want_tail = if finite { l } else { 0 };
    if params.tail.len() != want_tail {
        return Err(Error::ParamMismatch(format!(
            "tail must have length {want_tail}"
        )));
    }

    let nf = normal_form(gen, &BTreeMap::new())?;
    let mut hat = Series::linear(r.clone(), trunc, params.c1.clone());
    if needs_lp1 {
        let c1_inv = r.inverse(&params.c1).unwrap();
        let yhat = r.mul(&c1_inv, params.c_lp1.as_ref().unwrap());
        let r_max = (s - 1) / l;
        let table = q_poly_table(gen.l, r_max);
        for p in 1..=r_max {
            let val = r.mul(
                &params.c1,
                &table.entry(p).eval_in(&r, &[yhat.clone(), nf.delta.clone()]),
            );
            hat.set_coeff(p * l + 1, val);
        }
    }
    for (k, cj) in params.tail.iter().enumerate() {
        let j = s - l + 1 + k;
        let cur = hat.coeff(j).clone();
        hat.set_coeff(j, r.add(&cur, cj));
    }
    let tinv = nf.t.compositional_inverse()?;
    let phi = nf.t.compose(&hat.compose(&tinv)?)?;
    Ok(AJSolution {
        phi,
        params: params.clone(),
        free_choices: nf.free_choices,
    })
}

/// Projection of a solution to a smaller ring; the image solves the
/// projected equation.
pub fn project_solution<R: ScalarRing>(phi: &Series<R>, target: usize) -> Result<Series<R>> {
    phi.project(target)
}

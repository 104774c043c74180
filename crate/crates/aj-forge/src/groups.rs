//! The abstract parameter groups of the solution families — `(E_l×k, ⋄)`,
//! `(E_l×k^{l+1}, ⋄̄)`, `(E_l×k^l, ⋄̂)` and `Γ^{l,l}` — together with the
//! structural probes: parameter extraction (a group homomorphism),
//! semidirect decomposition, splitting checks, and commutativity probes.
//!
//! The tuple entries of a `⋄̄` element sit at indices `{l+1} ∪ |s−l+1, s|`
//! and of a `⋄̂` element at `|s−l+1, s|`; in both cases the law is
//!
//! ```text
//! (c₁, (c_j)) ∘ (d₁, (d_j)) = (c₁d₁, (c₁d_j + d₁^j c_j))
//! ```
//!
//! which for the single entry `j = l+1` of `⋄` collapses to
//! `(c₁d₁, c₁d₂' + d₁c₂')` since `d₁^{l+1} = d₁` on `E_l`.

use std::collections::BTreeMap;

use crate::aj::{self, Generator, SolveParams};
use crate::scalars::ScalarRing;
use crate::series::Series;
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DiamondVariant {
    /// `(E_l×k, ⋄)` — one entry at `l+1` (empty for `l = 0`, where the
    /// group is just `(k*, ·)`).
    Plain,
    /// `(E_l×k^{l+1}, ⋄̄)` — finite `s ≥ 2l+1`.
    Bar,
    /// `(E_l×k^l, ⋄̂)` — finite `s ≤ 2l`.
    Hat,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DiamondContext {
    pub variant: DiamondVariant,
    pub l: u32,
    /// Ring modulus; only meaningful for the Bar/Hat variants.
    pub s: usize,
}

impl DiamondContext {
    pub fn plain(l: u32) -> Self {
        DiamondContext {
            variant: DiamondVariant::Plain,
            l,
            s: 0,
        }
    }

    pub fn bar(l: u32, s: usize) -> Self {
        assert!(l >= 1 && s >= 2 * l as usize + 1);
        DiamondContext {
            variant: DiamondVariant::Bar,
            l,
            s,
        }
    }

    pub fn hat(l: u32, s: usize) -> Self {
        assert!(l >= 1 && s <= 2 * l as usize && s >= l as usize + 1);
        DiamondContext {
            variant: DiamondVariant::Hat,
            l,
            s,
        }
    }

    /// The series indices the tuple entries correspond to.
    pub fn indices(&self) -> Vec<usize> {
        let l = self.l as usize;
        match self.variant {
            DiamondVariant::Plain => {
                if l == 0 {
                    Vec::new()
                } else {
                    vec![l + 1]
                }
            }
            DiamondVariant::Bar => std::iter::once(l + 1)
                .chain((self.s - l + 1)..=self.s)
                .collect(),
            DiamondVariant::Hat => ((self.s - l + 1)..=self.s).collect(),
        }
    }
}

/// One element of a diamond group.
#[derive(Clone, PartialEq, Debug)]
pub struct DiamondElement<R: ScalarRing> {
    ring: R,
    pub ctx: DiamondContext,
    pub c1: R::Elem,
    pub rest: Vec<R::Elem>,
}

impl<R: ScalarRing> DiamondElement<R> {
    pub fn new(ring: R, ctx: DiamondContext, c1: R::Elem, rest: Vec<R::Elem>) -> Result<Self> {
        if rest.len() != ctx.indices().len() {
            return Err(Error::ParamMismatch(format!(
                "expected {} tuple entries, got {}",
                ctx.indices().len(),
                rest.len()
            )));
        }
        if ctx.l >= 1 {
            if !ring.is_one(&ring.pow(&c1, ctx.l as u64)) {
                return Err(Error::C1NotRootOfUnity(ctx.l));
            }
        } else if ring.inverse(&c1).is_none() {
            return Err(Error::ZeroC1);
        }
        Ok(DiamondElement {
            ring,
            ctx,
            c1,
            rest,
        })
    }

    pub fn identity(ring: R, ctx: DiamondContext) -> Self {
        let rest = vec![ring.zero(); ctx.indices().len()];
        let c1 = ring.one();
        DiamondElement {
            ring,
            ctx,
            c1,
            rest,
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ParamMismatch("diamond context mismatch".into()));
        }
        let r = &self.ring;
        let c1 = r.mul(&self.c1, &other.c1);
        let rest = self
            .ctx
            .indices()
            .into_iter()
            .zip(self.rest.iter().zip(&other.rest))
            .map(|(j, (cj, dj))| {
                r.add(
                    &r.mul(&self.c1, dj),
                    &r.mul(&r.pow(&other.c1, j as u64), cj),
                )
            })
            .collect();
        Ok(DiamondElement {
            ring: r.clone(),
            ctx: self.ctx,
            c1,
            rest,
        })
    }

    pub fn inverse(&self) -> Self {
        let r = &self.ring;
        let d1 = r.inverse(&self.c1).expect("c1 is a unit by construction");
        let rest = self
            .ctx
            .indices()
            .into_iter()
            .zip(&self.rest)
            .map(|(j, cj)| r.neg(&r.mul(&r.mul(&d1, &r.pow(&d1, j as u64)), cj)))
            .collect();
        DiamondElement {
            ring: r.clone(),
            ctx: self.ctx,
            c1: d1,
            rest,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.ring.is_one(&self.c1) && self.rest.iter().all(|c| self.ring.is_zero(c))
    }

    /// The parameter record that feeds [`aj::solve_full`].
    pub fn to_solve_params(&self) -> SolveParams<R> {
        match self.ctx.variant {
            DiamondVariant::Plain => SolveParams {
                c1: self.c1.clone(),
                c_lp1: self.rest.first().cloned(),
                tail: Vec::new(),
            },
            DiamondVariant::Bar => SolveParams {
                c1: self.c1.clone(),
                c_lp1: Some(self.rest[0].clone()),
                tail: self.rest[1..].to_vec(),
            },
            DiamondVariant::Hat => SolveParams {
                c1: self.c1.clone(),
                c_lp1: None,
                tail: self.rest.clone(),
            },
        }
    }
}

/// `Γ^{l,l}` — the group of series `c₁x + c_{l+1}x^{l+1}` in `Γ^{l+1}`,
/// isomorphic to `(E_l×k, ⋄)`.
#[derive(Clone, PartialEq, Debug)]
pub struct GammaLL<R: ScalarRing> {
    ring: R,
    pub l: u32,
    pub c1: R::Elem,
    pub c_lp1: R::Elem,
}

impl<R: ScalarRing> GammaLL<R> {
    pub fn new(ring: R, l: u32, c1: R::Elem, c_lp1: R::Elem) -> Result<Self> {
        assert!(l >= 1);
        if !ring.is_one(&ring.pow(&c1, l as u64)) {
            return Err(Error::C1NotRootOfUnity(l));
        }
        Ok(GammaLL {
            ring,
            l,
            c1,
            c_lp1,
        })
    }

    /// The law of composition mod `x^{l+2}`:
    /// `(c₁d₁, c₁d_{l+1} + d₁^{l+1}c_{l+1})`.
    pub fn compose(&self, other: &Self) -> Self {
        let r = &self.ring;
        GammaLL {
            ring: r.clone(),
            l: self.l,
            c1: r.mul(&self.c1, &other.c1),
            c_lp1: r.add(
                &r.mul(&self.c1, &other.c_lp1),
                &r.mul(&r.pow(&other.c1, self.l as u64 + 1), &self.c_lp1),
            ),
        }
    }

    pub fn to_series(&self) -> Series<R> {
        let trunc = crate::series::Truncation::Finite(self.l as usize + 1);
        let mut f = Series::linear(self.ring.clone(), trunc, self.c1.clone());
        f.set_coeff(self.l as usize + 1, self.c_lp1.clone());
        f
    }

    pub fn to_diamond(&self) -> DiamondElement<R> {
        DiamondElement::new(
            self.ring.clone(),
            DiamondContext::plain(self.l),
            self.c1.clone(),
            vec![self.c_lp1.clone()],
        )
        .expect("c1 already validated")
    }
}

/// Extracts the abstract-group parameters of a solution: the series is
/// moved to normal-form coordinates through `T`, and the universal
/// `Q`-part is subtracted from the tail entries. The map is a group
/// homomorphism onto the applicable diamond group.
pub fn params_of_solution<R: ScalarRing>(
    gen: &Generator<R>,
    phi: &Series<R>,
) -> Result<DiamondElement<R>> {
    if !aj::aj_residual(gen.series(), phi)?.is_zero() {
        return Err(Error::NotASolution);
    }
    let r = gen.ring().clone();
    let l = gen.l() as usize;
    let trunc = gen.truncation();
    let s = trunc.bound();
    if l == 0 {
        return DiamondElement::new(r, DiamondContext::plain(0), phi.coeff(1).clone(), vec![]);
    }
    let nf = aj::normal_form(gen, &BTreeMap::new())?;
    let tinv = nf.t.compositional_inverse()?;
    let hat = tinv.compose(&phi.compose(&nf.t)?)?;
    let c1 = hat.coeff(1).clone();
    if !trunc.is_finite() {
        return DiamondElement::new(
            r,
            DiamondContext::plain(gen.l()),
            c1,
            vec![hat.coeff(l + 1).clone()],
        );
    }
    if s >= 2 * l + 1 {
        let c_lp1 = hat.coeff(l + 1).clone();
        let r_max = (s - 1) / l;
        let table = aj::q_poly_table(gen.l(), r_max);
        let c1_inv = r.inverse(&c1).ok_or(Error::ZeroC1)?;
        let yhat = r.mul(&c1_inv, &c_lp1);
        let mut rest = vec![c_lp1];
        for j in (s - l + 1)..=s {
            let mut v = hat.coeff(j).clone();
            if (j - 1) % l == 0 {
                let p = (j - 1) / l;
                if (2..=r_max).contains(&p) {
                    let qv = r.mul(
                        &c1,
                        &table.entry(p).eval_in(&r, &[yhat.clone(), nf.delta.clone()]),
                    );
                    v = r.sub(&v, &qv);
                }
            }
            rest.push(v);
        }
        DiamondElement::new(r, DiamondContext::bar(gen.l(), s), c1, rest)
    } else {
        let rest = ((s - l + 1)..=s).map(|j| hat.coeff(j).clone()).collect();
        DiamondElement::new(r, DiamondContext::hat(gen.l(), s), c1, rest)
    }
}

/// Factors a solution of the equation for `H` as `L_{c₁} ∘ g` with
/// `g ∈ S₁`; both factors solve the equation, and the pair is unique.
pub fn decompose_semidirect<R: ScalarRing>(
    h: &Series<R>,
    phi: &Series<R>,
) -> Result<(Series<R>, Series<R>)> {
    if !aj::aj_residual(h, phi)?.is_zero() {
        return Err(Error::NotASolution);
    }
    let r = phi.ring().clone();
    let c1 = phi.coeff(1).clone();
    let inv = r.inverse(&c1).ok_or(Error::NonInvertibleLinear)?;
    let lc = Series::linear(r.clone(), phi.truncation(), c1);
    let linv = Series::linear(r, phi.truncation(), inv);
    let g = linv.compose(phi)?;
    Ok((lc, g))
}

/// Outcome of a sampled structural check.
#[derive(Clone, Debug)]
pub struct GroupReport {
    pub claim: String,
    pub sampled: usize,
    pub violations: Vec<String>,
    /// Whether every sampled subgroup/kernel pair commuted (direct
    /// product evidence).
    pub direct: bool,
    /// First non-commuting pair, when one exists.
    pub witness: Option<(serde_json::Value, serde_json::Value)>,
}

impl GroupReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "claim": self.claim,
            "sampled": self.sampled,
            "violations": self.violations,
            "direct": self.direct,
            "witness": self.witness.as_ref().map(|(a, b)| serde_json::json!([a, b])),
        })
    }
}

/// Verifies on samples that `G = H ⊙ ker φ` for a homomorphism `φ` onto
/// the subgroup `H`: every sampled `g` factors as `φ(g) ∘ k` with
/// `φ(k) = id`, `φ` fixes the sampled subgroup pointwise (hence the
/// intersection with the kernel is trivial), and the report records
/// whether subgroup and kernel elements commuted throughout (direct
/// product) together with the first witness when they do not.
pub fn splitting_check<R, F>(
    claim: &str,
    sample: &[Series<R>],
    subgroup: &[Series<R>],
    phi: F,
) -> GroupReport
where
    R: ScalarRing,
    F: Fn(&Series<R>) -> Series<R>,
{
    let mut violations = Vec::new();
    let mut direct = true;
    let mut witness = None;
    let mut kernel = Vec::new();
    for (idx, h) in subgroup.iter().enumerate() {
        if phi(h) != *h {
            violations.push(format!("phi does not fix subgroup sample {idx}"));
        }
    }
    for (idx, g) in sample.iter().enumerate() {
        let h = phi(g);
        let ok = h
            .compositional_inverse()
            .and_then(|hi| hi.compose(g))
            .and_then(|k| {
                let id = Series::identity(g.ring().clone(), g.truncation());
                if phi(&k) != id {
                    violations.push(format!("complement of sample {idx} is not in ker phi"));
                }
                let back = h.compose(&k)?;
                if back != *g {
                    violations.push(format!("factorization does not recompose sample {idx}"));
                }
                kernel.push(k);
                Ok(())
            });
        if let Err(e) = ok {
            violations.push(format!("sample {idx}: {e}"));
        }
    }
    'outer: for h in subgroup {
        for k in &kernel {
            let hk = h.compose(k);
            let kh = k.compose(h);
            match (hk, kh) {
                (Ok(a), Ok(b)) if a == b => {}
                (Ok(_), Ok(_)) => {
                    direct = false;
                    witness = Some((h.to_json(), k.to_json()));
                    break 'outer;
                }
                _ => {
                    violations.push("composition failed during commutation probe".into());
                    break 'outer;
                }
            }
        }
    }
    GroupReport {
        claim: claim.to_string(),
        sampled: sample.len(),
        violations,
        direct,
        witness,
    }
}

/// Pairwise commutator scan; returns the first non-commuting pair.
pub fn commutativity_probe<R: ScalarRing>(
    sample: &[Series<R>],
) -> Result<Option<(Series<R>, Series<R>)>> {
    for a in sample {
        for b in sample {
            if a.compose(b)? != b.compose(a)? {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

//! The JSON job layer: a declarative `JobConfig` is mapped onto one
//! library call and produces a deterministic report. Both the CLI and
//! the C ABI speak this format, so there is exactly one place where
//! parsing, field dispatch and exit-status policy live.
//!
//! Exit-status contract: 0 — checked and true / produced; 1 — checked
//! and false (nonzero residual, witness found); 2 — could not check
//! (usage or domain error).

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::aj::{self, Generator, SolveParams};
use crate::comb::{self, Selector};
use crate::flows;
use crate::groups;
use crate::scalars::{CycElem, CyclotomicField, Rational, RationalField, ScalarRing};
use crate::series::{parse_series, Series, Truncation};
use crate::{Error, Result};

pub const SCHEMA: &str = "aj-forge/1";
pub const DEFAULT_RNG_SEED: u64 = 0xA17;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_PRECISION_CAP: usize = 64;

/// Runaway-precision guard; overridable through the environment.
pub fn precision_cap() -> usize {
    std::env::var("AJ_FORGE_PRECISION_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Normalize,
    Solve,
    Verify,
    GroupCheck,
    FlowCheck,
    CombDebug,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSpec {
    Q,
    Cyclotomic(u32),
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Q
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncSpec {
    Finite(usize),
    Infinite(usize),
}

impl TruncSpec {
    pub fn to_truncation(self) -> Truncation {
        match self {
            TruncSpec::Finite(s) => Truncation::Finite(s),
            TruncSpec::Infinite(n) => Truncation::Infinite(n),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputMode {
    Text,
    Json,
}

impl Default for OutputMode {
    fn default() -> Self {
        OutputMode::Text
    }
}

/// Scalar-valued job parameters, kept as source strings until the field
/// is known.
#[derive(Clone, Default, PartialEq, Debug, Serialize, Deserialize)]
pub struct ParamSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_lp1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<String>>,
    /// Direct-recurrence seeds, keyed by coefficient index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<BTreeMap<String, String>>,
    /// Normal-form overrides for the free coefficients of `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_choices: Option<BTreeMap<String, String>>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct JobConfig {
    pub command: Command,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selector: Option<String>,
    #[serde(default)]
    pub params: ParamSpec,
    #[serde(default)]
    pub output: OutputMode,
    #[serde(default = "default_rng_seed")]
    pub rng_seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_rng_seed() -> u64 {
    DEFAULT_RNG_SEED
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<JobConfig> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("job config: {e}")))
    }
}

/// A finished job: a machine report, its text rendering, and whether
/// the checked property held.
#[derive(Clone, Debug)]
pub struct JobOutcome {
    pub report: serde_json::Value,
    pub text: String,
    pub verified: bool,
}

impl JobOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            1
        }
    }

    pub fn render(&self, mode: OutputMode) -> String {
        match mode {
            OutputMode::Text => self.text.clone(),
            OutputMode::Json => serde_json::to_string_pretty(&self.report).unwrap(),
        }
    }
}

pub fn run(cfg: &JobConfig) -> Result<JobOutcome> {
    match cfg.command {
        // field-independent commands first
        Command::FlowCheck => run_flow_check(cfg),
        Command::CombDebug => run_comb_debug(cfg),
        _ => match cfg.field {
            FieldSpec::Q => run_typed(cfg, RationalField, |s| s.parse::<Rational>()),
            FieldSpec::Cyclotomic(m) => {
                let f = CyclotomicField::new(m);
                let g = f.clone();
                run_typed(cfg, f, move |s| parse_cyclotomic_scalar(&g, s))
            }
        },
    }
}

/// Parse-and-run for the C ABI: always returns a JSON document plus the
/// process-style exit code (errors become a `{"error": ...}` report
/// with code 2).
pub fn run_json(config_text: &str) -> (String, i32) {
    let report_err = |e: &Error| {
        serde_json::to_string_pretty(&serde_json::json!({
            "schema": SCHEMA,
            "error": e.to_string(),
        }))
        .unwrap()
    };
    match JobConfig::from_json(config_text) {
        Err(e) => (report_err(&e), 2),
        Ok(cfg) => match run(&cfg) {
            Err(e) => (report_err(&e), 2),
            Ok(out) => (
                serde_json::to_string_pretty(&out.report).unwrap(),
                out.exit_code(),
            ),
        },
    }
}

fn require<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Invalid(format!("missing required field `{what}`")))
}

fn checked_truncation(cfg: &JobConfig) -> Result<Truncation> {
    let spec = require(&cfg.truncation, "truncation")?;
    let t = spec.to_truncation();
    check_cap(t.bound())?;
    if t.bound() == 0 {
        return Err(Error::Invalid("truncation bound must be at least 1".into()));
    }
    Ok(t)
}

fn check_cap(bound: usize) -> Result<()> {
    let cap = precision_cap();
    if bound > cap {
        return Err(Error::Invalid(format!(
            "precision {bound} exceeds AJ_FORGE_PRECISION_CAP = {cap}"
        )));
    }
    Ok(())
}

/// `a/b`, `zeta^k`, `a/b*zeta^k` and `+`/`-` separated sums of those.
pub fn parse_cyclotomic_scalar(f: &CyclotomicField, text: &str) -> Result<CycElem> {
    let mut acc = f.zero();
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(Error::Invalid("empty scalar literal".into()));
    }
    let mut first = true;
    while !rest.is_empty() {
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        } else if !first {
            return Err(Error::Invalid(format!("expected '+' or '-' in `{text}`")));
        }
        first = false;
        let end = rest
            .find(['+', '-'])
            .unwrap_or(rest.len());
        let token = rest[..end].trim();
        rest = &rest[end..];
        let mut term = match token.split_once("zeta") {
            None => f.from_rational(&token.parse::<Rational>()?),
            Some((num, pow)) => {
                let num = num.trim().trim_end_matches('*').trim();
                let coeff = if num.is_empty() {
                    Rational::one()
                } else {
                    num.parse::<Rational>()?
                };
                let exp: u64 = match pow.trim().strip_prefix('^') {
                    None if pow.trim().is_empty() => 1,
                    Some(d) => d
                        .trim()
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad zeta power in `{token}`")))?,
                    None => return Err(Error::Invalid(format!("bad scalar term `{token}`"))),
                };
                f.mul(&f.from_rational(&coeff), &f.pow(&f.zeta(), exp))
            }
        };
        if negative {
            term = f.neg(&term);
        }
        acc = f.add(&acc, &term);
    }
    Ok(acc)
}

fn parse_index_map<R, P>(
    map: &Option<BTreeMap<String, String>>,
    parse: &P,
) -> Result<BTreeMap<usize, R::Elem>>
where
    R: ScalarRing,
    P: Fn(&str) -> Result<R::Elem>,
{
    let mut out = BTreeMap::new();
    if let Some(map) = map {
        for (k, v) in map {
            let idx: usize = k
                .parse()
                .map_err(|_| Error::Invalid(format!("bad coefficient index `{k}`")))?;
            out.insert(idx, parse(v)?);
        }
    }
    Ok(out)
}

fn run_typed<R, P>(cfg: &JobConfig, ring: R, parse: P) -> Result<JobOutcome>
where
    R: ScalarRing,
    P: Fn(&str) -> Result<R::Elem>,
{
    match cfg.command {
        Command::Normalize => run_normalize(cfg, ring, &parse),
        Command::Solve => run_solve(cfg, ring, &parse),
        Command::Verify => run_verify(cfg, ring),
        Command::GroupCheck => run_group_check(cfg, ring),
        Command::FlowCheck | Command::CombDebug => unreachable!("handled before dispatch"),
    }
}

fn load_generator<R: ScalarRing>(cfg: &JobConfig, ring: R) -> Result<Generator<R>> {
    let trunc = checked_truncation(cfg)?;
    let literal = require(&cfg.generator, "generator")?;
    let h = parse_series(ring, trunc, literal)?;
    let (gen, _) = aj::normalize_generator(&h)?;
    if let Some(l) = cfg.l {
        if gen.l() != l {
            return Err(Error::ParamMismatch(format!(
                "generator has l = {}, but l = {l} was requested",
                gen.l()
            )));
        }
    }
    Ok(gen)
}

fn run_normalize<R, P>(cfg: &JobConfig, ring: R, parse: &P) -> Result<JobOutcome>
where
    R: ScalarRing,
    P: Fn(&str) -> Result<R::Elem>,
{
    let gen = load_generator(cfg, ring.clone())?;
    let overrides = parse_index_map::<R, P>(&cfg.params.free_choices, parse)?;
    let nf = aj::normal_form(&gen, &overrides)?;
    let free: BTreeMap<String, serde_json::Value> = nf
        .free_choices
        .iter()
        .map(|(k, v)| (k.to_string(), ring.elem_to_json(v)))
        .collect();
    let report = serde_json::json!({
        "schema": SCHEMA,
        "command": "normalize",
        "l": gen.l(),
        "generator": gen.series().to_json(),
        "delta": ring.elem_to_json(&nf.delta),
        "T": nf.t.to_json(),
        "normal_generator": nf.normal_generator().to_json(),
        "free_choices": free,
    });
    let text = format!(
        "l = {}\ndelta = {}\nT = {}\nnormal generator = {}",
        gen.l(),
        ring.format_elem(&nf.delta),
        nf.t.to_text(),
        nf.normal_generator().to_text(),
    );
    Ok(JobOutcome {
        report,
        text,
        verified: true,
    })
}

fn run_solve<R, P>(cfg: &JobConfig, ring: R, parse: &P) -> Result<JobOutcome>
where
    R: ScalarRing,
    P: Fn(&str) -> Result<R::Elem>,
{
    let gen = load_generator(cfg, ring.clone())?;
    let c1 = parse(require(&cfg.params.c1, "params.c1")?)?;
    let seeds = parse_index_map::<R, P>(&cfg.params.seeds, parse)?;
    let sol = if cfg.params.seeds.is_some() {
        aj::solve_direct_recurrence(&gen, &c1, &seeds)?
    } else {
        let c_lp1 = cfg
            .params
            .c_lp1
            .as_deref()
            .map(|s| parse(s))
            .transpose()?;
        let tail = cfg
            .params
            .tail
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>>>()?;
        aj::solve_full(&gen, &SolveParams { c1, c_lp1, tail })?
    };
    // normal-form data is part of the solver story for l >= 1
    let (delta, t) = if gen.l() >= 1 && cfg.params.seeds.is_none() {
        let nf = aj::normal_form(&gen, &BTreeMap::new())?;
        (
            Some(ring.elem_to_json(&nf.delta)),
            Some(nf.t.to_json()),
        )
    } else {
        (None, None)
    };
    let free: BTreeMap<String, serde_json::Value> = sol
        .free_choices
        .iter()
        .map(|(k, v)| (k.to_string(), ring.elem_to_json(v)))
        .collect();
    let params = serde_json::json!({
        "c1": ring.elem_to_json(&sol.params.c1),
        "c_lp1": sol.params.c_lp1.as_ref().map(|v| ring.elem_to_json(v)),
        "tail": sol.params.tail.iter().map(|v| ring.elem_to_json(v)).collect::<Vec<_>>(),
    });
    let report = serde_json::json!({
        "schema": SCHEMA,
        "command": "solve",
        "generator": gen.series().to_json(),
        "l": gen.l(),
        "delta": delta,
        "T": t,
        "params": params,
        "solution": sol.phi.to_json(),
        "solution_text": sol.phi.to_text(),
        "free_choices": free,
    });
    Ok(JobOutcome {
        report,
        text: sol.phi.to_text(),
        verified: true,
    })
}

fn run_verify<R: ScalarRing>(cfg: &JobConfig, ring: R) -> Result<JobOutcome> {
    let trunc = checked_truncation(cfg)?;
    let h = parse_series(ring.clone(), trunc, require(&cfg.generator, "generator")?)?;
    let phi = parse_series(ring, trunc, require(&cfg.series, "series")?)?;
    let residual = aj::aj_residual(&h, &phi)?;
    let solves = residual.is_zero();
    let report = serde_json::json!({
        "schema": SCHEMA,
        "command": "verify",
        "generator": h.to_json(),
        "series": phi.to_json(),
        "residual": residual.to_json(),
        "solves": solves,
    });
    let text = if solves {
        "residual = 0 (solves)".to_string()
    } else {
        format!("residual = {} (does not solve)", residual.to_text())
    };
    Ok(JobOutcome {
        report,
        text,
        verified: solves,
    })
}

fn random_rational(rng: &mut StdRng) -> Rational {
    Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

fn random_solution<R: ScalarRing>(
    gen: &Generator<R>,
    rng: &mut StdRng,
) -> Result<Series<R>> {
    let ring = gen.ring();
    let l = gen.l() as usize;
    let c1 = if l == 0 {
        let mut c = Rational::zero();
        while c.is_zero() {
            c = random_rational(rng);
        }
        ring.from_rational(&c)
    } else {
        let roots = ring.roots_of_unity(gen.l());
        roots[rng.gen_range(0..roots.len())].clone()
    };
    let trunc = gen.truncation();
    let s = trunc.bound();
    let needs_lp1 = l >= 1 && (!trunc.is_finite() || s >= 2 * l + 1);
    let params = SolveParams {
        c1,
        c_lp1: needs_lp1.then(|| ring.from_rational(&random_rational(rng))),
        tail: if l >= 1 && trunc.is_finite() {
            (0..l)
                .map(|_| ring.from_rational(&random_rational(rng)))
                .collect()
        } else {
            Vec::new()
        },
    };
    Ok(aj::solve_full(gen, &params)?.phi)
}

fn run_group_check<R: ScalarRing>(cfg: &JobConfig, ring: R) -> Result<JobOutcome> {
    let gen = load_generator(cfg, ring)?;
    let mut rng = StdRng::seed_from_u64(cfg.rng_seed);
    let count = cfg.samples.max(2);
    let mut violations: Vec<String> = Vec::new();
    let mut sols = Vec::with_capacity(count);
    for i in 0..count {
        match random_solution(&gen, &mut rng) {
            Ok(phi) => sols.push(phi),
            Err(e) => violations.push(format!("sample {i} failed to solve: {e}")),
        }
    }
    let h = gen.series();
    for (i, phi) in sols.iter().enumerate() {
        if !aj::aj_residual(h, phi)?.is_zero() {
            violations.push(format!("sample {i}: nonzero residual"));
        }
        let inv = phi.compositional_inverse()?;
        if !aj::aj_residual(h, &inv)?.is_zero() {
            violations.push(format!("sample {i}: inverse does not solve"));
        }
        let (lc, g) = groups::decompose_semidirect(h, phi)?;
        if lc.compose(&g)? != *phi {
            violations.push(format!("sample {i}: semidirect factors do not recompose"));
        }
    }
    for pair in sols.chunks_exact(2) {
        let composed = pair[0].compose(&pair[1])?;
        if !aj::aj_residual(h, &composed)?.is_zero() {
            violations.push("composition of two solutions does not solve".to_string());
        }
        // the parameter map is a homomorphism in the plain/bar regimes
        // and in the hat regime at s = 2l (shorter rings pick up cross
        // terms under composition)
        let l = gen.l() as usize;
        let trunc = gen.truncation();
        let hom_regime =
            l >= 1 && (!trunc.is_finite() || trunc.bound() >= 2 * l + 1 || trunc.bound() == 2 * l);
        if hom_regime {
            let ea = groups::params_of_solution(&gen, &pair[0])?;
            let eb = groups::params_of_solution(&gen, &pair[1])?;
            let eab = groups::params_of_solution(&gen, &composed)?;
            if eab != ea.compose(&eb)? {
                violations.push("parameter extraction is not a homomorphism".to_string());
            }
        }
    }
    let probe_len = sols.len().min(12);
    let witness = groups::commutativity_probe(&sols[..probe_len])?;
    let report = serde_json::json!({
        "schema": SCHEMA,
        "command": "group-check",
        "claim": "sampled solutions form a group with diamond parameter law",
        "l": gen.l(),
        "sampled": sols.len(),
        "rng_seed": cfg.rng_seed,
        "violations": violations,
        "commutative_on_sample": witness.is_none(),
        "witness": witness
            .as_ref()
            .map(|(a, b)| serde_json::json!([a.to_json(), b.to_json()])),
    });
    let verified = violations.is_empty() && witness.is_none();
    let text = if !violations.is_empty() {
        format!("group check FAILED: {}", violations.join("; "))
    } else if let Some((a, b)) = &witness {
        format!(
            "group law holds on {} samples; noncommutativity witness: {} and {}",
            sols.len(),
            a.to_text(),
            b.to_text()
        )
    } else {
        format!("group law holds on {} samples; commutative on sample", sols.len())
    };
    Ok(JobOutcome {
        report,
        text,
        verified,
    })
}

fn run_flow_check(cfg: &JobConfig) -> Result<JobOutcome> {
    let l = *require(&cfg.l, "l")?;
    if l == 0 {
        return Err(Error::Invalid("flow-check requires l >= 1".into()));
    }
    let precision = *require(&cfg.precision, "precision")?;
    check_cap(precision)?;
    let fam = flows::build_genex_family(l, precision);
    let translation = flows::check_translation_equation(&fam)?;
    let s1 = flows::genex_matches_s1(l, precision)?;
    let generator = flows::extract_generator(&fam);
    let holds = translation.is_none();
    let report = serde_json::json!({
        "schema": SCHEMA,
        "command": "flow-check",
        "mode": "evidence",
        "l": l,
        "precision": precision,
        "translation_identity": match &translation {
            None => serde_json::json!("holds"),
            Some((n, p)) => serde_json::json!({ "fails_at": [n, p.format_with(&["t1", "t2"])] }),
        },
        "s1_agreement": match s1 {
            None => serde_json::json!("holds"),
            Some(n) => serde_json::json!({ "fails_at": n }),
        },
        "generator": generator.to_json(),
    });
    let text = match &translation {
        None => format!(
            "translation_identity: holds (l = {l}, precision = {precision})\ns1_agreement: {}",
            if s1.is_none() { "holds" } else { "FAILS" }
        ),
        Some((n, p)) => format!(
            "translation_identity: fails at x^{n} with residual {}",
            p.format_with(&["t1", "t2"])
        ),
    };
    Ok(JobOutcome {
        report,
        text,
        verified: holds && s1.is_none(),
    })
}

fn run_comb_debug(cfg: &JobConfig) -> Result<JobOutcome> {
    let n = *require(&cfg.n, "n")?;
    let i = *require(&cfg.i, "i")?;
    check_cap(n)?;
    let selector = match cfg.selector.as_deref().unwrap_or("full") {
        "full" => Selector::Full,
        name => {
            let l = *require(&cfg.l, "l (required by restricted selectors)")?;
            match name {
                "hat" => Selector::Hat(l),
                "bar" => Selector::Bar(l),
                "mod" => Selector::Mod(l),
                "check" => Selector::Check(l),
                "tilde" => Selector::Tilde(l),
                other => {
                    return Err(Error::Invalid(format!("unknown selector `{other}`")));
                }
            }
        }
    };
    let vectors = comb::enumerate(n as u32, i as u32, selector);
    let rows: Vec<serde_json::Value> = vectors
        .iter()
        .map(|v| {
            serde_json::json!({
                "u": v.entries.clone(),
                "weight": v.weight.to_string(),
            })
        })
        .collect();
    let report = serde_json::json!({
        "schema": SCHEMA,
        "command": "comb-debug",
        "n": n,
        "i": i,
        "selector": cfg.selector.as_deref().unwrap_or("full"),
        "count": vectors.len(),
        "vectors": rows,
    });
    let mut text = format!("{} index vectors for n = {n}, i = {i}\n", vectors.len());
    for v in vectors.iter() {
        text.push_str(&format!("u = {:?}, weight = {}\n", v.entries, v.weight));
    }
    Ok(JobOutcome {
        report,
        text: text.trim_end().to_string(),
        verified: true,
    })
}

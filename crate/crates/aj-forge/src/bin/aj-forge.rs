//! Command-line frontend: each subcommand is translated into a
//! `jobs::JobConfig` and executed through the shared job layer.
//!
//! Exit codes: 0 — success / property holds; 1 — checked and false
//! (nonzero residual, witness found); 2 — usage or domain error.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aj_forge::jobs::{
    self, Command as JobCommand, FieldSpec, JobConfig, OutputMode, ParamSpec, TruncSpec,
};

#[derive(Parser)]
#[command(
    name = "aj-forge",
    about = "Exact solvers and checkers for a third-order formal iteration equation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Coefficient field: `q` or `cyclotomic:<m>`
    #[arg(long, default_value = "q", global = true)]
    field: String,

    /// Output format
    #[arg(long, value_enum, default_value = "text", global = true)]
    output: OutputArg,
}

#[derive(Args)]
struct RingArgs {
    /// Finite truncation order s (work in the ring mod x^{s+1})
    #[arg(long, short = 's', conflicts_with = "infinite")]
    s: Option<usize>,

    /// Working precision N for s = infinity
    #[arg(long, short = 'N')]
    infinite: Option<usize>,
}

impl RingArgs {
    fn to_spec(&self) -> Option<TruncSpec> {
        match (self.s, self.infinite) {
            (Some(s), _) => Some(TruncSpec::Finite(s)),
            (None, Some(n)) => Some(TruncSpec::Infinite(n)),
            (None, None) => None,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Conjugate a generator to its normal form x^{l+1} + delta*x^{2l+1}
    Normalize {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ring: RingArgs,
        /// Generator literal, e.g. "x^2 + 3*x^3"
        #[arg(long, allow_hyphen_values = true)]
        generator: String,
        /// Override a free coefficient of T, as index=value (repeatable)
        #[arg(long = "free", value_name = "IDX=VAL", allow_hyphen_values = true)]
        free: Vec<String>,
    },
    /// Solve for the series with the given parameters
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        generator: String,
        /// Expected order parameter l (checked against the generator)
        #[arg(long)]
        l: Option<u32>,
        /// Linear coefficient c1
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        /// Coefficient c_{l+1} (required when s >= 2l+1 or s infinite, l >= 1)
        #[arg(long = "c-lp1", allow_hyphen_values = true)]
        c_lp1: Option<String>,
        /// Tail coefficients c_{s-l+1},...,c_s (comma separated)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        tail: Vec<String>,
        /// Direct-recurrence seed, as index=value (repeatable; selects
        /// the recurrence path instead of the normal-form path)
        #[arg(long = "seed", value_name = "IDX=VAL", allow_hyphen_values = true)]
        seeds: Vec<String>,
    },
    /// Check whether a series solves the equation for a generator
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        generator: String,
        /// Candidate solution literal
        #[arg(long, allow_hyphen_values = true)]
        series: String,
    },
    /// Sampled structural checks of the solution group
    GroupCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, allow_hyphen_values = true)]
        generator: String,
        /// Number of sampled solutions
        #[arg(long, default_value_t = jobs::DEFAULT_SAMPLES)]
        samples: usize,
        /// RNG seed for reproducible sampling
        #[arg(long = "rng-seed", default_value_t = jobs::DEFAULT_RNG_SEED)]
        rng_seed: u64,
    },
    /// Exact translation-equation check for the explicit flow family
    FlowCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        l: u32,
        /// Working precision N
        #[arg(long)]
        precision: usize,
    },
    /// Enumerate a multinomial index family
    CombDebug {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        /// One of: full, hat, bar, mod, check, tilde
        #[arg(long, default_value = "full")]
        selector: String,
        /// Order parameter for the restricted selectors
        #[arg(long)]
        l: Option<u32>,
    },
}

fn parse_field(text: &str) -> Result<FieldSpec, String> {
    match text {
        "q" | "Q" => Ok(FieldSpec::Q),
        other => match other.strip_prefix("cyclotomic:") {
            Some(m) => m
                .parse()
                .map(FieldSpec::Cyclotomic)
                .map_err(|_| format!("bad cyclotomic order in `{other}`")),
            None => Err(format!(
                "unknown field `{other}` (expected `q` or `cyclotomic:<m>`)"
            )),
        },
    }
}

fn parse_assignments(items: &[String]) -> Result<Option<BTreeMap<String, String>>, String> {
    if items.is_empty() {
        return Ok(None);
    }
    let mut map = BTreeMap::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("expected index=value, got `{item}`"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(Some(map))
}

fn build_config(cmd: &Cmd) -> Result<JobConfig, String> {
    let base = |common: &CommonArgs, command: JobCommand| -> Result<JobConfig, String> {
        Ok(JobConfig {
            command,
            field: parse_field(&common.field)?,
            truncation: None,
            generator: None,
            series: None,
            l: None,
            precision: None,
            n: None,
            i: None,
            selector: None,
            params: ParamSpec::default(),
            output: match common.output {
                OutputArg::Text => OutputMode::Text,
                OutputArg::Json => OutputMode::Json,
            },
            rng_seed: jobs::DEFAULT_RNG_SEED,
            samples: jobs::DEFAULT_SAMPLES,
        })
    };
    let need_trunc = |ring: &RingArgs| -> Result<TruncSpec, String> {
        ring.to_spec()
            .ok_or_else(|| "one of --s or --infinite is required".to_string())
    };

    match cmd {
        Cmd::Normalize {
            common,
            ring,
            generator,
            free,
        } => {
            let mut cfg = base(common, JobCommand::Normalize)?;
            cfg.truncation = Some(need_trunc(ring)?);
            cfg.generator = Some(generator.clone());
            cfg.params.free_choices = parse_assignments(free)?;
            Ok(cfg)
        }
        Cmd::Solve {
            common,
            ring,
            generator,
            l,
            c1,
            c_lp1,
            tail,
            seeds,
        } => {
            let mut cfg = base(common, JobCommand::Solve)?;
            cfg.truncation = Some(need_trunc(ring)?);
            cfg.generator = Some(generator.clone());
            cfg.l = *l;
            cfg.params.c1 = Some(c1.clone());
            cfg.params.c_lp1 = c_lp1.clone();
            cfg.params.tail = if tail.is_empty() {
                None
            } else {
                Some(tail.clone())
            };
            cfg.params.seeds = parse_assignments(seeds)?;
            Ok(cfg)
        }
        Cmd::Verify {
            common,
            ring,
            generator,
            series,
        } => {
            let mut cfg = base(common, JobCommand::Verify)?;
            cfg.truncation = Some(need_trunc(ring)?);
            cfg.generator = Some(generator.clone());
            cfg.series = Some(series.clone());
            Ok(cfg)
        }
        Cmd::GroupCheck {
            common,
            ring,
            generator,
            samples,
            rng_seed,
        } => {
            let mut cfg = base(common, JobCommand::GroupCheck)?;
            cfg.truncation = Some(need_trunc(ring)?);
            cfg.generator = Some(generator.clone());
            cfg.samples = *samples;
            cfg.rng_seed = *rng_seed;
            Ok(cfg)
        }
        Cmd::FlowCheck {
            common,
            l,
            precision,
        } => {
            let mut cfg = base(common, JobCommand::FlowCheck)?;
            cfg.l = Some(*l);
            cfg.precision = Some(*precision);
            Ok(cfg)
        }
        Cmd::CombDebug {
            common,
            n,
            i,
            selector,
            l,
        } => {
            let mut cfg = base(common, JobCommand::CombDebug)?;
            cfg.n = Some(*n);
            cfg.i = Some(*i);
            cfg.selector = Some(selector.clone());
            cfg.l = *l;
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.command) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match jobs::run(&cfg) {
        Ok(outcome) => {
            println!("{}", outcome.render(cfg.output));
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

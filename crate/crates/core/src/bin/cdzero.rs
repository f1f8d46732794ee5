//! `cdzero`: element arithmetic, spectra, zero-divisor constructors,
//! worked-example replay and seeded sweeps.
//!
//! stdout carries the payload only; diagnostics go to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cdzero::notation::parse_element;
use cdzero::spectrum::{self, SCHEMA_VERSION};
use cdzero::stiefel::{classify, sweep_stiefel_zero_divisors};
use cdzero::verify::{verify_paper, VerificationReport};
use cdzero::zero_divisors::{
    annihilator, construct_orthogonal, construct_promote_pure, construct_spectral, construct_tilde_partner,
    sweep_constructors, Sign, ZeroDivisorPair,
};
use cdzero::{identities, AnyElement, CdElement, CdError};

const MAX_LEVEL: u32 = 10;

#[derive(Parser)]
#[command(name = "cdzero", version, about = "Cayley-Dickson zero divisors and spectra")]
struct Cli {
    /// Algebra level n (dimension 2^n).
    #[arg(short = 'n', long = "level", global = true)]
    level: Option<u32>,
    /// Numerical tolerance for spectra and floating constructions.
    #[arg(long, global = true, default_value_t = spectrum::DEFAULT_CLUSTER_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    count: usize,
    /// Emit JSON; with a file argument the JSON goes to that file. Place it
    /// after positional arguments.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "FILE")]
    json: Option<PathBuf>,
    /// Restrict verify-paper cases or identity sweeps to names containing this text.
    #[arg(long, global = true)]
    only: Option<String>,
    /// Permit levels above 10.
    #[arg(long, global = true)]
    allow_large: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Product of two elements.
    Mul {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Conjugate.
    Conj {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// `a~ = a e~0`.
    Tilde {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Swap of the two halves.
    Hat {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Spectrum of a doubly pure element.
    Spectrum {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Annihilator (kernel of left multiplication).
    Annihilator {
        #[arg(allow_hyphen_values = true)]
        element: String,
    },
    /// Build a certified zero divisor one level up.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Stiefel / non-trivial classification of a pure pair.
    Classify {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Replay worked examples and identities.
    VerifyPaper,
    /// Seeded randomized sweep.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Stiefel)]
        kind: SweepKind,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// `(a, b)` with `b` in `H_a^perp`, `|a| = |b|`.
    Orthogonal {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// `(a, ±a~)` annihilated by `(x, ∓x~)`.
    TildePartner {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
    },
    /// `(a, ±m e~0)` for a nonzero spectral value of `a`.
    Spectral {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
    },
    /// Partner `beta` for a pure `alpha` with `(alpha, beta)` a zero divisor.
    Promote {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        sigma: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Stiefel,
    Identities,
    Constructors,
}

/// Failure of a command: a library error or failed verification cases.
enum Failure {
    Lib(CdError),
    Verification(Vec<String>),
}

impl From<CdError> for Failure {
    fn from(e: CdError) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn level(&self) -> Result<u32, CdError> {
        let n = self.cli.level.ok_or_else(|| CdError::Parse("missing -n/--level".into()))?;
        if n > MAX_LEVEL {
            if !self.cli.allow_large {
                return Err(CdError::Precondition(format!(
                    "level {n} exceeds {MAX_LEVEL}; pass --allow-large to proceed"
                )));
            }
            log::warn!("level {n}: dense operators have {} entries", 1u128 << (2 * n));
        }
        Ok(n)
    }

    fn element(&self, text: &str) -> Result<CdElement, CdError> {
        parse_element(self.level()?, text)
    }

    fn json_wanted(&self) -> bool {
        self.cli.json.is_some()
    }

    /// Prints `text` or, with `--json`, the JSON payload (to the named file
    /// when one was given).
    fn emit(&self, text: &str, payload: &Value) -> Result<(), CdError> {
        match &self.cli.json {
            None => println!("{text}"),
            Some(path) if path.as_os_str() == "-" => println!("{}", pretty(payload)),
            Some(path) => {
                std::fs::write(path, pretty(payload) + "\n")
                    .map_err(|e| CdError::Precondition(format!("cannot write {}: {e}", path.display())))?;
                println!("{text}");
            }
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn versioned(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    v
}

fn element_payload(level: u32, op: &str, e: &CdElement) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "level": level,
        "op": op,
        "result": e,
        "text": e.to_string(),
    })
}

fn unary(ctx: &Ctx, op: &str, text: &str, f: impl Fn(&CdElement) -> Result<CdElement, CdError>) -> Outcome {
    let e = ctx.element(text)?;
    let out = f(&e)?;
    ctx.emit(&out.to_string(), &element_payload(e.level(), op, &out))?;
    Ok(())
}

fn pair_text(pair: &ZeroDivisorPair) -> String {
    format!(
        "alpha = {}\nchi = {}\nconstruction = {}\nresidual = {:e}",
        pair.alpha,
        pair.chi,
        pair.construction.name(),
        pair.residual
    )
}

fn annihilator_dim(e: &AnyElement) -> Result<usize, CdError> {
    Ok(match e {
        AnyElement::Exact(a) => annihilator(a)?.dim,
        AnyElement::Float(a) => annihilator(a)?.dim,
    })
}

fn pair_payload(pair: &ZeroDivisorPair) -> Result<Value, CdError> {
    let mut v = to_value(pair);
    v["annihilator_dim"] = json!(annihilator_dim(&pair.alpha)?);
    v["alpha_text"] = json!(pair.alpha.to_string());
    v["chi_text"] = json!(pair.chi.to_string());
    Ok(versioned(v))
}

fn parse_scalar(text: &str) -> Result<f64, CdError> {
    use cdzero::Scalar;
    text.trim()
        .parse::<f64>()
        .or_else(|_| cdzero::scalar::parse_rational(text).map(|q| q.to_f64()))
        .map_err(|_| CdError::Parse(format!("invalid number `{text}`")))
}

fn construct(ctx: &Ctx, kind: &ConstructKind) -> Outcome {
    let (pair, extra) = match kind {
        ConstructKind::Orthogonal { a, b } => (construct_orthogonal(&ctx.element(a)?, &ctx.element(b)?)?, None),
        ConstructKind::TildePartner { a, x, sign } => {
            (construct_tilde_partner(&ctx.element(a)?, (*sign).into(), &ctx.element(x)?)?, None)
        }
        ConstructKind::Spectral { a, sigma, x, sign } => {
            let x = x.as_deref().map(|t| ctx.element(t)).transpose()?;
            let pair =
                construct_spectral(&ctx.element(a)?, parse_scalar(sigma)?, x.as_ref(), (*sign).into(), ctx.cli.tol)?;
            (pair, None)
        }
        ConstructKind::Promote { alpha, sigma } => {
            let sigma = sigma.as_deref().map(parse_scalar).transpose()?;
            let promo = construct_promote_pure(&ctx.element(alpha)?, sigma)?;
            (promo.pair, Some(promo.beta))
        }
    };
    let mut payload = pair_payload(&pair)?;
    let mut text = pair_text(&pair);
    if let Some(beta) = extra {
        text = format!("beta = {beta}\n{text}");
        payload["beta"] = to_value(&beta);
        payload["beta_text"] = json!(beta.to_string());
    }
    ctx.emit(&text, &payload)?;
    Ok(())
}

fn spectrum_cmd(ctx: &Ctx, text: &str) -> Outcome {
    let e = ctx.element(text)?;
    let report = spectrum::spectrum(&e, ctx.cli.tol)?;
    let values: Vec<String> = report.distinct().iter().map(|v| format!("{}", round_display(*v))).collect();
    let mut lines = vec![format!("{{{}}}", values.join(", "))];
    for c in &report.clusters {
        lines.push(format!("  {} x{} (residual {:.1e})", round_display(c.lambda), c.multiplicity, c.residual));
    }
    ctx.emit(&lines.join("\n"), &to_value(&report))?;
    Ok(())
}

/// Values within 1e-9 of an integer print as that integer.
fn round_display(v: f64) -> f64 {
    if (v - v.round()).abs() <= 1e-9 {
        v.round() + 0.0
    } else {
        v
    }
}

fn annihilator_cmd(ctx: &Ctx, text: &str) -> Outcome {
    let e = ctx.element(text)?;
    let ann = annihilator(&e)?;
    let mut lines = vec![format!("dim {}", ann.dim)];
    lines.extend(ann.basis.iter().map(|b| format!("  {b}")));
    ctx.emit(&lines.join("\n"), &versioned(to_value(&ann)))?;
    Ok(())
}

fn classify_cmd(ctx: &Ctx, a: &str, b: &str) -> Outcome {
    let c = classify(&ctx.element(a)?, &ctx.element(b)?)?;
    let text = format!(
        "stiefel = {}\nnon_trivial = {}\ncase = {}",
        c.is_stiefel,
        c.is_nontrivial,
        c.case_tag.map_or("none".to_string(), |t| format!("{t:?}"))
    );
    ctx.emit(&text, &versioned(to_value(&c)))?;
    Ok(())
}

fn summary_table(reports: &[VerificationReport]) -> String {
    let width = reports.iter().map(|r| r.case_id.len()).max().unwrap_or(0);
    let mut lines: Vec<String> = reports
        .iter()
        .map(|r| format!("{:<width$}  {}", r.case_id, if r.passed() { "pass" } else { "FAIL" }))
        .collect();
    let passed = reports.iter().filter(|r| r.passed()).count();
    lines.push(format!("{passed}/{} cases passed", reports.len()));
    lines.join("\n")
}

fn verify_cmd(ctx: &Ctx) -> Outcome {
    let reports = verify_paper(ctx.cli.only.as_deref());
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.case_id.clone()).collect();
    let payload = json!({
        "schema_version": SCHEMA_VERSION,
        "passed": reports.len() - failed.len(),
        "failed": failed.len(),
        "cases": reports,
    });
    ctx.emit(&summary_table(&reports), &payload)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

fn sweep_cmd(ctx: &Ctx, kind: SweepKind) -> Outcome {
    let (level, count, seed) = (ctx.level()?, ctx.cli.count, ctx.cli.seed);
    let payload = match kind {
        SweepKind::Stiefel => to_value(&sweep_stiefel_zero_divisors(level, count, seed)?),
        SweepKind::Identities => {
            to_value(&identities::sweep_identities(&[level], count, seed, ctx.cli.only.as_deref())?)
        }
        SweepKind::Constructors => to_value(&sweep_constructors(level, count, seed)?),
    };
    let text = pretty(&payload);
    if ctx.json_wanted() {
        ctx.emit(&text, &payload)?;
    } else {
        println!("{text}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Mul { lhs, rhs } => {
            let (a, b) = (ctx.element(lhs)?, ctx.element(rhs)?);
            let p = cdzero::multiply(&a, &b)?;
            ctx.emit(&p.to_string(), &element_payload(a.level(), "mul", &p))?;
            Ok(())
        }
        Command::Conj { element } => unary(&ctx, "conj", element, |e| Ok(e.conjugate())),
        Command::Tilde { element } => unary(&ctx, "tilde", element, |e| e.tilde()),
        Command::Hat { element } => unary(&ctx, "hat", element, |e| e.hat()),
        Command::Spectrum { element } => spectrum_cmd(&ctx, element),
        Command::Annihilator { element } => annihilator_cmd(&ctx, element),
        Command::Construct { kind } => construct(&ctx, kind),
        Command::Classify { a, b } => classify_cmd(&ctx, a, b),
        Command::VerifyPaper => verify_cmd(&ctx),
        Command::Sweep { kind } => sweep_cmd(&ctx, *kind),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Verification(ids)) => {
            eprintln!("failed cases: {}", ids.join(", "));
            ExitCode::from(1)
        }
    }
}

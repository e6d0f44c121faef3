use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use supertwist::geometry::{ConnectionTable, VectorField};
use supertwist::graded::SuperScalar;
use supertwist::parser::{parse_expression, parse_scenario, ScenarioDocument};
use supertwist::products::{verify, ClaimId, ClaimResult, Tier, VerificationReport};

/// Residuals longer than this many characters are cut in text output.
const DEFAULT_MAX_EXPR_LEN: usize = 200;
const MAX_EXPR_LEN_VAR: &str = "SUPERTWIST_MAX_EXPR_LEN";

#[derive(Parser)]
#[command(
    name = "supertwist",
    version,
    about = "Exact curvature computations and formula checks on super twisted products",
    after_help = "Text output cuts expressions longer than SUPERTWIST_MAX_EXPR_LEN characters \
                  (default 200, 0 disables the cut); JSON output is never cut."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check closed-form claims against direct computation on every frame tuple.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated claim ids or `all`; defaults to the scenario's list.
        #[arg(long, value_parser = parse_claims)]
        claims: Option<ClaimList>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = FailOn::MustPassOnly)]
        fail_on: FailOn,
    },
    /// Evaluate one operator of the product metric.
    Compute {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        tensor: Tensor,
        /// Frames such as `dx`, and for gradient, laplacian and hessian a
        /// leading function expression. Commas inside parentheses do not split.
        #[arg(long, default_value = "")]
        args: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FailOn {
    MustPassOnly,
    AnyClaim,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tensor {
    Connection,
    Curvature,
    Ricci,
    Gradient,
    Divergence,
    Laplacian,
    Hessian,
    K,
    W2,
}

impl Tensor {
    fn name(self) -> &'static str {
        match self {
            Tensor::Connection => "connection",
            Tensor::Curvature => "curvature",
            Tensor::Ricci => "ricci",
            Tensor::Gradient => "gradient",
            Tensor::Divergence => "divergence",
            Tensor::Laplacian => "laplacian",
            Tensor::Hessian => "hessian",
            Tensor::K => "k",
            Tensor::W2 => "w2",
        }
    }

    /// Whether the first argument is a function rather than a frame, and
    /// the number of frames that follow.
    fn arity(self) -> (bool, usize) {
        match self {
            Tensor::Connection | Tensor::Ricci => (false, 2),
            Tensor::Curvature | Tensor::K => (false, 3),
            Tensor::W2 => (false, 4),
            Tensor::Divergence => (false, 1),
            Tensor::Gradient | Tensor::Laplacian => (true, 0),
            Tensor::Hessian => (true, 2),
        }
    }
}

#[derive(Clone)]
struct ClaimList(Vec<ClaimId>);

fn parse_claims(s: &str) -> Result<ClaimList, String> {
    ClaimId::parse_list(s)
        .map(ClaimList)
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Err` is an input error; verification failures come back as exit code 1.
fn run(cli: Cli) -> Result<ExitCode> {
    let max_len = max_expr_len()?;
    match cli.command {
        Command::Verify {
            scenario,
            claims,
            format,
            fail_on,
        } => {
            let doc = load(&scenario)?;
            let claims = claims.map_or_else(|| doc.claims.clone(), |c| c.0);
            let report = verify(&doc.spec, &display_name(&scenario), &claims)
                .with_context(|| format!("{}", scenario.display()))?;
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", render_report(&report, max_len)),
            }
            let ok = match fail_on {
                FailOn::MustPassOnly => report.must_pass_ok(),
                FailOn::AnyClaim => report.all_ok(),
            };
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Compute {
            scenario,
            tensor,
            args,
            format,
        } => {
            let doc = load(&scenario)?;
            let args = split_args(&args);
            let value = compute(&doc, tensor, &args)?;
            match format {
                Format::Json => {
                    let out = json!({
                        "scenario": display_name(&scenario),
                        "tensor": tensor.name(),
                        "args": args,
                        "value": value,
                    });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                Format::Text => {
                    let (s, cut) = truncate(&value, max_len);
                    println!("{s}");
                    if cut {
                        println!("(expression cut at {max_len} characters; use --format json for the full value)");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn max_expr_len() -> Result<usize> {
    match std::env::var(MAX_EXPR_LEN_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("{MAX_EXPR_LEN_VAR} must be a non-negative integer, got `{v}`")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_EXPR_LEN),
        Err(e) => Err(anyhow!("{MAX_EXPR_LEN_VAR}: {e}")),
    }
}

fn load(path: &Path) -> Result<ScenarioDocument> {
    let src =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_scenario(&src).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Splits on commas outside parentheses, so `h(x,y),dx` is two arguments.
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn compute(doc: &ScenarioDocument, tensor: Tensor, args: &[String]) -> Result<String> {
    let (takes_fn, frames) = tensor.arity();
    let expected = frames + usize::from(takes_fn);
    if args.len() != expected {
        bail!(
            "`{}` takes {expected} argument{}, got {}",
            tensor.name(),
            if expected == 1 { "" } else { "s" },
            args.len()
        );
    }
    let chart = doc.chart();
    let f = if takes_fn {
        Some(parse_expression(&args[0], chart).map_err(|e| anyhow!("`{}`: {e}", args[0]))?)
    } else {
        None
    };
    let v: Vec<VectorField> = args[usize::from(takes_fn)..]
        .iter()
        .map(|a| {
            doc.frame(a)
                .map(|i| VectorField::frame(chart, i))
                .ok_or_else(|| anyhow!("unknown frame `{a}`"))
        })
        .collect::<Result<_>>()?;
    let metric = doc.spec.build()?;
    let lc = ConnectionTable::levi_civita(&metric)?;
    let scalar = |s: SuperScalar| s.to_string();
    let field = |x: VectorField| x.to_string();
    let f = || f.clone().expect("function argument");
    Ok(match tensor {
        Tensor::Connection => field(lc.covariant_derivative(&v[0], &v[1])?),
        Tensor::Curvature => field(lc.curvature(&v[0], &v[1], &v[2])?),
        Tensor::Ricci => scalar(lc.ricci(&v[0], &v[1])?),
        Tensor::Divergence => scalar(lc.divergence(&v[0])?),
        Tensor::Gradient => field(lc.gradient(&f())?),
        Tensor::Laplacian => scalar(lc.laplacian(&f())?),
        Tensor::Hessian => scalar(lc.hessian(&f(), &v[0], &v[1])?),
        Tensor::K => field(lc.k_tensor(&v[0], &v[1], &v[2])?),
        Tensor::W2 => scalar(lc.w2(&v[0], &v[1], &v[2], &v[3])?),
    })
}

/// Cuts `s` to `max` characters with a trailing ellipsis; 0 keeps it whole.
fn truncate(s: &str, max: usize) -> (String, bool) {
    if max == 0 || s.chars().count() <= max {
        return (s.to_string(), false);
    }
    let mut out: String = s.chars().take(max).collect();
    out.push('…');
    (out, true)
}

fn render_report(report: &VerificationReport, max_len: usize) -> String {
    let mut out = String::new();
    let mut any_cut = false;
    let _ = writeln!(out, "scenario: {}", report.scenario);
    for c in &report.claims {
        render_claim(&mut out, c, max_len, &mut any_cut);
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "summary: {} passed, {} failed, {} reported",
        s.passed, s.failed, s.reported
    );
    if any_cut {
        let _ = writeln!(
            out,
            "some residuals were cut at {max_len} characters; use --format json for full residuals"
        );
    }
    out
}

fn render_claim(out: &mut String, c: &ClaimResult, max_len: usize, any_cut: &mut bool) {
    let bad: Vec<_> = c.cases.iter().filter(|k| !k.pass).collect();
    let status = match (c.pass, c.tier) {
        (true, _) => "ok",
        (false, Tier::MustPass) => "FAIL",
        (false, Tier::Report) => "REPORT",
    };
    let _ = write!(
        out,
        "{:<7} {:<9} {:<6} ",
        c.id.as_str(),
        c.tier.as_str(),
        status
    );
    if bad.is_empty() {
        let _ = writeln!(out, "{} cases", c.cases.len());
    } else {
        let _ = writeln!(out, "{} of {} cases fail", bad.len(), c.cases.len());
    }
    if let Some(note) = &c.note {
        let _ = writeln!(out, "    note: {note}");
    }
    for k in bad {
        let (r, cut) = truncate(&k.residual, max_len);
        *any_cut |= cut;
        let _ = writeln!(out, "    ({}) residual: {r}", k.frames.join(", "));
    }
}

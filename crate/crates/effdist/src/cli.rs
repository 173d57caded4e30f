//! Command-line front end.
//!
//! Every subcommand parses exact inputs (dyadics as `"m/2^e"` or integer
//! strings, rationals as `"a/b"`), runs the certified computation, and
//! emits deterministic output: CSV tables of certified interval endpoints
//! or JSON certificates. Interval endpoints are printed as decimals rounded
//! outward, so the printed interval still encloses the exact value and
//! satisfies the requested width bound.
//!
//! Exit codes: 0 success, 2 parse error, 3 budget exhausted,
//! 4 invalid characteristic-function oracle, 1 anything else.
//! `EFFDIST_CELL_BUDGET` caps quadrature cells per integral.

use crate::charfun::{CharCert, CharOracle};
use crate::dist::{self, dist_from_json, tightness, DistOracle, Freq};
use crate::dml::{self, BernoulliParams};
use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::testfn::TestFunction;
use crate::transfer;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::sync::Arc;

#[derive(Parser, Debug)]
#[command(
    name = "effdist",
    about = "Certified probability distributions and characteristic functions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified characteristic-function table of a distribution.
    Char(CharArgs),
    /// Effective-tightness certificate of a distribution.
    Tightness(TightnessArgs),
    /// Windowed expectation recovered from a characteristic function.
    Glivenko(GlivenkoArgs),
    /// Mollified density table reconstructed from a characteristic function.
    Bochner(BochnerArgs),
    /// Certified central-limit threshold for standardized coin tossing.
    Dml(DmlArgs),
    /// Run the built-in certified self-checks.
    Selftest,
}

#[derive(Args, Debug)]
pub struct CharArgs {
    /// Distribution spec, e.g. '{"kind":"binomial","m":4,"p":"1/2"}'.
    #[arg(long)]
    pub dist: String,
    /// Evaluate on [-range, range].
    #[arg(long)]
    pub range: String,
    /// Dyadic grid step, e.g. "1/4".
    #[arg(long)]
    pub grid_step: String,
    /// Requested precision k (widths below 2^-k).
    #[arg(long)]
    pub precision: i64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Args, Debug)]
pub struct TightnessArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub precision: i64,
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Args, Debug)]
pub struct GlivenkoArgs {
    /// Characteristic-function family, e.g. '{"family":"sinc_uniform","a":"1/2"}'.
    #[arg(long)]
    pub phi: String,
    /// Window w0..w8.
    #[arg(long, default_value = "w1")]
    pub window: String,
    #[arg(long)]
    pub precision: i64,
    /// Also compute the convergence threshold against the built-in
    /// shrinking-uniform family.
    #[arg(long)]
    pub seq: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Args, Debug)]
pub struct BochnerArgs {
    #[arg(long)]
    pub phi: String,
    /// Mollifier index n >= 1.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub range: String,
    #[arg(long)]
    pub grid_step: String,
    #[arg(long)]
    pub precision: i64,
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Args, Debug)]
pub struct DmlArgs {
    /// Success probability as an exact rational, e.g. "1/2".
    #[arg(long)]
    pub p: String,
    /// t-range K (dyadic).
    #[arg(long = "K")]
    pub k_range: String,
    #[arg(long)]
    pub precision: i64,
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Decimal digits so that outward rounding stays within the width budget.
fn digits_for(k: i64) -> u32 {
    ((k.max(1) as u32) * 30103 / 100000) + 2
}

fn fmt_lo(d: &Dyadic, digits: u32) -> String {
    d.to_decimal_rounded(digits, Round::Down)
}

fn fmt_hi(d: &Dyadic, digits: u32) -> String {
    d.to_decimal_rounded(digits, Round::Up)
}

fn parse_window(s: &str) -> Result<TestFunction> {
    let n = s
        .trim()
        .strip_prefix('w')
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| Error::Parse(format!("window must be w0..w8, got {s}")))?;
    if n > 8 {
        return Err(Error::Parse("window index above 8".into()));
    }
    Ok(TestFunction::window(n))
}

/// Build a characteristic-function oracle from its family spec:
/// `constant_one`, `sinc_uniform(a)`, `gaussian`, `binomial_std(p, m)`.
pub fn phi_from_json(spec: &serde_json::Value) -> Result<CharOracle> {
    let family = spec
        .get("family")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse("phi spec needs a \"family\"".into()))?;
    match family {
        "constant_one" => Ok(CharOracle::constant_one()),
        "gaussian" => Ok(CharOracle::gaussian()),
        "sinc_uniform" => {
            let a = spec
                .get("a")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Parse("sinc_uniform needs \"a\"".into()))?;
            CharOracle::sinc_uniform(dist::parse_dyadic(a)?)
        }
        "binomial_std" => {
            let p = spec
                .get("p")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Parse("binomial_std needs \"p\"".into()))?;
            let m = spec
                .get("m")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::Parse("binomial_std needs \"m\"".into()))?;
            let (num, den) = dist::parse_rational(p)?;
            let params = BernoulliParams::new(crate::real::RealOracle::from_ratio(num, den)?)?;
            dml::std_binomial_char_oracle(&params, m)
        }
        other => Err(Error::Parse(format!("unknown phi family: {other}"))),
    }
}

fn parse_json(s: &str) -> Result<serde_json::Value> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad JSON spec: {e}")))
}

fn dyadic_grid(range: &Dyadic, step: &Dyadic) -> Result<Vec<Dyadic>> {
    if !range.is_positive() || !step.is_positive() {
        return Err(Error::Parse("range and grid step must be positive".into()));
    }
    let count = range
        .shift(1)
        .div_round(step, 0, Round::Down)
        .floor_int();
    let count: u64 = count.try_into().map_err(|_| Error::Parse("grid too large".into()))?;
    if count + 1 > crate::limits::limits().grid_cap {
        return Err(Error::GridBudgetExceeded(count + 1));
    }
    let mut out = Vec::with_capacity(count as usize + 1);
    let mut t = range.neg();
    for _ in 0..=count {
        out.push(t.clone());
        t = t.add(step);
    }
    Ok(out)
}

/// Run a parsed command and return its textual output.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Char(args) => run_char(args),
        Command::Tightness(args) => run_tightness(args),
        Command::Glivenko(args) => run_glivenko(args),
        Command::Bochner(args) => run_bochner(args),
        Command::Dml(args) => run_dml(args),
        Command::Selftest => run_selftest(),
    }
}

fn run_char(args: CharArgs) -> Result<String> {
    let spec = parse_json(&args.dist)?;
    let mu = dist_from_json(&spec)?;
    let phi = CharOracle::from_dist(mu);
    let k = args.precision.max(1);
    let grid = dyadic_grid(&dist::parse_dyadic(&args.range)?, &dist::parse_dyadic(&args.grid_step)?)?;
    let digits = digits_for(k);

    let mut rows = Vec::with_capacity(grid.len());
    for t in &grid {
        let v = phi.eval(&Freq::Dyadic(t.clone()), k + 1)?;
        rows.push((t.clone(), v));
    }
    match args.format {
        Format::Csv => {
            let mut out = String::from("t,re_lo,re_hi,im_lo,im_hi\n");
            for (t, v) in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    t.to_decimal_string(),
                    fmt_lo(v.re.lo(), digits),
                    fmt_hi(v.re.hi(), digits),
                    fmt_lo(v.im.lo(), digits),
                    fmt_hi(v.im.hi(), digits),
                ));
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(t, v)| {
                    serde_json::json!({
                        "t": t.to_decimal_string(),
                        "re": [fmt_lo(v.re.lo(), digits), fmt_hi(v.re.hi(), digits)],
                        "im": [fmt_lo(v.im.lo(), digits), fmt_hi(v.im.hi(), digits)],
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "inputs": {"dist": spec, "precision": k},
                "rows": rows,
            });
            Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
        }
    }
}

fn run_tightness(args: TightnessArgs) -> Result<String> {
    let spec = parse_json(&args.dist)?;
    let mu = dist_from_json(&spec)?;
    let k = args.precision.max(1);
    let l = tightness(&mu, k)?;
    // Independent recheck of the certificate inequality.
    let mass = mu.window_mass(l, k + 2)?;
    let threshold = Dyadic::one().sub(&Dyadic::pow2(-k));
    if mass.lo() <= &threshold {
        return Err(Error::BudgetExhausted("tightness recheck"));
    }
    let digits = digits_for(k + 2);
    let doc = serde_json::json!({
        "inputs": {"dist": spec, "precision": k},
        "L": l,
        "certificate": {
            "window_mass_lower": fmt_lo(mass.lo(), digits),
            "exceeds": format!("1 - 2^-{k}"),
        },
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn run_glivenko(args: GlivenkoArgs) -> Result<String> {
    let spec = parse_json(&args.phi)?;
    let phi = phi_from_json(&spec)?;
    let f = parse_window(&args.window)?;
    let k = args.precision.max(1);
    let plan = transfer::smoothing_params(&f, k + 1)?;
    let result = transfer::glivenko_eval(&phi, &f, k)?;
    let digits = digits_for(k + 2);

    let threshold = match args.seq.as_deref() {
        None => None,
        Some("sinc-pow2") => {
            let cert = shrinking_uniform_char_cert();
            Some(transfer::glivenko_modulus(&cert, &f, k)?)
        }
        Some(other) => {
            return Err(Error::Parse(format!("unknown sequence id: {other}")));
        }
    };
    let doc = serde_json::json!({
        "f": args.window,
        "k": k,
        "plan": {"L": plan.l, "n": plan.n},
        "result": {
            "lo": fmt_lo(result.lo(), digits),
            "hi": fmt_hi(result.hi(), digits),
        },
        "threshold": threshold,
        "error_budget_breakdown": {
            "smoothing": format!("2^-{}", k + 1),
            "evaluation": format!("2^-{}", k + 1),
        },
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

/// The built-in convergence example: the characteristic functions
/// `sin(t 2^-m)/(t 2^-m)` of uniform distributions shrinking onto the point
/// mass, with the analytic modulus from `|sin(u)/u - 1| <= u^2/6`.
pub fn shrinking_uniform_char_cert() -> CharCert {
    CharCert {
        seq: Arc::new(|m| {
            CharOracle::sinc_uniform(Dyadic::pow2(-(m as i64))).expect("positive half-width")
        }),
        limit: CharOracle::constant_one(),
        modulus: Arc::new(|range: &Dyadic, j: i64| {
            // (range 2^-m)^2 / 6 < 2^-j once 6 * 2^{2m} > range^2 2^j.
            let need = range.square().shift(j);
            let mut m = 0usize;
            while Dyadic::pow2(2 * m as i64).mul_int(6) <= need {
                m += 1;
            }
            m
        }),
    }
}

fn run_bochner(args: BochnerArgs) -> Result<String> {
    let spec = parse_json(&args.phi)?;
    let phi = phi_from_json(&spec)?;
    let k = args.precision.max(1);
    if args.n == 0 {
        return Err(Error::Parse("mollifier index must be >= 1".into()));
    }
    let grid = dyadic_grid(&dist::parse_dyadic(&args.range)?, &dist::parse_dyadic(&args.grid_step)?)?;
    let digits = digits_for(k);
    let mut out = String::from("x,lo,hi\n");
    for x in &grid {
        let v = transfer::bochner_density(&phi, args.n, &Interval::point(x.clone()), k)?;
        out.push_str(&format!(
            "{},{},{}\n",
            x.to_decimal_string(),
            fmt_lo(v.lo(), digits),
            fmt_hi(v.hi(), digits),
        ));
    }
    Ok(out)
}

fn run_dml(args: DmlArgs) -> Result<String> {
    let (num, den) = dist::parse_rational(&args.p)?;
    let params = BernoulliParams::new(crate::real::RealOracle::from_ratio(num, den)?)?;
    let k_range = dist::parse_dyadic(&args.k_range)?;
    let k = args.precision.max(1);
    let m = dml::dml_modulus(&params, &k_range, k)?;
    let bound = dml::dml_error_bound(&params, &k_range, m, k + 4);
    let digits = digits_for(k + 6);
    let doc = serde_json::json!({
        "inputs": {"p": args.p, "K": args.k_range, "precision": k},
        "m": m,
        "bound": {
            "main_term_upper": fmt_hi(bound.main_term.hi(), digits),
            "square_term_upper": fmt_hi(bound.square_term.hi(), digits),
            "total_upper": fmt_hi(bound.total.hi(), digits),
            "certifies": format!("sup |log psi_m(t) + t^2/2| < 2^-{k} for |t| <= {}", k_range),
        },
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn run_selftest() -> Result<String> {
    let mut out = String::new();
    let mut check = |name: &str, ok: bool| -> Result<()> {
        out.push_str(&format!("selftest: {name} ... {}\n", if ok { "PASS" } else { "FAIL" }));
        if ok {
            Ok(())
        } else {
            Err(Error::BudgetExhausted("selftest failed"))
        }
    };

    let pi = crate::elem::pi(30);
    check("pi enclosure width", pi.width() <= Dyadic::pow2(-30))?;

    let delta0 = DistOracle::point_mass_at(Dyadic::zero());
    let phi = CharOracle::from_dist(delta0);
    let v = phi.eval(&Freq::Dyadic(Dyadic::from_int(3)), 10)?;
    check("point-mass characteristic function is 1", v.re.contains(&Dyadic::one()))?;

    let uniform = DistOracle::uniform_symmetric(Dyadic::pow2(-1))?;
    check("uniform tightness index", tightness(&uniform, 3)? == 1)?;

    let params = BernoulliParams::from_ratio(1, 2)?;
    check("central-limit threshold", dml::dml_modulus(&params, &Dyadic::one(), 4)? == 2048)?;

    let j = transfer::glivenko_eval(&CharOracle::constant_one(), &TestFunction::window(1), 3)?;
    check("windowed expectation from phi = 1", j.contains(&Dyadic::one()))?;

    Ok(out)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(output) => {
            print!("{output}");
            0
        }
        Err(e) => {
            let kind = error_kind(&e);
            let report = serde_json::json!({
                "error_kind": kind,
                "message": e.to_string(),
            });
            eprintln!("{}", serde_json::to_string(&report).unwrap());
            exit_code(&e)
        }
    }
}

/// Variant used when the caller supplies an output path.
pub fn run_to_completion(cli: Cli) -> i32 {
    let output_path = match &cli.command {
        Command::Char(a) => a.output.clone(),
        Command::Tightness(a) => a.output.clone(),
        Command::Glivenko(a) => a.output.clone(),
        Command::Bochner(a) => a.output.clone(),
        Command::Dml(a) => a.output.clone(),
        Command::Selftest => None,
    };
    match execute(cli) {
        Ok(output) => match output_path {
            Some(path) => match std::fs::write(&path, output) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!(
                        "{}",
                        serde_json::json!({"error_kind": "io", "message": e.to_string()})
                    );
                    1
                }
            },
            None => {
                print!("{output}");
                0
            }
        },
        Err(e) => {
            let report = serde_json::json!({
                "error_kind": error_kind(&e),
                "message": e.to_string(),
            });
            eprintln!("{}", serde_json::to_string(&report).unwrap());
            exit_code(&e)
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) | Error::InvalidParams(_) => "parse-error",
        Error::PrecisionOverflow | Error::BudgetExhausted(_) | Error::GridBudgetExceeded(_) => {
            "budget-exhausted"
        }
        Error::ImaginaryResidual
        | Error::NegativityViolation
        | Error::InvalidChar(_)
        | Error::InvalidWeights
        | Error::NotNormalized => "invalid-phi",
        Error::UnsupportedEnvelope | Error::LogBranchCut => "unsupported",
    }
}

fn exit_code(e: &Error) -> i32 {
    match error_kind(e) {
        "parse-error" => 2,
        "budget-exhausted" => 3,
        "invalid-phi" => 4,
        _ => 1,
    }
}

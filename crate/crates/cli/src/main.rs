use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use invmellin::closedform::to_sexpr;
use invmellin::io::{IdentityFile, KovacicReport, OdeFile, ProblemFile, ReportFile, VerifyReport};
use invmellin::kovacic::{kovacic, CaseTag};
use invmellin::pipeline::{inverse_mellin, verify_identity, Options, Stage, Status};

const DEFAULT_PRECISION: u32 = 50;

#[derive(Parser)]
#[command(name = "invmellin", version, about = "Inverse Mellin transforms of holonomic sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finds f with int_0^1 x^n f(x) dx = F(n) for a recurrence and initial values.
    Invmellin {
        problem: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Last stage to run.
        #[arg(long, default_value = "all", value_parser = parse_stage)]
        stage: Stage,
    },
    /// Runs Kovacic's algorithm on a second-order operator.
    Kovacic {
        ode: PathBuf,
        #[arg(long, visible_alias = "out")]
        json_out: Option<PathBuf>,
    },
    /// Checks a claimed integral representation over a window of n.
    Verify {
        identity: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Working precision in decimal digits.
    #[arg(long)]
    precision: Option<u32>,
    /// Index window `a:b`.
    #[arg(long, value_parser = parse_window)]
    window: Option<(i64, i64)>,
    /// Relative tolerance; defaults to 10^(-precision/2).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Where to write the JSON report.
    #[arg(long, visible_alias = "out")]
    json_out: Option<PathBuf>,
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: invmellin::Error| e.to_string())
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad window start {a:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad window end {b:?}"))?;
    if b < a {
        return Err("window end precedes its start".into());
    }
    Ok((a, b))
}

/// Input problems, reported with exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_json(path: &Option<PathBuf>, text: &str) -> Result<(), InputError> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn run_invmellin(path: &Path, common: &Common, stage: Stage) -> Result<bool, InputError> {
    let file = ProblemFile::parse(&read(path)?)?;
    let seq = file.sequence()?;
    let digits = common.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION);
    if digits == 0 {
        return Err(InputError("precision must be positive".into()));
    }
    let opts = Options {
        digits,
        window: common.window.or(file.window.map(|[a, b]| (a, b))),
        tolerance: common.tolerance,
        stage,
        ..Options::default()
    };
    let res = inverse_mellin(&seq, &opts)?;
    let report = ReportFile::from_result(&res, digits);
    write_json(&common.json_out, &report.to_json())?;

    println!("status: {}", res.status);
    println!("ode: {}", res.ode);
    if res.scale != invmellin::algebra::field::qi(1) {
        println!(
            "scale: {}^n, kernel {}",
            invmellin::algebra::field::fmt_q(&res.scale),
            report.kernel
        );
    }
    if let Some(f) = &res.factorization {
        println!("factors: {f}");
    }
    if let Some(tag) = res.core_tag {
        println!("core: {tag}");
    }
    for b in &res.basis.solutions {
        println!("basis: {}", to_sexpr(b));
    }
    for c in &report.constants {
        match &c.exact {
            Some(e) => println!("constant: {e} = {}", c.numeric),
            None => println!("constant: {}", c.numeric),
        }
    }
    if let Some(e) = &report.expr {
        println!("f(x) = {e}");
    }
    if !res.report.mellin_checks.is_empty() {
        println!(
            "max relative error over n = {:?}: {:.3e}",
            res.report.mellin_checks.iter().map(|c| c.n).collect::<Vec<_>>(),
            res.report.max_mellin_error()
        );
    }
    for d in &res.diagnostics {
        println!("diagnostic: {d}");
    }
    Ok(match stage {
        Stage::All | Stage::Verify => res.status == Status::Certified,
        _ => !res.failed,
    })
}

fn run_kovacic(path: &Path, json_out: &Option<PathBuf>) -> Result<bool, InputError> {
    let op = OdeFile::parse(&read(path)?)?.operator()?;
    if op.order() != 2 {
        return Err(InputError(format!("expected an order-2 operator, got order {}", op.order())));
    }
    let k = kovacic(&op)?;
    let report = KovacicReport::from_result(&op, &k);
    write_json(json_out, &report.to_json())?;
    println!("operator: {op}");
    println!("case: {}", k.tag);
    match k.tag {
        CaseTag::NoLiouvillian => println!("no Liouvillian solutions"),
        CaseTag::UnsupportedCase3 => println!("case 3 (algebraic solutions) is not supported"),
        _ => {}
    }
    if let Some(w) = &k.omega {
        println!("omega: {w}");
    }
    for s in k.solutions.iter().flatten() {
        println!("solution: {}", to_sexpr(s));
    }
    for w in &k.warnings {
        println!("diagnostic: {w}");
    }
    Ok(matches!(k.tag, CaseTag::RationalOmega | CaseTag::QuadraticOmega))
}

fn run_verify(path: &Path, common: &Common) -> Result<bool, InputError> {
    let file = IdentityFile::parse(&read(path)?)?;
    let digits = common.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION);
    if digits == 0 {
        return Err(InputError("precision must be positive".into()));
    }
    let tolerance = common
        .tolerance
        .or(file.tolerance)
        .unwrap_or_else(|| 10f64.powf(-(digits as f64) / 2.0));
    let window = common.window.unwrap_or((file.window[0], file.window[1]));
    let seq = file.sequence()?;
    let claimed = file.claimed_expr()?;
    let (kernel, scale) = (file.kernel()?, file.scale()?);
    let report = match verify_identity(&seq, &claimed, &kernel, &scale, window, digits, tolerance) {
        Ok(r) => r,
        Err(invmellin::Error::Invalid(m)) | Err(invmellin::Error::Parse(m)) => return Err(InputError(m)),
        Err(e) => {
            println!("pass: false");
            println!("diagnostic: {e}");
            let mut out = VerifyReport::new(&file, &Default::default(), digits)?;
            out.diagnostics.push(e.to_string());
            write_json(&common.json_out, &out.to_json())?;
            return Ok(false);
        }
    };
    write_json(&common.json_out, &VerifyReport::new(&file, &report, digits)?.to_json())?;
    if let Some(d) = &file.description {
        println!("identity: {d}");
    }
    for c in &report.mellin_checks {
        println!("n = {}: relative error {:.3e}", c.n, c.rel_err.to_f64());
    }
    println!("pass: {} (tolerance {:.1e})", report.pass, tolerance);
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Invmellin { problem, common, stage } => run_invmellin(problem, common, *stage),
        Command::Kovacic { ode, json_out } => run_kovacic(ode, json_out),
        Command::Verify { identity, common } => run_verify(identity, common),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

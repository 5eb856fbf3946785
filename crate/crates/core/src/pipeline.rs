//! Recurrence to ODE, factorization, solution basis, fitted constants and
//! verification against the exact sequence.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::algebra::field::{q_pow, Q};
use crate::algebra::ore::DiffOp;
use crate::closedform::expr::{normalize, Expr};
use crate::error::{Error, Result};
use crate::factor::compose::{compose_pieces, pieces_of};
use crate::factor::{factor_chain, Factorization, SolutionBasis};
use crate::kovacic::{kovacic, CaseTag};
use crate::mellin::{growth_rate, recurrence_to_ode, SequenceSpec};
use crate::numerics::eval_expr;
use crate::numerics::fit::{fit_constants, moment_table_auto, Kernel};
use crate::numerics::real::{bits_for_digits, rel_err, Cx, Mp};
use crate::numerics::recognize::recognize;
use crate::numerics::verify::{local_exponent, sample_points, verify_ode_residual};
use crate::RecOp;

/// Number of verification indices beyond the fitting window.
pub const HELD_OUT: i64 = 4;
/// Number of sample points for ODE residuals.
pub const RESIDUAL_POINTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ode,
    Factor,
    Solve,
    Fit,
    Verify,
    All,
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Ok(match s {
            "ode" => Stage::Ode,
            "factor" => Stage::Factor,
            "solve" => Stage::Solve,
            "fit" => Stage::Fit,
            "verify" => Stage::Verify,
            "all" => Stage::All,
            other => return Err(Error::Invalid(format!("unknown stage {other}"))),
        })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Ode => "ode",
            Stage::Factor => "factor",
            Stage::Solve => "solve",
            Stage::Fit => "fit",
            Stage::Verify => "verify",
            Stage::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Working precision in decimal digits.
    pub digits: u32,
    /// Verification window; the fit uses its first indices.
    pub window: Option<(i64, i64)>,
    /// Relative tolerance, `10^(-digits/2)` by default.
    pub tolerance: Option<f64>,
    pub stage: Stage,
    /// Highest Kovacic case used for the core (1 or 2).
    pub max_kovacic_case: u8,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            digits: 50,
            window: None,
            tolerance: None,
            stage: Stage::All,
            max_kovacic_case: 2,
        }
    }
}

impl Options {
    pub fn with_digits(digits: u32) -> Self {
        Options {
            digits,
            ..Options::default()
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| 10f64.powf(-(self.digits as f64) / 2.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Certified,
    PartialBasis,
    Unsolved,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Certified => "Certified",
            Status::PartialBasis => "PartialBasis",
            Status::Unsolved => "Unsolved",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Constant {
    pub numeric: Mp,
    pub exact: Option<Expr>,
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub constants: Vec<Constant>,
    /// Largest relative residual on the held-out indices.
    pub residual: f64,
    /// Indices used to solve for the constants.
    pub window: Vec<i64>,
}

/// `M_K[f](n)` against the exact sequence value, both in the original
/// (unscaled) normalization.
#[derive(Clone, Debug)]
pub struct MellinCheck {
    pub n: i64,
    pub lhs: Mp,
    pub rhs: Q,
    pub rel_err: Mp,
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    /// `(x, relative residual)` per basis element.
    pub ode_residuals: Vec<Vec<(Q, f64)>>,
    pub mellin_checks: Vec<MellinCheck>,
    /// Relative quadrature error estimates (log2) per check.
    pub quadrature_errors: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn max_mellin_error(&self) -> f64 {
        self.mellin_checks.iter().map(|c| c.rel_err.to_f64()).fold(0.0, f64::max)
    }

    pub fn max_ode_residual(&self) -> f64 {
        self.ode_residuals.iter().flatten().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct InverseMellinResult {
    pub ode: DiffOp,
    /// `F(n) = scale^n G(n)` with `G(n) = int K_n f`.
    pub scale: Q,
    pub kernel: Kernel,
    pub factorization: Option<Factorization>,
    pub core_tag: Option<CaseTag>,
    /// `f` with the fitted constants.
    pub expr: Option<Expr>,
    pub basis: SolutionBasis,
    pub fit: Option<FitResult>,
    pub report: VerificationReport,
    pub status: Status,
    pub stage: Stage,
    pub diagnostics: Vec<String>,
    /// Set when a stage stopped the run.
    pub failed: bool,
}

impl InverseMellinResult {
    fn new(ode: DiffOp, scale: Q, kernel: Kernel) -> Self {
        InverseMellinResult {
            ode,
            scale,
            kernel,
            factorization: None,
            core_tag: None,
            expr: None,
            basis: SolutionBasis {
                solutions: vec![],
                provenance: vec![],
                witness: None,
            },
            fit: None,
            report: VerificationReport::default(),
            status: Status::Unsolved,
            stage: Stage::Ode,
            diagnostics: vec![],
            failed: false,
        }
    }

    fn fail(mut self, msg: String) -> Self {
        self.diagnostics.push(msg);
        self.failed = true;
        self.status = Status::Unsolved;
        self
    }
}

/// Whether `a^n` is annihilated by `rec`.
fn solves_geometric(rec: &RecOp, a: &Q) -> bool {
    let mut acc = crate::QPoly::zero();
    for (k, c) in rec.coeffs().iter().enumerate() {
        acc = &acc + &c.scale(&q_pow(a, k as i64));
    }
    acc.is_zero()
}

/// Kernel for an ODE whose singular points inside (0, 1) are simple poles
/// cancelled by `x^n - a^n`; diagnostics name the other interior points.
fn choose_kernel(rec: &RecOp, ode: &DiffOp, diagnostics: &mut Vec<String>) -> Kernel {
    let interior: Vec<Q> = ode
        .rational_singularities()
        .into_iter()
        .filter(|a| *a > Q::zero() && *a < Q::one())
        .collect();
    let mut kernel = Kernel::Power;
    for a in interior {
        if kernel == Kernel::Power && solves_geometric(rec, &a) {
            kernel = Kernel::Regularized(a);
        } else {
            diagnostics.push(format!("interior singular point at {}", crate::algebra::field::fmt_q(&a)));
        }
    }
    kernel
}

/// Local exponents of `e` at 0 and 1.
fn endpoint_exponents(e: &Expr) -> Result<(f64, f64)> {
    Ok((local_exponent::<Cx>(e, false, 192)?, local_exponent::<Cx>(e, true, 192)?))
}

/// Runs the method end to end. Analytic failures are reported through the
/// status and diagnostics; `Err` means the input itself is unusable.
pub fn inverse_mellin(seq: &SequenceSpec, opts: &Options) -> Result<InverseMellinResult> {
    seq.validate()?;
    let scale = match growth_rate(&seq.rec) {
        Some(r) if !r.is_zero() => r,
        _ => Q::one(),
    };
    let scaled = if scale.is_one() { seq.clone() } else { seq.rescaled(&scale) };
    let ode = recurrence_to_ode(&scaled.rec);
    let mut diagnostics = vec![];
    let kernel = choose_kernel(&scaled.rec, &ode, &mut diagnostics);
    let mut res = InverseMellinResult::new(ode.clone(), scale.clone(), kernel.clone());
    res.diagnostics = diagnostics;
    if ode.order() == 0 {
        return Ok(res.fail("recurrence maps to an operator of order 0".into()));
    }
    if opts.stage == Stage::Ode {
        return Ok(res);
    }

    res.stage = Stage::Factor;
    let fact = match factor_chain(&ode) {
        Ok(f) => f,
        Err(e) => return Ok(res.fail(format!("factorization failed: {e}"))),
    };
    res.factorization = Some(fact.clone());
    if opts.stage == Stage::Factor {
        return Ok(res);
    }

    res.stage = Stage::Solve;
    let mut core_solutions = None;
    let mut partial = false;
    if let Some(core) = &fact.core {
        let kr = match kovacic(core) {
            Ok(k) => k,
            Err(e) => return Ok(res.fail(format!("core unsolved: {e}"))),
        };
        let tag = if kr.tag == CaseTag::QuadraticOmega && opts.max_kovacic_case < 2 {
            CaseTag::UnsupportedCase3
        } else {
            kr.tag
        };
        res.core_tag = Some(tag);
        res.diagnostics.extend(kr.warnings.iter().cloned());
        match (&kr.solutions, tag) {
            (Some(s), CaseTag::RationalOmega | CaseTag::QuadraticOmega) => core_solutions = Some(s.clone()),
            _ => {
                partial = true;
                res.diagnostics.push(format!("core unsolved: {tag} core"));
            }
        }
    }
    let pieces = pieces_of(&fact, core_solutions.as_ref());
    let basis = match compose_pieces(&pieces).and_then(|b| b.with_witness(opts.digits.min(30))) {
        Ok(b) => b,
        Err(e) => return Ok(res.fail(format!("composition failed: {e}"))),
    };
    res.basis = basis.clone();
    if basis.solutions.is_empty() {
        return Ok(res.fail("no solutions found".into()));
    }
    res.status = if partial { Status::PartialBasis } else { Status::Unsolved };
    if opts.stage == Stage::Solve {
        return Ok(res);
    }

    res.stage = Stage::Fit;
    let tol = opts.tolerance();
    let bits = bits_for_digits(opts.digits + 10);
    // elements that cannot enter a convergent Mellin integral are dropped
    let mut usable = vec![];
    let mut n_min = scaled.first_index().max(scaled.offset);
    if matches!(kernel, Kernel::Regularized(_)) {
        n_min = n_min.max(1);
    }
    for (i, b) in basis.solutions.iter().enumerate() {
        let (e0, e1) = match endpoint_exponents(b) {
            Ok(v) => v,
            Err(e) => {
                res.diagnostics.push(format!("basis element {i}: {e}"));
                continue;
            }
        };
        let regularized = matches!(kernel, Kernel::Regularized(_));
        if e1 <= -1.0 || (regularized && e0 <= -1.0) {
            res.diagnostics
                .push(format!("basis element {i} is not integrable at an endpoint; dropped"));
            continue;
        }
        n_min = n_min.max((-1.0 - e0).floor() as i64 + 1);
        usable.push(i);
    }
    if usable.is_empty() {
        return Ok(res.fail("no basis element has a convergent Mellin transform".into()));
    }
    let k = usable.len() as i64;
    let (lo, hi) = match opts.window {
        Some((a, b)) => {
            if a < n_min {
                res.diagnostics
                    .push(format!("window starts below the first convergent index {n_min}"));
            }
            (a.max(n_min), b)
        }
        None => (n_min, n_min + k - 1 + HELD_OUT),
    };
    if hi - lo + 1 < k {
        return Ok(res.fail(format!("window {lo}..{hi} is shorter than the basis ({k})")));
    }
    let ns: Vec<i64> = (lo..=hi).collect();
    let values = scaled.values(hi)?;
    let start = scaled.first_index();
    let targets: Vec<Q> = ns.iter().map(|n| values[(n - start) as usize].clone()).collect();
    let fs: Vec<Expr> = usable.iter().map(|&i| basis.solutions[i].clone()).collect();
    let table = match moment_table_auto(&fs, &kernel, &ns, bits) {
        Ok(t) => t,
        Err(e) => {
            let why = if kernel == Kernel::Power && res.diagnostics.iter().any(|d| d.starts_with("interior")) {
                Error::InteriorSingularity(e.to_string()).to_string()
            } else {
                e.to_string()
            };
            return Ok(res.fail(format!("Mellin moments failed: {why}")));
        }
    };
    let fit = match fit_constants(&table.values, &targets, &ns) {
        Ok(f) => f,
        Err(e) => return Ok(res.fail(format!("fit failed: {e}"))),
    };
    let mut constants = vec![];
    for c in &fit.constants {
        let exact = recognize(c, opts.digits).map(|r| r.expr);
        constants.push(Constant {
            numeric: c.clone(),
            exact,
        });
    }
    let residual = fit.held_out.iter().map(|(_, r)| r.to_f64()).fold(0.0, f64::max);
    let mut terms = vec![];
    for (c, b) in constants.iter().zip(&fs) {
        let ce = c
            .exact
            .clone()
            .unwrap_or_else(|| Expr::Approx(c.numeric.to_decimal(opts.digits as usize)));
        terms.push(Expr::mul(vec![ce, b.clone()]));
    }
    res.expr = Some(normalize(&Expr::add(terms)));
    res.fit = Some(FitResult {
        constants: constants.clone(),
        residual,
        window: ns[..k as usize].to_vec(),
    });
    if opts.stage == Stage::Fit {
        return Ok(res);
    }

    res.stage = Stage::Verify;
    // exact constants where recognized
    let mut cvals = vec![];
    for c in &constants {
        let v = match &c.exact {
            Some(e) => eval_expr::<Mp>(e, &crate::closedform::expr::base_point(), opts.digits + 10)?,
            None => c.numeric.clone(),
        };
        cvals.push(v);
    }
    let mut report = VerificationReport {
        tolerance: tol,
        ..Default::default()
    };
    for (j, n) in ns.iter().enumerate() {
        let mut acc = Mp::zero_with(bits);
        for (c, row) in cvals.iter().zip(&table.values) {
            acc = &acc + &(c * &row[j]);
        }
        let factor = q_pow(&scale, *n);
        let lhs = &acc * &Mp::from_q(&factor, bits);
        let rhs = &targets[j] * &factor;
        let err = rel_err(&lhs, &Mp::from_q(&rhs, bits));
        report.mellin_checks.push(MellinCheck {
            n: *n,
            lhs,
            rhs,
            rel_err: err,
        });
        let qe = table.log2_errors.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        report.quadrature_errors.push(qe);
    }
    let avoid = ode.rational_singularities();
    let points = sample_points(RESIDUAL_POINTS, &avoid);
    for b in &basis.solutions {
        match verify_ode_residual::<Cx>(b, &ode, &points, bits_for_digits(opts.digits)) {
            Ok(r) => report.ode_residuals.push(points.iter().cloned().zip(r).collect()),
            Err(e) => {
                res.diagnostics.push(format!("residual check failed: {e}"));
                report.ode_residuals.push(vec![]);
            }
        }
    }
    let residual_ok = report
        .ode_residuals
        .iter()
        .all(|r| !r.is_empty() && r.iter().all(|(_, v)| *v <= tol));
    let mellin_ok = report.mellin_checks.iter().all(|c| c.rel_err.to_f64() <= tol);
    report.pass = residual_ok && mellin_ok && res.basis.witness.is_some();
    if !residual_ok {
        res.diagnostics.push("ODE residual above tolerance".into());
    }
    if !mellin_ok {
        res.diagnostics.push(format!(
            "Mellin check failed: max relative error {:.3e}",
            report.max_mellin_error()
        ));
    }
    res.status = match (report.pass, partial) {
        (true, false) => Status::Certified,
        (_, true) => Status::PartialBasis,
        (false, false) => Status::Unsolved,
    };
    res.report = report;
    res.stage = Stage::All;
    Ok(res)
}

/// Checks `scale^n int K_n(x) claimed(x) dx = F(n)` over `window`.
pub fn verify_identity(
    seq: &SequenceSpec,
    claimed: &Expr,
    kernel: &Kernel,
    scale: &Q,
    window: (i64, i64),
    digits: u32,
    tolerance: f64,
) -> Result<VerificationReport> {
    seq.validate()?;
    if scale.is_zero() {
        return Err(Error::Invalid("scale must be nonzero".into()));
    }
    let (lo, hi) = window;
    if lo < seq.first_index() || hi < lo {
        return Err(Error::Invalid(format!("window {lo}..{hi} outside the sequence")));
    }
    let bits = bits_for_digits(digits + 10);
    let ns: Vec<i64> = (lo..=hi).collect();
    let values = seq.values(hi)?;
    let table = moment_table_auto(std::slice::from_ref(claimed), kernel, &ns, bits)?;
    let mut report = VerificationReport {
        tolerance,
        ..Default::default()
    };
    for (j, n) in ns.iter().enumerate() {
        let factor = Mp::from_q(&q_pow(scale, *n), bits);
        let lhs = &table.values[0][j] * &factor;
        let rhs = values[(n - seq.first_index()) as usize].clone();
        let err = rel_err(&lhs, &Mp::from_q(&rhs, bits));
        report.mellin_checks.push(MellinCheck {
            n: *n,
            lhs,
            rhs,
            rel_err: err,
        });
        report.quadrature_errors.push(table.log2_errors[0][j]);
    }
    report.pass = report.mellin_checks.iter().all(|c| c.rel_err.to_f64() <= tolerance);
    Ok(report)
}

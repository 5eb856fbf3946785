//! JSON problem, identity and report files.
//!
//! Rationals are `"p/q"` strings or plain integers; polynomials are
//! coefficient arrays in ascending degree. Expressions travel as
//! s-expressions.

use serde::{Deserialize, Serialize};

use crate::algebra::field::{fmt_q, parse_q, Q};
use crate::algebra::ore::DiffOp;
use crate::algebra::poly::Poly;
use crate::closedform::expr::Expr;
use crate::closedform::sexpr::{parse_sexpr, to_sexpr};
use crate::error::{Error, Result};
use crate::factor::Factorization;
use crate::kovacic::{KovacicResult, Omega};
use crate::mellin::SequenceSpec;
use crate::numerics::fit::Kernel;
use crate::pipeline::{InverseMellinResult, MellinCheck, VerificationReport};
use crate::{QRatFun, RecOp};

/// A rational written as an integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            Num::Int(i) => Ok(Q::from_integer((*i).into())),
            Num::Text(s) => parse_q(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}"))),
        }
    }
}

impl From<&Q> for Num {
    fn from(v: &Q) -> Num {
        Num::Text(fmt_q(v))
    }
}

fn poly_of(cs: &[Num], what: &str) -> Result<Poly<Q>> {
    if cs.is_empty() {
        return Err(Error::Invalid(format!("{what}: empty coefficient array")));
    }
    Ok(Poly::new(cs.iter().map(Num::to_q).collect::<Result<_>>()?))
}

fn poly_strings(p: &Poly<Q>) -> Vec<String> {
    if p.is_zero() {
        return vec!["0".into()];
    }
    p.coeffs().iter().map(fmt_q).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceJson {
    pub order: usize,
    pub coeffs: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialValue {
    pub n: i64,
    pub value: Num,
}

/// Recurrence with initial values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_n")]
    pub variable: String,
    pub recurrence: RecurrenceJson,
    #[serde(default)]
    pub offset: i64,
    pub initial_values: Vec<InitialValue>,
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub window: Option<[i64; 2]>,
}

fn default_n() -> String {
    "n".into()
}

fn default_x() -> String {
    "x".into()
}

fn sequence_of(rec: &RecurrenceJson, offset: i64, ivs: &[InitialValue]) -> Result<SequenceSpec> {
    if rec.coeffs.len() != rec.order + 1 {
        return Err(Error::Invalid(format!(
            "recurrence of order {} needs {} coefficient arrays, got {}",
            rec.order,
            rec.order + 1,
            rec.coeffs.len()
        )));
    }
    let polys = rec
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| poly_of(c, &format!("recurrence coefficient {k}")))
        .collect::<Result<Vec<_>>>()?;
    if polys.last().is_some_and(|p| p.is_zero()) {
        return Err(Error::Invalid("leading recurrence coefficient is zero".into()));
    }
    let values = ivs
        .iter()
        .map(|iv| Ok((iv.n, iv.value.to_q()?)))
        .collect::<Result<Vec<_>>>()?;
    let seq = SequenceSpec::new(RecOp::new(polys), offset, values);
    seq.validate()?;
    Ok(seq)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile> {
        let p: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if p.variable.is_empty() {
            return Err(Error::Invalid("empty variable name".into()));
        }
        p.sequence()?;
        Ok(p)
    }

    pub fn sequence(&self) -> Result<SequenceSpec> {
        sequence_of(&self.recurrence, self.offset, &self.initial_values)
    }
}

/// Differential operator `sum coeffs[j](x) D^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeFile {
    #[serde(default = "default_x")]
    pub variable: String,
    pub coeffs: Vec<Vec<Num>>,
}

impl OdeFile {
    pub fn parse(text: &str) -> Result<OdeFile> {
        let f: OdeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        f.operator()?;
        Ok(f)
    }

    pub fn operator(&self) -> Result<DiffOp> {
        let polys = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| poly_of(c, &format!("operator coefficient {j}")))
            .collect::<Result<Vec<_>>>()?;
        let op = DiffOp::new(polys);
        if op.is_zero() {
            return Err(Error::Invalid("zero operator".into()));
        }
        Ok(op.normalize())
    }

    pub fn from_op(op: &DiffOp) -> OdeFile {
        OdeFile {
            variable: "x".into(),
            coeffs: op
                .coeffs()
                .iter()
                .map(|c| poly_strings(c).into_iter().map(Num::Text).collect())
                .collect(),
        }
    }
}

/// A sequence paired with a claimed integrand:
/// `F(n) = scale^n int_0^1 K_n(x) claimed(x) dx`, where `K_n = x^n`, or
/// `x^n - a^n` when `subtract` gives `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityFile {
    #[serde(default)]
    pub description: Option<String>,
    pub recurrence: RecurrenceJson,
    #[serde(default)]
    pub offset: i64,
    pub initial_values: Vec<InitialValue>,
    pub claimed: String,
    #[serde(default)]
    pub scale: Option<Num>,
    #[serde(default)]
    pub subtract: Option<Num>,
    pub window: [i64; 2],
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl IdentityFile {
    pub fn parse(text: &str) -> Result<IdentityFile> {
        let f: IdentityFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        f.sequence()?;
        f.claimed_expr()?;
        f.scale()?;
        f.kernel()?;
        Ok(f)
    }

    pub fn sequence(&self) -> Result<SequenceSpec> {
        sequence_of(&self.recurrence, self.offset, &self.initial_values)
    }

    pub fn claimed_expr(&self) -> Result<Expr> {
        parse_sexpr(&self.claimed)
    }

    pub fn scale(&self) -> Result<Q> {
        match &self.scale {
            Some(s) => s.to_q(),
            None => Ok(Q::from_integer(1.into())),
        }
    }

    pub fn kernel(&self) -> Result<Kernel> {
        Ok(match &self.subtract {
            Some(a) => Kernel::Regularized(a.to_q()?),
            None => Kernel::Power,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantJson {
    pub numeric: String,
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub n: i64,
    pub lhs: String,
    pub rhs: String,
    pub rel_err: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub basis_index: usize,
    pub max: String,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.3e}")
}

fn checks_json(checks: &[MellinCheck], digits: u32) -> Vec<CheckJson> {
    checks
        .iter()
        .map(|c| CheckJson {
            n: c.n,
            lhs: c.lhs.to_decimal(digits as usize),
            rhs: fmt_q(&c.rhs),
            rel_err: fmt_f64(c.rel_err.to_f64()),
        })
        .collect()
}

fn kernel_json(k: &Kernel) -> String {
    match k {
        Kernel::Power => "x^n".into(),
        Kernel::Regularized(a) => format!("x^n - ({})^n", fmt_q(a)),
    }
}

fn factors_json(f: &Factorization) -> Vec<Vec<Vec<String>>> {
    f.factors()
        .iter()
        .map(|op| op.coeffs().iter().map(poly_strings).collect())
        .collect()
}

/// Output of `invmellin`. Field order and number formatting are fixed so
/// identical runs give identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub status: String,
    pub stage: String,
    pub precision: u32,
    pub scale: String,
    pub kernel: String,
    pub ode: Vec<Vec<String>>,
    pub factors: Option<Vec<Vec<Vec<String>>>>,
    pub core_case: Option<String>,
    pub basis: Vec<String>,
    pub provenance: Vec<Vec<String>>,
    pub wronskian_witness: Option<String>,
    pub fit_window: Vec<i64>,
    pub constants: Vec<ConstantJson>,
    pub expr: Option<String>,
    pub verification: Vec<CheckJson>,
    pub ode_residuals: Vec<ResidualJson>,
    pub tolerance: String,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

impl ReportFile {
    pub fn from_result(r: &InverseMellinResult, digits: u32) -> ReportFile {
        let constants = r
            .fit
            .as_ref()
            .map(|f| {
                f.constants
                    .iter()
                    .map(|c| ConstantJson {
                        numeric: c.numeric.to_decimal(digits as usize),
                        exact: c.exact.as_ref().map(to_sexpr),
                    })
                    .collect()
            })
            .unwrap_or_default();
        let ode_residuals = r
            .report
            .ode_residuals
            .iter()
            .enumerate()
            .map(|(i, rs)| ResidualJson {
                basis_index: i,
                max: if rs.is_empty() {
                    "unavailable".into()
                } else {
                    fmt_f64(rs.iter().map(|(_, v)| *v).fold(0.0, f64::max))
                },
            })
            .collect();
        ReportFile {
            status: r.status.to_string(),
            stage: r.stage.to_string(),
            precision: digits,
            scale: fmt_q(&r.scale),
            kernel: kernel_json(&r.kernel),
            ode: r.ode.coeffs().iter().map(poly_strings).collect(),
            factors: r.factorization.as_ref().map(factors_json),
            core_case: r.core_tag.map(|t| t.to_string()),
            basis: r.basis.solutions.iter().map(to_sexpr).collect(),
            provenance: r.basis.provenance.clone(),
            wronskian_witness: r.basis.witness.as_ref().map(|w| w.value.clone()),
            fit_window: r.fit.as_ref().map(|f| f.window.clone()).unwrap_or_default(),
            constants,
            expr: r.expr.as_ref().map(to_sexpr),
            verification: checks_json(&r.report.mellin_checks, digits),
            ode_residuals,
            tolerance: fmt_f64(r.report.tolerance),
            pass: r.report.pass,
            diagnostics: r.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaJson {
    Rational { omega: [Vec<String>; 2] },
    Quadratic { a: [Vec<String>; 2], b: [Vec<String>; 2] },
}

fn ratfun_json(r: &QRatFun) -> [Vec<String>; 2] {
    [poly_strings(r.num()), poly_strings(r.den())]
}

/// Output of `kovacic`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KovacicReport {
    pub case: String,
    pub ode: Vec<Vec<String>>,
    pub normal_form_r: [Vec<String>; 2],
    pub omega: Option<OmegaJson>,
    pub solutions: Vec<String>,
    pub closed: bool,
    pub diagnostics: Vec<String>,
}

impl KovacicReport {
    pub fn from_result(op: &DiffOp, k: &KovacicResult) -> KovacicReport {
        let omega = k.omega.as_ref().map(|w| match w {
            Omega::Rational(w) => OmegaJson::Rational { omega: ratfun_json(w) },
            Omega::Quadratic { a, b } => OmegaJson::Quadratic {
                a: ratfun_json(a),
                b: ratfun_json(b),
            },
        });
        KovacicReport {
            case: k.tag.to_string(),
            ode: op.coeffs().iter().map(poly_strings).collect(),
            normal_form_r: ratfun_json(&k.normal_form.r),
            omega,
            solutions: k.solutions.iter().flatten().map(to_sexpr).collect(),
            closed: k.closed,
            diagnostics: k.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Output of `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub claimed: String,
    pub scale: String,
    pub kernel: String,
    pub precision: u32,
    pub tolerance: String,
    pub verification: Vec<CheckJson>,
    pub max_rel_err: String,
    pub diagnostics: Vec<String>,
}

impl VerifyReport {
    pub fn new(file: &IdentityFile, report: &VerificationReport, digits: u32) -> Result<VerifyReport> {
        Ok(VerifyReport {
            pass: report.pass,
            claimed: to_sexpr(&file.claimed_expr()?),
            scale: fmt_q(&file.scale()?),
            kernel: kernel_json(&file.kernel()?),
            precision: digits,
            tolerance: fmt_f64(report.tolerance),
            verification: checks_json(&report.mellin_checks, digits),
            max_rel_err: fmt_f64(report.max_mellin_error()),
            diagnostics: vec![],
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    #[test]
    fn problem_file_round_trip() {
        let text = r#"{
            "variable": "n",
            "recurrence": {"order": 1, "coeffs": [[-4, -18, -18], [9, 27, 18]]},
            "offset": 1,
            "initial_values": [{"n": 1, "value": "4/9"}],
            "precision": 50,
            "window": [1, 8]
        }"#;
        let p = ProblemFile::parse(text).unwrap();
        let seq = p.sequence().unwrap();
        assert_eq!(seq.value(2).unwrap(), q(80, 243));
        let again = ProblemFile::parse(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn schema_errors() {
        let missing = r#"{"recurrence": {"order": 1, "coeffs": [[1]]}, "initial_values": []}"#;
        assert!(ProblemFile::parse(missing).is_err());
        let empty = r#"{"recurrence": {"order": 1, "coeffs": [[1], []]}, "initial_values": [{"n": 0, "value": 1}]}"#;
        assert!(ProblemFile::parse(empty).is_err());
        let bad_q = r#"{"recurrence": {"order": 1, "coeffs": [[1], [1]]}, "initial_values": [{"n": 0, "value": "1/0"}]}"#;
        assert!(ProblemFile::parse(bad_q).is_err());
        let extra = r#"{"recurrence": {"order": 1, "coeffs": [[1], [1]]}, "initial_values": [], "junk": 1}"#;
        assert!(ProblemFile::parse(extra).is_err());
    }

    #[test]
    fn ode_file_normalizes() {
        let f = OdeFile::parse(r#"{"coeffs": [["-1/2"], [], ["1/2"]]}"#);
        assert!(f.is_err());
        let f = OdeFile::parse(r#"{"coeffs": [["-1/2"], [0], ["1/2"]]}"#).unwrap();
        assert_eq!(f.operator().unwrap(), DiffOp::from_ints(&[&[-1], &[], &[1]]));
    }
}

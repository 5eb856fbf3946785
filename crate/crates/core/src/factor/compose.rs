//! Solution bases from a factorization: nested integrals over the solutions
//! of the factors.

use num_traits::Zero;

use crate::algebra::field::Q;
use crate::algebra::ore::DiffOp;
use crate::algebra::poly::Poly;
use crate::algebra::ratfun::RatFun;
use crate::closedform::expr::{base_point, differentiate, normalize, Expr};
use crate::closedform::integrate::{exp_integral_or_node, integrate_rational};
use crate::error::{Error, Result};
use crate::numerics::real::{Cx, Scalar};
use crate::numerics::verify::{local_exponent, wronskian};
use crate::QRatFun;

use super::chain::Factorization;
use super::hyperexp::strip_constant;

/// Working precision for integrability and Wronskian checks.
const CHECK_BITS: u32 = 192;

/// Numeric Wronskian at 1/2 with the number of digits it was computed at.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub value: String,
    pub digits: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionBasis {
    pub solutions: Vec<Expr>,
    /// Factors each solution was built from, innermost first.
    pub provenance: Vec<Vec<String>>,
    pub witness: Option<Witness>,
}

impl SolutionBasis {
    fn new(solutions: Vec<Expr>, provenance: Vec<Vec<String>>) -> Self {
        SolutionBasis {
            solutions,
            provenance,
            witness: None,
        }
    }

    /// Fills in the Wronskian witness; fails when it vanishes.
    pub fn with_witness(mut self, digits: u32) -> Result<Self> {
        if self.solutions.is_empty() {
            return Ok(self);
        }
        let bits = crate::numerics::bits_for_digits(digits);
        let w: Cx = wronskian(&self.solutions, &base_point(), bits)?;
        if Scalar::is_zero(&w) || w.log2_abs() < -(bits as f64) * 0.75 {
            return Err(Error::WronskianVanishes);
        }
        self.witness = Some(Witness {
            value: w.re().to_decimal(digits as usize),
            digits,
        });
        Ok(self)
    }
}

/// Exact conversion of a rational-function expression.
pub fn as_ratfun(e: &Expr) -> Option<QRatFun> {
    match e {
        Expr::Const(c) => Some(RatFun::constant(c.clone())),
        Expr::Poly(p) => Some(RatFun::from_poly(p.clone())),
        Expr::Add(ts) => ts.iter().try_fold(RatFun::zero(), |acc, t| Some(&acc + &as_ratfun(t)?)),
        Expr::Mul(fs) => fs.iter().try_fold(RatFun::one(), |acc, f| Some(&acc * &as_ratfun(f)?)),
        Expr::Pow(b, k) if k.is_integer() => {
            let b = as_ratfun(b)?;
            let k: i64 = k.to_integer().try_into().ok()?;
            if b.is_zero() && k < 0 {
                return None;
            }
            Some(b.pow(k))
        }
        _ => None,
    }
}

/// Base point for `int body`: 0 when the body is integrable there.
pub fn integral_base_for(body: &Expr) -> Q {
    match local_exponent::<Cx>(body, false, CHECK_BITS) {
        Ok(e) if e > -1.0 + 1e-6 => Q::zero(),
        _ => base_point(),
    }
}

/// An antiderivative of `body`: exact for rational bodies, otherwise an
/// integral node.
pub fn antiderivative(body: &Expr) -> Expr {
    let body = normalize(body);
    if body.is_zero() {
        return Expr::zero();
    }
    if let Some(r) = as_ratfun(&body) {
        if let Ok(ri) = integrate_rational(&r) {
            return ri.to_expr();
        }
    }
    let base = integral_base_for(&body);
    Expr::integral(base, body)
}

fn coeff_expr(p: &Poly<Q>) -> Expr {
    Expr::Poly(p.clone())
}

/// Particular solution of `(q1 D + q0) y = g` given `q s = 0`: `s int g/(q1 s)`.
pub fn particular_first_order(q: &DiffOp, s: &Expr, g: &Expr) -> Expr {
    let body = Expr::mul(vec![
        g.clone(),
        Expr::powi(s.clone(), -1),
        Expr::powi(coeff_expr(&q.coeff(1)), -1),
    ]);
    normalize(&Expr::mul(vec![s.clone(), antiderivative(&body)]))
}

/// `W = exp(-int p1/p2)`, the Wronskian of `p2 D^2 + p1 D + p0` up to a
/// constant.
pub fn abel_wronskian(p2op: &DiffOp) -> Expr {
    let r = -(&RatFun::from_poly(p2op.coeff(1)) / &RatFun::from_poly(p2op.coeff(2)));
    exp_integral_or_node(&r)
}

/// Particular solution of `P2 y = s` by variation of parameters:
/// `-g1 int g2 s/(p2 W) + g2 int g1 s/(p2 W)`.
pub fn particular_second_order(p2op: &DiffOp, g1: &Expr, g2: &Expr, s: &Expr) -> Result<Expr> {
    let w: Cx = wronskian(&[g1.clone(), g2.clone()], &base_point(), CHECK_BITS)?;
    if Scalar::is_zero(&w) || w.log2_abs() < -(CHECK_BITS as f64) * 0.75 {
        return Err(Error::WronskianVanishes);
    }
    let weight = Expr::mul(vec![
        s.clone(),
        Expr::powi(coeff_expr(&p2op.coeff(2)), -1),
        Expr::powi(abel_wronskian(p2op), -1),
    ]);
    let i2 = antiderivative(&Expr::mul(vec![g2.clone(), weight.clone()]));
    let i1 = antiderivative(&Expr::mul(vec![g1.clone(), weight]));
    Ok(normalize(&Expr::add(vec![
        Expr::mul(vec![Expr::int(-1), g1.clone(), i2]),
        Expr::mul(vec![g2.clone(), i1]),
    ])))
}

/// The third solution with weight `w = p2 (g1' g2 - g1 g2')` taken
/// literally: `g1 int s w g2 - g2 int s w g1`. Only correct for normalized
/// `P2`; kept to compare against [`particular_second_order`].
pub fn literal_w_formula(p2op: &DiffOp, g1: &Expr, g2: &Expr, s: &Expr) -> Expr {
    let w = Expr::mul(vec![
        coeff_expr(&p2op.coeff(2)),
        Expr::add(vec![
            Expr::mul(vec![differentiate(g1), g2.clone()]),
            Expr::mul(vec![Expr::int(-1), g1.clone(), differentiate(g2)]),
        ]),
    ]);
    let i2 = antiderivative(&Expr::mul(vec![s.clone(), w.clone(), g2.clone()]));
    let i1 = antiderivative(&Expr::mul(vec![s.clone(), w, g1.clone()]));
    normalize(&Expr::add(vec![
        Expr::mul(vec![g1.clone(), i2]),
        Expr::mul(vec![Expr::int(-1), g2.clone(), i1]),
    ]))
}

/// One factor of a chain with its homogeneous solutions.
#[derive(Clone, Debug)]
pub enum Piece {
    First { op: DiffOp, solution: Expr },
    Second { op: DiffOp, solutions: [Expr; 2] },
}

impl Piece {
    fn label(&self) -> String {
        match self {
            Piece::First { op, .. } => format!("first-order factor {op}"),
            Piece::Second { op, .. } => format!("second-order factor {op}"),
        }
    }

    fn homogeneous(&self) -> Vec<Expr> {
        match self {
            Piece::First { solution, .. } => vec![solution.clone()],
            Piece::Second { solutions, .. } => solutions.to_vec(),
        }
    }

    fn particular(&self, rhs: &Expr) -> Result<Expr> {
        match self {
            Piece::First { op, solution } => Ok(particular_first_order(op, solution, rhs)),
            Piece::Second { op, solutions: [g1, g2] } => particular_second_order(op, g1, g2, rhs),
        }
    }
}

/// Basis of the product `pieces[k] * .. * pieces[0]` (rightmost first).
pub fn compose_pieces(pieces: &[Piece]) -> Result<SolutionBasis> {
    let Some((head, rest)) = pieces.split_first() else {
        return Ok(SolutionBasis::new(vec![], vec![]));
    };
    let label = head.label();
    let mut solutions = vec![];
    let mut provenance = vec![];
    for h in head.homogeneous() {
        solutions.push(strip_constant(normalize(&h)));
        provenance.push(vec![label.clone()]);
    }
    let inner = compose_pieces(rest)?;
    for (z, prov) in inner.solutions.iter().zip(inner.provenance) {
        solutions.push(head.particular(z)?);
        let mut p = prov;
        p.push(label.clone());
        provenance.push(p);
    }
    Ok(SolutionBasis::new(solutions, provenance))
}

/// `f1, f1 int f2/f1, ..` for first-order factors given rightmost first with
/// their solutions.
pub fn compose_dalembertian(chain: &[(DiffOp, Expr)]) -> SolutionBasis {
    let pieces: Vec<Piece> = chain
        .iter()
        .map(|(op, s)| Piece::First {
            op: op.clone(),
            solution: s.clone(),
        })
        .collect();
    compose_pieces(&pieces).expect("first-order composition does not fail")
}

/// `{s, s int g1/(q1 s), s int g2/(q1 s)}` for `P2 * q` with `q s = 0`.
pub fn compose_core_right_of_chain(s: &Expr, q: &DiffOp, g1: &Expr, g2: &Expr) -> SolutionBasis {
    let label = format!("first-order factor {q}");
    let solutions = vec![s.clone(), particular_first_order(q, s, g1), particular_first_order(q, s, g2)];
    let provenance = vec![
        vec![label.clone()],
        vec!["core".into(), label.clone()],
        vec!["core".into(), label],
    ];
    SolutionBasis::new(solutions, provenance)
}

/// `{g1, g2, y}` for `Q * P2` with `Q s = 0`, `y` from variation of parameters.
pub fn compose_core_left_of_chain(g1: &Expr, g2: &Expr, p2op: &DiffOp, s: &Expr) -> Result<SolutionBasis> {
    let label = format!("second-order factor {p2op}");
    let y = particular_second_order(p2op, g1, g2, s)?;
    let provenance = vec![vec![label.clone()], vec![label.clone()], vec!["left factor".into(), label]];
    Ok(SolutionBasis::new(vec![g1.clone(), g2.clone(), y], provenance))
}

/// The pieces of a factorization, rightmost first, with the core solved by
/// `core_solutions`. Without core solutions only the part to the right of
/// the core is returned.
pub fn pieces_of(f: &Factorization, core_solutions: Option<&[Expr; 2]>) -> Vec<Piece> {
    let mut pieces: Vec<Piece> = f
        .right_chain
        .iter()
        .map(|(op, t)| Piece::First {
            op: op.clone(),
            solution: t.to_expr(),
        })
        .collect();
    if let Some(core) = &f.core {
        let Some(sols) = core_solutions else { return pieces };
        pieces.push(Piece::Second {
            op: core.clone(),
            solutions: sols.clone(),
        });
    }
    for (op, t) in f.left_chain.iter().rev() {
        pieces.push(Piece::First {
            op: op.clone(),
            solution: t.to_expr(),
        });
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::parse_sexpr;
    use crate::closedform::sexpr::to_sexpr;
    use crate::numerics::verify::{sample_points, verify_ode_residual};

    fn max_residual(e: &Expr, op: &DiffOp) -> f64 {
        let pts = sample_points(5, &[]);
        verify_ode_residual::<Cx>(e, op, &pts, 192)
            .unwrap()
            .into_iter()
            .fold(0.0, f64::max)
    }

    #[test]
    fn triple_integration() {
        let d = DiffOp::d();
        let basis = compose_dalembertian(&[(d.clone(), Expr::one()), (d.clone(), Expr::one()), (d, Expr::one())]);
        let strs: Vec<String> = basis.solutions.iter().map(to_sexpr).collect();
        assert_eq!(strs, vec!["1", "x", "[0 0 1/2]"]);
    }

    #[test]
    fn log_from_chain() {
        // (x D - 1)^2: x and x log x
        let q = DiffOp::from_ints(&[&[-1], &[0, 1]]);
        let op = q.compose(&q);
        let basis = compose_dalembertian(&[(q.clone(), Expr::x()), (q, Expr::x())]);
        assert_eq!(to_sexpr(&basis.solutions[1]), "(* x (log x))");
        for e in &basis.solutions {
            assert!(max_residual(e, &op) < 1e-20);
        }
    }

    #[test]
    fn leading_coefficient_of_right_factor_matters() {
        // D^2 * (x D - 1) with s = x
        let q = DiffOp::from_ints(&[&[-1], &[0, 1]]);
        let op = DiffOp::from_ints(&[&[], &[], &[1]]).compose(&q);
        let basis = compose_core_right_of_chain(&Expr::x(), &q, &Expr::one(), &Expr::x());
        let strs: Vec<String> = basis.solutions.iter().map(to_sexpr).collect();
        assert_eq!(strs, vec!["x", "-1", "(* x (log x))"]);
        for e in &basis.solutions {
            assert!(max_residual(e, &op) < 1e-25, "{}", to_sexpr(e));
        }
        // without 1/q1 the third element would be x int x/x = x^2
        let naive = normalize(&Expr::mul(vec![Expr::x(), antiderivative(&Expr::one())]));
        assert!(max_residual(&naive, &op) > 1e-3);
    }

    #[test]
    fn monic_right_factor_reproduces_display() {
        // q = D + 2x, s = exp(-x^2)
        let s = parse_sexpr("(exp [0 0 -1])").unwrap();
        let g = parse_sexpr("(pow x 1/3)").unwrap();
        let q = DiffOp::from_ints(&[&[0, 2], &[1]]);
        let b = compose_core_right_of_chain(&s, &q, &g, &g);
        let display = normalize(&Expr::mul(vec![
            s.clone(),
            Expr::int0(normalize(&Expr::mul(vec![g.clone(), Expr::powi(s.clone(), -1)]))),
        ]));
        assert_eq!(b.solutions[1], display);
    }

    #[test]
    fn classical_form_passes_literal_form_fails() {
        // D * x^2 D^2, g = 1, x, s = 1
        let p2 = DiffOp::from_ints(&[&[], &[], &[0, 0, 1]]);
        let op = DiffOp::d().compose(&p2);
        let b = compose_core_left_of_chain(&Expr::one(), &Expr::x(), &p2, &Expr::one()).unwrap();
        assert!(to_sexpr(&b.solutions[2]).contains("log"));
        assert!(max_residual(&b.solutions[2], &op) < 1e-25);
        let lit = literal_w_formula(&p2, &Expr::one(), &Expr::x(), &Expr::one());
        assert_eq!(to_sexpr(&lit), "[0 0 0 0 1/12]");
        assert!(max_residual(&lit, &op) > 1e-3);
    }

    #[test]
    fn normal_form_core_agrees_with_literal_form() {
        // D * D^2: both give x^2/2 modulo {1, x}
        let p2 = DiffOp::from_ints(&[&[], &[], &[1]]);
        let b = compose_core_left_of_chain(&Expr::one(), &Expr::x(), &p2, &Expr::one()).unwrap();
        let lit = literal_w_formula(&p2, &Expr::one(), &Expr::x(), &Expr::one());
        let op = DiffOp::d().compose(&p2);
        assert!(max_residual(&b.solutions[2], &op) < 1e-25);
        assert!(max_residual(&lit, &op) < 1e-25);
    }

    #[test]
    fn dependent_pair_is_rejected() {
        let p2 = DiffOp::from_ints(&[&[], &[], &[1]]);
        let err = compose_core_left_of_chain(&Expr::x(), &parse_sexpr("[0 2]").unwrap(), &p2, &Expr::one());
        assert_eq!(err.unwrap_err(), Error::WronskianVanishes);
    }

    #[test]
    fn witness_is_recorded() {
        let b = compose_dalembertian(&[(DiffOp::d(), Expr::one()), (DiffOp::d(), Expr::one())])
            .with_witness(30)
            .unwrap();
        assert_eq!(b.witness.unwrap().value, "1");
    }
}

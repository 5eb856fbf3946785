//! Kovacic's algorithm for second-order operators over Q(x), cases 1 and 2,
//! with detection of the remaining cases.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::field::{q, q_sqrt, Q};
use crate::algebra::ore::DiffOp;
use crate::algebra::poly::Poly;
use crate::algebra::polysol::monic_solution;
use crate::algebra::ratfun::RatFun;
use crate::algebra::roots::split_rational;
use crate::closedform::expr::{base_point, normalize, Expr};
use crate::closedform::integrate::{exp_integral_or_node, integrate_rational};
use crate::closedform::radical::integrate_sqrt;
use crate::error::{Error, Result};

type QPoly = Poly<Q>;
type QRatFun = RatFun<Q>;

/// Largest number of sign/exponent families tried in one case.
const MAX_FAMILIES: usize = 1 << 14;

/// `y'' = r y`, reached from `p2 f'' + p1 f' + p0 f = 0` by `f = y exp(-int shift)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub r: QRatFun,
    /// `p1 / (2 p2)`.
    pub shift: QRatFun,
}

pub fn to_normal_form(op: &DiffOp) -> Result<NormalForm> {
    if op.order() != 2 {
        return Err(Error::Invalid(format!(
            "expected an order-2 operator, got order {}",
            op.order()
        )));
    }
    let p2 = RatFun::from_poly(op.coeff(2));
    let p1 = RatFun::from_poly(op.coeff(1));
    let p0 = RatFun::from_poly(op.coeff(0));
    let shift = (&p1 / &p2).scale(&q(1, 2));
    let r = &(&shift.derivative() + &(&shift * &shift)) - &(&p0 / &p2);
    Ok(NormalForm { r, shift })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CaseTag {
    RationalOmega,
    QuadraticOmega,
    UnsupportedCase3,
    NoLiouvillian,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::RationalOmega => "RationalOmega",
            CaseTag::QuadraticOmega => "QuadraticOmega",
            CaseTag::UnsupportedCase3 => "UnsupportedCase3",
            CaseTag::NoLiouvillian => "NoLiouvillian",
        };
        f.write_str(s)
    }
}

/// Logarithmic derivative of a solution: rational, or a root of
/// `w^2 + a w + b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Omega {
    Rational(QRatFun),
    Quadratic { a: QRatFun, b: QRatFun },
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Rational(w) => write!(f, "{w}"),
            Omega::Quadratic { a, b } => write!(f, "root of w^2 + ({a}) w + ({b})"),
        }
    }
}

impl Omega {
    /// Same data for `f = y exp(-int shift)`.
    fn shifted(&self, shift: &QRatFun) -> Omega {
        match self {
            Omega::Rational(w) => Omega::Rational(w - shift),
            Omega::Quadratic { a, b } => {
                // (w + c)^2 + a (w + c) + b
                let c = shift;
                Omega::Quadratic {
                    a: a + &c.scale(&q(2, 1)),
                    b: &(b + &(a * c)) + &(c * c),
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct KovacicResult {
    pub tag: CaseTag,
    /// In the coordinates of the input operator.
    pub omega: Option<Omega>,
    pub normal_form: NormalForm,
    /// Basis of solutions when a closed form was reached.
    pub solutions: Option<[Expr; 2]>,
    /// Whether every solution above is free of unevaluated integrals.
    pub closed: bool,
    /// Configurations skipped because they need algebraic numbers.
    pub warnings: Vec<String>,
}

/// `p2 (w' + w^2) + p1 w + p0`.
pub fn riccati_residual(op: &DiffOp, w: &QRatFun) -> QRatFun {
    let p2 = RatFun::from_poly(op.coeff(2));
    let p1 = RatFun::from_poly(op.coeff(1));
    let p0 = RatFun::from_poly(op.coeff(0));
    &(&(&p2 * &(&w.derivative() + &(w * w))) + &(&p1 * w)) + &p0
}

/// Remainder `(u, v)` of the Riccati expression modulo `w^2 + a w + b`,
/// meaning `p2 (w' + w^2) + p1 w + p0 = u + v w` for either root `w`.
pub fn quadratic_certificate(op: &DiffOp, a: &QRatFun, b: &QRatFun) -> (QRatFun, QRatFun) {
    let p2 = RatFun::from_poly(op.coeff(2));
    let p1 = RatFun::from_poly(op.coeff(1));
    let p0 = RatFun::from_poly(op.coeff(0));
    let disc = &(a * a) - &b.scale(&q(4, 1));
    let da = a.derivative();
    let db = b.derivative();
    // w' = -((2b' - a a') w + (a b' - 2 a' b)) / (a^2 - 4b), w^2 = -a w - b
    let wp_w = -(&(&db.scale(&q(2, 1)) - &(a * &da)) / &disc);
    let wp_1 = -(&(&(a * &db) - &(&da * b).scale(&q(2, 1))) / &disc);
    let v = &(&p2 * &(&wp_w - a)) + &p1;
    let u = &(&p2 * &(&wp_1 - b)) + &p0;
    (u, v)
}

/// A finite pole of `r`: either rational, or the set of roots of a monic
/// polynomial without rational roots, all of the same order.
#[derive(Clone, Debug)]
struct PoleSite {
    factor: QPoly,
    root: Option<Q>,
    order: usize,
}

fn pole_sites(r: &QRatFun) -> Vec<PoleSite> {
    let mut out = vec![];
    for (idx, part) in r.den().squarefree().iter().enumerate() {
        if part.deg() <= 0 {
            continue;
        }
        let (roots, rest) = split_rational(part);
        for (c, _) in roots {
            out.push(PoleSite {
                factor: Poly::linear_root(c.clone()),
                root: Some(c),
                order: idx + 1,
            });
        }
        if rest.deg() > 0 {
            out.push(PoleSite {
                factor: rest.monic(),
                root: None,
                order: idx + 1,
            });
        }
    }
    out
}

/// Coefficient of `(x - c)^-2` at every root of an order-2 irrational site,
/// when it is the same rational number at all of them.
fn constant_b(r: &QRatFun, site: &PoleSite) -> Option<Q> {
    let qf = &site.factor;
    let w = r.den().div_exact(&qf.pow(2))?;
    let dq = qf.derivative();
    let den = (&(&dq * &dq) * &w).rem(qf);
    let h = (r.num() * &den.inv_mod(qf)?).rem(qf);
    h.is_constant().then(|| h.coeff(0))
}

/// Square-root series `b` of `a` (`a[0]` a rational square), first `n` terms.
fn sqrt_series(a: &[Q], n: usize) -> Option<Vec<Q>> {
    let b0 = q_sqrt(&a[0])?;
    let mut b = vec![b0.clone()];
    for k in 1..n {
        let mut acc = a.get(k).cloned().unwrap_or_else(Q::zero);
        for i in 1..k {
            acc -= &b[i] * &b[k - i];
        }
        b.push(acc / (&b0 + &b0));
    }
    Some(b)
}

/// One choice at a site: contribution to `theta` and to the degree count.
#[derive(Clone, Debug)]
struct Choice {
    theta: QRatFun,
    weight: Q,
}

fn enumerate_families(sites: &[Vec<Choice>], d_inf: &[Choice]) -> Vec<(QRatFun, Q)> {
    let mut out = vec![];
    let total: usize = sites.iter().map(|s| s.len()).product::<usize>() * d_inf.len();
    if total == 0 || total > MAX_FAMILIES {
        return out;
    }
    for ci in d_inf {
        let mut idx = vec![0usize; sites.len()];
        loop {
            let mut theta = ci.theta.clone();
            let mut d = ci.weight.clone();
            for (s, &k) in sites.iter().zip(&idx) {
                theta = &theta + &s[k].theta;
                d -= &s[k].weight;
            }
            out.push((theta, d));
            let mut pos = 0;
            loop {
                if pos == sites.len() {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < sites[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == sites.len() {
                break;
            }
        }
    }
    out
}

fn nonneg_integer(d: &Q) -> Option<usize> {
    (d.is_integer() && !d.is_negative())
        .then(|| d.to_integer().try_into().ok())
        .flatten()
}

fn alpha_pair(b: &Q) -> Option<(Q, Q)> {
    let s = q_sqrt(&(Q::one() + b * q(4, 1)))?;
    let half = q(1, 2);
    Some((&half + &(&s * &half), &half - &(&s * &half)))
}

fn dedup_choices(mut v: Vec<Choice>) -> Vec<Choice> {
    let mut out: Vec<Choice> = vec![];
    for c in v.drain(..) {
        if !out.iter().any(|o| o.theta == c.theta && o.weight == c.weight) {
            out.push(c);
        }
    }
    out
}

/// Rational solutions of the Riccati equation `w' + w^2 = r`.
pub fn kovacic_case1(nf: &NormalForm, warnings: &mut Vec<String>) -> Option<QRatFun> {
    let r = &nf.r;
    if r.is_zero() {
        return Some(RatFun::zero());
    }
    let sites = pole_sites(r);
    let mut choices = vec![];
    for s in &sites {
        let m = s.order;
        if m > 2 && m % 2 == 1 {
            return None;
        }
        let logd = RatFun::new(s.factor.derivative(), s.factor.clone());
        let deg = Q::from_integer(s.factor.deg().into());
        let mut cs = vec![];
        match (&s.root, m) {
            (_, 1) => cs.push(Choice {
                theta: logd,
                weight: deg,
            }),
            (Some(c), 2) => {
                let (_, a) = r.laurent_at(c, 1);
                let Some((ap, am)) = alpha_pair(&a[0]) else {
                    warnings.push(format!("case 1: irrational exponent at x = {c}"));
                    return None;
                };
                for al in [ap, am] {
                    cs.push(Choice {
                        theta: RatFun::pole(al.clone(), c.clone(), 1),
                        weight: al,
                    });
                }
            }
            (None, 2) => {
                let Some((ap, am)) = constant_b(r, s).and_then(|b| alpha_pair(&b)) else {
                    warnings.push(format!(
                        "case 1: non-constant or irrational exponents at roots of {}",
                        s.factor
                    ));
                    return None;
                };
                for al in [ap, am] {
                    cs.push(Choice {
                        theta: logd.scale(&al),
                        weight: &al * &deg,
                    });
                }
            }
            (Some(c), _) => {
                let nu = m / 2;
                let (_, a) = r.laurent_at(c, nu + 1);
                let Some(b) = sqrt_series(&a, nu) else {
                    warnings.push(format!("case 1: irrational square-root expansion at x = {c}"));
                    return None;
                };
                let mut sq = RatFun::zero();
                for (k, bk) in b.iter().enumerate().take(nu - 1) {
                    sq = &sq + &RatFun::pole(bk.clone(), c.clone(), nu - k);
                }
                let ratio = &b[nu - 1] * q(2, 1);
                let nuq = Q::from_integer(nu.into());
                for sign in [1, -1] {
                    let al = (&ratio * Q::from_integer(sign.into()) + &nuq) * q(1, 2);
                    let th = &sq.scale(&Q::from_integer(sign.into())) + &RatFun::pole(al.clone(), c.clone(), 1);
                    cs.push(Choice { theta: th, weight: al });
                }
            }
            (None, _) => {
                warnings.push(format!("case 1: pole of order {m} at roots of {}", s.factor));
                return None;
            }
        }
        choices.push(dedup_choices(cs));
    }
    let inf = infinity_choices_case1(r, warnings)?;
    for (theta, d) in enumerate_families(&choices, &inf) {
        let Some(d) = nonneg_integer(&d) else { continue };
        let coef = &(&theta.derivative() + &(&theta * &theta)) - r;
        let two_theta = theta.scale(&q(2, 1));
        let images: Vec<QRatFun> = (0..=d)
            .map(|k| {
                let p = RatFun::from_poly(Poly::monomial(Q::one(), k));
                let p1 = p.derivative();
                &(&p1.derivative() + &(&two_theta * &p1)) + &(&coef * &p)
            })
            .collect();
        if let Some(pp) = monic_solution(&images) {
            let w = &theta + &RatFun::new(pp.derivative(), pp);
            if (&w.derivative() + &(&w * &w)) == *r {
                return Some(w);
            }
        }
    }
    None
}

fn infinity_choices_case1(r: &QRatFun, warnings: &mut Vec<String>) -> Option<Vec<Choice>> {
    let o = r.order_at_infinity().unwrap();
    let zero = RatFun::zero();
    if o > 2 {
        return Some(vec![
            Choice {
                theta: zero.clone(),
                weight: Q::zero(),
            },
            Choice {
                theta: zero,
                weight: Q::one(),
            },
        ]);
    }
    if o == 2 {
        let (_, a) = r.laurent_at_infinity(1);
        let Some((ap, am)) = alpha_pair(&a[0]) else {
            warnings.push("case 1: irrational exponent at infinity".into());
            return None;
        };
        return Some(dedup_choices(vec![
            Choice {
                theta: zero.clone(),
                weight: ap,
            },
            Choice { theta: zero, weight: am },
        ]));
    }
    if o % 2 != 0 {
        return None;
    }
    let nu = (-o / 2) as usize;
    let (_, a) = r.laurent_at_infinity(nu + 2);
    let Some(b) = sqrt_series(&a, nu + 2) else {
        warnings.push("case 1: irrational square-root expansion at infinity".into());
        return None;
    };
    let mut sq = QPoly::zero();
    for (k, bk) in b.iter().enumerate().take(nu + 1) {
        sq = &sq + &Poly::monomial(bk.clone(), nu - k);
    }
    let ratio = &b[nu + 1] * q(2, 1);
    let nuq = Q::from_integer(nu.into());
    let mut out = vec![];
    for sign in [1, -1] {
        let sg = Q::from_integer(sign.into());
        let al = (&ratio * &sg - &nuq) * q(1, 2);
        out.push(Choice {
            theta: RatFun::from_poly(sq.scale(&sg)),
            weight: al,
        });
    }
    Some(dedup_choices(out))
}

/// Quadratic `w^2 + a w + b` whose roots solve `w' + w^2 = r`.
pub fn kovacic_case2(nf: &NormalForm, warnings: &mut Vec<String>) -> Option<(QRatFun, QRatFun)> {
    let r = &nf.r;
    if r.is_zero() {
        return None;
    }
    let sites = pole_sites(r);
    if !sites.iter().any(|s| s.order == 2 || (s.order > 2 && s.order % 2 == 1)) {
        return None;
    }
    let half = q(1, 2);
    let mut choices = vec![];
    for s in &sites {
        let logd = RatFun::new(s.factor.derivative(), s.factor.clone());
        let deg = Q::from_integer(s.factor.deg().into());
        let es: Vec<Q> = match (s.order, &s.root) {
            (1, _) => vec![q(4, 1)],
            (2, root) => {
                let b = match root {
                    Some(c) => Some(r.laurent_at(c, 1).1[0].clone()),
                    None => constant_b(r, s),
                };
                let Some(b) = b else {
                    warnings.push(format!("case 2: non-constant exponents at roots of {}", s.factor));
                    return None;
                };
                let mut v = vec![q(2, 1)];
                if let Some(sq) = q_sqrt(&(Q::one() + &b * q(4, 1))) {
                    for e in [q(2, 1) + &sq * q(2, 1), q(2, 1) - &sq * q(2, 1)] {
                        if e.is_integer() {
                            v.push(e);
                        }
                    }
                }
                v
            }
            (m, _) => vec![Q::from_integer(m.into())],
        };
        let cs = es
            .into_iter()
            .map(|e| Choice {
                theta: logd.scale(&(&e * &half)),
                weight: &e * &deg,
            })
            .collect();
        choices.push(dedup_choices(cs));
    }
    let o = r.order_at_infinity().unwrap();
    let einf: Vec<Q> = if o > 2 {
        vec![Q::zero(), q(2, 1), q(4, 1)]
    } else if o == 2 {
        let (_, a) = r.laurent_at_infinity(1);
        let mut v = vec![q(2, 1)];
        if let Some(sq) = q_sqrt(&(Q::one() + &a[0] * q(4, 1))) {
            for e in [q(2, 1) + &sq * q(2, 1), q(2, 1) - &sq * q(2, 1)] {
                if e.is_integer() {
                    v.push(e);
                }
            }
        }
        v
    } else {
        vec![Q::from_integer(o.into())]
    };
    let inf: Vec<Choice> = dedup_choices(
        einf.into_iter()
            .map(|e| Choice {
                theta: RatFun::zero(),
                weight: e,
            })
            .collect(),
    );
    let dr = r.derivative();
    for (theta, d2) in enumerate_families(&choices, &inf) {
        let Some(d) = nonneg_integer(&(&d2 * &half)) else { continue };
        let th1 = theta.derivative();
        let th2 = th1.derivative();
        let three = q(3, 1);
        let c2 = theta.scale(&three);
        let c1 = &(&(&theta * &theta).scale(&three) + &th1.scale(&three)) - &r.scale(&q(4, 1));
        let c0 = &(&(&(&th2 + &(&theta * &th1).scale(&three)) + &(&(&theta * &theta) * &theta)) - &(r * &theta).scale(&q(4, 1)))
            - &dr.scale(&q(2, 1));
        let images: Vec<QRatFun> = (0..=d)
            .map(|k| {
                let p = RatFun::from_poly(Poly::monomial(Q::one(), k));
                let p1 = p.derivative();
                let p2 = p1.derivative();
                let p3 = p2.derivative();
                &(&(&p3 + &(&c2 * &p2)) + &(&c1 * &p1)) + &(&c0 * &p)
            })
            .collect();
        if let Some(pp) = monic_solution(&images) {
            let phi = &theta + &RatFun::new(pp.derivative(), pp);
            let a = -&phi;
            let b = &(&phi.derivative() + &(&phi * &phi)).scale(&half) - r;
            return Some((a, b));
        }
    }
    None
}

/// Whether the pole structure leaves room for case 3.
fn case3_possible(r: &QRatFun) -> bool {
    let o = r.order_at_infinity().unwrap_or(i64::MAX);
    o >= 2 && pole_sites(r).iter().all(|s| s.order <= 2)
}

/// Exponent of `exp(int rho)` at 0 when `rho` has at most a simple pole there.
fn exponent_at_zero(rho: &QRatFun) -> Option<Q> {
    if rho.is_zero() {
        return Some(Q::zero());
    }
    let (v, a) = rho.laurent_at(&Q::zero(), 1);
    match v {
        v if v >= 0 => Some(Q::zero()),
        -1 => Some(a[0].clone()),
        _ => None,
    }
}

/// Base point for `int body`, where `body = exp(int rho)`: 0 when the
/// integral converges there, otherwise the default base point.
pub fn integral_base(rho: &QRatFun) -> Q {
    match exponent_at_zero(rho) {
        Some(e) if e > -Q::one() => Q::zero(),
        _ => base_point(),
    }
}

/// Second solution by reduction of order from the rational log-derivative
/// `w` of a first solution. Returns the expression and whether it is free
/// of unevaluated integrals.
pub fn second_solution(op: &DiffOp, w: &QRatFun) -> (Expr, bool) {
    let f1 = exp_integral_or_node(w);
    let p2 = RatFun::from_poly(op.coeff(2));
    let p1 = RatFun::from_poly(op.coeff(1));
    // integrand W / f1^2 has log-derivative -p1/p2 - 2w
    let rho = &-(&p1 / &p2) - &w.scale(&q(2, 1));
    if let Ok(ri) = integrate_rational(&rho) {
        let integer_powers = ri.rational_part.is_zero() && ri.log_terms.iter().all(|(c, _)| c.is_integer());
        if integer_powers {
            let mut h = RatFun::one();
            for (c, p) in &ri.log_terms {
                h = &h * &RatFun::from_poly(p.clone()).pow(c.to_integer().try_into().unwrap());
            }
            if let Ok(hi) = integrate_rational(&h) {
                return (normalize(&Expr::mul(vec![f1, hi.to_expr()])), true);
            }
        }
    }
    let body = exp_integral_or_node(&rho);
    let base = integral_base(&rho);
    (normalize(&Expr::mul(vec![f1, Expr::integral(base, body)])), false)
}

/// The two conjugate solutions `exp(int w)` for the roots `w` of
/// `w^2 + a w + b` (input coordinates).
pub fn quadratic_solutions(a: &QRatFun, b: &QRatFun) -> ([Expr; 2], bool) {
    let disc = &(a * a) - &b.scale(&q(4, 1));
    let base = exp_integral_or_node(&a.scale(&q(-1, 2)));
    let (s, m, rad) = split_square(&disc);
    let s_over_m = RatFun::new(s, m);
    let half = q(1, 2);
    match integrate_sqrt(&s_over_m, &rad) {
        Ok(ai) => {
            let plus = normalize(&Expr::mul(vec![base.clone(), ai.exp_expr(&half)]));
            let minus = normalize(&Expr::mul(vec![base, ai.exp_expr(&-half)]));
            ([plus, minus], true)
        }
        Err(_) => {
            let body = normalize(&Expr::mul(vec![Expr::ratfun(&s_over_m), Expr::sqrt(Expr::Poly(rad))]));
            let int = Expr::integral(base_point(), body);
            let plus = normalize(&Expr::mul(vec![
                base.clone(),
                Expr::exp(Expr::mul(vec![Expr::c(half.clone()), int.clone()])),
            ]));
            let minus = normalize(&Expr::mul(vec![base, Expr::exp(Expr::mul(vec![Expr::c(-half), int]))]));
            ([plus, minus], false)
        }
    }
}

/// Writes `n/m = (S/M)^2 R` with `R` squarefree with integer coefficients.
fn split_square(f: &QRatFun) -> (QPoly, QPoly, QPoly) {
    let m = f.den().clone();
    let nm = f.num() * &m;
    let lc = nm.lc();
    let mut s = QPoly::one();
    let mut rad = QPoly::constant(lc.clone());
    for (i, part) in nm.squarefree().iter().enumerate() {
        let k = i + 1;
        s = &s * &part.pow(k / 2);
        if k % 2 == 1 {
            rad = &rad * part;
        }
    }
    // move rational content of the radicand out of the root
    let (content, prim) = rad.content_primitive();
    let den = Q::from_integer(content.denom().clone());
    let num = content * &den * &den;
    let rad = prim.scale(&num);
    let s = s.scale(&(Q::one() / &den));
    (s, m, rad)
}

/// Runs cases 1 and 2 and reports the outcome.
pub fn kovacic(op: &DiffOp) -> Result<KovacicResult> {
    let nf = to_normal_form(op)?;
    let mut warnings = vec![];
    if let Some(w) = kovacic_case1(&nf, &mut warnings) {
        let omega = Omega::Rational(&w - &nf.shift);
        let Omega::Rational(wf) = &omega else { unreachable!() };
        debug_assert!(riccati_residual(op, wf).is_zero());
        let f1 = exp_integral_or_node(wf);
        let (f2, closed2) = second_solution(op, wf);
        let closed1 = !matches!(f1, Expr::ExpInt(_));
        return Ok(KovacicResult {
            tag: CaseTag::RationalOmega,
            omega: Some(omega),
            normal_form: nf,
            solutions: Some([f1, f2]),
            closed: closed1 && closed2,
            warnings,
        });
    }
    if let Some((a, b)) = kovacic_case2(&nf, &mut warnings) {
        let omega = Omega::Quadratic { a, b }.shifted(&nf.shift);
        let Omega::Quadratic { a, b } = &omega else { unreachable!() };
        let (sols, closed) = quadratic_solutions(a, b);
        return Ok(KovacicResult {
            tag: CaseTag::QuadraticOmega,
            omega: Some(omega),
            normal_form: nf,
            solutions: Some(sols),
            closed,
            warnings,
        });
    }
    let tag = if case3_possible(&nf.r) {
        CaseTag::UnsupportedCase3
    } else {
        CaseTag::NoLiouvillian
    };
    Ok(KovacicResult {
        tag,
        omega: None,
        normal_form: nf,
        solutions: None,
        closed: false,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    #[test]
    fn airy_has_no_liouvillian_solutions() {
        let res = kovacic(&DiffOp::from_ints(&[&[0, -1], &[], &[1]])).unwrap();
        assert_eq!(res.tag, CaseTag::NoLiouvillian);
        assert!(res.warnings.is_empty());
    }

    #[test]
    fn euler_operator_is_case_one() {
        // x^2 f'' - 2 f = 0: solutions x^2, 1/x
        let op = DiffOp::from_ints(&[&[-2], &[], &[0, 0, 1]]);
        let res = kovacic(&op).unwrap();
        assert_eq!(res.tag, CaseTag::RationalOmega);
        let Some(Omega::Rational(w)) = &res.omega else { panic!() };
        assert!(riccati_residual(&op, w).is_zero());
    }

    #[test]
    fn sqrt_solutions_found_in_case_two() {
        // 4x f'' + 2f' - f = 0: exp(sqrt(x)), exp(-sqrt(x))
        let op = DiffOp::from_ints(&[&[-1], &[2], &[0, 4]]);
        let res = kovacic(&op).unwrap();
        assert_eq!(res.tag, CaseTag::QuadraticOmega);
        let Some(Omega::Quadratic { a, b }) = &res.omega else {
            panic!()
        };
        let (u, v) = quadratic_certificate(&op, a, b);
        assert!(u.is_zero() && v.is_zero());
        assert!(res.closed);
    }

    #[test]
    fn normal_form_of_constant_coefficients() {
        let nf = to_normal_form(&DiffOp::from_ints(&[&[1], &[2], &[1]])).unwrap();
        assert!(nf.r.is_zero());
        assert_eq!(nf.shift, RatFun::constant(qi(1)));
    }

    #[test]
    fn complex_exponentials_need_algebraic_numbers() {
        // x^2 f'' + x f' + (x^2 - 1/4) f: cos(x)/sqrt(x) and sin(x)/sqrt(x);
        // the search needs sqrt(-1) and says so
        let op = DiffOp::new(vec![
            Poly::new(vec![q(-1, 4), Q::zero(), Q::one()]),
            Poly::from_ints(&[0, 1]),
            Poly::from_ints(&[0, 0, 1]),
        ]);
        let res = kovacic(&op).unwrap();
        assert_eq!(res.tag, CaseTag::NoLiouvillian);
        assert!(!res.warnings.is_empty());
    }
}

//! Integrals of `s(x) sqrt(R(x))` with `deg R <= 2`, rationalized by an
//! Euler substitution.

use num_traits::{One, Zero};

use super::expr::{base_point, normalize, Expr};
use super::integrate::{integrate_rational, RationalIntegral};
use crate::algebra::field::{q_sqrt, q_to_f64, Q};
use crate::algebra::poly::Poly;
use crate::algebra::ratfun::RatFun;
use crate::algebra::roots::rational_roots;
use crate::error::{Error, Result};

type QPoly = Poly<Q>;
type QRatFun = RatFun<Q>;

/// How `u` is defined from `x` and `sqrt(R)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Substitution {
    /// `u = sqrt(R)`, `R` linear.
    Linear,
    /// `u = sqrt(R) + s x` where the leading coefficient of `R` is `s^2`.
    Leading(Q),
    /// `u = (sqrt(R) - s) / x` where `R(0) = s^2`.
    Constant(Q),
    /// `u = sqrt(R) / (x - r)` where `R(r) = 0`.
    Root(Q),
}

/// `int s(x) sqrt(R(x)) dx = F(u(x))` with `F` rational plus logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicIntegral {
    pub radicand: QPoly,
    pub subst: Substitution,
    /// Antiderivative in the variable `u`.
    pub in_u: RationalIntegral,
}

/// Evaluates a polynomial at a rational function.
fn compose(p: &QPoly, r: &QRatFun) -> QRatFun {
    let mut acc = RatFun::zero();
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * r) + &RatFun::constant(c.clone());
    }
    acc
}

fn compose_rat(f: &QRatFun, r: &QRatFun) -> QRatFun {
    &compose(f.num(), r) / &compose(f.den(), r)
}

fn pick_substitution(radicand: &QPoly) -> Result<Substitution> {
    match radicand.deg() {
        1 => Ok(Substitution::Linear),
        2 => {
            if let Some(r) = rational_roots(radicand).into_iter().next() {
                return Ok(Substitution::Root(r));
            }
            if let Some(s) = q_sqrt(&radicand.lc()) {
                return Ok(Substitution::Leading(s));
            }
            if let Some(s) = q_sqrt(&radicand.coeff(0)) {
                return Ok(Substitution::Constant(s));
            }
            Err(Error::RadicandTooComplex(format!(
                "no rational Euler substitution for {radicand}"
            )))
        }
        d => Err(Error::RadicandTooComplex(format!("radicand of degree {d}"))),
    }
}

/// `(x(u), sqrt(R)(u))`.
fn parametrize(radicand: &QPoly, subst: &Substitution) -> (QRatFun, QRatFun) {
    let u = RatFun::x();
    let uu = &u * &u;
    let a = radicand.coeff(2);
    let b = radicand.coeff(1);
    let c = radicand.coeff(0);
    match subst {
        Substitution::Linear => {
            let x = (&uu - &RatFun::constant(c)).scale(&(Q::one() / &b));
            (x, u)
        }
        Substitution::Leading(s) => {
            let num = &uu - &RatFun::constant(c);
            let den = &RatFun::constant(b) + &u.scale(&(s + s));
            let x = &num / &den;
            let sq = &u - &x.scale(s);
            (x, sq)
        }
        Substitution::Constant(s) => {
            let num = &u.scale(&(s + s)) - &RatFun::constant(b);
            let den = &RatFun::constant(a) - &uu;
            let x = &num / &den;
            let sq = &(&x * &u) + &RatFun::constant(s.clone());
            (x, sq)
        }
        Substitution::Root(r) => {
            let r2 = -(&b / &a) - r;
            let num = &RatFun::constant(&a * &r2) - &uu.scale(r);
            let den = &RatFun::constant(a.clone()) - &uu;
            let x = &num / &den;
            let sq = &(&x - &RatFun::constant(r.clone())) * &u;
            (x, sq)
        }
    }
}

/// Antiderivative of `s(x) sqrt(radicand(x))`. The radicand must be
/// positive at the base point so the result is real near 1/2.
pub fn integrate_sqrt(s: &QRatFun, radicand: &QPoly) -> Result<AlgebraicIntegral> {
    if q_to_f64(&radicand.eval(&base_point())) <= 0.0 {
        return Err(Error::RadicandTooComplex(format!("{radicand} is not positive at 1/2")));
    }
    let subst = pick_substitution(radicand)?;
    let (x, sq) = parametrize(radicand, &subst);
    let integrand = &(&compose_rat(s, &x) * &sq) * &x.derivative();
    let in_u = integrate_rational(&integrand)
        .map_err(|_| Error::RadicandTooComplex("non-rational residues after substitution".into()))?;
    Ok(AlgebraicIntegral {
        radicand: radicand.clone(),
        subst,
        in_u,
    })
}

/// `int s(x) sqrt(R(x)) dx` as an expression in `x`.
pub fn rationalize_quadratic_radical(s: &QRatFun, radicand: &QPoly) -> Result<Expr> {
    Ok(integrate_sqrt(s, radicand)?.to_expr())
}

impl AlgebraicIntegral {
    fn sqrt_expr(&self) -> Expr {
        Expr::sqrt(Expr::Poly(self.radicand.clone()))
    }

    /// `u` as an expression in `x`.
    pub fn u_expr(&self) -> Expr {
        let sq = self.sqrt_expr();
        let e = match &self.subst {
            Substitution::Linear => sq,
            Substitution::Leading(s) => Expr::add(vec![sq, Expr::Poly(Poly::monomial(s.clone(), 1))]),
            Substitution::Constant(s) => Expr::mul(vec![Expr::add(vec![sq, Expr::c(-s.clone())]), Expr::powi(Expr::x(), -1)]),
            Substitution::Root(r) => Expr::mul(vec![sq, Expr::powi(Expr::Poly(Poly::linear_root(r.clone())), -1)]),
        };
        normalize(&e)
    }

    fn u_at_base(&self) -> f64 {
        let x = q_to_f64(&base_point());
        let sq = q_to_f64(&self.radicand.eval(&base_point())).sqrt();
        match &self.subst {
            Substitution::Linear => sq,
            Substitution::Leading(s) => sq + q_to_f64(s) * x,
            Substitution::Constant(s) => (sq - q_to_f64(s)) / x,
            Substitution::Root(r) => sq / (x - q_to_f64(r)),
        }
    }

    fn poly_in_u(&self, p: &QPoly, u: &Expr) -> Expr {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Expr::mul(vec![Expr::c(c.clone()), Expr::powi(u.clone(), k as i64)]))
            .collect();
        Expr::add(terms)
    }

    fn rat_in_u(&self, r: &QRatFun, u: &Expr) -> Expr {
        Expr::mul(vec![self.poly_in_u(r.num(), u), Expr::powi(self.poly_in_u(r.den(), u), -1)])
    }

    /// Log argument, negated if needed to be positive at the base point.
    fn log_arg(&self, p: &QPoly, u: &Expr) -> Expr {
        let u0 = self.u_at_base();
        let v: f64 = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * u0 + q_to_f64(c));
        let p = if v < 0.0 { -p } else { p.clone() };
        self.poly_in_u(&p, u)
    }

    pub fn to_expr(&self) -> Expr {
        let u = self.u_expr();
        let mut terms = vec![self.rat_in_u(&self.in_u.rational_part, &u)];
        for (c, p) in &self.in_u.log_terms {
            terms.push(Expr::mul(vec![Expr::c(c.clone()), Expr::log(self.log_arg(p, &u))]));
        }
        normalize(&Expr::add(terms))
    }

    /// `exp(kappa * int s sqrt(R))`, up to a constant factor.
    pub fn exp_expr(&self, kappa: &Q) -> Expr {
        let u = self.u_expr();
        let mut fs = vec![];
        if !self.in_u.rational_part.is_zero() {
            fs.push(Expr::exp(Expr::mul(vec![
                Expr::c(kappa.clone()),
                self.rat_in_u(&self.in_u.rational_part, &u),
            ])));
        }
        for (c, p) in &self.in_u.log_terms {
            fs.push(Expr::pow(self.log_arg(p, &u), c * kappa));
        }
        normalize(&Expr::mul(fs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::sexpr::to_sexpr;

    #[test]
    fn inverse_sqrt_of_linear() {
        let s = RatFun::new(Poly::one(), Poly::from_ints(&[1, -1]));
        let e = rationalize_quadratic_radical(&s, &Poly::from_ints(&[1, -1])).unwrap();
        assert_eq!(to_sexpr(&e), "(* -2 (pow [1 -1] 1/2))");
    }

    #[test]
    fn substitution_integrand_matches_in_u() {
        // s sqrt(R) dx pulled back agrees with d/du of the antiderivative
        let cases = [
            (
                Poly::from_ints(&[0, 1, 1]),
                RatFun::new(Poly::one(), Poly::from_ints(&[0, 1, 1])),
            ),
            (
                Poly::from_ints(&[1, 0, 1]),
                RatFun::new(Poly::one(), Poly::from_ints(&[1, 0, 1])),
            ),
            (
                Poly::from_ints(&[4, 0, -1]),
                RatFun::new(Poly::one(), Poly::from_ints(&[0, 1])),
            ),
        ];
        for (r, s) in cases {
            let ai = integrate_sqrt(&s, &r).unwrap();
            let (x, sq) = parametrize(&r, &ai.subst);
            let integrand = &(&compose_rat(&s, &x) * &sq) * &x.derivative();
            assert_eq!(ai.in_u.derivative(), integrand);
            // the parametrization really satisfies sq^2 = R(x)
            assert_eq!(&sq * &sq, compose(&r, &x));
        }
        let r = Poly::from_ints(&[4, 1, 3]);
        let (x, sq) = parametrize(&r, &Substitution::Constant(Q::from_integer(2.into())));
        assert_eq!(&sq * &sq, compose(&r, &x));
    }

    #[test]
    fn rejects_unsupported_radicands() {
        let s = RatFun::one();
        assert!(integrate_sqrt(&s, &Poly::from_ints(&[2, 0, 3])).is_err());
        assert!(integrate_sqrt(&s, &Poly::from_ints(&[-1, 1])).is_err());
        assert!(integrate_sqrt(&s, &Poly::from_ints(&[1, 0, 0, 1])).is_err());
    }
}

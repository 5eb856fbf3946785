//! Canonical s-expression serialization of [`Expr`].
//!
//! Atoms: the scope variable (`x` at top level, the declared dummy inside an
//! integral), `pi`, `log2`, `log3`, rationals `p/q`, decimal literals.
//! Forms: `(+ ..)`, `(* ..)`, `(pow e p/q)`, `(sqrtint k)`, `(log e)`,
//! `(exp e)`, `(expint [num..] [den..])`, `(int0 t e)`, `(intfrom p/q t e)`.
//! Polynomials are coefficient arrays `[c0 c1 ..]` in ascending degree.

use num_traits::Zero;

use super::expr::{var_name, Expr};
use crate::algebra::field::{fmt_q, parse_q, q, Q};
use crate::algebra::poly::Poly;
use crate::algebra::ratfun::RatFun;
use crate::error::{Error, Result};

fn fmt_poly(p: &Poly<Q>) -> String {
    let cs: Vec<String> = p.coeffs().iter().map(fmt_q).collect();
    format!("[{}]", cs.join(" "))
}

fn write(e: &Expr, depth: usize, out: &mut String) {
    match e {
        Expr::Const(c) => out.push_str(&fmt_q(c)),
        Expr::Approx(s) => out.push_str(s),
        Expr::Pi => out.push_str("pi"),
        Expr::Poly(p) => {
            if *p == Poly::x() {
                out.push_str(&var_name(depth));
            } else {
                out.push_str(&fmt_poly(p));
            }
        }
        Expr::Add(ts) | Expr::Mul(ts) => {
            out.push_str(if matches!(e, Expr::Add(_)) { "(+" } else { "(*" });
            for t in ts {
                out.push(' ');
                write(t, depth, out);
            }
            out.push(')');
        }
        Expr::Pow(b, k) => {
            if let Expr::Const(c) = &**b {
                if *k == q(1, 2) && c.is_integer() && *c > Q::zero() {
                    out.push_str(&format!("(sqrtint {})", fmt_q(c)));
                    return;
                }
            }
            out.push_str("(pow ");
            write(b, depth, out);
            out.push(' ');
            out.push_str(&fmt_q(k));
            out.push(')');
        }
        Expr::Log(a) => {
            if let Expr::Const(c) = &**a {
                if *c == q(2, 1) || *c == q(3, 1) {
                    out.push_str(&format!("log{}", fmt_q(c)));
                    return;
                }
            }
            out.push_str("(log ");
            write(a, depth, out);
            out.push(')');
        }
        Expr::Exp(a) => {
            out.push_str("(exp ");
            write(a, depth, out);
            out.push(')');
        }
        Expr::ExpInt(r) => {
            out.push_str(&format!("(expint {} {})", fmt_poly(r.num()), fmt_poly(r.den())));
        }
        Expr::Integral(i) => {
            let t = var_name(depth + 1);
            if i.base.is_zero() {
                out.push_str(&format!("(int0 {t} "));
            } else {
                out.push_str(&format!("(intfrom {} {t} ", fmt_q(&i.base)));
            }
            write(&i.body, depth + 1, out);
            out.push(')');
        }
    }
}

pub fn to_sexpr(e: &Expr) -> String {
    let mut s = String::new();
    write(e, 0, &mut s);
    s
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    LBrack,
    RBrack,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Tok> {
    let mut out = vec![];
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<Tok>| {
        if !cur.is_empty() {
            out.push(Tok::Atom(std::mem::take(cur)));
        }
    };
    for ch in s.chars() {
        match ch {
            '(' | ')' | '[' | ']' => {
                flush(&mut cur, &mut out);
                out.push(match ch {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '[' => Tok::LBrack,
                    _ => Tok::RBrack,
                });
            }
            c if c.is_whitespace() => flush(&mut cur, &mut out),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut out);
    out
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

impl Parser {
    fn next(&mut self) -> Result<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t.map_or_else(|| err("unexpected end of input"), Ok)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn atom(&mut self) -> Result<String> {
        match self.next()? {
            Tok::Atom(a) => Ok(a),
            t => err(format!("expected atom, found {t:?}")),
        }
    }

    fn rational(&mut self) -> Result<Q> {
        let a = self.atom()?;
        parse_q(&a).map_or_else(|| err(format!("bad rational {a}")), Ok)
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            Tok::Close => Ok(()),
            t => err(format!("expected ')', found {t:?}")),
        }
    }

    fn poly(&mut self) -> Result<Poly<Q>> {
        match self.next()? {
            Tok::LBrack => {}
            t => return err(format!("expected '[', found {t:?}")),
        }
        let mut cs = vec![];
        loop {
            match self.next()? {
                Tok::RBrack => break,
                Tok::Atom(a) => cs.push(parse_q(&a).map_or_else(|| err(format!("bad coefficient {a}")), Ok)?),
                t => return err(format!("unexpected {t:?} in coefficient array")),
            }
        }
        Ok(Poly::new(cs))
    }

    fn expr(&mut self, var: &str) -> Result<Expr> {
        match self.peek() {
            Some(Tok::LBrack) => return Ok(Expr::Poly(self.poly()?)),
            Some(Tok::Atom(_)) => {
                let a = self.atom()?;
                return self.atom_expr(&a, var);
            }
            _ => {}
        }
        match self.next()? {
            Tok::Open => {}
            t => return err(format!("unexpected {t:?}")),
        }
        let head = self.atom()?;
        let e = match head.as_str() {
            "+" | "*" => {
                let mut args = vec![];
                while !matches!(self.peek(), Some(Tok::Close)) {
                    args.push(self.expr(var)?);
                }
                if head == "+" {
                    Expr::Add(args)
                } else {
                    Expr::Mul(args)
                }
            }
            "pow" => {
                let b = self.expr(var)?;
                let k = self.rational()?;
                Expr::pow(b, k)
            }
            "sqrtint" => Expr::sqrt(Expr::Const(self.rational()?)),
            "log" => Expr::log(self.expr(var)?),
            "exp" => Expr::exp(self.expr(var)?),
            "expint" => {
                let n = self.poly()?;
                let d = self.poly()?;
                if d.is_zero() {
                    return err("zero denominator in expint");
                }
                Expr::ExpInt(RatFun::new(n, d))
            }
            "int0" | "intfrom" => {
                let base = if head == "intfrom" { self.rational()? } else { Q::zero() };
                let dummy = self.atom()?;
                if dummy == var || parse_q(&dummy).is_some() || dummy == "pi" {
                    return err(format!("bad dummy variable {dummy}"));
                }
                let body = self.expr(&dummy)?;
                Expr::integral(base, body)
            }
            h => return err(format!("unknown form {h}")),
        };
        self.close()?;
        Ok(e)
    }

    fn atom_expr(&self, a: &str, var: &str) -> Result<Expr> {
        if a == var {
            return Ok(Expr::x());
        }
        match a {
            "pi" => return Ok(Expr::Pi),
            "log2" => return Ok(Expr::log(Expr::int(2))),
            "log3" => return Ok(Expr::log(Expr::int(3))),
            _ => {}
        }
        if let Some(v) = parse_q(a) {
            return Ok(Expr::Const(v));
        }
        let numeric = a.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '.');
        if numeric && a.parse::<f64>().is_ok() {
            return Ok(Expr::Approx(a.to_string()));
        }
        err(format!("unknown atom {a}"))
    }
}

/// Parses an s-expression in the variable `x`.
pub fn parse_sexpr(s: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(s),
        pos: 0,
    };
    let e = p.expr("x")?;
    if p.pos != p.toks.len() {
        return err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::expr::normalize;

    #[test]
    fn round_trip_nested_integral() {
        let s = "(* (pow [-4 27] -1) (int0 t1 (* (pow (+ 1 (pow [1 -1] 1/2)) -1/3) (pow t1 -2/3))))";
        let e = parse_sexpr(s).unwrap();
        assert_eq!(to_sexpr(&e), s);
        let n = normalize(&e);
        assert_eq!(parse_sexpr(&to_sexpr(&n)).unwrap(), n);
    }

    #[test]
    fn named_constants() {
        let e = parse_sexpr("(* 1/4 (sqrtint 3) (pow pi -1) log2)").unwrap();
        assert_eq!(to_sexpr(&e), "(* 1/4 (sqrtint 3) (pow pi -1) log2)");
    }

    #[test]
    fn rejects_outer_variable_inside_integral() {
        assert!(parse_sexpr("(int0 t1 x)").is_err());
        assert!(parse_sexpr("(foo 1)").is_err());
    }
}

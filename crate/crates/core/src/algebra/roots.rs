//! Rational roots and squarefree splitting over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::Q;
use super::poly::Poly;

/// Positive divisors of `|n|` by trial division.
///
/// A cofactor left after trial division up to `10^6` is treated as prime,
/// which is exact for every magnitude this crate produces.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= n && p <= limit {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if n > BigInt::one() {
        factors.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Distinct rational roots, sorted ascending.
pub fn rational_roots(p: &Poly<Q>) -> Vec<Q> {
    if p.deg() <= 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let v = p.valuation().unwrap_or(0);
    if v > 0 {
        out.push(Q::zero());
    }
    let pp = p.shift_down(v).squarefree_part().primitive();
    if pp.deg() >= 1 {
        let ic = pp.int_coeffs();
        let lead = ic.last().unwrap().clone();
        let tail = ic[0].clone();
        let num_divs = divisors(&tail);
        let den_divs = divisors(&lead);
        let approx = float_root_bound(&ic);
        let mut remaining = pp.clone();
        'outer: for d in &den_divs {
            for n in &num_divs {
                for s in [1i32, -1] {
                    let cand = Q::new(n * BigInt::from(s), d.clone());
                    if let Some(b) = approx {
                        if cand.to_f64().map(|c| c.abs() > b).unwrap_or(false) {
                            continue;
                        }
                    }
                    if !cand.denom().eq(d) {
                        continue;
                    }
                    if remaining.eval(&cand).is_zero() {
                        out.push(cand.clone());
                        remaining = remaining.div_exact(&Poly::linear_root(cand)).expect("root divides");
                        if remaining.deg() < 1 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Cauchy bound on root magnitudes, slightly inflated.
fn float_root_bound(ic: &[BigInt]) -> Option<f64> {
    let lead = ic.last()?.to_f64()?.abs();
    let m = ic[..ic.len() - 1]
        .iter()
        .filter_map(|c| c.to_f64())
        .fold(0.0f64, |a, c| a.max(c.abs()));
    let b = 1.0 + m / lead;
    b.is_finite().then_some(b * (1.0 + 1e-9) + 1e-9)
}

/// Splits `p` into its rational linear factors (with multiplicity) and a
/// cofactor without rational roots.
pub fn split_rational(p: &Poly<Q>) -> (Vec<(Q, usize)>, Poly<Q>) {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    for r in rational_roots(p) {
        let lin = Poly::linear_root(r.clone());
        let mut m = 0;
        while let Some(qq) = rest.div_exact(&lin) {
            rest = qq;
            m += 1;
        }
        roots.push((r, m));
    }
    (roots, rest)
}

/// Integer roots (used for shifting recurrence windows).
pub fn integer_roots(p: &Poly<Q>) -> Vec<BigInt> {
    rational_roots(p)
        .into_iter()
        .filter(|r| r.denom().is_one())
        .map(|r| r.to_integer())
        .collect()
}

pub fn lcm_all(vals: &[BigInt]) -> BigInt {
    vals.iter().fold(BigInt::one(), |a, b| a.lcm(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    #[test]
    fn finds_rational_roots() {
        // 18 x^3 (x-1)(27x-4)
        let p = &(&Poly::from_ints(&[0, 0, 0, 18]) * &Poly::from_ints(&[-1, 1])) * &Poly::from_ints(&[-4, 27]);
        assert_eq!(rational_roots(&p), vec![q(0, 1), q(4, 27), q(1, 1)]);
        let (roots, rest) = split_rational(&p);
        assert_eq!(roots[0], (q(0, 1), 3));
        assert_eq!(rest.deg(), 0);
    }

    #[test]
    fn irrational_roots_are_left_over() {
        let p = Poly::from_ints(&[-2, 0, 1]);
        assert!(rational_roots(&p).is_empty());
    }

    #[test]
    fn divisors_of_72() {
        let d = divisors(&BigInt::from(72));
        assert_eq!(d.len(), 12);
    }
}

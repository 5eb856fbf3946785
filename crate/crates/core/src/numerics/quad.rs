//! Quadrature on (0, 1) in the logit variable `w = log(x / (1 - x))`.
//!
//! Tanh-sinh nodes are equally spaced in `t` with `w = pi sinh t`; fixed
//! Gauss-Legendre panels of unit length in `w` back the cumulative tables of
//! integral nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::real::{Mp, Scalar};
use crate::error::{Error, Result};

/// Largest `|w|` a node may have; beyond this `x` or `1 - x` is below
/// `2^-3600` and the extra precision becomes prohibitive.
pub const W_MAX: f64 = 2500.0;

/// Extra bits needed at logit `w` so that both `x` and `1 - x` keep full
/// relative precision.
pub fn elevation(w: f64) -> u32 {
    if w.is_nan() {
        return 8;
    }
    (w.abs().min(W_MAX * 2.0) * std::f64::consts::LOG2_E).ceil() as u32 + 8
}

/// A point of (0, 1) with its logit.
#[derive(Clone, Debug)]
pub struct Point {
    pub x: Mp,
    pub w: Mp,
}

impl Point {
    /// `x = 1 / (1 + e^-w)` at `bits` plus the elevation for `w`.
    pub fn from_w(w: &Mp, bits: u32) -> Point {
        let b = bits + elevation(w.to_f64());
        let w = w.with_prec(b);
        let one = Mp::from_i64(1, b);
        let x = &one / &(&one + &(-&w).exp());
        Point { x, w }
    }

    pub fn from_q(x: &crate::Q, bits: u32) -> Point {
        let one_minus = crate::algebra::field::qi(1) - x;
        let w_est = (Mp::from_q(x, 64).log2_abs() - Mp::from_q(&one_minus, 64).log2_abs()) * std::f64::consts::LN_2;
        let b = bits + elevation(w_est);
        let xm = Mp::from_q(x, b);
        let one = Mp::from_i64(1, b);
        let w = (&xm / &(&one - &xm)).ln();
        Point { x: xm, w }
    }

    pub fn from_mp(x: &Mp, bits: u32) -> Point {
        let xf = x.to_f64();
        let w_est = if xf <= 0.0 || xf >= 1.0 { 0.0 } else { (xf / (1.0 - xf)).ln() };
        let b = bits.max(x.prec()) + elevation(w_est);
        let xm = x.with_prec(b);
        let one = Mp::from_i64(1, b);
        let w = (&xm / &(&one - &xm)).ln();
        Point { x: xm, w }
    }

    /// `dx/dw = x (1 - x)`.
    pub fn jacobian(&self) -> Mp {
        let one = Mp::from_i64(1, self.x.prec());
        &self.x * &(&one - &self.x)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Mp>,
    pub weights: Vec<Mp>,
}

fn legendre_and_derivative(m: usize, x: &Mp) -> (Mp, Mp) {
    let bits = x.prec();
    let one = Mp::from_i64(1, bits);
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    for k in 2..=m {
        let kf = Mp::from_i64(k as i64, bits);
        let a = Mp::from_i64(2 * k as i64 - 1, bits);
        let b = Mp::from_i64(k as i64 - 1, bits);
        let p2 = (&(&a * x) * &p1 - &b * &p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let mf = Mp::from_i64(m as i64, bits);
    let dp = &mf * &(x * &p1 - p0) / (x * x - one);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(m: usize, bits: u32) -> GaussLegendre {
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let work = bits + 32;
        let pi = std::f64::consts::PI;
        for i in 1..=m {
            let guess = (pi * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut x = Mp::from_f64(guess, work);
            for _ in 0..200 {
                let (p, dp) = legendre_and_derivative(m, &x);
                let dx = &p / &dp;
                x = &x - &dx;
                if dx.log2_abs() < -(work as f64) + 4.0 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(m, &x);
            let one = Mp::from_i64(1, work);
            let w = Mp::from_i64(2, work) / ((&one - &(&x * &x)) * (&dp * &dp));
            nodes.push(x.with_prec(bits));
            weights.push(w.with_prec(bits));
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule with `m` nodes at `bits`.
    pub fn cached(m: usize, bits: u32) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = cache.lock().unwrap().get(&(m, bits)) {
            return r.clone();
        }
        let r = Arc::new(GaussLegendre::new(m, bits));
        cache.lock().unwrap().insert((m, bits), r.clone());
        r
    }

    /// Node count for a unit panel in `w` at `bits`: the integrands are
    /// analytic in a strip of half-width about pi around the real axis.
    pub fn order_for(bits: u32) -> usize {
        (bits as usize) / 7 + 6
    }
}

/// `int_a^b f(w) dw` with a Gauss-Legendre rule; `f` receives the node in `w`.
pub fn gl_panel<S: Scalar>(rule: &GaussLegendre, a: &Mp, b: &Mp, mut f: impl FnMut(&Mp) -> Result<S>) -> Result<S> {
    let bits = a.prec().max(b.prec());
    let half = Mp::from_q(&crate::algebra::field::q(1, 2), bits);
    let mid = &(a + b) * &half;
    let rad = &(b - a) * &half;
    let mut acc: Option<S> = None;
    for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
        let w = &mid + &(&rad * t);
        let v = f(&w)? * S::from_mp(wt.clone());
        acc = Some(match acc {
            None => v,
            Some(s) => s + v,
        });
    }
    Ok(acc.expect("rule has nodes") * S::from_mp(rad))
}

/// Result of an adaptive quadrature.
#[derive(Clone, Debug)]
pub struct QuadResult<S> {
    pub value: S,
    /// Estimated absolute error.
    pub error: f64,
    pub level: u32,
}

/// Settings of the tanh-sinh driver.
#[derive(Clone, Debug)]
pub struct TanhSinh {
    /// Working precision in bits.
    pub bits: u32,
    /// Requested relative accuracy as `log2`.
    pub target_log2: f64,
    pub max_level: u32,
}

impl TanhSinh {
    pub fn new(bits: u32) -> TanhSinh {
        TanhSinh {
            bits,
            target_log2: -(bits as f64) + 24.0,
            max_level: 11,
        }
    }

    /// Integrates several functions at once over (0, 1). `f` receives a point
    /// and returns the integrand values (without the jacobian) for each
    /// component; component sums share nodes.
    pub fn integrate_many<S: Scalar>(
        &self,
        count: usize,
        mut f: impl FnMut(&Point) -> Result<Vec<S>>,
    ) -> Result<Vec<QuadResult<S>>> {
        let bits = self.bits;
        let pi = Mp::pi(bits);
        // weighted integrand at t, including dw/dt and dx/dw
        let mut eval = |t: f64| -> Result<Option<Vec<S>>> {
            let tm = Mp::from_f64(t, bits);
            let w = &pi * &tm.sinh();
            if w.to_f64().abs() > W_MAX {
                return Ok(None);
            }
            let p = Point::from_w(&w, bits);
            let jac = &p.jacobian() * &(&pi * &tm.cosh());
            let vals = f(&p)?;
            Ok(Some(vals.into_iter().map(|v| v * S::from_mp(jac.clone())).collect()))
        };
        let mut sums: Vec<Option<S>> = vec![None; count];
        let add = |sums: &mut Vec<Option<S>>, vals: Vec<S>| {
            for (s, v) in sums.iter_mut().zip(vals) {
                *s = Some(match s.take() {
                    None => v,
                    Some(a) => a + v,
                });
            }
        };
        let mags = |vals: &[S]| vals.iter().map(|v| v.log2_abs()).fold(f64::NEG_INFINITY, f64::max);
        // smallest nonzero component sum
        let sum_mag = |sums: &[Option<S>]| {
            sums.iter()
                .filter_map(|s| s.as_ref().map(|v| v.log2_abs()))
                .filter(|m| m.is_finite())
                .fold(f64::INFINITY, f64::min)
        };
        // level 0: h = 1, walk outwards until terms are negligible
        let v0 = eval(0.0)?.expect("center node");
        add(&mut sums, v0);
        let mut t_max = [0.0f64; 2];
        for (side, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let mut prev = f64::INFINITY;
            let mut k = 1;
            loop {
                let t = sign * k as f64;
                let Some(v) = eval(t)? else { break };
                let m = mags(&v);
                add(&mut sums, v);
                t_max[side] = k as f64;
                // the decay is double exponential once it sets in
                if m < sum_mag(&sums) - bits as f64 - 8.0 && m < prev {
                    break;
                }
                prev = m;
                k += 1;
                if k > 12 {
                    break;
                }
            }
        }
        // refine the tails at the finer levels only within the same range
        let mut history: Vec<Vec<S>> = vec![];
        let mut h = 1.0f64;
        let estimate = |sums: &[Option<S>], h: f64| -> Vec<S> {
            sums.iter()
                .map(|s| s.clone().expect("sum") * S::from_mp(Mp::from_f64(h, bits)))
                .collect()
        };
        history.push(estimate(&sums, h));
        let mut level = 0;
        loop {
            level += 1;
            h /= 2.0;
            let mut t = h;
            while t <= t_max[0] + 1e-12 {
                if let Some(v) = eval(t)? {
                    add(&mut sums, v);
                }
                t += 2.0 * h;
            }
            let mut t = h;
            while t <= t_max[1] + 1e-12 {
                if let Some(v) = eval(-t)? {
                    add(&mut sums, v);
                }
                t += 2.0 * h;
            }
            history.push(estimate(&sums, h));
            let n = history.len();
            let cur = &history[n - 1];
            let prev = &history[n - 2];
            let mut done = level >= 3;
            let mut errors = vec![];
            for i in 0..count {
                let mag = cur[i].log2_abs();
                let d1 = (cur[i].clone() - prev[i].clone()).log2_abs();
                let d2 = if n >= 3 {
                    (cur[i].clone() - history[n - 3][i].clone()).log2_abs()
                } else {
                    0.0
                };
                // quadratic convergence: error ~ d1^2 / d2 in log space
                let est = if d1 == f64::NEG_INFINITY {
                    mag - bits as f64
                } else if d2 < 0.0 && d1 < d2 && n >= 3 {
                    let r = d1 - mag;
                    let r2 = d2 - mag;
                    (r * r / r2).max(2.0 * r) + mag
                } else {
                    d1
                };
                let est = est.max(mag - bits as f64 + 4.0);
                if est - mag > self.target_log2 {
                    done = false;
                }
                errors.push(est);
            }
            if done || level >= self.max_level {
                return Ok(cur
                    .iter()
                    .zip(errors)
                    .map(|(v, e)| QuadResult {
                        value: v.clone(),
                        error: e.exp2(),
                        level,
                    })
                    .collect());
            }
        }
    }

    pub fn integrate<S: Scalar>(&self, mut f: impl FnMut(&Point) -> Result<S>) -> Result<QuadResult<S>> {
        Ok(self.integrate_many(1, |p| Ok(vec![f(p)?]))?.pop().unwrap())
    }
}

/// Fails unless the estimated relative error is below `2^target_log2`.
pub fn check_accuracy<S: Scalar>(r: &QuadResult<S>, target_log2: f64) -> Result<()> {
    let mag = r.value.log2_abs();
    if r.error.log2() - mag > target_log2 {
        return Err(Error::PrecisionLoss(format!(
            "quadrature error estimate 2^{:.1} relative after level {}",
            r.error.log2() - mag,
            r.level
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real::bits_for_digits;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let g = GaussLegendre::new(10, 200);
        // int_-1^1 x^18 = 2/19
        let s = g
            .nodes
            .iter()
            .zip(&g.weights)
            .fold(Mp::zero_with(200), |acc, (x, w)| acc + &(w * &x.powi(18)));
        let exact = Mp::from_i64(2, 200) / Mp::from_i64(19, 200);
        assert!((s - exact).log2_abs() < -190.0);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // int_0^1 x^(-1/2) (1-x)^(-1/2) = pi
        let bits = bits_for_digits(50);
        let ts = TanhSinh::new(bits);
        let half = crate::algebra::field::q(-1, 2);
        let r: QuadResult<Mp> = ts
            .integrate(|p| {
                let one = Mp::from_i64(1, p.x.prec());
                Ok(p.x.powq(&half)? * (&one - &p.x).powq(&half)?)
            })
            .unwrap();
        let err = (r.value.clone() - Mp::pi(bits)).log2_abs();
        assert!(err < -160.0, "error 2^{err}");
        check_accuracy(&r, -150.0).unwrap();
    }
}

use proptest::prelude::*;

use invmellin::algebra::field::{q, qi};
use invmellin::algebra::poly::Poly;
use invmellin::closedform::{normalize, parse_sexpr, to_sexpr, Expr};
use invmellin::mellin::{ode_to_recurrence, recurrence_image, recurrence_to_ode};
use invmellin::numerics::fit::{moments, Kernel};
use invmellin::numerics::{bits_for_digits, Mp};
use invmellin::{DiffOp, QPoly, RecOp, Q};

fn arb_poly(max_deg: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec(-6i64..=6, 0..=max_deg + 1).prop_map(|c| Poly::from_ints(&c))
}

fn arb_op(max_order: usize, max_deg: usize) -> impl Strategy<Value = DiffOp> {
    prop::collection::vec(arb_poly(max_deg), 1..=max_order + 1).prop_map(DiffOp::new)
}

fn nonzero_op(max_order: usize, max_deg: usize) -> impl Strategy<Value = DiffOp> {
    arb_op(max_order, max_deg).prop_filter("nonzero", |op| !op.is_zero())
}

fn arb_rec() -> impl Strategy<Value = RecOp> {
    prop::collection::vec(arb_poly(2), 1..=3).prop_map(RecOp::new)
}

fn monomials() -> Vec<QPoly> {
    (0..=6).map(|k| Poly::monomial(qi(1), k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn composition_acts_as_successive_application(a in arb_op(2, 2), b in arb_op(2, 2)) {
        let ab = a.compose(&b);
        for m in monomials() {
            prop_assert_eq!(ab.apply(&m), a.apply(&b.apply(&m)));
        }
    }

    #[test]
    fn composition_is_associative(a in arb_op(2, 2), b in arb_op(2, 2), c in arb_op(2, 2)) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn composition_distributes(a in arb_op(2, 2), b in arb_op(2, 2), c in arb_op(2, 2)) {
        prop_assert_eq!(a.compose(&b.add_op(&c)), a.compose(&b).add_op(&a.compose(&c)));
        prop_assert_eq!(b.add_op(&c).compose(&a), b.compose(&a).add_op(&c.compose(&a)));
    }

    #[test]
    fn right_division_identity(a in arb_op(4, 3), b in nonzero_op(2, 2)) {
        let (ar, br) = (a.to_rat(), b.to_rat());
        let (quo, rem) = ar.right_divrem(&br);
        prop_assert!(rem.is_zero() || rem.order() < br.order());
        prop_assert_eq!(quo.compose(&br).add_op(&rem), ar);
    }

    #[test]
    fn exact_products_divide_exactly(a in nonzero_op(2, 2), b in nonzero_op(2, 2)) {
        let (quo, rem) = a.compose(&b).to_rat().right_divrem(&b.to_rat());
        prop_assert!(rem.is_zero());
        prop_assert_eq!(quo, a.to_rat());
    }

    #[test]
    fn adjoint_is_an_involution(a in arb_op(4, 3)) {
        prop_assert_eq!(a.adjoint().adjoint().normalize(), a.normalize());
    }

    #[test]
    fn adjoint_reverses_products(a in arb_op(2, 2), b in arb_op(2, 2)) {
        prop_assert_eq!(a.compose(&b).adjoint(), b.adjoint().compose(&a.adjoint()));
    }

    #[test]
    fn operator_normalize_is_idempotent(a in nonzero_op(3, 3)) {
        let n = a.normalize();
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn mellin_image_is_multiplicative(p in arb_poly(2), k in 0usize..3, rec in arb_rec()) {
        let mut coeffs = vec![Poly::zero(); k];
        coeffs.push(p);
        let left = RecOp::new(coeffs);
        prop_assume!(!left.is_zero() && !rec.is_zero());
        let lhs = recurrence_image(&left.compose(&rec));
        let rhs = recurrence_image(&left).compose(&recurrence_image(&rec));
        prop_assert_eq!(lhs, rhs);
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let exps = prop::sample::select(vec![q(1, 2), q(-1, 2), q(1, 3), q(-2, 3), q(2, 1), q(-1, 1)]);
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        Just(Expr::x()),
        Just(Expr::Pi),
        prop::collection::vec(-3i64..=3, 1..=3).prop_map(|c| Expr::poly(Poly::from_ints(&c))),
    ];
    leaf.prop_recursive(3, 24, 4, move |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::mul),
            (inner.clone(), exps.clone()).prop_map(|(b, e)| Expr::pow(b, e)),
            inner.prop_map(|e| Expr::log(Expr::add(vec![Expr::int(2), Expr::powi(e, 2)]))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn expr_normalize_is_idempotent(e in arb_expr()) {
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn sexpr_round_trip(e in arb_expr()) {
        let n = normalize(&e);
        let back = parse_sexpr(&to_sexpr(&n)).unwrap();
        prop_assert_eq!(normalize(&back), n);
    }
}

#[test]
fn exponential_series_recurrence() {
    // D - 1 annihilates exp(x), whose coefficients are 1/n!
    let rec = ode_to_recurrence(&DiffOp::from_ints(&[&[-1], &[1]]));
    let mut fact = qi(1);
    let mut coeffs = vec![qi(1)];
    for n in 1..=52 {
        fact *= qi(n);
        coeffs.push(Q::from_integer(1.into()) / &fact);
    }
    for n in 0..=50i64 {
        assert_eq!(rec.residual(0, &coeffs, n), Some(qi(0)), "n = {n}");
    }
}

#[test]
fn binom_3n_image_hand_expansion() {
    // -2(3n+1)(3n+2) + 9(n+1)(2n+1) S, with n -> -(xD+1) and S -> x
    let rec = RecOp::from_ints(&[&[-4, -18, -18], &[9, 27, 18]]);
    assert_eq!(
        recurrence_to_ode(&rec),
        DiffOp::from_ints(&[&[-4, 27], &[0, -36, 63], &[0, 0, -18, 18]])
    );
}

/// `B(a + 1, b + 1)` from the gamma function at high precision.
fn beta_oracle(a: &Q, b: &Q, prec: u32) -> rug::Float {
    let int = |s: String| s.parse::<rug::Integer>().unwrap();
    let f = |v: &Q| rug::Float::with_val(prec, int(v.numer().to_string())) / int(v.denom().to_string());
    let one = rug::Float::with_val(prec, 1);
    let ga = (f(a) + &one).gamma();
    let gb = (f(b) + &one).gamma();
    let gab = (f(a) + f(b) + rug::Float::with_val(prec, 2)).gamma();
    ga * gb / gab
}

#[test]
fn quadrature_matches_beta_function() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    let bits = bits_for_digits(50);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        // exponents in (-0.9, 3) with small denominators
        let mut draw = || loop {
            let d: i64 = rng.gen_range(1..=12);
            let n: i64 = rng.gen_range(-d..=3 * d);
            let v = q(n, d);
            if v > q(-9, 10) && v < qi(3) {
                return v;
            }
        };
        let (a, b) = (draw(), draw());
        let f = Expr::mul(vec![
            Expr::pow(Expr::x(), a.clone()),
            Expr::pow(Expr::poly(Poly::from_ints(&[1, -1])), b.clone()),
        ]);
        let m = moments::<Mp>(&[normalize(&f)], &Kernel::Power, &[0], bits).unwrap();
        let exact = beta_oracle(&a, &b, bits + 64);
        let got = rug::Float::with_val(bits + 64, &m[0][0].0);
        let rel = ((got - &exact) / &exact).abs().to_f64();
        worst = worst.max(rel.log10());
        assert!(rel <= 1e-40, "a = {a}, b = {b}: relative error {rel:e}");
    }
    println!("worst relative error 1e{worst:.1}");
}

mod common;

use mathdsl_core::complex::{add_c, mul_c, CartComplex};
use mathdsl_core::expr::*;
use mathdsl_core::number::rat;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn tree(floats: bool) -> impl Strategy<Value = ComplexExpr> {
    any::<u64>().prop_map(move |seed| random_expr(&mut ChaCha8Rng::seed_from_u64(seed), 8, floats))
}

fn same(a: &CanonicalForm, b: &CanonicalForm) -> bool {
    if a.re.is_exact() && a.im.is_exact() {
        a == b
    } else {
        a.approx_eq(b)
    }
}

/// Counts `i` leaves, independent of the library folds.
fn count_i(e: &ComplexExpr) -> usize {
    match e {
        ComplexExpr::ImaginaryUnit => 1,
        ComplexExpr::FromReal(_) => 0,
        ComplexExpr::Plus(a, b) | ComplexExpr::Times(a, b) => count_i(a) + count_i(b),
        ComplexExpr::Negate(a) => count_i(a),
    }
}

struct CountI;

impl ExprAlgebra for CountI {
    type Carrier = usize;
    fn on_i(&self) -> usize {
        1
    }
    fn on_from_real(&self, _: &mathdsl_core::number::Scalar) -> usize {
        0
    }
    fn on_plus(&self, a: usize, b: usize) -> usize {
        a + b
    }
    fn on_times(&self, a: usize, b: usize) -> usize {
        a + b
    }
    fn on_negate(&self, a: usize) -> usize {
        a
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_coherence(e in tree(false), floats in tree(true)) {
        for e in [e, floats] {
            let n = normalize(&e);
            for form in [Form::Form1, Form::Form2] {
                let text = print_expr(&e, form);
                let back = normalize(&parse_expr(&text).unwrap());
                prop_assert!(same(&n, &back), "{} -> {:?}", text, back);
            }
        }
    }

    #[test]
    fn eval_is_a_homomorphism(a in tree(true), b in tree(true)) {
        let (x, y) = (eval_cart(&a), eval_cart(&b));
        let sum = eval_cart(&ComplexExpr::plus(a.clone(), b.clone()));
        let prod = eval_cart(&ComplexExpr::times(a, b));
        prop_assert!(sum.approx_eq(&add_c(&x, &y), 1e-12));
        prop_assert!(prod.approx_eq(&mul_c(&x, &y), 1e-12));
    }

    #[test]
    fn fold_agrees_with_direct_recursion(e in tree(true)) {
        prop_assert_eq!(fold_expr(&CountI, &e), count_i(&e));
        prop_assert_eq!(fold_expr(&CartesianAlgebra, &e), eval_cart(&e));
        prop_assert_eq!(fold_expr(&RebuildAlgebra, &e), e.clone());
    }

    #[test]
    fn semantic_injectivity(a in -50i64..50, b in -50i64..50, x in -50i64..50, y in -50i64..50, d in 1i64..9) {
        let lit = |re: i64, im: i64| CanonicalForm::new(rat(re, d), rat(im, d)).to_expr();
        prop_assert_eq!(expr_equal(&lit(a, b), &lit(x, y)), a == x && b == y);
    }
}

#[test]
fn concrete_forms() {
    let p = |s: &str| parse_expr(s).unwrap();
    assert!(expr_equal(&p("3 + 2i"), &p("3 + i2")));
    assert!(expr_equal(&p("i"), &p("0 + 1i")));
    assert!(!expr_equal(&p("3 + 2i"), &p("2 + 3i")));
    assert!(expr_equal(&p("2 i"), &p("2i")));
    assert_eq!(eval_cart(&p("i * i")), CartComplex::new(-1, 0));
    assert_eq!(normalize(&p("2i")), CanonicalForm::new(0, 2));
    assert!(parse_expr("3 + ").is_err());
}

mod common;

use mathdsl_core::seq::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

/// `a + b/(n+1) + c·sin(n)`: arbitrary enough, and cheap to evaluate.
fn wobbly() -> impl Strategy<Value = Sequence> {
    (-5.0..5.0f64, -5.0..5.0f64, -1.0..1.0f64)
        .prop_map(|(a, b, c)| Sequence::from_fn("wobbly", move |n| a + b / (n as f64 + 1.0) + c * (n as f64).sin()))
}

/// `L − c/(n+1)^p`, increasing and bounded by `L`.
fn increasing() -> impl Strategy<Value = (Sequence, f64)> {
    (-10.0..10.0f64, 0.1..10.0f64, 1..=3i32)
        .prop_map(|(l, c, p)| (Sequence::from_fn("increasing", move |n| l - c / (n as f64 + 1.0).powi(p)), l))
}

fn finite_set() -> impl Strategy<Value = FiniteSet> {
    any::<u64>().prop_map(|seed| random_finite_set(&mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #[test]
    fn drop_is_antimonotone(f in wobbly(), m in 0u64..=50, d in 0u64..=50) {
        let n = (m + d).min(50);
        let small = drop_range(m, &f);
        for k in [0u64, 1, 2, 3, 7, 20, 100] {
            let x = f.at(n + k);
            prop_assert_eq!(member_with_bound(&small, x, 200), Membership::Member);
        }
    }

    #[test]
    fn below_min_is_not_member(a in finite_set(), gap in 1e-6..100.0f64) {
        let set = RealSet::Finite(a);
        let y = min_set(&set).unwrap() - gap;
        prop_assert_eq!(member(&set, y), Membership::NotMember);
    }

    #[test]
    fn sup_is_min_of_upper_bounds(a in finite_set()) {
        let oracle = a.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let set = RealSet::Finite(a);
        prop_assert_eq!(sup_set(&set).unwrap(), min_set(&ubs(&set).unwrap()).unwrap());
        prop_assert_eq!(sup_set(&set).unwrap(), oracle);
    }

    #[test]
    fn tail_sups_agree((f, l) in increasing(), m in 0u64..=20, n in 0u64..=20) {
        let opts = SupOptions::default();
        let a = sup_monotone(&drop_seq(m, &f), opts).unwrap().value;
        let b = sup_monotone(&drop_seq(n, &f), opts).unwrap().value;
        prop_assert!((a - b).abs() <= 2.0 * opts.tol, "{} vs {}", a, b);
        prop_assert!((a - l).abs() <= 1e-6);
    }

    #[test]
    fn increasing_tail_lies_above_its_head((f, _) in increasing(), n in 0u64..=50) {
        let lower = RealSet::closed_ray(f.at(n));
        for k in probe_schedule().take(40) {
            prop_assert!(member(&lower, f.at(n + k)).is_member());
        }
    }

    #[test]
    fn limit_counterexamples_reproduce(f in wobbly(), claim in -5.0..5.0f64, n0 in 0u64..100) {
        let eps = [1.0, 0.1, 0.01, 1e-3];
        if let LimitVerdict::Falsified { eps, index, value } = check_limit(&f, claim, &NWitness::constant(n0), &eps, 50) {
            prop_assert_eq!(f.at(index), value);
            prop_assert!((f.at(index) - claim).abs() >= eps);
        }
    }

    #[test]
    fn epsilon_near_matches_integer_oracle(eps in 1e-4..1.0f64) {
        let inv = 1.0 / eps;
        prop_assume!((inv - inv.round()).abs() > 1e-6);
        // 1/(n+1) < eps first holds at n = floor(1/eps).
        let f = Sequence::parse("7 - 1/(n+1)").unwrap();
        prop_assert_eq!(epsilon_near(&f, 7.0, eps, 1_000_000), Some(inv.floor() as u64));
    }
}

#[test]
fn worked_values() {
    let f = Sequence::parse("7 - 1/(n+1)").unwrap();
    let est = sup_monotone(&f, SupOptions::with_tol(1e-6)).unwrap();
    assert!((est.value - 7.0).abs() <= 1e-6);
    assert_eq!(member(&drop_range(0, &f), 7.0), Membership::NotFoundUpTo(DEFAULT_SEARCH_BOUND));
    assert_eq!(epsilon_near(&Sequence::constant(7.0), 7.0, 1e-9, 10), Some(0));
    assert_eq!(epsilon_near(&Sequence::constant(0.0), 7.0, 1.0, 1000), None);
    let osc = Sequence::from_fn("(-1)^n", |n| if n % 2 == 0 { 1.0 } else { -1.0 });
    assert!(matches!(sup_monotone(&osc, SupOptions::default()), Err(SeqError::NotMonotone { .. })));
    let unbounded = Sequence::parse("n").unwrap();
    assert!(sup_monotone(&unbounded, SupOptions::default()).is_err());
}

use mathdsl_core::proof::*;
use proptest::prelude::*;

const HEADER: &str = "var eps : real in (0, 10)\nvar s : real in (-10, 10)\nvar A : set(5) in (-10, 10)\n";

/// Single-step scripts, some valid and some not.
const STEPS: &[&str] = &[
    "0 < eps\n=> { arithmetic }\ns - eps < s",
    "0 < eps\n=> { numeric }\ns + eps < s",
    "s < eps\n=> { numeric }\ns <= eps - 1",
    "~ forall a in A. a <= s\n<=> { quantifier negation }\nexists a in A. s < a",
    "exists a in A. a <= s\n=> { numeric }\nforall a in A. a <= s",
    "|s - eps| < 1\n<=> { absolute value }\n-1 < s - eps /\\ s - eps < 1",
    "|s| < eps\n<=> { numeric }\ns < eps",
    "s in V 0 eps\n<=> { membership }\n|s - 0| < eps",
    "min(A) <= s\n=> { numeric }\nexists a in A. a <= s",
    "sup(A) < s\n=> { numeric }\nforall a in A. a < s - 1",
];

fn script(i: usize) -> ProofScript {
    parse_proof(&format!("{HEADER}{}\n", STEPS[i])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counterexamples_reproduce(i in 0..STEPS.len(), seed in any::<u64>()) {
        let p = script(i);
        let r = check_proof(&p, 2_000, Some(seed));
        for (k, v) in r.verdicts.iter().enumerate() {
            if let StepStatus::Falsified { counterexample, .. } = &v.status {
                prop_assert_eq!(violates(&p, k, counterexample), Some(true));
            }
        }
    }

    #[test]
    fn fixed_seed_is_deterministic(i in 0..STEPS.len(), seed in any::<u64>()) {
        let p = script(i);
        prop_assert_eq!(check_proof(&p, 500, Some(seed)), check_proof(&p, 500, Some(seed)));
    }
}

#[test]
fn registered_rules_never_sample() {
    for i in [0, 3, 5, 7] {
        let v = &check_proof(&script(i), 10_000, Some(0)).verdicts[0];
        assert!(matches!(v.status, StepStatus::Checked { rule: Some(_) }), "{}: {v}", STEPS[i]);
        assert_eq!(v.samples_used, 0);
    }
}

#[test]
fn wrong_steps_are_falsified() {
    for i in [1, 2, 4, 6, 9] {
        let r = check_proof(&script(i), 10_000, Some(1));
        assert_eq!(r.overall, Overall::Falsified, "{}", STEPS[i]);
    }
    assert_eq!(check_proof(&script(8), 10_000, Some(1)).overall, Overall::Checked);
}

#[test]
fn corpus_over_five_seeds() {
    let sup = parse_proof(corpus::SUP_CHAIN).unwrap();
    for seed in 0..5 {
        let r = check_proof(&sup, 10_000, Some(seed));
        assert_eq!(r.checked(), 8, "seed {seed}: {:?}", r.verdicts);
    }
    for (name, src) in corpus::CORRUPTED {
        let p = parse_proof(src).unwrap();
        for seed in 0..5 {
            assert_eq!(check_proof(&p, 10_000, Some(seed)).overall, Overall::Falsified, "{name}, seed {seed}");
        }
    }
    let drop = check_proof(&parse_proof(corpus::DROP_CHAIN).unwrap(), 10_000, Some(0));
    assert_eq!((drop.checked(), drop.trusted(), drop.falsified()), (2, 1, 0));
    assert_eq!(drop.overall, Overall::Unsupported);
}

#[test]
fn one_corrupted_step_in_a_long_chain() {
    let src = corpus::SUP_CHAIN.replacen("s − ε < s\n", "s + ε < s\n", 1);
    assert_ne!(src, corpus::SUP_CHAIN);
    let r = check_proof(&parse_proof(&src).unwrap(), 10_000, Some(0));
    assert_eq!(r.overall, Overall::Falsified);
    assert_eq!(r.checked(), 7 - usize::from(r.falsified() == 2));
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_proof("var x : real in (0, 1)\nx < 1\n=> arithmetic\nx < 2\n").unwrap_err();
    assert!(matches!(e, ProofError::Syntax { line: 3, .. }), "{e}");
    let e = parse_proof("x < 1\n=> { h }\nx < 2\n").unwrap_err();
    assert!(matches!(e, ProofError::Undeclared { line: 1, column: 1, .. }), "{e}");
}

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::{E, FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mathdsl_core::complex::{from_polar, to_polar, CartComplex};
use mathdsl_core::expr::{eval_cart, normalize, parse_expr, print_expr, Form};
use mathdsl_core::geometry::{apply_geometric, apply_via_complex, semantics_equivalent, Point, Transform};
use mathdsl_core::laplace::{laplace_numeric, GrowthCap, LaplaceOptions};
use mathdsl_core::number::{rat, Rat, Scalar};
use mathdsl_core::proof::{check_proof, corpus, parse_proof, violates, Overall, StepStatus};
use mathdsl_core::seq::{
    check_limit, epsilon_near, min_set, sup_monotone, sup_set, ubs, LimitVerdict, NWitness, RealSet, Sequence,
    SupOptions, DEFAULT_SEARCH_BOUND, DEFAULT_TOL,
};
use mathdsl_core::series::{cos_ps, deriv_ps, exp_ps, mul_ps, powers_eval, sigma, sin_ps, DEFAULT_MAX_TERMS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("runtime {elapsed:?} exceeds {limit:?}"))
}

fn c1_i_squared() -> Outcome {
    let start = Instant::now();
    let z = eval_cart(&parse_expr("i * i").map_err(|e| e.to_string())?);
    let elapsed = start.elapsed();
    ensure(z == CartComplex::new(-1, 0) && z.is_exact(), || format!("got {z}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("i * i = {z} exactly in {elapsed:?}"))
}

fn c2_polar_of_i() -> Outcome {
    let p = to_polar(&CartComplex::new(0, 1));
    let (dm, da) = ((p.modulus() - 1.0).abs(), (p.argument() - FRAC_PI_2).abs());
    ensure(dm <= 1e-12 && da <= 1e-12, || format!("got {p}"))?;
    Ok(format!("C'({}, {}), errors {dm:e} / {da:e} <= 1e-12", p.modulus(), p.argument()))
}

fn c3_rotation_theorem() -> Outcome {
    let start = Instant::now();
    let worst = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            let t = random_transform(&mut rng, 6);
            semantics_equivalent(&t, 100, k).max_scaled_deviation
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("max deviation / (1 + |p|) = {worst:e} > 1e-9"))?;
    let r = Transform::rotate(PI / 2.0).map_err(|e| e.to_string())?;
    let target = Point::new(0.0, 1.0);
    for q in [apply_geometric(&r, Point::new(1.0, 0.0)), apply_via_complex(&r, Point::new(1.0, 0.0))] {
        ensure(q.max_abs_diff(&target) <= 1e-12, || format!("rotate(pi/2) (1,0) = {q}"))?;
    }
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("10^4 transforms x 10^2 points, max deviation/(1+|p|) = {worst:e} <= 1e-9; rotate(pi/2)(1,0) = (0,1); {elapsed:?}"))
}

fn c4_completeness() -> Outcome {
    let start = Instant::now();
    let f = Sequence::parse("7 - 1/(n+1)").map_err(|e| e.to_string())?;
    let est = sup_monotone(&f, SupOptions::with_tol(1e-6)).map_err(|e| e.to_string())?;
    ensure((est.value - 7.0).abs() <= 1e-6, || format!("sup = {}", est.value))?;
    let mut found = Vec::new();
    for eps in [1.0, 0.1, 0.01] {
        let i = epsilon_near(&f, 7.0, eps, DEFAULT_SEARCH_BOUND).ok_or_else(|| format!("no member within {eps}"))?;
        ensure((f.at(i) - 7.0).abs() < eps, || format!("index {i} is not within {eps}"))?;
        found.push(i);
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("sup = {} +- 1e-6, members within 1, 0.1, 0.01 at {found:?}; {elapsed:?}", est.value))
}

fn c5_sup_is_min_ubs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..1000 {
        let a = RealSet::Finite(random_finite_set(&mut rng));
        let s = sup_set(&a).map_err(|e| e.to_string())?;
        let m = min_set(&ubs(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let RealSet::Finite(fs) = &a else { unreachable!() };
        let oracle = fs.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ensure(s == m && s == oracle, || format!("set {k} ({a}): sup {s}, min ubs {m}, max {oracle}"))?;
    }
    Ok("exact on 10^3 random finite sets".into())
}

fn c6_limit_witness() -> Outcome {
    let f = Sequence::parse("1/(n+1)").map_err(|e| e.to_string())?;
    let n = NWitness::parse("ceil(1/eps)").map_err(|e| e.to_string())?;
    let eps: Vec<f64> = (0..=6).map(|k| 10f64.powi(-k)).collect();
    ensure(check_limit(&f, 0.0, &n, &eps, 1000) == LimitVerdict::NotFalsified, || "1/(n+1) -> 0 falsified".into())?;
    let osc = Sequence::from_fn("(-1)^n", |i| if i % 2 == 0 { 1.0 } else { -1.0 });
    match check_limit(&osc, 0.0, &n, &eps, 1000) {
        LimitVerdict::Falsified { eps, index, .. } => {
            ensure((osc.at(index) - 0.0).abs() >= eps, || "witness does not reproduce".into())?;
            Ok(format!(
                "1/(n+1) -> 0 not falsified for eps down to 1e-6; (-1)^n -> 0 falsified at eps {eps}, n = {index}"
            ))
        }
        LimitVerdict::NotFalsified => Err("(-1)^n -> 0 not falsified".into()),
    }
}

fn c7_sigma_semantics() -> Outcome {
    let half = sigma(&|n| 0.5f64.powi(n as i32), DEFAULT_TOL, DEFAULT_MAX_TERMS).map_err(|e| e.to_string())?;
    ensure(half.converged && (half.value - 2.0).abs() <= 1e-9, || format!("sigma((1/2)^n) = {half:?}"))?;
    let e = powers_eval(&exp_ps(), 1.0, DEFAULT_TOL, DEFAULT_MAX_TERMS).map_err(|e| e.to_string())?;
    // Oracle: exact partial sum of 1/k! for k < 30, rounded once.
    let mut term = rat(1, 1);
    let mut sum = rat(0, 1);
    for k in 0..30 {
        sum += &term;
        term /= Rat::from_integer((k + 1).into());
    }
    let oracle = Scalar::from(sum).to_f64();
    ensure(oracle == E, || format!("oracle {oracle} disagrees with E"))?;
    ensure(e.terms_used <= 25 && (e.value - oracle).abs() <= 1e-12, || format!("powersEval(exp, 1) = {e:?}"))?;
    Ok(format!("sigma((1/2)^n) = {} +- 1e-9; exp(1) = {} +- 1e-12 in {} terms", half.value, e.value, e.terms_used))
}

fn c8_formal_ring() -> Outcome {
    (0..1000u64).into_par_iter().try_for_each(|k| {
        let mut rng = ChaCha8Rng::seed_from_u64(8_000 + k);
        let la = rng.random_range(1..=51);
        let lb = rng.random_range(1..=51);
        let (a, ca) = random_series(&mut rng, la);
        let (b, cb) = random_series(&mut rng, lb);
        let got: Vec<Rat> = mul_ps(&a, &b).prefix(50).map_err(|e| e.to_string())?.iter().map(exact).collect();
        ensure(got == convolve(&ca, &cb, 51), || format!("series pair {k} differs from convolution"))
    })?;
    let e = exp_ps();
    ensure(deriv_ps(&e).prefix(30).map_err(|e| e.to_string())? == e.prefix(30).map_err(|e| e.to_string())?, || {
        "deriv exp != exp".into()
    })?;
    let pyth = mathdsl_core::series::add_ps(&mul_ps(&sin_ps(), &sin_ps()), &mul_ps(&cos_ps(), &cos_ps()));
    let got = pyth.prefix(20).map_err(|e| e.to_string())?;
    let one: Vec<Scalar> = (0..21).map(|n| if n == 0 { Scalar::one() } else { Scalar::zero() }).collect();
    ensure(got == one && got.iter().all(Scalar::is_exact), || "sin^2 + cos^2 != 1".into())?;
    Ok("mulPS = convolution to order 50 on 10^3 pairs; deriv exp = exp to order 30; sin^2 + cos^2 = 1 to order 20"
        .into())
}

fn c9_laplace() -> Outcome {
    let start = Instant::now();
    let opts = LaplaceOptions::default();
    let one = laplace_numeric(&|_| 1.0, 2.0, &opts).map_err(|e| e.to_string())?;
    ensure((one - 0.5).abs() <= 1e-6, || format!("L[1](2) = {one}"))?;
    let opts = LaplaceOptions { growth: GrowthCap { bound: 5.0, rate: 0.0 }, ..LaplaceOptions::default() };
    let (alpha, beta, s) = (2.0, -3.0, 1.5);
    let f = |t: f64| t.sin();
    let g = |t: f64| (2.0 * t).cos();
    let lf = laplace_numeric(&f, s, &opts).map_err(|e| e.to_string())?;
    let lg = laplace_numeric(&g, s, &opts).map_err(|e| e.to_string())?;
    let lh = laplace_numeric(&|t| alpha * f(t) + beta * g(t), s, &opts).map_err(|e| e.to_string())?;
    let gap = (lh - (alpha * lf + beta * lg)).abs();
    ensure(gap <= 2.0 * opts.quad_tol, || format!("linearity gap {gap:e}"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("L[1](2) = {one} +- 1e-6; linearity gap {gap:e} <= 2e-9; {elapsed:?}"))
}

fn c10_proof_corpus() -> Outcome {
    let start = Instant::now();
    let sup = parse_proof(corpus::SUP_CHAIN).map_err(|e| e.to_string())?;
    ensure(sup.steps.len() == 8, || format!("{} steps", sup.steps.len()))?;
    let seeds = [0u64, 1, 2, 3, 4];
    for seed in seeds {
        let r = check_proof(&sup, 10_000, Some(seed));
        ensure(r.checked() == 8, || format!("seed {seed}: {}/8 checked", r.checked()))?;
    }
    for (name, src) in corpus::CORRUPTED {
        let p = parse_proof(src).map_err(|e| format!("{name}: {e}"))?;
        for seed in seeds {
            let r = check_proof(&p, 10_000, Some(seed));
            ensure(r.overall == Overall::Falsified, || format!("{name}, seed {seed}: not falsified"))?;
            for (i, v) in r.verdicts.iter().enumerate() {
                if let StepStatus::Falsified { counterexample, .. } = &v.status {
                    ensure(violates(&p, i, counterexample) == Some(true), || format!("{name}: unsound witness"))?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "sup chain 8/8 checked on 5 seeds at budget 10^4; corrupted corpus 10/10 falsified on 5 seeds; {elapsed:?}"
    ))
}

fn c11_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..1000 {
        let e = random_expr(&mut rng, 8, k % 2 == 1);
        let n = normalize(&e);
        for form in [Form::Form1, Form::Form2] {
            let text = print_expr(&e, form);
            let back = normalize(&parse_expr(&text).map_err(|err| format!("{text}: {err}"))?);
            let ok = if n.re.is_exact() && n.im.is_exact() { back == n } else { back.approx_eq(&n) };
            ensure(ok, || format!("{text} reparsed as {back:?}"))?;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let r = 10f64.powf(rng.random_range(-6.0..=6.0));
        let theta = rng.random_range(-PI..=PI);
        let z = CartComplex::from_f64(r * theta.cos(), r * theta.sin()).map_err(|e| e.to_string())?;
        let (x, y) = z.to_f64_pair();
        let (u, v) = from_polar(&to_polar(&z)).to_f64_pair();
        worst = worst.max((u - x).abs()).max((v - y).abs());
    }
    ensure(worst <= 1e-9, || format!("polar round-trip error {worst:e}"))?;
    Ok(format!("parse . print identity on 10^3 ASTs in both forms; polar round-trip on 10^5 samples, max error {worst:e} <= 1e-9"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("i squared is -1", c1_i_squared),
        ("polar form of i", c2_polar_of_i),
        ("rotation theorem", c3_rotation_theorem),
        ("completeness example", c4_completeness),
        ("sup = min . ubs", c5_sup_is_min_ubs),
        ("limit witness", c6_limit_witness),
        ("sigma semantics", c7_sigma_semantics),
        ("formal ring", c8_formal_ring),
        ("Laplace sanity", c9_laplace),
        ("proof corpus", c10_proof_corpus),
        ("round-trips", c11_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

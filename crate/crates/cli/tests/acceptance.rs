//! One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use entire_ops::builtin::{
    hamiltonian_series_oracle, polar_grid, schrodinger_check, schrodinger_propagator, translation_symbol,
    dilation_symbol,
};
use entire_ops::extraction::{extract_symbol, verify_roundtrip, BlackBox, FnBlackBox};
use entire_ops::growth::{
    check_condition, default_b_grid, default_eps_grid, derivative_norm_bound, norm_bracket, norm_upper, s_p,
};
use entire_ops::multiindex::{enumerate_up_to, factorial};
use entire_ops::operator::{apply, classify, compose};
use entire_ops::{
    BigRational, Complex, Complex64, Condition, GrowthParams, Mode, MultiIndex, OperatorSymbol, Status,
    TaylorPoly,
};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

fn fact(k: usize) -> f64 {
    factorial(k).to_f64().unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> TaylorPoly<f64> {
    let deg = rng.random_range(0..=max_deg);
    let mut terms = Vec::new();
    let mut top = vec![0u32; n];
    let mut left = deg as u32;
    for (j, t) in top.iter_mut().enumerate() {
        let take = if j + 1 == n { left } else { rng.random_range(0..=left) };
        *t = take;
        left -= take;
    }
    terms.push((MultiIndex::new(top), c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
    let all = enumerate_up_to(n, deg);
    for _ in 0..rng.random_range(0..5) {
        let a = all[rng.random_range(0..all.len())].clone();
        terms.push((a, c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
    }
    let mut f = TaylorPoly::zero(n, deg);
    for (a, c) in terms {
        f = f.add(&TaylorPoly::monomial(n, a, c, deg).unwrap()).unwrap();
    }
    f
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checks = 0usize;
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = 1 + i % 2;
        let f = random_poly(&mut rng, n, 20);
        for p in [0.5, 1.0, 2.0] {
            for tau in [0.5, 1.0, 2.0] {
                let gp = GrowthParams::new(p, tau).unwrap();
                let gp_s = GrowthParams::new(p, s_p(p) * tau).unwrap();
                let base = norm_bracket(&f, &gp).upper_or_inf();
                for alpha in enumerate_up_to(n, 6) {
                    let d = f.derivative(&alpha).unwrap();
                    if d.is_zero() {
                        continue;
                    }
                    let lhs = norm_bracket(&d, &gp_s).upper_or_inf();
                    let rhs = derivative_norm_bound(&alpha, &gp, n) * base;
                    checks += 1;
                    worst = worst.max(lhs / rhs);
                    ensure(lhs <= rhs * (1.0 + 1e-9), || {
                        format!("poly {i}, alpha {alpha}, p {p}, tau {tau}: {lhs} > {rhs}")
                    })?;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{checks} derivative checks, worst ratio {worst:.3e}, {secs:.1} s"))
}

fn crit2() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..=12u32 {
        let z = TaylorPoly::monomial(1, mi(&[k]), c64(1.0, 0.0), k as usize).unwrap();
        for p in [0.5, 1.0, 2.0, 3.0] {
            for tau in [0.5, 1.0, 2.0] {
                let kf = f64::from(k);
                let want = if k == 0 {
                    1.0
                } else {
                    (kf / (std::f64::consts::E * tau * p)).powf(kf / p)
                };
                let b = norm_bracket(&z, &GrowthParams::new(p, tau).unwrap());
                for got in [b.lower, b.upper_or_inf()] {
                    let rel = (got - want).abs() / want;
                    worst = worst.max(rel);
                    ensure(rel < 1e-6, || format!("z^{k}, p {p}, tau {tau}: {got} vs {want}"))?;
                }
            }
        }
    }
    Ok(format!("156 monomial brackets, worst relative error {worst:.2e}"))
}

/// Extracts from `bb`, compares with `want` and runs the monomial round trip.
fn roundtrip_case<B: BlackBox<f64>>(
    label: &str,
    bb: &B,
    want: &OperatorSymbol<f64>,
    coeff_trunc: usize,
    test_trunc: usize,
    worst: &mut f64,
) -> Result<(), String> {
    let n = bb.dim();
    let got = extract_symbol(bb, 8, Some(coeff_trunc)).map_err(|e| format!("{label}: {e}"))?;
    let coeff_err = got.max_abs_diff(want);
    let tests: Vec<_> = enumerate_up_to(n, 8)
        .into_iter()
        .map(|b| TaylorPoly::monomial(n, b, c64(1.0, 0.0), test_trunc).unwrap())
        .collect();
    let r = verify_roundtrip(bb, &got, &tests, 1e-10).map_err(|e| format!("{label}: {e}"))?;
    *worst = worst.max(coeff_err).max(r.max_error);
    ensure(coeff_err < 1e-10, || format!("{label}: coefficient error {coeff_err:e}"))?;
    ensure(r.pass && r.cases.iter().all(|c| c.covered), || {
        format!("{label}: roundtrip error {:e}", r.max_error)
    })
}

/// `Σ a_α ∂^α z^β` written out with falling factorials.
fn direct_action(sym: &OperatorSymbol<f64>, beta: &MultiIndex, trunc: usize) -> TaylorPoly<f64> {
    let n = sym.dim();
    let mut out = TaylorPoly::zero(n, trunc);
    for (alpha, a) in sym.terms() {
        if !alpha.leq(beta).unwrap() {
            continue;
        }
        let ff = beta.falling_factorial(alpha).to_f64().unwrap();
        let rest = beta.sub(alpha).unwrap();
        let mono = TaylorPoly::monomial(n, rest, c64(ff, 0.0), trunc).unwrap();
        out = out.add(&a.with_trunc(trunc).mul(&mono).unwrap()).unwrap();
    }
    out
}

fn crit3() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let one = c64(1.0, 0.0);

    for a in [c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 1.0)] {
        let bb = FnBlackBox::new(1, 8, move |b: &MultiIndex| {
            TaylorPoly::monomial(1, b.clone(), one, 8)?.translate(&[a])
        });
        let mut want = OperatorSymbol::new(1, 8);
        for k in 0..=8u32 {
            let c = a.powu(k) / fact(k as usize);
            want.insert(mi(&[k]), TaylorPoly::constant(1, 8, c)).unwrap();
        }
        roundtrip_case(&format!("translation {a}"), &bb, &want, 8, 8, &mut worst)?;
        cases += 1;
    }

    for sigma in [0.5, 1.0] {
        let bb = FnBlackBox::new(1, 8, move |b: &MultiIndex| {
            Ok(TaylorPoly::monomial(1, b.clone(), one, 8)?.dilate(&c64(1.0 + sigma, 0.0)))
        });
        let mut want = OperatorSymbol::new(1, 8);
        for k in 0..=8u32 {
            let c = c64(sigma.powi(k as i32) / fact(k as usize), 0.0);
            want.insert(mi(&[k]), TaylorPoly::monomial(1, mi(&[k]), c, 8).unwrap()).unwrap();
        }
        roundtrip_case(&format!("dilation {sigma}"), &bb, &want, 8, 8, &mut worst)?;
        cases += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (i, n) in [1usize, 1, 2].into_iter().enumerate() {
        let order = rng.random_range(1..=3);
        let mut sym = OperatorSymbol::new(n, order);
        for alpha in enumerate_up_to(n, order) {
            let mut a = random_poly(&mut rng, n, 4);
            a = a.with_trunc(12);
            sym.insert(alpha, a).unwrap();
        }
        let s2 = sym.clone();
        let bb = FnBlackBox::new(n, 12, move |b: &MultiIndex| Ok(direct_action(&s2, b, 12)));
        roundtrip_case(&format!("random operator {i}"), &bb, &sym, 12, 12, &mut worst)?;
        cases += 1;
    }

    for t in [0.1, 0.5] {
        let k = 40;
        let bb = FnBlackBox::new(1, 48, move |b: &MultiIndex| {
            let phi = TaylorPoly::monomial(1, b.clone(), one, b.degree() + 3 * k + 8)?;
            hamiltonian_series_oracle(&phi, t, k)
        });
        let want = schrodinger_propagator(t, 8, 16);
        roundtrip_case(&format!("schrodinger {t}"), &bb, &want, 16, 16, &mut worst)?;
        cases += 1;
    }
    Ok(format!("{cases} operators, worst error {worst:.2e}"))
}

fn crit4() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1usize, 2] {
        let bb = FnBlackBox::new(n, 6, move |b: &MultiIndex| TaylorPoly::monomial(n, b.clone(), c64(1.0, 0.0), 6));
        let s = extract_symbol(&bb, 6, None).map_err(|e| e.to_string())?;
        let a0 = s.coeff(&MultiIndex::zero(n)).ok_or("a_0 missing")?;
        ensure(a0.max_abs_diff(&TaylorPoly::constant(n, 6, c64(1.0, 0.0))) == 0.0, || {
            format!("n = {n}: a_0 is not 1")
        })?;
        for alpha in enumerate_up_to(n, 6).into_iter().filter(|a| !a.is_zero()) {
            let m = s
                .coeff(&alpha)
                .map(|a| a.degree_magnitudes().into_iter().fold(0.0, f64::max))
                .unwrap_or(0.0);
            worst = worst.max(m);
            ensure(m < 1e-14, || format!("n = {n}, alpha {alpha}: {m:e}"))?;
        }
    }
    Ok(format!("largest |a_alpha| for 1 <= |alpha| <= 6: {worst:.2e}"))
}

fn crit5() -> Outcome {
    let exp60 = TaylorPoly::from_terms(1, 60, (0..=60u32).map(|k| (mi(&[k]), c64(1.0 / fact(k as usize), 0.0))))
        .unwrap();
    let sq = TaylorPoly::from_terms(1, 2, [(mi(&[0]), c64(1.0, 0.0)), (mi(&[1]), c64(2.0, 0.0)), (mi(&[2]), c64(1.0, 0.0))])
        .unwrap();
    let pts = polar_grid(2.0, 5, 5);
    ensure(pts.len() == 25 && pts.iter().all(|z| z.norm() <= 2.0 + 1e-12), || "bad sample grid".into())?;
    let (mut dev, mut res): (f64, f64) = (0.0, 0.0);
    for (name, phi) in [("exp", &exp60), ("(1+z)^2", &sq)] {
        for t in [0.1, 0.5] {
            let r = schrodinger_check(phi, t, &pts, 40, 1e-6).map_err(|e| e.to_string())?;
            dev = dev.max(r.max_relative_deviation);
            res = res.max(r.max_pde_residual);
            ensure(r.pass, || {
                format!(
                    "{name}, t = {t}: deviation {:e}, residual {:e}",
                    r.max_relative_deviation, r.max_pde_residual
                )
            })?;
        }
    }
    Ok(format!("max deviation {dev:.2e}, max PDE residual {res:.2e}"))
}

fn all_conditions(sym: &OperatorSymbol<f64>, p: f64, mode: Mode) -> Result<Status, String> {
    let mut statuses = Vec::new();
    for c in Condition::ALL {
        let v = check_condition(sym, p, mode, c, &default_eps_grid(), &default_b_grid()).map_err(|e| e.to_string())?;
        statuses.push(v.status);
    }
    ensure(statuses.iter().all(|s| *s == statuses[0]), || {
        format!("conditions disagree at p = {p}, {mode:?}: {statuses:?}")
    })?;
    Ok(statuses[0])
}

fn crit6() -> Outcome {
    let tr = translation_symbol(&[c64(1.0, 0.0)], 24, 60);
    let dil = dilation_symbol(c64(1.0, 0.0), 1, 24, 60);
    let sch = schrodinger_propagator(0.5, 24, 60);
    let zero = OperatorSymbol::<f64>::zero(1, 24);
    let mut runs = 0;
    let mut need = |label: &str, sym: &OperatorSymbol<f64>, p: f64, mode: Mode| -> Result<(), String> {
        runs += 4;
        let s = all_conditions(sym, p, mode).map_err(|e| format!("{label}: {e}"))?;
        ensure(s == Status::Pass, || format!("{label} at p = {p}, {mode:?}: {s:?}"))
    };
    for p in [0.5, 1.0, 2.0] {
        need("translation", &tr, p, Mode::Normal)?;
        need("translation", &tr, p, Mode::Minimal)?;
        need("dilation", &dil, p, Mode::Normal)?;
    }
    need("schrodinger", &sch, 1.0, Mode::Normal)?;
    for p in [0.5, 1.0, 2.0, 3.0] {
        need("zero", &zero, p, Mode::Normal)?;
        need("zero", &zero, p, Mode::Minimal)?;
    }
    Ok(format!("{runs} condition checks pass, conditions agree on every symbol"))
}

fn crit7() -> Outcome {
    let n = 1usize;
    let (p, tau) = (1.0, 1.0);
    let gp = GrowthParams::new(p, tau).unwrap();
    let tr = translation_symbol(&[c64(1.0, 0.0)], 24, 0);
    let cert = classify(&tr, p, Mode::Normal).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let f = random_poly(&mut rng, n, 10);
        let rep = apply(&tr, &f, &gp, Some(&cert)).map_err(|e| e.to_string())?;
        let tp = rep.tail_params.ok_or("no tail parameters")?;
        let tail = rep.tail_bound.ok_or("no tail bound")?;
        let ratio = 4.0 * (n as f64).sqrt() * (std::f64::consts::E * tau * p).powf(1.0 / p) * tp.eps;
        let c_prime = 2f64.powi(n as i32 - 1) * tp.c / (1.0 - ratio);
        let lhs = norm_upper(&rep.result, &GrowthParams::new(p, tp.b + s_p(p) * tau).unwrap()) + tail;
        let rhs = c_prime * norm_upper(&f, &gp);
        worst = worst.max(lhs / rhs);
        ensure(lhs <= rhs * (1.0 + 1e-6), || format!("input {i}: {lhs} > {rhs}"))?;
    }
    Ok(format!("50 inputs, worst lhs/rhs {worst:.3e}"))
}

fn q(num: i64, den: i64) -> Complex<BigRational> {
    Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
}

fn random_q_poly(rng: &mut ChaCha8Rng, n: usize, deg: usize, trunc: usize) -> TaylorPoly<BigRational> {
    let mut f = TaylorPoly::zero(n, trunc);
    for a in enumerate_up_to(n, deg) {
        if rng.random_bool(0.5) {
            let c = q(rng.random_range(-9..=9), rng.random_range(1..=6));
            f = f.add(&TaylorPoly::monomial(n, a, c, trunc).unwrap()).unwrap();
        }
    }
    f
}

fn random_q_op(rng: &mut ChaCha8Rng, n: usize) -> OperatorSymbol<BigRational> {
    let mut s = OperatorSymbol::new(n, 2);
    for a in enumerate_up_to(n, 2) {
        s.insert(a, random_q_poly(rng, n, 3, 12)).unwrap();
    }
    s
}

fn crit8() -> Outcome {
    let mut worst: f64 = 0.0;
    for (a, b) in [
        (vec![c64(0.3, 0.2)], vec![c64(-0.7, 0.1)]),
        (vec![c64(1.0, 0.0)], vec![c64(2.0, 0.0)]),
        (vec![c64(0.5, -0.5), c64(-1.0, 0.25)], vec![c64(0.2, 0.0), c64(0.0, 1.0)]),
    ] {
        let ab: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let got = compose(&translation_symbol(&a, 10, 0), &translation_symbol(&b, 10, 0), 10).map_err(|e| e.to_string())?;
        let err = got.max_abs_diff(&translation_symbol(&ab, 10, 0));
        worst = worst.max(err);
        ensure(err < 1e-12, || format!("translation group law: {err:e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exact = 0;
    for i in 0..20 {
        let n = 1 + i % 2;
        let (pp, qq) = (random_q_op(&mut rng, n), random_q_op(&mut rng, n));
        let f = random_q_poly(&mut rng, n, 8, 16);
        let gp = GrowthParams::new(1.0, 1.0).unwrap();
        let pq = compose(&pp, &qq, 4).map_err(|e| e.to_string())?;
        let lhs = apply(&pq, &f, &gp, None).map_err(|e| e.to_string())?.result;
        let inner = apply(&qq, &f, &gp, None).map_err(|e| e.to_string())?.result;
        let rhs = apply(&pp, &inner, &gp, None).map_err(|e| e.to_string())?.result;
        ensure(lhs == rhs, || format!("case {i}: P(Qf) differs from (PQ)f"))?;
        exact += 1;
    }
    Ok(format!("group law error {worst:.2e}, {exact} exact composition checks"))
}

fn crit9() -> Outcome {
    let problems = common::check_cases();
    if problems.is_empty() {
        Ok(format!("{} CLI cases byte-identical across runs with expected exit codes", common::CASES.len()))
    } else {
        Err(problems.join("; "))
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("derivative majorant", crit1),
        ("monomial norms", crit2),
        ("extraction round trip", crit3),
        ("identity extraction", crit4),
        ("schrodinger factorisation", crit5),
        ("classification", crit6),
        ("continuity bound", crit7),
        ("ring laws", crit8),
        ("cli golden files", crit9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use powrep::cover::{
    certificate_pipeline, default_pool, find_certificate, k_fold_coverage, power_orbit,
    verify_certificate, PipelineOutcome, ResidueCertificate,
};
use powrep::greedy::{frobenius_exact, greedy_length_bound, greedy_single_base, schur_bound};
use powrep::lambda::{build_record, primorial_trend, search_small_lambda, SearchConfig};
use powrep::numeric::{carmichael, factor_u64};
use powrep::search::{min_representation, threshold_f, ThresholdOutcome};
use powrep::{CoefficientSet, Instance};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn max_exponent(mut n: u64) -> u32 {
    let mut best = 0;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        best = best.max(e);
        p += 1;
    }
    if n > 1 {
        best = best.max(1);
    }
    best
}

/// Least `L >= 1` with `b^L = 1 (mod m)` for every unit `b`: start from the
/// group order and strip prime factors while the exponent still works.
fn universal_exponent(m: u64) -> u64 {
    if m <= 2 {
        return 1;
    }
    let units: Vec<u64> = (1..m).filter(|&b| gcd(b, m) == 1).collect();
    let works = |l: u64| units.iter().all(|&b| pow_mod(b, l, m) == 1);
    let mut l = units.len() as u64;
    for q in prime_divisors(l) {
        while l % q == 0 && works(l / q) {
            l /= q;
        }
    }
    l
}

fn criterion_1() -> Outcome {
    for m in 1..=10_000u64 {
        let got = carmichael(&factor_u64(m).unwrap()).to_u64().unwrap();
        let want = universal_exponent(m);
        if got != want {
            return fail(format!("m = {m}: carmichael {got}, brute force {want}"));
        }
    }
    pass("10000 moduli agree")
}

fn criterion_2() -> Outcome {
    let mut checked = 0u64;
    let mut tight = 0u64;
    for m in 2..=2000u64 {
        let fm = factor_u64(m).unwrap();
        let bound = carmichael(&fm).to_u64().unwrap() + max_exponent(m) as u64;
        let mut seen = vec![false; m as usize];
        for b in 2..=50u64 {
            let orbit = power_orbit(b, &fm).unwrap();
            // direct iteration: preperiod + period <= m
            seen.iter_mut().for_each(|s| *s = false);
            let mut x = 1 % m;
            for _ in 0..=m {
                seen[x as usize] = true;
                x = x * b % m;
            }
            let direct: Vec<u64> = (0..m).filter(|&r| seen[r as usize]).collect();
            if direct != orbit.residues {
                return fail(format!(
                    "orbit of {b} mod {m} differs from direct iteration"
                ));
            }
            if orbit.residues.len() as u64 > bound {
                return fail(format!(
                    "b = {b}, m = {m}: {} > {bound}",
                    orbit.residues.len()
                ));
            }
            if orbit.residues.len() as u64 == bound {
                tight += 1;
            }
            checked += 1;
        }
    }
    pass(format!(
        "{checked} pairs, zero violations, {tight} with equality"
    ))
}

/// Capped term values `r b^e` with `|r b^e| <= cap`, by nested loops.
fn capped_terms(inst: &Instance, cap: i128) -> HashSet<i128> {
    let mut out = HashSet::new();
    for &b in inst.basis.bases() {
        let mut p: i128 = 1;
        while p <= cap {
            for &r in inst.coeffs.coeffs() {
                let v = r as i128 * p;
                if v.abs() <= cap {
                    out.insert(v);
                }
            }
            p *= b as i128;
        }
    }
    out
}

/// Smallest `n >= 1` not a sum of at most `k - 1` terms capped at `beta n`,
/// for `k <= 3`.
fn oracle_f(k: usize, inst: &Instance, beta: i128) -> u64 {
    assert!(k <= 3);
    (1i128..)
        .find(|&n| {
            if k == 1 {
                return true;
            }
            let terms = capped_terms(inst, beta * n);
            if terms.contains(&n) {
                return false;
            }
            if k == 2 {
                return true;
            }
            !terms.iter().any(|&t| terms.contains(&(n - t)))
        })
        .unwrap() as u64
}

fn f_exact(k: usize, inst: &Instance, beta: u64, n_max: u64) -> Option<u64> {
    match threshold_f(k, inst, beta, n_max).unwrap() {
        ThresholdOutcome::Found(r) => Some(r.f),
        ThresholdOutcome::Inconclusive { .. } => None,
    }
}

fn criterion_3() -> Outcome {
    let inst = Instance::nathanson();
    let expected = [1u64, 5, 21];
    let mut row = Vec::new();
    for (i, &want) in expected.iter().enumerate() {
        let k = i + 1;
        let oracle = oracle_f(k, &inst, 4);
        if oracle != want {
            return fail(format!("oracle gives f({k}) = {oracle}, golden {want}"));
        }
        for beta in [4, 8] {
            let got = f_exact(k, &inst, beta, 10_000);
            if got != Some(want) {
                return fail(format!("f({k}) at beta {beta}: {got:?}, want {want}"));
            }
        }
        if oracle_f(k, &inst, 8) != want {
            return fail(format!("oracle at beta 8 moves f({k})"));
        }
        row.push(format!("f({k}) = {want}"));
    }
    pass(format!("{} at beta 4 and 8, oracle agrees", row.join(", ")))
}

fn criterion_4() -> Outcome {
    let cases = [
        (Instance::nathanson(), 5usize),
        (Instance::new(vec![2], vec![1]).unwrap(), 6),
        (Instance::new(vec![2, 3], vec![1]).unwrap(), 5),
        (Instance::new(vec![3], vec![-1, 1]).unwrap(), 5),
    ];
    let mut n_checked = 0;
    for (inst, kmax) in &cases {
        for k in 1..=*kmax {
            let Some(f) = f_exact(k, inst, 8, 1 << 20) else {
                return fail(format!("f({k}) not found for {}", inst.to_json()));
            };
            let Some(rep) = min_representation(f as i64, inst, 8).unwrap() else {
                return fail(format!("no witness for f({k}) = {f}"));
            };
            let lens: Vec<usize> = (1..f)
                .map(|n| {
                    min_representation(n as i64, inst, 8)
                        .unwrap()
                        .map_or(usize::MAX, |r| r.len())
                })
                .collect();
            if k > 1 && lens.iter().any(|&l| l >= k) {
                return fail(format!("some n < f({k}) = {f} needs {k} terms"));
            }
            if rep.len() != k || !rep.validate(inst) || rep.value() != BigInt::from(f) {
                return fail(format!(
                    "f({k}) = {f} for {}: witness {rep} of length {}",
                    inst.to_json(),
                    rep.len()
                ));
            }
            n_checked += 1;
        }
    }
    pass(format!(
        "{n_checked} thresholds have a valid witness of exactly k terms"
    ))
}

fn criterion_5() -> Outcome {
    for b in [2u64, 3, 5] {
        for n in 1..=1_000_000u64 {
            let trace = greedy_single_base(&BigInt::from(n), b).unwrap();
            let bound = greedy_length_bound(&BigUint::from(n), b);
            if trace.len() as u64 > bound {
                return fail(format!(
                    "n = {n}, b = {b}: length {} > {bound}",
                    trace.len()
                ));
            }
            if trace.representation.value() != BigInt::from(n) {
                return fail(format!("n = {n}, b = {b}: trace evaluates wrongly"));
            }
        }
    }
    pass("3000000 traces within the bound")
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (bases, label) in [(vec![2u64], "B={2}"), (vec![2, 3], "B={2,3}")] {
        let inst = Instance::new(bases, vec![1]).unwrap();
        for k in 2..=4usize {
            let x = (inst.rho() * k * inst.t()) as f64;
            let bound = (1.5 * x * x.ln()).powi(k as i32 - 1);
            let f = f_exact(k, &inst, 1, 1 << 20).expect("positive instances reach f quickly");
            let holds = (f as f64) <= bound;
            ok &= holds;
            if !holds {
                lines.push(format!("{label} k={k}: f={f} > {bound:.3}"));
            }
        }
    }
    if ok {
        pass("six cases hold")
    } else {
        fail(lines.join("; "))
    }
}

fn tamper_rejected(cert: &ResidueCertificate) -> Result<(), String> {
    let mut variants = Vec::new();
    let mut c = cert.clone();
    c.class = 1;
    variants.push(("class 1", c));
    let mut c = cert.clone();
    c.covered += 1;
    variants.push(("count", c));
    let mut c = cert.clone();
    c.digest = "0".repeat(64);
    variants.push(("digest", c));
    let mut c = cert.clone();
    c.k += 1;
    variants.push(("k", c));
    for (what, c) in variants {
        if verify_certificate(&c, 100_000, 16).unwrap().ok {
            return Err(format!("tampered {what} accepted for m = {}", cert.m));
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let inst = Instance::nathanson();
    let pool = default_pool(1 << 20).unwrap();
    let mut summary = Vec::new();
    let mut verified = 0;
    for k in 1..=3usize {
        let PipelineOutcome::Certified(report) = certificate_pipeline(&inst, k, &pool).unwrap()
        else {
            return fail(format!("no certificate for k = {k}"));
        };
        // the pipeline's certificate plus the next few certifying moduli
        let mut certs = vec![report.certificate.clone()];
        let start = report.candidates_tried;
        for &m in pool[start..].iter() {
            if certs.len() == 4 {
                break;
            }
            if let Some(c) = find_certificate(&inst, k, &[m]).unwrap() {
                certs.push(c);
            }
        }
        for cert in &certs {
            let round = ResidueCertificate::from_json(&cert.to_json()).unwrap();
            let rep = verify_certificate(&round, 100_000, 16).unwrap();
            if !rep.ok {
                return fail(format!("k = {k}, m = {}: {:?}", cert.m, rep.diagnostics));
            }
            if let Err(e) = tamper_rejected(cert) {
                return fail(e);
            }
            verified += 1;
        }
        summary.push(format!("k={k}: m={} c={}", report.certificate.m, report.n0));
    }
    pass(format!(
        "{verified} certificates verified, tampering rejected ({})",
        summary.join(", ")
    ))
}

fn brute_coverage(s: &[u64], k: usize, m: u64, include_empty: bool) -> Vec<u64> {
    let mut hit = vec![false; m as usize];
    if include_empty {
        hit[0] = true;
    }
    fn rec(s: &[u64], left: usize, acc: u64, m: u64, hit: &mut [bool]) {
        for &x in s {
            let v = (acc + x) % m;
            hit[v as usize] = true;
            if left > 1 {
                rec(s, left - 1, v, m, hit);
            }
        }
    }
    rec(s, k, 0, m, &mut hit);
    (0..m).filter(|&r| hit[r as usize]).collect()
}

fn criterion_8() -> Outcome {
    let mut cases = 0;
    for m in 1..=8u64 {
        for mask in 0u32..(1 << m) {
            let s: Vec<u64> = (0..m).filter(|&r| mask >> r & 1 == 1).collect();
            for k in 1..=3 {
                for empty in [false, true] {
                    let got = k_fold_coverage(&s, k, m, empty).unwrap().residues();
                    if got != brute_coverage(&s, k, m, empty) {
                        return fail(format!("S = {s:?}, k = {k}, m = {m}"));
                    }
                    cases += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let m = rng.gen_range(1..=100u64);
        let size = rng.gen_range(0..=8usize);
        let s: Vec<u64> = (0..size).map(|_| rng.gen_range(0..m)).collect();
        let k = rng.gen_range(1..=3);
        let empty = rng.gen_bool(0.5);
        if k_fold_coverage(&s, k, m, empty).unwrap().residues() != brute_coverage(&s, k, m, empty) {
            return fail(format!("random S = {s:?}, k = {k}, m = {m}"));
        }
        cases += 1;
    }
    pass(format!("{cases} cases match tuple enumeration"))
}

fn criterion_9() -> Outcome {
    let mut pairs = 0;
    for a in 2..=50u64 {
        for b in a + 1..=50 {
            if gcd(a, b) != 1 {
                continue;
            }
            let set = CoefficientSet::new(vec![a as i64, b as i64]).unwrap();
            let got = frobenius_exact(&set).unwrap();
            if got != (a * b - a - b) as u128 {
                return fail(format!("({a}, {b}): {got}"));
            }
            if got > schur_bound(&set).unwrap() {
                return fail(format!("({a}, {b}) exceeds the Schur bound"));
            }
            pairs += 1;
        }
    }
    let mut sets = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    while sets < 300 {
        let size = rng.gen_range(3..=5);
        let mut v: Vec<i64> = (0..size).map(|_| rng.gen_range(2..=40)).collect();
        v.sort_unstable();
        v.dedup();
        let Ok(set) = CoefficientSet::new(v.clone()) else {
            continue;
        };
        if set.gcd() != 1 {
            continue;
        }
        if frobenius_exact(&set).unwrap() > schur_bound(&set).unwrap() {
            return fail(format!("{v:?} exceeds the Schur bound"));
        }
        sets += 1;
    }
    pass(format!(
        "{pairs} pairs match ab - a - b; {sets} larger sets within the Schur bound"
    ))
}

fn criterion_10() -> Outcome {
    let r = build_record(30).unwrap();
    let product: u64 = r.primes.iter().product();
    let lcm = r
        .primes
        .iter()
        .fold(1u64, |acc, &p| acc / gcd(acc, p - 1) * (p - 1));
    if r.m != BigUint::from(14322u32)
        || product != 14322
        || r.lambda_m != BigUint::from(30u32)
        || lcm != 30
    {
        return fail(format!("y = 30 gives m = {}, lambda = {}", r.m, r.lambda_m));
    }
    let config = SearchConfig {
        primorial_bound: 23,
        ..SearchConfig::default()
    };
    let records = search_small_lambda(&config, 0.0, f64::MAX).unwrap();
    for r in &records {
        if (BigUint::from(r.y) % &r.lambda_m) != BigUint::from(0u32) {
            return fail(format!("lambda(m) does not divide y = {}", r.y));
        }
    }
    println!("    score trend over primorials:");
    println!(
        "    {:>12} {:>8} {:>10} {:>10}",
        "y", "#primes", "ln m", "score"
    );
    for r in primorial_trend(29).unwrap() {
        let score = r.score.map_or("-".to_string(), |s| format!("{s:.4}"));
        println!(
            "    {:>12} {:>8} {:>10.3} {:>10}",
            r.y,
            r.primes.len(),
            r.log_m,
            score
        );
    }
    pass(format!(
        "y = 30 gives m = 14322, lambda = 30; {} records satisfy lambda | y",
        records.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        (
            "carmichael matches brute force, m <= 10^4",
            criterion_1,
            Duration::from_secs(30),
        ),
        (
            "orbit bound lambda(m) + max alpha",
            criterion_2,
            Duration::from_secs(60),
        ),
        (
            "Nathanson thresholds 1, 5, 21",
            criterion_3,
            Duration::from_secs(60),
        ),
        (
            "f(k) has a k-term witness",
            criterion_4,
            Duration::from_secs(60),
        ),
        (
            "greedy length bound, n <= 10^6",
            criterion_5,
            Duration::from_secs(60),
        ),
        (
            "positive-coefficient threshold bound",
            criterion_6,
            Duration::from_secs(120),
        ),
        (
            "certificate soundness",
            criterion_7,
            Duration::from_secs(600),
        ),
        (
            "sumset matches tuple enumeration",
            criterion_8,
            Duration::from_secs(60),
        ),
        (
            "Frobenius closed form and Schur bound",
            criterion_9,
            Duration::from_secs(60),
        ),
        (
            "lambda-search sanity",
            criterion_10,
            Duration::from_secs(60),
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if took > *limit {
            out = fail(format!("{} (took {took:.1?}, limit {limit:?})", out.detail));
        }
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag}: {name} [{took:.2?}] {}",
            i + 1,
            out.detail
        );
        if !out.ok {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use powrep::cover::{
    find_certificate, instance_coverage, k_fold_coverage, single_term_residues, verify_certificate,
};
use powrep::greedy::represent_coprime;
use powrep::numeric::{carmichael, factor_u64, is_prime_u64, mult_order};
use powrep::search::{
    count_representables, min_length, min_length_depth_first, threshold_f, LevelSet,
    ThresholdOutcome,
};
use powrep::Instance;

#[test]
fn factors_multiply_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100_000 {
        let bits = rng.gen_range(1..=64u32);
        let n: u64 = if bits == 64 {
            rng.gen()
        } else {
            rng.gen_range(1u64 << (bits - 1)..1u64 << bits)
        }
        .max(1);
        let f = factor_u64(n).unwrap();
        let mut product = BigUint::one();
        for pp in f.factors() {
            let p = pp.prime.to_u64().unwrap();
            assert!(
                is_prime_u64(p),
                "{p} in the factorization of {n} is composite"
            );
            product *= BigUint::from(p).pow(pp.exp);
        }
        assert_eq!(product, BigUint::from(n));
    }
}

#[test]
fn order_divides_lambda_divides_totient() {
    for m in 1..=2000u64 {
        let f = factor_u64(m).unwrap();
        let lambda = carmichael(&f);
        assert!((f.totient() % &lambda) == BigUint::from(0u32));
        for b in 1..m.min(60) {
            if num_integer::gcd(b, m) != 1 {
                continue;
            }
            let ord = mult_order(&BigInt::from(b), &f).unwrap();
            assert!((&lambda % ord) == BigUint::from(0u32));
        }
    }
}

#[test]
fn breadth_and_depth_engines_agree() {
    let inst = Instance::nathanson();
    for n in -2000i64..=2000 {
        let a = min_length(n, &inst, 8).unwrap();
        let b = min_length_depth_first(n, &inst, 8, 6).unwrap();
        assert_eq!(a, b, "n = {n}");
    }
}

/// Unbounded-knapsack minimal counts with terms `<= limit`.
fn dp_min_counts(inst: &Instance, limit: usize) -> Vec<Option<u32>> {
    let mut terms = HashSet::new();
    for &b in inst.basis.bases() {
        let mut p = 1u64;
        while p as usize <= limit {
            for &r in inst.coeffs.coeffs() {
                let v = r as u64 * p;
                if v as usize <= limit {
                    terms.insert(v as usize);
                }
            }
            p *= b;
        }
    }
    let mut best: Vec<Option<u32>> = vec![None; limit + 1];
    best[0] = Some(0);
    for n in 1..=limit {
        best[n] = terms
            .iter()
            .filter(|&&t| t <= n)
            .filter_map(|&t| best[n - t].map(|c| c + 1))
            .min();
    }
    best
}

#[test]
fn positive_lengths_match_dp() {
    for (bases, coeffs) in [
        (vec![2u64, 3], vec![1i64]),
        (vec![3], vec![1, 2]),
        (vec![5], vec![3, 4]),
    ] {
        let inst = Instance::new(bases, coeffs).unwrap();
        let dp = dp_min_counts(&inst, 10_000);
        for n in (1..=10_000usize).step_by(7).chain(1..200) {
            let got = min_length(n as i64, &inst, 1).unwrap();
            assert_eq!(
                got,
                dp[n].map(|c| c as usize),
                "n = {n}, {}",
                inst.to_json()
            );
        }
    }
}

#[test]
fn level_sets_grow_with_depth_and_cap() {
    let inst = Instance::nathanson();
    let mut prev: Option<HashSet<i64>> = None;
    for j in 0..=4 {
        let level = LevelSet::build(&inst, j, 64, 300).unwrap();
        let vals: HashSet<i64> = level.values().into_iter().collect();
        if let Some(p) = &prev {
            assert!(p.is_subset(&vals));
        }
        let wider: HashSet<i64> = LevelSet::build(&inst, j, 256, 300)
            .unwrap()
            .values()
            .into_iter()
            .collect();
        assert!(vals.is_subset(&wider));
        prev = Some(vals);
    }
}

#[test]
fn pigeonhole_bounds_threshold() {
    for inst in [
        Instance::new(vec![2], vec![1]).unwrap(),
        Instance::new(vec![2, 3], vec![1]).unwrap(),
    ] {
        for k in 2..=5 {
            for n in [16u64, 100, 1000, 5000] {
                let c = count_representables(&inst, k, n).unwrap();
                assert!(c.count as f64 <= c.safe_bound);
                if c.count < n {
                    let f = match threshold_f(k, &inst, 1, n).unwrap() {
                        ThresholdOutcome::Found(r) => r.f,
                        ThresholdOutcome::Inconclusive { .. } => u64::MAX,
                    };
                    assert!(f <= n);
                }
            }
        }
    }
}

#[test]
fn coprime_representation_length_stays_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (bases, coeffs) in [
        (vec![2u64], vec![3i64, 5]),
        (vec![3], vec![-2, 3]),
        (vec![2, 3], vec![1, -1]),
    ] {
        let inst = Instance::new(bases, coeffs).unwrap();
        for _ in 0..1000 {
            let n = BigInt::from(rng.gen_range(200u64..=1_000_000_000));
            let rep = represent_coprime(&n, &inst).unwrap();
            assert!(rep.representation.validate(&inst));
            assert_eq!(rep.representation.value(), n);
            assert!(rep.representation.len() as u64 <= rep.length_bound);
        }
    }
}

#[test]
fn certificates_verify_and_bound_threshold() {
    let inst = Instance::nathanson();
    for k in 1..=2usize {
        let f_next = threshold_f(k + 1, &inst, 8, 10_000)
            .unwrap()
            .found()
            .unwrap()
            .f;
        let mut emitted = 0;
        for m in 2..=400u64 {
            let Some(cert) = find_certificate(&inst, k, &[m]).unwrap() else {
                continue;
            };
            assert!(
                verify_certificate(&cert, 100_000, 16).unwrap().ok,
                "m = {m}"
            );
            assert!(
                f_next <= cert.class,
                "f({}) = {f_next} > class {}",
                k + 1,
                cert.class
            );
            emitted += 1;
        }
        assert!(emitted > 0);
    }
}

#[test]
fn single_term_set_within_bound() {
    let inst = Instance::new(vec![2, 3, 10], vec![-3, 1, 4]).unwrap();
    for m in 2..=500u64 {
        let f = factor_u64(m).unwrap();
        let s = single_term_residues(&inst, &f).unwrap();
        let bound = (inst.rho() * inst.t()) as u64
            * (carmichael(&f).to_u64().unwrap() + f.max_exponent() as u64);
        assert!(s.len() as u64 <= bound);
    }
}

proptest! {
    #[test]
    fn coverage_size_bounded_and_monotone(
        m in 1u64..300,
        s in prop::collection::vec(0u64..300, 0..10),
        k in 1usize..4,
    ) {
        let mut distinct = s.iter().map(|x| x % m).collect::<Vec<_>>();
        distinct.sort_unstable();
        distinct.dedup();
        let a = k_fold_coverage(&s, k, m, false).unwrap();
        let b = k_fold_coverage(&s, k + 1, m, false).unwrap();
        let cap = (distinct.len() as u64 + 1).saturating_pow(k as u32);
        prop_assert!(a.count() <= m.min(cap));
        prop_assert!(a.residues().iter().all(|&r| b.contains(r)));
    }

    #[test]
    fn instance_coverage_contains_single_terms(m in 2u64..2000, k in 1usize..3) {
        let inst = Instance::nathanson();
        let f = factor_u64(m).unwrap();
        let cov = instance_coverage(&inst, k, &f).unwrap();
        for r in single_term_residues(&inst, &f).unwrap() {
            prop_assert!(cov.contains(r));
        }
    }
}
